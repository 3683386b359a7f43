use std::collections::HashMap;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use super::perm::Permutation;
use crate::error::{Error, Result};

/// Unitary Weingarten function `Wg(σ, d)` on `S_n`, exact.
#[derive(Clone, Debug)]
pub struct WeingartenTable {
    n: usize,
    d: u64,
    values: HashMap<Permutation, BigRational>,
}

impl WeingartenTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn get(&self, p: &Permutation) -> &BigRational {
        &self.values[p]
    }

    pub fn get_f64(&self, p: &Permutation) -> f64 {
        self.values[p].to_f64().unwrap_or(f64::NAN)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Permutation, &BigRational)> {
        self.values.iter()
    }
}

pub(crate) fn int(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub(crate) fn pow(x: u64, e: usize) -> BigRational {
    BigRational::from_integer(num::pow(BigInt::from(x), e))
}

/// `G_{σ,τ} = d^{c(στ⁻¹)}` over `Permutation::all(n)` ordering.
pub fn gram_matrix(n: usize, d: u64) -> Vec<Vec<BigRational>> {
    let perms = Permutation::all(n);
    perms.iter().map(|s| perms.iter().map(|t| pow(d, s.compose(&t.inverse()).cycle_count())).collect()).collect()
}

/// Inverts the Gram matrix of `S_n` at dimension `d` in exact arithmetic.
///
/// `G` is a group-convolution matrix, so its inverse is too: solving
/// `G·x = e_identity` gives `x_τ = Wg(τ)`.
pub fn weingarten_table(n: usize, d: u64) -> Result<WeingartenTable> {
    if !(2..=4).contains(&n) {
        return Err(Error::domain(format!("Weingarten tables implemented for 2 ≤ n ≤ 4, got {n}")));
    }
    if d < n as u64 {
        return Err(Error::domain(format!("Gram matrix of S_{n} is singular at d = {d} < n")));
    }
    let perms = Permutation::all(n);
    let size = perms.len();
    let identity_index = perms.iter().position(|p| *p == Permutation::identity(n)).expect("identity");
    let mut aug = gram_matrix(n, d);
    for (i, row) in aug.iter_mut().enumerate() {
        row.push(if i == identity_index { BigRational::one() } else { BigRational::zero() });
    }
    for col in 0..size {
        let pivot = (col..size)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or_else(|| Error::domain(format!("Gram matrix of S_{n} singular at d = {d}")))?;
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
    }
    let values = perms.into_iter().enumerate().map(|(i, p)| (p, aug[i][size].clone())).collect();
    Ok(WeingartenTable { n, d, values })
}
