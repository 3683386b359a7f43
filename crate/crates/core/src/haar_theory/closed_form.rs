use num::{BigRational, ToPrimitive};

use super::weingarten::{int, pow};
use crate::error::{Error, Result};

/// Hilbert-space dimensions of the smaller (`d_a`) and larger (`d_b`) parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DimPair {
    pub d_a: u64,
    pub d_b: u64,
}

impl DimPair {
    pub fn new(d_a: u64, d_b: u64) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::domain(format!("dimensions must be ≥ 1, got ({d_a}, {d_b})")));
        }
        Ok(Self { d_a, d_b })
    }

    /// Qubit counts of the smaller and larger part.
    pub fn qubits(a: u32, b: u32) -> Result<Self> {
        Self::new(1 << a, 1 << b)
    }

    pub fn d(&self) -> u64 {
        self.d_a * self.d_b
    }
}

/// Haar-averaged QFI fraction left in the smaller subsystem:
/// `f_A = d(d_A² − 1) / (2(d² − 1))`.
pub fn f_a(dp: DimPair) -> BigRational {
    let d = dp.d();
    if d == 1 {
        return int(0);
    }
    int(d) * (pow(dp.d_a, 2) - int(1)) / (int(2) * (pow(d, 2) - int(1)))
}

/// Haar-averaged QFI fraction left in the larger subsystem:
///
/// `f_B = d_A³(d_B² − 1)[d_B(2d + 9) + d_A(−3d_A² + d + 15)] / (2(d² − 1)(d + 2)(d + 3))`.
pub fn f_b(dp: DimPair) -> BigRational {
    let (a, b, d) = (int(dp.d_a), int(dp.d_b), int(dp.d()));
    if dp.d() == 1 {
        return int(1);
    }
    let bracket = &b * (int(2) * &d + int(9)) + &a * (int(15) + &d - int(3) * &a * &a);
    let num = pow(dp.d_a, 3) * (&b * &b - int(1)) * bracket;
    let den = int(2) * (&d * &d - int(1)) * (&d + int(2)) * (&d + int(3));
    num / den
}

pub fn f_a_f64(dp: DimPair) -> f64 {
    f_a(dp).to_f64().unwrap_or(f64::NAN)
}

pub fn f_b_f64(dp: DimPair) -> f64 {
    f_b(dp).to_f64().unwrap_or(f64::NAN)
}

/// Large-dimension limit of `f_A`: `d_A / (2 d_B)`.
pub fn f_a_asymptote(dp: DimPair) -> f64 {
    dp.d_a as f64 / (2.0 * dp.d_b as f64)
}

/// Large-dimension limit of `f_B` for `d_B ≫ d_A ≫ 1`.
pub fn f_b_asymptote(_dp: DimPair) -> f64 {
    1.0
}
