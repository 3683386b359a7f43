//! Disordered XX chain `H = Σᵢ(σˣᵢσˣᵢ₊₁ + σʸᵢσʸᵢ₊₁) + Σᵢ hᵢσˣᵢ` (open boundary).

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::krylov::{expm_krylov, KrylovOptions, KrylovStats};
use super::Scramble;
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMat};
use crate::statevec::{PureState, Unitary};

/// Random transverse fields, one per site, each in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderFields {
    h: Vec<f64>,
}

impl DisorderFields {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.len() < 2 {
            return Err(Error::domain("XX chain needs at least 2 sites"));
        }
        if let Some(x) = h.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
            return Err(Error::domain(format!("field {x} outside [-1, 1]")));
        }
        Ok(Self { h })
    }

    pub fn values(&self) -> &[f64] {
        &self.h
    }

    pub fn n_sites(&self) -> usize {
        self.h.len()
    }
}

pub fn xx_fields(n: usize, seed: u64) -> Result<DisorderFields> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DisorderFields::new((0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
}

/// Matrix-free `H|ψ⟩`: the XX+YY bond maps `|…01…⟩ ↔ |…10…⟩` with weight 2,
/// the field flips a single bit with weight `hᵢ`.
pub(crate) fn xx_apply_raw(h: &[f64], src: &[C64], dst: &mut [C64]) {
    let n = h.len();
    for (b, out) in dst.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (i, &hi) in h.iter().enumerate() {
            acc += src[b ^ (1 << i)] * hi;
        }
        for i in 0..n - 1 {
            if (b >> i & 1) != (b >> (i + 1) & 1) {
                acc += src[b ^ (0b11 << i)] * 2.0;
            }
        }
        *out = acc;
    }
}

pub fn xx_hamiltonian_apply(state: &PureState, fields: &DisorderFields) -> Result<Vec<C64>> {
    check_sizes(state.n_qubits(), fields)?;
    let mut out = vec![C64::new(0.0, 0.0); state.dim()];
    xx_apply_raw(&fields.h, state.amplitudes(), &mut out);
    Ok(out)
}

/// Dense matrix assembled column by column from the matvec kernel.
pub fn xx_hamiltonian_dense(fields: &DisorderFields) -> CMat {
    let d = 1usize << fields.n_sites();
    let mut m = CMat::zeros(d, d);
    let mut e = vec![C64::new(0.0, 0.0); d];
    let mut col = vec![C64::new(0.0, 0.0); d];
    for j in 0..d {
        e[j] = C64::new(1.0, 0.0);
        xx_apply_raw(&fields.h, &e, &mut col);
        m.set_column(j, &DVector::from_column_slice(&col));
        e[j] = C64::new(0.0, 0.0);
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub krylov: KrylovOptions,
    /// Registers up to this size use the exact eigendecomposition propagator.
    pub exact_max_qubits: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { krylov: KrylovOptions::default(), exact_max_qubits: 8 }
    }
}

/// `e^{-itH}|ψ⟩`; exact for small registers, Krylov above `exact_max_qubits`.
pub fn evolve(state: &PureState, fields: &DisorderFields, t: f64) -> Result<PureState> {
    if state.n_qubits() <= EvolveOptions::default().exact_max_qubits {
        evolve_exact(state, fields, t)
    } else {
        evolve_krylov(state, fields, t, &KrylovOptions::default()).map(|(s, _)| s)
    }
}

pub fn evolve_krylov(
    state: &PureState,
    fields: &DisorderFields,
    t: f64,
    opts: &KrylovOptions,
) -> Result<(PureState, KrylovStats)> {
    check_sizes(state.n_qubits(), fields)?;
    let (amps, stats) = expm_krylov(|x, y| xx_apply_raw(&fields.h, x, y), state.amplitudes(), t, opts)?;
    Ok((PureState::from_raw(state.n_qubits(), amps), stats))
}

/// Reference propagator from the dense eigendecomposition of `H`.
pub fn evolve_exact(state: &PureState, fields: &DisorderFields, t: f64) -> Result<PureState> {
    check_sizes(state.n_qubits(), fields)?;
    let u = exact_propagator(fields, t)?;
    state.apply_dense(&u)
}

fn exact_propagator(fields: &DisorderFields, t: f64) -> Result<Unitary> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("evolution time must be finite and ≥ 0, got {t}")));
    }
    let (vals, vecs) = eigh(&xx_hamiltonian_dense(fields));
    let phases =
        CMat::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|e| C64::from_polar(1.0, -t * e))));
    Ok(Unitary::new_unchecked(&vecs * phases * vecs.adjoint()))
}

fn check_sizes(n_qubits: usize, fields: &DisorderFields) -> Result<()> {
    if fields.n_sites() != n_qubits {
        return Err(Error::domain(format!("{} disorder fields for a {n_qubits}-qubit state", fields.n_sites())));
    }
    Ok(())
}

/// Fixed-time evolution under one disorder realization, usable as a scrambler.
#[derive(Clone, Debug)]
pub struct XxEvolution {
    fields: DisorderFields,
    time: f64,
    opts: EvolveOptions,
    exact: Option<Unitary>,
}

impl XxEvolution {
    pub fn new(fields: DisorderFields, time: f64, opts: EvolveOptions) -> Result<Self> {
        if !(time >= 0.0 && time.is_finite()) {
            return Err(Error::domain(format!("evolution time must be finite and ≥ 0, got {time}")));
        }
        let exact =
            if fields.n_sites() <= opts.exact_max_qubits { Some(exact_propagator(&fields, time)?) } else { None };
        Ok(Self { fields, time, opts, exact })
    }

    pub fn fields(&self) -> &DisorderFields {
        &self.fields
    }

    pub fn time(&self) -> f64 {
        self.time
    }
}

impl Scramble for XxEvolution {
    fn scramble(&self, amps: &mut [C64]) -> Result<()> {
        if amps.len() != 1 << self.fields.n_sites() {
            return Err(Error::domain("XX evolution applied to a register of the wrong size"));
        }
        if let Some(u) = &self.exact {
            return u.scramble(amps);
        }
        let (out, _) = expm_krylov(|x, y| xx_apply_raw(&self.fields.h, x, y), amps, self.time, &self.opts.krylov)?;
        amps.copy_from_slice(&out);
        Ok(())
    }
}
