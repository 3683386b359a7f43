//! Dense statevector of N qubits.
//!
//! Basis ordering: qubit 0 is the least significant bit of the basis index.

mod bipartition;
mod density;
mod schmidt;

pub use bipartition::Bipartition;
pub use density::{partial_trace, partial_trace_op, purity, DensityDerivative, DensityMatrix};
pub use schmidt::{entanglement_entropy, schmidt, schmidt_with_tolerance, Schmidt, DEFAULT_RANK_TOLERANCE};

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr, unitarity_defect, CMat, ONE, ZERO};

/// Absolute tolerance on `Σ|a|² = 1` for a state.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest register the dense kernels accept (2^26 amplitudes = 1 GiB).
pub const MAX_QUBITS: usize = 26;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::domain(format!(
                "expected {} amplitudes for {n_qubits} qubits, got {}",
                1usize << n_qubits,
                amps.len()
            )));
        }
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::validation(format!("state norm² is {norm}, expected 1")));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Skips the norm check; for kernels that preserve the norm by construction.
    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    /// Computational basis state `|bitstring⟩`.
    pub fn basis_state(n_qubits: usize, bitstring: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if bitstring >= dim {
            return Err(Error::domain(format!("bitstring {bitstring} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![ZERO; dim];
        amps[bitstring] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// `|+⟩^{⊗N}`: every amplitude equal to `2^{-N/2}`.
    pub fn plus_state(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = C64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self { n_qubits, amps: vec![a; dim] })
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut amps = vec![ZERO; dim];
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0] = h;
        amps[dim - 1] = h;
        Ok(Self { n_qubits, amps })
    }

    /// x-basis GHZ `(|+…+⟩ + e^{iφ}|−…−⟩)/√2`.
    pub fn ghz_x(n_qubits: usize, phase: f64) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let scale = (dim as f64).sqrt().recip() * std::f64::consts::FRAC_1_SQRT_2;
        let rel = C64::from_polar(1.0, phase);
        let amps = (0..dim)
            .map(|b| {
                let sign = if b.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                (ONE + rel * sign) * scale
            })
            .collect();
        Ok(Self { n_qubits, amps })
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut amps: Vec<C64> =
            (0..dim).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let norm = norm_sqr(&amps).sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amps, &other.amps)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &PureState) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn apply_one_qubit(&self, gate: &Gate1, target: usize) -> Result<PureState> {
        self.check_qubit(target)?;
        let mut amps = self.amps.clone();
        apply_one_qubit_raw(&mut amps, gate, target);
        Ok(Self::from_raw(self.n_qubits, amps))
    }

    pub fn apply_cx(&self, control: usize, target: usize) -> Result<PureState> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::domain(format!("CX control and target both {control}")));
        }
        let mut amps = self.amps.clone();
        apply_cx_raw(&mut amps, control, target);
        Ok(Self::from_raw(self.n_qubits, amps))
    }

    pub fn apply_dense(&self, u: &Unitary) -> Result<PureState> {
        if u.dim() != self.dim() {
            return Err(Error::domain(format!(
                "unitary of dimension {} applied to state of dimension {}",
                u.dim(),
                self.dim()
            )));
        }
        Ok(Self::from_raw(self.n_qubits, u.apply_raw(&self.amps)))
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::domain(format!("qubit {q} out of range for {} qubits", self.n_qubits)));
        }
        Ok(())
    }
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::domain(format!("qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}")));
    }
    Ok(())
}

/// Single-qubit unitary, validated once at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate1 {
    m: [[C64; 2]; 2],
}

impl Gate1 {
    pub fn new(m: [[C64; 2]; 2]) -> Result<Self> {
        let mat = CMat::from_fn(2, 2, |i, j| m[i][j]);
        let defect = unitarity_defect(&mat);
        if defect > 1e-10 {
            return Err(Error::validation(format!("single-qubit gate is not unitary (defect {defect:.3e})")));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: [[ONE, ZERO], [ZERO, ONE]] }
    }

    pub fn pauli_x() -> Self {
        Self { m: [[ZERO, ONE], [ONE, ZERO]] }
    }

    pub fn hadamard() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { m: [[h, h], [h, -h]] }
    }

    /// `R_y(angle) = exp(-i·angle·σ_y/2)`.
    pub fn ry(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Self { m: [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]] }
    }

    /// `R_x(angle) = exp(-i·angle·σ_x/2)`.
    pub fn rx(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Self { m: [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]] }
    }

    /// `R_z(angle) = exp(-i·angle·σ_z/2)`.
    pub fn rz(angle: f64) -> Self {
        Self { m: [[C64::from_polar(1.0, -angle / 2.0), ZERO], [ZERO, C64::from_polar(1.0, angle / 2.0)]] }
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        self.m
    }
}

/// Dense unitary on the full register.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    m: CMat,
}

impl Unitary {
    /// Accepts a square matrix after spot-checking up to eight columns for
    /// orthonormality at 1e-8.
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::domain(format!(
                "unitary must be square and non-empty, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let d = m.ncols();
        let probes: Vec<usize> =
            if d <= 8 { (0..d).collect() } else { (0..8).map(|k| (k * 2654435761usize) % d).collect() };
        for &a in &probes {
            for &b in &probes {
                let dot: C64 = m.column(a).iter().zip(m.column(b).iter()).map(|(x, y)| x.conj() * y).sum();
                let target = if a == b { ONE } else { ZERO };
                if (dot - target).norm() > 1e-8 {
                    return Err(Error::validation(format!("matrix is not unitary: column overlap ({a},{b}) = {dot}")));
                }
            }
        }
        Ok(Self { m })
    }

    pub(crate) fn new_unchecked(m: CMat) -> Self {
        Self { m }
    }

    pub fn identity(d: usize) -> Self {
        Self { m: CMat::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn adjoint(&self) -> Unitary {
        Self { m: self.m.adjoint() }
    }

    pub(crate) fn apply_raw(&self, amps: &[C64]) -> Vec<C64> {
        let v = DVector::from_column_slice(amps);
        (&self.m * v).as_slice().to_vec()
    }
}

pub(crate) fn apply_one_qubit_raw(amps: &mut [C64], gate: &Gate1, target: usize) {
    let [[a, b], [c, d]] = gate.m;
    let bit = 1usize << target;
    for base in 0..amps.len() {
        if base & bit != 0 {
            continue;
        }
        let (x0, x1) = (amps[base], amps[base | bit]);
        amps[base] = a * x0 + b * x1;
        amps[base | bit] = c * x0 + d * x1;
    }
}

pub(crate) fn apply_cx_raw(amps: &mut [C64], control: usize, target: usize) {
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    for b in 0..amps.len() {
        if b & cbit != 0 && b & tbit == 0 {
            amps.swap(b, b | tbit);
        }
    }
}
