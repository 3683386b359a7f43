//! Quantum Fisher information of pure and reduced states under a collective
//! phase encoding `e^{-iθĜ}`, `Ĝ = ½Σᵢσᵢ^axis`.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, hermiticity_defect, inner, norm_sqr, CMat};
use crate::scramblers::Scramble;
use crate::statevec::{
    apply_one_qubit_raw, partial_trace, partial_trace_op, Bipartition, DensityDerivative, DensityMatrix, Gate1,
    PureState,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::domain(format!("unknown axis `{other}`"))),
        }
    }
}

/// Collective generator `Ĝ = ½Σᵢσᵢ^axis` on `n_qubits` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub axis: Axis,
    pub n_qubits: usize,
}

impl Generator {
    pub fn new(axis: Axis, n_qubits: usize) -> Self {
        Self { axis, n_qubits }
    }

    /// Eigenvalue of `½Σσᶻ` on basis index `b`: `(N - 2·popcount(b))/2`.
    pub fn z_eigenvalue(n_qubits: usize, b: usize) -> f64 {
        (n_qubits as f64 - 2.0 * b.count_ones() as f64) / 2.0
    }

    /// `Ĝ|ψ⟩` for a raw amplitude vector.
    pub fn apply(&self, amps: &[C64]) -> Vec<C64> {
        let n = self.n_qubits;
        match self.axis {
            Axis::Z => amps.iter().enumerate().map(|(b, &a)| a * Self::z_eigenvalue(n, b)).collect(),
            Axis::X => (0..amps.len()).map(|b| (0..n).map(|q| amps[b ^ (1 << q)]).sum::<C64>() * 0.5).collect(),
            // σʸ|0⟩ = i|1⟩, σʸ|1⟩ = -i|0⟩
            Axis::Y => (0..amps.len())
                .map(|b| {
                    (0..n)
                        .map(|q| {
                            let src = amps[b ^ (1 << q)];
                            if b >> q & 1 == 1 {
                                C64::new(0.0, 1.0) * src
                            } else {
                                C64::new(0.0, -1.0) * src
                            }
                        })
                        .sum::<C64>()
                        * 0.5
                })
                .collect(),
        }
    }

    /// Dense `2^N × 2^N` matrix, built column by column from [`Generator::apply`].
    pub fn matrix(&self) -> CMat {
        let d = 1usize << self.n_qubits;
        let mut m = CMat::zeros(d, d);
        let mut e = vec![C64::new(0.0, 0.0); d];
        for j in 0..d {
            e[j] = C64::new(1.0, 0.0);
            m.set_column(j, &DVector::from_vec(self.apply(&e)));
            e[j] = C64::new(0.0, 0.0);
        }
        m
    }

    fn check(&self, state: &PureState) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::domain(format!(
                "generator on {} qubits applied to a {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QfiValue {
    pub value: f64,
    /// Eigenvalues of the state above the pair tolerance.
    pub rank_used: usize,
    /// Ordered eigenvalue pairs `(i, j)` dropped because `λᵢ + λⱼ ≤ pair_tolerance`.
    pub pairs_skipped: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QfiOptions {
    pub pair_tolerance: f64,
}

impl Default for QfiOptions {
    fn default() -> Self {
        Self { pair_tolerance: 1e-12 }
    }
}

/// `e^{-iθĜ}|ψ⟩`, applied as a product of single-qubit rotations.
pub fn encode(state: &PureState, g: &Generator, theta: f64) -> Result<PureState> {
    g.check(state)?;
    let mut amps = state.amplitudes().to_vec();
    encode_raw(&mut amps, g, theta);
    Ok(PureState::from_raw(state.n_qubits(), amps))
}

pub(crate) fn encode_raw(amps: &mut [C64], g: &Generator, theta: f64) {
    if theta == 0.0 {
        return;
    }
    let n = g.n_qubits;
    match g.axis {
        Axis::Z => {
            for (b, a) in amps.iter_mut().enumerate() {
                *a *= C64::from_polar(1.0, -theta * Generator::z_eigenvalue(n, b));
            }
        }
        Axis::X | Axis::Y => {
            let gate = if g.axis == Axis::X { Gate1::rx(theta) } else { Gate1::ry(theta) };
            for q in 0..n {
                apply_one_qubit_raw(amps, &gate, q);
            }
        }
    }
}

/// `−iĜ|ψ⟩`, the tangent vector of the encoded family.
fn tangent(amps: &[C64], g: &Generator) -> Vec<C64> {
    g.apply(amps).into_iter().map(|z| C64::new(z.im, -z.re)).collect()
}

/// `ρ̇ = −i[Ĝ, |ψ⟩⟨ψ|]` on the full register.
pub fn derivative_full(state: &PureState, g: &Generator) -> Result<DensityDerivative> {
    g.check(state)?;
    let psi = DVector::from_column_slice(state.amplitudes());
    let phi = DVector::from_vec(tangent(state.amplitudes(), g));
    let c = &phi * psi.adjoint() + &psi * phi.adjoint();
    Ok(DensityDerivative::new_unchecked(c))
}

/// `4(⟨Ĝ²⟩ − ⟨Ĝ⟩²)`.
pub fn qfi_pure(state: &PureState, g: &Generator) -> Result<QfiValue> {
    g.check(state)?;
    let gpsi = g.apply(state.amplitudes());
    let mean = inner(state.amplitudes(), &gpsi).re;
    let value = 4.0 * (norm_sqr(&gpsi) - mean * mean);
    let d = state.dim();
    Ok(QfiValue { value: value.max(0.0), rank_used: 1, pairs_skipped: d * d - 1 })
}

/// `2 Σ_{λᵢ+λⱼ > tol} |⟨ψᵢ|ρ̇|ψⱼ⟩|² / (λᵢ+λⱼ)` over the eigenbasis of `ρ`.
pub fn qfi_mixed(rho: &DensityMatrix, rho_dot: &DensityDerivative, opts: &QfiOptions) -> Result<QfiValue> {
    if rho.dim() != rho_dot.dim() {
        return Err(Error::domain(format!(
            "state is {}-dimensional but derivative is {}-dimensional",
            rho.dim(),
            rho_dot.dim()
        )));
    }
    for (name, m) in [("density matrix", rho.matrix()), ("derivative", rho_dot.matrix())] {
        let defect = hermiticity_defect(m);
        if defect > 1e-10 {
            return Err(Error::validation(format!("{name} is not Hermitian (defect {defect:.3e})")));
        }
    }
    let (values, vectors) = eigh(rho.matrix());
    let lambdas: Vec<f64> = values.into_iter().map(|l| l.max(0.0)).collect();
    let a = vectors.adjoint() * rho_dot.matrix() * &vectors;
    let d = lambdas.len();
    let tol = opts.pair_tolerance;
    let mut sum = 0.0;
    let mut skipped = 0;
    for j in 0..d {
        for i in 0..d {
            let s = lambdas[i] + lambdas[j];
            if s > tol {
                sum += a[(i, j)].norm_sqr() / s;
            } else {
                skipped += 1;
            }
        }
    }
    Ok(QfiValue { value: 2.0 * sum, rank_used: lambdas.iter().filter(|&&l| l > tol).count(), pairs_skipped: skipped })
}

/// QFI of the reduced state of `ψ` on the kept qubits, where `ψ̇` is the
/// derivative of the full pure state.
///
/// Works in the Schmidt basis: with `M` the `d_kept × d_traced` amplitude
/// matrix and thin SVD `M = VΣW†`, only `r = min(d_kept, d_traced)` eigenvectors
/// of `ρ = MM†` can be nonzero. Pairs inside that span use `V†ρ̇V`; pairs
/// between the span and its orthogonal complement (eigenvalue exactly 0)
/// collapse to `‖(1 − VV†)ρ̇vᵢ‖²/λᵢ`. Equal to [`qfi_mixed`] on the
/// explicit matrices, without ever forming a `d_kept × d_kept` eigenproblem.
pub fn qfi_from_amplitudes(psi: &[C64], psi_dot: &[C64], part: &Bipartition, opts: &QfiOptions) -> Result<QfiValue> {
    let dim = 1usize << part.n_qubits();
    if psi.len() != dim || psi_dot.len() != dim {
        return Err(Error::domain("amplitude vectors do not match the bipartition"));
    }
    if part.kept().is_empty() {
        // a one-dimensional state carries no information
        return Ok(QfiValue { value: 0.0, rank_used: 1, pairs_skipped: 0 });
    }
    let ko = part.kept_offsets();
    let to = part.traced_offsets();
    let m = CMat::from_fn(ko.len(), to.len(), |i, k| psi[ko[i] | to[k]]);
    let m_dot = CMat::from_fn(ko.len(), to.len(), |i, k| psi_dot[ko[i] | to[k]]);
    let d_kept = ko.len();

    let svd = m.clone().svd(true, false);
    let v = svd.u.ok_or_else(|| Error::Numerical {
        routine: "qfi_from_amplitudes",
        detail: "SVD did not return left singular vectors".into(),
    })?;
    let lambdas: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    let r = lambdas.len();

    // Y = ρ̇V = Ṁ(M†V) + M(Ṁ†V)
    let y = &m_dot * (m.adjoint() * &v) + &m * (m_dot.adjoint() * &v);
    let a = v.adjoint() * &y;
    let residual = &y - &v * &a;

    let tol = opts.pair_tolerance;
    let mut sum = 0.0;
    let mut skipped = 0usize;
    for j in 0..r {
        for i in 0..r {
            let s = lambdas[i] + lambdas[j];
            if s > tol {
                sum += a[(i, j)].norm_sqr() / s;
            } else {
                skipped += 1;
            }
        }
    }
    let kernel = d_kept - r;
    let mut rank_used = 0;
    for (i, &l) in lambdas.iter().enumerate() {
        if l > tol {
            rank_used += 1;
            if kernel > 0 {
                sum += 2.0 * residual.column(i).norm_squared() / l;
            }
        } else {
            skipped += 2 * kernel;
        }
    }
    skipped += kernel * kernel;
    Ok(QfiValue { value: 2.0 * sum, rank_used, pairs_skipped: skipped })
}

/// Encodes at `θ₀`, scrambles, discards the traced qubits and returns the QFI
/// of what is left.
pub fn qfi_reduced<S: Scramble + ?Sized>(
    state: &PureState,
    g: &Generator,
    scrambler: &S,
    part: &Bipartition,
    theta0: f64,
    opts: &QfiOptions,
) -> Result<QfiValue> {
    let (psi, psi_dot) = scrambled_pair(state, g, scrambler, part, theta0)?;
    qfi_from_amplitudes(&psi, &psi_dot, part, opts)
}

/// Same quantity as [`qfi_reduced`], through explicit `2^N × 2^N` operators:
/// `qfi_mixed(Tr ρ, Tr Uρ̇U†)`. Quadratic memory; meant for small registers.
pub fn qfi_reduced_dense<S: Scramble + ?Sized>(
    state: &PureState,
    g: &Generator,
    scrambler: &S,
    part: &Bipartition,
    theta0: f64,
    opts: &QfiOptions,
) -> Result<QfiValue> {
    let (psi, psi_dot) = scrambled_pair(state, g, scrambler, part, theta0)?;
    let scrambled = PureState::from_raw(state.n_qubits(), psi.clone());
    let rho = partial_trace(&scrambled, part)?;
    let psi = DVector::from_vec(psi);
    let phi = DVector::from_vec(psi_dot);
    let c_full = &phi * psi.adjoint() + &psi * phi.adjoint();
    let c = partial_trace_op(&c_full, part)?;
    qfi_mixed(&rho, &DensityDerivative::new_unchecked(c), opts)
}

fn scrambled_pair<S: Scramble + ?Sized>(
    state: &PureState,
    g: &Generator,
    scrambler: &S,
    part: &Bipartition,
    theta0: f64,
) -> Result<(Vec<C64>, Vec<C64>)> {
    if part.n_qubits() != state.n_qubits() {
        return Err(Error::domain("bipartition does not match state size"));
    }
    let fam = ScrambledFamily::new(state, g, scrambler, theta0)?;
    Ok((fam.psi, fam.psi_dot))
}

/// The scrambled state `Uψ(θ₀)` together with its θ-derivative `U(−iĜ)ψ(θ₀)`.
///
/// Build once, then evaluate the reduced QFI for any number of bipartitions.
#[derive(Clone, Debug)]
pub struct ScrambledFamily {
    n_qubits: usize,
    psi: Vec<C64>,
    psi_dot: Vec<C64>,
}

impl ScrambledFamily {
    pub fn new<S: Scramble + ?Sized>(state: &PureState, g: &Generator, scrambler: &S, theta0: f64) -> Result<Self> {
        g.check(state)?;
        let mut psi = state.amplitudes().to_vec();
        encode_raw(&mut psi, g, theta0);
        let mut psi_dot = tangent(&psi, g);
        scrambler.scramble(&mut psi)?;
        scrambler.scramble(&mut psi_dot)?;
        Ok(Self { n_qubits: state.n_qubits(), psi, psi_dot })
    }

    pub fn state(&self) -> PureState {
        PureState::from_raw(self.n_qubits, self.psi.clone())
    }

    pub fn qfi(&self, part: &Bipartition, opts: &QfiOptions) -> Result<QfiValue> {
        if part.n_qubits() != self.n_qubits {
            return Err(Error::domain("bipartition does not match state size"));
        }
        qfi_from_amplitudes(&self.psi, &self.psi_dot, part, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, trace};
    use crate::scramblers::{sample_haar, Identity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn encode_identity_and_eigenstate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = PureState::random(3, &mut rng).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            assert_eq!(encode(&s, &Generator::new(axis, 3), 0.0).unwrap(), s);
        }
        let zero = PureState::basis_state(4, 0).unwrap();
        let enc = encode(&zero, &Generator::new(Axis::Z, 4), 0.83).unwrap();
        assert!((enc.fidelity(&zero) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn z_encoding_pi_maps_plus_to_minus() {
        // exp(-iπσᶻ/2) = -iσᶻ, so |+⟩ → -i|−⟩.
        let plus = PureState::plus_state(1).unwrap();
        let out = encode(&plus, &Generator::new(Axis::Z, 1), PI).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [C64::new(0.0, -h), C64::new(0.0, h)];
        for (a, e) in out.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-14);
        }
    }

    #[test]
    fn xy_encoding_matches_dense_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = PureState::random(3, &mut rng).unwrap();
        for axis in [Axis::X, Axis::Y] {
            let g = Generator::new(axis, 3);
            let (vals, vecs) = eigh(&g.matrix());
            let phases =
                CMat::from_diagonal(&DVector::from_iterator(8, vals.iter().map(|l| C64::from_polar(1.0, -0.37 * l))));
            let u = &vecs * phases * vecs.adjoint();
            let dense = u * DVector::from_column_slice(s.amplitudes());
            let enc = encode(&s, &g, 0.37).unwrap();
            let diff = enc.amplitudes().iter().zip(dense.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12, "{axis:?}: {diff}");
        }
    }

    #[test]
    fn generator_spectrum_is_collective_spin() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let (vals, _) = eigh(&Generator::new(axis, 3).matrix());
            let expected = [-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5];
            for (v, e) in vals.iter().zip(expected) {
                assert!((v - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_of_eigenstate_vanishes() {
        let s = PureState::basis_state(3, 5).unwrap();
        let c = derivative_full(&s, &Generator::new(Axis::Z, 3)).unwrap();
        assert!(c.matrix().iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn derivative_square_trace_is_half_qfi() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let g = Generator::new(axis, 4);
            let s = PureState::random(4, &mut rng).unwrap();
            let c = derivative_full(&s, &g).unwrap();
            assert!(trace(c.matrix()).norm() < 1e-10);
            assert!(hermiticity_defect(c.matrix()) < 1e-10);
            let c2 = trace(&(c.matrix() * c.matrix())).re;
            assert!(rel(c2, qfi_pure(&s, &g).unwrap().value / 2.0) < 1e-8);
        }
        // |++⟩ with axis z: Var(Ĝ) = 1/2, I_q = 2, tr(Ĉ²) = 1.
        let pp = PureState::plus_state(2).unwrap();
        let c = derivative_full(&pp, &Generator::new(Axis::Z, 2)).unwrap();
        assert!((trace(&(c.matrix() * c.matrix())).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_qfi_reference_values() {
        for n in 1..9 {
            let zero = PureState::basis_state(n, 0).unwrap();
            assert!(rel(qfi_pure(&zero, &Generator::new(Axis::X, n)).unwrap().value, n as f64) < 1e-12);
            let ghz = PureState::ghz(n).unwrap();
            assert!(rel(qfi_pure(&ghz, &Generator::new(Axis::Z, n)).unwrap().value, (n * n) as f64) < 1e-12);
            assert!(qfi_pure(&zero, &Generator::new(Axis::Z, n)).unwrap().value.abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_qfi_trivial_cases() {
        let q = qfi_mixed(&DensityMatrix::maximally_mixed(2), &DensityDerivative::zeros(2), &QfiOptions::default())
            .unwrap();
        assert_eq!(q.value, 0.0);
        assert_eq!(q.pairs_skipped, 0);
    }

    #[test]
    fn mixed_qfi_of_projector_equals_pure_qfi() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = PureState::random(3, &mut rng).unwrap();
        let g = Generator::new(Axis::X, 3);
        let q = qfi_mixed(&DensityMatrix::pure(&s), &derivative_full(&s, &g).unwrap(), &QfiOptions::default()).unwrap();
        assert!(rel(q.value, qfi_pure(&s, &g).unwrap().value) < 1e-8);
        assert_eq!(q.rank_used, 1);
        assert_eq!(q.pairs_skipped, 49);
    }

    #[test]
    fn ghz_loses_everything_after_one_loss() {
        let n = 4;
        let ghz = PureState::ghz(n).unwrap();
        let g = Generator::new(Axis::Z, n);
        let part = Bipartition::trace_highest(n, 1).unwrap();
        let rho = partial_trace(&ghz, &part).unwrap();
        let c = partial_trace_op(derivative_full(&ghz, &g).unwrap().matrix(), &part).unwrap();
        let q = qfi_mixed(&rho, &DensityDerivative::new(c).unwrap(), &QfiOptions::default()).unwrap();
        assert!(q.value.abs() < 1e-9);
        let q = qfi_reduced(&ghz, &g, &Identity, &part, 0.0, &QfiOptions::default()).unwrap();
        assert!(q.value.abs() < 1e-9);
    }

    #[test]
    fn reduced_without_loss_is_pure_qfi() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = PureState::random(4, &mut rng).unwrap();
        let g = Generator::new(Axis::Y, 4);
        let all = Bipartition::trace_highest(4, 0).unwrap();
        let q = qfi_reduced(&s, &g, &Identity, &all, 0.0, &QfiOptions::default()).unwrap();
        assert!(rel(q.value, qfi_pure(&s, &g).unwrap().value) < 1e-8);
    }

    #[test]
    fn factored_route_matches_dense_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let opts = QfiOptions::default();
        for (n, axis, kept) in [
            (4, Axis::X, vec![0, 1, 2]),
            (4, Axis::Z, vec![1]),
            (5, Axis::Y, vec![0, 3]),
            (5, Axis::X, vec![0, 1, 2, 4]),
        ] {
            let s = PureState::random(n, &mut rng).unwrap();
            let u = sample_haar(1 << n, n as u64).unwrap();
            let g = Generator::new(axis, n);
            let part = Bipartition::new(n, &kept).unwrap();
            let fast = qfi_reduced(&s, &g, &u, &part, 0.2, &opts).unwrap();
            let dense = qfi_reduced_dense(&s, &g, &u, &part, 0.2, &opts).unwrap();
            assert!(rel(fast.value, dense.value) < 1e-9, "{} vs {}", fast.value, dense.value);
            assert_eq!(fast.pairs_skipped, dense.pairs_skipped);
            assert_eq!(fast.rank_used, dense.rank_used);
        }
    }

    #[test]
    fn derivative_conjugation_matches_partial_trace_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = PureState::random(3, &mut rng).unwrap();
        let g = Generator::new(Axis::X, 3);
        let u = sample_haar(8, 1).unwrap();
        let full = derivative_full(&s, &g).unwrap().conjugate_by(u.matrix());
        let scrambled = s.apply_dense(&u).unwrap();
        let psi = DVector::from_column_slice(scrambled.amplitudes());
        let mut phi = g.apply(s.amplitudes());
        phi.iter_mut().for_each(|z| *z = C64::new(z.im, -z.re));
        let phi = u.matrix() * DVector::from_vec(phi);
        let direct = &phi * psi.adjoint() + &psi * phi.adjoint();
        assert!(max_abs_diff(full.matrix(), &direct) < 1e-12);
    }

    #[test]
    fn rejects_mismatched_dims() {
        let r = qfi_mixed(&DensityMatrix::maximally_mixed(2), &DensityDerivative::zeros(4), &QfiOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
        let s = PureState::plus_state(2).unwrap();
        assert!(qfi_pure(&s, &Generator::new(Axis::X, 3)).is_err());
    }
}
