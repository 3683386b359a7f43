use num_complex::Complex64 as C64;

use super::{Bipartition, PureState};
use crate::error::{Error, Result};
use crate::linalg::{eigh, hermiticity_defect, trace, CMat};

/// Tolerance for hermiticity, trace and spectral checks on density operators.
pub const DENSITY_TOLERANCE: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: CMat,
}

impl DensityMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        check_square(&m)?;
        check_hermitian(&m, DENSITY_TOLERANCE)?;
        let tr = trace(&m);
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOLERANCE {
            return Err(Error::validation(format!("density matrix trace is {tr}")));
        }
        let (values, _) = eigh(&m);
        if let Some(&low) = values.first() {
            if low < -DENSITY_TOLERANCE {
                return Err(Error::validation(format!("negative eigenvalue {low:.3e}")));
            }
        }
        Ok(Self { m })
    }

    /// For matrices that are density operators by construction (e.g. `M·M†` of a normalized state).
    pub(crate) fn new_unchecked(m: CMat) -> Self {
        Self { m }
    }

    pub fn pure(state: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self { m: &v * v.adjoint() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: CMat::identity(dim, dim) / C64::new(dim as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.m).0
    }

    pub fn conjugate_by(&self, u: &CMat) -> Self {
        Self { m: u * &self.m * u.adjoint() }
    }
}

/// Derivative `ρ̇` of a density operator: Hermitian and traceless.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityDerivative {
    m: CMat,
}

impl DensityDerivative {
    pub fn new(m: CMat) -> Result<Self> {
        check_square(&m)?;
        check_hermitian(&m, DENSITY_TOLERANCE)?;
        let tr = trace(&m);
        if tr.norm() > DENSITY_TOLERANCE {
            return Err(Error::validation(format!("derivative operator has trace {tr}")));
        }
        Ok(Self { m })
    }

    pub(crate) fn new_unchecked(m: CMat) -> Self {
        Self { m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: CMat::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { m: &self.m * C64::new(c, 0.0) }
    }

    pub fn conjugate_by(&self, u: &CMat) -> Self {
        Self { m: u * &self.m * u.adjoint() }
    }
}

fn check_square(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::domain(format!("expected a square matrix, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

fn check_hermitian(m: &CMat, tol: f64) -> Result<()> {
    let defect = hermiticity_defect(m);
    if defect > tol {
        return Err(Error::validation(format!("matrix is not Hermitian (defect {defect:.3e})")));
    }
    Ok(())
}

/// Amplitudes rearranged as a `d_kept × d_traced` matrix, `M[i,k] = ψ(i,k)`.
pub(crate) fn amplitude_matrix(amps: &[C64], part: &Bipartition) -> CMat {
    let ko = part.kept_offsets();
    let to = part.traced_offsets();
    CMat::from_fn(ko.len(), to.len(), |i, k| amps[ko[i] | to[k]])
}

/// Reduced state on the kept qubits: `ρ[i,j] = Σ_k ψ(i,k)·conj(ψ(j,k))`.
pub fn partial_trace(state: &PureState, part: &Bipartition) -> Result<DensityMatrix> {
    check_partition(state.n_qubits(), part)?;
    let m = amplitude_matrix(state.amplitudes(), part);
    Ok(DensityMatrix::new_unchecked(&m * m.adjoint()))
}

/// Partial trace of a full-register operator over the traced qubits.
pub fn partial_trace_op(op: &CMat, part: &Bipartition) -> Result<CMat> {
    let dim = 1usize << part.n_qubits();
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::domain(format!(
            "operator is {}×{}, bipartition expects {dim}×{dim}",
            op.nrows(),
            op.ncols()
        )));
    }
    check_hermitian(op, 1e-8)?;
    let ko = part.kept_offsets();
    let to = part.traced_offsets();
    Ok(CMat::from_fn(ko.len(), ko.len(), |i, j| to.iter().map(|&t| op[(ko[i] | t, ko[j] | t)]).sum()))
}

/// `tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.m.iter().map(|z| z.norm_sqr()).sum()
}

fn check_partition(n_qubits: usize, part: &Bipartition) -> Result<()> {
    if part.n_qubits() != n_qubits {
        return Err(Error::domain(format!(
            "bipartition of {} qubits used on a {n_qubits}-qubit state",
            part.n_qubits()
        )));
    }
    Ok(())
}
