use super::density::amplitude_matrix;
use super::{Bipartition, PureState};
use crate::error::{Error, Result};

/// Coefficients at or below this value do not count toward the Schmidt rank.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Schmidt {
    /// Descending, nonnegative, `Σc² = 1`.
    pub coefficients: Vec<f64>,
    pub rank: usize,
}

impl Schmidt {
    pub fn entropy_bits(&self) -> f64 {
        entanglement_entropy(&self.coefficients)
    }
}

pub fn schmidt(state: &PureState, part: &Bipartition) -> Result<Schmidt> {
    schmidt_with_tolerance(state, part, DEFAULT_RANK_TOLERANCE)
}

pub fn schmidt_with_tolerance(state: &PureState, part: &Bipartition, rank_tolerance: f64) -> Result<Schmidt> {
    if part.n_qubits() != state.n_qubits() {
        return Err(Error::domain("bipartition does not match state size"));
    }
    let m = amplitude_matrix(state.amplitudes(), part);
    let mut coefficients: Vec<f64> = m.singular_values().iter().copied().collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let rank = coefficients.iter().filter(|&&c| c > rank_tolerance).count();
    Ok(Schmidt { coefficients, rank })
}

/// Von Neumann entropy in bits of the Schmidt spectrum, `-Σ c² log₂ c²`.
pub fn entanglement_entropy(coefficients: &[f64]) -> f64 {
    coefficients.iter().map(|c| c * c).filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum::<f64>().max(0.0)
}
