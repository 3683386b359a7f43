use crate::error::{Error, Result};

/// Split of the register into kept and traced qubits.
///
/// A kept-local index `i` and a traced-local index `k` combine into the full
/// basis index `kept_offset(i) | traced_offset(k)`, where bit `j` of `i` lands
/// on qubit `kept[j]` (and likewise for the traced side).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    n_qubits: usize,
    kept: Vec<usize>,
    traced: Vec<usize>,
    kept_offsets: Vec<usize>,
    traced_offsets: Vec<usize>,
}

impl Bipartition {
    /// `kept` must be strictly increasing and within range; the traced set is its complement.
    pub fn new(n_qubits: usize, kept: &[usize]) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::domain("bipartition of zero qubits"));
        }
        if kept.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!("kept qubits {kept:?} not strictly increasing")));
        }
        if let Some(&q) = kept.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::domain(format!("kept qubit {q} out of range for {n_qubits} qubits")));
        }
        let traced: Vec<usize> = (0..n_qubits).filter(|q| !kept.contains(q)).collect();
        Ok(Self {
            n_qubits,
            kept_offsets: offsets(kept),
            traced_offsets: offsets(&traced),
            kept: kept.to_vec(),
            traced,
        })
    }

    /// Keeps qubits `0..n_qubits-k`, tracing the `k` highest-index qubits.
    pub fn trace_highest(n_qubits: usize, k: usize) -> Result<Self> {
        if k > n_qubits {
            return Err(Error::domain(format!("cannot trace {k} of {n_qubits} qubits")));
        }
        let kept: Vec<usize> = (0..n_qubits - k).collect();
        Self::new(n_qubits, &kept)
    }

    /// Central cut: keeps the lower `⌊N/2⌋` qubits.
    pub fn mid_cut(n_qubits: usize) -> Result<Self> {
        Self::trace_highest(n_qubits, n_qubits - n_qubits / 2)
    }

    pub fn complement(&self) -> Self {
        Self::new(self.n_qubits, &self.traced).expect("complement of a valid bipartition")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn traced(&self) -> &[usize] {
        &self.traced
    }

    pub fn d_kept(&self) -> usize {
        self.kept_offsets.len()
    }

    pub fn d_traced(&self) -> usize {
        self.traced_offsets.len()
    }

    #[inline]
    pub fn full_index(&self, kept_index: usize, traced_index: usize) -> usize {
        self.kept_offsets[kept_index] | self.traced_offsets[traced_index]
    }

    pub(crate) fn kept_offsets(&self) -> &[usize] {
        &self.kept_offsets
    }

    pub(crate) fn traced_offsets(&self) -> &[usize] {
        &self.traced_offsets
    }
}

fn offsets(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|local| {
            qubits.iter().enumerate().filter(|(j, _)| local >> j & 1 == 1).fold(0, |acc, (_, &q)| acc | 1 << q)
        })
        .collect()
}
