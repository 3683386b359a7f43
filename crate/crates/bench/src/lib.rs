//! Fixtures shared by the benchmarks.

use qfilock_core::scramblers::{xx_fields, DisorderFields};
use qfilock_core::PureState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Register sizes swept by the statevector benchmarks.
pub const SIZES: [usize; 3] = [8, 12, 16];

/// Fixed-seed random state on `n` qubits.
pub fn random_state(n: usize, seed: u64) -> PureState {
    PureState::random(n, &mut ChaCha8Rng::seed_from_u64(seed)).expect("size within limits")
}

/// Fixed-seed disorder fields for an `n`-site chain.
pub fn fields(n: usize) -> DisorderFields {
    xx_fields(n, 42).expect("nonempty chain")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_reproducible() {
        assert_eq!(random_state(6, 3), random_state(6, 3));
        assert_eq!(fields(5).n_sites(), 5);
    }
}
