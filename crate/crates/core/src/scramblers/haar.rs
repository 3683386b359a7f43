use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::statevec::Unitary;

/// Largest register for which a dense Haar unitary is sampled (d = 4096).
pub const MAX_HAAR_QUBITS: usize = 12;

/// Haar-random `d × d` unitary, deterministic in `seed`.
pub fn sample_haar(d: usize, seed: u64) -> Result<Unitary> {
    sample_haar_with(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Ginibre matrix → QR → fix the phase of each column by the phase of `R`'s
/// diagonal, which makes the distribution exactly Haar.
pub fn sample_haar_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Unitary> {
    if d == 0 {
        return Err(Error::domain("Haar unitary of dimension 0"));
    }
    if d > 1 << MAX_HAAR_QUBITS {
        return Err(Error::domain(format!(
            "dense Haar sampling capped at dimension {}, got {d}",
            1usize << MAX_HAAR_QUBITS
        )));
    }
    let z = DMatrix::<C64>::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        col *= phase;
    }
    Ok(Unitary::new_unchecked(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;

    #[test]
    fn samples_are_unitary() {
        for (d, seed) in [(1, 0), (2, 1), (5, 2), (16, 3), (64, 4)] {
            let u = sample_haar(d, seed).unwrap();
            assert!(unitarity_defect(u.matrix()) < 1e-10);
        }
        assert!(sample_haar(0, 0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(sample_haar(8, 42).unwrap(), sample_haar(8, 42).unwrap());
        assert_ne!(sample_haar(8, 42).unwrap(), sample_haar(8, 43).unwrap());
    }

    #[test]
    fn first_moment_of_corner_entry() {
        // E|U₀₀|² = 1/d
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let n = 5000;
        let mean: f64 =
            (0..n).map(|_| sample_haar_with(2, &mut rng).unwrap().matrix()[(0, 0)].norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "{mean}");
    }

    #[test]
    fn second_moment_of_corner_entry() {
        // E|U₀₀|⁴ = 2/(d(d+1)) = 0.1 at d = 4
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let n = 2000;
        let mean: f64 =
            (0..n).map(|_| sample_haar_with(4, &mut rng).unwrap().matrix()[(0, 0)].norm_sqr().powi(2)).sum::<f64>()
                / n as f64;
        assert!((mean - 0.1).abs() < 0.01, "{mean}");
    }

    #[test]
    fn diagonal_phases_are_not_biased() {
        // Without the R-phase correction, arg U₀₀ concentrates; with it E[U₀₀] = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        let n = 4000;
        let mean: C64 = (0..n).map(|_| sample_haar_with(3, &mut rng).unwrap().matrix()[(0, 0)]).sum::<C64>() / n as f64;
        assert!(mean.norm() < 0.03, "{mean}");
    }
}
