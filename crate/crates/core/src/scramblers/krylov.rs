//! Lanczos approximation of `e^{-itH}v` for Hermitian `H` given as a matvec.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    /// Maximum Krylov subspace dimension per step.
    pub dim: usize,
    /// Bound on the local error estimate per step, relative to the vector norm.
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { dim: 30, tol: 1e-10, max_steps: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KrylovStats {
    pub steps: usize,
    pub matvecs: usize,
    pub max_error_estimate: f64,
}

/// Returns `e^{-itH}v`.
///
/// Each step builds an orthonormal Lanczos basis `Q` (full
/// reorthogonalization) and tridiagonal `T`, then picks the largest step
/// `dt ≤ remaining` with `β_m·|eₘᵀ e^{-i·dt·T} e₁| ≤ tol`. The basis does not
/// depend on `dt`, so shrinking the step only re-evaluates the small
/// exponential.
pub fn expm_krylov<F>(mut apply_h: F, v: &[C64], t: f64, opts: &KrylovOptions) -> Result<(Vec<C64>, KrylovStats)>
where
    F: FnMut(&[C64], &mut [C64]),
{
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("evolution time must be finite and ≥ 0, got {t}")));
    }
    if opts.dim < 2 {
        return Err(Error::domain("Krylov dimension must be at least 2"));
    }
    let n = v.len();
    let mut w = v.to_vec();
    let mut stats = KrylovStats::default();
    let mut remaining = t;
    let mut dt_guess = t;
    let mut scratch = vec![C64::new(0.0, 0.0); n];

    while remaining > 0.0 {
        if stats.steps >= opts.max_steps {
            return Err(Error::Numerical {
                routine: "expm_krylov",
                detail: format!(
                    "no convergence after {} steps ({} matvecs); remaining time {remaining:.3e}, last step {dt_guess:.3e}",
                    stats.steps, stats.matvecs
                ),
            });
        }
        let beta0 = norm_sqr(&w).sqrt();
        if beta0 == 0.0 {
            break;
        }
        let m_max = opts.dim.min(n.max(1));
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max);
        basis.push(w.iter().map(|z| z / beta0).collect());
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let mut breakdown = false;

        for j in 0..m_max {
            apply_h(&basis[j], &mut scratch);
            stats.matvecs += 1;
            let a = inner(&basis[j], &scratch).re;
            alpha.push(a);
            for (z, q) in scratch.iter_mut().zip(&basis[j]) {
                *z -= q * a;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (z, q) in scratch.iter_mut().zip(&basis[j - 1]) {
                    *z -= q * b;
                }
            }
            for q in &basis {
                let c = inner(q, &scratch);
                for (z, qi) in scratch.iter_mut().zip(q) {
                    *z -= qi * c;
                }
            }
            let b = norm_sqr(&scratch).sqrt();
            beta.push(b);
            let scale = a.abs() + if j > 0 { beta[j - 1] } else { 0.0 };
            if b <= 1e-13 * scale.max(1e-300) || j + 1 == n {
                breakdown = true;
                break;
            }
            if j + 1 < m_max {
                basis.push(scratch.iter().map(|z| z / b).collect());
            }
        }

        let m = alpha.len();
        let tri = DMatrix::<f64>::from_fn(m, m, |i, k| {
            if i == k {
                alpha[i]
            } else if i + 1 == k {
                beta[i]
            } else if k + 1 == i {
                beta[k]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(tri);
        let residual = if breakdown { 0.0 } else { beta[m - 1] };
        let coeffs = |dt: f64| -> Vec<C64> {
            (0..m)
                .map(|k| {
                    (0..m)
                        .map(|l| {
                            C64::from_polar(1.0, -dt * eig.eigenvalues[l])
                                * (eig.eigenvectors[(k, l)] * eig.eigenvectors[(0, l)])
                        })
                        .sum()
                })
                .collect()
        };

        let mut dt = dt_guess.min(remaining);
        let (y, err) = loop {
            let y = coeffs(dt);
            let err = residual * y[m - 1].norm();
            if err <= opts.tol {
                break (y, err);
            }
            dt *= 0.5;
            if dt <= remaining * 1e-14 {
                return Err(Error::Numerical {
                    routine: "expm_krylov",
                    detail: format!("step size underflow at remaining time {remaining:.3e} (error estimate {err:.3e})"),
                });
            }
        };
        stats.max_error_estimate = stats.max_error_estimate.max(err);
        for (i, z) in w.iter_mut().enumerate() {
            *z = basis.iter().zip(&y).map(|(q, c)| q[i] * c).sum::<C64>() * beta0;
        }
        stats.steps += 1;
        remaining = if dt >= remaining { 0.0 } else { remaining - dt };
        dt_guess = if breakdown { remaining } else { dt * 1.25 };
    }
    Ok((w, stats))
}
