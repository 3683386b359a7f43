//! Exact Haar-averaged QFI fractions and the Weingarten machinery that
//! re-derives them.

mod closed_form;
mod perm;
mod verify;
mod weingarten;

pub use closed_form::{f_a, f_a_asymptote, f_a_f64, f_b, f_b_asymptote, f_b_f64, DimPair};
pub use perm::Permutation;
pub use verify::{
    moment2_mc_check, moment2_mc_check_with, random_two_copy_operator, verification_report, verify_fa_via_weingarten,
    verify_fb_via_em_sum, verify_fb_via_em_sum_with, CheckRow, CompositionOrder, FaCheck, FbCheck, MomentCheck,
    FA_GRID, FB_GRID,
};
pub use weingarten::{gram_matrix, weingarten_table, WeingartenTable};

/// Analytic reduced-QFI fraction after tracing `k` of `n` qubits.
///
/// Returns `f_B` when the kept part is the larger one, `f_A` when it is the
/// smaller one, and both `(f_A, f_B)` at the half cut.
pub fn analytic_ratio(n: u32, k: u32) -> crate::Result<AnalyticRatio> {
    if k > n {
        return Err(crate::Error::domain(format!("cannot trace {k} of {n} qubits")));
    }
    let kept = n - k;
    if 2 * kept > n {
        Ok(AnalyticRatio::Larger(f_b_f64(DimPair::qubits(k, kept)?)))
    } else if 2 * kept < n {
        Ok(AnalyticRatio::Smaller(f_a_f64(DimPair::qubits(kept, k)?)))
    } else {
        let dp = DimPair::qubits(kept, k)?;
        Ok(AnalyticRatio::HalfCut { f_a: f_a_f64(dp), f_b: f_b_f64(dp) })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticRatio {
    /// Kept subsystem is the larger side.
    Larger(f64),
    /// Kept subsystem is the smaller side.
    Smaller(f64),
    HalfCut {
        f_a: f64,
        f_b: f64,
    },
}
