//! Independent re-derivations of `f_A`/`f_B` from the Weingarten moment
//! formula, plus a Monte-Carlo check of the two-copy moment operator.

use nalgebra::DMatrix;
use num::{BigRational, ToPrimitive};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::closed_form::{f_a, f_b, DimPair};
use super::perm::Permutation;
use super::weingarten::{int, pow, weingarten_table};
use crate::error::{Error, Result};
use crate::linalg::{trace, CMat};
use crate::scramblers::sample_haar_with;

#[derive(Clone, Debug, PartialEq)]
pub struct FaCheck {
    pub weingarten: BigRational,
    pub closed_form: BigRational,
    pub max_abs_diff: f64,
}

impl FaCheck {
    pub fn passed(&self) -> bool {
        self.weingarten == self.closed_form
    }
}

/// Rebuilds `E[I_A]/I_q` as
/// `d_A Σ_{σ,τ∈S₂} Wg(τσ)·t(τ)·tr[V(σ)(V_A((12)) ⊗ 1̃_B)]`,
/// with `t(e) = tr[Ĉ]² = 0`, `t((12)) = tr[Ĉ²]/I_q = ½`, and the
/// cycle-counting rule `tr[V(σ)(V_A(π) ⊗ 1̃_B)] = d_A^{c(σπ)}·d_B^{c(σ)}`.
pub fn verify_fa_via_weingarten(dp: DimPair) -> Result<FaCheck> {
    let d = dp.d();
    let wg = weingarten_table(2, d)?;
    let e = Permutation::identity(2);
    let swap = Permutation::parse(2, "(12)")?;
    let copy_trace = |tau: &Permutation| if *tau == swap { int(1) / int(2) } else { int(0) };
    let mut total = int(0);
    for sigma in [&e, &swap] {
        for tau in [&e, &swap] {
            let w = wg.get(&tau.compose(sigma));
            let tr = pow(dp.d_a, sigma.compose(&swap).cycle_count()) * pow(dp.d_b, sigma.cycle_count());
            total += w * copy_trace(tau) * tr;
        }
    }
    total *= int(dp.d_a);
    let closed = f_a(dp);
    let diff = (&total - &closed).to_f64().unwrap_or(f64::NAN).abs();
    Ok(FaCheck { weingarten: total, closed_form: closed, max_abs_diff: diff })
}

/// How a permutation and a fixed cycle are combined inside `c(σ·cycle)`.
/// Both readings give the same cycle count (the products are conjugate);
/// kept selectable so the independence of the result can be checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompositionOrder {
    /// `σ ∘ π`: π acts first.
    SigmaAfter,
    /// `π ∘ σ`: σ acts first.
    SigmaBefore,
}

impl CompositionOrder {
    fn combine(self, sigma: &Permutation, other: &Permutation) -> Permutation {
        match self {
            CompositionOrder::SigmaAfter => sigma.compose(other),
            CompositionOrder::SigmaBefore => other.compose(sigma),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FbCheck {
    pub sum_value: BigRational,
    pub closed_form: BigRational,
    /// `sum_value / closed_form`.
    pub ratio: BigRational,
}

pub fn verify_fb_via_em_sum(dp: DimPair) -> Result<FbCheck> {
    verify_fb_via_em_sum_with(dp, CompositionOrder::SigmaAfter)
}

/// Evaluates the three- and four-copy permutation sums for `E[I_B]/I_q`:
///
/// ```text
///   Σ_{σ∈S₃} d_A^{c(σ)+2} d_B^{c(σ(123))} [2Wg((12)σ) + Wg((123)σ) + Wg((132)σ)]
/// − Σ_{σ∈S₄} d_A^{c(σ)+3} d_B^{c(σ(1234))} [3/2 Σ_{τ∈S₄′} Wg(τσ) + 3/4 Σ_{τ∈S₄″} Wg(τσ)]
/// ```
///
/// with `S₄′ = {(13), (13)(24)}` and `S₄″` the 3- and 4-cycles that keep
/// both derivative factors permuted.
pub fn verify_fb_via_em_sum_with(dp: DimPair, order: CompositionOrder) -> Result<FbCheck> {
    let d = dp.d();
    if d < 4 {
        return Err(Error::domain(format!("four-copy Weingarten sum needs d ≥ 4, got {d}")));
    }
    let wg3 = weingarten_table(3, d)?;
    let wg4 = weingarten_table(4, d)?;
    let p3 = |s: &str| Permutation::parse(3, s).expect("static cycle");
    let p4 = |s: &str| Permutation::parse(4, s).expect("static cycle");

    let cycle3 = p3("(123)");
    let weighted3 = [(int(2), p3("(12)")), (int(1), p3("(123)")), (int(1), p3("(132)"))];
    let mut three = int(0);
    for sigma in Permutation::all(3) {
        let bracket: BigRational = weighted3.iter().map(|(c, tau)| c * wg3.get(&order.combine(tau, &sigma))).sum();
        let dims = pow(dp.d_a, sigma.cycle_count() + 2) * pow(dp.d_b, order.combine(&sigma, &cycle3).cycle_count());
        three += dims * bracket;
    }

    let cycle4 = p4("(1234)");
    let s4_prime = [p4("(13)"), p4("(13)(24)")];
    let s4_double_prime = ["(123)", "(132)", "(134)", "(143)", "(1243)", "(1324)", "(1342)", "(1423)"].map(p4);
    let mut four = int(0);
    for sigma in Permutation::all(4) {
        let prime: BigRational = s4_prime.iter().map(|tau| wg4.get(&order.combine(tau, &sigma))).sum();
        let double_prime: BigRational = s4_double_prime.iter().map(|tau| wg4.get(&order.combine(tau, &sigma))).sum();
        let bracket = int(3) / int(2) * prime + int(3) / int(4) * double_prime;
        let dims = pow(dp.d_a, sigma.cycle_count() + 3) * pow(dp.d_b, order.combine(&sigma, &cycle4).cycle_count());
        four += dims * bracket;
    }

    let sum_value = three - four;
    let closed_form = f_b(dp);
    let ratio = &sum_value / &closed_form;
    Ok(FbCheck { sum_value, closed_form, ratio })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentCheck {
    /// Largest entrywise deviation between the sample mean and the
    /// Weingarten prediction, divided by the largest entry of the operator.
    pub max_deviation: f64,
    pub samples: usize,
}

/// Random traceless Hermitian operator on `C^d ⊗ C^d`, deterministic in `seed`.
pub fn random_two_copy_operator(d: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dd = d * d;
    let g = DMatrix::<C64>::from_fn(dd, dd, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let mut h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let shift = trace(&h) / dd as f64;
    for i in 0..dd {
        h[(i, i)] -= shift;
    }
    h
}

pub fn moment2_mc_check(d: usize, samples: usize, seed: u64) -> Result<MomentCheck> {
    moment2_mc_check_with(&random_two_copy_operator(d, seed ^ 0x5eed), samples, seed)
}

/// Compares `E[U⊗U Ô U†⊗U†]` over Haar samples with
/// `Σ_{σ,τ∈S₂} Wg(τσ)·tr[Ô V(τ)]·V(σ)`.
pub fn moment2_mc_check_with(op: &CMat, samples: usize, seed: u64) -> Result<MomentCheck> {
    let dd = op.nrows();
    let d = (dd as f64).sqrt().round() as usize;
    if d * d != dd || op.ncols() != dd {
        return Err(Error::domain("two-copy operator must be d²×d²"));
    }
    if !(2..=64).contains(&d) {
        return Err(Error::domain(format!("moment check supports 2 ≤ d ≤ 64, got {d}")));
    }
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let swap = CMat::from_fn(dd, dd, |r, c| {
        let (i, j) = (c / d, c % d);
        if r == j * d + i {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let identity = CMat::identity(dd, dd);
    let wg = weingarten_table(2, d as u64)?;
    let e = Permutation::identity(2);
    let s = Permutation::parse(2, "(12)")?;
    let v = |p: &Permutation| if *p == e { &identity } else { &swap };
    let mut prediction = CMat::zeros(dd, dd);
    for sigma in [&e, &s] {
        for tau in [&e, &s] {
            let w = wg.get_f64(&tau.compose(sigma));
            let t = trace(&(op * v(tau)));
            prediction += v(sigma) * (t * w);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = CMat::zeros(dd, dd);
    for _ in 0..samples {
        let u = sample_haar_with(d, &mut rng)?;
        let uu = u.matrix().kronecker(u.matrix());
        acc += &uu * op * uu.adjoint();
    }
    acc /= C64::new(samples as f64, 0.0);
    let scale = op.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let max_deviation = acc.iter().zip(prediction.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    Ok(MomentCheck { max_deviation, samples })
}

/// One line of the verification table.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub case: String,
    pub detail: String,
    pub passed: bool,
}

/// Grid used by [`verification_report`] for the `f_A` re-derivation.
pub const FA_GRID: [u64; 4] = [2, 3, 4, 8];

/// Dimension pairs used for the `f_B` permutation sum.
pub const FB_GRID: [(u64, u64); 7] = [(2, 2), (2, 3), (2, 4), (2, 8), (3, 3), (3, 9), (4, 4)];

/// Exact checks behind the `verify-weingarten` command.
pub fn verification_report() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for d in 2..=16u64 {
        let t = weingarten_table(2, d)?;
        let e = t.get(&Permutation::identity(2)).clone();
        let s = t.get(&Permutation::parse(2, "(12)")?).clone();
        let d2 = int(d) * int(d) - int(1);
        let ok = e == int(1) / &d2 && s == -(int(1) / (int(d) * &d2));
        rows.push(CheckRow {
            check: "wg2".into(),
            case: format!("d={d}"),
            detail: format!("Wg(e)={e}, Wg((12))={s}"),
            passed: ok,
        });
    }
    for &a in &FA_GRID {
        for &b in FA_GRID.iter().filter(|&&b| b >= a) {
            let c = verify_fa_via_weingarten(DimPair::new(a, b)?)?;
            rows.push(CheckRow {
                check: "f_A".into(),
                case: format!("({a},{b})"),
                detail: format!("weingarten={} closed={}", c.weingarten, c.closed_form),
                passed: c.passed(),
            });
        }
    }
    let mut first_ratio: Option<BigRational> = None;
    for (a, b) in FB_GRID {
        let c = verify_fb_via_em_sum(DimPair::new(a, b)?)?;
        let reference = first_ratio.get_or_insert_with(|| c.ratio.clone()).clone();
        rows.push(CheckRow {
            check: "f_B".into(),
            case: format!("({a},{b})"),
            detail: format!("sum={} closed={} ratio={}", c.sum_value, c.closed_form, c.ratio),
            passed: c.ratio == reference,
        });
    }
    Ok(rows)
}
