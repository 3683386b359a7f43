//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::FRAC_PI_4;
use std::time::Instant;

use num::{BigRational, One, ToPrimitive, Zero};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qfilock_core::experiments::{mean_ratio_by_k, run, Protocol, ResultRow, RunConfig};
use qfilock_core::haar_theory::{
    analytic_ratio, f_a, f_b, verify_fa_via_weingarten, verify_fb_via_em_sum, weingarten_table, AnalyticRatio, DimPair,
    Permutation, FA_GRID, FB_GRID,
};
use qfilock_core::linalg::{max_abs_diff, CMat};
use qfilock_core::qfi::{derivative_full, encode, qfi_mixed, qfi_pure, qfi_reduced, Axis, Generator, QfiOptions};
use qfilock_core::scramblers::{
    evolve_exact, evolve_krylov, oat_state, sample_haar, xx_fields, EvolveOptions, Identity,
};
use qfilock_core::statevec::{partial_trace, partial_trace_op, Bipartition, DensityDerivative, PureState, Unitary};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, pass: String, fail: String) -> Outcome {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn closed_form_identities() -> Outcome {
    for d_b in 2..=1024u64 {
        let dp = DimPair::new(1, d_b).unwrap();
        if !f_b(dp).is_one() || !f_a(dp).is_zero() {
            return Err(format!("f_B(1,{d_b}) = {}, f_A(1,{d_b}) = {}", f_b(dp), f_a(dp)));
        }
    }
    let cases = [
        ("f_A(2,2)", f_a(DimPair::new(2, 2).unwrap()), rat(2, 5)),
        ("f_A(2,4)", f_a(DimPair::new(2, 4).unwrap()), rat(4, 21)),
        ("f_B(2,2)", f_b(DimPair::new(2, 2).unwrap()), rat(1152, 1260)),
        ("f_B(2,4)", f_b(DimPair::new(2, 4).unwrap()), rat(14640, 13860)),
    ];
    for (name, got, want) in &cases {
        if got != want {
            return Err(format!("{name} = {got}, expected {want}"));
        }
    }
    Ok("f_B(1,d_B)=1 and f_A(1,d_B)=0 for d_B ≤ 1024; four reference values exact".into())
}

fn weingarten_rederivation() -> Outcome {
    let mut fa_cases = 0;
    for &a in &FA_GRID {
        for &b in FA_GRID.iter().filter(|&&b| b >= a) {
            let c = verify_fa_via_weingarten(DimPair::new(a, b).unwrap()).map_err(|e| e.to_string())?;
            if !c.passed() {
                return Err(format!("f_A mismatch at ({a},{b}): {} vs {}", c.weingarten, c.closed_form));
            }
            fa_cases += 1;
        }
    }
    let ratios: Vec<f64> = FB_GRID
        .iter()
        .map(|&(a, b)| verify_fb_via_em_sum(DimPair::new(a, b).unwrap()).map(|c| c.ratio.to_f64().unwrap()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let c0 = ratios[0];
    let spread = ratios.iter().map(|r| (r - c0).abs() / c0.abs()).fold(0.0, f64::max);
    if spread >= 1e-12 {
        return Err(format!("f_B sum ratios vary: {ratios:?}"));
    }
    let e = Permutation::identity(2);
    let swap = Permutation::parse(2, "(12)").unwrap();
    for d in 2..=16i64 {
        let t = weingarten_table(2, d as u64).map_err(|e| e.to_string())?;
        if *t.get(&e) != rat(1, d * d - 1) || *t.get(&swap) != rat(-1, d * (d * d - 1)) {
            return Err(format!("Wg(2,{d}) = ({}, {})", t.get(&e), t.get(&swap)));
        }
    }
    Ok(format!(
        "f_A exact on {fa_cases} pairs; f_B sum/closed-form = {c0} on {} pairs (spread {spread:.1e}); Wg(2,d) for d ≤ 16",
        ratios.len()
    ))
}

fn haar_monte_carlo() -> Outcome {
    let mut cfg = RunConfig::preset(Protocol::Fig1Haar);
    cfg.n_qubits = 10;
    cfg.scrambler.n_qubits = 10;
    cfg.samples = 10;
    cfg.k_list = (0..=10).collect();
    let rows = run(&cfg).map_err(|e| e.to_string())?;
    let n = cfg.n_qubits as i64;
    let mut worst = Vec::new();
    let mut report = Vec::new();
    for (k, mean) in mean_ratio_by_k(&rows, "fig1_haar") {
        let reference = match analytic_ratio(n as u32, k as u32).unwrap() {
            AnalyticRatio::Larger(v) | AnalyticRatio::Smaller(v) => v,
            AnalyticRatio::HalfCut { f_a, f_b } => {
                report.push(format!("K={k}: {mean:.4} (f_A {f_a:.4}, f_B {f_b:.4}, not toleranced)"));
                continue;
            }
        };
        let tol = if (n / 2 - k as i64).abs() >= 2 { 0.05 } else { 0.15 };
        let gap = (mean - reference).abs();
        report.push(format!("K={k}: {mean:.4} vs {reference:.4}"));
        if gap > tol {
            worst.push(format!("K={k} mean {mean:.4} vs analytic {reference:.4} (gap {gap:.4} > {tol})"));
        }
    }
    let summary = report.join("; ");
    check(
        worst.is_empty(),
        format!("N=10, 10 samples: {summary}"),
        format!("{}; all points: {summary}", worst.join("; ")),
    )
}

fn ghz_limits() -> Outcome {
    let opts = QfiOptions::default();
    for n in 4..=12 {
        let g = Generator::new(Axis::Z, n);
        let ghz = PureState::ghz(n).unwrap();
        let n2 = (n * n) as f64;
        let q = qfi_pure(&ghz, &g).unwrap().value;
        if (q - n2).abs() > 1e-8 * n2 {
            return Err(format!("N={n}: qfi_pure = {q}"));
        }
        let c_full = derivative_full(&ghz, &g).unwrap();
        for lost in 0..n {
            let kept: Vec<usize> = (0..n).filter(|&q| q != lost).collect();
            let part = Bipartition::new(n, &kept).unwrap();
            // explicit matrices up to 2^9, the factored route beyond
            let value = if n <= 10 {
                let rho = partial_trace(&ghz, &part).unwrap();
                let c = partial_trace_op(c_full.matrix(), &part).unwrap();
                qfi_mixed(&rho, &DensityDerivative::new(c).unwrap(), &opts).unwrap().value
            } else {
                qfi_reduced(&ghz, &g, &Identity, &part, 0.0, &opts).unwrap().value
            };
            if value >= 1e-9 * n2 {
                return Err(format!("N={n}, lost qubit {lost}: reduced QFI {value:e}"));
            }
        }
    }
    Ok("qfi_pure = N² and single-loss QFI < 1e-9·N² for N = 4..12, every lost qubit".into())
}

fn x_ghz_fidelity(s: &PureState) -> f64 {
    let n = s.n_qubits();
    let plus = PureState::plus_state(n).unwrap();
    let minus = PureState::from_amplitudes(
        n,
        plus.amplitudes().iter().enumerate().map(|(b, a)| if b.count_ones() % 2 == 0 { *a } else { -*a }).collect(),
    )
    .unwrap();
    let phase = (minus.inner(s) / plus.inner(s)).arg();
    PureState::ghz_x(n, phase).unwrap().fidelity(s)
}

fn oat_endpoint() -> Outcome {
    let mut worst: f64 = 1.0;
    for n in (2..=12).step_by(2) {
        let s = oat_state(n, FRAC_PI_4).unwrap();
        let f = x_ghz_fidelity(&s);
        worst = worst.min(f);
        let q = qfi_pure(&s, &Generator::new(Axis::X, n)).unwrap().value;
        let n2 = (n * n) as f64;
        if f < 1.0 - 1e-9 || (q - n2).abs() > 1e-8 * n2 {
            return Err(format!("N={n}: fidelity {f}, QFI {q}"));
        }
    }
    Ok(format!("even N ≤ 12: min fidelity {worst:.12}, QFI_x = N²"))
}

fn ratio_at(rows: &[ResultRow], l: usize, k: usize) -> f64 {
    rows.iter().find(|r| r.l == Some(l) && r.k == Some(k)).and_then(|r| r.qfi_ratio).unwrap()
}

fn digital_protection() -> Outcome {
    let n = 12;
    let mut cfg = RunConfig::preset(Protocol::Fig2PhaseDigital);
    cfg.k_list = (0..=5).collect();
    cfg.l_grid = (0..=2 * n).collect();
    let rows = run(&cfg).map_err(|e| e.to_string())?;
    let fragile = ratio_at(&rows, 0, 1);
    let min_at = |l: usize| {
        (0..=5).map(|k| (ratio_at(&rows, l, k), k)).fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
    };
    let mut worst = (f64::INFINITY, 0, 0);
    for l in 8..=n {
        let (r, k) = min_at(l);
        if r < worst.0 {
            worst = (r, l, k);
        }
    }
    let onset = (0..=2 * n).find(|&l| (l..=2 * n).all(|m| min_at(m).0 >= 0.8));
    let mut ecfg = RunConfig::preset(Protocol::Fig2Entropy);
    ecfg.n_list = vec![n];
    ecfg.l_grid = vec![n];
    let erows = run(&ecfg).map_err(|e| e.to_string())?;
    let entropy = erows[0].entropy_bits.unwrap();
    let msg = format!(
        "(L=0,K=1) ratio {fragile:.2e}; min ratio over 8 ≤ L ≤ 12, K ≤ 5 = {:.4} at (L={}, K={}); \
         bound holds from L = {} on; S(L=N) = {entropy:.3} bits",
        worst.0,
        worst.1,
        worst.2,
        onset.map_or("never (L ≤ 24)".to_string(), |l| l.to_string())
    );
    check(fragile < 1e-9 && worst.0 >= 0.8 && (entropy - n as f64 / 2.0).abs() <= 1.5, msg.clone(), msg)
}

fn analog_protection() -> Outcome {
    let n = 12;
    let mut cfg = RunConfig::preset(Protocol::Fig3Oat);
    cfg.tau_grid = vec![FRAC_PI_4];
    cfg.k_list = (0..=4).collect();
    cfg.realizations = 4;
    cfg.scrambler.time_t = 20.0;
    let rows = run(&cfg).map_err(|e| e.to_string())?;
    let mean = |k: usize| {
        let v: Vec<f64> = rows
            .iter()
            .filter(|r| r.protocol == "fig3_oat_b" && r.k == Some(k) && !r.is_aggregate())
            .map(|r| r.qfi_ratio.unwrap())
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let unscrambled =
        |k: usize| rows.iter().find(|r| r.protocol == "fig3_oat_a" && r.k == Some(k)).unwrap().qfi.unwrap();
    let means: Vec<f64> = (0..=4).map(mean).collect();
    let n2 = (n * n) as f64;
    let full = unscrambled(0);
    let lost = unscrambled(1);
    let ok = means.iter().all(|&m| m >= 0.8) && (full - n2).abs() < 1e-8 * n2 && lost < 1e-6 * n2;
    let msg = format!(
        "N=12, t=20, 4 realizations, scrambled mean ratios K=0..4: {}; unscrambled QFI K=0 {full:.6}, K=1 {lost:.2e}",
        means.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>().join(", ")
    );
    check(ok, msg.clone(), msg)
}

fn naive_partial_trace(amps: &[C64], n: usize, kept: &[usize]) -> CMat {
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let local = |b: usize, qs: &[usize]| -> usize { qs.iter().enumerate().map(|(j, &q)| ((b >> q) & 1) << j).sum() };
    let dk = 1 << kept.len();
    let mut m = CMat::zeros(dk, dk);
    for a in 0..amps.len() {
        for b in 0..amps.len() {
            if local(a, &traced) == local(b, &traced) {
                m[(local(a, kept), local(b, kept))] += amps[a] * amps[b].conj();
            }
        }
    }
    m
}

fn reduced_qfi_fd(state: &PureState, g: &Generator, u: &Unitary, part: &Bipartition, h: f64) -> f64 {
    let rho_at = |th: f64| {
        let s = encode(state, g, th).unwrap().apply_dense(u).unwrap();
        partial_trace(&s, part).unwrap()
    };
    let rho = rho_at(0.0);
    let diff = (rho_at(h).matrix() - rho_at(-h).matrix()) / C64::new(2.0 * h, 0.0);
    let herm = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
    qfi_mixed(&rho, &DensityDerivative::new(herm).unwrap(), &QfiOptions::default()).unwrap().value
}

fn numerical_infrastructure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut krylov_err: f64 = 0.0;
    for n in 4..=8 {
        let fields = xx_fields(n, 100 + n as u64).unwrap();
        let psi = PureState::random(n, &mut rng).unwrap();
        let a = evolve_krylov(&psi, &fields, 5.0, &EvolveOptions::default().krylov).unwrap();
        let b = evolve_exact(&psi, &fields, 5.0).unwrap();
        krylov_err = krylov_err.max(a.0.max_abs_diff(&b));
    }

    let mut trace_err: f64 = 0.0;
    for n in 1..=5 {
        let psi = PureState::random(n, &mut rng).unwrap();
        for mask in 0..(1usize << n) {
            let kept: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
            let part = Bipartition::new(n, &kept).unwrap();
            let fast = partial_trace(&psi, &part).unwrap();
            let slow = naive_partial_trace(psi.amplitudes(), n, &kept);
            trace_err = trace_err.max(max_abs_diff(fast.matrix(), &slow));
        }
    }

    let mut fd_err: f64 = 0.0;
    for i in 0..20 {
        let psi = PureState::random(3, &mut rng).unwrap();
        let axis = [Axis::X, Axis::Y, Axis::Z][i % 3];
        let g = Generator::new(axis, 3);
        let u = sample_haar(8, 300 + i as u64).unwrap();
        let part = Bipartition::new(3, &[i % 3]).unwrap();
        let analytic = qfi_reduced(&psi, &g, &u, &part, 0.0, &QfiOptions::default()).unwrap().value;
        let fd = reduced_qfi_fd(&psi, &g, &u, &part, 1e-5);
        fd_err = fd_err.max((analytic - fd).abs() / analytic.abs().max(1e-300));
    }

    let mut violations = 0;
    for i in 0..100 {
        let n = rng.random_range(2..=6);
        let psi = PureState::random(n, &mut rng).unwrap();
        let axis = [Axis::X, Axis::Y, Axis::Z][i % 3];
        let g = Generator::new(axis, n);
        let u = sample_haar(1 << n, 500 + i as u64).unwrap();
        let kept: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        let part = Bipartition::new(n, &kept).unwrap();
        let theta: f64 = rng.random_range(-1.0..1.0);
        let reduced = qfi_reduced(&psi, &g, &u, &part, theta, &QfiOptions::default()).unwrap().value;
        let full = qfi_pure(&encode(&psi, &g, theta).unwrap(), &g).unwrap().value;
        if reduced > full + 1e-8 {
            violations += 1;
        }
    }

    let msg = format!(
        "Krylov vs exact {krylov_err:.1e}; partial trace vs naive {trace_err:.1e}; FD derivative rel {fd_err:.1e}; monotonicity violations {violations}/100"
    );
    check(krylov_err < 1e-8 && trace_err < 1e-12 && fd_err < 1e-5 && violations == 0, msg.clone(), msg)
}

fn main() {
    // `cargo test` passes harness flags such as `--list`; nothing to list here
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [Criterion; 8] = [
        ("closed-form identities", closed_form_identities),
        ("weingarten re-derivation", weingarten_rederivation),
        ("haar monte-carlo vs theory", haar_monte_carlo),
        ("fragile ghz limits", ghz_limits),
        ("oat endpoint", oat_endpoint),
        ("scrambling protection, digital", digital_protection),
        ("scrambling protection, analog", analog_protection),
        ("numerical infrastructure", numerical_infrastructure),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
