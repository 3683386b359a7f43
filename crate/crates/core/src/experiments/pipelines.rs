use std::f64::consts::FRAC_PI_4;
use std::sync::Mutex;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Protocol, RunConfig};
use super::rows::{ResultRow, AGG_MAX, AGG_MEAN, AGG_MIN, ANALYTIC_SAMPLE};
use super::seed::derive_seed;
use crate::error::Result;
use crate::haar_theory::{analytic_ratio, AnalyticRatio};
use crate::qfi::{encode, qfi_pure, Axis, Generator, QfiOptions, ScrambledFamily};
use crate::scramblers::{
    oat_state, sample_haar, xx_fields, Brickwork, EvolveOptions, Scrambler, ScramblerKind, XxEvolution,
};
use crate::statevec::{schmidt, Bipartition, PureState};

/// Stream tags mixed into child seeds so that different uses of the same
/// index never share randomness.
const STREAM_HAAR: u64 = 1;
const STREAM_DISORDER: u64 = 2;
const STREAM_SUBSET: u64 = 3;

/// Wall-clock time of one independent task of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskTiming {
    pub task: String,
    pub seconds: f64,
}

/// Thread-safe collector of [`TaskTiming`]s.
#[derive(Debug, Default)]
pub struct TimingLog(Mutex<Vec<TaskTiming>>);

impl TimingLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Recorded timings in task-name order.
    pub fn into_sorted(self) -> Vec<TaskTiming> {
        let mut v = self.0.into_inner().unwrap_or_else(|e| e.into_inner());
        v.sort_by(|a, b| a.task.cmp(&b.task));
        v
    }
}

fn timed<T>(log: Option<&TimingLog>, task: impl FnOnce() -> String, f: impl FnOnce() -> T) -> T {
    let Some(log) = log else { return f() };
    let start = Instant::now();
    let out = f();
    let seconds = start.elapsed().as_secs_f64();
    log.0.lock().unwrap_or_else(|e| e.into_inner()).push(TaskTiming { task: task(), seconds });
    out
}

pub fn run(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    run_logged(cfg, None)
}

/// Like [`run`], recording per-task wall-clock times into `log`.
pub fn run_logged(cfg: &RunConfig, log: Option<&TimingLog>) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    match cfg.protocol {
        Protocol::Fig1Haar => fig1(cfg, log),
        Protocol::Fig2Entropy => fig2_entropy(cfg, log),
        Protocol::Fig2PhaseDigital | Protocol::Fig2PhaseAnalog => fig2_phase(cfg, log),
        Protocol::Fig3Oat => fig3(cfg, log),
    }
}

/// Number of rows [`run`] emits for `cfg`.
pub fn expected_row_count(cfg: &RunConfig) -> usize {
    let n = cfg.n_qubits;
    let ks = cfg.k_list.len();
    let r = cfg.realizations;
    let agg = |per_point: usize| if r > 1 { per_point * (r + 3) } else { per_point };
    match cfg.protocol {
        Protocol::Fig1Haar => {
            let analytic: usize = cfg.k_list.iter().map(|&k| if 2 * (n - k) == n { 2 } else { 1 }).sum();
            cfg.samples * ks + analytic
        }
        Protocol::Fig2Entropy => {
            let sizes = cfg.sizes().len();
            match cfg.scrambler.kind {
                ScramblerKind::Brickwork => sizes * cfg.depths().len(),
                ScramblerKind::XxChain => agg(sizes * cfg.times().len()),
                _ => sizes,
            }
        }
        Protocol::Fig2PhaseDigital => cfg.depths().len() * ks,
        Protocol::Fig2PhaseAnalog => agg(cfg.times().len() * ks),
        Protocol::Fig3Oat => cfg.tau_grid.len() * ks + agg(cfg.tau_grid.len() * ks) + agg(n + 1),
    }
}

fn traced_part(cfg: &RunConfig, n: usize, k: usize, task_seed: u64) -> Result<Bipartition> {
    if !cfg.random_traced_subsets {
        return Bipartition::trace_highest(n, k);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(task_seed, &[STREAM_SUBSET, k as u64]));
    let traced = sample(&mut rng, n, k).into_vec();
    let kept: Vec<usize> = (0..n).filter(|q| !traced.contains(q)).collect();
    Bipartition::new(n, &kept)
}

fn qfi_row(
    protocol: &str,
    fam: &ScrambledFamily,
    part: &Bipartition,
    reference: f64,
    with_entropy: bool,
) -> Result<ResultRow> {
    let n = part.n_qubits();
    let q = fam.qfi(part, &QfiOptions::default())?;
    let mut row = ResultRow::new(protocol, n);
    row.k = Some(part.traced().len());
    row.qfi = Some(q.value);
    row.qfi_ratio = Some(q.value / reference);
    if with_entropy {
        let s = schmidt(&fam.state(), part)?;
        row.entropy_bits = Some(s.entropy_bits());
        row.schmidt_rank = Some(s.rank);
    }
    Ok(row)
}

/// Haar scrambling of `|0…0⟩` encoded along x, then loss of K qubits.
pub fn run_fig1(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    fig1(cfg, None)
}

fn fig1(cfg: &RunConfig, log: Option<&TimingLog>) -> Result<Vec<ResultRow>> {
    let n = cfg.n_qubits;
    let g = Generator::new(Axis::X, n);
    let input = PureState::basis_state(n, 0)?;
    let reference = qfi_pure(&encode(&input, &g, cfg.theta0)?, &g)?.value;
    let protocol = Protocol::Fig1Haar.id();

    let per_sample: Vec<Vec<ResultRow>> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            timed(
                log,
                || format!("fig1 N={n} sample {s}"),
                || {
                    let seed = derive_seed(cfg.master_seed, &[STREAM_HAAR, s as u64]);
                    let u = sample_haar(1 << n, seed)?;
                    let fam = ScrambledFamily::new(&input, &g, &u, cfg.theta0)?;
                    cfg.k_list
                        .iter()
                        .map(|&k| {
                            let part = traced_part(cfg, n, k, seed)?;
                            let mut row = qfi_row(protocol, &fam, &part, reference, true)?;
                            row.sample = Some(s as i64);
                            row.seed = Some(seed);
                            Ok(row)
                        })
                        .collect()
                },
            )
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<ResultRow> = per_sample.into_iter().flatten().collect();

    for &k in &cfg.k_list {
        let mut push = |id: &str, ratio: f64| {
            let mut row = ResultRow::new(id, n);
            row.k = Some(k);
            row.sample = Some(ANALYTIC_SAMPLE);
            row.qfi = Some(ratio * reference);
            row.qfi_ratio = Some(ratio);
            rows.push(row);
        };
        match analytic_ratio(n as u32, k as u32)? {
            AnalyticRatio::Larger(v) => push("fig1_haar_fb", v),
            AnalyticRatio::Smaller(v) => push("fig1_haar_fa", v),
            AnalyticRatio::HalfCut { f_a, f_b } => {
                push("fig1_haar_fa", f_a);
                push("fig1_haar_fb", f_b);
            }
        }
    }
    Ok(rows)
}

/// Mean, minimum and maximum over realizations of the numeric columns
/// `qfi`, `qfi_ratio`, `entropy_bits` and `schmidt_rank`.
fn aggregates(group: &[ResultRow]) -> Vec<ResultRow> {
    if group.len() < 2 {
        return Vec::new();
    }
    type Pick = fn(&ResultRow) -> Option<f64>;
    let cols: [Pick; 4] = [|r| r.qfi, |r| r.qfi_ratio, |r| r.entropy_bits, |r| r.schmidt_rank.map(|x| x as f64)];
    let stats = cols.map(|pick| {
        let vals: Option<Vec<f64>> = group.iter().map(pick).collect();
        vals.map(|v| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            [mean, min, max]
        })
    });
    [AGG_MEAN, AGG_MIN, AGG_MAX]
        .into_iter()
        .enumerate()
        .map(|(i, tag)| {
            let mut row = group[0].clone();
            row.realization = Some(tag);
            row.seed = None;
            row.qfi = stats[0].map(|s| s[i]);
            row.qfi_ratio = stats[1].map(|s| s[i]);
            row.entropy_bits = stats[2].map(|s| s[i]);
            // the mean rank is not an integer; only the extremes are kept
            row.schmidt_rank = if tag == AGG_MEAN { None } else { stats[3].map(|s| s[i] as usize) };
            row
        })
        .collect()
}

/// Per-realization rows of one grid point followed by their aggregates.
fn with_aggregates(group: Vec<ResultRow>) -> Vec<ResultRow> {
    let extra = aggregates(&group);
    group.into_iter().chain(extra).collect()
}

fn xx_scrambler(n: usize, seed: u64, t: f64) -> Result<Scrambler> {
    let fields = xx_fields(n, seed)?;
    Ok(Scrambler::XxChain(Box::new(XxEvolution::new(fields, t, EvolveOptions::default())?)))
}

fn disorder_seed(cfg: &RunConfig, n: usize, r: usize) -> u64 {
    derive_seed(cfg.master_seed, &[STREAM_DISORDER, n as u64, r as u64])
}

/// Mid-cut entropy and Schmidt rank of a scrambled GHZ state over depth or time.
pub fn run_fig2_entropy(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    fig2_entropy(cfg, None)
}

fn fig2_entropy(cfg: &RunConfig, log: Option<&TimingLog>) -> Result<Vec<ResultRow>> {
    let protocol = Protocol::Fig2Entropy.id();
    let entropy_row = |n: usize, scr: &Scrambler| -> Result<ResultRow> {
        let g = Generator::new(Axis::Z, n);
        let fam = ScrambledFamily::new(&PureState::ghz(n)?, &g, scr, cfg.theta0)?;
        let part = Bipartition::mid_cut(n)?;
        let s = schmidt(&fam.state(), &part)?;
        let mut row = ResultRow::new(protocol, n);
        row.k = Some(part.traced().len());
        row.entropy_bits = Some(s.entropy_bits());
        row.schmidt_rank = Some(s.rank);
        Ok(row)
    };

    let sizes = cfg.sizes();
    match cfg.scrambler.kind {
        ScramblerKind::Brickwork => {
            let tasks: Vec<(usize, usize)> =
                sizes.iter().flat_map(|&n| cfg.depths().into_iter().map(move |l| (n, l))).collect();
            tasks
                .into_par_iter()
                .map(|(n, l)| {
                    timed(
                        log,
                        || format!("fig2_entropy N={n} L={l}"),
                        || {
                            let mut row = entropy_row(n, &Scrambler::Brickwork(Brickwork { layers: l }))?;
                            row.l = Some(l);
                            row.realization = Some(0);
                            Ok(row)
                        },
                    )
                })
                .collect()
        }
        ScramblerKind::XxChain => {
            let tasks: Vec<(usize, f64)> =
                sizes.iter().flat_map(|&n| cfg.times().into_iter().map(move |t| (n, t))).collect();
            let groups: Vec<Vec<ResultRow>> = tasks
                .into_par_iter()
                .map(|(n, t)| {
                    (0..cfg.realizations)
                        .into_par_iter()
                        .map(|r| {
                            timed(
                                log,
                                || format!("fig2_entropy N={n} t={t} realization {r}"),
                                || {
                                    let seed = disorder_seed(cfg, n, r);
                                    let mut row = entropy_row(n, &xx_scrambler(n, seed, t)?)?;
                                    row.t = Some(t);
                                    row.realization = Some(r as i64);
                                    row.seed = Some(seed);
                                    Ok(row)
                                },
                            )
                        })
                        .collect::<Result<Vec<_>>>()
                        .map(with_aggregates)
                })
                .collect::<Result<_>>()?;
            Ok(groups.into_iter().flatten().collect())
        }
        _ => sizes.into_iter().map(|n| entropy_row(n, &Scrambler::None)).collect(),
    }
}

/// Reduced QFI of a scrambled GHZ state, normalized to the Heisenberg value,
/// over (L, K) for the circuit or (t, K) for the disordered chain.
pub fn run_fig2_phase(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    fig2_phase(cfg, None)
}

fn fig2_phase(cfg: &RunConfig, log: Option<&TimingLog>) -> Result<Vec<ResultRow>> {
    let n = cfg.n_qubits;
    let g = Generator::new(Axis::Z, n);
    let ghz = PureState::ghz(n)?;
    let reference = qfi_pure(&encode(&ghz, &g, cfg.theta0)?, &g)?.value;
    let protocol = cfg.protocol.id();
    let k_rows = |fam: &ScrambledFamily, task_seed: u64| -> Result<Vec<ResultRow>> {
        cfg.k_list
            .iter()
            .map(|&k| qfi_row(protocol, fam, &traced_part(cfg, n, k, task_seed)?, reference, true))
            .collect()
    };

    if cfg.protocol == Protocol::Fig2PhaseDigital {
        let per_depth: Vec<Vec<ResultRow>> = cfg
            .depths()
            .into_par_iter()
            .map(|l| {
                timed(
                    log,
                    || format!("{protocol} L={l}"),
                    || {
                        let fam = ScrambledFamily::new(&ghz, &g, &Brickwork { layers: l }, cfg.theta0)?;
                        let task_seed = derive_seed(cfg.master_seed, &[l as u64]);
                        let mut rows = k_rows(&fam, task_seed)?;
                        for row in &mut rows {
                            row.l = Some(l);
                            row.realization = Some(0);
                        }
                        Ok(rows)
                    },
                )
            })
            .collect::<Result<_>>()?;
        return Ok(per_depth.into_iter().flatten().collect());
    }

    // per time: realizations × K, regrouped as K × realizations for aggregation
    let per_time: Vec<Vec<ResultRow>> = cfg
        .times()
        .into_par_iter()
        .map(|t| {
            let per_r: Vec<Vec<ResultRow>> = (0..cfg.realizations)
                .into_par_iter()
                .map(|r| {
                    timed(
                        log,
                        || format!("{protocol} t={t} realization {r}"),
                        || {
                            let seed = disorder_seed(cfg, n, r);
                            let fam = ScrambledFamily::new(&ghz, &g, &xx_scrambler(n, seed, t)?, cfg.theta0)?;
                            let mut rows = k_rows(&fam, seed)?;
                            for row in &mut rows {
                                row.t = Some(t);
                                row.realization = Some(r as i64);
                                row.seed = Some(seed);
                            }
                            Ok(rows)
                        },
                    )
                })
                .collect::<Result<_>>()?;
            Ok(regroup_by_k(per_r))
        })
        .collect::<Result<_>>()?;
    Ok(per_time.into_iter().flatten().collect())
}

fn regroup_by_k(per_realization: Vec<Vec<ResultRow>>) -> Vec<ResultRow> {
    let width = per_realization.first().map_or(0, Vec::len);
    let mut columns: Vec<Vec<ResultRow>> = vec![Vec::new(); width];
    for rows in per_realization {
        for (i, row) in rows.into_iter().enumerate() {
            columns[i].push(row);
        }
    }
    columns.into_iter().flat_map(with_aggregates).collect()
}

/// One-axis-twisted probes encoded along x:
/// `fig3_oat_a` without scrambling, `fig3_oat_b` after the disordered chain
/// (both over τ × K), and `fig3_oat_c` sweeping every K at τ = π/4.
pub fn run_fig3(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    fig3(cfg, None)
}

fn fig3(cfg: &RunConfig, log: Option<&TimingLog>) -> Result<Vec<ResultRow>> {
    let n = cfg.n_qubits;
    let g = Generator::new(Axis::X, n);
    let t = cfg.scrambler.time_t;
    let reference = qfi_pure(&encode(&oat_state(n, FRAC_PI_4)?, &g, cfg.theta0)?, &g)?.value;
    let states: Vec<PureState> = cfg.tau_grid.iter().map(|&tau| oat_state(n, tau)).collect::<Result<_>>()?;
    let scramblers: Vec<(u64, Scrambler)> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| {
            timed(
                log,
                || format!("fig3 build realization {r}"),
                || {
                    let seed = disorder_seed(cfg, n, r);
                    Ok((seed, xx_scrambler(n, seed, t)?))
                },
            )
        })
        .collect::<Result<_>>()?;

    let unscrambled: Vec<Vec<ResultRow>> = states
        .par_iter()
        .zip(&cfg.tau_grid)
        .map(|(state, &tau)| {
            timed(
                log,
                || format!("fig3_oat_a tau={tau}"),
                || {
                    let fam = ScrambledFamily::new(state, &g, &Scrambler::None, cfg.theta0)?;
                    let task_seed = derive_seed(cfg.master_seed, &[tau.to_bits()]);
                    cfg.k_list
                        .iter()
                        .map(|&k| {
                            let mut row =
                                qfi_row("fig3_oat_a", &fam, &traced_part(cfg, n, k, task_seed)?, reference, false)?;
                            row.tau = Some(tau);
                            row.realization = Some(0);
                            Ok(row)
                        })
                        .collect()
                },
            )
        })
        .collect::<Result<_>>()?;

    let sweep = |id: &'static str, state: &PureState, tau: f64, ks: &[usize]| -> Result<Vec<ResultRow>> {
        let per_r: Vec<Vec<ResultRow>> = scramblers
            .par_iter()
            .enumerate()
            .map(|(r, (seed, scr))| {
                timed(
                    log,
                    || format!("{id} tau={tau} realization {r}"),
                    || {
                        let fam = ScrambledFamily::new(state, &g, scr, cfg.theta0)?;
                        ks.iter()
                            .map(|&k| {
                                let mut row = qfi_row(id, &fam, &traced_part(cfg, n, k, *seed)?, reference, false)?;
                                row.t = Some(t);
                                row.tau = Some(tau);
                                row.realization = Some(r as i64);
                                row.seed = Some(*seed);
                                Ok(row)
                            })
                            .collect()
                    },
                )
            })
            .collect::<Result<_>>()?;
        Ok(regroup_by_k(per_r))
    };

    let mut rows: Vec<ResultRow> = unscrambled.into_iter().flatten().collect();
    for (state, &tau) in states.iter().zip(&cfg.tau_grid) {
        rows.extend(sweep("fig3_oat_b", state, tau, &cfg.k_list)?);
    }
    let all_k: Vec<usize> = (0..=n).collect();
    rows.extend(sweep("fig3_oat_c", &oat_state(n, FRAC_PI_4)?, FRAC_PI_4, &all_k)?);
    Ok(rows)
}

/// Mean of `qfi_ratio` over sample rows (analytic and aggregate rows excluded)
/// for each K, in ascending K.
pub fn mean_ratio_by_k(rows: &[ResultRow], protocol: &str) -> Vec<(usize, f64)> {
    let mut acc: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for row in rows.iter().filter(|r| r.protocol == protocol && !r.is_analytic() && !r.is_aggregate()) {
        if let (Some(k), Some(v)) = (row.k, row.qfi_ratio) {
            let e = acc.entry(k).or_default();
            e.0 += v;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect()
}
