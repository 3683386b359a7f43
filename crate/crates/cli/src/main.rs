//! `qfilock`: figure pipelines, verification suites and one-shot QFI queries.

use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use qfilock_core::experiments::{
    mean_ratio_by_k, read_config, run_logged, write_rows, write_rows_to, Protocol, RunConfig, TimingLog,
};
use qfilock_core::haar_theory::{analytic_ratio, moment2_mc_check, verification_report, AnalyticRatio};
use qfilock_core::qfi::{qfi_reduced, Axis, Generator, QfiOptions};
use qfilock_core::scramblers::{oat_state, ScramblerKind, ScramblerSpec};
use qfilock_core::statevec::{Bipartition, PureState};
use qfilock_core::{Error, Result};

/// Directory that relative output paths are resolved against.
const OUT_DIR_ENV: &str = "QFILOCK_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "qfilock", version, about = "Quantum Fisher information under scrambling and qubit loss")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON). Pipelines fall back to built-in desk-scale presets.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output CSV path, `-` for stdout. Relative paths honour $QFILOCK_OUT_DIR.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "INT")]
    threads: Option<usize>,

    /// Dotted-path config override, e.g. `scrambler.time_t=20`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// More output on stderr; twice for per-task timings.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Haar scrambling of |0…0⟩ followed by loss of K qubits.
    Fig1,
    /// Mid-cut entropy of a scrambled GHZ state over depth or time.
    Fig2Entropy {
        /// Use the disordered XX chain preset instead of the brickwork circuit.
        #[arg(long)]
        analog: bool,
    },
    /// Reduced QFI of a scrambled GHZ state over (L, K) or (t, K).
    Fig2Phase {
        /// Use the disordered XX chain preset instead of the brickwork circuit.
        #[arg(long)]
        analog: bool,
    },
    /// One-axis-twisted probes with and without analog scrambling.
    Fig3,
    /// Exact Weingarten checks of the Haar-averaged formulas.
    VerifyWeingarten,
    /// One-shot reduced QFI; prints a single number.
    Qfi(QfiArgs),
    /// Monte-Carlo Haar averages against the analytic curve.
    HaarMc(HaarMcArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StateKind {
    Ghz,
    Zero,
    Plus,
    Oat,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AxisArg {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScramblerArg {
    None,
    Haar,
    Brickwork,
    XxChain,
}

#[derive(Args, Debug)]
struct QfiArgs {
    #[arg(long, value_enum, default_value = "ghz")]
    state: StateKind,
    #[arg(long, short = 'n', default_value_t = 4)]
    n_qubits: usize,
    #[arg(long, value_enum, default_value = "z")]
    axis: AxisArg,
    #[arg(long, value_enum, default_value = "none")]
    scrambler: ScramblerArg,
    /// Brickwork depth.
    #[arg(long, default_value_t = 0)]
    depth: usize,
    /// XX-chain evolution time.
    #[arg(long, default_value_t = 0.0)]
    time: f64,
    /// Number of traced (lost) qubits, taken from the highest indices.
    #[arg(short = 'k', long = "lost", default_value_t = 0)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    theta0: f64,
    /// Twisting time for `--state oat`.
    #[arg(long, default_value_t = FRAC_PI_4)]
    tau: f64,
}

#[derive(Args, Debug)]
struct HaarMcArgs {
    #[arg(long, short = 'n', default_value_t = 8)]
    n_qubits: usize,
    #[arg(long, default_value_t = 10)]
    samples: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Config { key: "--threads".into(), message: "must be ≥ 1".into() });
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config { key: "--threads".into(), message: e.to_string() })?;
    }
    match &cli.command {
        Command::Fig1 => pipeline(cli, &[Protocol::Fig1Haar]),
        Command::Fig2Entropy { analog } => {
            let cfg = load_config(cli, &[Protocol::Fig2Entropy], || {
                let mut c = RunConfig::preset(Protocol::Fig2Entropy);
                if *analog {
                    c.scrambler.kind = ScramblerKind::XxChain;
                    c.l_grid.clear();
                    c.t_grid = vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0];
                    c.realizations = 8;
                }
                c
            })?;
            execute(cli, cfg)
        }
        Command::Fig2Phase { analog } => {
            let preferred = if *analog { Protocol::Fig2PhaseAnalog } else { Protocol::Fig2PhaseDigital };
            let cfg = load_config(cli, &[Protocol::Fig2PhaseDigital, Protocol::Fig2PhaseAnalog], || {
                RunConfig::preset(preferred)
            })?;
            if *analog && cfg.protocol != Protocol::Fig2PhaseAnalog {
                return Err(Error::Config {
                    key: "protocol".into(),
                    message: "--analog needs fig2_phase_analog".into(),
                });
            }
            execute(cli, cfg)
        }
        Command::Fig3 => pipeline(cli, &[Protocol::Fig3Oat]),
        Command::VerifyWeingarten => verify_weingarten(),
        Command::Qfi(args) => one_shot_qfi(cli, args),
        Command::HaarMc(args) => haar_mc(cli, args),
    }
}

fn pipeline(cli: &Cli, allowed: &[Protocol]) -> Result<ExitCode> {
    let cfg = load_config(cli, allowed, || RunConfig::preset(allowed[0]))?;
    execute(cli, cfg)
}

/// Reads the config file (or the preset), checks it belongs to this
/// subcommand, then applies `--seed` and `--set` overrides.
fn load_config(cli: &Cli, allowed: &[Protocol], preset: impl FnOnce() -> RunConfig) -> Result<RunConfig> {
    let base = match &cli.config {
        Some(path) => read_config(path)?,
        None => preset(),
    };
    if !allowed.contains(&base.protocol) {
        return Err(Error::Config {
            key: "protocol".into(),
            message: format!("`{}` cannot be run by this subcommand", base.protocol),
        });
    }
    let mut overrides: Vec<String> = Vec::new();
    if let Some(seed) = cli.seed {
        overrides.push(format!("master_seed={seed}"));
    }
    overrides.extend(cli.overrides.iter().cloned());
    let cfg = base.with_overrides(overrides.iter().map(String::as_str))?;
    if !allowed.contains(&cfg.protocol) {
        return Err(Error::Config {
            key: "protocol".into(),
            message: "overridden to another subcommand's protocol".into(),
        });
    }
    Ok(cfg)
}

fn output_target(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    let path = cli
        .out
        .clone()
        .or_else(|| cfg.output_path.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.protocol)));
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && path != Path::new("-") => PathBuf::from(dir).join(path),
        _ => path,
    }
}

fn execute(cli: &Cli, cfg: RunConfig) -> Result<ExitCode> {
    let target = output_target(cli, &cfg);
    if cli.verbose >= 1 {
        eprintln!("{}", cfg.to_json());
    }
    let log = (cli.verbose >= 2).then(TimingLog::new);
    let start = Instant::now();
    let rows = run_logged(&cfg, log.as_ref())?;
    if let Some(log) = log {
        for t in log.into_sorted() {
            eprintln!("{:>10.3}s  {}", t.seconds, t.task);
        }
    }
    if target == Path::new("-") {
        write_rows_to(&rows, std::io::stdout().lock())?;
    } else {
        write_rows(&rows, &target)?;
    }
    if cli.verbose >= 1 {
        eprintln!("{} rows in {:.2}s -> {}", rows.len(), start.elapsed().as_secs_f64(), target.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_weingarten() -> Result<ExitCode> {
    let rows = verification_report()?;
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for row in &rows {
        let status = if row.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!row.passed);
        let _ = writeln!(out, "{status}  {:<4} {:<8} {}", row.check, row.case, row.detail);
    }
    let _ = writeln!(out, "{} checks, {failed} failed", rows.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Shortest decimal rendering that round-trips at ten significant digits.
fn format_value(v: f64) -> String {
    let s = format!("{:.10}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn one_shot_qfi(cli: &Cli, args: &QfiArgs) -> Result<ExitCode> {
    let n = args.n_qubits;
    let seed = cli.seed.unwrap_or(0);
    let state = match args.state {
        StateKind::Ghz => PureState::ghz(n)?,
        StateKind::Zero => PureState::basis_state(n, 0)?,
        StateKind::Plus => PureState::plus_state(n)?,
        StateKind::Oat => oat_state(n, args.tau)?,
        StateKind::Random => {
            use rand::SeedableRng;
            PureState::random(n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))?
        }
    };
    let axis = match args.axis {
        AxisArg::X => Axis::X,
        AxisArg::Y => Axis::Y,
        AxisArg::Z => Axis::Z,
    };
    let kind = match args.scrambler {
        ScramblerArg::None => ScramblerKind::None,
        ScramblerArg::Haar => ScramblerKind::Haar,
        ScramblerArg::Brickwork => ScramblerKind::Brickwork,
        ScramblerArg::XxChain => ScramblerKind::XxChain,
    };
    let spec = ScramblerSpec { kind, depth_l: args.depth, time_t: args.time, seed, n_qubits: n };
    let scrambler = spec.build()?;
    let part = Bipartition::trace_highest(n, args.k)?;
    let q = qfi_reduced(&state, &Generator::new(axis, n), &scrambler, &part, args.theta0, &QfiOptions::default())?;
    println!("{}", format_value(q.value));
    if cli.verbose >= 1 {
        eprintln!("rank_used={} pairs_skipped={}", q.rank_used, q.pairs_skipped);
    }
    Ok(ExitCode::SUCCESS)
}

fn haar_mc(cli: &Cli, args: &HaarMcArgs) -> Result<ExitCode> {
    let n = args.n_qubits;
    let mut cfg = RunConfig::preset(Protocol::Fig1Haar);
    cfg.n_qubits = n;
    cfg.scrambler.n_qubits = n;
    cfg.k_list = (0..=n).collect();
    cfg.samples = args.samples;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    let cfg = cfg.with_overrides(cli.overrides.iter().map(String::as_str))?;
    let rows = run_logged(&cfg, None)?;
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    let _ = writeln!(out, "        K      mean  analytic      |gap|    tol");
    for (k, mean) in mean_ratio_by_k(&rows, "fig1_haar") {
        let line = match analytic_ratio(n as u32, k as u32)? {
            AnalyticRatio::Larger(v) | AnalyticRatio::Smaller(v) => {
                let tol = if (n as i64 - 2 * k as i64).abs() >= 4 { 0.05 } else { 0.15 };
                let gap = (mean - v).abs();
                let ok = gap <= tol;
                failed += usize::from(!ok);
                format!("{}  {k:>3}  {mean:>8.4}  {v:>8.4}  {gap:>9.4}  {tol:>5}", if ok { "PASS" } else { "FAIL" })
            }
            AnalyticRatio::HalfCut { f_a, f_b } => {
                format!("INFO  {k:>3}  {mean:>8.4}  f_A {f_a:.4} / f_B {f_b:.4} (half cut, not toleranced)")
            }
        };
        let _ = writeln!(out, "{line}");
    }
    for (d, samples, bound) in [(2usize, 20_000usize, 0.05), (4, 5_000, 5.0 / (5_000f64).sqrt())] {
        let c = moment2_mc_check(d, samples, cfg.master_seed)?;
        let ok = c.max_deviation < bound;
        failed += usize::from(!ok);
        let status = if ok { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{status}  moment d={d} samples={samples}: deviation {:.4} (bound {bound:.4})",
            c.max_deviation
        );
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
