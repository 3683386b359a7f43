//! Reproducible sweeps behind the figures: configuration, seeding, pipelines
//! and CSV output.

mod config;
mod pipelines;
mod rows;
mod seed;

pub use config::{read_config, Protocol, RunConfig};
pub use pipelines::{
    expected_row_count, mean_ratio_by_k, run, run_fig1, run_fig2_entropy, run_fig2_phase, run_fig3, run_logged,
    TaskTiming, TimingLog,
};
pub use rows::{
    read_rows, write_rows, write_rows_to, ResultRow, AGG_MAX, AGG_MEAN, AGG_MIN, ANALYTIC_SAMPLE, CSV_HEADER,
};
pub use seed::{derive_seed, splitmix64};
