//! Experiment runner: shot sampling and exact branch averaging of the games,
//! bootstrap error bars, β sweeps with CSV and SVG output, and the check that
//! the circuit and Ising routes agree.

mod config;
mod play;
mod plot;
mod stats;
mod sweep;

pub use config::{
    default_beta_grid, linspace, parse_beta_values, Estimator, ExperimentConfig, GameKind,
    DEFAULT_DISORDER_SAMPLES, DEFAULT_RESAMPLES, DEFAULT_SHOTS,
};
pub use play::{
    build_resource, estimate_pq_exact, measure_teams, play_classical_shots, play_shots,
    term_expectations, term_expectations_with, ShotRecord, BRANCH_TABLE_BUDGET,
};
pub use plot::plot_rows;
pub use stats::{bootstrap_ci, Interval};
pub use sweep::{
    advantage_loss, collapse_points, collapse_spread, cross_validate, evaluate_point,
    find_crossing, point_seed, read_csv, run_sweep, write_collapse_csv, write_csv,
    CollapsePoint, CrossValidation, Crossing, ResultRow, CSV_HEADER,
};
