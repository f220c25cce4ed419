//! Monte Carlo studies: the two-user interference CDF and the rate sweeps
//! over unit size or transmit power.

mod output;
mod sir;
mod sweep;

pub use output::{
    emit_csv, emit_sir_csv, manifest_path, read_sweep_csv, sir_csv, sweep_csv, sweep_rows, write_json, Manifest, SweepRow,
    SIR_HEADER, SWEEP_HEADER,
};
pub use sir::{run_sir_study, SirStudy};
pub use sweep::{
    evaluate_trial, run_rate_sweep, scenario_digest, FailedTrial, Method, MethodOutcome, MethodStats, RssMode,
    SweepConfig, SweepPoint, SweepResult, SweepVariable, TrialReport, DEFAULT_POWER_GRID_DB, DEFAULT_SIDE_GRID,
    DEFAULT_TRIALS,
};
