//! Monte-Carlo BER/BLER sweeps and the command-line front end.

mod cli;
mod config;
mod sweep;

pub use cli::cli_main;
pub use config::SweepConfig;
pub use sweep::{
    problem_instance, render_csv, run_sweep, EvalRecord, ProblemLog, SweepOutput, CSV_HEADER,
};
