//! Experiment harness around `tmlod_core`: named experiments with string
//! parameters, cartesian sweeps, and CSV/JSON records.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod record;
pub mod sweep;

pub use cli::run;
pub use error::CliError;
pub use experiments::{run_point, RunContext, DEFAULT_SEED, EXPERIMENTS};
pub use record::{ExperimentRecord, Format, Params, Status};
pub use sweep::{sweep, Grid, SweepConfig};
