//! Configuration-driven front end for the `dualfem` solvers.
//!
//! A run reads a JSON [`RunConfig`], validates it, solves, and writes CSV
//! tables plus a versioned `summary.json`. Every reference experiment is
//! available as a named preset.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{ProblemConfig, RunConfig};
pub use error::{CliError, CliResult, ErrorClass};
pub use presets::{find_preset, list_presets, Preset};
pub use run::{run, RunDetail, RunOutput, RunSummary};
