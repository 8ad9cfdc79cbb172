//! Library side of the `casq` binary: scenario files, dispatch, sweeps and
//! output formats.

pub mod emit;
pub mod error;
pub mod run;
pub mod scenario;
pub mod sweep;

pub use error::CliError;
pub use run::{run_scenario, Report};
pub use scenario::{parse_scenario, parse_scenario_str, Scenario, ScenarioKind};
pub use sweep::{sweep, SweepRow, SweepSpec, SweepValues};
