//! Experiment orchestration for the `saltflow` binary: config files, the
//! `simulate`, `verify`, `converge` and `stability` commands, and their
//! columnar outputs.

pub mod config;
pub mod converge;
pub mod output;
pub mod simulate;
pub mod stability;
pub mod verify;

pub use config::{parse_config, parse_config_str, to_manifest, Command, ConfigError, ExperimentSpec};
pub use converge::{cmd_converge, ConvergeReport};
pub use simulate::{cmd_simulate, SimulateOutput};
pub use stability::{cmd_stability, StabilityOutput};
pub use verify::{cmd_verify, VerifyOutput};
