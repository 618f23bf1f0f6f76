//! Time integration of the cut-off, mollified approximation problem.

mod config;
mod cutoff;
mod record;
mod run;
mod step;

pub use config::{InitialCondition, Scheme, SimConfig};
pub use cutoff::{chi_cutoff, CutoffParam};
pub use record::{Sample, StopReason, TrajectoryRecord, COLUMNS};
pub use run::{
    driving_path, perturb_mode, run_from, run_path, run_path_on, stability_experiment, RunOutput, StabilityReport,
};
pub use step::{step_ito_em, step_strat_heun};
