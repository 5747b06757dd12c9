//! Pseudo-spectral integration of the reformulated system and of the
//! original system used as an equivalence oracle.

mod integrator;
mod ops;
mod simulate;
mod sources;
mod state;

pub use integrator::{Integrator, Matrix11, Original, Propagator, Reformulated, System};
pub use simulate::{
    run_oracle, self_convergence, simulate, simulate_from, vanishing_viscosity_experiment,
    ConvergenceReport, MonitorRow, Recorder, RunSummary, SimConfig, Snapshot, Trajectory,
    ViscosityRow,
};
pub use sources::{compute_sources, source_means, SourceTerms};
pub use state::{
    equivalence_defect, read_state, single_mode, write_state, FieldState, InitSpec, Modes,
    OriginalState, NCOMP,
};
