//! Fixed-step closed-loop simulation and the analyses run on its output.

mod integrator;
mod linearized;
mod monitor;
mod rate_fit;
mod runner;
mod scenario;

pub use integrator::rk4_step;
pub use linearized::{linearized_track_rhs, DrivingError};
pub use monitor::{
    lyapunov_monitor, stab_transform_residual, yaw_command_residual, EnergyTrace, MonitorReport, MonitorTolerances,
    Stencil,
};
pub use rate_fit::{exp_rate_fit, RateFit, UNDERFLOW_NORM};
pub use runner::{reference_generate, simulate, Detail, RefTrajectory, Sample, StabRecord, TimeSeries, TrackRecord};
pub use scenario::{
    presets, Mode, ReferenceSpec, Scenario, ScenarioKind, DEFAULT_STABILIZE_DURATION, DEFAULT_STEP,
    DEFAULT_TRACK_DURATION,
};
