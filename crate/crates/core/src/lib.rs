//! Stabilization and trajectory-tracking control of underactuated surface
//! ships whose inertia and damping matrices couple sway and yaw.
//!
//! The crate provides the ship model and its input transformation, the two
//! feedback laws, a fixed-step closed-loop simulator with Lyapunov
//! monitors, and the `shipctl` command-line front end.

pub mod cli;
pub mod error;
pub mod model;
pub mod sim;
pub mod stabilization;
pub mod tracking;

pub use error::{AnalysisError, ConfigError, GainError, ModelError, PlotError, SimError};
pub use model::{ReducedInputs, ReducedParams, Ship, ShipParams, ShipState, TrueInputs, Velocity};
pub use sim::{simulate, Mode, Scenario, ScenarioKind, TimeSeries};
pub use stabilization::StabGains;
pub use tracking::{RefSignals, TrackGains};
