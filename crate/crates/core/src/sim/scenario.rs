use std::f64::consts::FRAC_PI_8;

use crate::error::SimError;
use crate::model::{Ship, ShipParams, ShipState};
use crate::stabilization::StabGains;
use crate::tracking::{PeSettings, TrackGains};

pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_STABILIZE_DURATION: f64 = 300.0;
pub const DEFAULT_TRACK_DURATION: f64 = 150.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Stabilize,
    Track,
    Reference,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Stabilize => "stabilize",
            Mode::Track => "track",
            Mode::Reference => "reference",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "stabilize" => Some(Mode::Stabilize),
            "track" => Some(Mode::Track),
            "reference" => Some(Mode::Reference),
            _ => None,
        }
    }

    pub fn default_duration(self) -> f64 {
        match self {
            Mode::Stabilize => DEFAULT_STABILIZE_DURATION,
            Mode::Track | Mode::Reference => DEFAULT_TRACK_DURATION,
        }
    }
}

/// Reference ship initial state and its constant reduced inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSpec {
    pub init: ShipState,
    pub tau1d: f64,
    pub tau2d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    Stabilize {
        gains: StabGains,
        init: ShipState,
    },
    Track {
        gains: TrackGains,
        init: ShipState,
        reference: ReferenceSpec,
        pe: PeSettings,
    },
    Reference {
        reference: ReferenceSpec,
        pe: PeSettings,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ShipParams,
    pub kind: ScenarioKind,
    /// Integration step, seconds.
    pub step: f64,
    /// Horizon, seconds.
    pub duration: f64,
}

impl Scenario {
    pub fn mode(&self) -> Mode {
        match self.kind {
            ScenarioKind::Stabilize { .. } => Mode::Stabilize,
            ScenarioKind::Track { .. } => Mode::Track,
            ScenarioKind::Reference { .. } => Mode::Reference,
        }
    }

    /// Number of integration steps covering the horizon.
    pub fn steps(&self) -> usize {
        (self.duration / self.step).round() as usize
    }

    pub fn validate(&self) -> Result<Ship, SimError> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(SimError::InvalidScenario(format!("step must be positive, got {}", self.step)));
        }
        if !(self.duration.is_finite() && self.duration >= self.step) {
            return Err(SimError::InvalidScenario(format!(
                "duration {} must be at least one step ({})",
                self.duration, self.step
            )));
        }
        let ship = Ship::new(self.params)?;
        let finite = |s: &ShipState, what: &str| {
            if s.is_finite() {
                Ok(())
            } else {
                Err(SimError::InvalidScenario(format!("{what} is not finite")))
            }
        };
        match &self.kind {
            ScenarioKind::Stabilize { gains, init } => {
                gains.validate()?;
                finite(init, "initial state")?;
            }
            ScenarioKind::Track {
                gains, init, reference, ..
            } => {
                gains.validate()?;
                finite(init, "initial state")?;
                finite(&reference.init, "reference initial state")?;
            }
            ScenarioKind::Reference { reference, .. } => {
                finite(&reference.init, "reference initial state")?;
            }
        }
        Ok(ship)
    }
}

/// The bundled demonstration scenarios.
pub mod presets {
    use super::*;

    fn stabilize(init: ShipState) -> Scenario {
        Scenario {
            params: ShipParams::default(),
            kind: ScenarioKind::Stabilize {
                gains: StabGains::default(),
                init,
            },
            step: DEFAULT_STEP,
            duration: DEFAULT_STABILIZE_DURATION,
        }
    }

    fn track(init: ShipState, reference: ShipState) -> Scenario {
        Scenario {
            params: ShipParams::default(),
            kind: ScenarioKind::Track {
                gains: TrackGains::default(),
                init,
                reference: ReferenceSpec {
                    init: reference,
                    tau1d: 0.0,
                    tau2d: 0.0,
                },
                pe: PeSettings::default(),
            },
            step: DEFAULT_STEP,
            duration: DEFAULT_TRACK_DURATION,
        }
    }

    /// Park at the origin from `(−2, 2)` with zero heading and velocity.
    pub fn stabilize_offset() -> Scenario {
        stabilize(ShipState::new(-2.0, 2.0, 0.0, 0.0, 0.0, 0.0))
    }

    /// Park at the origin from a purely lateral offset `(0, 2)`.
    pub fn stabilize_lateral() -> Scenario {
        stabilize(ShipState::new(0.0, 2.0, 0.0, 0.0, 0.0, 0.0))
    }

    /// Straight-line reference at 4 m/s heading π/8; ship starts at rest at `(0, 40)`.
    pub fn track_straight_line() -> Scenario {
        track(
            ShipState::new(0.0, 40.0, 0.0, 0.0, 0.0, 0.0),
            ShipState::new(0.0, 0.0, FRAC_PI_8, 4.0, 0.0, 0.0),
        )
    }

    /// Steady turning reference; ship starts at rest at the origin.
    pub fn track_circle() -> Scenario {
        track(
            ShipState::default(),
            ShipState::new(-2.0, 1.0, 0.0, 0.2, -0.32, 0.188),
        )
    }

    /// Sway velocity at which `u_d`, `v_d`, `r_d` stay constant under zero
    /// reference inputs: `v_d = −(b + c·u_d)·r_d / d`.
    pub fn circle_equilibrium_sway(ship: &Ship, ud: f64, rd: f64) -> f64 {
        let rp = ship.reduced();
        -(rp.b + rp.c * ud) * rd / rp.d
    }
}
