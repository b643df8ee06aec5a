use crate::error::SimError;
use crate::model::{
    full_dynamics_rhs, input_from_reduced, kinematics_rhs, reduced_dynamics_rhs, ReducedInputs,
    ReducedParams, Ship, ShipState, TrueInputs,
};
use crate::stabilization::{
    cascade_energy, cascade_gain, driving_energy, stab_closed_loop, stab_coords_rhs, stab_reduced_inputs,
    to_stab_coords, StabCoords, StabGains,
};
use crate::tracking::{
    pe_check, track_control, track_error_rhs, track_law, tracking_cascade_energy, tracking_energy, PeReport,
    PeSample, PeSettings, RefSignals, TrackGains, TrackLaw,
};

use super::integrator::rk4_step;
use super::scenario::{Mode, ReferenceSpec, Scenario, ScenarioKind};

/// Stabilization quantities recorded at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabRecord {
    pub coords: StabCoords,
    /// `0.5(d²x̄² + v̄²)`
    pub l1: f64,
    /// `0.5(k₁z² + ū²)`
    pub l2: f64,
    pub d1: f64,
    pub d2: f64,
    /// Published perturbation gain `c₂(t)`.
    pub c2: f64,
}

/// Tracking quantities recorded at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackRecord {
    pub reference: RefSignals,
    pub law: TrackLaw,
    /// `0.5(d²x_e² + v̄_e²)`, the driven-subsystem function.
    pub l2_cascade: f64,
    /// `0.5(k₁z_e² + ψ_e² + (r_e − r_ed)² + ū_e²)`
    pub l3: f64,
    /// Same form as `l3` with the virtual command of the linearized loop.
    pub l4: f64,
    pub d3: f64,
    pub d4: f64,
    /// Published perturbation gain `c₄(t)`.
    pub c4: f64,
    /// Euclidean norm of the raw errors `(x_e, y_e, ψ_e, u_e, v_e, r_e)`.
    pub err_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detail {
    Stabilize(StabRecord),
    Track(TrackRecord),
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: ShipState,
    pub inputs: TrueInputs,
    pub reduced: ReducedInputs,
    pub detail: Detail,
}

/// A simulated run on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub scenario: Scenario,
    pub samples: Vec<Sample>,
    /// Excitation check of the reference (track and reference modes).
    pub pe: Option<PeReport>,
}

impl TimeSeries {
    pub fn mode(&self) -> Mode {
        self.scenario.mode()
    }

    pub fn step(&self) -> f64 {
        self.scenario.step
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn stab_records(&self) -> Vec<&StabRecord> {
        self.samples
            .iter()
            .filter_map(|s| match &s.detail {
                Detail::Stabilize(r) => Some(r),
                _ => None,
            })
            .collect()
    }

    pub fn track_records(&self) -> Vec<&TrackRecord> {
        self.samples
            .iter()
            .filter_map(|s| match &s.detail {
                Detail::Track(r) => Some(r),
                _ => None,
            })
            .collect()
    }

    /// Raw tracking-error norm per sample (track mode only).
    pub fn error_norms(&self) -> Vec<f64> {
        self.track_records().iter().map(|r| r.err_norm).collect()
    }

    /// Reference states per sample (track mode only).
    pub fn reference_states(&self) -> Vec<ShipState> {
        self.track_records().iter().map(|r| r.reference.state).collect()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

fn concat(a: [f64; 6], b: [f64; 6]) -> [f64; 12] {
    std::array::from_fn(|i| if i < 6 { a[i] } else { b[i - 6] })
}

fn split(y: &[f64; 12]) -> (ShipState, ShipState) {
    (
        ShipState::from_array(std::array::from_fn(|i| y[i])),
        ShipState::from_array(std::array::from_fn(|i| y[i + 6])),
    )
}

/// Pose and velocity rates of a ship under true actuation.
fn ship_rates(s: &ShipState, ti: &TrueInputs, ship: &Ship) -> [f64; 6] {
    let k = kinematics_rhs(s);
    let a = full_dynamics_rhs(&s.velocity(), ti, ship.params());
    [k[0], k[1], k[2], a.u, a.v, a.r]
}

/// Pose and velocity rates of the reference under reduced inputs.
fn reference_rates(s: &ShipState, tau1d: f64, tau2d: f64, rp: &ReducedParams) -> [f64; 6] {
    let k = kinematics_rhs(s);
    let a = reduced_dynamics_rhs(&s.velocity(), &ReducedInputs { tau1: tau1d, tau2: tau2d }, rp);
    [k[0], k[1], k[2], a.u, a.v, a.r]
}

fn diverged(t: f64, y: &[f64]) -> SimError {
    SimError::Diverged { t, state: y.to_vec() }
}

/// Reference trajectory sampled on the simulation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RefTrajectory {
    pub t: Vec<f64>,
    pub signals: Vec<RefSignals>,
}

impl RefTrajectory {
    pub fn pe_samples(&self) -> Vec<PeSample> {
        self.t
            .iter()
            .zip(&self.signals)
            .map(|(&t, s)| PeSample::from_signals(t, s))
            .collect()
    }
}

/// Integrates the reference ship driven by constant reduced inputs.
pub fn reference_generate(
    spec: &ReferenceSpec,
    rp: &ReducedParams,
    step: f64,
    duration: f64,
) -> Result<RefTrajectory, SimError> {
    let n = (duration / step).round() as usize;
    let mut y = spec.init.to_array();
    let mut out = RefTrajectory {
        t: Vec::with_capacity(n + 1),
        signals: Vec::with_capacity(n + 1),
    };
    for i in 0..=n {
        let t = i as f64 * step;
        out.t.push(t);
        out.signals
            .push(RefSignals::new(ShipState::from_array(y), spec.tau1d, spec.tau2d, 0.0, rp));
        if i < n {
            y = rk4_step(
                |_, y| reference_rates(&ShipState::from_array(*y), spec.tau1d, spec.tau2d, rp),
                t,
                &y,
                step,
            )?;
            if !y.iter().all(|v| v.is_finite()) {
                return Err(diverged(t + step, &y));
            }
        }
    }
    Ok(out)
}

fn stab_sample(t: f64, state: ShipState, gains: &StabGains, ship: &Ship) -> Sample {
    let rp = ship.reduced();
    let reduced = stab_reduced_inputs(t, &state, gains, rp);
    let inputs = stab_closed_loop(t, &state, gains, ship);
    let coords = to_stab_coords(&state, rp);
    let rates = stab_coords_rhs(&coords, 0.0, 0.0, rp);
    Sample {
        t,
        state,
        inputs,
        reduced,
        detail: Detail::Stabilize(StabRecord {
            coords,
            l1: cascade_energy(&coords, rp),
            l2: driving_energy(&coords, gains),
            d1: rates.d1,
            d2: rates.d2,
            c2: cascade_gain(rates.d1, rates.d2, rp),
        }),
    }
}

fn track_sample(t: f64, state: ShipState, reference: RefSignals, gains: &TrackGains, ship: &Ship) -> Sample {
    let rp = ship.reduced();
    let law = track_law(&state, &reference, gains, ship);
    let tc = law.coords;
    let rates = track_error_rhs(&tc, &reference, law.tau2e, law.taubar1e, rp);
    let sd = &reference.state;
    let red_linear = -gains.k1 * tc.ze * (rp.c * reference.udot + rp.d * sd.u) - gains.k2 * tc.psie;
    Sample {
        t,
        state,
        inputs: law.inputs,
        reduced: law.reduced,
        detail: Detail::Track(TrackRecord {
            reference,
            law,
            l2_cascade: tracking_cascade_energy(&tc, rp),
            l3: tracking_energy(&tc, law.red, gains),
            l4: tracking_energy(&tc, red_linear, gains),
            d3: rates.d3,
            d4: rates.d4,
            c4: cascade_gain(rates.d3, rates.d4, rp),
            err_norm: tc.errors().norm(),
        }),
    }
}

/// Runs the scenario with the controller evaluated inside every Runge–Kutta
/// stage.
pub fn simulate(sc: &Scenario) -> Result<TimeSeries, SimError> {
    let ship = sc.validate()?;
    let rp = *ship.reduced();
    let h = sc.step;
    let n = sc.steps();
    let mut samples = Vec::with_capacity(n + 1);
    let mut pe = None;

    match &sc.kind {
        ScenarioKind::Stabilize { gains, init } => {
            let mut y = init.to_array();
            for i in 0..=n {
                let t = i as f64 * h;
                samples.push(stab_sample(t, ShipState::from_array(y), gains, &ship));
                if i == n {
                    break;
                }
                y = rk4_step(
                    |t, y| {
                        let s = ShipState::from_array(*y);
                        ship_rates(&s, &stab_closed_loop(t, &s, gains, &ship), &ship)
                    },
                    t,
                    &y,
                    h,
                )?;
                if !y.iter().all(|v| v.is_finite()) {
                    return Err(diverged(t + h, &y));
                }
            }
        }
        ScenarioKind::Track {
            gains,
            init,
            reference,
            pe: pe_settings,
        } => {
            let ReferenceSpec { tau1d, tau2d, .. } = *reference;
            let mut y = concat(init.to_array(), reference.init.to_array());
            let mut pe_samples = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let t = i as f64 * h;
                let (s, r) = split(&y);
                let signals = RefSignals::new(r, tau1d, tau2d, 0.0, &rp);
                pe_samples.push(PeSample::from_signals(t, &signals));
                samples.push(track_sample(t, s, signals, gains, &ship));
                if i == n {
                    break;
                }
                y = rk4_step(
                    |_, y| {
                        let (s, r) = split(y);
                        let signals = RefSignals::new(r, tau1d, tau2d, 0.0, &rp);
                        let ti = track_control(&s, &signals, gains, &ship);
                        concat(ship_rates(&s, &ti, &ship), reference_rates(&r, tau1d, tau2d, &rp))
                    },
                    t,
                    &y,
                    h,
                )?;
                if !y.iter().all(|v| v.is_finite()) {
                    return Err(diverged(t + h, &y));
                }
            }
            pe = pe_check_or_none(&pe_samples, pe_settings);
        }
        ScenarioKind::Reference { reference, pe: pe_settings } => {
            let traj = reference_generate(reference, &rp, h, sc.duration)?;
            for (&t, signals) in traj.t.iter().zip(&traj.signals) {
                let reduced = ReducedInputs {
                    tau1: reference.tau1d,
                    tau2: reference.tau2d,
                };
                samples.push(Sample {
                    t,
                    state: signals.state,
                    inputs: input_from_reduced(&signals.state.velocity(), &reduced, ship.params()),
                    reduced,
                    detail: Detail::Reference,
                });
            }
            pe = pe_check_or_none(&traj.pe_samples(), pe_settings);
        }
    }

    Ok(TimeSeries {
        scenario: sc.clone(),
        samples,
        pe,
    })
}

// Runs shorter than the excitation window carry no verdict.
fn pe_check_or_none(samples: &[PeSample], settings: &PeSettings) -> Option<PeReport> {
    pe_check(samples, settings).ok()
}
