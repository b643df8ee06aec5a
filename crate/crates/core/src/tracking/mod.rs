//! Trajectory tracking of a reference ship generated by the same reduced
//! model.
//!
//! Position errors are expressed in the body frame of the actual ship. A
//! second change of variables `(v̄_e, z_e, ū_e)` splits the error dynamics
//! into a driven `(x_e, v̄_e)` subsystem and a driving
//! `(z_e, ψ_e, r_e, ū_e)` subsystem, stabilized through the virtual yaw-rate
//! error command `r_ed`.

mod coupling;

pub use coupling::{
    alpha_beta, alpha_beta_direct, alpha_beta_rates, alpha_beta_rates_direct, alpha_beta_rates_series,
    alpha_beta_series, cos_defect, sin_defect, SERIES_THRESHOLD,
};

use crate::error::{AnalysisError, GainError};
use crate::model::{input_from_reduced, ReducedInputs, ReducedParams, Ship, ShipState, TrueInputs};

/// Raw tracking errors; position errors rotated by the ship heading `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrackErrors {
    pub xe: f64,
    pub ye: f64,
    pub psie: f64,
    pub ue: f64,
    pub ve: f64,
    pub re: f64,
}

impl TrackErrors {
    pub fn norm(&self) -> f64 {
        [self.xe, self.ye, self.psie, self.ue, self.ve, self.re]
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

/// Raw errors together with the transformed errors `v̄_e`, `z_e`, `ū_e`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrackCoords {
    pub xe: f64,
    pub ye: f64,
    pub psie: f64,
    pub ue: f64,
    pub ve: f64,
    pub re: f64,
    pub vbare: f64,
    pub ze: f64,
    pub ubare: f64,
}

impl TrackCoords {
    pub fn errors(&self) -> TrackErrors {
        TrackErrors {
            xe: self.xe,
            ye: self.ye,
            psie: self.psie,
            ue: self.ue,
            ve: self.ve,
            re: self.re,
        }
    }

    /// Norm of the cascade state `(x_e, v̄_e, z_e, ψ_e, ū_e, r_e)`.
    pub fn cascade_norm(&self) -> f64 {
        [self.xe, self.vbare, self.ze, self.psie, self.ubare, self.re]
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

/// Reference ship state, inputs and the derivatives the tracking law needs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RefSignals {
    pub state: ShipState,
    pub tau1d: f64,
    pub tau2d: f64,
    /// `u̇_d`, equal to `τ₁d`.
    pub udot: f64,
    /// `ü_d`.
    pub uddot: f64,
    /// `ṙ_d`, equal to `τ₂d`.
    pub rdot: f64,
    /// `v̇_d = −a·τ₂d − b·r_d − c·u_d·r_d − d·v_d`.
    pub vdot: f64,
}

impl RefSignals {
    /// Signals of a reference driven by the reduced model with inputs
    /// `(τ₁d, τ₂d)` and surge jerk `ü_d`.
    pub fn new(state: ShipState, tau1d: f64, tau2d: f64, uddot: f64, rp: &ReducedParams) -> Self {
        let vdot = -rp.a * tau2d - rp.b * state.r - rp.c * state.u * state.r - rp.d * state.v;
        Self {
            state,
            tau1d,
            tau2d,
            udot: tau1d,
            uddot,
            rdot: tau2d,
            vdot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackGains {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl Default for TrackGains {
    fn default() -> Self {
        Self {
            k1: 1.0,
            k2: 0.5,
            k3: 0.5,
            k4: 1.0,
        }
    }
}

impl TrackGains {
    pub fn validate(&self) -> Result<(), GainError> {
        for (name, value) in [("k1", self.k1), ("k2", self.k2), ("k3", self.k3), ("k4", self.k4)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(GainError::NotPositive { name, value });
            }
        }
        Ok(())
    }
}

pub fn track_errors(state: &ShipState, reference: &ShipState) -> TrackErrors {
    let dx = state.x - reference.x;
    let dy = state.y - reference.y;
    let (s, c) = state.psi.sin_cos();
    TrackErrors {
        xe: dx * c + dy * s,
        ye: -dx * s + dy * c,
        psie: state.psi - reference.psi,
        ue: state.u - reference.u,
        ve: state.v - reference.v,
        re: state.r - reference.r,
    }
}

pub fn to_track_coords(e: &TrackErrors, reference: &RefSignals, rp: &ReducedParams) -> TrackCoords {
    let vbare = e.ve + rp.a * e.re + rp.b * e.psie + rp.c * reference.state.u * e.psie;
    TrackCoords {
        xe: e.xe,
        ye: e.ye,
        psie: e.psie,
        ue: e.ue,
        ve: e.ve,
        re: e.re,
        vbare,
        ze: rp.d * e.ye + vbare,
        ubare: rp.d * e.xe + rp.c * e.ue,
    }
}

/// Rates of the cascade error state and the perturbations `D₃`, `D₄`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrackRates {
    pub xe: f64,
    pub vbare: f64,
    pub ze: f64,
    pub psie: f64,
    pub re: f64,
    pub ubare: f64,
    pub d3: f64,
    pub d4: f64,
}

/// `Φ = d·β + c·u̇_d + 0.5·d·v_d·ψ_e + d·u_d`, the coefficient of `ψ_e` in `ż_e`.
fn heading_gain(tc: &TrackCoords, reference: &RefSignals, rp: &ReducedParams) -> f64 {
    let sd = &reference.state;
    let (_, beta) = alpha_beta(tc.psie, sd.u, sd.v);
    rp.d * beta + rp.c * reference.udot + 0.5 * rp.d * sd.v * tc.psie + rp.d * sd.u
}

/// Error dynamics in cascade form under inputs `(τ₂e, τ̄₁e)`.
pub fn track_error_rhs(
    tc: &TrackCoords,
    reference: &RefSignals,
    tau2e: f64,
    taubar1e: f64,
    rp: &ReducedParams,
) -> TrackRates {
    let ReducedParams { a, b, c, d, .. } = *rp;
    let sd = &reference.state;
    let r = tc.re + sd.r;
    let psie = tc.psie;
    let (alpha, _) = alpha_beta(psie, sd.u, sd.v);
    let d3 = tc.ubare / c - alpha * psie + 0.5 * sd.u * psie * psie - sd.v * psie + tc.ze * r / d;
    let d4 = d * (a * tc.re + b * psie + c * sd.u * psie) - tc.ubare * r + c * reference.udot * psie;
    TrackRates {
        xe: -d / c * tc.xe - r * tc.vbare / d + d3,
        vbare: -d * tc.vbare + d * tc.xe * r + d4,
        ze: heading_gain(tc, reference, rp) * psie - tc.ubare * r,
        psie: tc.re,
        re: tau2e,
        ubare: taubar1e,
        d3,
        d4,
    }
}

/// Virtual yaw-rate error command `r_ed` and its analytic time derivative.
pub fn virtual_yaw_command(
    tc: &TrackCoords,
    reference: &RefSignals,
    g: &TrackGains,
    rp: &ReducedParams,
) -> (f64, f64) {
    let ReducedParams { c, d, .. } = *rp;
    let sd = &reference.state;
    let psie = tc.psie;
    let phi = heading_gain(tc, reference, rp);
    let red = -g.k1 * tc.ze * phi - g.k2 * psie;

    let ze_dot = phi * psie - tc.ubare * (tc.re + sd.r);
    let (_, beta_dot) = alpha_beta_rates(psie, tc.re, sd.u, reference.udot, sd.v, reference.vdot);
    let phi_dot = d * beta_dot
        + c * reference.uddot
        + 0.5 * d * (reference.vdot * psie + sd.v * tc.re)
        + d * reference.udot;
    let red_dot = -g.k1 * (ze_dot * phi + tc.ze * phi_dot) - g.k2 * tc.re;
    (red, red_dot)
}

/// Everything the tracking law computes on the way to the actuator commands.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrackLaw {
    pub coords: TrackCoords,
    pub red: f64,
    pub red_dot: f64,
    pub taubar1e: f64,
    pub tau2e: f64,
    pub tau1e: f64,
    pub reduced: ReducedInputs,
    pub inputs: TrueInputs,
}

/// `ẋ_e = u_e − u_d(cos ψ_e − 1) − v_d sin ψ_e + r·y_e`.
pub fn xe_rate(e: &TrackErrors, reference: &ShipState, r: f64) -> f64 {
    let (s, c) = e.psie.sin_cos();
    e.ue - reference.u * (c - 1.0) - reference.v * s + r * e.ye
}

/// Driving-subsystem law in error coordinates: `(r_ed, ṙ_ed, τ̄₁e, τ₂e)`.
///
/// `τ̄₁e = k₁z_e·r − k₃ū_e` uses the actual yaw rate `r = r_e + r_d`.
pub fn driving_law(tc: &TrackCoords, reference: &RefSignals, g: &TrackGains, rp: &ReducedParams) -> (f64, f64, f64, f64) {
    let (red, red_dot) = virtual_yaw_command(tc, reference, g, rp);
    let r = tc.re + reference.state.r;
    let taubar1e = g.k1 * tc.ze * r - g.k3 * tc.ubare;
    let tau2e = red_dot - tc.psie - g.k4 * (tc.re - red);
    (red, red_dot, taubar1e, tau2e)
}

pub fn track_law(state: &ShipState, reference: &RefSignals, g: &TrackGains, ship: &Ship) -> TrackLaw {
    let rp = ship.reduced();
    let e = track_errors(state, &reference.state);
    let tc = to_track_coords(&e, reference, rp);
    let (red, red_dot, taubar1e, tau2e) = driving_law(&tc, reference, g, rp);
    let tau1e = (taubar1e - rp.d * xe_rate(&e, &reference.state, state.r)) / rp.c;
    let reduced = ReducedInputs {
        tau1: tau1e + reference.tau1d,
        tau2: tau2e + reference.tau2d,
    };
    TrackLaw {
        coords: tc,
        red,
        red_dot,
        taubar1e,
        tau2e,
        tau1e,
        reduced,
        inputs: input_from_reduced(&state.velocity(), &reduced, ship.params()),
    }
}

/// Surge force and yaw moment commanded by the tracking law.
pub fn track_control(state: &ShipState, reference: &RefSignals, g: &TrackGains, ship: &Ship) -> TrueInputs {
    track_law(state, reference, g, ship).inputs
}

/// `0.5(k₁z_e² + ψ_e² + (r_e − r_ed)² + ū_e²)`.
pub fn tracking_energy(tc: &TrackCoords, red: f64, g: &TrackGains) -> f64 {
    let w = tc.re - red;
    0.5 * (g.k1 * tc.ze * tc.ze + tc.psie * tc.psie + w * w + tc.ubare * tc.ubare)
}

/// Closed-loop derivative of [`tracking_energy`].
pub fn tracking_energy_rate(tc: &TrackCoords, red: f64, g: &TrackGains) -> f64 {
    let w = tc.re - red;
    -g.k2 * tc.psie * tc.psie - g.k3 * tc.ubare * tc.ubare - g.k4 * w * w
}

/// `0.5(d²x_e² + v̄_e²)`, the driven-subsystem function.
pub fn tracking_cascade_energy(tc: &TrackCoords, rp: &ReducedParams) -> f64 {
    0.5 * (rp.d * rp.d * tc.xe * tc.xe + tc.vbare * tc.vbare)
}

pub fn tracking_cascade_energy_rate(tc: &TrackCoords, d3: f64, d4: f64, rp: &ReducedParams) -> f64 {
    let d = rp.d;
    -d * d * d / rp.c * tc.xe * tc.xe - d * tc.vbare * tc.vbare + d * d * d3 * tc.xe + d4 * tc.vbare
}

/// Persistent-excitation test parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeSettings {
    /// Length of the tail window, seconds.
    pub window: f64,
    /// Lower bound required of `|u_d| + |r_d|` over the tail window.
    pub threshold: f64,
    /// Upper bound on the reference signals over the whole series.
    pub cap: f64,
}

impl Default for PeSettings {
    fn default() -> Self {
        Self {
            window: 10.0,
            threshold: 1e-3,
            cap: 1e6,
        }
    }
}

/// One sample of the reference signals entering the excitation condition.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PeSample {
    pub t: f64,
    pub ud: f64,
    pub udot: f64,
    pub uddot: f64,
    pub rd: f64,
    pub rdot: f64,
}

impl PeSample {
    pub fn from_signals(t: f64, r: &RefSignals) -> Self {
        Self {
            t,
            ud: r.state.u,
            udot: r.udot,
            uddot: r.uddot,
            rd: r.state.r,
            rdot: r.rdot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeReport {
    pub satisfied: bool,
    /// Infimum of `|u_d| + |r_d|` over the tail window.
    pub tail_infimum: f64,
    /// Maxima of `|u_d|`, `|u̇_d|`, `|ü_d|`, `|r_d|`, `|ṙ_d|`.
    pub maxima: [f64; 5],
    pub bounded: bool,
}

/// Checks that the reference keeps moving over the tail window and stays
/// bounded over the whole series.
pub fn pe_check(samples: &[PeSample], settings: &PeSettings) -> Result<PeReport, AnalysisError> {
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(f), Some(l)) => (f.t, l.t),
        _ => {
            return Err(AnalysisError::InsufficientData {
                span: 0.0,
                window: settings.window,
            })
        }
    };
    let span = last - first;
    // allow for accumulated rounding in the sample times
    if span < settings.window * (1.0 - 1e-9) {
        return Err(AnalysisError::InsufficientData {
            span,
            window: settings.window,
        });
    }
    let tail_start = last - settings.window;
    let tail_infimum = samples
        .iter()
        .filter(|s| s.t >= tail_start)
        .map(|s| s.ud.abs() + s.rd.abs())
        .fold(f64::INFINITY, f64::min);
    let mut maxima = [0.0_f64; 5];
    let mut finite = true;
    for s in samples {
        for (m, x) in maxima.iter_mut().zip([s.ud, s.udot, s.uddot, s.rd, s.rdot]) {
            finite &= x.is_finite();
            *m = m.max(x.abs());
        }
    }
    let bounded = finite && maxima.iter().all(|&m| m < settings.cap);
    Ok(PeReport {
        satisfied: bounded && tail_infimum >= settings.threshold,
        tail_infimum,
        maxima,
        bounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_reduced, ShipParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

    fn rp() -> ReducedParams {
        derive_reduced(&ShipParams::default()).unwrap()
    }

    fn straight_line(rp: &ReducedParams) -> RefSignals {
        RefSignals::new(ShipState::new(0.0, 0.0, FRAC_PI_8, 4.0, 0.0, 0.0), 0.0, 0.0, 0.0, rp)
    }

    #[test]
    fn errors_in_ship_frame() {
        let s = ShipState::new(1.0, 2.0, 0.3, 4.0, 0.1, 0.2);
        assert_eq!(track_errors(&s, &s), TrackErrors::default());
        let e = track_errors(
            &ShipState::new(3.0, -1.0, 0.0, 0.0, 0.0, 0.0),
            &ShipState::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.0),
        );
        assert_eq!((e.xe, e.ye), (2.0, -2.0));
        let e = track_errors(
            &ShipState::new(1.0, 0.0, FRAC_PI_2, 0.0, 0.0, 0.0),
            &ShipState::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        );
        assert_abs_diff_eq!(e.xe, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.ye, -1.0, epsilon = 1e-12);
        assert_eq!(e.psie, FRAC_PI_2);
    }

    #[test]
    fn transformed_error_examples() {
        let rp = rp();
        let reference = RefSignals::new(ShipState::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0), 0.0, 0.0, 0.0, &rp);
        assert_eq!(to_track_coords(&TrackErrors::default(), &reference, &rp), TrackCoords::default());
        let tc = to_track_coords(
            &TrackErrors {
                psie: 1.0,
                ..Default::default()
            },
            &reference,
            &rp,
        );
        assert_abs_diff_eq!(tc.vbare, 0.755_618_343_195_266_3, epsilon = 1e-14);
        let tc = to_track_coords(
            &TrackErrors {
                xe: 1.0,
                ..Default::default()
            },
            &reference,
            &rp,
        );
        assert_abs_diff_eq!(tc.ubare, rp.d, epsilon = 1e-15);
    }

    #[test]
    fn error_rhs_examples() {
        let rp = rp();
        let circle = RefSignals::new(ShipState::new(-2.0, 1.0, 0.0, 0.2, -0.32, 0.188), 0.0, 0.0, 0.0, &rp);
        assert_eq!(
            track_error_rhs(&TrackCoords::default(), &circle, 0.0, 0.0, &rp),
            TrackRates::default()
        );
        let tc = TrackCoords {
            ubare: 1.0,
            ..Default::default()
        };
        let out = track_error_rhs(&tc, &circle, 0.0, 0.0, &rp);
        assert_abs_diff_eq!(out.ze, -0.188, epsilon = 1e-15);
    }

    #[test]
    fn virtual_command_example() {
        let rp = rp();
        let reference = straight_line(&rp);
        let g = TrackGains::default();
        let (red, _) = virtual_yaw_command(&TrackCoords::default(), &reference, &g, &rp);
        assert_eq!(red, 0.0);
        let tc = TrackCoords {
            ze: 1.0,
            ..Default::default()
        };
        let (red, _) = virtual_yaw_command(&tc, &reference, &g, &rp);
        assert_abs_diff_eq!(red, -0.342_118_343_195_266_3, epsilon = 1e-14);
    }

    #[test]
    fn zero_error_gives_feedforward() {
        let ship = Ship::default();
        let rp = ship.reduced();
        let g = TrackGains::default();
        let reference = straight_line(rp);
        let law = track_law(&reference.state, &reference, &g, &ship);
        assert_eq!(law.tau1e, 0.0);
        assert_eq!(law.tau2e, 0.0);
        assert_abs_diff_eq!(law.inputs.tau_u, 3.7028, epsilon = 1e-12);
        assert_abs_diff_eq!(law.inputs.tau_r, 0.0, epsilon = 1e-9);

        let reference = RefSignals::new(ShipState::new(1.0, 2.0, 0.5, 0.7, -0.2, 0.3), 0.05, -0.02, 0.0, rp);
        let law = track_law(&reference.state, &reference, &g, &ship);
        let ff = input_from_reduced(
            &reference.state.velocity(),
            &ReducedInputs {
                tau1: 0.05,
                tau2: -0.02,
            },
            ship.params(),
        );
        assert_abs_diff_eq!(law.inputs.tau_u, ff.tau_u, epsilon = 1e-12);
        assert_abs_diff_eq!(law.inputs.tau_r, ff.tau_r, epsilon = 1e-12);
    }

    #[test]
    fn lyapunov_identity_holds_pointwise() {
        // dL₃/dt from the error dynamics equals −k₂ψ_e² − k₃ū_e² − k₄(r_e − r_ed)².
        let ship = Ship::default();
        let rp = ship.reduced();
        let g = TrackGains::default();
        let reference = RefSignals::new(ShipState::new(-2.0, 1.0, 0.0, 0.2, -0.32, 0.188), 0.01, 0.02, 0.0, rp);
        for state in [
            ShipState::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            ShipState::new(-1.5, 3.0, 0.8, 1.0, 0.2, -0.4),
            ShipState::new(-2.0, 1.0, 1e-6, 0.2, -0.32, 0.19),
        ] {
            let law = track_law(&state, &reference, &g, &ship);
            let tc = law.coords;
            let rates = track_error_rhs(&tc, &reference, law.tau2e, law.taubar1e, rp);
            let w = tc.re - law.red;
            let l3_dot = g.k1 * tc.ze * rates.ze
                + tc.psie * rates.psie
                + w * (rates.re - law.red_dot)
                + tc.ubare * rates.ubare;
            assert_abs_diff_eq!(l3_dot, tracking_energy_rate(&tc, law.red, &g), epsilon = 1e-12);
        }
    }

    #[test]
    fn pe_examples() {
        let settings = PeSettings::default();
        let grid = |f: &dyn Fn(f64) -> PeSample| (0..=10_000).map(|i| f(i as f64 * 0.01)).collect::<Vec<_>>();
        let straight = grid(&|t| PeSample {
            t,
            ud: 4.0,
            ..Default::default()
        });
        assert!(pe_check(&straight, &settings).unwrap().satisfied);
        let still = grid(&|t| PeSample {
            t,
            ..Default::default()
        });
        assert!(!pe_check(&still, &settings).unwrap().satisfied);
        let decaying = grid(&|t| PeSample {
            t,
            ud: (-t).exp(),
            udot: -(-t).exp(),
            uddot: (-t).exp(),
            ..Default::default()
        });
        let report = pe_check(&decaying, &settings).unwrap();
        assert!(!report.satisfied);
        assert!(report.tail_infimum < 1e-3);
        assert!(report.bounded);

        assert!(matches!(
            pe_check(&straight[..500], &settings),
            Err(AnalysisError::InsufficientData { .. })
        ));
        assert!(pe_check(&[], &settings).is_err());
    }

    #[test]
    fn pe_rejects_unbounded_reference() {
        let samples: Vec<_> = (0..=2000)
            .map(|i| PeSample {
                t: i as f64 * 0.01,
                ud: 1.0,
                udot: if i == 100 { 1e7 } else { 0.0 },
                ..Default::default()
            })
            .collect();
        let report = pe_check(&samples, &PeSettings::default()).unwrap();
        assert!(!report.bounded);
        assert!(!report.satisfied);
    }
}
