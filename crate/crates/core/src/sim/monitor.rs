//! Lyapunov and cascade monitors evaluated along recorded runs.
//!
//! For each Lyapunov function the monitor compares the central difference
//! of its recorded values against the closed-loop derivative predicted
//! from the sampled state, and checks the cascade bound
//! `L̇ ≤ −c·L + g(t)·√L` of the driven subsystem pointwise.

use crate::error::AnalysisError;
use crate::model::ReducedParams;
use crate::stabilization::{
    cascade_decay, cascade_energy_rate, cascade_gain_bound, driving_energy_rate, StabGains,
};
use crate::tracking::{tracking_cascade_energy_rate, tracking_energy_rate, TrackGains};

use super::runner::TimeSeries;
use super::scenario::{Mode, ScenarioKind};

/// Pass/fail thresholds applied by [`lyapunov_monitor`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorTolerances {
    /// Largest accepted `|ΔL/Δt − L̇|` for the driving-subsystem function.
    pub residual: f64,
    /// Largest accepted one-step increase of a non-increasing function.
    pub increase: f64,
}

impl Default for MonitorTolerances {
    fn default() -> Self {
        Self {
            residual: 1e-4,
            increase: 1e-8,
        }
    }
}

/// Values of one Lyapunov function and its derivative checks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyTrace {
    pub values: Vec<f64>,
    /// Closed-loop derivative predicted from the state at each sample.
    pub predicted_rate: Vec<f64>,
    /// Central differences at interior samples `1..n−1`.
    pub numeric_rate: Vec<f64>,
    /// `|numeric − predicted|` at interior samples.
    pub residual: Vec<f64>,
    pub max_residual: f64,
    /// Largest `L[i+1] − L[i]`.
    pub max_increase: f64,
}

impl EnergyTrace {
    fn new(values: Vec<f64>, predicted_rate: Vec<f64>, h: f64) -> Self {
        let numeric_rate: Vec<f64> = values.windows(3).map(|w| (w[2] - w[0]) / (2.0 * h)).collect();
        let residual: Vec<f64> = numeric_rate
            .iter()
            .zip(predicted_rate.iter().skip(1))
            .map(|(n, p)| (n - p).abs())
            .collect();
        let max_residual = residual.iter().copied().fold(0.0, f64::max);
        let max_increase = values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        Self {
            values,
            predicted_rate,
            numeric_rate,
            residual,
            max_residual,
            max_increase: if max_increase.is_finite() { max_increase } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    pub mode: Mode,
    /// `0.5(k₁z² + ū²)` when stabilizing, `0.5(k₁z_e² + ψ_e² + (r_e − r_ed)² + ū_e²)` when tracking.
    pub driving: EnergyTrace,
    /// `0.5(d²x̄² + v̄²)` or `0.5(d²x_e² + v̄_e²)`.
    pub cascade: EnergyTrace,
    /// Decay coefficient `c₁` (stabilizing) or `c₃` (tracking).
    pub decay: f64,
    /// Perturbation terms `(D₁, D₂)` or `(D₃, D₄)` per sample.
    pub perturbations: Vec<(f64, f64)>,
    /// Published perturbation gain `c₂(t)` or `c₄(t)`.
    pub gain_published: Vec<f64>,
    /// Perturbation gain for which the cascade bound provably holds.
    pub gain_bound: Vec<f64>,
    /// Samples where `L̇ > −c·L + gain_bound·√L`.
    pub bound_violations: usize,
    /// Samples where `L̇ > −c·L + gain_published·√L`.
    pub published_bound_violations: usize,
    /// Human-readable descriptions of failed checks; empty when all pass.
    pub flags: Vec<String>,
}

impl MonitorReport {
    pub fn passed(&self) -> bool {
        self.flags.is_empty()
    }
}

fn bound_violated(rate: f64, energy: f64, decay: f64, gain: f64) -> bool {
    let bound = -decay * energy + gain * energy.sqrt();
    rate > bound + 1e-12 * (1.0 + bound.abs())
}

struct Channels {
    driving: Vec<f64>,
    driving_rate: Vec<f64>,
    cascade: Vec<f64>,
    cascade_rate: Vec<f64>,
    perturbations: Vec<(f64, f64)>,
    gain_published: Vec<f64>,
}

fn stab_channels(ts: &TimeSeries, g: &StabGains, rp: &ReducedParams) -> Channels {
    let recs = ts.stab_records();
    Channels {
        driving: recs.iter().map(|r| r.l2).collect(),
        driving_rate: recs.iter().map(|r| driving_energy_rate(&r.coords, g)).collect(),
        cascade: recs.iter().map(|r| r.l1).collect(),
        cascade_rate: recs
            .iter()
            .map(|r| cascade_energy_rate(&r.coords, r.d1, r.d2, rp))
            .collect(),
        perturbations: recs.iter().map(|r| (r.d1, r.d2)).collect(),
        gain_published: recs.iter().map(|r| r.c2).collect(),
    }
}

fn track_channels(ts: &TimeSeries, g: &TrackGains, rp: &ReducedParams) -> Channels {
    let recs = ts.track_records();
    Channels {
        driving: recs.iter().map(|r| r.l3).collect(),
        driving_rate: recs
            .iter()
            .map(|r| tracking_energy_rate(&r.law.coords, r.law.red, g))
            .collect(),
        cascade: recs.iter().map(|r| r.l2_cascade).collect(),
        cascade_rate: recs
            .iter()
            .map(|r| tracking_cascade_energy_rate(&r.law.coords, r.d3, r.d4, rp))
            .collect(),
        perturbations: recs.iter().map(|r| (r.d3, r.d4)).collect(),
        gain_published: recs.iter().map(|r| r.c4).collect(),
    }
}

/// Evaluates the Lyapunov checks of a stabilization or tracking run.
pub fn lyapunov_monitor(
    ts: &TimeSeries,
    expected: Mode,
    tol: &MonitorTolerances,
) -> Result<MonitorReport, AnalysisError> {
    if ts.mode() != expected || expected == Mode::Reference {
        return Err(AnalysisError::ModeMismatch {
            expected: expected.name(),
            found: ts.mode().name(),
        });
    }
    let rp = crate::model::derive_reduced(&ts.scenario.params).map_err(|_| AnalysisError::EmptyWindow)?;
    let ch = match &ts.scenario.kind {
        ScenarioKind::Stabilize { gains, .. } => stab_channels(ts, gains, &rp),
        ScenarioKind::Track { gains, .. } => track_channels(ts, gains, &rp),
        ScenarioKind::Reference { .. } => unreachable!("rejected above"),
    };
    let h = ts.step();
    let decay = cascade_decay(&rp);
    let gain_bound: Vec<f64> = ch
        .perturbations
        .iter()
        .map(|&(p1, p2)| cascade_gain_bound(p1, p2, &rp))
        .collect();

    let count = |gains: &[f64]| {
        ch.cascade
            .iter()
            .zip(&ch.cascade_rate)
            .zip(gains)
            .filter(|((&l, &rate), &g)| bound_violated(rate, l, decay, g))
            .count()
    };
    let bound_violations = count(&gain_bound);
    let published_bound_violations = count(&ch.gain_published);

    let driving = EnergyTrace::new(ch.driving, ch.driving_rate, h);
    let cascade = EnergyTrace::new(ch.cascade, ch.cascade_rate, h);

    let mut flags = Vec::new();
    if driving.max_residual > tol.residual {
        flags.push(format!(
            "driving Lyapunov derivative residual {:.3e} exceeds {:.1e}",
            driving.max_residual, tol.residual
        ));
    }
    if driving.max_increase > tol.increase {
        flags.push(format!(
            "driving Lyapunov function increased by {:.3e} in one step (limit {:.1e})",
            driving.max_increase, tol.increase
        ));
    }
    if bound_violations > 0 {
        flags.push(format!("cascade bound violated at {bound_violations} samples"));
    }

    Ok(MonitorReport {
        mode: expected,
        driving,
        cascade,
        decay,
        perturbations: ch.perturbations,
        gain_published: ch.gain_published,
        gain_bound,
        bound_violations,
        published_bound_violations,
        flags,
    })
}

/// Finite-difference stencil used to differentiate recorded samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// `(y[i+1] − y[i−1]) / 2h`, second order.
    Central3,
    /// `(y[i−2] − 8y[i−1] + 8y[i+1] − y[i+2]) / 12h`, fourth order.
    Central5,
}

impl Stencil {
    fn apply(self, y: &[f64], i: usize, h: f64) -> Option<f64> {
        match self {
            Stencil::Central3 if i >= 1 && i + 1 < y.len() => Some((y[i + 1] - y[i - 1]) / (2.0 * h)),
            Stencil::Central5 if i >= 2 && i + 2 < y.len() => {
                Some((y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h))
            }
            _ => None,
        }
    }
}

/// Largest gap between differentiated stabilizing coordinates and the
/// closed-loop rates predicted by the transformed dynamics.
pub fn stab_transform_residual(ts: &TimeSeries, stencil: Stencil) -> Result<f64, AnalysisError> {
    let ScenarioKind::Stabilize { gains, .. } = &ts.scenario.kind else {
        return Err(AnalysisError::ModeMismatch {
            expected: Mode::Stabilize.name(),
            found: ts.mode().name(),
        });
    };
    let rp = crate::model::derive_reduced(&ts.scenario.params).map_err(|_| AnalysisError::EmptyWindow)?;
    let recs = ts.stab_records();
    let coords: Vec<[f64; 7]> = recs
        .iter()
        .map(|r| {
            let c = &r.coords;
            [c.xbar, c.ybar, c.vbar, c.z, c.psi, c.ubar, c.r]
        })
        .collect();
    let columns: Vec<Vec<f64>> = (0..7).map(|k| coords.iter().map(|c| c[k]).collect()).collect();
    let h = ts.step();
    let mut worst: Option<f64> = None;
    for (i, (rec, sample)) in recs.iter().zip(&ts.samples).enumerate() {
        let (taubar1, tau2) = crate::stabilization::stab_control(sample.t, &rec.coords, gains);
        let p = crate::stabilization::stab_coords_rhs(&rec.coords, taubar1, tau2, &rp).rate;
        let predicted = [p.xbar, p.ybar, p.vbar, p.z, p.psi, p.ubar, p.r];
        for (col, want) in columns.iter().zip(predicted) {
            if let Some(fd) = stencil.apply(col, i, h) {
                worst = Some(worst.unwrap_or(0.0).max((fd - want).abs()));
            }
        }
    }
    worst.ok_or(AnalysisError::EmptyWindow)
}

/// Central-difference check of the analytic virtual yaw-command rate.
/// Returns `(max |FD − ṙ_ed|, max |ṙ_ed|)`.
pub fn yaw_command_residual(ts: &TimeSeries) -> Result<(f64, f64), AnalysisError> {
    if ts.mode() != Mode::Track {
        return Err(AnalysisError::ModeMismatch {
            expected: Mode::Track.name(),
            found: ts.mode().name(),
        });
    }
    let recs = ts.track_records();
    let red: Vec<f64> = recs.iter().map(|r| r.law.red).collect();
    let h = ts.step();
    let mut err: Option<f64> = None;
    let mut peak = 0.0_f64;
    for (i, r) in recs.iter().enumerate() {
        peak = peak.max(r.law.red_dot.abs());
        if let Some(fd) = Stencil::Central3.apply(&red, i, h) {
            err = Some(err.unwrap_or(0.0).max((fd - r.law.red_dot).abs()));
        }
    }
    Ok((err.ok_or(AnalysisError::EmptyWindow)?, peak))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ShipState;
    use crate::sim::{presets, simulate};

    #[test]
    fn resting_ship_has_zero_energies() {
        let mut sc = presets::stabilize_offset();
        if let ScenarioKind::Stabilize { init, .. } = &mut sc.kind {
            *init = ShipState::default();
        }
        sc.duration = 5.0;
        let ts = simulate(&sc).unwrap();
        let m = lyapunov_monitor(&ts, Mode::Stabilize, &MonitorTolerances::default()).unwrap();
        assert!(m.driving.values.iter().chain(&m.cascade.values).all(|&v| v == 0.0));
        assert!(m.driving.residual.iter().chain(&m.cascade.residual).all(|&v| v == 0.0));
        assert!(m.passed());
        assert_eq!(stab_transform_residual(&ts, Stencil::Central3).unwrap(), 0.0);
    }

    #[test]
    fn mode_mismatch() {
        let mut sc = presets::track_circle();
        sc.duration = 1.0;
        let ts = simulate(&sc).unwrap();
        assert!(matches!(
            lyapunov_monitor(&ts, Mode::Stabilize, &MonitorTolerances::default()),
            Err(AnalysisError::ModeMismatch { .. })
        ));
        assert!(stab_transform_residual(&ts, Stencil::Central5).is_err());
    }

    #[test]
    fn stencils_on_a_cubic() {
        let h = 0.1;
        let y: Vec<f64> = (0..7).map(|i| (i as f64 * h).powi(3)).collect();
        // exact derivative at t = 0.3 is 0.27
        assert!((Stencil::Central3.apply(&y, 3, h).unwrap() - 0.28).abs() < 1e-12);
        assert!((Stencil::Central5.apply(&y, 3, h).unwrap() - 0.27).abs() < 1e-12);
        assert_eq!(Stencil::Central5.apply(&y, 1, h), None);
    }
}
