use crate::model::ReducedParams;
use crate::tracking::{RefSignals, TrackGains};

/// Driving-subsystem error state `(z_e, ψ_e, r_e, ū_e)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DrivingError {
    pub ze: f64,
    pub psie: f64,
    pub re: f64,
    pub ubare: f64,
}

/// Closed-loop tracking dynamics linearized about zero error.
///
/// Used for rate estimation and small-perturbation cross-checks only.
pub fn linearized_track_rhs(
    e: &DrivingError,
    reference: &RefSignals,
    g: &TrackGains,
    rp: &ReducedParams,
) -> DrivingError {
    let sd = &reference.state;
    let gain = rp.c * reference.udot + rp.d * sd.u;
    let gain_dot = rp.c * reference.uddot + rp.d * reference.udot;
    let ze_dot = gain * e.psie - e.ubare * sd.r;
    let red = -g.k1 * e.ze * gain - g.k2 * e.psie;
    let red_dot = -g.k1 * (ze_dot * gain + e.ze * gain_dot) - g.k2 * e.re;
    let taubar1e = g.k1 * e.ze * sd.r - g.k3 * e.ubare;
    let tau2e = red_dot - e.psie - g.k4 * (e.re - red);
    DrivingError {
        ze: ze_dot,
        psie: e.re,
        re: tau2e,
        ubare: taubar1e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_reduced, ShipParams, ShipState};
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_error_is_equilibrium() {
        let rp = derive_reduced(&ShipParams::default()).unwrap();
        let reference = RefSignals::new(ShipState::new(0.0, 0.0, 0.0, 0.2, -0.32, 0.188), 0.0, 0.0, 0.0, &rp);
        let out = linearized_track_rhs(&DrivingError::default(), &reference, &TrackGains::default(), &rp);
        assert_eq!(out, DrivingError::default());
    }

    #[test]
    fn straight_line_heading_coupling() {
        let rp = derive_reduced(&ShipParams::default()).unwrap();
        let reference = RefSignals::new(ShipState::new(0.0, 0.0, 0.3, 4.0, 0.0, 0.0), 0.0, 0.0, 0.0, &rp);
        let e = DrivingError {
            psie: 1.0,
            ..Default::default()
        };
        let out = linearized_track_rhs(&e, &reference, &TrackGains::default(), &rp);
        assert_abs_diff_eq!(out.ze, 0.342_118_343_195_266_3, epsilon = 1e-14);
    }
}
