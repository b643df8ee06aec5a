//! Point stabilization to the origin.
//!
//! The ship is first rotated into body-aligned coordinates `(x̄, ȳ)` and
//! then mapped to `(x̄, v̄, z, ψ, ū, r)`, in which the dynamics split into a
//! driven `(x̄, v̄)` subsystem and a driving `(z, ψ, ū, r)` subsystem. The
//! smooth time-varying law acts on the driving part only.

use crate::error::GainError;
use crate::model::{input_from_reduced, ReducedInputs, ReducedParams, Ship, ShipState, TrueInputs};

/// Transformed stabilization state.
///
/// `ybar` is redundant (`z = d·ȳ + v̄`) but is carried so that the inverse
/// map needs no solve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StabCoords {
    pub xbar: f64,
    pub ybar: f64,
    pub vbar: f64,
    pub z: f64,
    pub psi: f64,
    pub ubar: f64,
    pub r: f64,
}

/// Time derivative of [`StabCoords`] together with the cascade
/// perturbation terms `D₁`, `D₂` driving the `(x̄, v̄)` subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StabRates {
    pub rate: StabCoords,
    pub d1: f64,
    pub d2: f64,
}

/// Gains of the stabilizing law and the dither `f(z) = A·tanh(s·z²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabGains {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub dither_amp: f64,
    pub dither_sharp: f64,
}

impl Default for StabGains {
    fn default() -> Self {
        Self {
            k1: 0.6,
            k2: 0.4,
            k3: 0.1,
            k4: 0.1,
            dither_amp: 10.0,
            dither_sharp: 10.0,
        }
    }
}

impl StabGains {
    pub fn validate(&self) -> Result<(), GainError> {
        for (name, value) in [
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("k4", self.k4),
            ("dither_amp", self.dither_amp),
            ("dither_sharp", self.dither_sharp),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(GainError::NotPositive { name, value });
            }
        }
        Ok(())
    }

    /// Excitation amplitude; vanishes exactly when `z = 0`.
    pub fn dither(&self, z: f64) -> f64 {
        self.dither_amp * (self.dither_sharp * z * z).tanh()
    }
}

pub fn to_stab_coords(state: &ShipState, rp: &ReducedParams) -> StabCoords {
    let (s, c) = state.psi.sin_cos();
    let xbar = state.x * c + state.y * s;
    let ybar = -state.x * s + state.y * c;
    let vbar = state.v + rp.a * state.r + rp.b * state.psi;
    StabCoords {
        xbar,
        ybar,
        vbar,
        z: rp.d * ybar + vbar,
        psi: state.psi,
        ubar: rp.c * state.u + rp.d * xbar,
        r: state.r,
    }
}

pub fn from_stab_coords(sc: &StabCoords, rp: &ReducedParams) -> ShipState {
    let (s, c) = sc.psi.sin_cos();
    ShipState {
        x: sc.xbar * c - sc.ybar * s,
        y: sc.xbar * s + sc.ybar * c,
        psi: sc.psi,
        u: (sc.ubar - rp.d * sc.xbar) / rp.c,
        v: sc.vbar - rp.a * sc.r - rp.b * sc.psi,
        r: sc.r,
    }
}

/// Dynamics of the transformed state under inputs `(τ̄₁, τ₂)`.
pub fn stab_coords_rhs(sc: &StabCoords, taubar1: f64, tau2: f64, rp: &ReducedParams) -> StabRates {
    let StabCoords {
        xbar,
        vbar,
        z,
        psi,
        ubar,
        r,
        ..
    } = *sc;
    let ReducedParams { a, b, c, d, .. } = *rp;
    let cu = ubar - d * xbar;
    let v = vbar - a * r - b * psi;
    StabRates {
        rate: StabCoords {
            xbar: cu / c + (z - vbar) * r / d,
            ybar: v - r * xbar,
            vbar: -cu * r - d * v,
            z: -ubar * r,
            psi: r,
            ubar: taubar1,
            r: tau2,
        },
        d1: ubar / c + z * r / d,
        d2: -ubar * r + d * (a * r + b * psi),
    }
}

/// Time-varying stabilizing law, returning `(τ̄₁, τ₂)`.
pub fn stab_control(t: f64, sc: &StabCoords, g: &StabGains) -> (f64, f64) {
    let taubar1 = g.k1 * sc.z * sc.r - g.k2 * sc.ubar;
    let tau2 = -g.k3 * sc.psi - g.k4 * sc.r + g.dither(sc.z) * t.cos();
    (taubar1, tau2)
}

/// Recovers `τ₁` from `τ̄₁ = c·τ₁ + d(ū − d·x̄)/c + (z − v̄)·r`.
pub fn tau1_from_taubar1(taubar1: f64, sc: &StabCoords, rp: &ReducedParams) -> f64 {
    (taubar1 - rp.d * (sc.ubar - rp.d * sc.xbar) / rp.c - (sc.z - sc.vbar) * sc.r) / rp.c
}

/// Forward definition of `τ̄₁` from `τ₁`.
pub fn taubar1_from_tau1(tau1: f64, sc: &StabCoords, rp: &ReducedParams) -> f64 {
    rp.c * tau1 + rp.d * (sc.ubar - rp.d * sc.xbar) / rp.c + (sc.z - sc.vbar) * sc.r
}

/// Reduced inputs commanded by the stabilizing law at `(t, state)`.
pub fn stab_reduced_inputs(t: f64, state: &ShipState, g: &StabGains, rp: &ReducedParams) -> ReducedInputs {
    let sc = to_stab_coords(state, rp);
    let (taubar1, tau2) = stab_control(t, &sc, g);
    ReducedInputs {
        tau1: tau1_from_taubar1(taubar1, &sc, rp),
        tau2,
    }
}

/// Surge force and yaw moment commanded by the stabilizing law.
pub fn stab_closed_loop(t: f64, state: &ShipState, g: &StabGains, ship: &Ship) -> TrueInputs {
    let ri = stab_reduced_inputs(t, state, g, ship.reduced());
    input_from_reduced(&state.velocity(), &ri, ship.params())
}

/// Lyapunov function of the driven subsystem, `0.5(d²x̄² + v̄²)`.
pub fn cascade_energy(sc: &StabCoords, rp: &ReducedParams) -> f64 {
    0.5 * (rp.d * rp.d * sc.xbar * sc.xbar + sc.vbar * sc.vbar)
}

/// Exact derivative of [`cascade_energy`] along the dynamics.
pub fn cascade_energy_rate(sc: &StabCoords, d1: f64, d2: f64, rp: &ReducedParams) -> f64 {
    let d = rp.d;
    -d * d * d / rp.c * sc.xbar * sc.xbar - d * sc.vbar * sc.vbar + d * d * d1 * sc.xbar + d2 * sc.vbar
}

/// Lyapunov function of the driving subsystem, `0.5(k₁z² + ū²)`.
pub fn driving_energy(sc: &StabCoords, g: &StabGains) -> f64 {
    0.5 * (g.k1 * sc.z * sc.z + sc.ubar * sc.ubar)
}

/// Closed-loop derivative of [`driving_energy`], `−k₂ū²`.
pub fn driving_energy_rate(sc: &StabCoords, g: &StabGains) -> f64 {
    -g.k2 * sc.ubar * sc.ubar
}

/// Decay coefficient `c₁ = 2·min(d³/c, d) / max(d², 1)` of the driven subsystem.
pub fn cascade_decay(rp: &ReducedParams) -> f64 {
    let d = rp.d;
    2.0 * (d * d * d / rp.c).min(d) / (d * d).max(1.0)
}

/// Perturbation gain `max(d²|D₁|, |D₂|) / √(0.5·max(d², 1))` in the
/// published form.
///
/// For `d < 1` this does not bound `d²D₁x̄ + D₂v̄` by a multiple of `√L₁`;
/// use [`cascade_gain_bound`] for a coefficient that does.
pub fn cascade_gain(p1: f64, p2: f64, rp: &ReducedParams) -> f64 {
    let d2 = rp.d * rp.d;
    (d2 * p1.abs()).max(p2.abs()) / (0.5 * d2.max(1.0)).sqrt()
}

/// Coefficient `2·max(d|P₁|, |P₂|)` for which
/// `d²P₁x̄ + P₂v̄ ≤ coeff·√(0.5(d²x̄² + v̄²))` holds for every `d > 0`.
pub fn cascade_gain_bound(p1: f64, p2: f64, rp: &ReducedParams) -> f64 {
    2.0 * (rp.d * p1.abs()).max(p2.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_reduced, input_to_reduced, reduced_dynamics_rhs, kinematics_rhs, ShipParams};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn rp() -> ReducedParams {
        derive_reduced(&ShipParams::default()).unwrap()
    }

    fn coords_vec(sc: &StabCoords) -> [f64; 7] {
        [sc.xbar, sc.ybar, sc.vbar, sc.z, sc.psi, sc.ubar, sc.r]
    }

    #[test]
    fn initial_coords_of_first_scenario() {
        let sc = to_stab_coords(&ShipState::new(-2.0, 2.0, 0.0, 0.0, 0.0, 0.0), &rp());
        assert_eq!(sc.xbar, -2.0);
        assert_eq!(sc.ybar, 2.0);
        assert_eq!(sc.vbar, 0.0);
        assert_abs_diff_eq!(sc.z, 0.171_059_171_597_633_1, epsilon = 1e-14);
        assert_abs_diff_eq!(sc.ubar, -0.171_059_171_597_633_1, epsilon = 1e-14);
        let back = from_stab_coords(&sc, &rp());
        assert_eq!(back, ShipState::new(-2.0, 2.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn rotation_and_origin() {
        let sc = to_stab_coords(&ShipState::new(1.0, 0.0, FRAC_PI_2, 0.0, 0.0, 0.0), &rp());
        assert_abs_diff_eq!(sc.xbar, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sc.ybar, -1.0, epsilon = 1e-12);
        assert_eq!(to_stab_coords(&ShipState::default(), &rp()), StabCoords::default());
        assert_eq!(from_stab_coords(&StabCoords::default(), &rp()), ShipState::default());
    }

    #[test]
    fn coords_round_trip() {
        let rp = rp();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let s = ShipState::from_array(std::array::from_fn(|_| rng.gen_range(-10.0..10.0)));
            let back = from_stab_coords(&to_stab_coords(&s, &rp), &rp);
            for (a, b) in s.to_array().iter().zip(back.to_array()) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn rhs_examples() {
        let rp = rp();
        let zero = stab_coords_rhs(&StabCoords::default(), 0.0, 0.0, &rp);
        assert_eq!(zero, StabRates::default());

        let sc = StabCoords {
            z: 1.0,
            r: 1.0,
            ..Default::default()
        };
        let out = stab_coords_rhs(&sc, 0.0, 0.0, &rp);
        assert_abs_diff_eq!(out.rate.xbar, 11.691_860_666_228_51, epsilon = 1e-10);
        assert_abs_diff_eq!(out.rate.z, 0.0);
        assert_abs_diff_eq!(out.rate.vbar, 0.002_559_561_421_168_727, epsilon = 1e-15);
    }

    #[test]
    fn rhs_matches_chain_rule_of_transform() {
        let rp = rp();
        let h = 1e-5;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = ShipState::from_array(std::array::from_fn(|_| rng.gen_range(-3.0..3.0)));
            let ri = ReducedInputs {
                tau1: rng.gen_range(-2.0..2.0),
                tau2: rng.gen_range(-2.0..2.0),
            };
            let kin = kinematics_rhs(&s);
            let vel = reduced_dynamics_rhs(&s.velocity(), &ri, &rp);
            let ds = [kin[0], kin[1], kin[2], vel.u, vel.v, vel.r];
            let shift = |sign: f64| {
                let a = s.to_array();
                ShipState::from_array(std::array::from_fn(|i| a[i] + sign * h * ds[i]))
            };
            let plus = coords_vec(&to_stab_coords(&shift(1.0), &rp));
            let minus = coords_vec(&to_stab_coords(&shift(-1.0), &rp));
            let sc = to_stab_coords(&s, &rp);
            let taubar1 = taubar1_from_tau1(ri.tau1, &sc, &rp);
            let analytic = coords_vec(&stab_coords_rhs(&sc, taubar1, ri.tau2, &rp).rate);
            for i in 0..7 {
                let fd = (plus[i] - minus[i]) / (2.0 * h);
                assert!((fd - analytic[i]).abs() < 1e-6 * (1.0 + analytic[i].abs()), "component {i}: {fd} vs {}", analytic[i]);
            }
        }
    }

    #[test]
    fn control_examples() {
        let rp = rp();
        let g = StabGains::default();
        let sc = to_stab_coords(&ShipState::new(-2.0, 2.0, 0.0, 0.0, 0.0, 0.0), &rp);
        let (taubar1, tau2) = stab_control(0.0, &sc, &g);
        assert_abs_diff_eq!(taubar1, 0.068_423_668_639_053_25, epsilon = 1e-12);
        assert_abs_diff_eq!(tau2, 2.845_374_908_611_328, epsilon = 1e-12);

        for t in [0.0, 1.3, 100.0] {
            assert_eq!(stab_control(t, &StabCoords::default(), &g), (0.0, 0.0));
        }
        let sc = StabCoords {
            r: 1.0,
            ..Default::default()
        };
        assert_eq!(stab_control(0.0, &sc, &g), (0.0, -0.1));
    }

    #[test]
    fn closed_loop_composition() {
        let ship = Ship::default();
        let g = StabGains::default();
        let ti = stab_closed_loop(0.0, &ShipState::new(-2.0, 2.0, 0.0, 0.0, 0.0, 0.0), &g, &ship);
        assert_abs_diff_eq!(ti.tau_u, 2.312_72, epsilon = 1e-9);
        assert_eq!(stab_closed_loop(5.0, &ShipState::default(), &g, &ship), TrueInputs::default());

        let rp = ship.reduced();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let s = ShipState::from_array(std::array::from_fn(|_| rng.gen_range(-5.0..5.0)));
            let t = rng.gen_range(0.0..50.0);
            let ti = stab_closed_loop(t, &s, &g, &ship);
            let ri = input_to_reduced(&s.velocity(), &ti, ship.params());
            let sc = to_stab_coords(&s, rp);
            let (taubar1, tau2) = stab_control(t, &sc, &g);
            assert!((taubar1_from_tau1(ri.tau1, &sc, rp) - taubar1).abs() < 1e-10 * (1.0 + taubar1.abs()));
            assert!((ri.tau2 - tau2).abs() < 1e-10 * (1.0 + tau2.abs()));
        }
    }

    #[test]
    fn gains_must_be_positive() {
        assert!(StabGains::default().validate().is_ok());
        let g = StabGains {
            k3: 0.0,
            ..Default::default()
        };
        assert!(g.validate().is_err());
        let g = StabGains {
            dither_sharp: f64::INFINITY,
            ..Default::default()
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn dither_vanishes_only_at_zero() {
        let g = StabGains::default();
        assert_eq!(g.dither(0.0), 0.0);
        assert!(g.dither(1e-3) > 0.0);
        assert!(g.dither(-0.5) > 0.0);
    }

    #[test]
    fn cascade_energy_rate_is_exact() {
        let rp = rp();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let sc = to_stab_coords(
                &ShipState::from_array(std::array::from_fn(|_| rng.gen_range(-2.0..2.0))),
                &rp,
            );
            let rates = stab_coords_rhs(&sc, 0.3, -0.2, &rp);
            let direct = rp.d * rp.d * sc.xbar * rates.rate.xbar + sc.vbar * rates.rate.vbar;
            let formula = cascade_energy_rate(&sc, rates.d1, rates.d2, &rp);
            assert_abs_diff_eq!(direct, formula, epsilon = 1e-12);
        }
    }
}
