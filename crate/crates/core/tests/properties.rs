use proptest::prelude::*;

use shipctl::model::{
    derive_reduced, full_dynamics_rhs, input_from_reduced, input_to_reduced, reduced_dynamics_rhs, ShipParams,
    ShipState, TrueInputs, Velocity,
};
use shipctl::stabilization::{from_stab_coords, to_stab_coords};
use shipctl::tracking::{alpha_beta, alpha_beta_direct, alpha_beta_series, SERIES_THRESHOLD};

fn params() -> impl Strategy<Value = ShipParams> {
    (
        1.0..50.0f64,
        1.0..50.0f64,
        0.05..0.9f64,
        0.5..10.0f64,
        0.1..5.0f64,
        0.1..5.0f64,
        -1.0..-0.01f64,
        0.1..5.0f64,
    )
        .prop_map(|(m11, m22, frac, m33, d11, d22, d23, d33)| ShipParams {
            m11,
            m22,
            // keeps m22·m33 − m23² > 0
            m23: frac * (m22 * m33).sqrt(),
            m33,
            d11,
            d22,
            d23,
            d32: d23,
            d33,
        })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn transforms_invert_for_any_valid_ship(
        p in params(),
        u in -10.0..10.0f64, v in -10.0..10.0f64, r in -10.0..10.0f64,
        tau_u in -100.0..100.0f64, tau_r in -100.0..100.0f64,
    ) {
        let vel = Velocity { u, v, r };
        let ti = TrueInputs { tau_u, tau_r };
        let back = input_from_reduced(&vel, &input_to_reduced(&vel, &ti, &p), &p);
        prop_assert!(close(back.tau_u, tau_u, 1e-9) && close(back.tau_r, tau_r, 1e-9));

        let rp = derive_reduced(&p).unwrap();
        let full = full_dynamics_rhs(&vel, &ti, &p);
        let red = reduced_dynamics_rhs(&vel, &input_to_reduced(&vel, &ti, &p), &rp);
        prop_assert!(close(full.u, red.u, 1e-9) && close(full.v, red.v, 1e-9) && close(full.r, red.r, 1e-9));
    }

    #[test]
    fn stabilizing_coordinates_round_trip(
        p in params(),
        s in prop::array::uniform6(-10.0..10.0f64),
        turns in -5i32..5,
    ) {
        let mut s = ShipState::from_array(s);
        // heading is not wrapped
        s.psi += f64::from(turns) * std::f64::consts::TAU;
        let rp = derive_reduced(&p).unwrap();
        let back = from_stab_coords(&to_stab_coords(&s, &rp), &rp);
        for (a, b) in back.to_array().iter().zip(s.to_array()) {
            prop_assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn coupling_is_continuous_across_the_branch_switch(
        scale in 0.5..2.0f64, ud in -5.0..5.0f64, vd in -5.0..5.0f64,
    ) {
        let psi = scale * SERIES_THRESHOLD;
        let (a1, b1) = alpha_beta_direct(psi, ud, vd);
        let (a2, b2) = alpha_beta_series(psi, ud, vd);
        let (a, b) = alpha_beta(psi, ud, vd);
        let tol = 1e-9 * (ud.abs() + vd.abs()) * psi;
        prop_assert!((a1 - a2).abs() <= tol && (b1 - b2).abs() <= tol);
        prop_assert!((a - a1).abs() <= tol && (b - b1).abs() <= tol);
    }
}
