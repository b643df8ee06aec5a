//! Property suite run by `shipctl verify`.
//!
//! Each check exercises one claim of the control design numerically and
//! reports a one-line verdict with the measured quantities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    derive_reduced, full_dynamics_rhs, input_from_reduced, input_to_reduced, reduced_dynamics_rhs, ReducedInputs,
    Ship, ShipParams, ShipState, TrueInputs, Velocity,
};
use crate::sim::{
    exp_rate_fit, linearized_track_rhs, lyapunov_monitor, presets, reference_generate, rk4_step, simulate,
    stab_transform_residual, yaw_command_residual, DrivingError, Mode, MonitorTolerances, ReferenceSpec, Scenario,
    ScenarioKind, Stencil, TimeSeries,
};
use crate::tracking::{
    alpha_beta, alpha_beta_direct, alpha_beta_rates, alpha_beta_series, driving_law, pe_check, to_track_coords, track_error_rhs, PeSample, PeSettings, RefSignals, TrackErrors, TrackGains,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

type Outcome = Result<(bool, String), String>;

fn check(name: &'static str, f: impl FnOnce() -> Outcome) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(detail) => CheckResult {
            name,
            passed: false,
            detail,
        },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn run(sc: &Scenario, step: f64) -> Result<TimeSeries, String> {
    let mut sc = sc.clone();
    sc.step = step;
    simulate(&sc).map_err(|e| e.to_string())
}

fn random_sample(rng: &mut ChaCha8Rng) -> (Velocity, TrueInputs) {
    let vel = Velocity {
        u: rng.gen_range(-10.0..10.0),
        v: rng.gen_range(-10.0..10.0),
        r: rng.gen_range(-10.0..10.0),
    };
    let ti = TrueInputs {
        tau_u: rng.gen_range(-100.0..100.0),
        tau_r: rng.gen_range(-100.0..100.0),
    };
    (vel, ti)
}

fn transform_round_trip() -> Outcome {
    let p = ShipParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let (vel, ti) = random_sample(&mut rng);
        let back = input_from_reduced(&vel, &input_to_reduced(&vel, &ti, &p), &p);
        let ri = ReducedInputs {
            tau1: ti.tau_u,
            tau2: ti.tau_r,
        };
        let fwd = input_to_reduced(&vel, &input_from_reduced(&vel, &ri, &p), &p);
        worst = worst
            .max(rel(back.tau_u, ti.tau_u))
            .max(rel(back.tau_r, ti.tau_r))
            .max(rel(fwd.tau1, ri.tau1))
            .max(rel(fwd.tau2, ri.tau2));
    }
    Ok((worst < 1e-9, format!("max relative error {worst:.2e} over 10000 samples")))
}

fn model_equivalence() -> Outcome {
    let p = ShipParams::default();
    let rp = derive_reduced(&p).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let (vel, ti) = random_sample(&mut rng);
        let full = full_dynamics_rhs(&vel, &ti, &p);
        let reduced = reduced_dynamics_rhs(&vel, &input_to_reduced(&vel, &ti, &p), &rp);
        worst = worst
            .max(rel(full.u, reduced.u))
            .max(rel(full.v, reduced.v))
            .max(rel(full.r, reduced.r));
    }
    Ok((worst < 1e-9, format!("max relative error {worst:.2e} over 10000 samples")))
}

fn integrator_order() -> Outcome {
    let solve = |h: f64| -> Result<f64, String> {
        let n = (1.0 / h).round() as usize;
        let mut y = [1.0];
        for i in 0..n {
            y = rk4_step(|_, y| [y[0]], i as f64 * h, &y, h).map_err(|e| e.to_string())?;
        }
        Ok((y[0] - std::f64::consts::E).abs())
    };
    let e1 = solve(0.01)?;
    let ratio = solve(0.1)? / solve(0.05)?;
    Ok((
        e1 < 1e-9 && (14.0..18.0).contains(&ratio),
        format!("error {e1:.2e} at h = 0.01, halving ratio {ratio:.2}"),
    ))
}

fn coupling_branches() -> Outcome {
    let (ud, vd, udot, vdot, re) = (4.0, -0.3, 0.2, 0.1, 0.7);
    let mut worst = 0.0_f64;
    for k in 0..=80 {
        let psi = 10f64.powf(-6.0 + 4.0 * k as f64 / 80.0);
        for psi in [psi, -psi] {
            let (a1, b1) = alpha_beta_direct(psi, ud, vd);
            let (a2, b2) = alpha_beta_series(psi, ud, vd);
            worst = worst.max(rel(a1, a2)).max(rel(b1, b2));
        }
    }
    let mut fd_worst = 0.0_f64;
    let eps = 1e-6;
    for &psi in &[-1.3, -0.2, 1e-3, 0.05, 0.9, 2.5] {
        // along ψ̇ = r_e with constant reference accelerations
        let at = |s: f64| alpha_beta(psi + re * s, ud + udot * s, vd + vdot * s);
        let (ap, bp) = at(eps);
        let (am, bm) = at(-eps);
        let (ad, bd) = alpha_beta_rates(psi, re, ud, udot, vd, vdot);
        fd_worst = fd_worst
            .max(((ap - am) / (2.0 * eps) - ad).abs())
            .max(((bp - bm) / (2.0 * eps) - bd).abs());
    }
    Ok((
        worst < 1e-9 && fd_worst < 1e-5,
        format!("branch disagreement {worst:.2e} on |psi| in [1e-6, 1e-2], rate error {fd_worst:.2e}"),
    ))
}

fn stab_transform(sc: &Scenario) -> Outcome {
    let coarse = run(sc, 0.01)?;
    let fine = run(sc, 0.005)?;
    let r3 = |ts| stab_transform_residual(ts, Stencil::Central3).map_err(|e| e.to_string());
    let r5 = |ts| stab_transform_residual(ts, Stencil::Central5).map_err(|e| e.to_string());
    let ratio = r3(&coarse)? / r3(&fine)?;
    let five = r5(&coarse)?;
    Ok((
        (3.6..4.4).contains(&ratio) && five < 1e-4,
        format!("3-point residual halving ratio {ratio:.2}, 5-point residual {five:.2e} at h = 0.01"),
    ))
}

fn lyapunov(sc: &Scenario, mode: Mode) -> Outcome {
    let tol = MonitorTolerances::default();
    let coarse = lyapunov_monitor(&run(sc, 0.01)?, mode, &tol).map_err(|e| e.to_string())?;
    let fine = lyapunov_monitor(&run(sc, 0.005)?, mode, &tol).map_err(|e| e.to_string())?;
    let ratio = coarse.driving.max_residual / fine.driving.max_residual;
    let passed = coarse.passed() && (3.6..4.4).contains(&ratio);
    let mut detail = format!(
        "residual {:.2e} (halving ratio {ratio:.2}), largest step increase {:.2e}, cascade bound violations {} (published gain: {})",
        coarse.driving.max_residual,
        coarse.driving.max_increase,
        coarse.bound_violations,
        coarse.published_bound_violations
    );
    for flag in &coarse.flags {
        detail.push_str("; ");
        detail.push_str(flag);
    }
    Ok((passed, detail))
}

fn stab_convergence(sc: &Scenario) -> Outcome {
    let ts = simulate(sc).map_err(|e| e.to_string())?;
    let first = ts.samples.first().ok_or("empty run")?.state.max_abs();
    let last = ts.last().ok_or("empty run")?.state.max_abs();
    let ratio = last / first;
    Ok((ratio < 0.1, format!("|x(T)|/|x(0)| = {ratio:.2e} at T = {} s", sc.duration)))
}

fn yaw_command_rate() -> Outcome {
    let ts = run(&presets::track_straight_line(), 1e-3)?;
    let (err, peak) = yaw_command_residual(&ts).map_err(|e| e.to_string())?;
    let r = err / peak;
    Ok((r < 1e-4, format!("max |FD - analytic| / max |analytic| = {r:.2e} at h = 1e-3")))
}

fn track_convergence(sc: &Scenario) -> Outcome {
    let ts = simulate(sc).map_err(|e| e.to_string())?;
    let t = ts.times();
    let norms = ts.error_norms();
    let ratio = norms.last().ok_or("empty run")? / norms[0];
    let fit = exp_rate_fit(&t, &norms, 0.5).map_err(|e| e.to_string())?;
    Ok((
        ratio < 1e-3 && fit.gamma > 0.0 && fit.residual < 0.5,
        format!(
            "|e(T)|/|e(0)| = {ratio:.2e}, fitted rate {:.4}, log residual {:.3}",
            fit.gamma, fit.residual
        ),
    ))
}

fn circle_equilibrium() -> Outcome {
    let ship = Ship::default();
    let vd = presets::circle_equilibrium_sway(&ship, 0.2, 0.188);
    let spec = ReferenceSpec {
        init: ShipState::new(-2.0, 1.0, 0.0, 0.2, vd, 0.188),
        tau1d: 0.0,
        tau2d: 0.0,
    };
    let traj = reference_generate(&spec, ship.reduced(), 0.01, 100.0).map_err(|e| e.to_string())?;
    let drift = traj
        .signals
        .iter()
        .map(|s| {
            (s.state.u - 0.2)
                .abs()
                .max((s.state.v - vd).abs())
                .max((s.state.r - 0.188).abs())
        })
        .fold(0.0, f64::max);
    Ok((drift < 1e-9, format!("v_d = {vd:.6}, velocity drift {drift:.2e} over 100 s")))
}

fn feedforward_invariance() -> Outcome {
    let mut sc = presets::track_straight_line();
    sc.duration = 50.0;
    if let ScenarioKind::Track { init, reference, .. } = &mut sc.kind {
        *init = reference.init;
    }
    let ts = simulate(&sc).map_err(|e| e.to_string())?;
    let worst = ts.error_norms().into_iter().fold(0.0, f64::max);
    Ok((worst < 1e-8, format!("largest error norm {worst:.2e} over 50 s")))
}

fn excitation() -> Outcome {
    let settings = PeSettings::default();
    let verdict = |f: &dyn Fn(f64) -> (f64, f64)| -> Result<bool, String> {
        let samples: Vec<PeSample> = (0..=5000)
            .map(|i| {
                let t = i as f64 * 0.01;
                let (ud, udot) = f(t);
                PeSample {
                    t,
                    ud,
                    udot,
                    ..Default::default()
                }
            })
            .collect();
        pe_check(&samples, &settings).map(|r| r.satisfied).map_err(|e| e.to_string())
    };
    let line = verdict(&|_| (4.0, 0.0))?;
    let still = verdict(&|_| (0.0, 0.0))?;
    let fading = verdict(&|t| ((-t).exp(), -(-t).exp()))?;
    Ok((
        line && !still && !fading,
        format!("straight line {line}, at rest {still}, decaying surge {fading}"),
    ))
}

fn linearization() -> Outcome {
    let ship = Ship::default();
    let rp = ship.reduced();
    let g = TrackGains::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0_f64;
    for reference in [
        RefSignals::new(ShipState::new(0.0, 0.0, 0.4, 4.0, 0.0, 0.0), 0.0, 0.0, 0.0, rp),
        RefSignals::new(ShipState::new(-2.0, 1.0, 0.0, 0.2, -0.32, 0.188), 0.0, 0.0, 0.0, rp),
        RefSignals::new(ShipState::new(1.0, 2.0, 0.3, 1.5, 0.1, -0.2), 0.3, 0.05, 0.0, rp),
    ] {
        for _ in 0..200 {
            let mut raw: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let n = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            raw.iter_mut().for_each(|v| *v *= 1e-6 / n);
            let e = TrackErrors {
                xe: raw[0],
                ye: raw[1],
                psie: raw[2],
                ue: raw[3],
                ve: raw[4],
                re: raw[5],
            };
            let tc = to_track_coords(&e, &reference, rp);
            let (_, _, taubar1e, tau2e) = driving_law(&tc, &reference, &g, rp);
            let nl = track_error_rhs(&tc, &reference, tau2e, taubar1e, rp);
            let lin = linearized_track_rhs(
                &DrivingError {
                    ze: tc.ze,
                    psie: tc.psie,
                    re: tc.re,
                    ubare: tc.ubare,
                },
                &reference,
                &g,
                rp,
            );
            worst = worst
                .max((nl.ze - lin.ze).abs())
                .max((nl.psie - lin.psie).abs())
                .max((nl.re - lin.re).abs())
                .max((nl.ubare - lin.ubare).abs());
        }
    }
    Ok((worst < 1e-10, format!("max deviation {worst:.2e} at error norm 1e-6")))
}

/// Runs every check in order.
pub fn run_suite() -> Vec<CheckResult> {
    let offset = presets::stabilize_offset();
    let lateral = presets::stabilize_lateral();
    let line = presets::track_straight_line();
    let circle = presets::track_circle();
    vec![
        check("input transform round trip", transform_round_trip),
        check("full and reduced dynamics agree", model_equivalence),
        check("RK4 fourth-order convergence", integrator_order),
        check("heading coupling branches agree", coupling_branches),
        check("stabilizing coordinates follow their dynamics (offset start)", || {
            stab_transform(&offset)
        }),
        check("stabilizing coordinates follow their dynamics (lateral start)", || {
            stab_transform(&lateral)
        }),
        check("stabilizing Lyapunov decrease (offset start)", || {
            lyapunov(&offset, Mode::Stabilize)
        }),
        check("stabilizing Lyapunov decrease (lateral start)", || {
            lyapunov(&lateral, Mode::Stabilize)
        }),
        check("stabilization converges (offset start)", || stab_convergence(&offset)),
        check("stabilization converges (lateral start)", || stab_convergence(&lateral)),
        check("tracking Lyapunov decrease (straight line)", || lyapunov(&line, Mode::Track)),
        check("tracking Lyapunov decrease (circle)", || lyapunov(&circle, Mode::Track)),
        check("analytic yaw-command rate", yaw_command_rate),
        check("tracking converges exponentially (straight line)", || {
            track_convergence(&line)
        }),
        check("tracking converges exponentially (circle)", || track_convergence(&circle)),
        check("steady turn is an equilibrium of the reference", circle_equilibrium),
        check("zero tracking error is invariant", feedforward_invariance),
        check("excitation check", excitation),
        check("linearized loop matches at small error", linearization),
    ]
}
