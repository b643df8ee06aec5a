//! The heading-error couplings `α(ψ_e)` and `β(ψ_e)`.
//!
//! With `g(ψ) = cos ψ − 1 + ψ²/2` and `h(ψ) = sin ψ − ψ`,
//!
//! ```text
//! α = ( u_d·g(ψ_e) + v_d·h(ψ_e)) / ψ_e
//! β = (−v_d·g(ψ_e) + u_d·h(ψ_e)) / ψ_e
//! ```
//!
//! Both have a removable singularity at `ψ_e = 0` where they, and their time
//! derivatives, are zero. Below [`SERIES_THRESHOLD`] the quotients are
//! replaced by their Taylor expansions. Above it `g` and `h` are evaluated
//! without cancellation through angle reduction, because the naive
//! trigonometric forms lose every significant digit for small angles.

/// `|ψ_e|` below which the series branch is used.
pub const SERIES_THRESHOLD: f64 = 1e-4;

// Angles below this are small enough for a three-term base polynomial.
const REDUCED_ANGLE: f64 = 1e-4;

/// `sin x − x` without cancellation.
///
/// Uses `sin 3y − 3y = 3(sin y − y) − 4 sin³ y`, whose two terms share a
/// sign on `(0, π/3)`, to scale up from a tiny argument.
pub fn sin_defect(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return x.sin() - x;
    }
    let mut y = x;
    let mut steps = 0;
    while y.abs() > REDUCED_ANGLE {
        y /= 3.0;
        steps += 1;
    }
    let y2 = y * y;
    let mut h = -y * y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0));
    for _ in 0..steps {
        let s = y.sin();
        h = 3.0 * h - 4.0 * s * s * s;
        y *= 3.0;
    }
    h
}

/// `cos x − 1 + x²/2` without cancellation, via
/// `x²/2 − 2sin²(x/2) = −2·(sin(x/2) − x/2)·(x/2 + sin(x/2))`.
pub fn cos_defect(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return x.cos() - 1.0 + 0.5 * x * x;
    }
    let half = 0.5 * x;
    -2.0 * sin_defect(half) * (half + half.sin())
}

/// `g(ψ)/ψ`, `h(ψ)/ψ` and their derivatives with respect to `ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Shape {
    g: f64,
    h: f64,
    dg: f64,
    dh: f64,
}

fn shape_direct(psi: f64) -> Shape {
    let g = cos_defect(psi);
    let h = sin_defect(psi);
    let psi2 = psi * psi;
    Shape {
        g: g / psi,
        h: h / psi,
        // d/dψ [g/ψ] = (g'ψ − g)/ψ² with g' = −h
        dg: (-h * psi - g) / psi2,
        // d/dψ [h/ψ] = (h'ψ − h)/ψ² with h' = g − ψ²/2
        dh: ((g - 0.5 * psi2) * psi - h) / psi2,
    }
}

fn shape_series(psi: f64) -> Shape {
    let p2 = psi * psi;
    Shape {
        g: psi * p2 * (1.0 / 24.0 - p2 * (1.0 / 720.0 - p2 / 40320.0)),
        h: -p2 * (1.0 / 6.0 - p2 * (1.0 / 120.0 - p2 / 5040.0)),
        dg: p2 * (1.0 / 8.0 - p2 * (1.0 / 144.0 - p2 / 5760.0)),
        dh: -psi * (1.0 / 3.0 - p2 * (1.0 / 30.0 - p2 / 840.0)),
    }
}

fn shape(psi: f64) -> Shape {
    if psi.abs() < SERIES_THRESHOLD {
        shape_series(psi)
    } else {
        shape_direct(psi)
    }
}

fn combine(s: &Shape, ud: f64, vd: f64) -> (f64, f64) {
    (ud * s.g + vd * s.h, -vd * s.g + ud * s.h)
}

/// `(α, β)` for heading error `psie` and reference velocities `(u_d, v_d)`.
pub fn alpha_beta(psie: f64, ud: f64, vd: f64) -> (f64, f64) {
    combine(&shape(psie), ud, vd)
}

/// The quotient branch, valid for any `psie ≠ 0`.
pub fn alpha_beta_direct(psie: f64, ud: f64, vd: f64) -> (f64, f64) {
    combine(&shape_direct(psie), ud, vd)
}

/// The series branch, accurate for `|psie| ≲ 1e-2`.
pub fn alpha_beta_series(psie: f64, ud: f64, vd: f64) -> (f64, f64) {
    combine(&shape_series(psie), ud, vd)
}

fn rates_from(s: &Shape, re: f64, ud: f64, udot: f64, vd: f64, vdot: f64) -> (f64, f64) {
    let alpha_dot = udot * s.g + vdot * s.h + (ud * s.dg + vd * s.dh) * re;
    let beta_dot = -vdot * s.g + udot * s.h + (-vd * s.dg + ud * s.dh) * re;
    (alpha_dot, beta_dot)
}

/// Total time derivatives `(α̇, β̇)` given `ψ̇_e = r_e` and the reference
/// accelerations `u̇_d`, `v̇_d`.
pub fn alpha_beta_rates(psie: f64, re: f64, ud: f64, udot: f64, vd: f64, vdot: f64) -> (f64, f64) {
    rates_from(&shape(psie), re, ud, udot, vd, vdot)
}

pub fn alpha_beta_rates_direct(psie: f64, re: f64, ud: f64, udot: f64, vd: f64, vdot: f64) -> (f64, f64) {
    rates_from(&shape_direct(psie), re, ud, udot, vd, vdot)
}

pub fn alpha_beta_rates_series(psie: f64, re: f64, ud: f64, udot: f64, vd: f64, vdot: f64) -> (f64, f64) {
    rates_from(&shape_series(psie), re, ud, udot, vd, vdot)
}
