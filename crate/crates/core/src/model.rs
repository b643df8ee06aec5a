//! Three degree-of-freedom surface ship model with non-diagonal inertia and
//! damping, its feedback-linearized reduced form, and the input
//! transformation linking the two.

use crate::error::ModelError;

/// Entries of the inertia matrix `M` and damping matrix `D`.
///
/// Only the non-zero entries are stored:
///
/// ```text
///     | m11  0    0   |        | d11  0    0   |
/// M = | 0    m22  m23 |    D = | 0    d22  d23 |
///     | 0    m23  m33 |        | 0    d32  d33 |
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShipParams {
    pub m11: f64,
    pub m22: f64,
    pub m23: f64,
    pub m33: f64,
    pub d11: f64,
    pub d22: f64,
    pub d23: f64,
    pub d32: f64,
    pub d33: f64,
}

impl Default for ShipParams {
    /// Scale model ship used throughout the bundled scenarios.
    fn default() -> Self {
        Self {
            m11: 25.8,
            m22: 33.8,
            m23: 1.0115,
            m33: 2.76,
            d11: 0.9257,
            d22: 2.8909,
            d23: -0.2601,
            d32: -0.2601,
            d33: 0.5,
        }
    }
}

impl ShipParams {
    /// Determinant of the sway/yaw inertia block, `m22·m33 − m23²`.
    pub fn delta(&self) -> f64 {
        self.m22 * self.m33 - self.m23 * self.m23
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let entries = [
            ("m11", self.m11),
            ("m22", self.m22),
            ("m23", self.m23),
            ("m33", self.m33),
            ("d11", self.d11),
            ("d22", self.d22),
            ("d23", self.d23),
            ("d32", self.d32),
            ("d33", self.d33),
        ];
        for (name, value) in entries {
            if !value.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        for (name, value) in [
            ("m11", self.m11),
            ("m22", self.m22),
            ("m33", self.m33),
            ("d11", self.d11),
            ("d22", self.d22),
            ("d33", self.d33),
        ] {
            if value <= 0.0 {
                return Err(ModelError::NotPositive { name, value });
            }
        }
        if self.m23 == 0.0 {
            return Err(ModelError::ZeroCoupling("m23"));
        }
        if self.d23 == 0.0 {
            return Err(ModelError::ZeroCoupling("d23"));
        }
        let delta = self.delta();
        if delta <= 0.0 {
            return Err(ModelError::SingularInertia(delta));
        }
        Ok(())
    }
}

/// Constants of the reduced sway equation `v̇ = −a·τ₂ − b·r − c·u·r − d·v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub delta: f64,
}

/// Validates `params` and derives the reduced constants.
pub fn derive_reduced(params: &ShipParams) -> Result<ReducedParams, ModelError> {
    params.validate()?;
    Ok(ReducedParams {
        a: params.m23 / params.m22,
        b: params.d23 / params.m22,
        c: params.m11 / params.m22,
        d: params.d22 / params.m22,
        delta: params.delta(),
    })
}

/// Validated model parameters together with their reduced constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ship {
    params: ShipParams,
    reduced: ReducedParams,
}

impl Ship {
    pub fn new(params: ShipParams) -> Result<Self, ModelError> {
        let reduced = derive_reduced(&params)?;
        Ok(Self { params, reduced })
    }

    pub fn params(&self) -> &ShipParams {
        &self.params
    }

    pub fn reduced(&self) -> &ReducedParams {
        &self.reduced
    }
}

impl Default for Ship {
    fn default() -> Self {
        Self::new(ShipParams::default()).expect("default model is valid")
    }
}

/// Pose in the Earth-fixed frame and body-frame velocities.
///
/// `psi` is never wrapped; the controllers use the heading linearly.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShipState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
}

impl ShipState {
    pub const fn new(x: f64, y: f64, psi: f64, u: f64, v: f64, r: f64) -> Self {
        Self { x, y, psi, u, v, r }
    }

    pub fn from_array(s: [f64; 6]) -> Self {
        Self::new(s[0], s[1], s[2], s[3], s[4], s[5])
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.x, self.y, self.psi, self.u, self.v, self.r]
    }

    pub fn velocity(&self) -> Velocity {
        Velocity {
            u: self.u,
            v: self.v,
            r: self.r,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// Body-frame velocity triple `(u, v, r)` or its time derivative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Velocity {
    pub u: f64,
    pub v: f64,
    pub r: f64,
}

/// Surge force and yaw moment actually applied to the hull.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrueInputs {
    pub tau_u: f64,
    pub tau_r: f64,
}

/// Inputs of the reduced model: `u̇ = τ₁`, `ṙ = τ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedInputs {
    pub tau1: f64,
    pub tau2: f64,
}

/// Earth-frame pose rates `(ẋ, ẏ, ψ̇)`.
pub fn kinematics_rhs(state: &ShipState) -> [f64; 3] {
    let (s, c) = state.psi.sin_cos();
    [
        state.u * c - state.v * s,
        state.u * s + state.v * c,
        state.r,
    ]
}

pub fn reduced_dynamics_rhs(vel: &Velocity, inputs: &ReducedInputs, rp: &ReducedParams) -> Velocity {
    Velocity {
        u: inputs.tau1,
        v: -rp.a * inputs.tau2 - rp.b * vel.r - rp.c * vel.u * vel.r - rp.d * vel.v,
        r: inputs.tau2,
    }
}

// Terms shared by the forward and inverse yaw transformation.
fn yaw_coupling(vel: &Velocity, p: &ShipParams) -> f64 {
    (p.m11 - p.m22) * (p.m23 * vel.r + p.m22 * vel.v) * vel.u
        + (p.m23 * p.d22 - p.m22 * p.d32) * vel.v
        + (p.m23 * p.d23 - p.m22 * p.d33) * vel.r
}

/// Maps true actuation `(τ_u, τ_r)` to reduced inputs `(τ₁, τ₂)`.
pub fn input_to_reduced(vel: &Velocity, ti: &TrueInputs, p: &ShipParams) -> ReducedInputs {
    let Velocity { u, v, r } = *vel;
    ReducedInputs {
        tau1: (ti.tau_u - r * (-p.m22 * v - p.m23 * r) - p.d11 * u) / p.m11,
        tau2: (p.m22 * ti.tau_r + yaw_coupling(vel, p)) / p.delta(),
    }
}

/// Inverse of [`input_to_reduced`].
pub fn input_from_reduced(vel: &Velocity, ri: &ReducedInputs, p: &ShipParams) -> TrueInputs {
    let Velocity { u, v, r } = *vel;
    TrueInputs {
        tau_u: p.m11 * ri.tau1 - r * (p.m22 * v + p.m23 * r) + p.d11 * u,
        tau_r: (p.delta() * ri.tau2 - yaw_coupling(vel, p)) / p.m22,
    }
}

/// `M⁻¹(τ − C(v)v − Dv)` with `τ = (τ_u, 0, τ_r)`.
///
/// The inverse uses the block structure of `M`: a scalar surge entry and a
/// 2×2 sway/yaw block with determinant `Δ`.
pub fn full_dynamics_rhs(vel: &Velocity, ti: &TrueInputs, p: &ShipParams) -> Velocity {
    let Velocity { u, v, r } = *vel;
    // τ − C(v)v − Dv, row by row
    let f_surge = ti.tau_u + (p.m22 * v + p.m23 * r) * r - p.d11 * u;
    let f_sway = -p.m11 * u * r - p.d22 * v - p.d23 * r;
    let f_yaw = ti.tau_r - (p.m22 * v + p.m23 * r) * u + p.m11 * u * v - p.d32 * v - p.d33 * r;
    let delta = p.delta();
    Velocity {
        u: f_surge / p.m11,
        v: (p.m33 * f_sway - p.m23 * f_yaw) / delta,
        r: (-p.m23 * f_sway + p.m22 * f_yaw) / delta,
    }
}
