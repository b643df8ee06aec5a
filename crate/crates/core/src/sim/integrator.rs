use crate::error::SimError;

/// One classical fourth-order Runge–Kutta step of `ẏ = f(t, y)`.
///
/// Fails if any stage rate is non-finite; the error carries the stage
/// index (1–4) and the step start time.
pub fn rk4_step<const N: usize, F>(mut rhs: F, t: f64, y: &[f64; N], h: f64) -> Result<[f64; N], SimError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let check = |k: [f64; N], stage: usize| {
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(SimError::NonFiniteStage { stage, t })
        }
    };
    let offset = |k: &[f64; N], scale: f64| -> [f64; N] { std::array::from_fn(|i| y[i] + scale * k[i]) };

    let k1 = check(rhs(t, y), 1)?;
    let k2 = check(rhs(t + 0.5 * h, &offset(&k1, 0.5 * h)), 2)?;
    let k3 = check(rhs(t + 0.5 * h, &offset(&k2, 0.5 * h)), 3)?;
    let k4 = check(rhs(t + h, &offset(&k3, h)), 4)?;
    Ok(std::array::from_fn(|i| {
        y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate_exp(h: f64) -> f64 {
        let n = (1.0 / h).round() as usize;
        let mut y = [1.0];
        for i in 0..n {
            y = rk4_step(|_, y| [y[0]], i as f64 * h, &y, h).unwrap();
        }
        y[0]
    }

    #[test]
    fn zero_rate_keeps_state() {
        let y = [1.5, -2.0, 0.25];
        assert_eq!(rk4_step(|_, _| [0.0; 3], 0.0, &y, 0.1).unwrap(), y);
    }

    #[test]
    fn single_step_is_taylor_truncation() {
        let y = rk4_step(|_, y| [y[0]], 0.0, &[1.0], 0.1).unwrap();
        let taylor = 1.0 + 0.1 + 0.01 / 2.0 + 0.001 / 6.0 + 0.0001 / 24.0;
        assert!((y[0] - taylor).abs() < 1e-12);
        assert!((y[0] - 1.105_170_833_333_333_3).abs() < 1e-12);
    }

    #[test]
    fn fourth_order_global_error() {
        let e = std::f64::consts::E;
        let err1 = (integrate_exp(0.01) - e).abs();
        assert!(err1 < 1e-9, "{err1}");
        let coarse = (integrate_exp(0.1) - e).abs();
        let fine = (integrate_exp(0.05) - e).abs();
        let ratio = coarse / fine;
        assert!((14.0..18.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn time_dependent_rate() {
        // ẏ = cos t, y(0) = 0 ⇒ y(1) = sin 1; RK4 reduces to Simpson's rule,
        // whose error here is at most h⁴/2880.
        let h = 0.01;
        let mut y = [0.0];
        for i in 0..100 {
            y = rk4_step(|t, _| [t.cos()], i as f64 * h, &y, h).unwrap();
        }
        assert!((y[0] - 1.0_f64.sin()).abs() < 1e-8 / 2880.0);
    }

    #[test]
    fn non_finite_stage_is_reported() {
        let err = rk4_step(|t, _| [if t > 0.0 { f64::NAN } else { 1.0 }], 0.0, &[0.0], 0.1).unwrap_err();
        assert_eq!(err, SimError::NonFiniteStage { stage: 2, t: 0.0 });
    }
}
