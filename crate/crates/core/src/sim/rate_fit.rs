use crate::error::AnalysisError;

/// Norms below this are treated as numerically converged and end the fit window.
pub const UNDERFLOW_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Estimated exponential rate `γ` in `‖η‖ ≈ ρ·e^(−γt)`.
    pub gamma: f64,
    /// Root-mean-square deviation of `ln‖η‖` from the fitted line.
    pub residual: f64,
    pub samples: usize,
}

/// Least-squares fit of `ln‖η(t)‖` against `t` over the trailing
/// `window` fraction of the run.
///
/// The window stops at the first sample whose norm falls below
/// [`UNDERFLOW_NORM`].
pub fn exp_rate_fit(t: &[f64], norm: &[f64], window: f64) -> Result<RateFit, AnalysisError> {
    let (Some(&t0), Some(&t1)) = (t.first(), t.last()) else {
        return Err(AnalysisError::EmptyWindow);
    };
    let start = t1 - window.clamp(0.0, 1.0) * (t1 - t0);
    let points: Vec<(f64, f64)> = t
        .iter()
        .zip(norm)
        .filter(|(&ti, _)| ti >= start)
        .take_while(|(_, &n)| n >= UNDERFLOW_NORM && n.is_finite())
        .map(|(&ti, &n)| (ti, n.ln()))
        .collect();
    if points.len() < 2 {
        return Err(AnalysisError::EmptyWindow);
    }
    let count = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / count;
    // Offsetting by the first value keeps a constant series exactly flat.
    let y0 = points[0].1;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(ti, yi)| {
        let dt = ti - mean_t;
        (sxy + dt * (yi - y0), sxx + dt * dt)
    });
    if sxx == 0.0 {
        return Err(AnalysisError::EmptyWindow);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_t;
    let residual = (points
        .iter()
        .map(|&(ti, yi)| (yi - intercept - slope * ti).powi(2))
        .sum::<f64>()
        / count)
        .sqrt();
    Ok(RateFit {
        // avoid reporting −0
        gamma: if slope == 0.0 { 0.0 } else { -slope },
        residual,
        samples: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, h: f64) -> Vec<f64> {
        (0..=n).map(|i| i as f64 * h).collect()
    }

    #[test]
    fn exact_exponential() {
        let t = grid(10_000, 0.01);
        let norm: Vec<f64> = t.iter().map(|t| 5.0 * (-0.3 * t).exp()).collect();
        let fit = exp_rate_fit(&t, &norm, 0.5).unwrap();
        assert!((fit.gamma - 0.3).abs() < 1e-6);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn constant_series_has_zero_rate() {
        let t = grid(100, 0.1);
        let fit = exp_rate_fit(&t, &vec![2.0; t.len()], 0.5).unwrap();
        assert_eq!(fit.gamma, 0.0);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn window_stops_at_underflow() {
        let t = grid(1000, 0.1);
        let norm: Vec<f64> = t.iter().map(|t| (-0.5 * t).exp()).collect();
        let fit = exp_rate_fit(&t, &norm, 0.9).unwrap();
        // e^(−0.5t) < 1e−12 beyond t ≈ 55.3
        assert!(fit.samples < 600);
        assert!((fit.gamma - 0.5).abs() < 1e-9);
    }

    #[test]
    fn empty_window_is_an_error() {
        assert_eq!(exp_rate_fit(&[], &[], 0.5), Err(AnalysisError::EmptyWindow));
        let t = grid(10, 1.0);
        assert!(exp_rate_fit(&t, &[0.0; 11], 0.5).is_err());
    }
}
