//! Least-squares decay rates of dyadic term sequences.

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 4;

/// Half-width of the acceptance band around a predicted exponent.
pub const EXPONENT_TOLERANCE: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySeries {
    pub term: String,
    /// `(k, |value|)` in ascending `k`.
    pub points: Vec<(i32, f64)>,
    /// Fitted slope of `log₂|value|` against `k`.
    pub slope: f64,
    /// Standard error of the slope; the confidence band is `slope ± 2·stderr`.
    pub slope_stderr: f64,
    pub intercept: f64,
    /// Root-mean-square misfit in `log₂` units.
    pub residual: f64,
    /// Exponent `a` of the analytic bound `C 2^{ak}`.
    pub predicted: f64,
}

impl DecaySeries {
    pub fn confidence_band(&self) -> (f64, f64) {
        (
            self.slope - 2.0 * self.slope_stderr,
            self.slope + 2.0 * self.slope_stderr,
        )
    }

    /// The fitted slope reaches the predicted exponent up to
    /// [`EXPONENT_TOLERANCE`].
    pub fn meets_prediction(&self) -> bool {
        self.slope >= self.predicted - EXPONENT_TOLERANCE
    }
}

/// Fit `log₂|v_k| ≈ slope·k + intercept` by ordinary least squares.
///
/// Zero values carry no rate information and are dropped; fewer than
/// [`MIN_POINTS`] survivors is an error.
pub fn fit_decay(term: &str, points: &[(i32, f64)], predicted: f64) -> Result<DecaySeries> {
    let mut pts: Vec<(i32, f64)> = points.iter().map(|&(k, v)| (k, v.abs())).collect();
    pts.sort_by_key(|p| p.0);
    let usable: Vec<(f64, f64)> = pts
        .iter()
        .filter(|p| p.1 > 0.0 && p.1.is_finite())
        .map(|&(k, v)| (k as f64, v.log2()))
        .collect();
    if usable.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints {
            need: MIN_POINTS,
            got: usable.len(),
        });
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = usable
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let residual = (sse / m).sqrt();
    let slope_stderr = (sse / (m - 2.0) / sxx).sqrt();
    Ok(DecaySeries {
        term: term.to_string(),
        points: pts,
        slope,
        slope_stderr,
        intercept,
        residual,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_is_recovered() {
        let pts: Vec<(i32, f64)> = (-4..=1)
            .map(|k| (k, 3.0 * 2f64.powf(0.5 * k as f64)))
            .collect();
        let fit = fit_decay("x", &pts, 0.5).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.log2()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn constant_series_is_flat() {
        let pts: Vec<(i32, f64)> = (0..6).map(|k| (k, 7.0)).collect();
        let fit = fit_decay("c", &pts, 0.0).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.confidence_band(), (0.0, 0.0));
        assert!(fit.meets_prediction());
    }

    #[test]
    fn too_few_points() {
        let pts = [(0, 1.0), (1, 2.0), (2, 0.0), (3, 4.0)];
        assert!(matches!(
            fit_decay("x", &pts, 1.0),
            Err(Error::InsufficientPoints { need: 4, got: 3 })
        ));
    }
}
