//! Residual diagnostics in the fit's transformed space.

use serde::Serialize;

use super::fit::{prepare, FitResult};
use crate::error::Result;
use crate::stats::dist::inverse_normal_cdf;
use crate::stats::summation::{mean, sum};

/// All series have one entry per retained pair, in input order, except the
/// QQ pairs which are sorted by sample quantile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub standardized_residuals: Vec<f64>,
    pub qq_pairs: Vec<(f64, f64)>,
    pub scale_location: Vec<f64>,
    pub leverage: Vec<f64>,
    pub cooks_distance: Vec<f64>,
}

impl Diagnostics {
    pub fn len(&self) -> usize {
        self.fitted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitted.is_empty()
    }
}

/// Parameters in the Cook's distance denominator (intercept and slope).
const P: f64 = 2.0;

pub fn diagnostics(fit: &FitResult, xs: &[f64], ys: &[f64]) -> Result<Diagnostics> {
    let p = prepare(xs, ys, fit.k, fit.plus_one)?;
    let n = p.t.len();
    let fitted: Vec<f64> = p.t.iter().map(|t| fit.alpha + fit.beta * t).collect();
    let residuals: Vec<f64> = p.log_y.iter().zip(&fitted).map(|(y, f)| y - f).collect();

    let tm = mean(&p.t).unwrap_or(0.0);
    let stt = sum(p.t.iter().map(|t| (t - tm) * (t - tm)));
    let leverage: Vec<f64> =
        p.t.iter()
            .map(|t| 1.0 / n as f64 + (t - tm) * (t - tm) / stt)
            .collect();

    let sse = sum(residuals.iter().map(|e| e * e));
    let sigma = if n > 2 {
        (sse / (n as f64 - 2.0)).sqrt()
    } else {
        0.0
    };
    // Residual scale at rounding level means an exact fit.
    let y_scale = 1.0 + p.log_y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sigma = if sigma <= 1e-12 * y_scale { 0.0 } else { sigma };
    // A point with leverage 1 is interpolated exactly: its residual is 0.
    let standardized_residuals: Vec<f64> = residuals
        .iter()
        .zip(&leverage)
        .map(|(e, h)| {
            let d = sigma * (1.0 - h).max(0.0).sqrt();
            if d > 0.0 {
                e / d
            } else {
                0.0
            }
        })
        .collect();
    let cooks_distance = standardized_residuals
        .iter()
        .zip(&leverage)
        .map(|(r, h)| {
            if *h < 1.0 {
                r * r * h / (P * (1.0 - h))
            } else {
                0.0
            }
        })
        .collect();
    let scale_location = standardized_residuals
        .iter()
        .map(|r| r.abs().sqrt())
        .collect();

    let mut sorted = standardized_residuals.clone();
    sorted.sort_by(f64::total_cmp);
    let qq_pairs = sorted
        .into_iter()
        .enumerate()
        .map(|(i, s)| Ok((inverse_normal_cdf((i as f64 + 0.5) / n as f64)?, s)))
        .collect::<Result<_>>()?;

    Ok(Diagnostics {
        fitted,
        residuals,
        standardized_residuals,
        qq_pairs,
        scale_location,
        leverage,
        cooks_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::fit::{fit_log_power, fit_robust_log_power, predict};
    use proptest::prelude::*;
    use std::f64::consts::E;

    #[test]
    fn three_hand_points() {
        let xs = [E, E * E, E.powi(3)];
        let ys = [E, E.powi(3), E.powi(4)];
        let f = fit_log_power(&xs, &ys, 1.0).unwrap();
        let d = diagnostics(&f, &xs, &ys).unwrap();
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(&d.residuals, &[-1.0 / 6.0, 1.0 / 3.0, -1.0 / 6.0]));
        assert!(close(&d.leverage, &[5.0 / 6.0, 1.0 / 3.0, 5.0 / 6.0]));
        assert!(close(&d.standardized_residuals, &[-1.0, 1.0, -1.0]));
        assert!(close(&d.cooks_distance, &[2.5, 0.25, 2.5]));
        assert!(close(&d.scale_location, &[1.0, 1.0, 1.0]));
        assert_eq!(d.qq_pairs.len(), 3);
        assert!((d.qq_pairs[1].0).abs() < 1e-12);
    }

    #[test]
    fn perfect_fit_is_all_zero() {
        let xs: Vec<f64> = (1..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let f = fit_log_power(&xs, &ys, 1.0).unwrap();
        let d = diagnostics(&f, &xs, &ys).unwrap();
        assert!(d.residuals.iter().all(|e| e.abs() < 1e-12));
        assert!(d.cooks_distance.iter().all(|c| c.abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn series_properties(
            pts in proptest::collection::vec((1u32..5000, 1u32..5000), 3..60),
            k in prop_oneof![Just(1.0), Just(1.2), Just(1.4), Just(2.0)],
        ) {
            let xs: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1 as f64).collect();
            let Ok(f) = fit_log_power(&xs, &ys, k) else { return Ok(()) };
            let d = diagnostics(&f, &xs, &ys).unwrap();
            let n = f.n;
            for len in [d.fitted.len(), d.residuals.len(), d.standardized_residuals.len(), d.qq_pairs.len(),
                        d.scale_location.len(), d.leverage.len(), d.cooks_distance.len()] {
                prop_assert_eq!(len, n);
            }
            prop_assert!(sum(d.residuals.iter().copied()).abs() <= 1e-9 * n as f64);
            prop_assert!(d.leverage.iter().all(|h| *h > 0.0 && *h <= 1.0 + 1e-12));
            for (x, fv) in xs.iter().zip(&d.fitted) {
                prop_assert_eq!(predict(&f, *x), fv.exp());
            }
            if let Ok(r) = fit_robust_log_power(&xs, &ys, k) {
                prop_assert_eq!(diagnostics(&r, &xs, &ys).unwrap().len(), n);
            }
        }
    }
}
