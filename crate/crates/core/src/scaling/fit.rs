//! Log-power regression: log y = α + β·(log x)^k, by OLS or Huber IRLS.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::summation::{mean, sum, KahanSum};

pub const HUBER_C: f64 = 1.345;
pub const MAD_NORMAL: f64 = 0.6745;
pub const IRLS_MAX_ITER: usize = 50;
pub const IRLS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub k: f64,
    pub robust: bool,
    /// Add 1 to x and y before taking logs instead of dropping zero pairs.
    pub plus_one: bool,
}

impl FitOptions {
    pub fn new(k: f64) -> Self {
        FitOptions {
            k,
            robust: false,
            plus_one: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    /// Pearson r of (t, log y); 0 when log y is constant.
    pub r: f64,
    /// `None` for robust fits.
    pub r_squared: Option<f64>,
    pub n: usize,
    pub robust: bool,
    pub converged: bool,
    pub excluded_zero_pairs: usize,
    pub plus_one: bool,
}

impl FitResult {
    pub fn space(&self) -> SpaceLabel {
        SpaceLabel(self.k)
    }

    /// t = (log x)^k for one x, under this fit's offset convention.
    pub fn transform(&self, x: f64) -> f64 {
        let x = if self.plus_one { x + 1.0 } else { x };
        x.ln().powf(self.k)
    }

    pub fn fitted_log(&self, x: f64) -> f64 {
        self.alpha + self.beta * self.transform(x)
    }
}

/// `log-log`, `log-log^1.2`, `log-log^2`, ….
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceLabel(pub f64);

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 1.0 {
            f.write_str("log-log")
        } else {
            write!(f, "log-log^{}", self.0)
        }
    }
}

/// Transformed, zero-filtered series ready for regression.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub t: Vec<f64>,
    pub log_y: Vec<f64>,
    /// Indices into the caller's series of the retained pairs.
    pub kept: Vec<usize>,
    pub excluded: usize,
}

pub fn prepare(xs: &[f64], ys: &[f64], k: f64, plus_one: bool) -> Result<Prepared> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::Domain(format!(
            "transform exponent k must be >= 1, got {k}"
        )));
    }
    let shift = if plus_one { 1.0 } else { 0.0 };
    let mut p = Prepared {
        t: Vec::with_capacity(xs.len()),
        log_y: Vec::with_capacity(xs.len()),
        kept: Vec::with_capacity(xs.len()),
        excluded: 0,
    };
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if x.is_nan() || y.is_nan() || x.is_infinite() || y.is_infinite() {
            return Err(Error::Domain(format!(
                "non-finite pair ({x}, {y}) at index {i}"
            )));
        }
        let (x, y) = (x + shift, y + shift);
        if x <= 0.0 || y <= 0.0 {
            p.excluded += 1;
            continue;
        }
        let t = x.ln().powf(k);
        if !t.is_finite() {
            return Err(Error::Domain(format!("(log {x})^{k} is undefined")));
        }
        p.t.push(t);
        p.log_y.push(y.ln());
        p.kept.push(i);
    }
    if p.t.len() < 3 {
        return Err(Error::InsufficientData {
            usable: p.t.len(),
            required: 3,
        });
    }
    let first = p.t[0];
    if p.t.iter().all(|&t| t == first) {
        return Err(Error::DegeneratePredictor);
    }
    Ok(p)
}

/// Weighted least squares line; unit weights when `w` is `None`.
fn wls(t: &[f64], y: &[f64], w: Option<&[f64]>) -> Result<(f64, f64)> {
    let wi = |i: usize| w.map_or(1.0, |w| w[i]);
    let sw = sum((0..t.len()).map(wi));
    let tm = sum((0..t.len()).map(|i| wi(i) * t[i])) / sw;
    let ym = sum((0..t.len()).map(|i| wi(i) * y[i])) / sw;
    let stt = sum((0..t.len()).map(|i| wi(i) * (t[i] - tm) * (t[i] - tm)));
    if !(stt > 0.0) {
        return Err(Error::DegeneratePredictor);
    }
    let sty = sum((0..t.len()).map(|i| wi(i) * (t[i] - tm) * (y[i] - ym)));
    let beta = sty / stt;
    Ok((ym - beta * tm, beta))
}

fn correlation(t: &[f64], y: &[f64]) -> f64 {
    let (tm, ym) = (mean(t).unwrap_or(0.0), mean(y).unwrap_or(0.0));
    let stt = sum(t.iter().map(|a| (a - tm) * (a - tm)));
    let syy = sum(y.iter().map(|b| (b - ym) * (b - ym)));
    if stt == 0.0 || syy == 0.0 {
        return 0.0;
    }
    let sty = sum(t.iter().zip(y).map(|(a, b)| (a - tm) * (b - ym)));
    (sty / (stt.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// 1 − SSE/SST; 1 when SST = 0 (every log y equal and fitted exactly).
fn r_squared(t: &[f64], y: &[f64], alpha: f64, beta: f64) -> f64 {
    let ym = mean(y).unwrap_or(0.0);
    let sst: KahanSum = y.iter().map(|b| (b - ym) * (b - ym)).collect();
    let sse: KahanSum = t
        .iter()
        .zip(y)
        .map(|(a, b)| (b - alpha - beta * a).powi(2))
        .collect();
    if sst.value() == 0.0 {
        return 1.0;
    }
    (1.0 - sse.value() / sst.value()).min(1.0)
}

pub fn fit_log_power(xs: &[f64], ys: &[f64], k: f64) -> Result<FitResult> {
    fit_with(xs, ys, FitOptions::new(k))
}

pub fn fit_robust_log_power(xs: &[f64], ys: &[f64], k: f64) -> Result<FitResult> {
    fit_with(
        xs,
        ys,
        FitOptions {
            robust: true,
            ..FitOptions::new(k)
        },
    )
}

pub fn fit_with(xs: &[f64], ys: &[f64], opts: FitOptions) -> Result<FitResult> {
    let p = prepare(xs, ys, opts.k, opts.plus_one)?;
    let (mut alpha, mut beta) = wls(&p.t, &p.log_y, None)?;
    let mut converged = true;
    if opts.robust {
        (alpha, beta, converged) = huber(&p.t, &p.log_y, alpha, beta)?;
    }
    Ok(FitResult {
        alpha,
        beta,
        k: opts.k,
        r: correlation(&p.t, &p.log_y),
        r_squared: (!opts.robust).then(|| r_squared(&p.t, &p.log_y, alpha, beta)),
        n: p.t.len(),
        robust: opts.robust,
        converged,
        excluded_zero_pairs: p.excluded,
        plus_one: opts.plus_one,
    })
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Huber M-estimate by IRLS starting from the OLS line. Scale is the
/// normalized MAD of the current residuals.
fn huber(t: &[f64], y: &[f64], mut alpha: f64, mut beta: f64) -> Result<(f64, f64, bool)> {
    let y_scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut w = vec![1.0; t.len()];
    for _ in 0..IRLS_MAX_ITER {
        let res: Vec<f64> = t.iter().zip(y).map(|(a, b)| b - alpha - beta * a).collect();
        let mut dev = res.clone();
        let center = median(&mut dev);
        for d in dev.iter_mut() {
            *d = (*d - center).abs();
        }
        let s = median(&mut dev) / MAD_NORMAL;
        // The line already passes through more than half the points.
        if s <= 1e-14 * y_scale {
            return Ok((alpha, beta, true));
        }
        for (wi, r) in w.iter_mut().zip(&res) {
            let u = (r / s).abs();
            *wi = if u <= HUBER_C { 1.0 } else { HUBER_C / u };
        }
        let (a, b) = wls(t, y, Some(&w))?;
        let change = (a - alpha).abs().max((b - beta).abs());
        (alpha, beta) = (a, b);
        if change < IRLS_TOL {
            return Ok((alpha, beta, true));
        }
    }
    Ok((alpha, beta, false))
}

/// exp(α + β·(log x)^k), minus the +1 offset when the fit used one.
pub fn predict(fit: &FitResult, x: f64) -> f64 {
    let y = fit.fitted_log(x).exp();
    if fit.plus_one {
        y - 1.0
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (1..=20).map(|i| i as f64 * 3.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 + x.ln()).exp()).collect();
        let f = fit_log_power(&xs, &ys, 1.0).unwrap();
        assert!((f.alpha - 2.0).abs() < 1e-12 && (f.beta - 1.0).abs() < 1e-12);
        assert!((f.r_squared.unwrap() - 1.0).abs() < 1e-12);
        assert!((f.r - 1.0).abs() < 1e-12);
        assert_eq!(f.space().to_string(), "log-log");
    }

    #[test]
    fn three_hand_points() {
        let xs = [E, E * E, E.powi(3)];
        let ys = [E, E.powi(3), E.powi(4)];
        let f = fit_log_power(&xs, &ys, 1.0).unwrap();
        assert!((f.beta - 1.5).abs() < 1e-12);
        assert!((f.alpha + 1.0 / 3.0).abs() < 1e-12);
        // SSE = 1/6, SST = 14/3
        assert!((f.r_squared.unwrap() - 27.0 / 28.0).abs() < 1e-12);
        assert!((f.r - 3.0 / (28.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_pairs_and_errors() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [5.0, 0.0, 2.0, 3.0, 4.0];
        let f = fit_log_power(&xs, &ys, 1.0).unwrap();
        assert_eq!((f.n, f.excluded_zero_pairs), (3, 2));
        let g = fit_with(
            &xs,
            &ys,
            FitOptions {
                plus_one: true,
                ..FitOptions::new(1.0)
            },
        )
        .unwrap();
        assert_eq!((g.n, g.excluded_zero_pairs), (5, 0));
        assert!(matches!(
            fit_log_power(&[1.0, 2.0], &[1.0, 2.0], 1.0),
            Err(Error::InsufficientData { usable: 2, .. })
        ));
        assert!(matches!(
            fit_log_power(&[3.0; 4], &[1.0, 2.0, 3.0, 4.0], 1.0),
            Err(Error::DegeneratePredictor)
        ));
        assert!(fit_log_power(&[1.0, 2.0, 3.0], &[1.0, 2.0], 1.0).is_err());
        assert!(fit_log_power(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 0.5).is_err());
    }

    #[test]
    fn space_labels() {
        assert_eq!(SpaceLabel(1.2).to_string(), "log-log^1.2");
        assert_eq!(SpaceLabel(2.0).to_string(), "log-log^2");
    }

    #[test]
    fn published_predictions() {
        let fit = |alpha, beta, k| FitResult {
            alpha,
            beta,
            k,
            r: 0.0,
            r_squared: None,
            n: 0,
            robust: false,
            converged: true,
            excluded_zero_pairs: 0,
            plus_one: false,
        };
        let close = |got: f64, want: f64, tol: f64| (got - want).abs() <= tol * want;
        assert!(close(
            predict(&fit(3.5549, 1.0939, 1.0), 10.0),
            434.0,
            0.005
        ));
        assert!(close(
            predict(&fit(1.0949, 1.1055, 1.0), 100.0),
            486.0,
            0.005
        ));
        assert!(close(predict(&fit(0.14, 0.083, 2.0), 1000.0), 60.4, 0.02));
    }

    #[test]
    fn robust_equals_ols_on_clean_line() {
        let xs: Vec<f64> = (1..=30).map(|i| (i * i) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (0.7 + 1.2 * x.ln()).exp()).collect();
        let o = fit_log_power(&xs, &ys, 1.0).unwrap();
        let r = fit_robust_log_power(&xs, &ys, 1.0).unwrap();
        assert!(r.converged && r.robust && r.r_squared.is_none());
        assert!((o.alpha - r.alpha).abs() < 1e-6 && (o.beta - r.beta).abs() < 1e-6);
    }

    #[test]
    fn robust_resists_outliers() {
        let xs: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let mut ys: Vec<f64> = xs.iter().map(|x| (1.0 + 1.1 * x.ln()).exp()).collect();
        for i in (0..100).step_by(20) {
            ys[i + 19] *= 100.0;
        }
        let o = fit_log_power(&xs, &ys, 1.0).unwrap();
        let r = fit_robust_log_power(&xs, &ys, 1.0).unwrap();
        assert!((r.beta - 1.1).abs() < (o.beta - 1.1).abs());
    }
}
