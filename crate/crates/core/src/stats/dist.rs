//! Normal and Student-t distribution functions.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

// Acklam's rational approximation (relative error 1.15e-9 before refinement).
// Coefficients are kept exactly as published.
#[allow(clippy::excessive_precision)]
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
#[allow(clippy::excessive_precision)]
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
#[allow(clippy::excessive_precision)]
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
#[allow(clippy::excessive_precision)]
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

fn tail_approx(q: f64) -> f64 {
    (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
        / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
}

/// Φ⁻¹(p) for p in (0, 1): rational approximation plus one Halley step.
pub fn inverse_normal_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "inverse normal CDF needs p in (0, 1), got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let x = if p < P_LOW {
        tail_approx((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail_approx((-2.0 * (1.0 - p).ln()).sqrt())
    };
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    Ok(x - u / (1.0 + 0.5 * x * u))
}

const CF_EPS: f64 = 1e-16;
const CF_MAX_ITER: usize = 10_000;
const FPMIN: f64 = 1e-300;

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let tiny = |v: f64| if v.abs() < FPMIN { FPMIN } else { v };
    let mut c = 1.0;
    let mut d = 1.0 / tiny(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / tiny(1.0 + aa * d);
        c = tiny(1.0 + aa / c);
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / tiny(1.0 + aa * d);
        c = tiny(1.0 + aa / c);
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b), with `y = 1 − x` supplied by the
/// caller so it can be computed without cancellation.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front =
        libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b) + a * x.ln() + b * y.ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, y) / b
    }
}

/// P(T ≤ t) for Student's t with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) || t.is_nan() {
        return Err(Error::Domain(format!(
            "Student-t CDF needs df > 0, got t={t}, df={df}"
        )));
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let t2 = t * t;
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    let tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x, y);
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

/// Two-sided tail probability P(|T| ≥ |t|).
pub fn student_t_two_sided(t: f64, df: f64) -> Result<f64> {
    Ok((2.0 * student_t_cdf(-t.abs(), df)?).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_points() {
        assert_eq!(inverse_normal_cdf(0.5).unwrap(), 0.0);
        assert_eq!(student_t_cdf(0.0, 3.0).unwrap(), 0.5);
        assert_eq!(student_t_cdf(0.0, 1e6).unwrap(), 0.5);
    }

    #[test]
    fn known_quantiles() {
        assert!((inverse_normal_cdf(0.975).unwrap() - 1.959963984540054).abs() < 1e-12);
        assert!((inverse_normal_cdf(0.025).unwrap() + 1.959963984540054).abs() < 1e-12);
        // Cauchy: F(t) = 1/2 + atan(t)/π
        for t in [-7.0f64, -1.0, 0.3, 2.0, 40.0] {
            let exact = 0.5 + f64::atan(t) / PI;
            assert!((student_t_cdf(t, 1.0).unwrap() - exact).abs() < 1e-13);
        }
        // df = 2: F(t) = 1/2 + t / (2 sqrt(2 + t²))
        for t in [-3.0f64, -0.5, 1.5, 9.0] {
            let exact = 0.5 + t / (2.0 * (2.0 + t * t).sqrt());
            assert!((student_t_cdf(t, 2.0).unwrap() - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(inverse_normal_cdf(0.0).is_err());
        assert!(inverse_normal_cdf(1.0).is_err());
        assert!(inverse_normal_cdf(f64::NAN).is_err());
        assert!(student_t_cdf(1.0, 0.0).is_err());
    }

    #[test]
    fn t_approaches_normal() {
        for t in [-3.0, -1.0, 0.5, 2.5] {
            let d = (student_t_cdf(t, 1e6).unwrap() - normal_cdf(t)).abs();
            assert!(d < 1e-6, "t={t}: {d}");
        }
    }

    #[test]
    fn inverse_round_trips() {
        for i in 1..200 {
            let p = i as f64 / 200.0;
            let z = inverse_normal_cdf(p).unwrap();
            assert!((normal_cdf(z) - p).abs() < 1e-14);
        }
    }
}
