//! Welch's unequal-variance two-sample t-test.

use serde::Serialize;

use super::dist::student_t_two_sided;
use super::summation::{mean, sample_variance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    /// Two-sided.
    pub p_value: f64,
    pub significant_at_95: bool,
}

/// When both sample variances are zero the statistic is degenerate: equal
/// means give t = 0, p = 1; different means give t = ±∞, p = 0. The pooled
/// df n_a + n_b − 2 is reported in that case.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchResult> {
    let usable = a.len().min(b.len());
    if usable < 2 {
        return Err(Error::InsufficientData {
            usable,
            required: 2,
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "Welch test sample contains a non-finite value".into(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a).unwrap_or(0.0), mean(b).unwrap_or(0.0));
    let va = sample_variance(a) / na;
    let vb = sample_variance(b) / nb;
    let se2 = va + vb;
    let diff = ma - mb;

    let (t, df, p) = if se2 == 0.0 {
        let df = na + nb - 2.0;
        if diff == 0.0 {
            (0.0, df, 1.0)
        } else {
            (f64::INFINITY.copysign(diff), df, 0.0)
        }
    } else {
        let t = diff / se2.sqrt();
        let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
        (t, df, student_t_two_sided(t, df)?)
    };
    Ok(WelchResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: p,
        significant_at_95: p < 0.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn textbook_example() {
        let r = welch_t_test(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!((r.t_statistic + 1.0).abs() < 1e-12);
        assert!((r.degrees_of_freedom - 8.0).abs() < 1e-12);
        // oracle: statrs Student-t with df = 8
        use statrs::distribution::{ContinuousCDF, StudentsT};
        let oracle = 2.0 * StudentsT::new(0.0, 1.0, 8.0).unwrap().cdf(-1.0);
        assert!((r.p_value - oracle).abs() < 1e-10);
        assert!((r.p_value - 0.3466).abs() < 1e-4);
        assert!(!r.significant_at_95);
    }

    #[test]
    fn conventions() {
        let r = welch_t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((r.t_statistic, r.p_value), (0.0, 1.0));
        let r = welch_t_test(&[2.0, 2.0], &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(r.p_value, 1.0);
        let r = welch_t_test(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert_eq!(r.p_value, 0.0);
        assert_eq!(r.t_statistic, f64::NEG_INFINITY);
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn antisymmetry_and_translation(
            a in proptest::collection::vec(-100f64..100.0, 2..20),
            b in proptest::collection::vec(-100f64..100.0, 2..20),
            c in -1e3f64..1e3,
        ) {
            let r = welch_t_test(&a, &b).unwrap();
            let s = welch_t_test(&b, &a).unwrap();
            prop_assert_eq!(r.t_statistic, -s.t_statistic);
            prop_assert_eq!(r.p_value, s.p_value);
            prop_assert!((0.0..=1.0).contains(&r.p_value));
            prop_assert!(r.degrees_of_freedom > 0.0);

            let a2: Vec<f64> = a.iter().map(|x| x + c).collect();
            let b2: Vec<f64> = b.iter().map(|x| x + c).collect();
            let u = welch_t_test(&a2, &b2).unwrap();
            let tol = 1e-6 * (1.0 + r.t_statistic.abs());
            prop_assert!((u.t_statistic - r.t_statistic).abs() < tol);
            prop_assert!((u.degrees_of_freedom - r.degrees_of_freedom).abs() < 1e-6 * r.degrees_of_freedom);
            prop_assert!((u.p_value - r.p_value).abs() < 1e-6);
        }
    }
}
