//! Size-normalized ratios num / den^β and checks that they no longer track size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{check_metric_name, ProjectMetrics};
use crate::stats::correlation::{pearson, spearman};
use crate::stats::summation::{mean, sample_variance};

/// Below this |Pearson r| (log space) a normalized metric counts as decorrelated.
pub const DECORRELATION_THRESHOLD: f64 = 0.05;
pub const MIN_DECORRELATION_PROJECTS: usize = 10;

pub fn beta_normalize(numerator: f64, denominator: f64, beta: f64) -> Result<f64> {
    if !(denominator > 0.0) || !beta.is_finite() || !numerator.is_finite() {
        return Err(Error::Domain(format!(
            "cannot normalize {numerator} / {denominator}^{beta}"
        )));
    }
    Ok(numerator / denominator.powf(beta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedRow {
    pub project_id: String,
    pub raw_ratio: f64,
    pub beta: f64,
    pub normalized_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedMetric {
    pub numerator: String,
    pub denominator: String,
    pub beta: f64,
    pub rows: Vec<NormalizedRow>,
    /// Projects with a zero denominator.
    pub excluded: usize,
}

pub fn normalize_corpus(
    corpus: &[ProjectMetrics],
    numerator: &str,
    denominator: &str,
    beta: f64,
) -> Result<NormalizedMetric> {
    check_metric_name(numerator)?;
    check_metric_name(denominator)?;
    let mut rows = Vec::with_capacity(corpus.len());
    let mut excluded = 0;
    for p in corpus {
        let (n, d) = (p.get(numerator)? as f64, p.get(denominator)? as f64);
        if d == 0.0 {
            excluded += 1;
            continue;
        }
        rows.push(NormalizedRow {
            project_id: p.project_id.clone(),
            raw_ratio: n / d,
            beta,
            normalized_value: beta_normalize(n, d, beta)?,
        });
    }
    rows.sort_by(|a, b| a.project_id.cmp(&b.project_id));
    Ok(NormalizedMetric {
        numerator: numerator.to_string(),
        denominator: denominator.to_string(),
        beta,
        rows,
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecorrelationReport {
    pub beta: f64,
    /// Pearson r of log(normalized value) against log(denominator).
    pub pearson_log: f64,
    pub spearman: f64,
    pub decorrelated: bool,
    pub n: usize,
    /// Projects with a zero numerator or denominator.
    pub excluded: usize,
}

pub fn decorrelation_report(
    corpus: &[ProjectMetrics],
    numerator: &str,
    denominator: &str,
    beta: f64,
) -> Result<DecorrelationReport> {
    check_metric_name(numerator)?;
    check_metric_name(denominator)?;
    let mut log_den = Vec::with_capacity(corpus.len());
    let mut log_val = Vec::with_capacity(corpus.len());
    let mut excluded = 0;
    for p in corpus {
        let (n, d) = (p.get(numerator)? as f64, p.get(denominator)? as f64);
        if n == 0.0 || d == 0.0 {
            excluded += 1;
            continue;
        }
        log_den.push(d.ln());
        log_val.push(beta_normalize(n, d, beta)?.ln());
    }
    if log_val.len() < MIN_DECORRELATION_PROJECTS {
        return Err(Error::InsufficientData {
            usable: log_val.len(),
            required: MIN_DECORRELATION_PROJECTS,
        });
    }
    // n = c·d^β up to rounding leaves only floating-point noise in log_val.
    let lo = log_val.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = log_val.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-9 * (1.0 + lo.abs().max(hi.abs())) {
        return Err(Error::UndefinedCorrelation);
    }
    let r = pearson(&log_val, &log_den)?;
    Ok(DecorrelationReport {
        beta,
        pearson_log: r,
        spearman: spearman(&log_val, &log_den)?,
        decorrelated: r.abs() < DECORRELATION_THRESHOLD,
        n: log_val.len(),
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WmcSummary {
    pub n: usize,
    pub mean_linear: f64,
    pub mean_log: f64,
    pub sd_log: f64,
    pub linear_of_mean_log: f64,
    pub one_sd_interval: (f64, f64),
}

/// Summary of positive per-project WMC values.
pub fn wmc_summary_values(wmc: &[f64]) -> Result<WmcSummary> {
    if let Some(v) = wmc.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Domain(format!(
            "WMC values must be positive, got {v}"
        )));
    }
    let logs: Vec<f64> = wmc.iter().map(|v| v.ln()).collect();
    let mean_log = mean(&logs).ok_or(Error::InsufficientData {
        usable: 0,
        required: 1,
    })?;
    let sd_log = sample_variance(&logs).sqrt();
    Ok(WmcSummary {
        n: wmc.len(),
        mean_linear: mean(wmc).unwrap_or(0.0),
        mean_log,
        sd_log,
        linear_of_mean_log: mean_log.exp(),
        one_sd_interval: ((mean_log - sd_log).exp(), (mean_log + sd_log).exp()),
    })
}

/// WMC = methods / classes with unit method weights. Projects without
/// classes or methods have no log-space WMC and are skipped.
pub fn wmc_summary(corpus: &[ProjectMetrics]) -> Result<WmcSummary> {
    let wmc: Vec<f64> = corpus
        .iter()
        .filter(|p| p.classes > 0 && p.methods > 0)
        .map(|p| p.methods as f64 / p.classes as f64)
        .collect();
    wmc_summary_values(&wmc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn project(id: usize, classes: u64, methods: u64) -> ProjectMetrics {
        let mut p = ProjectMetrics::zero(format!("p{id:03}"));
        p.classes = classes;
        p.modules = classes;
        p.methods = methods;
        p
    }

    #[test]
    fn normalize_examples() {
        assert!((beta_normalize(486.0, 100.0, 1.0).unwrap() - 4.86).abs() < 1e-12);
        let c = 1.0949f64.exp();
        assert!((beta_normalize(486.0, 100.0, 1.1055).unwrap() - c).abs() < 0.01);
        assert!((beta_normalize(38.0, 10.0, 1.1055).unwrap() - c).abs() < 0.01);
        assert!(beta_normalize(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn exact_model_is_constant_and_undefined() {
        let corpus: Vec<_> = (1..=20u64)
            .map(|i| {
                let classes = i * i;
                project(i as usize, classes, 0)
            })
            .collect();
        // methods = 3·classes²: normalization with β = 2 is exactly 3
        let corpus: Vec<_> = corpus
            .into_iter()
            .map(|mut p| {
                p.methods = 3 * p.classes * p.classes;
                p
            })
            .collect();
        let t = normalize_corpus(&corpus, "methods", "classes", 2.0).unwrap();
        assert!(t
            .rows
            .iter()
            .all(|r| (r.normalized_value - 3.0).abs() < 1e-12));
        assert!(matches!(
            decorrelation_report(&corpus, "methods", "classes", 2.0),
            Err(Error::UndefinedCorrelation)
        ));
        let r = decorrelation_report(&corpus, "methods", "classes", 1.0).unwrap();
        assert!((r.pearson_log - 1.0).abs() < 1e-12 && !r.decorrelated);
    }

    #[test]
    fn too_few_projects() {
        let corpus: Vec<_> = (1..5).map(|i| project(i, i as u64, 2 * i as u64)).collect();
        assert!(matches!(
            decorrelation_report(&corpus, "methods", "classes", 1.0),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn wmc_examples() {
        let s = wmc_summary_values(&[4.28; 5]).unwrap();
        assert!((s.mean_linear - 4.28).abs() < 1e-12);
        assert_eq!(s.sd_log, 0.0);
        let s = wmc_summary(&[project(0, 1, 2), project(1, 1, 8), project(2, 0, 5)]).unwrap();
        assert_eq!(s.n, 2);
        assert!((s.mean_log - 4f64.ln()).abs() < 1e-15);
        assert!((s.linear_of_mean_log - 4.0).abs() < 1e-12);
        assert_eq!(s.mean_linear, 5.0);
    }

    proptest! {
        #[test]
        fn beta_one_is_plain_ratio(n in 0u32..100_000, d in 1u32..100_000) {
            prop_assert_eq!(beta_normalize(n as f64, d as f64, 1.0).unwrap(), n as f64 / d as f64);
        }

        #[test]
        fn am_gm(v in proptest::collection::vec(0.01f64..100.0, 1..50)) {
            let s = wmc_summary_values(&v).unwrap();
            prop_assert!(s.mean_linear >= s.linear_of_mean_log * (1.0 - 1e-12));
            if s.sd_log > 1e-6 {
                prop_assert!(s.mean_linear > s.linear_of_mean_log);
            }
        }
    }
}
