//! Binning a corpus on one metric and summarizing per-bin metric ratios.

use serde::{Deserialize, Serialize};

use super::summation::{mean, sample_variance};
use super::welch::{welch_t_test, WelchResult};
use crate::error::{Error, Result};
use crate::metrics::{check_metric_name, ProjectMetrics};

pub const FIVE_BIN_LABELS: [&str; 5] = ["V. Small", "Small", "Medium", "Large", "V. Large"];
pub const DEFAULT_EDGES: [f64; 4] = [20.0, 100.0, 1000.0, 5000.0];

/// `[low, high)`; `None` is unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub label: String,
    pub low: Option<f64>,
    pub high: Option<f64>,
    pub projects: Vec<ProjectMetrics>,
}

impl Bin {
    pub fn contains(&self, v: f64) -> bool {
        self.low.is_none_or(|l| v >= l) && self.high.is_none_or(|h| v < h)
    }

    pub fn range_label(&self) -> String {
        match (self.low, self.high) {
            (None, Some(h)) => format!("< {h}"),
            (Some(l), Some(h)) => format!("{l} -- {h}"),
            (Some(l), None) => format!(">= {l}"),
            (None, None) => "all".into(),
        }
    }
}

pub fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "bin edges must be finite and strictly ascending: {edges:?}"
        )));
    }
    Ok(())
}

/// `edges.len() + 1` bins; the first and last are open-ended. Four edges get
/// the labels V. Small … V. Large, other counts `bin1`, `bin2`, ….
pub fn bin_by(corpus: &[ProjectMetrics], metric: &str, edges: &[f64]) -> Result<Vec<Bin>> {
    check_metric_name(metric)?;
    check_edges(edges)?;
    let mut bins: Vec<Bin> = (0..=edges.len())
        .map(|i| Bin {
            label: if edges.len() == 4 {
                FIVE_BIN_LABELS[i].to_string()
            } else {
                format!("bin{}", i + 1)
            },
            low: i.checked_sub(1).map(|j| edges[j]),
            high: edges.get(i).copied(),
            projects: Vec::new(),
        })
        .collect();
    for p in corpus {
        let v = p.get(metric)? as f64;
        let i = edges.partition_point(|e| *e <= v);
        bins[i].projects.push(p.clone());
    }
    Ok(bins)
}

/// Space in which per-project ratios are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioSpace {
    #[default]
    Log,
    Linear,
}

/// Ratios of the included projects (numerator and denominator both positive)
/// and the number excluded.
pub fn ratio_samples(
    bin: &Bin,
    numerator: &str,
    denominator: &str,
    space: RatioSpace,
) -> Result<(Vec<f64>, usize)> {
    check_metric_name(numerator)?;
    check_metric_name(denominator)?;
    let mut out = Vec::with_capacity(bin.projects.len());
    let mut excluded = 0;
    for p in &bin.projects {
        let (n, d) = (p.get(numerator)?, p.get(denominator)?);
        if n == 0 || d == 0 {
            excluded += 1;
            continue;
        }
        let r = n as f64 / d as f64;
        out.push(match space {
            RatioSpace::Log => r.ln(),
            RatioSpace::Linear => r,
        });
    }
    Ok((out, excluded))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinSummary {
    pub label: String,
    pub range: String,
    pub project_count: usize,
    pub mean_log: f64,
    /// Sample SD (n − 1); 0 with a single included project.
    pub sd_log: f64,
    pub mean_linear_pct: f64,
    pub excluded_zero_ratio_count: usize,
}

impl BinSummary {
    pub fn included(&self) -> usize {
        self.project_count - self.excluded_zero_ratio_count
    }
}

pub fn log_ratio_summary(bin: &Bin, numerator: &str, denominator: &str) -> Result<BinSummary> {
    let (logs, excluded) = ratio_samples(bin, numerator, denominator, RatioSpace::Log)?;
    summarize_log_ratios(bin, &logs, excluded)
}

fn summarize_log_ratios(bin: &Bin, logs: &[f64], excluded: usize) -> Result<BinSummary> {
    let m = mean(logs).ok_or_else(|| Error::EmptyBin(bin.label.clone()))?;
    Ok(BinSummary {
        label: bin.label.clone(),
        range: bin.range_label(),
        project_count: bin.projects.len(),
        mean_log: m,
        sd_log: sample_variance(logs).sqrt(),
        mean_linear_pct: m.exp() * 100.0,
        excluded_zero_ratio_count: excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WelchCell {
    pub a: String,
    pub b: String,
    /// `None` when either bin has fewer than two included projects.
    pub result: Option<WelchResult>,
}

/// Welch test for every unordered pair of bins (a before b in bin order).
pub fn welch_matrix(
    bins: &[Bin],
    numerator: &str,
    denominator: &str,
    space: RatioSpace,
) -> Result<Vec<WelchCell>> {
    let samples = bins
        .iter()
        .map(|b| ratio_samples(b, numerator, denominator, space).map(|s| s.0))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..bins.len() {
        for j in i + 1..bins.len() {
            let result = match welch_t_test(&samples[i], &samples[j]) {
                Ok(r) => Some(r),
                Err(Error::InsufficientData { .. }) => None,
                Err(e) => return Err(e),
            };
            out.push(WelchCell {
                a: bins[i].label.clone(),
                b: bins[j].label.clone(),
                result,
            });
        }
    }
    Ok(out)
}
