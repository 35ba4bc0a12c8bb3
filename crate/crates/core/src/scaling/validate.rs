//! Out-of-sample validation: NRMSE, size subsets and the model grid.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_with, prepare, FitOptions, FitResult};
use crate::error::{Error, Result};
use crate::metrics::{check_metric_name, ProjectMetrics};
use crate::stats::summation::sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalSpace {
    #[default]
    Log,
    Linear,
}

/// RMSE(predicted − actual) / (max actual − min actual).
pub fn nrmse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    if actual.len() < 2 {
        return Err(Error::InsufficientData {
            usable: actual.len(),
            required: 2,
        });
    }
    let lo = actual.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = actual.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::UndefinedNormalization);
    }
    let mse =
        sum(predicted.iter().zip(actual).map(|(p, a)| (p - a) * (p - a))) / actual.len() as f64;
    Ok(mse.sqrt() / (hi - lo))
}

/// NRMSE of `fit` on a test set. Pairs the fit could not have used
/// (non-positive after its offset) are dropped first.
pub fn evaluate_nrmse(
    fit: &FitResult,
    test_xs: &[f64],
    test_ys: &[f64],
    space: EvalSpace,
) -> Result<f64> {
    let (pred, actual) = eval_series(fit, test_xs, test_ys, space)?;
    nrmse(&pred, &actual)
}

fn eval_series(
    fit: &FitResult,
    xs: &[f64],
    ys: &[f64],
    space: EvalSpace,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = match prepare(xs, ys, fit.k, fit.plus_one) {
        Ok(p) => p,
        // A test set may legitimately be narrow or tiny; it only needs two points.
        Err(Error::InsufficientData { .. } | Error::DegeneratePredictor) => {
            prepare_loose(xs, ys, fit)?
        }
        Err(e) => return Err(e),
    };
    let pred_log = p.t.iter().map(|t| fit.alpha + fit.beta * t);
    Ok(match space {
        EvalSpace::Log => (pred_log.collect(), p.log_y),
        EvalSpace::Linear => {
            let shift = if fit.plus_one { 1.0 } else { 0.0 };
            (
                pred_log.map(|v| v.exp() - shift).collect(),
                p.kept.iter().map(|&i| ys[i]).collect(),
            )
        }
    })
}

fn prepare_loose(xs: &[f64], ys: &[f64], fit: &FitResult) -> Result<super::fit::Prepared> {
    let shift = if fit.plus_one { 1.0 } else { 0.0 };
    let mut p = super::fit::Prepared {
        t: vec![],
        log_y: vec![],
        kept: vec![],
        excluded: 0,
    };
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if x + shift > 0.0 && y + shift > 0.0 {
            p.t.push(fit.transform(x));
            p.log_y.push((y + shift).ln());
            p.kept.push(i);
        } else {
            p.excluded += 1;
        }
    }
    Ok(p)
}

/// `[low, high)`; `high` may be infinite.
pub fn filter_by_size(
    corpus: &[ProjectMetrics],
    metric: &str,
    low: f64,
    high: f64,
) -> Result<Vec<ProjectMetrics>> {
    check_metric_name(metric)?;
    if !(low < high) {
        return Err(Error::EmptyRange { low, high });
    }
    let mut out = Vec::new();
    for p in corpus {
        let v = p.get(metric)? as f64;
        if v >= low && v < high {
            out.push(p.clone());
        }
    }
    Ok(out)
}

pub fn metric_series(corpus: &[ProjectMetrics], metric: &str) -> Result<Vec<f64>> {
    corpus
        .iter()
        .map(|p| p.get(metric).map(|v| v as f64))
        .collect()
}

/// `[low, high)` on a size metric; `None` is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeRange {
    pub metric: String,
    #[serde(default)]
    pub low: Option<f64>,
    #[serde(default)]
    pub high: Option<f64>,
}

impl SizeRange {
    pub fn new(metric: &str, low: Option<f64>, high: Option<f64>) -> Self {
        SizeRange {
            metric: metric.to_string(),
            low,
            high,
        }
    }

    pub fn apply(&self, corpus: &[ProjectMetrics]) -> Result<Vec<ProjectMetrics>> {
        filter_by_size(
            corpus,
            &self.metric,
            self.low.unwrap_or(f64::NEG_INFINITY),
            self.high.unwrap_or(f64::INFINITY),
        )
    }

    pub fn label(&self) -> String {
        match (self.low, self.high) {
            (None, None) => "all".into(),
            (Some(l), None) => format!("{} >= {l}", self.metric),
            (None, Some(h)) => format!("{} < {h}", self.metric),
            (Some(l), Some(h)) => format!("{l} <= {} < {h}", self.metric),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub id: String,
    pub y: String,
    pub x: String,
    #[serde(default = "one")]
    pub k: f64,
    /// Training subset; `None` trains on the whole corpus.
    #[serde(default)]
    pub subset: Option<SizeRange>,
    #[serde(default)]
    pub robust: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSet {
    pub name: String,
    pub range: SizeRange,
}

/// Eight Methods-vs-Classes models: the whole corpus, then training ranges
/// 10–3000, 20–3000, 30–3000, 50–1000, 100–500, 10–100 and 1000–3000 classes,
/// both ends inclusive (stored as `[lo, hi + 1)`).
pub fn default_model_grid() -> Vec<ModelSpec> {
    let ranges: [Option<(f64, f64)>; 8] = [
        None,
        Some((10.0, 3000.0)),
        Some((20.0, 3000.0)),
        Some((30.0, 3000.0)),
        Some((50.0, 1000.0)),
        Some((100.0, 500.0)),
        Some((10.0, 100.0)),
        Some((1000.0, 3000.0)),
    ];
    ranges
        .iter()
        .enumerate()
        .map(|(i, r)| ModelSpec {
            id: (i + 1).to_string(),
            y: "methods".into(),
            x: "classes".into(),
            k: 1.0,
            subset: r.map(|(lo, hi)| SizeRange::new("classes", Some(lo), Some(hi + 1.0))),
            robust: false,
        })
        .collect()
}

/// Very small (< 10 classes), very large (> 3000 classes) and everything.
pub fn default_test_sets() -> Vec<TestSet> {
    vec![
        TestSet {
            name: "V.Small".into(),
            range: SizeRange::new("classes", None, Some(10.0)),
        },
        TestSet {
            name: "V.Large".into(),
            range: SizeRange::new("classes", Some(3001.0), None),
        },
        TestSet {
            name: "All".into(),
            range: SizeRange::new("classes", None, None),
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelEval {
    pub model_id: String,
    pub subset_rule: String,
    /// Projects in the training subset, before zero-pair exclusion.
    pub subset_projects: usize,
    pub fit: std::result::Result<FitResult, String>,
    /// Absent entries are test sets where NRMSE was undefined.
    pub nrmse_per_testset: BTreeMap<String, f64>,
}

pub fn check_model(spec: &ModelSpec) -> Result<()> {
    check_metric_name(&spec.x)?;
    check_metric_name(&spec.y)?;
    if let Some(s) = &spec.subset {
        check_metric_name(&s.metric)?;
    }
    Ok(())
}

/// Fit every model and score it on every test set. Cells run in parallel;
/// output order follows `grid`.
pub fn evaluate_grid(
    corpus: &[ProjectMetrics],
    grid: &[ModelSpec],
    test_sets: &[TestSet],
    space: EvalSpace,
    plus_one: bool,
) -> Result<Vec<ModelEval>> {
    for m in grid {
        check_model(m)?;
    }
    let tests = test_sets
        .iter()
        .map(|t| Ok((t.name.clone(), t.range.apply(corpus)?)))
        .collect::<Result<Vec<_>>>()?;
    grid.par_iter()
        .map(|m| {
            let train = match &m.subset {
                Some(s) => s.apply(corpus)?,
                None => corpus.to_vec(),
            };
            let opts = FitOptions {
                k: m.k,
                robust: m.robust,
                plus_one,
            };
            let fit = fit_with(
                &metric_series(&train, &m.x)?,
                &metric_series(&train, &m.y)?,
                opts,
            );
            let mut scores = BTreeMap::new();
            if let Ok(f) = &fit {
                for (name, set) in &tests {
                    let xs = metric_series(set, &m.x)?;
                    let ys = metric_series(set, &m.y)?;
                    match evaluate_nrmse(f, &xs, &ys, space) {
                        Ok(v) => {
                            scores.insert(name.clone(), v);
                        }
                        Err(Error::InsufficientData { .. } | Error::UndefinedNormalization) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(ModelEval {
                model_id: m.id.clone(),
                subset_rule: m
                    .subset
                    .as_ref()
                    .map_or_else(|| "all".into(), SizeRange::label),
                subset_projects: train.len(),
                fit: fit.map_err(|e| e.to_string()),
                nrmse_per_testset: scores,
            })
        })
        .collect()
}
