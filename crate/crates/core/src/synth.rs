//! Synthetic corpora with a known log-power law.
//!
//! Random numbers come from SplitMix64 (64-bit state, increment
//! 0x9E3779B97F4A7C15, the standard two-multiply finalizer). Uniforms take
//! the top 53 bits; normals use one Box–Muller draw per pair of uniforms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{check_metric_name, ProjectMetrics};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Uniform in [0, n).
    pub fn next_below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n_projects: usize,
    /// Bounds of the log-uniform x distribution.
    #[serde(default = "default_x_range")]
    pub x_range: (f64, f64),
    pub true_alpha: f64,
    pub true_beta: f64,
    #[serde(default = "one")]
    pub true_k: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    /// Round x and y to non-negative integers (x before computing y).
    #[serde(default = "yes")]
    pub integer: bool,
    #[serde(default = "classes")]
    pub x_metric: String,
    #[serde(default = "methods")]
    pub y_metric: String,
}

fn default_x_range() -> (f64, f64) {
    (1.0, 10_000.0)
}
fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn classes() -> String {
    "classes".into()
}
fn methods() -> String {
    "methods".into()
}

impl SynthSpec {
    /// Methods-vs-Classes law over 1–10,000 classes.
    pub fn methods_vs_classes(n_projects: usize, noise_sigma: f64, seed: u64) -> Self {
        SynthSpec {
            n_projects,
            x_range: (1.0, 10_000.0),
            true_alpha: 1.095,
            true_beta: 1.1055,
            true_k: 1.0,
            noise_sigma,
            seed,
            integer: true,
            x_metric: classes(),
            y_metric: methods(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.x_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Config(format!(
                "x_range must be positive and ordered, got ({lo}, {hi})"
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Config(format!(
                "noise_sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        if !(self.true_k >= 1.0 && self.true_k.is_finite()) {
            return Err(Error::Config(format!(
                "true_k must be >= 1, got {}",
                self.true_k
            )));
        }
        if !(self.true_alpha.is_finite() && self.true_beta.is_finite()) {
            return Err(Error::Config(
                "true_alpha and true_beta must be finite".into(),
            ));
        }
        check_metric_name(&self.x_metric)?;
        check_metric_name(&self.y_metric)?;
        if self.x_metric == self.y_metric {
            return Err(Error::Config("x_metric and y_metric must differ".into()));
        }
        Ok(())
    }

    pub fn curve(&self, x: f64) -> f64 {
        (self.true_alpha + self.true_beta * x.ln().powf(self.true_k)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynthPair {
    pub x: f64,
    pub y: f64,
}

pub fn generate(spec: &SynthSpec) -> Result<Vec<SynthPair>> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let (ln_lo, ln_hi) = (spec.x_range.0.ln(), spec.x_range.1.ln());
    let mut out = Vec::with_capacity(spec.n_projects);
    for _ in 0..spec.n_projects {
        let mut x = (ln_lo + (ln_hi - ln_lo) * rng.next_f64()).exp();
        let eps = spec.noise_sigma * rng.next_normal();
        if spec.integer {
            x = x.round().max(0.0);
        }
        let mut y = if x > 0.0 {
            (spec.true_alpha + spec.true_beta * x.ln().powf(spec.true_k) + eps).exp()
        } else {
            0.0
        };
        if spec.integer {
            y = y.round().max(0.0);
        }
        out.push(SynthPair { x, y });
    }
    Ok(out)
}

/// Multiply y of `ceil(fraction·n)` distinct pairs by `factor`. Returns the
/// chosen indices in ascending order.
pub fn inject_outliers(
    pairs: &mut [SynthPair],
    fraction: f64,
    factor: f64,
    seed: u64,
) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&fraction) || !(factor.is_finite() && factor > 0.0) {
        return Err(Error::Config(format!(
            "bad outlier spec: fraction {fraction}, factor {factor}"
        )));
    }
    let n = pairs.len();
    let m = ((fraction * n as f64).ceil() as usize).min(n);
    let mut rng = SplitMix64::new(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = i + rng.next_below((n - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut chosen = idx[..m].to_vec();
    chosen.sort_unstable();
    for &i in &chosen {
        pairs[i].y *= factor;
    }
    Ok(chosen)
}

/// One metrics row per pair, ids `synth-00000`, …; `modules` follows
/// classes + interfaces unless it is one of the generated columns.
pub fn to_metrics(pairs: &[SynthPair], spec: &SynthSpec) -> Result<Vec<ProjectMetrics>> {
    spec.validate()?;
    let width = pairs.len().saturating_sub(1).to_string().len().max(5);
    pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut m = ProjectMetrics::zero(format!("synth-{i:0width$}"));
            m.set(&spec.x_metric, p.x.round().max(0.0) as u64)?;
            m.set(&spec.y_metric, p.y.round().max(0.0) as u64)?;
            if spec.x_metric != "modules" && spec.y_metric != "modules" {
                m.modules = m.classes + m.interfaces;
            }
            Ok(m)
        })
        .collect()
}
