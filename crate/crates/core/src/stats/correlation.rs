//! Pearson and Spearman correlation.

use std::cmp::Ordering;

use super::summation::{mean, sum};
use crate::error::{Error, Result};

fn check(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData {
            usable: xs.len(),
            required: 3,
        });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "correlation input contains a non-finite value".into(),
        ));
    }
    Ok(())
}

/// Product-moment correlation, clamped to [-1, 1].
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check(xs, ys)?;
    let mx = mean(xs).unwrap_or(0.0);
    let my = mean(ys).unwrap_or(0.0);
    let sxx = sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let syy = sum(ys.iter().map(|y| (y - my) * (y - my)));
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    let sxy = sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check(xs, ys)?;
    pearson(&average_ranks(xs), &average_ranks(ys))
}
