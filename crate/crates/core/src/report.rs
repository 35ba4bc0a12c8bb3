//! Stored result tables of a run and the text renderings built from them.
//!
//! Text output is rendered only from the stored tables, so every printed
//! number can be traced to a row on disk.

use std::fs::File;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::{FitResult, SpaceLabel};
use crate::table::read_metrics_table;

pub const EXTRACTION_CSV: &str = "extraction.csv";
pub const METRICS_CSV: &str = "metrics.csv";
pub const FITS_CSV: &str = "fits.csv";
pub const FITS_TXT: &str = "fits.txt";
pub const NRMSE_CSV: &str = "nrmse.csv";
pub const BINS_CSV: &str = "bins.csv";
pub const WELCH_CSV: &str = "welch.csv";
pub const NORMALIZED_CSV: &str = "normalized.csv";
pub const DECORRELATION_CSV: &str = "decorrelation.csv";
pub const WMC_CSV: &str = "wmc.csv";
pub const REPORT_TXT: &str = "report.txt";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRow {
    pub project_id: String,
    pub files: usize,
    pub sloc: u64,
    pub entities: usize,
    pub relations: usize,
    pub warnings: usize,
    pub used_modules: u64,
    pub used_unresolved: u64,
}

/// One model-grid cell. Parameter columns are empty when the fit failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub model_id: String,
    pub analysis: String,
    pub subset: String,
    pub subset_projects: usize,
    pub n: Option<usize>,
    pub excluded_zero_pairs: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub k: f64,
    pub r: Option<f64>,
    pub r_squared: Option<f64>,
    pub robust: bool,
    pub converged: Option<bool>,
    pub space: String,
    pub error: Option<String>,
}

impl FitRow {
    pub fn from_fit(
        model_id: &str,
        analysis: &str,
        subset: &str,
        subset_projects: usize,
        fit: &FitResult,
    ) -> Self {
        FitRow {
            model_id: model_id.to_string(),
            analysis: analysis.to_string(),
            subset: subset.to_string(),
            subset_projects,
            n: Some(fit.n),
            excluded_zero_pairs: Some(fit.excluded_zero_pairs),
            alpha: Some(fit.alpha),
            beta: Some(fit.beta),
            k: fit.k,
            r: Some(fit.r),
            r_squared: fit.r_squared,
            robust: fit.robust,
            converged: Some(fit.converged),
            space: fit.space().to_string(),
            error: None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn failed(
        model_id: &str,
        analysis: &str,
        subset: &str,
        subset_projects: usize,
        k: f64,
        robust: bool,
        error: &str,
    ) -> Self {
        FitRow {
            model_id: model_id.to_string(),
            analysis: analysis.to_string(),
            subset: subset.to_string(),
            subset_projects,
            n: None,
            excluded_zero_pairs: None,
            alpha: None,
            beta: None,
            k,
            r: None,
            r_squared: None,
            robust,
            converged: None,
            space: SpaceLabel(k).to_string(),
            error: Some(error.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NrmseRow {
    pub model_id: String,
    pub test_set: String,
    pub test_projects: usize,
    pub nrmse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub bin: String,
    pub range: String,
    pub projects: usize,
    pub excluded_zero_ratio: usize,
    pub mean_log: Option<f64>,
    pub sd_log: Option<f64>,
    pub mean_linear_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelchRow {
    pub a: String,
    pub b: String,
    pub t: Option<f64>,
    pub df: Option<f64>,
    pub p: Option<f64>,
    pub significant_at_95: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecorrelationRow {
    pub numerator: String,
    pub denominator: String,
    pub beta: f64,
    /// `fixed` or `model <id>`.
    pub beta_source: String,
    pub n: Option<usize>,
    pub pearson_log: Option<f64>,
    pub spearman: Option<f64>,
    pub decorrelated: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WmcRow {
    pub n: usize,
    pub mean_linear: f64,
    pub mean_log: f64,
    pub sd_log: f64,
    pub linear_of_mean_log: f64,
    pub interval_low: f64,
    pub interval_high: f64,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(f);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(f)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

fn fixed(v: f64, dp: usize) -> String {
    let s = format!("{v:.dp$}");
    // no "-0.00"
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn opt(v: Option<f64>, dp: usize) -> String {
    v.map_or_else(|| "NA".into(), |v| fixed(v, dp))
}

pub const FIT_TABLE_HEADER: &str = "analysis | α | β | r | R² | space";

/// α and β to 4 dp, r and R² to 2 dp. Robust rows show R² as NA and are
/// tagged (RLM); failed rows show NA throughout.
pub fn render_fit_table(rows: &[FitRow]) -> String {
    let mut out = String::from(FIT_TABLE_HEADER);
    out.push('\n');
    for r in rows {
        let analysis = if r.robust {
            format!("{} (RLM)", r.analysis)
        } else {
            r.analysis.clone()
        };
        out.push_str(&format!(
            "{analysis} | {} | {} | {} | {} | {}\n",
            opt(r.alpha, 4),
            opt(r.beta, 4),
            opt(r.r, 2),
            if r.robust {
                "NA".into()
            } else {
                opt(r.r_squared, 2)
            },
            r.space
        ));
    }
    out
}

/// Fit table for bare fits labelled by analysis name.
pub fn render_fits(fits: &[(String, FitResult)]) -> String {
    let rows: Vec<FitRow> = fits
        .iter()
        .map(|(a, f)| FitRow::from_fit("", a, "all", f.n, f))
        .collect();
    render_fit_table(&rows)
}

fn section(out: &mut String, title: &str) {
    out.push_str(&format!("\n== {title} ==\n"));
}

/// Plain-text report of a run directory, built from its stored tables.
pub fn render_report(run_dir: &Path) -> Result<String> {
    let metrics = read_metrics_table(&run_dir.join(METRICS_CSV))?;
    let mut out = String::from("scaling-law analysis report\n");

    section(&mut out, "corpus");
    out.push_str(&format!("projects: {}\n", metrics.len()));
    out.push_str(&format!(
        "total sloc: {}\n",
        metrics.iter().map(|m| m.sloc).sum::<u64>()
    ));
    out.push_str(&format!(
        "total classes: {}\n",
        metrics.iter().map(|m| m.classes).sum::<u64>()
    ));
    out.push_str(&format!(
        "total interfaces: {}\n",
        metrics.iter().map(|m| m.interfaces).sum::<u64>()
    ));
    let extraction = run_dir.join(EXTRACTION_CSV);
    if extraction.exists() {
        let rows: Vec<ExtractionRow> = read_csv(&extraction)?;
        let used: u64 = rows.iter().map(|r| r.used_modules).sum();
        let unresolved: u64 = rows.iter().map(|r| r.used_unresolved).sum();
        out.push_str(&format!(
            "source files: {}\n",
            rows.iter().map(|r| r.files).sum::<usize>()
        ));
        out.push_str(&format!(
            "extraction warnings: {}\n",
            rows.iter().map(|r| r.warnings).sum::<usize>()
        ));
        let frac = if used == 0 {
            0.0
        } else {
            unresolved as f64 / used as f64
        };
        out.push_str(&format!(
            "unresolved used modules: {unresolved} of {used} ({}%)\n",
            fixed(100.0 * frac, 1)
        ));
    }

    section(&mut out, "model grid fits");
    let fits: Vec<FitRow> = read_csv(&run_dir.join(FITS_CSV))?;
    out.push_str(&render_fit_table(&fits));
    out.push_str("\nmodel | subset | projects | n | excluded zero pairs | note\n");
    for f in &fits {
        out.push_str(&format!(
            "{} | {} | {} | {} | {} | {}\n",
            f.model_id,
            f.subset,
            f.subset_projects,
            f.n.map_or("NA".into(), |n| n.to_string()),
            f.excluded_zero_pairs.map_or("NA".into(), |n| n.to_string()),
            match (&f.error, f.converged) {
                (Some(e), _) => e.clone(),
                (None, Some(false)) => "not converged".into(),
                _ => "".into(),
            }
        ));
    }

    section(&mut out, "NRMSE");
    let nrmse: Vec<NrmseRow> = read_csv(&run_dir.join(NRMSE_CSV))?;
    let mut sets: Vec<(String, usize)> = Vec::new();
    for r in &nrmse {
        if !sets.iter().any(|s| s.0 == r.test_set) {
            sets.push((r.test_set.clone(), r.test_projects));
        }
    }
    out.push_str("model");
    for (name, n) in &sets {
        out.push_str(&format!(" | {name} ({n})"));
    }
    out.push('\n');
    for f in &fits {
        out.push_str(&f.model_id);
        for (name, _) in &sets {
            let v = nrmse
                .iter()
                .find(|r| r.model_id == f.model_id && &r.test_set == name)
                .and_then(|r| r.nrmse);
            out.push_str(&format!(" | {}", opt(v, 5)));
        }
        out.push('\n');
    }

    section(&mut out, "bins");
    let bins: Vec<BinRow> = read_csv(&run_dir.join(BINS_CSV))?;
    out.push_str("bin | range | projects | mean (linear %) | SD\n");
    for b in &bins {
        out.push_str(&format!(
            "{} | {} | {} | {} ({}) | {}\n",
            b.bin,
            b.range,
            b.projects,
            opt(b.mean_log, 2),
            opt(b.mean_linear_pct, 1),
            opt(b.sd_log, 2)
        ));
    }
    let welch: Vec<WelchRow> = read_csv(&run_dir.join(WELCH_CSV))?;
    out.push_str("\nWelch t-test p-values\n");
    for w in &welch {
        out.push_str(&format!(
            "{} vs {} | t = {} | df = {} | p = {}{}\n",
            w.a,
            w.b,
            opt(w.t, 3),
            opt(w.df, 1),
            w.p.map_or_else(|| "NA".into(), |p| format!("{p:.4e}")),
            if w.significant_at_95 == Some(true) {
                " *"
            } else {
                ""
            }
        ));
    }

    section(&mut out, "normalization");
    for d in read_csv::<DecorrelationRow>(&run_dir.join(DECORRELATION_CSV))? {
        out.push_str(&format!(
            "{} / {}^β with β = {} ({})\n",
            d.numerator,
            d.denominator,
            fixed(d.beta, 4),
            d.beta_source
        ));
        match &d.error {
            Some(e) => out.push_str(&format!("decorrelation: NA ({e})\n")),
            None => out.push_str(&format!(
                "pearson (log) = {}, spearman = {}, decorrelated: {}\n",
                opt(d.pearson_log, 4),
                opt(d.spearman, 4),
                if d.decorrelated == Some(true) {
                    "yes"
                } else {
                    "no"
                }
            )),
        }
    }
    for w in read_csv::<WmcRow>(&run_dir.join(WMC_CSV))? {
        out.push_str(&format!(
            "WMC over {} projects: mean {}, log mean {} (sd {}), exp(log mean) {}, one-SD interval [{}, {}]\n",
            w.n,
            fixed(w.mean_linear, 2),
            fixed(w.mean_log, 3),
            fixed(w.sd_log, 2),
            fixed(w.linear_of_mean_log, 2),
            fixed(w.interval_low, 2),
            fixed(w.interval_high, 2)
        ));
    }
    Ok(out)
}
