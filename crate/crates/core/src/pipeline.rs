//! End-to-end run: corpus → facts → metrics → fits, bins, validation,
//! normalization → report bundle with a content-hash manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::extract::{extract_corpus, read_manifest};
use crate::metrics::{
    check_metric_name, compute_metrics, used_modules_by_provenance, MetricsConfig, ProjectMetrics,
};
use crate::normalize::{decorrelation_report, normalize_corpus, wmc_summary, NormalizedMetric};
use crate::report::*;
use crate::scaling::{
    default_model_grid, default_test_sets, diagnostics, evaluate_grid, metric_series, EvalSpace,
    ModelSpec, TestSet,
};
use crate::stats::bins::{
    bin_by, check_edges, log_ratio_summary, welch_matrix, RatioSpace, DEFAULT_EDGES,
};
use crate::store::{write_facts, FactsArchive};
use crate::synth::{generate, to_metrics, SynthSpec};
use crate::table::export_metrics_table;

pub const FACTS_BIN: &str = "facts.bin";
pub const WARNINGS_JSONL: &str = "warnings.jsonl";
pub const DIAGNOSTICS_DIR: &str = "diagnostics";
pub const MANIFEST: &str = "MANIFEST.sha256";
pub const FAILED: &str = "FAILED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinConfig {
    pub metric: String,
    pub edges: Vec<f64>,
    pub numerator: String,
    pub denominator: String,
    pub space: RatioSpace,
}

impl Default for BinConfig {
    fn default() -> Self {
        BinConfig {
            metric: "classes".into(),
            edges: DEFAULT_EDGES.to_vec(),
            numerator: "interfaces".into(),
            denominator: "classes".into(),
            space: RatioSpace::Log,
        }
    }
}

/// Model grid and the held-out test sets it is scored on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub model: Vec<ModelSpec>,
    pub test_set: Vec<TestSet>,
    pub space: EvalSpace,
    /// Fit log(v + 1) instead of dropping zero pairs.
    pub plus_one: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            model: default_model_grid(),
            test_set: default_test_sets(),
            space: EvalSpace::Log,
            plus_one: false,
        }
    }
}

impl GridConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let g: GridConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = std::collections::HashSet::new();
        for m in &self.model {
            crate::scaling::validate::check_model(m)?;
            if !ids.insert(m.id.as_str()) {
                return Err(Error::Config(format!("duplicate model id `{}`", m.id)));
            }
        }
        for t in &self.test_set {
            check_metric_name(&t.range.metric)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizeConfig {
    pub numerator: String,
    pub denominator: String,
    /// `None` takes β from the fit of `model`, else of `fallback_model`.
    pub beta: Option<f64>,
    pub model: String,
    pub fallback_model: String,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig {
            numerator: "methods".into(),
            denominator: "classes".into(),
            beta: None,
            model: "5".into(),
            fallback_model: "1".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Corpus manifest; exactly one of `manifest` and `synth` is set.
    #[serde(default)]
    pub manifest: Option<PathBuf>,
    #[serde(default)]
    pub synth: Option<SynthSpec>,
    pub output_dir: PathBuf,
    /// Replaces the synthetic corpus seed when set.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub bins: BinConfig,
    #[serde(default)]
    pub validation: GridConfig,
    #[serde(default)]
    pub normalize: NormalizeConfig,
}

impl RunConfig {
    pub fn for_manifest(manifest: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            manifest: Some(manifest.into()),
            synth: None,
            output_dir: output_dir.into(),
            seed: None,
            metrics: MetricsConfig::default(),
            bins: BinConfig::default(),
            validation: GridConfig::default(),
            normalize: NormalizeConfig::default(),
        }
    }

    /// Relative paths are taken relative to the config file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(m) = &cfg.manifest {
            cfg.manifest = Some(base.join(m));
        }
        cfg.output_dir = base.join(&cfg.output_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.manifest, &self.synth) {
            (Some(_), None) => {}
            (None, Some(s)) => s.validate()?,
            _ => {
                return Err(Error::Config(
                    "set exactly one of `manifest` and `synth`".into(),
                ))
            }
        }
        check_metric_name(&self.bins.metric)?;
        check_metric_name(&self.bins.numerator)?;
        check_metric_name(&self.bins.denominator)?;
        check_edges(&self.bins.edges)?;
        self.validation.validate()?;
        check_metric_name(&self.normalize.numerator)?;
        check_metric_name(&self.normalize.denominator)?;
        if let Some(b) = self.normalize.beta {
            if !b.is_finite() {
                return Err(Error::Config(format!(
                    "normalization beta must be finite, got {b}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    /// (relative path, sha256) in path order.
    pub files: Vec<(String, String)>,
    pub projects: usize,
}

struct Bundle {
    dir: PathBuf,
    written: Vec<String>,
}

impl Bundle {
    fn path(&mut self, rel: &str) -> PathBuf {
        self.written.push(rel.to_string());
        self.dir.join(rel)
    }

    fn csv<T: Serialize>(&mut self, rel: &str, rows: &[T]) -> Result<()> {
        let p = self.path(rel);
        write_csv(&p, rows)
    }

    fn text(&mut self, rel: &str, body: &str) -> Result<()> {
        let p = self.path(rel);
        fs::write(&p, body).map_err(|e| Error::io(&p, e))
    }

    fn manifest(&self) -> Result<Vec<(String, String)>> {
        let mut rels = self.written.clone();
        rels.sort();
        rels.dedup();
        let mut files = Vec::with_capacity(rels.len());
        let mut body = String::new();
        for rel in rels {
            let p = self.dir.join(&rel);
            let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
            let h = hex::encode(Sha256::digest(&bytes));
            body.push_str(&format!("{h}  {rel}\n"));
            files.push((rel, h));
        }
        let p = self.dir.join(MANIFEST);
        fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        Ok(files)
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Pipeline {
        stage: name,
        source: Box::new(e),
    })
}

/// Run every stage, writing the bundle under `cfg.output_dir`. On failure the
/// outputs written so far stay in place, listed in the manifest, next to a
/// `FAILED` file naming the stage.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunSummary> {
    stage("config", cfg.validate())?;
    let dir = cfg.output_dir.clone();
    stage("output", prepare_output_dir(&dir))?;
    let mut bundle = Bundle {
        dir: dir.clone(),
        written: Vec::new(),
    };
    match run_stages(cfg, &mut bundle) {
        Ok(projects) => {
            let files = stage("manifest", bundle.manifest())?;
            Ok(RunSummary {
                output_dir: dir,
                files,
                projects,
            })
        }
        Err(e) => {
            let note = format!("{e}\n");
            let p = dir.join(FAILED);
            fs::write(&p, note).map_err(|io| Error::io(&p, io))?;
            // Partial outputs are still hashed so they can be told apart.
            let _ = bundle.manifest();
            Err(e)
        }
    }
}

fn prepare_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for stale in [FAILED, MANIFEST] {
        let p = dir.join(stale);
        if p.exists() {
            fs::remove_file(&p).map_err(|e| Error::io(&p, e))?;
        }
    }
    let diag = dir.join(DIAGNOSTICS_DIR);
    if diag.exists() {
        fs::remove_dir_all(&diag).map_err(|e| Error::io(&diag, e))?;
    }
    fs::create_dir_all(&diag).map_err(|e| Error::io(&diag, e))
}

fn run_stages(cfg: &RunConfig, b: &mut Bundle) -> Result<usize> {
    let metrics = stage("corpus", load_corpus(cfg, b))?;
    stage(
        "metrics",
        export_metrics_table(&metrics, &b.path(METRICS_CSV)),
    )?;
    let fits = stage("fits", fit_stage(cfg, &metrics, b))?;
    stage("bins", bin_stage(cfg, &metrics, b))?;
    stage("normalize", normalize_stage(cfg, &metrics, &fits, b))?;
    let report = stage("report", render_report(&b.dir))?;
    stage("report", b.text(REPORT_TXT, &report))?;
    Ok(metrics.len())
}

fn load_corpus(cfg: &RunConfig, b: &mut Bundle) -> Result<Vec<ProjectMetrics>> {
    if let Some(spec) = &cfg.synth {
        let mut spec = spec.clone();
        if let Some(seed) = cfg.seed {
            spec.seed = seed;
        }
        let pairs = generate(&spec)?;
        if pairs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        return to_metrics(&pairs, &spec);
    }
    let manifest = cfg
        .manifest
        .as_ref()
        .ok_or_else(|| Error::Config("no corpus source".into()))?;
    let entries = read_manifest(manifest)?;
    let corpus = extract_corpus(&entries)?;

    let mut warnings = String::new();
    for w in &corpus.warnings {
        warnings.push_str(&serde_json::to_string(w).map_err(|e| Error::Config(e.to_string()))?);
        warnings.push('\n');
    }
    b.text(WARNINGS_JSONL, &warnings)?;
    let archive = FactsArchive::new(corpus.projects)?;
    write_facts(&archive, &b.path(FACTS_BIN))?;

    let rows: Vec<(ProjectMetrics, ExtractionRow)> = archive
        .projects
        .par_iter()
        .map(|p| {
            let used = used_modules_by_provenance(p, &cfg.metrics.jdk_prefixes);
            let row = ExtractionRow {
                project_id: p.project_id.clone(),
                files: p.files.len(),
                sloc: p.sloc,
                entities: p.entities.len(),
                relations: p.relations.len(),
                warnings: corpus
                    .warnings
                    .iter()
                    .filter(|w| w.project_id == p.project_id)
                    .count(),
                used_modules: used.total,
                used_unresolved: used.unresolved,
            };
            (compute_metrics(p, &cfg.metrics), row)
        })
        .collect();
    let (metrics, extraction): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    b.csv(EXTRACTION_CSV, &extraction)?;
    Ok(metrics)
}

fn analysis_label(m: &ModelSpec) -> String {
    format!("{} vs. {}", m.y, m.x)
}

fn fit_stage(cfg: &RunConfig, metrics: &[ProjectMetrics], b: &mut Bundle) -> Result<Vec<FitRow>> {
    let grid = &cfg.validation;
    let evals = evaluate_grid(
        metrics,
        &grid.model,
        &grid.test_set,
        grid.space,
        grid.plus_one,
    )?;
    let mut fit_rows = Vec::with_capacity(evals.len());
    let mut nrmse_rows = Vec::new();
    let test_sizes: Vec<usize> = grid
        .test_set
        .iter()
        .map(|t| t.range.apply(metrics).map(|s| s.len()))
        .collect::<Result<_>>()?;
    for (spec, e) in grid.model.iter().zip(&evals) {
        let label = analysis_label(spec);
        match &e.fit {
            Ok(f) => {
                fit_rows.push(FitRow::from_fit(
                    &e.model_id,
                    &label,
                    &e.subset_rule,
                    e.subset_projects,
                    f,
                ));
                let train = match &spec.subset {
                    Some(s) => s.apply(metrics)?,
                    None => metrics.to_vec(),
                };
                let d = diagnostics(
                    f,
                    &metric_series(&train, &spec.x)?,
                    &metric_series(&train, &spec.y)?,
                )?;
                let rows: Vec<DiagnosticRow> = (0..d.len())
                    .map(|i| DiagnosticRow {
                        fitted: d.fitted[i],
                        residual: d.residuals[i],
                        std_resid: d.standardized_residuals[i],
                        scale_location: d.scale_location[i],
                        leverage: d.leverage[i],
                        cooks_d: d.cooks_distance[i],
                        qq_theoretical: d.qq_pairs[i].0,
                        qq_sample: d.qq_pairs[i].1,
                    })
                    .collect();
                b.csv(
                    &format!("{DIAGNOSTICS_DIR}/model-{}.csv", e.model_id),
                    &rows,
                )?;
            }
            Err(msg) => fit_rows.push(FitRow::failed(
                &e.model_id,
                &label,
                &e.subset_rule,
                e.subset_projects,
                spec.k,
                spec.robust,
                msg,
            )),
        }
        for (t, n) in grid.test_set.iter().zip(&test_sizes) {
            nrmse_rows.push(NrmseRow {
                model_id: e.model_id.clone(),
                test_set: t.name.clone(),
                test_projects: *n,
                nrmse: e.nrmse_per_testset.get(&t.name).copied(),
            });
        }
    }
    b.csv(FITS_CSV, &fit_rows)?;
    b.text(FITS_TXT, &render_fit_table(&fit_rows))?;
    b.csv(NRMSE_CSV, &nrmse_rows)?;
    Ok(fit_rows)
}

/// One row per retained point; the QQ columns are in sorted order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub fitted: f64,
    pub residual: f64,
    pub std_resid: f64,
    pub scale_location: f64,
    pub leverage: f64,
    pub cooks_d: f64,
    pub qq_theoretical: f64,
    pub qq_sample: f64,
}

fn bin_stage(cfg: &RunConfig, metrics: &[ProjectMetrics], b: &mut Bundle) -> Result<()> {
    let (rows, welch) = bin_tables(metrics, &cfg.bins)?;
    b.csv(BINS_CSV, &rows)?;
    b.csv(WELCH_CSV, &welch)
}

/// Per-bin ratio summaries and the pairwise Welch matrix. Bins without a
/// usable project get empty summary cells rather than failing the table.
pub fn bin_tables(
    metrics: &[ProjectMetrics],
    bc: &BinConfig,
) -> Result<(Vec<BinRow>, Vec<WelchRow>)> {
    let bins = bin_by(metrics, &bc.metric, &bc.edges)?;
    let mut rows = Vec::with_capacity(bins.len());
    for bin in &bins {
        let row = match log_ratio_summary(bin, &bc.numerator, &bc.denominator) {
            Ok(s) => BinRow {
                bin: s.label.clone(),
                range: s.range.clone(),
                projects: s.project_count,
                excluded_zero_ratio: s.excluded_zero_ratio_count,
                mean_log: Some(s.mean_log),
                sd_log: Some(s.sd_log),
                mean_linear_pct: Some(s.mean_linear_pct),
            },
            Err(Error::EmptyBin(_)) => BinRow {
                bin: bin.label.clone(),
                range: bin.range_label(),
                projects: bin.projects.len(),
                excluded_zero_ratio: bin.projects.len(),
                mean_log: None,
                sd_log: None,
                mean_linear_pct: None,
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    let welch: Vec<WelchRow> = welch_matrix(&bins, &bc.numerator, &bc.denominator, bc.space)?
        .into_iter()
        .map(|c| WelchRow {
            a: c.a,
            b: c.b,
            t: c.result.map(|r| r.t_statistic),
            df: c.result.map(|r| r.degrees_of_freedom),
            p: c.result.map(|r| r.p_value),
            significant_at_95: c.result.map(|r| r.significant_at_95),
        })
        .collect();
    Ok((rows, welch))
}

fn normalize_stage(
    cfg: &RunConfig,
    metrics: &[ProjectMetrics],
    fits: &[FitRow],
    b: &mut Bundle,
) -> Result<()> {
    let t = normalize_tables(metrics, &cfg.normalize, fits)?;
    b.csv(NORMALIZED_CSV, &t.normalized.rows)?;
    b.csv(DECORRELATION_CSV, &[t.decorrelation])?;
    b.csv(WMC_CSV, &t.wmc)
}

pub struct NormalizeTables {
    pub normalized: NormalizedMetric,
    pub decorrelation: DecorrelationRow,
    /// Empty when no project has both methods and classes.
    pub wmc: Vec<WmcRow>,
}

/// β-normalized ratios, their decorrelation check and the WMC summary. With
/// `nc.beta` unset, β comes from the fit rows (`nc.model`, then
/// `nc.fallback_model`).
pub fn normalize_tables(
    metrics: &[ProjectMetrics],
    nc: &NormalizeConfig,
    fits: &[FitRow],
) -> Result<NormalizeTables> {
    let (beta, source) = match nc.beta {
        Some(beta) => (beta, "fixed".to_string()),
        None => {
            let from = |id: &str| {
                fits.iter()
                    .find(|f| f.model_id == id)
                    .and_then(|f| f.beta.map(|b| (b, f.model_id.clone())))
            };
            let (beta, id) = from(&nc.model)
                .or_else(|| from(&nc.fallback_model))
                .ok_or_else(|| {
                    Error::Config(format!(
                        "no fitted β for normalization: models `{}` and `{}` have no fit",
                        nc.model, nc.fallback_model
                    ))
                })?;
            (beta, format!("model {id}"))
        }
    };
    let normalized = normalize_corpus(metrics, &nc.numerator, &nc.denominator, beta)?;

    let mut row = DecorrelationRow {
        numerator: nc.numerator.clone(),
        denominator: nc.denominator.clone(),
        beta,
        beta_source: source,
        n: None,
        pearson_log: None,
        spearman: None,
        decorrelated: None,
        error: None,
    };
    match decorrelation_report(metrics, &nc.numerator, &nc.denominator, beta) {
        Ok(r) => {
            row.n = Some(r.n);
            row.pearson_log = Some(r.pearson_log);
            row.spearman = Some(r.spearman);
            row.decorrelated = Some(r.decorrelated);
        }
        Err(e @ (Error::InsufficientData { .. } | Error::UndefinedCorrelation)) => {
            row.error = Some(e.to_string())
        }
        Err(e) => return Err(e),
    }

    let wmc: Vec<WmcRow> = match wmc_summary(metrics) {
        Ok(w) => vec![WmcRow {
            n: w.n,
            mean_linear: w.mean_linear,
            mean_log: w.mean_log,
            sd_log: w.sd_log,
            linear_of_mean_log: w.linear_of_mean_log,
            interval_low: w.one_sd_interval.0,
            interval_high: w.one_sd_interval.1,
        }],
        Err(Error::InsufficientData { .. }) => vec![],
        Err(e) => return Err(e),
    };
    Ok(NormalizeTables {
        normalized,
        decorrelation: row,
        wmc,
    })
}

/// Hex SHA-256 of every file listed in a run's manifest, checked against disk.
pub fn verify_manifest(run_dir: &Path) -> Result<usize> {
    let p = run_dir.join(MANIFEST);
    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    let mut n = 0;
    for line in text.lines() {
        let (hash, rel) = line
            .split_once("  ")
            .ok_or_else(|| Error::Integrity(format!("bad manifest line `{line}`")))?;
        let f = run_dir.join(rel);
        let bytes = fs::read(&f).map_err(|e| Error::io(&f, e))?;
        if hex::encode(Sha256::digest(&bytes)) != hash {
            return Err(Error::Integrity(format!(
                "{rel} does not match the manifest"
            )));
        }
        n += 1;
    }
    Ok(n)
}

/// Write a run config as TOML (used to snapshot the effective config).
pub fn write_config(cfg: &RunConfig, out: &mut impl Write) -> Result<()> {
    let text = toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))?;
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<config>", e))
}
