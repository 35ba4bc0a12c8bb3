//! `sizelaw` command-line driver.
//!
//! Exit status: 0 on success, 1 for usage errors (bad flags or flag values),
//! 2 for data errors (unreadable inputs, failed fits, integrity failures).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use sizelaw_core::extract::{extract_corpus, read_manifest};
use sizelaw_core::metrics::{compute_metrics, MetricsConfig, ProjectMetrics};
use sizelaw_core::pipeline::{
    bin_tables, normalize_tables, run_pipeline, verify_manifest, BinConfig, GridConfig,
    NormalizeConfig, RunConfig,
};
use sizelaw_core::report::{render_fit_table, write_csv, FitRow};
use sizelaw_core::scaling::{
    evaluate_grid, fit_with, metric_series, EvalSpace, FitOptions, SizeRange,
};
use sizelaw_core::stats::RatioSpace;
use sizelaw_core::store::{read_facts, write_facts, FactsArchive};
use sizelaw_core::synth::{generate, to_metrics, SynthSpec};
use sizelaw_core::table::{export_metrics_table, read_metrics_table};

#[derive(Parser)]
#[command(
    name = "sizelaw",
    version,
    about = "Power-law size analysis of Java project corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract facts from every project in a corpus manifest.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write skipped-file warnings as JSON lines.
        #[arg(long)]
        warnings: Option<PathBuf>,
    },
    /// Compute the metrics table from a facts archive.
    Metrics {
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Name prefixes counted as JDK (repeatable; default java. and javax.).
        #[arg(long = "jdk-prefix")]
        jdk_prefixes: Vec<String>,
    },
    /// Fit log y = α + β·(log x)^k on a metrics table.
    Fit {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        y: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Huber IRLS instead of OLS.
        #[arg(long)]
        robust: bool,
        /// Fit log(v + 1) instead of dropping zero pairs.
        #[arg(long)]
        plus_one: bool,
        /// Restrict to `metric:low:high` (inclusive; either bound may be empty).
        #[arg(long)]
        subset: Option<String>,
    },
    /// Bin projects by size and compare a log ratio across bins.
    Bins {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long, default_value = "classes")]
        metric: String,
        /// Comma-separated ascending bin edges.
        #[arg(long, default_value = "20,100,1000,5000")]
        edges: String,
        #[arg(long, default_value = "interfaces")]
        numerator: String,
        #[arg(long, default_value = "classes")]
        denominator: String,
        /// `log` or `linear`.
        #[arg(long, default_value = "log")]
        space: String,
        /// Also write bins.csv and welch.csv here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Fit a model grid and score it on held-out size ranges.
    Validate {
        #[arg(long)]
        metrics: PathBuf,
        /// TOML grid; the default is the eight methods-vs-classes models.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Overrides the grid's NRMSE space (`log` or `linear`).
        #[arg(long)]
        space: Option<String>,
    },
    /// Divide a metric by denominator^β and check it is decorrelated.
    Normalize {
        #[arg(long)]
        metrics: PathBuf,
        /// `auto` takes β from the default grid (model 5, then model 1).
        #[arg(long, default_value = "auto")]
        beta: String,
        #[arg(long, default_value = "methods")]
        numerator: String,
        #[arg(long, default_value = "classes")]
        denominator: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic metrics table from a TOML spec.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the report of a finished run directory.
    Report {
        #[arg(long)]
        run_dir: PathBuf,
    },
    /// Check a run directory against its manifest.
    Verify {
        #[arg(long)]
        run_dir: PathBuf,
    },
    /// Run the whole pipeline from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the synthetic corpus seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<sizelaw_core::Error> for Failure {
    fn from(e: sizelaw_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}

/// The error chain, skipping causes whose text the outer message already
/// contains (core errors embed their source in their own message).
fn describe(e: &anyhow::Error) -> String {
    let mut msg = e.to_string();
    for cause in e.chain().skip(1) {
        let c = cause.to_string();
        if !msg.contains(&c) {
            msg = format!("{msg}: {c}");
        }
    }
    msg
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Extract {
            manifest,
            out,
            warnings,
        } => extract(&manifest, &out, warnings.as_deref()),
        Command::Metrics {
            facts,
            out,
            jdk_prefixes,
        } => metrics(&facts, &out, jdk_prefixes),
        Command::Fit {
            metrics,
            y,
            x,
            k,
            robust,
            plus_one,
            subset,
        } => {
            let opts = FitOptions {
                k,
                robust,
                plus_one,
            };
            fit(&metrics, &y, &x, opts, subset.as_deref())
        }
        Command::Bins {
            metrics,
            metric,
            edges,
            numerator,
            denominator,
            space,
            out_dir,
        } => {
            let cfg = BinConfig {
                metric,
                edges: parse_edges(&edges)?,
                numerator,
                denominator,
                space: parse_ratio_space(&space)?,
            };
            bins(&metrics, &cfg, out_dir.as_deref())
        }
        Command::Validate {
            metrics,
            grid,
            space,
        } => validate(&metrics, grid.as_deref(), space.as_deref()),
        Command::Normalize {
            metrics,
            beta,
            numerator,
            denominator,
            out,
        } => {
            let cfg = NormalizeConfig {
                numerator,
                denominator,
                beta: parse_beta(&beta)?,
                ..NormalizeConfig::default()
            };
            normalize(&metrics, &cfg, out.as_deref())
        }
        Command::Synth { spec, out, seed } => synth(&spec, &out, seed),
        Command::Report { run_dir } => {
            print!("{}", sizelaw_core::report::render_report(&run_dir)?);
            Ok(())
        }
        Command::Verify { run_dir } => {
            let n = verify_manifest(&run_dir)?;
            println!(
                "{n} files match {}",
                run_dir.join(sizelaw_core::pipeline::MANIFEST).display()
            );
            Ok(())
        }
        Command::Run { config, out, seed } => run(&config, out, seed),
    }
}

fn parse_edges(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad bin edge `{p}`")))
        })
        .collect()
}

fn parse_ratio_space(s: &str) -> CliResult<RatioSpace> {
    match s {
        "log" => Ok(RatioSpace::Log),
        "linear" => Ok(RatioSpace::Linear),
        _ => Err(usage(format!("space must be `log` or `linear`, got `{s}`"))),
    }
}

fn parse_eval_space(s: &str) -> CliResult<EvalSpace> {
    match s {
        "log" => Ok(EvalSpace::Log),
        "linear" => Ok(EvalSpace::Linear),
        _ => Err(usage(format!("space must be `log` or `linear`, got `{s}`"))),
    }
}

fn parse_beta(s: &str) -> CliResult<Option<f64>> {
    if s == "auto" {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(b) if b.is_finite() => Ok(Some(b)),
        _ => Err(usage(format!(
            "--beta must be `auto` or a number, got `{s}`"
        ))),
    }
}

fn parse_subset(s: &str) -> CliResult<SizeRange> {
    let parts: Vec<&str> = s.split(':').collect();
    let [metric, lo, hi] = parts[..] else {
        return Err(usage(format!(
            "--subset must look like `metric:low:high`, got `{s}`"
        )));
    };
    let bound = |v: &str| -> CliResult<Option<f64>> {
        if v.is_empty() {
            return Ok(None);
        }
        v.parse()
            .map(Some)
            .map_err(|_| usage(format!("bad subset bound `{v}`")))
    };
    // Inclusive upper bound on integer counts, stored half-open.
    Ok(SizeRange::new(
        metric,
        bound(lo)?,
        bound(hi)?.map(|h| h + 1.0),
    ))
}

fn extract(manifest: &Path, out: &Path, warnings: Option<&Path>) -> CliResult {
    let entries = read_manifest(manifest)?;
    let corpus = extract_corpus(&entries)?;
    if let Some(w) = warnings {
        let mut body = String::new();
        for warn in &corpus.warnings {
            body.push_str(&serde_json::to_string(warn).context("serializing warning")?);
            body.push('\n');
        }
        fs::write(w, body).with_context(|| format!("writing {}", w.display()))?;
    }
    let n = corpus.projects.len();
    let (entities, relations) = corpus.projects.iter().fold((0, 0), |(e, r), p| {
        (e + p.entities.len(), r + p.relations.len())
    });
    write_facts(&FactsArchive::new(corpus.projects)?, out)?;
    println!(
        "{n} projects, {entities} entities, {relations} relations, {} warnings -> {}",
        corpus.warnings.len(),
        out.display()
    );
    Ok(())
}

fn metrics(facts: &Path, out: &Path, jdk_prefixes: Vec<String>) -> CliResult {
    let archive = read_facts(facts)?;
    let mut cfg = MetricsConfig::default();
    if !jdk_prefixes.is_empty() {
        cfg.jdk_prefixes = jdk_prefixes;
    }
    let rows: Vec<ProjectMetrics> = archive
        .projects
        .iter()
        .map(|p| compute_metrics(p, &cfg))
        .collect();
    export_metrics_table(&rows, out)?;
    println!("{} rows -> {}", rows.len(), out.display());
    Ok(())
}

fn fit(path: &Path, y: &str, x: &str, opts: FitOptions, subset: Option<&str>) -> CliResult {
    let mut corpus = read_metrics_table(path)?;
    let mut rule = "all".to_string();
    if let Some(s) = subset {
        let range = parse_subset(s)?;
        corpus = range.apply(&corpus)?;
        rule = range.label();
    }
    let f = fit_with(
        &metric_series(&corpus, x)?,
        &metric_series(&corpus, y)?,
        opts,
    )?;
    let row = FitRow::from_fit("-", &format!("{y} vs. {x}"), &rule, corpus.len(), &f);
    print!("{}", render_fit_table(&[row]));
    println!(
        "n = {}, excluded zero pairs = {}, converged = {}",
        f.n, f.excluded_zero_pairs, f.converged
    );
    Ok(())
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.digits$}"))
}

fn bins(path: &Path, cfg: &BinConfig, out_dir: Option<&Path>) -> CliResult {
    let corpus = read_metrics_table(path)?;
    let (rows, welch) = bin_tables(&corpus, cfg)?;
    println!("bin | range | projects | excluded | mean log | sd log | mean %");
    for r in &rows {
        println!(
            "{} | {} | {} | {} | {} | {} | {}",
            r.bin,
            r.range,
            r.projects,
            r.excluded_zero_ratio,
            fmt_opt(r.mean_log, 4),
            fmt_opt(r.sd_log, 4),
            fmt_opt(r.mean_linear_pct, 2)
        );
    }
    println!();
    println!("a | b | t | df | p | significant");
    for w in &welch {
        println!(
            "{} | {} | {} | {} | {} | {}",
            w.a,
            w.b,
            fmt_opt(w.t, 3),
            fmt_opt(w.df, 1),
            fmt_opt(w.p, 4),
            w.significant_at_95.map_or("NA".into(), |s| s.to_string())
        );
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_csv(&dir.join(sizelaw_core::report::BINS_CSV), &rows)?;
        write_csv(&dir.join(sizelaw_core::report::WELCH_CSV), &welch)?;
    }
    Ok(())
}

fn load_grid(path: Option<&Path>) -> CliResult<GridConfig> {
    match path {
        None => Ok(GridConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(GridConfig::from_toml(&text)?)
        }
    }
}

fn grid_fit_rows(
    corpus: &[ProjectMetrics],
    grid: &GridConfig,
) -> CliResult<(Vec<FitRow>, Vec<sizelaw_core::scaling::ModelEval>)> {
    let evals = evaluate_grid(
        corpus,
        &grid.model,
        &grid.test_set,
        grid.space,
        grid.plus_one,
    )?;
    let rows = grid
        .model
        .iter()
        .zip(&evals)
        .map(|(m, e)| {
            let label = format!("{} vs. {}", m.y, m.x);
            match &e.fit {
                Ok(f) => {
                    FitRow::from_fit(&e.model_id, &label, &e.subset_rule, e.subset_projects, f)
                }
                Err(msg) => FitRow::failed(
                    &e.model_id,
                    &label,
                    &e.subset_rule,
                    e.subset_projects,
                    m.k,
                    m.robust,
                    msg,
                ),
            }
        })
        .collect();
    Ok((rows, evals))
}

fn validate(path: &Path, grid: Option<&Path>, space: Option<&str>) -> CliResult {
    let mut grid = load_grid(grid)?;
    if let Some(s) = space {
        grid.space = parse_eval_space(s)?;
    }
    let corpus = read_metrics_table(path)?;
    let (rows, evals) = grid_fit_rows(&corpus, &grid)?;
    for r in &rows {
        println!(
            "model {}: {} [{}], {} projects",
            r.model_id, r.analysis, r.subset, r.subset_projects
        );
    }
    println!();
    print!("{}", render_fit_table(&rows));
    println!();
    let names: Vec<&str> = grid.test_set.iter().map(|t| t.name.as_str()).collect();
    println!("model | {}", names.join(" | "));
    for e in &evals {
        let cells: Vec<String> = names
            .iter()
            .map(|n| fmt_opt(e.nrmse_per_testset.get(*n).copied(), 5))
            .collect();
        println!("{} | {}", e.model_id, cells.join(" | "));
    }
    Ok(())
}

fn normalize(path: &Path, cfg: &NormalizeConfig, out: Option<&Path>) -> CliResult {
    let corpus = read_metrics_table(path)?;
    let fits = if cfg.beta.is_none() {
        grid_fit_rows(&corpus, &GridConfig::default())?.0
    } else {
        Vec::new()
    };
    let t = normalize_tables(&corpus, cfg, &fits)?;
    let d = &t.decorrelation;
    println!("β = {:.4} ({})", d.beta, d.beta_source);
    match (&d.error, d.pearson_log, d.spearman) {
        (None, Some(p), Some(s)) => println!(
            "pearson(log) = {p:.4}, spearman = {s:.4}, decorrelated = {}",
            d.decorrelated.unwrap_or(false)
        ),
        (Some(e), _, _) => println!("decorrelation check not available: {e}"),
        _ => println!("decorrelation check not available"),
    }
    if let Some(w) = t.wmc.first() {
        println!(
            "WMC: exp(mean log) {:.3}, one-SD interval [{:.3}, {:.3}], linear mean {:.3}, n = {}",
            w.linear_of_mean_log, w.interval_low, w.interval_high, w.mean_linear, w.n
        );
    }
    if let Some(o) = out {
        write_csv(o, &t.normalized.rows)?;
        println!("{} rows -> {}", t.normalized.rows.len(), o.display());
    }
    Ok(())
}

fn synth(spec_path: &Path, out: &Path, seed: Option<u64>) -> CliResult {
    let text = fs::read_to_string(spec_path)
        .with_context(|| format!("reading {}", spec_path.display()))?;
    let mut spec: SynthSpec =
        toml::from_str(&text).with_context(|| format!("parsing {}", spec_path.display()))?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let pairs = generate(&spec)?;
    let rows = to_metrics(&pairs, &spec)?;
    export_metrics_table(&rows, out)?;
    println!(
        "{} synthetic projects (seed {}) -> {}",
        rows.len(),
        spec.seed,
        out.display()
    );
    Ok(())
}

fn run(config: &Path, out: Option<PathBuf>, seed: Option<u64>) -> CliResult {
    let mut cfg = RunConfig::from_file(config)?;
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    if seed.is_some() {
        cfg.seed = seed;
    }
    let s = run_pipeline(&cfg)?;
    println!(
        "{} projects, {} files -> {}",
        s.projects,
        s.files.len(),
        s.output_dir.display()
    );
    Ok(())
}
