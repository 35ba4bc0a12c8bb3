//! The per-project metrics table (comma-separated, header row, one row per
//! project sorted by id).

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::{ProjectMetrics, METRIC_NAMES};

pub fn header() -> Vec<&'static str> {
    let mut h = vec!["project_id"];
    h.extend(METRIC_NAMES);
    h
}

/// Sort by project id, refusing duplicates.
pub fn sorted_unique(metrics: &[ProjectMetrics]) -> Result<Vec<ProjectMetrics>> {
    let mut rows = metrics.to_vec();
    rows.sort_by(|a, b| a.project_id.cmp(&b.project_id));
    if let Some(w) = rows.windows(2).find(|w| w[0].project_id == w[1].project_id) {
        return Err(Error::DuplicateProject(w[0].project_id.clone()));
    }
    Ok(rows)
}

pub fn write_metrics<W: Write>(metrics: &[ProjectMetrics], out: W) -> Result<()> {
    if metrics.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let rows = sorted_unique(metrics)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn export_metrics_table(metrics: &[ProjectMetrics], path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_metrics(metrics, f)
}

pub fn read_metrics<R: Read>(input: R) -> Result<Vec<ProjectMetrics>> {
    let mut r = csv::Reader::from_reader(input);
    let got: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if got != header() {
        return Err(Error::Config(format!(
            "metrics table header mismatch: expected {}, found {}",
            header().join(","),
            got.join(",")
        )));
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for row in r.deserialize() {
        let m: ProjectMetrics = row?;
        if !seen.insert(m.project_id.clone()) {
            return Err(Error::DuplicateProject(m.project_id));
        }
        out.push(m);
    }
    Ok(out)
}

pub fn read_metrics_table(path: &Path) -> Result<Vec<ProjectMetrics>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_metrics(f)
}
