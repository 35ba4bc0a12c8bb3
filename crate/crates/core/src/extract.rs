//! Filesystem front end: walk project trees, read a corpus manifest, and run
//! extraction per project (in parallel across projects).

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::facts::ProjectFacts;
use crate::java::{extract_sources, SourceFile};

/// One skipped file or declaration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractWarning {
    pub project_id: String,
    pub file: String,
    pub line: u32,
    /// `io`, `encoding`, `syntax` or `duplicate`.
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub facts: ProjectFacts,
    pub warnings: Vec<ExtractWarning>,
}

impl Extraction {
    pub fn parse_warning_count(&self) -> usize {
        self.warnings.iter().filter(|w| w.kind == "syntax").count()
    }
}

/// Extract the facts of every `.java` file below `root`.
pub fn extract_project(root: &Path, project_id: &str) -> Result<Extraction> {
    if !root.is_dir() {
        return Err(Error::MissingProjectRoot(root.to_path_buf()));
    }
    let mut warnings = Vec::new();
    let mut warn = |file: String, kind: &str, message: String| {
        log::warn!("{project_id}: {file}: {message}");
        warnings.push(ExtractWarning {
            project_id: project_id.to_string(),
            file,
            line: 0,
            kind: kind.to_string(),
            message,
        });
    };

    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let p = e.path().map(|p| relative(root, p)).unwrap_or_default();
                warn(p, "io", e.to_string());
                continue;
            }
        };
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|e| e != "java") {
            continue;
        }
        let rel = relative(root, path);
        match fs::read(path) {
            Ok(bytes) => {
                let text = match String::from_utf8(bytes) {
                    Ok(t) => t,
                    Err(e) => {
                        warn(
                            rel.clone(),
                            "encoding",
                            "not valid UTF-8; decoded lossily".into(),
                        );
                        String::from_utf8_lossy(e.as_bytes()).into_owned()
                    }
                };
                files.push(SourceFile { path: rel, text });
            }
            Err(e) => warn(rel, "io", e.to_string()),
        }
    }

    let (facts, diags) = extract_sources(project_id, files);
    for d in diags {
        log::warn!("{project_id}: {}:{}: {}", d.file, d.line, d.message);
        warnings.push(ExtractWarning {
            project_id: project_id.to_string(),
            file: d.file,
            line: d.line,
            kind: d.kind.to_string(),
            message: d.message,
        });
    }
    Ok(Extraction { facts, warnings })
}

fn relative(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub project_id: String,
    pub root: PathBuf,
}

/// One project root per line, relative to the manifest's directory. Blank
/// lines and `#` comments are ignored. The project id is the last path
/// component.
pub fn read_manifest(path: &Path) -> Result<Vec<CorpusEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let root = base.join(line);
        let id = Path::new(line)
            .components()
            .next_back()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .unwrap_or_default();
        if id.is_empty() || id == "." || id == ".." {
            return Err(Error::Config(format!(
                "cannot derive a project id from `{line}`"
            )));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateProject(id));
        }
        out.push(CorpusEntry {
            project_id: id,
            root,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CorpusExtraction {
    /// Sorted by project id; entity ids are unique across the corpus.
    pub projects: Vec<ProjectFacts>,
    pub warnings: Vec<ExtractWarning>,
}

/// Extract every project of a corpus. Results are merged in project-id
/// order and entity ids are offset so they are unique corpus-wide.
pub fn extract_corpus(entries: &[CorpusEntry]) -> Result<CorpusExtraction> {
    if entries.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut sorted: Vec<&CorpusEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.project_id.cmp(&b.project_id));
    if let Some(w) = sorted
        .windows(2)
        .find(|w| w[0].project_id == w[1].project_id)
    {
        return Err(Error::DuplicateProject(w[0].project_id.clone()));
    }
    let results: Vec<Result<Extraction>> = sorted
        .par_iter()
        .map(|e| extract_project(&e.root, &e.project_id))
        .collect();
    let mut projects = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    let mut offset = 0;
    for r in results {
        let mut ex = r?;
        ex.facts.offset_ids(offset);
        offset = ex.facts.max_id().max(offset);
        projects.push(ex.facts);
        warnings.extend(ex.warnings);
    }
    Ok(CorpusExtraction { projects, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_directory_gives_empty_facts() {
        let dir = tempfile::tempdir().unwrap();
        let ex = extract_project(dir.path(), "e").unwrap();
        assert!(ex.facts.entities.is_empty());
        assert!(ex.facts.relations.is_empty());
        assert_eq!(ex.facts.sloc, 0);
    }

    #[test]
    fn missing_root_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = extract_project(&dir.path().join("nope"), "x").unwrap_err();
        assert!(matches!(err, Error::MissingProjectRoot(_)));
    }

    #[test]
    fn non_utf8_file_is_read_with_a_warning() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("A.java"),
            b"class A { String s = \"\xe9\"; }",
        )
        .unwrap();
        let ex = extract_project(dir.path(), "a").unwrap();
        assert_eq!(ex.facts.entities.len(), 3);
        assert_eq!(ex.warnings[0].kind, "encoding");
    }

    #[test]
    fn manifest_parsing_and_corpus_offsets() {
        let dir = tempfile::tempdir().unwrap();
        for (p, src) in [("b", "class B {}"), ("a", "class A { int x; }")] {
            fs::create_dir(dir.path().join(p)).unwrap();
            fs::write(dir.path().join(p).join("X.java"), src).unwrap();
        }
        let m = dir.path().join("manifest.txt");
        fs::write(&m, "# corpus\nb\n\na\n").unwrap();
        let entries = read_manifest(&m).unwrap();
        assert_eq!(entries.len(), 2);
        let corpus = extract_corpus(&entries).unwrap();
        assert_eq!(corpus.projects[0].project_id, "a");
        let ids: Vec<u64> = corpus
            .projects
            .iter()
            .flat_map(|p| p.entities.iter().map(|e| e.id))
            .collect();
        assert_eq!(ids, vec![1, 2, 3, 4, 5]);
        for p in &corpus.projects {
            p.validate().unwrap();
        }
    }

    #[test]
    fn duplicate_and_empty_manifests_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("m.txt");
        fs::write(&m, "x/p\ny/p\n").unwrap();
        assert!(matches!(read_manifest(&m), Err(Error::DuplicateProject(_))));
        assert!(matches!(extract_corpus(&[]), Err(Error::EmptyCorpus)));
    }
}
