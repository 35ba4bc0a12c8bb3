//! Facts archive: a line-oriented, length-prefixed record file.
//!
//! ```text
//! SZFACTS 1
//! <len>\tP\t<project_id>\t<sloc>\t<files>\t<entities>\t<relations>
//! <len>\tF\t<path>\t<sloc>
//! <len>\tE\t<id>\t<kind>\t<line>\t<file>\t<fqn>
//! <len>\tR\t<source>\t<kind>\t<E|N>\t<target>
//! END\t<record count>\t<sha256 of everything before this line>
//! ```
//!
//! `<len>` is the byte length of the payload after the first tab. Fields
//! escape `\`, tab and newline as `\\`, `\t`, `\n`.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::facts::{FactRelation, FileSloc, ProjectFacts, SourceEntity, Target};

pub const ARCHIVE_VERSION: u32 = 1;
const MAGIC: &str = "SZFACTS";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactsArchive {
    pub version: u32,
    pub projects: Vec<ProjectFacts>,
}

impl FactsArchive {
    pub fn new(projects: Vec<ProjectFacts>) -> Result<Self> {
        let mut seen = HashSet::new();
        for p in &projects {
            if !seen.insert(p.project_id.as_str()) {
                return Err(Error::DuplicateProject(p.project_id.clone()));
            }
        }
        Ok(FactsArchive {
            version: ARCHIVE_VERSION,
            projects,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("{MAGIC} {}\n", self.version);
        let mut count = 0u64;
        let mut rec = |out: &mut String, fields: &[&str]| {
            let payload = fields
                .iter()
                .map(|f| escape(f))
                .collect::<Vec<_>>()
                .join("\t");
            out.push_str(&format!("{}\t{payload}\n", payload.len()));
            count += 1;
        };
        for p in &self.projects {
            rec(
                &mut out,
                &[
                    "P",
                    &p.project_id,
                    &p.sloc.to_string(),
                    &p.files.len().to_string(),
                    &p.entities.len().to_string(),
                    &p.relations.len().to_string(),
                ],
            );
            for f in &p.files {
                rec(&mut out, &["F", &f.path, &f.sloc.to_string()]);
            }
            for e in &p.entities {
                rec(
                    &mut out,
                    &[
                        "E",
                        &e.id.to_string(),
                        e.kind.as_str(),
                        &e.line.to_string(),
                        &e.file,
                        &e.fqn,
                    ],
                );
            }
            for r in &p.relations {
                let (tag, target) = match &r.target {
                    Target::Entity(id) => ("E", id.to_string()),
                    Target::Name(n) => ("N", n.clone()),
                };
                rec(
                    &mut out,
                    &["R", &r.source.to_string(), r.kind.as_str(), tag, &target],
                );
            }
        }
        let digest = hex::encode(Sha256::digest(out.as_bytes()));
        out.push_str(&format!("END\t{count}\t{digest}\n"));
        out.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|_| integrity("archive is not UTF-8"))?;
        let header_end = text.find('\n').ok_or_else(|| integrity("missing header"))?;
        let header = &text[..header_end];
        let version = header
            .strip_prefix(MAGIC)
            .and_then(|v| v.trim().parse::<u32>().ok())
            .ok_or_else(|| integrity("not a facts archive"))?;
        if version != ARCHIVE_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                supported: ARCHIVE_VERSION,
            });
        }

        let mut pos = header_end + 1;
        let mut records: Vec<Vec<String>> = Vec::new();
        loop {
            if pos >= text.len() {
                return Err(integrity("truncated archive: missing trailer"));
            }
            let rest = &text[pos..];
            if let Some(trailer) = rest.strip_prefix("END\t") {
                let line = trailer
                    .strip_suffix('\n')
                    .ok_or_else(|| integrity("truncated trailer"))?;
                let (count, digest) = line
                    .split_once('\t')
                    .ok_or_else(|| integrity("bad trailer"))?;
                if count.parse::<usize>().ok() != Some(records.len()) {
                    return Err(integrity("record count mismatch"));
                }
                let actual = hex::encode(Sha256::digest(&bytes[..pos]));
                if actual != digest {
                    return Err(integrity("checksum mismatch"));
                }
                break;
            }
            let tab = rest
                .find('\t')
                .ok_or_else(|| integrity("truncated record"))?;
            let len: usize = rest[..tab]
                .parse()
                .map_err(|_| integrity("bad record length"))?;
            let start = tab + 1;
            let end = start + len;
            if end >= rest.len() || !rest.is_char_boundary(end) || rest.as_bytes()[end] != b'\n' {
                return Err(integrity("truncated record"));
            }
            records.push(
                rest[start..end]
                    .split('\t')
                    .map(unescape)
                    .collect::<Result<_>>()?,
            );
            pos += end + 1;
        }

        let mut projects = Vec::new();
        let mut it = records.into_iter().peekable();
        while let Some(r) = it.next() {
            if r.first().map(String::as_str) != Some("P") || r.len() != 6 {
                return Err(integrity("expected project record"));
            }
            let mut p = ProjectFacts::empty(r[1].clone());
            p.sloc = num(&r[2])?;
            let (nf, ne, nr): (usize, usize, usize) = (num(&r[3])?, num(&r[4])?, num(&r[5])?);
            for _ in 0..nf {
                let f = expect(it.next(), "F", 3)?;
                p.files.push(FileSloc {
                    path: f[1].clone(),
                    sloc: num(&f[2])?,
                });
            }
            for _ in 0..ne {
                let e = expect(it.next(), "E", 6)?;
                p.entities.push(SourceEntity {
                    id: num(&e[1])?,
                    kind: e[2].parse()?,
                    line: num(&e[3])?,
                    file: e[4].clone(),
                    fqn: e[5].clone(),
                    project_id: p.project_id.clone(),
                });
            }
            for _ in 0..nr {
                let r = expect(it.next(), "R", 5)?;
                let target = match r[3].as_str() {
                    "E" => Target::Entity(num(&r[4])?),
                    "N" => Target::Name(r[4].clone()),
                    other => return Err(integrity(&format!("bad target tag `{other}`"))),
                };
                p.relations.push(FactRelation {
                    source: num(&r[1])?,
                    kind: r[2].parse()?,
                    target,
                });
            }
            projects.push(p);
        }
        let mut a = FactsArchive::new(projects)?;
        a.version = version;
        Ok(a)
    }
}

pub fn write_facts(archive: &FactsArchive, path: &Path) -> Result<()> {
    fs::write(path, archive.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_facts(path: &Path) -> Result<FactsArchive> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    FactsArchive::from_bytes(&bytes)
}

fn integrity(m: &str) -> Error {
    Error::Integrity(m.to_string())
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| integrity(&format!("bad number `{s}`")))
}

fn expect(r: Option<Vec<String>>, tag: &str, len: usize) -> Result<Vec<String>> {
    match r {
        Some(r) if r.first().map(String::as_str) == Some(tag) && r.len() == len => Ok(r),
        _ => Err(integrity(&format!("expected `{tag}` record"))),
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            _ => return Err(integrity("bad escape")),
        }
    }
    Ok(out)
}
