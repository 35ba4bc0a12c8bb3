//! Extraction, metrics and archive behaviour on the bundled fixture corpus.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sizelaw_core::extract::{extract_corpus, extract_project, read_manifest};
use sizelaw_core::facts::{EntityKind, RelationKind};
use sizelaw_core::metrics::{
    compute_metrics, used_modules_by_provenance, MetricsConfig, ProjectMetrics, METRIC_NAMES,
};
use sizelaw_core::provenance::default_jdk_prefixes;
use sizelaw_core::store::FactsArchive;
use sizelaw_core::table::{read_metrics, write_metrics};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn corpus_metrics() -> BTreeMap<String, ProjectMetrics> {
    let entries = read_manifest(&fixtures().join("corpus.txt")).unwrap();
    let ex = extract_corpus(&entries).unwrap();
    let cfg = MetricsConfig::default();
    ex.projects
        .iter()
        .map(|p| (p.project_id.clone(), compute_metrics(p, &cfg)))
        .collect()
}

fn copy_tree(from: &Path, to: &Path) {
    for e in walkdir::WalkDir::new(from) {
        let e = e.unwrap();
        let dst = to.join(e.path().strip_prefix(from).unwrap());
        if e.file_type().is_dir() {
            fs::create_dir_all(&dst).unwrap();
        } else {
            fs::copy(e.path(), &dst).unwrap();
        }
    }
}

#[test]
fn manifest_lists_ten_projects() {
    let ids: Vec<String> = read_manifest(&fixtures().join("corpus.txt"))
        .unwrap()
        .into_iter()
        .map(|e| e.project_id)
        .collect();
    assert_eq!(
        ids,
        ["bank", "broken", "chain", "events", "foo", "gui", "hello", "parser", "shapes", "util"]
    );
}

#[test]
fn foo_number_row() {
    let m = &corpus_metrics()["foo"];
    assert_eq!((m.sloc, m.classes, m.interfaces), (11, 1, 0));
    assert_eq!((m.methods, m.constructors, m.calls), (2, 1, 3));
    assert_eq!((m.dui, m.if_count), (0, 0));
    assert_eq!((m.used_internal, m.used_external), (1, 0));
}

#[test]
fn inheritance_counts() {
    let all = corpus_metrics();
    // Abstract Shape with two direct subclasses.
    let s = &all["shapes"];
    assert_eq!((s.classes, s.interfaces, s.dui, s.if_count), (3, 0, 2, 1));
    assert_eq!((s.instanceof_count, s.casts), (1, 1));
    // A extends B extends C: two classes use inheritance, two are inherited from.
    let c = &all["chain"];
    assert_eq!((c.classes, c.dui, c.if_count), (3, 2, 2));
}

#[test]
fn enums_nested_and_anonymous_types_are_classes() {
    let all = corpus_metrics();
    assert_eq!(all["bank"].classes, 5);
    assert_eq!(all["parser"].classes, 7);
    assert_eq!((all["events"].classes, all["events"].interfaces), (3, 2));
}

#[test]
fn unresolved_and_third_party_types_are_external() {
    let ex = extract_project(&fixtures().join("corpus/gui"), "gui").unwrap();
    let u = used_modules_by_provenance(&ex.facts, &default_jdk_prefixes());
    assert_eq!(u.external, 2);
    assert_eq!(u.unresolved, 1);
    assert_eq!(u.internal + u.jdk + u.external, u.total);
}

#[test]
fn syntax_errors_become_warnings() {
    let ex = extract_project(&fixtures().join("corpus/broken"), "broken").unwrap();
    assert_eq!(ex.parse_warning_count(), 1);
    assert_eq!(ex.warnings[0].file, "src/ok/Bad.java");
    let m = compute_metrics(&ex.facts, &MetricsConfig::default());
    assert_eq!((m.classes, m.methods), (2, 2));
}

#[test]
fn every_row_satisfies_invariants() {
    for (id, m) in corpus_metrics() {
        m.check_invariants().unwrap_or_else(|e| panic!("{id}: {e}"));
        assert_eq!(
            m.used_internal + m.used_jdk + m.used_external,
            m.used_total,
            "{id}"
        );
        assert_eq!(m.modules, m.classes + m.interfaces, "{id}");
        assert!(m.dui <= m.classes, "{id}");
    }
}

#[test]
fn facts_are_structurally_valid() {
    let entries = read_manifest(&fixtures().join("corpus.txt")).unwrap();
    let ex = extract_corpus(&entries).unwrap();
    let mut ids = std::collections::HashSet::new();
    for p in &ex.projects {
        p.validate().unwrap();
        for e in &p.entities {
            assert!(
                ids.insert(e.id),
                "entity id {} reused across projects",
                e.id
            );
        }
        // Every non-package entity has exactly one container.
        let contained = p
            .relations
            .iter()
            .filter(|r| r.kind == RelationKind::Contains)
            .count();
        let packages = p
            .entities
            .iter()
            .filter(|e| e.kind == EntityKind::Package)
            .count();
        assert_eq!(contained, p.entities.len() - packages, "{}", p.project_id);
    }
}

#[test]
fn extraction_and_archive_are_deterministic() {
    let entries = read_manifest(&fixtures().join("corpus.txt")).unwrap();
    let a = FactsArchive::new(extract_corpus(&entries).unwrap().projects).unwrap();
    let b = FactsArchive::new(extract_corpus(&entries).unwrap().projects).unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_eq!(FactsArchive::from_bytes(&a.to_bytes()).unwrap(), a);
}

#[test]
fn metrics_table_is_sorted_and_round_trips() {
    let all = corpus_metrics();
    let picked: Vec<ProjectMetrics> = ["shapes", "bank", "foo"]
        .iter()
        .map(|id| all[*id].clone())
        .collect();
    let mut buf = Vec::new();
    write_metrics(&picked, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let ids: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ids, ["bank", "foo", "shapes"]);
    let back = read_metrics(text.as_bytes()).unwrap();
    assert_eq!(back[1], all["foo"]);
}

#[test]
fn adding_an_independent_file_never_decreases_a_metric() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("shapes");
    copy_tree(&fixtures().join("corpus/shapes"), &root);
    let before = compute_metrics(
        &extract_project(&root, "shapes").unwrap().facts,
        &MetricsConfig::default(),
    );
    fs::write(
        root.join("Extra.java"),
        "package extra;\n\nimport java.util.List;\n\npublic class Extra extends Thread implements Runnable {\n    \
         private List<String> items;\n    public Extra() { }\n    public void run() {\n        \
         if (items instanceof Object) { Object o = (Object) items; o.hashCode(); }\n    }\n}\n",
    )
    .unwrap();
    let after = compute_metrics(
        &extract_project(&root, "shapes").unwrap().facts,
        &MetricsConfig::default(),
    );
    for name in METRIC_NAMES {
        let (b, a) = (before.get(name).unwrap(), after.get(name).unwrap());
        assert!(a >= b, "{name} dropped from {b} to {a}");
    }
    assert_eq!(after.classes, before.classes + 1);
    assert_eq!(after.sloc, before.sloc + 9);
}

#[test]
fn used_module_counts_are_distinct_types() {
    // foo uses FooNumber, Integer, String (main's parameter), System and
    // PrintStream; each is counted once however often it appears.
    let ex = extract_project(&fixtures().join("corpus/foo"), "foo").unwrap();
    let u = used_modules_by_provenance(&ex.facts, &default_jdk_prefixes());
    assert_eq!((u.internal, u.jdk, u.external, u.total), (1, 4, 0, 5));
}
