//! Per-project metric record computed from extracted facts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::facts::{owner_of_member, EntityId, EntityKind, ProjectFacts, RelationKind, Target};
use crate::provenance::{default_jdk_prefixes, Provenance, ProvenanceClassifier};

/// One row of the metrics table. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProjectMetrics {
    pub project_id: String,
    pub sloc: u64,
    pub classes: u64,
    pub interfaces: u64,
    pub modules: u64,
    pub methods: u64,
    pub constructors: u64,
    pub calls: u64,
    pub instanceof_count: u64,
    pub casts: u64,
    pub dui: u64,
    pub if_count: u64,
    pub used_total: u64,
    pub used_internal: u64,
    pub used_jdk: u64,
    pub used_external: u64,
    pub efferent_coupling: u64,
}

/// Metric columns (everything but `project_id`), in table order.
pub const METRIC_NAMES: [&str; 16] = [
    "sloc",
    "classes",
    "interfaces",
    "modules",
    "methods",
    "constructors",
    "calls",
    "instanceof_count",
    "casts",
    "dui",
    "if_count",
    "used_total",
    "used_internal",
    "used_jdk",
    "used_external",
    "efferent_coupling",
];

impl ProjectMetrics {
    pub fn zero(project_id: impl Into<String>) -> Self {
        ProjectMetrics {
            project_id: project_id.into(),
            ..Default::default()
        }
    }

    pub fn get(&self, name: &str) -> Result<u64> {
        Ok(match name {
            "sloc" => self.sloc,
            "classes" => self.classes,
            "interfaces" => self.interfaces,
            "modules" => self.modules,
            "methods" => self.methods,
            "constructors" => self.constructors,
            "calls" => self.calls,
            "instanceof_count" | "instanceof" => self.instanceof_count,
            "casts" => self.casts,
            "dui" => self.dui,
            "if_count" | "if" => self.if_count,
            "used_total" => self.used_total,
            "used_internal" => self.used_internal,
            "used_jdk" => self.used_jdk,
            "used_external" => self.used_external,
            "efferent_coupling" => self.efferent_coupling,
            _ => return Err(Error::UnknownMetric(name.to_string())),
        })
    }

    pub fn set(&mut self, name: &str, value: u64) -> Result<()> {
        let slot = match name {
            "sloc" => &mut self.sloc,
            "classes" => &mut self.classes,
            "interfaces" => &mut self.interfaces,
            "modules" => &mut self.modules,
            "methods" => &mut self.methods,
            "constructors" => &mut self.constructors,
            "calls" => &mut self.calls,
            "instanceof_count" | "instanceof" => &mut self.instanceof_count,
            "casts" => &mut self.casts,
            "dui" => &mut self.dui,
            "if_count" | "if" => &mut self.if_count,
            "used_total" => &mut self.used_total,
            "used_internal" => &mut self.used_internal,
            "used_jdk" => &mut self.used_jdk,
            "used_external" => &mut self.used_external,
            "efferent_coupling" => &mut self.efferent_coupling,
            _ => return Err(Error::UnknownMetric(name.to_string())),
        };
        *slot = value;
        Ok(())
    }

    /// The record's internal consistency rules.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Integrity(format!("{}: {m}", self.project_id)));
        if self.modules != self.classes + self.interfaces {
            return fail("modules != classes + interfaces");
        }
        if self.used_total != self.used_internal + self.used_jdk + self.used_external {
            return fail("used_total != internal + jdk + external");
        }
        if self.dui > self.classes || self.if_count > self.classes {
            return fail("dui or if_count exceeds classes");
        }
        if self.efferent_coupling != self.used_jdk + self.used_external {
            return fail("efferent_coupling != jdk + external");
        }
        Ok(())
    }
}

pub fn check_metric_name(name: &str) -> Result<()> {
    ProjectMetrics::default().get(name).map(|_| ())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DuiMode {
    /// An explicit non-`Object` superclass or any implemented interface.
    #[default]
    ExtendsOrImplements,
    ExtendsOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub enums_as_classes: bool,
    pub annotations_as_interfaces: bool,
    pub dui_mode: DuiMode,
    pub jdk_prefixes: Vec<String>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            enums_as_classes: true,
            annotations_as_interfaces: true,
            dui_mode: DuiMode::ExtendsOrImplements,
            jdk_prefixes: default_jdk_prefixes(),
        }
    }
}

impl MetricsConfig {
    fn is_class(&self, k: EntityKind) -> bool {
        k == EntityKind::Class || (self.enums_as_classes && k == EntityKind::Enum)
    }

    fn is_interface(&self, k: EntityKind) -> bool {
        k == EntityKind::Interface
            || (self.annotations_as_interfaces && k == EntityKind::Annotation)
    }
}

const OBJECT: &str = "java.lang.Object";

fn class_ids(facts: &ProjectFacts, cfg: &MetricsConfig) -> BTreeSet<EntityId> {
    facts
        .entities
        .iter()
        .filter(|e| cfg.is_class(e.kind))
        .map(|e| e.id)
        .collect()
}

/// Classes defined using inheritance.
pub fn count_dui(facts: &ProjectFacts, cfg: &MetricsConfig) -> u64 {
    let classes = class_ids(facts, cfg);
    let mut dui = BTreeSet::new();
    for r in &facts.relations {
        if !classes.contains(&r.source) {
            continue;
        }
        let counts = match r.kind {
            RelationKind::Extends => facts.target_name(&r.target) != Some(OBJECT),
            RelationKind::Implements => cfg.dui_mode == DuiMode::ExtendsOrImplements,
            _ => false,
        };
        if counts {
            dui.insert(r.source);
        }
    }
    dui.len() as u64
}

/// Classes that some class of the same project extends.
pub fn count_inherited_from(facts: &ProjectFacts, cfg: &MetricsConfig) -> u64 {
    let classes = class_ids(facts, cfg);
    facts
        .relations
        .iter()
        .filter(|r| r.kind == RelationKind::Extends)
        .filter_map(|r| r.target.entity())
        .filter(|t| classes.contains(t))
        .collect::<BTreeSet<_>>()
        .len() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UsedModules {
    pub internal: u64,
    pub jdk: u64,
    pub external: u64,
    pub total: u64,
    /// EXTERNAL modules whose names could not be resolved.
    pub unresolved: u64,
}

/// Distinct types a project uses, by their fully-qualified names. Member
/// targets of CALLS and INSTANTIATES are reduced to their owner type;
/// calls on receivers of unknown type have no owner and are skipped.
pub fn used_module_names(facts: &ProjectFacts) -> BTreeSet<String> {
    let parents = facts.parents();
    let owner_type = |id: EntityId| -> Option<String> {
        let mut cur = facts.entity(id)?;
        while !cur.kind.is_type() {
            cur = facts.entity(*parents.get(&cur.id)?)?;
        }
        Some(cur.fqn.clone())
    };
    let mut out = BTreeSet::new();
    for r in &facts.relations {
        let member = matches!(r.kind, RelationKind::Calls | RelationKind::Instantiates);
        let type_level = matches!(
            r.kind,
            RelationKind::Holds
                | RelationKind::Extends
                | RelationKind::Implements
                | RelationKind::Casts
                | RelationKind::Instanceof
                | RelationKind::Uses
        );
        if !member && !type_level {
            continue;
        }
        let name = match &r.target {
            Target::Entity(id) => owner_type(*id),
            Target::Name(n) if member => owner_of_member(n).map(str::to_string),
            Target::Name(n) => Some(n.clone()),
        };
        if let Some(n) = name {
            out.insert(n);
        }
    }
    out
}

pub fn used_modules_by_provenance(facts: &ProjectFacts, jdk_prefixes: &[String]) -> UsedModules {
    let classifier = ProvenanceClassifier::new(facts, jdk_prefixes);
    let mut u = UsedModules::default();
    for name in used_module_names(facts) {
        let c = classifier.classify(&name);
        match c.provenance {
            Provenance::Internal => u.internal += 1,
            Provenance::Jdk => u.jdk += 1,
            Provenance::External => u.external += 1,
        }
        if c.unresolved {
            u.unresolved += 1;
        }
        u.total += 1;
    }
    u
}

pub fn compute_metrics(facts: &ProjectFacts, cfg: &MetricsConfig) -> ProjectMetrics {
    let mut m = ProjectMetrics::zero(facts.project_id.clone());
    m.sloc = facts.sloc;
    let kinds: HashMap<EntityId, EntityKind> =
        facts.entities.iter().map(|e| (e.id, e.kind)).collect();
    let parents = facts.parents();
    for e in &facts.entities {
        match e.kind {
            k if cfg.is_class(k) => m.classes += 1,
            k if cfg.is_interface(k) => m.interfaces += 1,
            EntityKind::Constructor => m.constructors += 1,
            EntityKind::Method => {
                let in_class = parents
                    .get(&e.id)
                    .and_then(|p| kinds.get(p))
                    .is_some_and(|k| cfg.is_class(*k));
                if in_class {
                    m.methods += 1;
                }
            }
            _ => {}
        }
    }
    m.modules = m.classes + m.interfaces;
    let mut by_kind: BTreeMap<RelationKind, u64> = BTreeMap::new();
    for r in &facts.relations {
        *by_kind.entry(r.kind).or_default() += 1;
    }
    let count = |k| by_kind.get(&k).copied().unwrap_or(0);
    m.calls = count(RelationKind::Calls);
    m.instanceof_count = count(RelationKind::Instanceof);
    m.casts = count(RelationKind::Casts);
    m.dui = count_dui(facts, cfg);
    m.if_count = count_inherited_from(facts, cfg);
    let used = used_modules_by_provenance(facts, &cfg.jdk_prefixes);
    m.used_internal = used.internal;
    m.used_jdk = used.jdk;
    m.used_external = used.external;
    m.used_total = used.total;
    m.efferent_coupling = used.jdk + used.external;
    m
}
