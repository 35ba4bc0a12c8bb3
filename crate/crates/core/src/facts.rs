//! The entity/relation fact model extracted from a project's sources.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type EntityId = u64;

/// Suffix used for constructor FQNs, e.g. `foo.FooNumber.<init>`.
pub const CONSTRUCTOR_NAME: &str = "<init>";

/// FQN given to the package entity of sources without a package clause.
pub const DEFAULT_PACKAGE: &str = "(default)";

/// Prefix marking a name that could not be resolved to a fully-qualified
/// type. `?Foo` is an unresolved type `Foo`; `?.bar` is a call to `bar` on a
/// receiver of unknown type.
pub const UNRESOLVED_MARK: char = '?';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityKind {
    Package,
    Class,
    Interface,
    Enum,
    Annotation,
    Field,
    Constructor,
    Method,
}

impl EntityKind {
    pub const ALL: [EntityKind; 8] = [
        EntityKind::Package,
        EntityKind::Class,
        EntityKind::Interface,
        EntityKind::Enum,
        EntityKind::Annotation,
        EntityKind::Field,
        EntityKind::Constructor,
        EntityKind::Method,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Package => "PACKAGE",
            EntityKind::Class => "CLASS",
            EntityKind::Interface => "INTERFACE",
            EntityKind::Enum => "ENUM",
            EntityKind::Annotation => "ANNOTATION",
            EntityKind::Field => "FIELD",
            EntityKind::Constructor => "CONSTRUCTOR",
            EntityKind::Method => "METHOD",
        }
    }

    /// Class, interface, enum or annotation type.
    pub fn is_type(self) -> bool {
        matches!(
            self,
            EntityKind::Class | EntityKind::Interface | EntityKind::Enum | EntityKind::Annotation
        )
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EntityKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Integrity(format!("unknown entity kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    Contains,
    Holds,
    Writes,
    Reads,
    Calls,
    Instantiates,
    Extends,
    Implements,
    Casts,
    Instanceof,
    Uses,
}

impl RelationKind {
    pub const ALL: [RelationKind; 11] = [
        RelationKind::Contains,
        RelationKind::Holds,
        RelationKind::Writes,
        RelationKind::Reads,
        RelationKind::Calls,
        RelationKind::Instantiates,
        RelationKind::Extends,
        RelationKind::Implements,
        RelationKind::Casts,
        RelationKind::Instanceof,
        RelationKind::Uses,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Contains => "CONTAINS",
            RelationKind::Holds => "HOLDS",
            RelationKind::Writes => "WRITES",
            RelationKind::Reads => "READS",
            RelationKind::Calls => "CALLS",
            RelationKind::Instantiates => "INSTANTIATES",
            RelationKind::Extends => "EXTENDS",
            RelationKind::Implements => "IMPLEMENTS",
            RelationKind::Casts => "CASTS",
            RelationKind::Instanceof => "INSTANCEOF",
            RelationKind::Uses => "USES",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Integrity(format!("unknown relation kind `{s}`")))
    }
}

/// A declaration found in the sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceEntity {
    pub id: EntityId,
    pub fqn: String,
    pub kind: EntityKind,
    pub project_id: String,
    /// Path relative to the project root, `/`-separated.
    pub file: String,
    /// 1-based.
    pub line: u32,
}

/// Relation endpoint: either an entity of the same project or a name that
/// does not correspond to any declared entity (JDK, external library, or an
/// unresolved name carrying [`UNRESOLVED_MARK`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Entity(EntityId),
    Name(String),
}

impl Target {
    pub fn entity(&self) -> Option<EntityId> {
        match self {
            Target::Entity(id) => Some(*id),
            Target::Name(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactRelation {
    pub source: EntityId,
    pub kind: RelationKind,
    pub target: Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileSloc {
    pub path: String,
    pub sloc: u64,
}

/// All facts of one project.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProjectFacts {
    pub project_id: String,
    /// Sorted by id.
    pub entities: Vec<SourceEntity>,
    pub relations: Vec<FactRelation>,
    pub files: Vec<FileSloc>,
    pub sloc: u64,
}

impl ProjectFacts {
    pub fn empty(project_id: impl Into<String>) -> Self {
        ProjectFacts {
            project_id: project_id.into(),
            ..Default::default()
        }
    }

    pub fn entity(&self, id: EntityId) -> Option<&SourceEntity> {
        self.entities
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.entities[i])
    }

    pub fn entity_by_fqn(&self, fqn: &str) -> Option<&SourceEntity> {
        self.entities.iter().find(|e| e.fqn == fqn)
    }

    /// Map from child entity id to its CONTAINS parent.
    pub fn parents(&self) -> HashMap<EntityId, EntityId> {
        self.relations
            .iter()
            .filter(|r| r.kind == RelationKind::Contains)
            .filter_map(|r| r.target.entity().map(|child| (child, r.source)))
            .collect()
    }

    /// Resolve a relation target to a printable name.
    pub fn target_name<'a>(&'a self, target: &'a Target) -> Option<&'a str> {
        match target {
            Target::Entity(id) => self.entity(*id).map(|e| e.fqn.as_str()),
            Target::Name(n) => Some(n.as_str()),
        }
    }

    /// Shift every entity id by `offset`.
    pub fn offset_ids(&mut self, offset: EntityId) {
        for e in &mut self.entities {
            e.id += offset;
        }
        for r in &mut self.relations {
            r.source += offset;
            if let Target::Entity(id) = &mut r.target {
                *id += offset;
            }
        }
    }

    pub fn max_id(&self) -> EntityId {
        self.entities.last().map(|e| e.id).unwrap_or(0)
    }

    /// Check the structural invariants of the fact model.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Integrity(format!("{}: {m}", self.project_id)));
        if self.entities.windows(2).any(|w| w[0].id >= w[1].id) {
            return bad("entity ids not strictly increasing".into());
        }
        if let Some(e) = self.entities.iter().find(|e| e.fqn.is_empty()) {
            return bad(format!("entity {} has empty fqn", e.id));
        }
        for r in &self.relations {
            if self.entity(r.source).is_none() {
                return bad(format!("relation source {} not an entity", r.source));
            }
            if let Target::Entity(t) = r.target {
                if self.entity(t).is_none() {
                    return bad(format!("relation target {t} not an entity"));
                }
            }
        }
        let mut parent_count: HashMap<EntityId, usize> = HashMap::new();
        for r in self
            .relations
            .iter()
            .filter(|r| r.kind == RelationKind::Contains)
        {
            if let Some(child) = r.target.entity() {
                *parent_count.entry(child).or_default() += 1;
            }
        }
        for e in &self.entities {
            let n = parent_count.get(&e.id).copied().unwrap_or(0);
            let expected = usize::from(e.kind != EntityKind::Package);
            if n != expected {
                return bad(format!("{} `{}` has {n} CONTAINS parents", e.kind, e.fqn));
            }
        }
        let total: u64 = self.files.iter().map(|f| f.sloc).sum();
        if total != self.sloc {
            return bad(format!("sloc {} != sum of file sloc {total}", self.sloc));
        }
        Ok(())
    }
}

/// Owner type of a CALLS / INSTANTIATES name target (`a.B.m` → `a.B`).
/// Returns `None` for calls on receivers of unknown type.
pub fn owner_of_member(name: &str) -> Option<&str> {
    let (owner, _) = name.rsplit_once('.')?;
    if owner.is_empty() || owner == "?" {
        None
    } else {
        Some(owner)
    }
}

pub fn is_unresolved(name: &str) -> bool {
    name.starts_with(UNRESOLVED_MARK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip_through_names() {
        for k in EntityKind::ALL {
            assert_eq!(k.as_str().parse::<EntityKind>().unwrap(), k);
        }
        for k in RelationKind::ALL {
            assert_eq!(k.as_str().parse::<RelationKind>().unwrap(), k);
        }
        assert!("CLAZZ".parse::<EntityKind>().is_err());
    }

    #[test]
    fn member_owner() {
        assert_eq!(
            owner_of_member("java.io.PrintStream.println"),
            Some("java.io.PrintStream")
        );
        assert_eq!(owner_of_member("foo.Bar.<init>"), Some("foo.Bar"));
        assert_eq!(owner_of_member("?.println"), None);
        assert_eq!(owner_of_member("?Foo.bar"), Some("?Foo"));
        assert_eq!(owner_of_member("bare"), None);
    }

    #[test]
    fn validate_rejects_orphans() {
        let mut f = ProjectFacts::empty("p");
        f.entities.push(SourceEntity {
            id: 1,
            fqn: "A".into(),
            kind: EntityKind::Class,
            project_id: "p".into(),
            file: "A.java".into(),
            line: 1,
        });
        assert!(f.validate().is_err());
    }
}
