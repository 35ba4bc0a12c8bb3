//! Where a used type comes from: the project itself, the JDK, or elsewhere.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::facts::{is_unresolved, ProjectFacts};

pub const DEFAULT_JDK_PREFIXES: &[&str] = &["java.", "javax."];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Internal,
    Jdk,
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Internal => "INTERNAL",
            Provenance::Jdk => "JDK",
            Provenance::External => "EXTERNAL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classified {
    pub provenance: Provenance,
    /// The name could not be resolved to a fully-qualified type.
    pub unresolved: bool,
}

/// Classifier with the project's declared types indexed once.
pub struct ProvenanceClassifier<'a> {
    declared: HashSet<&'a str>,
    jdk_prefixes: &'a [String],
}

impl<'a> ProvenanceClassifier<'a> {
    pub fn new(facts: &'a ProjectFacts, jdk_prefixes: &'a [String]) -> Self {
        let declared = facts
            .entities
            .iter()
            .filter(|e| e.kind.is_type())
            .map(|e| e.fqn.as_str())
            .collect();
        ProvenanceClassifier {
            declared,
            jdk_prefixes,
        }
    }

    pub fn classify(&self, type_fqn: &str) -> Classified {
        if is_unresolved(type_fqn) {
            return Classified {
                provenance: Provenance::External,
                unresolved: true,
            };
        }
        let provenance = if self.declared.contains(type_fqn) {
            Provenance::Internal
        } else if self
            .jdk_prefixes
            .iter()
            .any(|p| type_fqn.starts_with(p.as_str()))
        {
            Provenance::Jdk
        } else {
            Provenance::External
        };
        Classified {
            provenance,
            unresolved: false,
        }
    }
}

/// INTERNAL if declared in `facts`, JDK if it starts with a JDK prefix,
/// EXTERNAL otherwise (unresolved names are EXTERNAL and flagged).
pub fn classify_provenance(
    type_fqn: &str,
    facts: &ProjectFacts,
    jdk_prefixes: &[String],
) -> Classified {
    ProvenanceClassifier::new(facts, jdk_prefixes).classify(type_fqn)
}

pub fn default_jdk_prefixes() -> Vec<String> {
    DEFAULT_JDK_PREFIXES.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facts::{EntityKind, SourceEntity};

    fn foo() -> ProjectFacts {
        let mut f = ProjectFacts::empty("foo");
        f.entities.push(SourceEntity {
            id: 1,
            fqn: "foo.FooNumber".into(),
            kind: EntityKind::Class,
            project_id: "foo".into(),
            file: "foo/FooNumber.java".into(),
            line: 3,
        });
        f
    }

    #[test]
    fn three_provenances() {
        let f = foo();
        let p = default_jdk_prefixes();
        assert_eq!(
            classify_provenance("foo.FooNumber", &f, &p).provenance,
            Provenance::Internal
        );
        assert_eq!(
            classify_provenance("java.lang.Integer", &f, &p).provenance,
            Provenance::Jdk
        );
        let ext = classify_provenance("org.apache.commons.X", &f, &p);
        assert_eq!(ext.provenance, Provenance::External);
        assert!(!ext.unresolved);
    }

    #[test]
    fn unresolved_is_flagged_external() {
        let f = foo();
        let c = classify_provenance("?Widget", &f, &default_jdk_prefixes());
        assert_eq!(c.provenance, Provenance::External);
        assert!(c.unresolved);
    }

    #[test]
    fn prefixes_are_configurable() {
        let f = foo();
        let p = vec!["sun.".to_string()];
        assert_eq!(
            classify_provenance("sun.misc.Unsafe", &f, &p).provenance,
            Provenance::Jdk
        );
        assert_eq!(
            classify_provenance("java.util.List", &f, &p).provenance,
            Provenance::External
        );
    }
}
