//! Source-code size scaling analysis: extract structural facts from Java
//! projects, derive per-project size metrics, fit power laws between them,
//! and compare, validate and normalize the results.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extract;
pub mod facts;
pub mod java;
pub mod metrics;
pub mod normalize;
pub mod pipeline;
pub mod provenance;
pub mod report;
pub mod scaling;
pub mod stats;
pub mod store;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
pub use facts::{EntityKind, FactRelation, ProjectFacts, RelationKind, SourceEntity, Target};
pub use metrics::{compute_metrics, MetricsConfig, ProjectMetrics};
pub use pipeline::{run_pipeline, RunConfig, RunSummary};
pub use scaling::{fit_log_power, fit_robust_log_power, predict, FitOptions, FitResult};
pub use store::FactsArchive;
pub use synth::SynthSpec;
