//! Java source analysis: tokenizer, SLOC counter, declaration parser and
//! the fact extractor built on them.

mod body;
pub mod decl;
pub mod index;
pub mod lexer;
mod project;
pub mod sloc;

pub use project::{extract_sources, Diagnostic, SourceFile};
pub use sloc::count_sloc;
