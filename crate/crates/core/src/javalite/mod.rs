//! Frontend for JavaLite, a small Java subset: packages, single-type
//! imports, classes and interfaces with fields, methods and constructors,
//! and the usual statements and expressions.
//!
//! ```
//! use archlint::javalite::extract;
//!
//! let g = extract(&[(
//!     "A.jl".to_string(),
//!     "class A { B b; }".to_string(),
//! )])
//! .unwrap();
//! let a_b = "A.b".parse().unwrap();
//! let b = "B".parse().unwrap();
//! assert!(g.uses_edge(&a_b, &b).is_some());
//! ```

pub mod ast;
mod lexer;
mod parser;
mod resolve;

use std::fmt;

use thiserror::Error;

pub use ast::CompilationUnit;
pub use parser::parse_unit;
pub use resolve::{resolve, resolve_detailed, Resolution, ResolveError, ResolvedName};

use crate::graph::AccessGraph;

/// Source extensions picked up when scanning directories.
pub const SOURCE_EXTENSIONS: &[&str] = &["jl", "java"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}:{line}:{column}: expected {expected}")]
pub struct ParseError {
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub expected: String,
}

/// Every file that failed to parse, one error per file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{0}")]
    Parse(ParseErrors),
    #[error("{0}")]
    Resolve(#[from] ResolveError),
}

pub(crate) fn is_primitive(name: &str) -> bool {
    matches!(
        name,
        "int" | "long" | "short" | "byte" | "char" | "boolean" | "double" | "float"
    )
}

/// Parses `(path, text)` pairs. Files are parsed independently; all
/// failures are reported together.
pub fn parse_source(files: &[(String, String)]) -> Result<Vec<CompilationUnit>, ParseErrors> {
    let mut units = Vec::with_capacity(files.len());
    let mut errors = Vec::new();
    for (path, text) in files {
        match parse_unit(path, text) {
            Ok(u) => units.push(u),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(units)
    } else {
        Err(ParseErrors(errors))
    }
}

/// Parses and resolves in one step.
pub fn extract(files: &[(String, String)]) -> Result<AccessGraph, FrontendError> {
    let units = parse_source(files).map_err(FrontendError::Parse)?;
    Ok(resolve(&units)?)
}
