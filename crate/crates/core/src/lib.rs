//! Coupling-constraint checking over access graphs.
//!
//! A program is abstracted as an [`AccessGraph`]: declared entities
//! (packages, types, members) connected by `uses`, `contains` and `isA`
//! edges. Constraints such as `hideScope('p.Secret').` or
//! `layers(['app', 'business', 'storage']).` say which uses are forbidden;
//! [`check`] lists the edges that break them.
//!
//! ```
//! use archlint::{bind_refs, check, javalite, parse_constraints};
//!
//! let g = javalite::extract(&[
//!     ("A.jl".into(), "class A { int x; }".into()),
//!     ("B.jl".into(), "class B { int m(A a) { return a.x; } }".into()),
//! ])
//! .unwrap();
//! let program = parse_constraints("hideScope('A').").unwrap();
//! let bound = bind_refs(&program, &g).unwrap();
//! let violations = check(&bound, &g);
//! assert_eq!(violations.len(), 2); // B.m(A) uses both A and A.x
//! ```

pub mod clause;
pub mod cli;
pub mod constraint;
pub mod facts;
pub mod graph;
pub mod javalite;
pub mod report;

pub use constraint::{
    bind_refs, check, parse_constraints, BindError, BoundProgram, ConstraintClause,
    ConstraintError, ConstraintProgram, Violation,
};
pub use facts::{emit_facts, parse_facts, FactsError};
pub use graph::{AccessGraph, EntityId, EntityKind, GraphError, SourceLocation, UsesEdge};
pub use report::{render_dot, render_structured, render_text, CheckReport};
