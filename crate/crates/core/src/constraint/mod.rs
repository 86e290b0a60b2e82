//! The coupling-constraint language and its evaluation.

mod eval;
mod lang;

pub use eval::{bind_refs, check, BindError, BoundProgram, Violation};
pub use lang::{
    parse_constraints, ConstraintClause, ConstraintError, ConstraintProgram, ProgramClause, Ref,
};
