//! Runs the guide's code snippets as doc-tests; mdbook cannot resolve
//! crate dependencies on its own. One module per chapter so a failure
//! points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/access-graph.md")]
pub mod access_graph {}

#[doc = include_str!("../../../book/src/javalite.md")]
pub mod javalite {}

#[doc = include_str!("../../../book/src/facts.md")]
pub mod facts {}

#[doc = include_str!("../../../book/src/constraints.md")]
pub mod constraints {}

#[doc = include_str!("../../../book/src/checking.md")]
pub mod checking {}

#[doc = include_str!("../../../book/src/reports.md")]
pub mod reports {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
