//! The `.facts` format: a language-neutral, line-oriented serialization of
//! an access graph.
//!
//! ```text
//! node('p', package).
//! node('p.A', class).
//! contains('p', 'p.A').
//! isa('p.A', 'p.Base').
//! virtual_contains('Layer', 'p').
//! uses('p.A.m()', 'p.B').
//! uses('p.A.m()', 'p.B', 'src/A.jl', 12).
//! ```
//!
//! `uses/4` carries one occurrence (file and line; the column is not
//! stored and reads back as 1). [`emit_facts`] writes the canonical form:
//! nodes, then `contains`, `isa`, `virtual_contains` and `uses` clauses, each
//! group sorted by id.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::clause::{quote_atom, read_clauses, Clause, SyntaxError, Term};
use crate::graph::{AccessGraph, EntityId, EntityKind, EntityNode, GraphError, SourceLocation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactsError {
    #[error("facts syntax error at {line}:{column}: {reason}")]
    Syntax {
        line: u32,
        column: u32,
        reason: String,
    },
    #[error("`{0}` is referenced by an edge but never declared by a node clause")]
    DanglingReference(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<SyntaxError> for FactsError {
    fn from(e: SyntaxError) -> Self {
        FactsError::Syntax {
            line: e.line,
            column: e.column,
            reason: e.reason,
        }
    }
}

fn syntax(c: &Clause, reason: impl Into<String>) -> FactsError {
    FactsError::Syntax {
        line: c.line,
        column: c.column,
        reason: reason.into(),
    }
}

fn quoted<'a>(c: &Clause, t: &'a Term) -> Result<&'a str, FactsError> {
    match t {
        Term::Quoted(s) => Ok(s),
        other => Err(syntax(
            c,
            format!("expected a quoted atom, found {}", other.describe()),
        )),
    }
}

fn entity(c: &Clause, t: &Term) -> Result<EntityId, FactsError> {
    let s = quoted(c, t)?;
    EntityId::new(s).map_err(|e| syntax(c, e.to_string()))
}

enum Edge {
    Contains(EntityId, EntityId),
    IsA(EntityId, EntityId),
    VirtualContains(EntityId, EntityId),
    Uses(EntityId, EntityId, Option<(String, u32)>),
}

/// Parses a facts document into a graph. Clause order is irrelevant.
pub fn parse_facts(text: &str) -> Result<AccessGraph, FactsError> {
    let clauses = read_clauses(text)?;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for c in &clauses {
        let arity = c.args.len();
        match (c.functor.as_str(), arity) {
            ("node", 2) => {
                let id = entity(c, &c.args[0])?;
                let kind = match &c.args[1] {
                    Term::Bare(k) => k.parse::<EntityKind>().map_err(|e| syntax(c, e))?,
                    other => {
                        return Err(syntax(
                            c,
                            format!("expected an entity kind, found {}", other.describe()),
                        ))
                    }
                };
                nodes.push(EntityNode::new(id, kind));
            }
            ("contains", 2) => edges.push(Edge::Contains(
                entity(c, &c.args[0])?,
                entity(c, &c.args[1])?,
            )),
            ("isa", 2) => edges.push(Edge::IsA(entity(c, &c.args[0])?, entity(c, &c.args[1])?)),
            ("virtual_contains", 2) => edges.push(Edge::VirtualContains(
                entity(c, &c.args[0])?,
                entity(c, &c.args[1])?,
            )),
            ("uses", 2) => edges.push(Edge::Uses(
                entity(c, &c.args[0])?,
                entity(c, &c.args[1])?,
                None,
            )),
            ("uses", 4) => {
                let file = quoted(c, &c.args[2])?.to_owned();
                let line = match c.args[3] {
                    Term::Int(n) if n >= 1 && n <= u32::MAX as u64 => n as u32,
                    _ => return Err(syntax(c, "line must be a positive integer")),
                };
                edges.push(Edge::Uses(
                    entity(c, &c.args[0])?,
                    entity(c, &c.args[1])?,
                    Some((file, line)),
                ));
            }
            (f, n) => return Err(syntax(c, format!("unknown clause {f}/{n}"))),
        }
    }

    let mut g = AccessGraph::new();
    for n in nodes {
        g.add_node(n)?;
    }
    let known = |g: &AccessGraph, ids: [&EntityId; 2]| -> Result<(), FactsError> {
        for id in ids {
            if !g.contains_node(id) {
                return Err(FactsError::DanglingReference(id.to_string()));
            }
        }
        Ok(())
    };
    // Group by relation so the result does not depend on clause order.
    let mut uses: BTreeMap<(EntityId, EntityId), Vec<(String, u32)>> = BTreeMap::new();
    let mut contains = Vec::new();
    let mut isa = Vec::new();
    let mut vcontains = Vec::new();
    for e in edges {
        match e {
            Edge::Contains(a, b) => contains.push((a, b)),
            Edge::IsA(a, b) => isa.push((a, b)),
            Edge::VirtualContains(a, b) => vcontains.push((a, b)),
            Edge::Uses(a, b, occ) => uses.entry((a, b)).or_default().extend(occ),
        }
    }
    for list in [&mut contains, &mut isa, &mut vcontains] {
        list.sort();
    }
    for (a, b) in &contains {
        known(&g, [a, b])?;
        g.add_contains(a, b)?;
    }
    for (a, b) in &isa {
        known(&g, [a, b])?;
        g.add_isa(a, b)?;
    }
    for (a, b) in &vcontains {
        known(&g, [a, b])?;
        g.add_virtual_contains(a, b)?;
    }
    for ((a, b), mut occ) in uses {
        known(&g, [&a, &b])?;
        occ.sort();
        if occ.is_empty() {
            g.add_uses(&a, &b, None)?;
        }
        for (file, line) in occ {
            g.add_uses(&a, &b, Some(SourceLocation::new(file, line, 1)?))?;
        }
    }
    Ok(g)
}

/// Writes the canonical facts document for `g`.
pub fn emit_facts(g: &AccessGraph) -> String {
    let mut out = String::new();
    for n in g.nodes() {
        let _ = writeln!(out, "node({}, {}).", q(&n.id), n.kind);
    }
    for (a, b) in g.contains_pairs() {
        let _ = writeln!(out, "contains({}, {}).", q(a), q(b));
    }
    for (a, b) in g.isa_pairs() {
        let _ = writeln!(out, "isa({}, {}).", q(a), q(b));
    }
    for (a, b) in g.virtual_contains_pairs() {
        let _ = writeln!(out, "virtual_contains({}, {}).", q(a), q(b));
    }
    for e in g.uses_edges() {
        if e.occurrences.is_empty() {
            let _ = writeln!(out, "uses({}, {}).", q(&e.src), q(&e.tgt));
            continue;
        }
        let mut occ: Vec<(&str, u32)> = e
            .occurrences
            .iter()
            .map(|l| (l.file.as_str(), l.line))
            .collect();
        occ.sort();
        for (file, line) in occ {
            let _ = writeln!(
                out,
                "uses({}, {}, {}, {}).",
                q(&e.src),
                q(&e.tgt),
                quote_atom(file),
                line
            );
        }
    }
    out
}

fn q(id: &EntityId) -> String {
    quote_atom(id.as_str())
}
