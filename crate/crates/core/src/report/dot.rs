use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::CheckReport;
use crate::graph::{AccessGraph, EntityId, EntityKind, GraphError};

/// Drawing conventions. The defaults draw `uses` as solid lines, `contains`
/// as dashed lines and violating edges in red.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotStyle {
    pub uses_style: String,
    pub contains_style: String,
    pub virtual_contains_style: String,
    pub violation_color: String,
}

impl Default for DotStyle {
    fn default() -> Self {
        DotStyle {
            uses_style: "solid".into(),
            contains_style: "dashed".into(),
            virtual_contains_style: "dotted".into(),
            violation_color: "red".into(),
        }
    }
}

fn shape(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Package | EntityKind::Class | EntityKind::Interface => "shape=box",
        EntityKind::Method | EntityKind::Constructor => "shape=diamond",
        EntityKind::Field => "shape=ellipse",
        EntityKind::Virtual => "shape=box, style=dashed",
        EntityKind::Unresolved => "shape=plaintext",
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn label(id: &EntityId) -> String {
    format!("{}{}", id.display_name(), id.params().unwrap_or(""))
}

/// DOT digraph of `g` with the default style.
///
/// With `filter`, only the declaration scope of that entity is drawn, plus
/// the sources of `uses` edges entering it.
pub fn render_dot(
    g: &AccessGraph,
    report: Option<&CheckReport>,
    filter: Option<&EntityId>,
) -> Result<String, GraphError> {
    render_dot_styled(g, report, filter, &DotStyle::default())
}

pub fn render_dot_styled(
    g: &AccessGraph,
    report: Option<&CheckReport>,
    filter: Option<&EntityId>,
    style: &DotStyle,
) -> Result<String, GraphError> {
    let red: BTreeSet<(&str, &str)> = report.map(|r| r.violating_edges()).unwrap_or_default();

    let scope = match filter {
        Some(f) => Some(g.contains_star(f)?),
        None => None,
    };
    let in_scope = |id: &EntityId| scope.as_ref().is_none_or(|s| s.contains(id));
    let mut shown: BTreeSet<&EntityId> = g.node_ids().filter(|id| in_scope(id)).collect();
    if scope.is_some() {
        for e in g.uses_edges() {
            if in_scope(&e.tgt) {
                shown.insert(&e.src);
            }
        }
    }

    let mut out = String::from("digraph access_graph {\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    for id in &shown {
        let node = g.node(id).expect("shown nodes exist");
        let _ = writeln!(
            out,
            "  {} [label={}, {}];",
            quote(id.as_str()),
            quote(&label(id)),
            shape(node.kind)
        );
    }
    for (a, b) in g.contains_pairs() {
        if in_scope(a) && in_scope(b) {
            let _ = writeln!(
                out,
                "  {} -> {} [style={}];",
                quote(a.as_str()),
                quote(b.as_str()),
                style.contains_style
            );
        }
    }
    for (a, b) in g.virtual_contains_pairs() {
        if shown.contains(a) && shown.contains(b) {
            let _ = writeln!(
                out,
                "  {} -> {} [style={}];",
                quote(a.as_str()),
                quote(b.as_str()),
                style.virtual_contains_style
            );
        }
    }
    for e in g.uses_edges() {
        if !in_scope(&e.tgt) {
            continue;
        }
        let _ = write!(
            out,
            "  {} -> {} [style={}",
            quote(e.src.as_str()),
            quote(e.tgt.as_str()),
            style.uses_style
        );
        if red.contains(&(e.src.as_str(), e.tgt.as_str())) {
            let _ = write!(out, ", color={}", quote(&style.violation_color));
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    Ok(out)
}
