//! Rendering check results: a plain-text listing, a JSON document for CI,
//! and a DOT drawing of the access graph with violating edges highlighted.

mod dot;
pub mod dot_syntax;

use std::fmt::Write as _;

use serde::Serialize;

use crate::constraint::Violation;
use crate::graph::{AccessGraph, GraphSummary};

pub use dot::{render_dot, render_dot_styled, DotStyle};

/// The outcome of checking one constraint file against one graph.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub graph_summary: GraphSummary,
    pub violations: Vec<Violation>,
    pub constraint_file: String,
}

impl CheckReport {
    pub fn new(g: &AccessGraph, violations: Vec<Violation>, constraint_file: impl Into<String>) -> Self {
        CheckReport {
            graph_summary: g.summary(),
            violations,
            constraint_file: constraint_file.into(),
        }
    }

    /// 0 when no violation was found, 1 otherwise.
    pub fn exit_status(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }

    /// Distinct violating `(src, tgt)` edges.
    pub fn violating_edges(&self) -> std::collections::BTreeSet<(&str, &str)> {
        self.violations
            .iter()
            .map(|v| (v.src().as_str(), v.tgt().as_str()))
            .collect()
    }
}

fn clause_text(v: &Violation) -> String {
    let text = v.clause.to_string();
    text.strip_suffix('.').map(str::to_owned).unwrap_or(text)
}

/// One `VIOLATION` line per violation followed by a count footer.
pub fn render_text(r: &CheckReport) -> String {
    render_text_with(r, false)
}

/// Like [`render_text`], optionally marking the `VIOLATION` tag with ANSI red.
pub fn render_text_with(r: &CheckReport, color: bool) -> String {
    let tag = if color {
        "\x1b[31mVIOLATION\x1b[0m"
    } else {
        "VIOLATION"
    };
    let mut out = String::new();
    for v in &r.violations {
        let _ = write!(
            out,
            "{tag} {} -> {} [{} @ {}:{}]",
            v.src(),
            v.tgt(),
            clause_text(v),
            r.constraint_file,
            v.clause.line
        );
        if !v.occurrences().is_empty() {
            let locs: Vec<String> = v
                .occurrences()
                .iter()
                .map(|l| format!("{}:{}", l.file, l.line))
                .collect();
            let _ = write!(out, " at {}", locs.join(","));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{} violation(s)", r.violations.len());
    out
}

#[derive(Serialize)]
struct StructuredReport<'a> {
    summary: Summary<'a>,
    violations: Vec<StructuredViolation<'a>>,
}

#[derive(Serialize)]
struct Summary<'a> {
    constraint_file: &'a str,
    nodes: usize,
    uses: usize,
    contains: usize,
    isa: usize,
    virtual_contains: usize,
    violations: usize,
    exit_status: i32,
}

#[derive(Serialize)]
struct StructuredViolation<'a> {
    src: &'a str,
    tgt: &'a str,
    judged_viewer: &'a str,
    clause_text: String,
    clause_line: u32,
    occurrences: Vec<Occurrence<'a>>,
}

#[derive(Serialize)]
struct Occurrence<'a> {
    file: &'a str,
    line: u32,
}

/// The report as a single JSON object with fixed key order.
pub fn render_structured(r: &CheckReport) -> String {
    let s = &r.graph_summary;
    let doc = StructuredReport {
        summary: Summary {
            constraint_file: &r.constraint_file,
            nodes: s.nodes,
            uses: s.uses,
            contains: s.contains,
            isa: s.isa,
            virtual_contains: s.virtual_contains,
            violations: r.violations.len(),
            exit_status: r.exit_status(),
        },
        violations: r
            .violations
            .iter()
            .map(|v| StructuredViolation {
                src: v.src().as_str(),
                tgt: v.tgt().as_str(),
                judged_viewer: v.judged_viewer.as_str(),
                clause_text: clause_text(v),
                clause_line: v.clause.line,
                occurrences: v
                    .occurrences()
                    .iter()
                    .map(|l| Occurrence {
                        file: &l.file,
                        line: l.line,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string(&doc).expect("report serializes");
    out.push('\n');
    out
}
