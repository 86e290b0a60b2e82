use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::clause::{quote_atom, read_clauses, Clause, SyntaxError, Term};

/// A name as written in a constraint file, fully qualified or not.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ref(pub String);

impl Ref {
    pub fn new(name: impl Into<String>) -> Self {
        Ref(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&quote_atom(&self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintClause {
    HideFrom {
        target: Ref,
        viewer: Ref,
    },
    CanSee {
        viewer: Ref,
        target: Ref,
    },
    HideScope {
        scope: Ref,
    },
    HideScopeBut {
        scope: Ref,
        facades: Vec<Ref>,
    },
    HideScopeFrom {
        scope: Ref,
        interlopers: Vec<Ref>,
    },
    HideScopeButFrom {
        scope: Ref,
        friends: Vec<Ref>,
    },
    /// `hideScope(s, facades, interlopers, friends)`.
    HideScope4 {
        scope: Ref,
        facades: Vec<Ref>,
        interlopers: Vec<Ref>,
        friends: Vec<Ref>,
    },
    VirtualScope {
        name: Ref,
        elements: Vec<Ref>,
    },
    DeclareSet {
        name: Ref,
        elements: Vec<Ref>,
    },
    HideSet {
        name: Ref,
    },
    Layers {
        layers: Vec<Ref>,
    },
}

impl ConstraintClause {
    pub fn functor(&self) -> &'static str {
        match self {
            ConstraintClause::HideFrom { .. } => "hideFrom",
            ConstraintClause::CanSee { .. } => "canSee",
            ConstraintClause::HideScope { .. } | ConstraintClause::HideScope4 { .. } => {
                "hideScope"
            }
            ConstraintClause::HideScopeBut { .. } => "hideScopeBut",
            ConstraintClause::HideScopeFrom { .. } => "hideScopeFrom",
            ConstraintClause::HideScopeButFrom { .. } => "hideScopeButFrom",
            ConstraintClause::VirtualScope { .. } => "virtualScope",
            ConstraintClause::DeclareSet { .. } => "declareSet",
            ConstraintClause::HideSet { .. } => "hideSet",
            ConstraintClause::Layers { .. } => "layers",
        }
    }

    /// The virtual scope this clause defines, if any.
    pub fn defined_scope(&self) -> Option<(&Ref, &[Ref])> {
        match self {
            ConstraintClause::VirtualScope { name, elements }
            | ConstraintClause::DeclareSet { name, elements } => Some((name, elements)),
            _ => None,
        }
    }
}

struct List<'a>(&'a [Ref]);

impl fmt::Display for List<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for ConstraintClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.functor();
        match self {
            ConstraintClause::HideFrom { target, viewer } => {
                write!(f, "{name}({target}, {viewer}).")
            }
            ConstraintClause::CanSee { viewer, target } => {
                write!(f, "{name}({viewer}, {target}).")
            }
            ConstraintClause::HideScope { scope } => write!(f, "{name}({scope})."),
            ConstraintClause::HideSet { name: set } => write!(f, "{name}({set})."),
            ConstraintClause::HideScopeBut {
                scope,
                facades: list,
            }
            | ConstraintClause::HideScopeFrom {
                scope,
                interlopers: list,
            }
            | ConstraintClause::HideScopeButFrom {
                scope,
                friends: list,
            }
            | ConstraintClause::VirtualScope {
                name: scope,
                elements: list,
            }
            | ConstraintClause::DeclareSet {
                name: scope,
                elements: list,
            } => write!(f, "{name}({scope}, {}).", List(list)),
            ConstraintClause::HideScope4 {
                scope,
                facades,
                interlopers,
                friends,
            } => write!(
                f,
                "{name}({scope}, {}, {}, {}).",
                List(facades),
                List(interlopers),
                List(friends)
            ),
            ConstraintClause::Layers { layers } => write!(f, "{name}({}).", List(layers)),
        }
    }
}

/// A clause together with where it was written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramClause {
    pub clause: ConstraintClause,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for ProgramClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.clause.fmt(f)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintProgram {
    pub clauses: Vec<ProgramClause>,
}

impl ConstraintProgram {
    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    /// Appends a clause positioned after the last existing one.
    pub fn push(&mut self, clause: ConstraintClause) {
        let line = self.clauses.last().map_or(1, |c| c.line + 1);
        self.clauses.push(ProgramClause {
            clause,
            line,
            column: 1,
        });
    }
}

impl fmt::Display for ConstraintProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("constraint syntax error at {line}:{column}: {reason}")]
    Syntax {
        line: u32,
        column: u32,
        reason: String,
    },
    #[error("line {line}: unknown predicate {name}/{arity}")]
    UnknownPredicate {
        name: String,
        arity: usize,
        line: u32,
    },
    #[error("line {line}: hiddenFrom is derived, not declared; write hideFrom instead")]
    ReservedPredicate { line: u32 },
    #[error("line {line}: scope name `{name}` is already defined")]
    DuplicateScopeName { name: String, line: u32 },
}

impl From<SyntaxError> for ConstraintError {
    fn from(e: SyntaxError) -> Self {
        ConstraintError::Syntax {
            line: e.line,
            column: e.column,
            reason: e.reason,
        }
    }
}

fn syntax(c: &Clause, reason: impl Into<String>) -> ConstraintError {
    ConstraintError::Syntax {
        line: c.line,
        column: c.column,
        reason: reason.into(),
    }
}

fn one_ref(c: &Clause, t: &Term) -> Result<Ref, ConstraintError> {
    match t {
        Term::Quoted(s) => Ok(Ref::new(s.as_str())),
        other => Err(syntax(
            c,
            format!("expected a quoted name, found {}", other.describe()),
        )),
    }
}

/// A bracketed list of names. A single quoted name is read as a one-element
/// list.
fn ref_list(c: &Clause, t: &Term) -> Result<Vec<Ref>, ConstraintError> {
    match t {
        Term::List(items) => items.iter().map(|t| one_ref(c, t)).collect(),
        Term::Quoted(_) => Ok(vec![one_ref(c, t)?]),
        other => Err(syntax(
            c,
            format!("expected a list of quoted names, found {}", other.describe()),
        )),
    }
}

fn convert(c: &Clause) -> Result<ConstraintClause, ConstraintError> {
    let a = &c.args;
    let clause = match (c.functor.as_str(), a.len()) {
        ("hiddenFrom", _) => return Err(ConstraintError::ReservedPredicate { line: c.line }),
        ("hideFrom", 2) => ConstraintClause::HideFrom {
            target: one_ref(c, &a[0])?,
            viewer: one_ref(c, &a[1])?,
        },
        ("canSee", 2) => ConstraintClause::CanSee {
            viewer: one_ref(c, &a[0])?,
            target: one_ref(c, &a[1])?,
        },
        ("hideScope", 1) => ConstraintClause::HideScope {
            scope: one_ref(c, &a[0])?,
        },
        ("hideScope", 4) => ConstraintClause::HideScope4 {
            scope: one_ref(c, &a[0])?,
            facades: ref_list(c, &a[1])?,
            interlopers: ref_list(c, &a[2])?,
            friends: ref_list(c, &a[3])?,
        },
        ("hideScopeBut", 2) => ConstraintClause::HideScopeBut {
            scope: one_ref(c, &a[0])?,
            facades: ref_list(c, &a[1])?,
        },
        ("hideScopeFrom", 2) => ConstraintClause::HideScopeFrom {
            scope: one_ref(c, &a[0])?,
            interlopers: ref_list(c, &a[1])?,
        },
        ("hideScopeButFrom", 2) => ConstraintClause::HideScopeButFrom {
            scope: one_ref(c, &a[0])?,
            friends: ref_list(c, &a[1])?,
        },
        ("virtualScope", 2) => ConstraintClause::VirtualScope {
            name: one_ref(c, &a[0])?,
            elements: ref_list(c, &a[1])?,
        },
        ("declareSet", 2) => ConstraintClause::DeclareSet {
            name: one_ref(c, &a[0])?,
            elements: ref_list(c, &a[1])?,
        },
        ("hideSet", 1) => ConstraintClause::HideSet {
            name: one_ref(c, &a[0])?,
        },
        ("layers", 1) => {
            let layers = match &a[0] {
                Term::List(_) => ref_list(c, &a[0])?,
                other => {
                    return Err(syntax(
                        c,
                        format!("expected a list of layers, found {}", other.describe()),
                    ))
                }
            };
            if layers.len() < 2 {
                return Err(syntax(c, "layers needs at least two layers"));
            }
            ConstraintClause::Layers { layers }
        }
        (name, arity) => {
            return Err(ConstraintError::UnknownPredicate {
                name: name.to_owned(),
                arity,
                line: c.line,
            })
        }
    };
    Ok(clause)
}

/// Parses a constraint file. Clauses keep file order.
pub fn parse_constraints(text: &str) -> Result<ConstraintProgram, ConstraintError> {
    let mut clauses = Vec::new();
    let mut defined = BTreeSet::new();
    for c in read_clauses(text)? {
        let clause = convert(&c)?;
        if let Some((name, _)) = clause.defined_scope() {
            if !defined.insert(name.0.clone()) {
                return Err(ConstraintError::DuplicateScopeName {
                    name: name.0.clone(),
                    line: c.line,
                });
            }
        }
        clauses.push(ProgramClause {
            clause,
            line: c.line,
            column: c.column,
        });
    }
    Ok(ConstraintProgram { clauses })
}
