//! First-order semantics of constraint programs over an access graph.
//!
//! Every high-level predicate reduces to a set of `hideFrom(e, i)` facts
//! (`e` is hidden from viewer `i`). `canSee(v, t)` cancels `hideFrom(t, i)`
//! for every `i` in the generalized scope of `v`, and a `uses(a, b)` edge is a
//! violation when `hiddenFrom(b, a)` survives.
//!
//! Facts are never materialized: each clause is bound once to the closure
//! sets it quantifies over and queried by membership.

use std::collections::BTreeSet;

use thiserror::Error;

use super::lang::{ConstraintClause, ConstraintProgram, ProgramClause, Ref};
use crate::graph::{
    AccessGraph, EntityId, EntityKind, EntityNode, GraphError, LookupError, SourceLocation,
    UsesEdge,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BindError {
    #[error("line {line}: no entity named `{reference}`")]
    UnknownName { reference: String, line: u32 },
    #[error("line {line}: `{reference}` is ambiguous ({})", candidates.iter().map(EntityId::as_str).collect::<Vec<_>>().join(", "))]
    AmbiguousName {
        reference: String,
        candidates: Vec<EntityId>,
        line: u32,
    },
    #[error("line {line}: `{reference}` is not a set declared with declareSet or virtualScope")]
    NotASet { reference: String, line: u32 },
    #[error("line {line}: virtual scope `{name}` clashes with a program entity")]
    NameClash { name: String, line: u32 },
    #[error("line {line}: {source}")]
    Graph {
        #[source]
        source: GraphError,
        line: u32,
    },
}

/// Who a scope rule hides its members from.
#[derive(Debug, Clone)]
enum Interlopers {
    Everyone,
    Only(BTreeSet<EntityId>),
}

#[derive(Debug, Clone)]
enum RuleKind {
    /// Raw `hideFrom(target, viewer)`.
    Pair { target: EntityId, viewer: EntityId },
    /// `hideScope(s, facades, interlopers, friends)` after expansion; every
    /// set is already closed under generalized containment.
    Scope {
        hidden: BTreeSet<EntityId>,
        facades: BTreeSet<EntityId>,
        interlopers: Interlopers,
        friends: BTreeSet<EntityId>,
        exempt: BTreeSet<EntityId>,
    },
}

#[derive(Debug, Clone)]
struct Rule {
    clause: usize,
    kind: RuleKind,
}

impl Rule {
    fn holds(&self, target: &EntityId, viewer: &EntityId) -> bool {
        match &self.kind {
            RuleKind::Pair { target: t, viewer: v } => t == target && v == viewer,
            RuleKind::Scope {
                hidden,
                facades,
                interlopers,
                friends,
                exempt,
            } => {
                hidden.contains(target)
                    && !facades.contains(target)
                    && match interlopers {
                        Interlopers::Everyone => true,
                        Interlopers::Only(set) => set.contains(viewer),
                    }
                    && !friends.contains(viewer)
                    && !hidden.contains(viewer)
                    && !exempt.contains(viewer)
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Exception {
    target: EntityId,
    viewers: BTreeSet<EntityId>,
}

/// A constraint program whose names are bound to graph nodes.
#[derive(Debug, Clone)]
pub struct BoundProgram {
    program: ConstraintProgram,
    graph: AccessGraph,
    rules: Vec<Rule>,
    exceptions: Vec<Exception>,
}

/// A `uses` edge forbidden by the program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub edge: UsesEdge,
    /// The edge source, or the enclosing scope named by a raw `hideFrom`.
    pub judged_viewer: EntityId,
    pub clause: ProgramClause,
}

impl Violation {
    pub fn src(&self) -> &EntityId {
        &self.edge.src
    }

    pub fn tgt(&self) -> &EntityId {
        &self.edge.tgt
    }

    pub fn occurrences(&self) -> &[SourceLocation] {
        &self.edge.occurrences
    }
}

struct Binder {
    graph: AccessGraph,
    line: u32,
}

impl Binder {
    fn resolve(&self, r: &Ref) -> Result<EntityId, BindError> {
        self.graph.lookup(r.as_str()).map_err(|e| match e {
            LookupError::Unknown(reference) => BindError::UnknownName {
                reference,
                line: self.line,
            },
            LookupError::Ambiguous {
                reference,
                candidates,
            } => BindError::AmbiguousName {
                reference,
                candidates,
                line: self.line,
            },
        })
    }

    fn scope(&self, r: &Ref) -> Result<BTreeSet<EntityId>, BindError> {
        let id = self.resolve(r)?;
        Ok(self
            .graph
            .g_contains_star(&id)
            .expect("resolved ids exist"))
    }

    fn scopes(&self, refs: &[Ref]) -> Result<BTreeSet<EntityId>, BindError> {
        let mut out = BTreeSet::new();
        for r in refs {
            out.extend(self.scope(r)?);
        }
        Ok(out)
    }

    fn scope_rule(
        &self,
        scope: &Ref,
        facades: &[Ref],
        interlopers: Option<&[Ref]>,
        friends: &[Ref],
    ) -> Result<RuleKind, BindError> {
        Ok(RuleKind::Scope {
            hidden: self.scope(scope)?,
            facades: self.scopes(facades)?,
            interlopers: match interlopers {
                None => Interlopers::Everyone,
                Some(refs) => Interlopers::Only(self.scopes(refs)?),
            },
            friends: self.scopes(friends)?,
            exempt: BTreeSet::new(),
        })
    }

    /// Owners of set members never count as interlopers: every proper
    /// `contains` ancestor of a member, and the declaration scope of the
    /// member's owner.
    fn set_exemptions(&self, set: &EntityId) -> BTreeSet<EntityId> {
        let mut out = BTreeSet::new();
        for member in self.graph.virtual_members(set) {
            let chain = self.graph.ancestors(member).expect("member exists");
            out.extend(chain.iter().skip(1).cloned());
            if let Some(owner) = self.graph.parent(member) {
                out.extend(self.graph.contains_star(owner).expect("owner exists"));
            }
        }
        out
    }
}

/// Binds every name in `program` against `g`.
///
/// `virtualScope` and `declareSet` clauses become `virtual` nodes with
/// `virtual_contains` edges in a working copy of `g`; the input graph is not
/// modified.
pub fn bind_refs(program: &ConstraintProgram, g: &AccessGraph) -> Result<BoundProgram, BindError> {
    let mut b = Binder {
        graph: g.clone(),
        line: 0,
    };

    // Scope names first, so definitions may appear anywhere in the file.
    let mut defined = Vec::new();
    for pc in &program.clauses {
        if let Some((name, elements)) = pc.clause.defined_scope() {
            b.line = pc.line;
            let id = EntityId::new(name.as_str()).map_err(|source| BindError::Graph {
                source,
                line: pc.line,
            })?;
            if g.contains_node(&id) {
                return Err(BindError::NameClash {
                    name: name.0.clone(),
                    line: pc.line,
                });
            }
            b.graph
                .add_node(EntityNode::new(id.clone(), EntityKind::Virtual))
                .map_err(|source| BindError::Graph {
                    source,
                    line: pc.line,
                })?;
            defined.push((id, elements, pc.line));
        }
    }
    for (id, elements, line) in defined {
        b.line = line;
        for e in elements {
            let member = b.resolve(e)?;
            b.graph
                .add_virtual_contains(&id, &member)
                .map_err(|source| BindError::Graph { source, line })?;
        }
    }

    let mut rules = Vec::new();
    let mut exceptions = Vec::new();
    for (idx, pc) in program.clauses.iter().enumerate() {
        b.line = pc.line;
        let mut push = |kind| rules.push(Rule { clause: idx, kind });
        match &pc.clause {
            ConstraintClause::HideFrom { target, viewer } => push(RuleKind::Pair {
                target: b.resolve(target)?,
                viewer: b.resolve(viewer)?,
            }),
            ConstraintClause::CanSee { viewer, target } => exceptions.push(Exception {
                target: b.resolve(target)?,
                viewers: b.scope(viewer)?,
            }),
            ConstraintClause::HideScope { scope } => push(b.scope_rule(scope, &[], None, &[])?),
            ConstraintClause::HideScopeBut { scope, facades } => {
                push(b.scope_rule(scope, facades, None, &[])?)
            }
            ConstraintClause::HideScopeFrom { scope, interlopers } => {
                push(b.scope_rule(scope, &[], Some(interlopers), &[])?)
            }
            ConstraintClause::HideScopeButFrom { scope, friends } => {
                push(b.scope_rule(scope, &[], None, friends)?)
            }
            ConstraintClause::HideScope4 {
                scope,
                facades,
                interlopers,
                friends,
            } => push(b.scope_rule(scope, facades, Some(interlopers), friends)?),
            ConstraintClause::VirtualScope { .. } | ConstraintClause::DeclareSet { .. } => {}
            ConstraintClause::HideSet { name } => {
                let set = b.resolve(name)?;
                if b.graph.kind_of(&set) != Ok(EntityKind::Virtual) {
                    return Err(BindError::NotASet {
                        reference: name.0.clone(),
                        line: pc.line,
                    });
                }
                let mut kind = b.scope_rule(name, &[], None, &[])?;
                if let RuleKind::Scope { exempt, .. } = &mut kind {
                    *exempt = b.set_exemptions(&set);
                }
                push(kind);
            }
            ConstraintClause::Layers { layers } => {
                push(b.scope_rule(&layers[0], &[], Some(&layers[1..]), &[])?);
                for pair in layers.windows(2) {
                    push(b.scope_rule(&pair[1], &[], None, &pair[..1])?);
                }
            }
        }
    }

    Ok(BoundProgram {
        program: program.clone(),
        graph: b.graph,
        rules,
        exceptions,
    })
}

impl BoundProgram {
    pub fn program(&self) -> &ConstraintProgram {
        &self.program
    }

    /// The graph extended with the program's virtual scopes.
    pub fn graph(&self) -> &AccessGraph {
        &self.graph
    }

    fn clause(&self, idx: usize) -> &ProgramClause {
        &self.program.clauses[idx]
    }

    /// First clause, in file order, whose expansion yields
    /// `hideFrom(target, viewer)`.
    pub fn hide_from_holds(&self, target: &EntityId, viewer: &EntityId) -> Option<&ProgramClause> {
        self.rules
            .iter()
            .find(|r| r.holds(target, viewer))
            .map(|r| self.clause(r.clause))
    }

    /// Whether some `canSee(v, target)` covers `viewer`.
    pub fn can_see(&self, viewer: &EntityId, target: &EntityId) -> bool {
        self.exceptions
            .iter()
            .any(|x| &x.target == target && x.viewers.contains(viewer))
    }

    /// `hideFrom(target, viewer) ∧ ¬canSee(viewer, target)`.
    pub fn hidden_from(&self, target: &EntityId, viewer: &EntityId) -> Option<&ProgramClause> {
        if self.can_see(viewer, target) {
            return None;
        }
        self.hide_from_holds(target, viewer)
    }

    /// Judges one `uses` edge. Scope rules are evaluated at the edge
    /// source; a raw `hideFrom(b, a)` also forbids `b` to everything `a`
    /// contains, so it is matched against the owner chain of the source.
    fn judge(&self, src: &EntityId, tgt: &EntityId) -> Option<(EntityId, usize)> {
        if self.can_see(src, tgt) {
            return None;
        }
        let chain = self.graph.ancestors(src).ok()?;
        for (depth, viewer) in chain.into_iter().enumerate() {
            let hit = self.rules.iter().find(|r| match r.kind {
                RuleKind::Scope { .. } if depth > 0 => false,
                _ => r.holds(tgt, &viewer),
            });
            if let Some(r) = hit {
                return Some((viewer, r.clause));
            }
        }
        None
    }

    /// Every violating `uses` edge of `g`, sorted by (src, tgt).
    pub fn check(&self, g: &AccessGraph) -> Vec<Violation> {
        g.uses_edges()
            .filter_map(|e| {
                let (judged_viewer, idx) = self.judge(&e.src, &e.tgt)?;
                Some(Violation {
                    edge: e.clone(),
                    judged_viewer,
                    clause: self.clause(idx).clone(),
                })
            })
            .collect()
    }
}

/// Convenience wrapper over [`BoundProgram::check`].
pub fn check(bp: &BoundProgram, g: &AccessGraph) -> Vec<Violation> {
    bp.check(g)
}
