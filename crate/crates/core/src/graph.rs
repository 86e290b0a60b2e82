//! Access graphs.
//!
//! Nodes are declared entities (packages, types, members) plus the virtual
//! scopes introduced by constraint programs. Four relations connect them:
//! `uses` (one entity names another inside its declaration scope),
//! `contains` (owner scope to owned entity, a forest), `isA` (subtype to
//! supertype, acyclic) and `virtual_contains` (virtual scope to member).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid entity id `{0}`: {1}")]
    InvalidId(String, &'static str),
    #[error("invalid source location {file}:{line}:{column}: line and column start at 1")]
    InvalidLocation {
        file: String,
        line: u32,
        column: u32,
    },
    #[error("entity `{id}` already declared as {existing}, cannot redeclare as {requested}")]
    KindConflict {
        id: EntityId,
        existing: EntityKind,
        requested: EntityKind,
    },
    #[error("unknown entity `{0}`")]
    UnknownEntity(EntityId),
    #[error("`{0}` cannot use itself")]
    SelfUse(EntityId),
    #[error("contains(`{parent}`, `{child}`) would give `{child}` a second owner or close a cycle")]
    ContainsCycleOrSecondParent { parent: EntityId, child: EntityId },
    #[error("isA(`{sub}`, `{sup}`) would close an inheritance cycle")]
    IsACycle { sub: EntityId, sup: EntityId },
    #[error("{relation} edge `{from}` -> `{to}` is not allowed for {reason}")]
    KindMismatch {
        relation: Relation,
        from: EntityId,
        to: EntityId,
        reason: &'static str,
    },
}

/// Canonical fully qualified name of a declared entity.
///
/// Callables carry one trailing parameter group, e.g. `p.ImageDoc.ImageDoc()`
/// or `p.ImageMgr.main(String[])`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(name: impl Into<String>) -> Result<Self, GraphError> {
        let name = name.into();
        if let Err(reason) = validate_id(&name) {
            return Err(GraphError::InvalidId(name, reason));
        }
        Ok(EntityId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The id without its parameter group.
    pub fn base(&self) -> &str {
        match self.0.find('(') {
            Some(i) => &self.0[..i],
            None => &self.0,
        }
    }

    /// The parameter group including parentheses, for callables.
    pub fn params(&self) -> Option<&str> {
        self.0.find('(').map(|i| &self.0[i..])
    }

    pub fn is_callable(&self) -> bool {
        self.params().is_some()
    }

    /// Final dot-segment of the id, minus the parameter list.
    pub fn display_name(&self) -> &str {
        let base = self.base();
        match base.rfind('.') {
            Some(i) => &base[i + 1..],
            None => base,
        }
    }

    /// Child id `self.segment`.
    pub fn child(&self, segment: &str) -> Result<EntityId, GraphError> {
        EntityId::new(format!("{}.{}", self.0, segment))
    }
}

fn validate_id(name: &str) -> Result<(), &'static str> {
    if name.is_empty() {
        return Err("empty");
    }
    if name.chars().any(char::is_whitespace) {
        return Err("contains whitespace");
    }
    let (base, params) = match name.find('(') {
        Some(i) => (&name[..i], Some(&name[i..])),
        None => (name, None),
    };
    if base.contains(')') {
        return Err("stray `)`");
    }
    if let Some(params) = params {
        let inner = &params[1..];
        if !inner.ends_with(')') || inner[..inner.len() - 1].contains(['(', ')']) {
            return Err("at most one trailing parameter group is allowed");
        }
    }
    if base.is_empty() || base.split('.').any(str::is_empty) {
        return Err("empty segment");
    }
    Ok(())
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for EntityId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityId::new(s)
    }
}

impl std::borrow::Borrow<str> for EntityId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for EntityId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Package,
    Class,
    Interface,
    Method,
    Constructor,
    Field,
    Virtual,
    Unresolved,
}

impl EntityKind {
    pub const ALL: [EntityKind; 8] = [
        EntityKind::Package,
        EntityKind::Class,
        EntityKind::Interface,
        EntityKind::Method,
        EntityKind::Constructor,
        EntityKind::Field,
        EntityKind::Virtual,
        EntityKind::Unresolved,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Package => "package",
            EntityKind::Class => "class",
            EntityKind::Interface => "interface",
            EntityKind::Method => "method",
            EntityKind::Constructor => "constructor",
            EntityKind::Field => "field",
            EntityKind::Virtual => "virtual",
            EntityKind::Unresolved => "unresolved",
        }
    }

    pub fn is_type(self) -> bool {
        matches!(self, EntityKind::Class | EntityKind::Interface)
    }

    pub fn is_callable(self) -> bool {
        matches!(self, EntityKind::Method | EntityKind::Constructor)
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown entity kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SourceLocation {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourceLocation {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Result<Self, GraphError> {
        let file = file.into();
        if line == 0 || column == 0 {
            return Err(GraphError::InvalidLocation { file, line, column });
        }
        Ok(SourceLocation { file, line, column })
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityNode {
    pub id: EntityId,
    pub kind: EntityKind,
    pub display_name: String,
    pub decl_location: Option<SourceLocation>,
}

impl EntityNode {
    pub fn new(id: EntityId, kind: EntityKind) -> Self {
        let display_name = id.display_name().to_owned();
        EntityNode {
            id,
            kind,
            display_name,
            decl_location: None,
        }
    }

    pub fn with_location(mut self, loc: SourceLocation) -> Self {
        self.decl_location = Some(loc);
        self
    }
}

/// A `uses` edge. Every occurrence of the target's name inside the source's
/// declaration scope is kept on the one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsesEdge {
    pub src: EntityId,
    pub tgt: EntityId,
    pub occurrences: Vec<SourceLocation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Uses,
    Contains,
    IsA,
    VirtualContains,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Uses => "uses",
            Relation::Contains => "contains",
            Relation::IsA => "isA",
            Relation::VirtualContains => "virtual_contains",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub uses: usize,
    pub contains: usize,
    pub isa: usize,
    pub virtual_contains: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("no entity named `{0}`")]
    Unknown(String),
    #[error("`{reference}` is ambiguous: {}", candidates.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", "))]
    Ambiguous {
        reference: String,
        candidates: Vec<EntityId>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AccessGraph {
    nodes: BTreeMap<EntityId, EntityNode>,
    uses: BTreeMap<(EntityId, EntityId), UsesEdge>,
    parent: BTreeMap<EntityId, EntityId>,
    children: BTreeMap<EntityId, BTreeSet<EntityId>>,
    supertypes: BTreeMap<EntityId, BTreeSet<EntityId>>,
    subtypes: BTreeMap<EntityId, BTreeSet<EntityId>>,
    members: BTreeMap<EntityId, BTreeSet<EntityId>>,
}

impl AccessGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a node. Re-inserting an id with the same kind is a no-op.
    pub fn add_node(&mut self, node: EntityNode) -> Result<(), GraphError> {
        if let Some(existing) = self.nodes.get_mut(&node.id) {
            if existing.kind != node.kind {
                return Err(GraphError::KindConflict {
                    id: node.id,
                    existing: existing.kind,
                    requested: node.kind,
                });
            }
            if existing.decl_location.is_none() {
                existing.decl_location = node.decl_location;
            }
            return Ok(());
        }
        self.nodes.insert(node.id.clone(), node);
        Ok(())
    }

    pub fn add_entity(&mut self, id: &str, kind: EntityKind) -> Result<EntityId, GraphError> {
        let id = EntityId::new(id)?;
        self.add_node(EntityNode::new(id.clone(), kind))?;
        Ok(id)
    }

    /// Adds an edge of relation `rel`. Fails without modifying the graph if
    /// the edge would break an invariant.
    pub fn add_edge(
        &mut self,
        rel: Relation,
        a: &EntityId,
        b: &EntityId,
        loc: Option<SourceLocation>,
    ) -> Result<(), GraphError> {
        let ka = self.kind_of(a)?;
        let kb = self.kind_of(b)?;
        let mismatch = |reason| GraphError::KindMismatch {
            relation: rel,
            from: a.clone(),
            to: b.clone(),
            reason,
        };
        match rel {
            Relation::Uses => {
                if a == b {
                    return Err(GraphError::SelfUse(a.clone()));
                }
                if ka == EntityKind::Virtual || kb == EntityKind::Virtual {
                    return Err(mismatch("virtual scopes"));
                }
                if ka == EntityKind::Unresolved {
                    return Err(mismatch("unresolved sources"));
                }
                let edge = self
                    .uses
                    .entry((a.clone(), b.clone()))
                    .or_insert_with(|| UsesEdge {
                        src: a.clone(),
                        tgt: b.clone(),
                        occurrences: Vec::new(),
                    });
                edge.occurrences.extend(loc);
            }
            Relation::Contains => {
                if ka == EntityKind::Virtual || kb == EntityKind::Virtual {
                    return Err(mismatch("virtual scopes"));
                }
                if let Some(p) = self.parent.get(b) {
                    if p == a {
                        return Ok(());
                    }
                    return Err(GraphError::ContainsCycleOrSecondParent {
                        parent: a.clone(),
                        child: b.clone(),
                    });
                }
                if a == b || self.ancestor_ids(a).any(|x| x == b) {
                    return Err(GraphError::ContainsCycleOrSecondParent {
                        parent: a.clone(),
                        child: b.clone(),
                    });
                }
                self.parent.insert(b.clone(), a.clone());
                self.children.entry(a.clone()).or_default().insert(b.clone());
            }
            Relation::IsA => {
                if ka == EntityKind::Virtual || kb == EntityKind::Virtual {
                    return Err(mismatch("virtual scopes"));
                }
                if a == b || self.supertypes_star(b).contains(a) {
                    return Err(GraphError::IsACycle {
                        sub: a.clone(),
                        sup: b.clone(),
                    });
                }
                self.supertypes.entry(a.clone()).or_default().insert(b.clone());
                self.subtypes.entry(b.clone()).or_default().insert(a.clone());
            }
            Relation::VirtualContains => {
                if ka != EntityKind::Virtual {
                    return Err(mismatch("non-virtual scopes"));
                }
                if kb == EntityKind::Virtual {
                    return Err(mismatch("virtual members"));
                }
                self.members.entry(a.clone()).or_default().insert(b.clone());
            }
        }
        Ok(())
    }

    pub fn add_uses(
        &mut self,
        src: &EntityId,
        tgt: &EntityId,
        loc: Option<SourceLocation>,
    ) -> Result<(), GraphError> {
        self.add_edge(Relation::Uses, src, tgt, loc)
    }

    pub fn add_contains(&mut self, parent: &EntityId, child: &EntityId) -> Result<(), GraphError> {
        self.add_edge(Relation::Contains, parent, child, None)
    }

    pub fn add_isa(&mut self, sub: &EntityId, sup: &EntityId) -> Result<(), GraphError> {
        self.add_edge(Relation::IsA, sub, sup, None)
    }

    pub fn add_virtual_contains(
        &mut self,
        scope: &EntityId,
        member: &EntityId,
    ) -> Result<(), GraphError> {
        self.add_edge(Relation::VirtualContains, scope, member, None)
    }

    /// Puts every edge's occurrence list in (file, line, column) order.
    pub fn sort_occurrences(&mut self) {
        for e in self.uses.values_mut() {
            e.occurrences.sort();
        }
    }

    pub fn node(&self, id: &EntityId) -> Option<&EntityNode> {
        self.nodes.get(id)
    }

    pub fn contains_node(&self, id: &EntityId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn kind_of(&self, id: &EntityId) -> Result<EntityKind, GraphError> {
        self.nodes
            .get(id)
            .map(|n| n.kind)
            .ok_or_else(|| GraphError::UnknownEntity(id.clone()))
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &EntityNode> {
        self.nodes.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &EntityId> {
        self.nodes.keys()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `uses` edges sorted by (src, tgt).
    pub fn uses_edges(&self) -> impl Iterator<Item = &UsesEdge> {
        self.uses.values()
    }

    pub fn uses_edge(&self, src: &EntityId, tgt: &EntityId) -> Option<&UsesEdge> {
        self.uses.get(&(src.clone(), tgt.clone()))
    }

    /// `contains` pairs sorted by (parent, child).
    pub fn contains_pairs(&self) -> impl Iterator<Item = (&EntityId, &EntityId)> {
        flatten(&self.children)
    }

    /// `isA` pairs sorted by (sub, super).
    pub fn isa_pairs(&self) -> impl Iterator<Item = (&EntityId, &EntityId)> {
        flatten(&self.supertypes)
    }

    /// `virtual_contains` pairs sorted by (scope, member).
    pub fn virtual_contains_pairs(&self) -> impl Iterator<Item = (&EntityId, &EntityId)> {
        flatten(&self.members)
    }

    pub fn parent(&self, id: &EntityId) -> Option<&EntityId> {
        self.parent.get(id)
    }

    pub fn children(&self, id: &EntityId) -> impl Iterator<Item = &EntityId> {
        self.children.get(id).into_iter().flatten()
    }

    pub fn virtual_members(&self, id: &EntityId) -> impl Iterator<Item = &EntityId> {
        self.members.get(id).into_iter().flatten()
    }

    pub fn supertypes(&self, id: &EntityId) -> impl Iterator<Item = &EntityId> {
        self.supertypes.get(id).into_iter().flatten()
    }

    /// Roots of the `contains` forest (virtual scopes included).
    pub fn roots(&self) -> impl Iterator<Item = &EntityId> {
        self.nodes.keys().filter(|id| !self.parent.contains_key(*id))
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            nodes: self.nodes.len(),
            uses: self.uses.len(),
            contains: self.parent.len(),
            isa: self.supertypes.values().map(BTreeSet::len).sum(),
            virtual_contains: self.members.values().map(BTreeSet::len).sum(),
        }
    }

    fn require(&self, id: &EntityId) -> Result<(), GraphError> {
        if self.nodes.contains_key(id) {
            Ok(())
        } else {
            Err(GraphError::UnknownEntity(id.clone()))
        }
    }

    /// `{a}` plus every transitive `contains` descendant of `a`.
    pub fn contains_star(&self, a: &EntityId) -> Result<BTreeSet<EntityId>, GraphError> {
        self.require(a)?;
        let mut out = BTreeSet::new();
        self.collect_descendants(a, false, &mut out);
        Ok(out)
    }

    /// Reflexive-transitive closure over `contains` and `virtual_contains`.
    pub fn g_contains_star(&self, a: &EntityId) -> Result<BTreeSet<EntityId>, GraphError> {
        self.require(a)?;
        let mut out = BTreeSet::new();
        self.collect_descendants(a, true, &mut out);
        Ok(out)
    }

    fn collect_descendants(&self, a: &EntityId, virtual_edges: bool, out: &mut BTreeSet<EntityId>) {
        let mut stack = vec![a.clone()];
        while let Some(x) = stack.pop() {
            if !out.insert(x.clone()) {
                continue;
            }
            stack.extend(self.children(&x).cloned());
            if virtual_edges {
                stack.extend(self.virtual_members(&x).cloned());
            }
        }
    }

    /// `[a, parent(a), parent(parent(a)), ...]` up to a root.
    pub fn ancestors(&self, a: &EntityId) -> Result<Vec<EntityId>, GraphError> {
        self.require(a)?;
        Ok(self.ancestor_ids(a).cloned().collect())
    }

    fn ancestor_ids<'a>(&'a self, a: &'a EntityId) -> impl Iterator<Item = &'a EntityId> + 'a {
        std::iter::successors(Some(a), move |x| self.parent.get(*x))
    }

    /// Whether some entity in the declaration scope of `c` uses `e`.
    pub fn depends_on(&self, c: &EntityId, e: &EntityId) -> Result<bool, GraphError> {
        self.require(e)?;
        let scope = self.contains_star(c)?;
        Ok(scope
            .iter()
            .any(|d| self.uses.contains_key(&(d.clone(), e.clone()))))
    }

    /// `{t}` plus every transitive subtype of `t`.
    pub fn isa_star(&self, t: &EntityId) -> Result<BTreeSet<EntityId>, GraphError> {
        self.require(t)?;
        Ok(closure(t, &self.subtypes))
    }

    /// `{t}` plus every transitive supertype of `t`.
    pub fn supertypes_star(&self, t: &EntityId) -> BTreeSet<EntityId> {
        closure(t, &self.supertypes)
    }

    /// Binds a possibly unqualified reference to a node.
    ///
    /// An exact id match wins. Otherwise the reference matches ids that end
    /// with `.reference`; non-callable ids are tried before callables, whose
    /// parameter group is ignored unless the reference carries one (so `A.m`
    /// finds `A.m(int)`).
    pub fn lookup(&self, reference: &str) -> Result<EntityId, LookupError> {
        if let Some((id, _)) = self.nodes.get_key_value(reference) {
            return Ok(id.clone());
        }
        let suffix = format!(".{reference}");
        let with_params = reference.contains('(');
        let matches = |tier: usize, id: &EntityId| match (with_params, tier) {
            (true, 0) => id.as_str().ends_with(&suffix),
            (true, _) => false,
            (false, 0) => !id.is_callable() && id.as_str().ends_with(&suffix),
            (false, _) => id.is_callable() && (id.base() == reference || id.base().ends_with(&suffix)),
        };
        for tier in 0..2 {
            let candidates: Vec<EntityId> = self.nodes.keys().filter(|id| matches(tier, id)).cloned().collect();
            match candidates.len() {
                0 => continue,
                1 => return Ok(candidates.into_iter().next().expect("one candidate")),
                _ => {
                    return Err(LookupError::Ambiguous {
                        reference: reference.to_owned(),
                        candidates,
                    })
                }
            }
        }
        Err(LookupError::Unknown(reference.to_owned()))
    }
}

fn flatten(
    map: &BTreeMap<EntityId, BTreeSet<EntityId>>,
) -> impl Iterator<Item = (&EntityId, &EntityId)> {
    map.iter().flat_map(|(a, bs)| bs.iter().map(move |b| (a, b)))
}

fn closure(start: &EntityId, next: &BTreeMap<EntityId, BTreeSet<EntityId>>) -> BTreeSet<EntityId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![start.clone()];
    while let Some(x) = stack.pop() {
        if out.insert(x.clone()) {
            stack.extend(next.get(&x).into_iter().flatten().cloned());
        }
    }
    out
}
