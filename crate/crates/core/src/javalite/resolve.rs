//! Name resolution and static typing for JavaLite, producing the access
//! graph.
//!
//! Every name occurrence is attributed to the innermost declared entity
//! around it: field, method, constructor or type. Imports count against the
//! unit's primary type.

use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::*;
use super::is_primitive;
use crate::graph::{AccessGraph, EntityId, EntityKind, EntityNode, GraphError, SourceLocation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("{location}: ambiguous name `{name}` (could be {})", candidates.join(" or "))]
    AmbiguousName {
        location: SourceLocation,
        name: String,
        candidates: Vec<String>,
    },
    #[error("{location}: duplicate declaration of `{id}`")]
    Duplicate { location: SourceLocation, id: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One resolved name occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedName {
    pub occurrence: SourceLocation,
    pub source: EntityId,
    pub target: EntityId,
    /// The member was found in a supertype of the static type.
    pub via_supertype: bool,
}

#[derive(Debug, Clone)]
pub struct Resolution {
    pub graph: AccessGraph,
    pub names: Vec<ResolvedName>,
}

/// Static type of a value.
#[derive(Debug, Clone, PartialEq)]
enum Ty {
    Decl(EntityId),
    Array(Box<Ty>),
    Other,
}

/// What an expression denotes.
#[derive(Debug, Clone, PartialEq)]
enum Val {
    Value(Ty),
    /// A type used as a qualifier; `None` for types outside the program.
    Type(Option<EntityId>),
    Package(String),
}

impl Val {
    fn member_host(&self) -> Option<&EntityId> {
        match self {
            Val::Value(Ty::Decl(t)) | Val::Type(Some(t)) => Some(t),
            _ => None,
        }
    }
}

enum Target {
    Primitive,
    Declared(EntityId),
    External(String),
}

struct Callable {
    id: EntityId,
    ret: Ty,
    params: Vec<(String, Ty)>,
}

struct TypeInfo {
    supers: Vec<EntityId>,
    fields: BTreeMap<String, (EntityId, Ty)>,
    methods: BTreeMap<(String, usize), Callable>,
    ctors: BTreeMap<usize, Callable>,
}

struct UnitCtx {
    path: String,
    package: Option<EntityId>,
    imports: BTreeMap<String, String>,
}

struct Body {
    unit: usize,
    owner: EntityId,
    this_ty: EntityId,
    scopes: Vec<BTreeMap<String, Ty>>,
}

impl Body {
    fn local(&self, name: &str) -> Option<&Ty> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }
}

struct Resolver<'u> {
    units: Vec<&'u CompilationUnit>,
    ctxs: Vec<UnitCtx>,
    types: BTreeMap<EntityId, TypeInfo>,
    decls: Vec<(usize, &'u TypeDecl, EntityId)>,
    graph: AccessGraph,
    names: Vec<ResolvedName>,
}

fn callable_id(owner: &EntityId, name: &str, params: &[Param]) -> Result<EntityId, GraphError> {
    let spelled: Vec<String> = params.iter().map(|p| p.ty.id_spelling()).collect();
    owner.child(&format!("{}({})", name, spelled.join(",")))
}

fn qualify(package: Option<&EntityId>, name: &str) -> String {
    match package {
        Some(p) => format!("{p}.{name}"),
        None => name.to_owned(),
    }
}

impl<'u> Resolver<'u> {
    fn loc(&self, unit: usize, pos: Pos) -> SourceLocation {
        SourceLocation {
            file: self.ctxs[unit].path.clone(),
            line: pos.line.max(1),
            column: pos.column.max(1),
        }
    }

    fn record(&mut self, unit: usize, src: &EntityId, tgt: &EntityId, pos: Pos, via_supertype: bool) -> Result<(), ResolveError> {
        if src == tgt {
            return Ok(());
        }
        let occurrence = self.loc(unit, pos);
        self.graph.add_uses(src, tgt, Some(occurrence.clone()))?;
        self.names.push(ResolvedName {
            occurrence,
            source: src.clone(),
            target: tgt.clone(),
            via_supertype,
        });
        Ok(())
    }

    fn declare(&mut self, id: &EntityId, kind: EntityKind, unit: usize, pos: Pos) -> Result<(), ResolveError> {
        if self.graph.contains_node(id) {
            return Err(ResolveError::Duplicate {
                location: self.loc(unit, pos),
                id: id.to_string(),
            });
        }
        self.graph
            .add_node(EntityNode::new(id.clone(), kind).with_location(self.loc(unit, pos)))?;
        Ok(())
    }

    /// Node for a type outside the program, if the id is free for one.
    fn external(&mut self, name: &str) -> Result<Option<EntityId>, ResolveError> {
        let id = EntityId::new(name)?;
        match self.graph.node(&id).map(|n| n.kind) {
            None => {
                self.graph.add_entity(name, EntityKind::Unresolved)?;
                Ok(Some(id))
            }
            Some(EntityKind::Unresolved | EntityKind::Class | EntityKind::Interface) => Ok(Some(id)),
            Some(_) => Ok(None),
        }
    }

    fn declared_type(&self, name: &str) -> Option<EntityId> {
        let id = EntityId::new(name).ok()?;
        self.types.contains_key(&id).then_some(id)
    }

    fn lookup_type(&self, unit: usize, qn: &QualifiedName) -> Result<Target, ResolveError> {
        if qn.parts.len() > 1 {
            let full = qn.joined();
            return Ok(match self.declared_type(&full) {
                Some(id) => Target::Declared(id),
                None => Target::External(full),
            });
        }
        let name = &qn.parts[0].name;
        if is_primitive(name) {
            return Ok(Target::Primitive);
        }
        let ctx = &self.ctxs[unit];
        let local = self.declared_type(&qualify(ctx.package.as_ref(), name));
        let imported = ctx.imports.get(name);
        match (local, imported) {
            (Some(l), Some(i)) if l.as_str() != i => Err(ResolveError::AmbiguousName {
                location: self.loc(unit, qn.parts[0].pos),
                name: name.clone(),
                candidates: vec![l.to_string(), i.clone()],
            }),
            (Some(l), _) => Ok(Target::Declared(l)),
            (None, Some(i)) => Ok(match self.declared_type(i) {
                Some(id) => Target::Declared(id),
                None => Target::External(i.clone()),
            }),
            (None, None) => Ok(Target::External(name.clone())),
        }
    }

    /// Resolves a written type, recording every name in it as used by `owner`.
    fn type_ref(&mut self, unit: usize, owner: &EntityId, tr: &TypeRef) -> Result<Ty, ResolveError> {
        let pos = tr.name.last().pos;
        let base = match self.lookup_type(unit, &tr.name)? {
            Target::Primitive => Ty::Other,
            Target::Declared(id) => {
                self.record(unit, owner, &id, pos, false)?;
                Ty::Decl(id)
            }
            Target::External(name) => {
                if let Some(id) = self.external(&name)? {
                    self.record(unit, owner, &id, pos, false)?;
                }
                Ty::Other
            }
        };
        for arg in &tr.args {
            self.type_ref(unit, owner, arg)?;
        }
        Ok((0..tr.dims).fold(base, |t, _| Ty::Array(Box::new(t))))
    }

    /// `t` followed by its supertypes, breadth first.
    fn lineage(&self, t: &EntityId) -> Vec<EntityId> {
        let mut out = vec![t.clone()];
        let mut i = 0;
        while i < out.len() {
            if let Some(info) = self.types.get(&out[i]) {
                for s in &info.supers {
                    if !out.contains(s) {
                        out.push(s.clone());
                    }
                }
            }
            i += 1;
        }
        out
    }

    fn find_field(&self, t: &EntityId, name: &str) -> Option<(EntityId, Ty, bool)> {
        self.lineage(t).iter().enumerate().find_map(|(depth, ty)| {
            let (id, fty) = self.types.get(ty)?.fields.get(name)?;
            Some((id.clone(), fty.clone(), depth > 0))
        })
    }

    fn find_method(&self, t: &EntityId, name: &str, arity: usize) -> Option<(EntityId, Ty, bool)> {
        let key = (name.to_owned(), arity);
        self.lineage(t).iter().enumerate().find_map(|(depth, ty)| {
            let m = self.types.get(ty)?.methods.get(&key)?;
            Some((m.id.clone(), m.ret.clone(), depth > 0))
        })
    }

    // ---- phase 1: declarations ----

    fn declare_unit(&mut self, unit: usize) -> Result<(), ResolveError> {
        let u = self.units[unit];
        let mut package = None;
        if let Some(qn) = &u.package {
            let mut prefix = String::new();
            for part in &qn.parts {
                if !prefix.is_empty() {
                    prefix.push('.');
                }
                prefix.push_str(&part.name);
                let id = EntityId::new(prefix.as_str())?;
                match self.graph.node(&id) {
                    Some(n) if n.kind != EntityKind::Package => {
                        return Err(ResolveError::Duplicate {
                            location: self.loc(unit, part.pos),
                            id: id.to_string(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        self.graph
                            .add_node(EntityNode::new(id.clone(), EntityKind::Package).with_location(self.loc(unit, part.pos)))?;
                    }
                }
                if let Some(parent) = &package {
                    self.graph.add_contains(parent, &id)?;
                }
                package = Some(id);
            }
        }
        self.ctxs[unit].package = package.clone();

        for td in &u.types {
            let id = EntityId::new(qualify(package.as_ref(), &td.name.name))?;
            let kind = match td.kind {
                TypeKind::Class => EntityKind::Class,
                TypeKind::Interface => EntityKind::Interface,
            };
            self.declare(&id, kind, unit, td.name.pos)?;
            if let Some(p) = &package {
                self.graph.add_contains(p, &id)?;
            }
            let mut info = TypeInfo {
                supers: Vec::new(),
                fields: BTreeMap::new(),
                methods: BTreeMap::new(),
                ctors: BTreeMap::new(),
            };
            for m in &td.members {
                let (mid, kind, pos) = match m {
                    Member::Field(f) => (id.child(&f.name.name)?, EntityKind::Field, f.name.pos),
                    Member::Method(md) => (callable_id(&id, &md.name.name, &md.params)?, EntityKind::Method, md.name.pos),
                    Member::Constructor(md) => {
                        (callable_id(&id, &md.name.name, &md.params)?, EntityKind::Constructor, md.name.pos)
                    }
                };
                let clash = match m {
                    Member::Field(f) => info.fields.contains_key(&f.name.name),
                    Member::Method(md) => info.methods.contains_key(&(md.name.name.clone(), md.params.len())),
                    Member::Constructor(md) => info.ctors.contains_key(&md.params.len()),
                };
                if clash {
                    return Err(ResolveError::Duplicate {
                        location: self.loc(unit, pos),
                        id: mid.to_string(),
                    });
                }
                self.declare(&mid, kind, unit, pos)?;
                self.graph.add_contains(&id, &mid)?;
                match m {
                    Member::Field(f) => {
                        info.fields.insert(f.name.name.clone(), (mid, Ty::Other));
                    }
                    Member::Method(md) => {
                        let c = Callable { id: mid, ret: Ty::Other, params: Vec::new() };
                        info.methods.insert((md.name.name.clone(), md.params.len()), c);
                    }
                    Member::Constructor(md) => {
                        let c = Callable { id: mid, ret: Ty::Other, params: Vec::new() };
                        info.ctors.insert(md.params.len(), c);
                    }
                }
            }
            self.types.insert(id.clone(), info);
            self.decls.push((unit, td, id));
        }
        Ok(())
    }

    fn collect_imports(&mut self, unit: usize) -> Result<(), ResolveError> {
        for qn in &self.units[unit].imports {
            let simple = qn.last().name.clone();
            let full = qn.joined();
            if let Some(prev) = self.ctxs[unit].imports.get(&simple) {
                if *prev != full {
                    return Err(ResolveError::AmbiguousName {
                        location: self.loc(unit, qn.last().pos),
                        name: simple,
                        candidates: vec![prev.clone(), full],
                    });
                }
            }
            self.ctxs[unit].imports.insert(simple, full);
        }
        Ok(())
    }

    // ---- phase 2: imports and signatures ----

    /// Imports are attributed to the unit's primary type: the one named
    /// after the file, else the first declared. Units without types charge
    /// their package.
    fn unit_imports(&mut self, unit: usize) -> Result<(), ResolveError> {
        let stem = std::path::Path::new(&self.ctxs[unit].path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned());
        let mut own = self.decls.iter().filter(|d| d.0 == unit);
        let first = own.clone().next().map(|d| d.2.clone());
        let named = own.find(|d| Some(&d.1.name.name) == stem.as_ref()).map(|d| d.2.clone());
        let Some(owner) = named.or(first).or_else(|| self.ctxs[unit].package.clone()) else {
            return Ok(());
        };
        for qn in &self.units[unit].imports {
            let full = qn.joined();
            let target = match self.declared_type(&full) {
                Some(t) => Some(t),
                None => self.external(&full)?,
            };
            if let Some(t) = target {
                self.record(unit, &owner, &t, qn.last().pos, false)?;
            }
        }
        Ok(())
    }

    fn signatures(&mut self, unit: usize, td: &TypeDecl, id: &EntityId) -> Result<(), ResolveError> {
        let mut supers = Vec::new();
        for tr in td.extends.iter().chain(&td.implements) {
            let pos = tr.name.last().pos;
            let sup = match self.lookup_type(unit, &tr.name)? {
                Target::Primitive => None,
                Target::Declared(s) => Some(s),
                Target::External(name) => self.external(&name)?,
            };
            if let Some(s) = sup {
                if s == *id {
                    return Err(GraphError::IsACycle { sub: s.clone(), sup: s }.into());
                }
                self.graph.add_isa(id, &s)?;
                self.record(unit, id, &s, pos, false)?;
                supers.push(s);
            }
            for arg in &tr.args {
                self.type_ref(unit, id, arg)?;
            }
        }
        self.types.get_mut(id).expect("declared").supers = supers;

        for m in &td.members {
            match m {
                Member::Field(f) => {
                    let fid = id.child(&f.name.name)?;
                    let ty = self.type_ref(unit, &fid, &f.ty)?;
                    self.types.get_mut(id).expect("declared").fields.get_mut(&f.name.name).expect("declared").1 = ty;
                }
                Member::Method(md) | Member::Constructor(md) => {
                    let mid = callable_id(id, &md.name.name, &md.params)?;
                    let ret = match &md.ret {
                        Some(tr) => self.type_ref(unit, &mid, tr)?,
                        None => Ty::Other,
                    };
                    let mut params = Vec::new();
                    for p in &md.params {
                        params.push((p.name.name.clone(), self.type_ref(unit, &mid, &p.ty)?));
                    }
                    for tr in &md.throws {
                        self.type_ref(unit, &mid, tr)?;
                    }
                    let info = self.types.get_mut(id).expect("declared");
                    let slot = match m {
                        Member::Method(_) => info.methods.get_mut(&(md.name.name.clone(), md.params.len())),
                        _ => info.ctors.get_mut(&md.params.len()),
                    }
                    .expect("declared");
                    slot.ret = ret;
                    slot.params = params;
                }
            }
        }
        Ok(())
    }

    // ---- phase 3: bodies ----

    fn bodies(&mut self, unit: usize, td: &TypeDecl, id: &EntityId) -> Result<(), ResolveError> {
        for m in &td.members {
            match m {
                Member::Field(f) => {
                    if let Some(init) = &f.init {
                        let mut body = Body {
                            unit,
                            owner: id.child(&f.name.name)?,
                            this_ty: id.clone(),
                            scopes: vec![BTreeMap::new()],
                        };
                        self.expr(&mut body, init)?;
                    }
                }
                Member::Method(md) | Member::Constructor(md) => {
                    let Some(block) = &md.body else { continue };
                    let info = &self.types[id];
                    let c = match m {
                        Member::Method(_) => &info.methods[&(md.name.name.clone(), md.params.len())],
                        _ => &info.ctors[&md.params.len()],
                    };
                    let mut body = Body {
                        unit,
                        owner: c.id.clone(),
                        this_ty: id.clone(),
                        scopes: vec![c.params.iter().cloned().collect()],
                    };
                    self.block(&mut body, block)?;
                }
            }
        }
        Ok(())
    }

    fn block(&mut self, b: &mut Body, block: &Block) -> Result<(), ResolveError> {
        b.scopes.push(BTreeMap::new());
        for s in &block.stmts {
            self.stmt(b, s)?;
        }
        b.scopes.pop();
        Ok(())
    }

    fn nested(&mut self, b: &mut Body, s: &Stmt) -> Result<(), ResolveError> {
        b.scopes.push(BTreeMap::new());
        let r = self.stmt(b, s);
        b.scopes.pop();
        r
    }

    fn stmt(&mut self, b: &mut Body, s: &Stmt) -> Result<(), ResolveError> {
        match s {
            Stmt::Local { ty, name, init } => {
                let t = self.type_ref(b.unit, &b.owner.clone(), ty)?;
                if let Some(e) = init {
                    self.expr(b, e)?;
                }
                b.scopes.last_mut().expect("scope").insert(name.name.clone(), t);
            }
            Stmt::Expr(e) | Stmt::Throw(e) => {
                self.expr(b, e)?;
            }
            Stmt::Return(e) => {
                if let Some(e) = e {
                    self.expr(b, e)?;
                }
            }
            Stmt::If { cond, then, otherwise } => {
                self.expr(b, cond)?;
                self.nested(b, then)?;
                if let Some(o) = otherwise {
                    self.nested(b, o)?;
                }
            }
            Stmt::While { cond, body } => {
                self.expr(b, cond)?;
                self.nested(b, body)?;
            }
            Stmt::ForEach { ty, name, iter, body } => {
                let t = self.type_ref(b.unit, &b.owner.clone(), ty)?;
                self.expr(b, iter)?;
                b.scopes.push(BTreeMap::from([(name.name.clone(), t)]));
                let r = self.nested(b, body);
                b.scopes.pop();
                r?;
            }
            Stmt::For { init, cond, update, body } => {
                b.scopes.push(BTreeMap::new());
                let r = (|| {
                    if let Some(i) = init {
                        self.stmt(b, i)?;
                    }
                    if let Some(c) = cond {
                        self.expr(b, c)?;
                    }
                    for u in update {
                        self.expr(b, u)?;
                    }
                    self.nested(b, body)
                })();
                b.scopes.pop();
                r?;
            }
            Stmt::Block(block) => self.block(b, block)?,
            Stmt::Break | Stmt::Continue | Stmt::Empty => {}
        }
        Ok(())
    }

    fn value(&mut self, b: &mut Body, e: &Expr) -> Result<Ty, ResolveError> {
        Ok(match self.expr(b, e)? {
            Val::Value(t) => t,
            _ => Ty::Other,
        })
    }

    fn expr(&mut self, b: &mut Body, e: &Expr) -> Result<Val, ResolveError> {
        let owner = b.owner.clone();
        let unit = b.unit;
        Ok(match e {
            Expr::Literal(_) => Val::Value(Ty::Other),
            Expr::This(_) => Val::Value(Ty::Decl(b.this_ty.clone())),
            Expr::Name(id) => self.simple_name(b, id)?,
            Expr::Field { target, name } => {
                let host = self.expr(b, target)?;
                match host {
                    Val::Package(p) => {
                        let full = format!("{p}.{}", name.name);
                        if let Some(t) = self.declared_type(&full) {
                            self.record(unit, &owner, &t, name.pos, false)?;
                            Val::Type(Some(t))
                        } else if self.is_package(&full) {
                            Val::Package(full)
                        } else {
                            if let Some(t) = self.external(&full)? {
                                self.record(unit, &owner, &t, name.pos, false)?;
                            }
                            Val::Type(None)
                        }
                    }
                    Val::Value(Ty::Array(_)) => Val::Value(Ty::Other),
                    other => match other.member_host().and_then(|t| self.find_field(t, &name.name)) {
                        Some((fid, fty, via)) => {
                            self.record(unit, &owner, &fid, name.pos, via)?;
                            Val::Value(fty)
                        }
                        None => Val::Value(Ty::Other),
                    },
                }
            }
            Expr::Call { target, name, args } => {
                let host = match target {
                    Some(t) => self.expr(b, t)?,
                    None => Val::Type(Some(b.this_ty.clone())),
                };
                for a in args {
                    self.expr(b, a)?;
                }
                match host.member_host().and_then(|t| self.find_method(t, &name.name, args.len())) {
                    Some((mid, ret, via)) => {
                        self.record(unit, &owner, &mid, name.pos, via)?;
                        Val::Value(ret)
                    }
                    None => Val::Value(Ty::Other),
                }
            }
            Expr::New { ty, args } => {
                let t = self.type_ref(unit, &owner, ty)?;
                for a in args {
                    self.expr(b, a)?;
                }
                if let Ty::Decl(tid) = &t {
                    let ctor = self.types[tid].ctors.get(&args.len()).map(|c| c.id.clone());
                    if let Some(c) = ctor {
                        self.record(unit, &owner, &c, ty.name.last().pos, false)?;
                    }
                }
                Val::Value(t)
            }
            Expr::NewArray { ty, dims } => {
                let t = self.type_ref(unit, &owner, ty)?;
                for d in dims {
                    self.expr(b, d)?;
                }
                Val::Value(t)
            }
            Expr::Assign { lhs, rhs } => {
                let t = self.value(b, lhs)?;
                self.expr(b, rhs)?;
                Val::Value(t)
            }
            Expr::Binary { lhs, rhs, .. } => {
                self.expr(b, lhs)?;
                self.expr(b, rhs)?;
                Val::Value(Ty::Other)
            }
            Expr::Unary { expr, .. } => {
                self.expr(b, expr)?;
                Val::Value(Ty::Other)
            }
            Expr::Index { target, index } => {
                let t = self.value(b, target)?;
                self.expr(b, index)?;
                match t {
                    Ty::Array(inner) => Val::Value(*inner),
                    _ => Val::Value(Ty::Other),
                }
            }
            Expr::Cast { ty, expr } => {
                let t = self.type_ref(unit, &owner, ty)?;
                self.expr(b, expr)?;
                Val::Value(t)
            }
            Expr::InstanceOf { expr, ty } => {
                self.expr(b, expr)?;
                self.type_ref(unit, &owner, ty)?;
                Val::Value(Ty::Other)
            }
            Expr::Conditional { cond, then, otherwise } => {
                self.expr(b, cond)?;
                let t = self.value(b, then)?;
                self.expr(b, otherwise)?;
                Val::Value(t)
            }
        })
    }

    fn is_package(&self, name: &str) -> bool {
        EntityId::new(name)
            .ok()
            .and_then(|id| self.graph.node(&id).map(|n| n.kind == EntityKind::Package))
            .unwrap_or(false)
    }

    /// Locals, then fields of the enclosing type, then types and packages.
    fn simple_name(&mut self, b: &Body, id: &Ident) -> Result<Val, ResolveError> {
        if let Some(t) = b.local(&id.name) {
            return Ok(Val::Value(t.clone()));
        }
        if let Some((fid, fty, via)) = self.find_field(&b.this_ty, &id.name) {
            self.record(b.unit, &b.owner, &fid, id.pos, via)?;
            return Ok(Val::Value(fty));
        }
        let qn = QualifiedName { parts: vec![id.clone()] };
        match self.lookup_type(b.unit, &qn)? {
            Target::Primitive => Ok(Val::Value(Ty::Other)),
            Target::Declared(t) => {
                self.record(b.unit, &b.owner, &t, id.pos, false)?;
                Ok(Val::Type(Some(t)))
            }
            Target::External(name) => {
                if name == id.name && self.is_package(&name) {
                    return Ok(Val::Package(name));
                }
                if let Some(t) = self.external(&name)? {
                    self.record(b.unit, &b.owner, &t, id.pos, false)?;
                }
                Ok(Val::Type(None))
            }
        }
    }
}

/// Builds the access graph of a set of compilation units.
pub fn resolve(units: &[CompilationUnit]) -> Result<AccessGraph, ResolveError> {
    resolve_detailed(units).map(|r| r.graph)
}

/// Like [`resolve`], also returning every resolved name occurrence.
pub fn resolve_detailed(units: &[CompilationUnit]) -> Result<Resolution, ResolveError> {
    let mut sorted: Vec<&CompilationUnit> = units.iter().collect();
    sorted.sort_by(|a, b| a.path.cmp(&b.path));
    let ctxs = sorted
        .iter()
        .map(|u| UnitCtx {
            path: u.path.clone(),
            package: None,
            imports: BTreeMap::new(),
        })
        .collect();
    let mut r = Resolver {
        units: sorted,
        ctxs,
        types: BTreeMap::new(),
        decls: Vec::new(),
        graph: AccessGraph::new(),
        names: Vec::new(),
    };
    for i in 0..r.units.len() {
        r.declare_unit(i)?;
        r.collect_imports(i)?;
    }
    let decls = r.decls.clone();
    for i in 0..r.units.len() {
        r.unit_imports(i)?;
    }
    for (unit, td, id) in &decls {
        r.signatures(*unit, td, id)?;
    }
    for (unit, td, id) in &decls {
        r.bodies(*unit, td, id)?;
    }
    r.graph.sort_occurrences();
    r.names.sort_by(|a, b| a.occurrence.cmp(&b.occurrence).then_with(|| a.target.cmp(&b.target)));
    Ok(Resolution {
        graph: r.graph,
        names: r.names,
    })
}
