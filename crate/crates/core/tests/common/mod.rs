//! Shared test support: a seeded generator of random graphs and constraint
//! programs, and a brute-force reference evaluator.
//!
//! The reference evaluator never touches `AccessGraph` queries or the
//! constraint binder. It works from the generator's own node and edge
//! lists, computes closures by naive fixpoint iteration, and materializes
//! every `hideFrom(target, viewer)` fact by looping over all node pairs.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use archlint::graph::{AccessGraph, EntityKind, SourceLocation};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct GenNode {
    pub id: String,
    pub kind: EntityKind,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenClause {
    HideFrom(String, String),
    CanSee(String, String),
    HideScope(String),
    HideScope4(String, Vec<String>, Vec<String>, Vec<String>),
    HideScopeBut(String, Vec<String>),
    HideScopeFrom(String, Vec<String>),
    HideScopeButFrom(String, Vec<String>),
    VirtualScope(String, Vec<String>),
    DeclareSet(String, Vec<String>),
    HideSet(String),
    Layers(Vec<String>),
}

fn q(s: &str) -> String {
    format!("'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))
}

fn ql(v: &[String]) -> String {
    format!("[{}]", v.iter().map(|s| q(s)).collect::<Vec<_>>().join(", "))
}

impl GenClause {
    pub fn text(&self) -> String {
        match self {
            GenClause::HideFrom(t, v) => format!("hideFrom({}, {}).", q(t), q(v)),
            GenClause::CanSee(v, t) => format!("canSee({}, {}).", q(v), q(t)),
            GenClause::HideScope(s) => format!("hideScope({}).", q(s)),
            GenClause::HideScope4(s, f, i, fr) => {
                format!("hideScope({}, {}, {}, {}).", q(s), ql(f), ql(i), ql(fr))
            }
            GenClause::HideScopeBut(s, f) => format!("hideScopeBut({}, {}).", q(s), ql(f)),
            GenClause::HideScopeFrom(s, i) => format!("hideScopeFrom({}, {}).", q(s), ql(i)),
            GenClause::HideScopeButFrom(s, fr) => {
                format!("hideScopeButFrom({}, {}).", q(s), ql(fr))
            }
            GenClause::VirtualScope(n, m) => format!("virtualScope({}, {}).", q(n), ql(m)),
            GenClause::DeclareSet(n, m) => format!("declareSet({}, {}).", q(n), ql(m)),
            GenClause::HideSet(n) => format!("hideSet({}).", q(n)),
            GenClause::Layers(l) => format!("layers({}).", ql(l)),
        }
    }

    pub fn form(&self) -> &'static str {
        match self {
            GenClause::HideFrom(..) => "hideFrom",
            GenClause::CanSee(..) => "canSee",
            GenClause::HideScope(..) => "hideScope/1",
            GenClause::HideScope4(..) => "hideScope/4",
            GenClause::HideScopeBut(..) => "hideScopeBut",
            GenClause::HideScopeFrom(..) => "hideScopeFrom",
            GenClause::HideScopeButFrom(..) => "hideScopeButFrom",
            GenClause::VirtualScope(..) => "virtualScope",
            GenClause::DeclareSet(..) => "declareSet",
            GenClause::HideSet(..) => "hideSet",
            GenClause::Layers(..) => "layers",
        }
    }
}

/// One line per clause, so clause `i` sits on line `i + 1`.
pub fn program_text(clauses: &[GenClause]) -> String {
    clauses.iter().map(|c| c.text() + "\n").collect()
}

#[derive(Debug, Clone)]
pub struct RandomCase {
    pub nodes: Vec<GenNode>,
    pub uses: Vec<(usize, usize, u32)>,
    pub isa: Vec<(usize, usize)>,
    pub clauses: Vec<GenClause>,
}

/// A random forest of at most `max_nodes` entities with random `uses` and
/// `isA` edges.
pub fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> RandomCase {
    let n = rng.gen_range(3..=max_nodes);
    let mut nodes: Vec<GenNode> = Vec::new();
    for i in 0..n {
        // Possible owners: packages own packages and types, types own members.
        let owners: Vec<usize> = (0..nodes.len())
            .filter(|&j| matches!(nodes[j].kind, EntityKind::Package | EntityKind::Class | EntityKind::Interface))
            .collect();
        let parent = if owners.is_empty() || rng.gen_bool(0.2) {
            None
        } else {
            Some(*owners.choose(rng).unwrap())
        };
        let (kind, name) = match parent.map(|p| nodes[p].kind) {
            None => match rng.gen_range(0..10) {
                0..=5 => (EntityKind::Package, format!("p{i}")),
                6..=7 => (EntityKind::Class, format!("C{i}")),
                8 => (EntityKind::Interface, format!("I{i}")),
                _ => (EntityKind::Unresolved, format!("U{i}")),
            },
            Some(EntityKind::Package) => match rng.gen_range(0..4) {
                0 => (EntityKind::Package, format!("p{i}")),
                1 => (EntityKind::Interface, format!("I{i}")),
                _ => (EntityKind::Class, format!("C{i}")),
            },
            Some(_) => match rng.gen_range(0..4) {
                0 => (EntityKind::Field, format!("f{i}")),
                1 => (EntityKind::Constructor, format!("K{i}(int)")),
                _ => (EntityKind::Method, format!("m{i}()")),
            },
        };
        let id = match parent {
            Some(p) => format!("{}.{}", nodes[p].id, name),
            None => name,
        };
        nodes.push(GenNode { id, kind, parent });
    }
    let mut uses = Vec::new();
    let sources: Vec<usize> = (0..n).filter(|&i| nodes[i].kind != EntityKind::Unresolved).collect();
    for _ in 0..rng.gen_range(0..=2 * n) {
        let s = *sources.choose(rng).unwrap();
        let t = rng.gen_range(0..n);
        if s != t {
            uses.push((s, t, rng.gen_range(1..=50)));
        }
    }
    let types: Vec<usize> = (0..n).filter(|&i| nodes[i].kind.is_type()).collect();
    let mut isa = Vec::new();
    for _ in 0..types.len() {
        let a = *types.choose(rng).unwrap();
        let b = *types.choose(rng).unwrap();
        // Always from a later node to an earlier one, so no cycles.
        if a > b {
            isa.push((a, b));
        }
    }
    RandomCase {
        nodes,
        uses,
        isa,
        clauses: Vec::new(),
    }
}

/// A random program of at most `max_clauses` clauses over `case`'s nodes.
pub fn random_program(rng: &mut ChaCha8Rng, case: &RandomCase, max_clauses: usize) -> Vec<GenClause> {
    let ids: Vec<String> = case
        .nodes
        .iter()
        .map(|n| n.id.clone())
        .collect();
    let k = rng.gen_range(0..=max_clauses);
    let mut clauses = Vec::new();
    let mut sets: Vec<String> = Vec::new();
    let mut next_set = 0;
    let pick_list = |rng: &mut ChaCha8Rng, pool: &[String], lo: usize, hi: usize| -> Vec<String> {
        let n = rng.gen_range(lo..=hi);
        (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect()
    };
    while clauses.len() < k {
        let refs: Vec<String> = ids.iter().chain(&sets).cloned().collect();
        let r = |rng: &mut ChaCha8Rng| refs.choose(rng).unwrap().clone();
        let c = match rng.gen_range(0..11) {
            0 => GenClause::HideFrom(r(rng), r(rng)),
            1 => GenClause::CanSee(r(rng), r(rng)),
            2 => GenClause::HideScope(r(rng)),
            3 => GenClause::HideScope4(
                r(rng),
                pick_list(rng, &refs, 0, 2),
                pick_list(rng, &refs, 0, 3),
                pick_list(rng, &refs, 0, 2),
            ),
            4 => GenClause::HideScopeBut(r(rng), pick_list(rng, &refs, 0, 2)),
            5 => GenClause::HideScopeFrom(r(rng), pick_list(rng, &refs, 0, 3)),
            6 => GenClause::HideScopeButFrom(r(rng), pick_list(rng, &refs, 0, 2)),
            7 | 8 => {
                let name = format!("{}{next_set}", if rng.gen_bool(0.5) { "VS" } else { "SET" });
                next_set += 1;
                sets.push(name.clone());
                let members = pick_list(rng, &ids, 1, 4);
                if name.starts_with("VS") {
                    GenClause::VirtualScope(name, members)
                } else {
                    GenClause::DeclareSet(name, members)
                }
            }
            9 => match sets.choose(rng) {
                Some(s) => GenClause::HideSet(s.clone()),
                None => continue,
            },
            _ => GenClause::Layers(pick_list(rng, &refs, 2, 4)),
        };
        clauses.push(c);
    }
    clauses
}

pub fn random_case(seed: u64) -> RandomCase {
    let mut rng = rng(seed);
    let mut case = random_graph(&mut rng, 30);
    case.clauses = random_program(&mut rng, &case, 6);
    case
}

impl RandomCase {
    pub fn graph(&self) -> AccessGraph {
        let mut g = AccessGraph::new();
        let ids: Vec<_> = self
            .nodes
            .iter()
            .map(|n| g.add_entity(&n.id, n.kind).unwrap())
            .collect();
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                g.add_contains(&ids[p], &ids[i]).unwrap();
            }
        }
        for &(a, b) in &self.isa {
            g.add_isa(&ids[a], &ids[b]).unwrap();
        }
        for &(s, t, line) in &self.uses {
            let loc = SourceLocation::new(format!("{}.jl", self.nodes[s].id.split('.').next().unwrap()), line, 1).unwrap();
            g.add_uses(&ids[s], &ids[t], Some(loc)).unwrap();
        }
        g.sort_occurrences();
        g
    }

    pub fn program(&self) -> String {
        program_text(&self.clauses)
    }
}

/// What the reference evaluator says about one `uses` edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Expected {
    pub src: String,
    pub tgt: String,
    pub viewer: String,
    /// Index of the reported clause in the program.
    pub clause: usize,
}

/// Brute-force evaluation of `clauses` over `case`'s graph.
pub fn oracle(case: &RandomCase, clauses: &[GenClause]) -> Vec<Expected> {
    // Universe: program nodes plus the program's virtual scopes.
    let mut universe: Vec<String> = case.nodes.iter().map(|n| n.id.clone()).collect();
    let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut parent: BTreeMap<String, String> = BTreeMap::new();
    for n in &case.nodes {
        if let Some(p) = n.parent {
            children.entry(case.nodes[p].id.clone()).or_default().push(n.id.clone());
            parent.insert(n.id.clone(), case.nodes[p].id.clone());
        }
    }
    let mut virtual_members: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for c in clauses {
        if let GenClause::VirtualScope(n, m) | GenClause::DeclareSet(n, m) = c {
            universe.push(n.clone());
            virtual_members.insert(n.clone(), m.clone());
        }
    }

    // Naive fixpoints.
    let contains_star = |x: &str| -> BTreeSet<String> {
        let mut s = BTreeSet::from([x.to_owned()]);
        loop {
            let before = s.len();
            for y in s.clone() {
                s.extend(children.get(&y).cloned().unwrap_or_default());
            }
            if s.len() == before {
                return s;
            }
        }
    };
    let g_star = |x: &str| -> BTreeSet<String> {
        let mut s = BTreeSet::from([x.to_owned()]);
        loop {
            let before = s.len();
            for y in s.clone() {
                s.extend(children.get(&y).cloned().unwrap_or_default());
                s.extend(virtual_members.get(&y).cloned().unwrap_or_default());
            }
            if s.len() == before {
                return s;
            }
        }
    };
    let g_union = |xs: &[String]| -> BTreeSet<String> { xs.iter().flat_map(|x| g_star(x)).collect() };
    let roots: Vec<String> = universe.iter().filter(|x| !parent.contains_key(*x)).cloned().collect();
    let everyone = g_union(&roots);

    // Materialize hideFrom as (target, viewer) -> clause indices, split by
    // whether the fact came from a raw pair.
    let mut pair_facts: BTreeMap<(String, String), BTreeSet<usize>> = BTreeMap::new();
    let mut scope_facts: BTreeMap<(String, String), BTreeSet<usize>> = BTreeMap::new();
    let mut can_see: BTreeSet<(String, String)> = BTreeSet::new();

    let expand = |idx: usize,
                      s: &str,
                      facades: &[String],
                      interlopers: Option<&[String]>,
                      friends: &[String],
                      exempt: &BTreeSet<String>,
                      facts: &mut BTreeMap<(String, String), BTreeSet<usize>>| {
        let hidden = g_star(s);
        let fac = g_union(facades);
        let inter = match interlopers {
            Some(i) => g_union(i),
            None => everyone.clone(),
        };
        let fr = g_union(friends);
        for e in &universe {
            for i in &universe {
                if hidden.contains(e)
                    && !fac.contains(e)
                    && inter.contains(i)
                    && !fr.contains(i)
                    && !hidden.contains(i)
                    && !exempt.contains(i)
                {
                    facts.entry((e.clone(), i.clone())).or_default().insert(idx);
                }
            }
        }
    };

    let none = BTreeSet::new();
    for (idx, c) in clauses.iter().enumerate() {
        match c {
            GenClause::HideFrom(t, v) => {
                pair_facts.entry((t.clone(), v.clone())).or_default().insert(idx);
            }
            GenClause::CanSee(v, t) => {
                for x in g_star(v) {
                    can_see.insert((x, t.clone()));
                }
            }
            GenClause::HideScope(s) => expand(idx, s, &[], None, &[], &none, &mut scope_facts),
            GenClause::HideScope4(s, f, i, fr) => expand(idx, s, f, Some(i), fr, &none, &mut scope_facts),
            GenClause::HideScopeBut(s, f) => expand(idx, s, f, None, &[], &none, &mut scope_facts),
            GenClause::HideScopeFrom(s, i) => expand(idx, s, &[], Some(i), &[], &none, &mut scope_facts),
            GenClause::HideScopeButFrom(s, fr) => expand(idx, s, &[], None, fr, &none, &mut scope_facts),
            GenClause::VirtualScope(..) | GenClause::DeclareSet(..) => {}
            GenClause::HideSet(set) => {
                let mut exempt = BTreeSet::new();
                for m in virtual_members.get(set).cloned().unwrap_or_default() {
                    let mut a = parent.get(&m).cloned();
                    while let Some(p) = a {
                        exempt.insert(p.clone());
                        a = parent.get(&p).cloned();
                    }
                    if let Some(owner) = parent.get(&m) {
                        exempt.extend(contains_star(owner));
                    }
                }
                expand(idx, set, &[], None, &[], &exempt, &mut scope_facts);
            }
            GenClause::Layers(ls) => {
                expand(idx, &ls[0], &[], Some(&ls[1..]), &[], &none, &mut scope_facts);
                for k in 1..ls.len() {
                    expand(idx, &ls[k], &[], None, &ls[k - 1..k], &none, &mut scope_facts);
                }
            }
        }
    }

    // Judge every edge: the canSee exception, then the source itself, then
    // its owners (raw pairs only).
    let mut out = Vec::new();
    let edges: BTreeSet<(String, String)> = case
        .uses
        .iter()
        .map(|&(s, t, _)| (case.nodes[s].id.clone(), case.nodes[t].id.clone()))
        .collect();
    for (s, t) in edges {
        if can_see.contains(&(s.clone(), t.clone())) {
            continue;
        }
        let mut chain = vec![s.clone()];
        while let Some(p) = parent.get(chain.last().unwrap()) {
            chain.push(p.clone());
        }
        for (depth, c) in chain.iter().enumerate() {
            let key = (t.clone(), c.clone());
            let mut hits: BTreeSet<usize> = pair_facts.get(&key).cloned().unwrap_or_default();
            if depth == 0 {
                hits.extend(scope_facts.get(&key).cloned().unwrap_or_default());
            }
            if let Some(&first) = hits.iter().next() {
                out.push(Expected {
                    src: s.clone(),
                    tgt: t.clone(),
                    viewer: c.clone(),
                    clause: first,
                });
                break;
            }
        }
    }
    out
}

/// Descendants of `x` (itself included) through `contains` and the virtual
/// scopes declared in `clauses`.
pub fn oracle_scope(case: &RandomCase, clauses: &[GenClause], x: &str) -> BTreeSet<String> {
    let mut s = BTreeSet::from([x.to_owned()]);
    loop {
        let before = s.len();
        for y in s.clone() {
            for n in &case.nodes {
                if n.parent.is_some_and(|p| case.nodes[p].id == y) {
                    s.insert(n.id.clone());
                }
            }
            for c in clauses {
                if let GenClause::VirtualScope(name, m) | GenClause::DeclareSet(name, m) = c {
                    if *name == y {
                        s.extend(m.iter().cloned());
                    }
                }
            }
        }
        if s.len() == before {
            return s;
        }
    }
}

/// `(path, text)` pairs of every `.jl` file under `corpus/<dir>`, with paths
/// relative to `corpus/`.
pub fn corpus_files(dir: &str) -> Vec<(String, String)> {
    let root = corpus_root();
    let mut files: Vec<(String, String)> = walkdir::WalkDir::new(root.join(dir))
        .into_iter()
        .map(|e| e.unwrap().into_path())
        .filter(|p| p.extension().is_some_and(|e| e == "jl"))
        .map(|p| {
            let rel = p.strip_prefix(&root).unwrap().to_string_lossy().into_owned();
            let text = fs::read_to_string(&p).unwrap();
            (rel, text)
        })
        .collect();
    files.sort();
    files
}

pub fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_text(rel: &str) -> String {
    fs::read_to_string(corpus_root().join(rel)).unwrap()
}

/// Inserts `member` right after the opening brace of the first type
/// declared in the file whose path ends with `file`.
pub fn inject(files: &mut [(String, String)], file: &str, member: &str) {
    let (_, text) = files
        .iter_mut()
        .find(|(p, _)| p.ends_with(file))
        .unwrap_or_else(|| panic!("no corpus file {file}"));
    let decl = text
        .find("class ")
        .or_else(|| text.find("interface "))
        .expect("a type declaration");
    let brace = decl + text[decl..].find('{').unwrap();
    text.insert_str(brace + 1, &format!("\n    {member}\n"));
}

/// The DSpace-shaped miniature corpus.
pub fn dspace() -> Vec<(String, String)> {
    corpus_files("dspace_mini/src")
}

pub const EPERSON_MUTATORS: [&str; 10] = [
    "setPassword(String)",
    "setLanguage(String)",
    "setEmail(String)",
    "setNetid(String)",
    "setFirstName(String)",
    "setLastName(String)",
    "setCanLogIn(boolean)",
    "setRequireCertificate(boolean)",
    "setSelfRegistered(boolean)",
    "setMetadata(String,String)",
];

/// Parses, binds and checks `program` against `g`.
pub fn run_check(g: &AccessGraph, program: &str) -> Vec<archlint::Violation> {
    let p = archlint::parse_constraints(program).unwrap_or_else(|e| panic!("{e}\n{program}"));
    let bp = archlint::bind_refs(&p, g).unwrap_or_else(|e| panic!("{e}\n{program}"));
    archlint::check(&bp, g)
}

pub fn edge_set(vs: &[archlint::Violation]) -> BTreeSet<(String, String)> {
    vs.iter()
        .map(|v| (v.src().to_string(), v.tgt().to_string()))
        .collect()
}

/// The implementation's answer in the reference evaluator's shape.
pub fn as_expected(vs: &[archlint::Violation]) -> Vec<Expected> {
    let mut out: Vec<Expected> = vs
        .iter()
        .map(|v| Expected {
            src: v.src().to_string(),
            tgt: v.tgt().to_string(),
            viewer: v.judged_viewer.to_string(),
            clause: v.clause.line as usize - 1,
        })
        .collect();
    out.sort();
    out
}

impl RandomCase {
    pub fn root_ids(&self) -> Vec<String> {
        self.nodes
            .iter()
            .filter(|n| n.parent.is_none())
            .map(|n| n.id.clone())
            .collect()
    }
}
