//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use archlint::cli::run_with_color;
use archlint::javalite::extract;
use archlint::report::dot_syntax::parse_dot;
use archlint::{emit_facts, parse_facts, render_dot, AccessGraph, CheckReport};
use common::*;
use rand::seq::SliceRandom;
use rand::Rng;

type Edges = BTreeSet<(String, String)>;
type Criterion = fn() -> Result<String, String>;
type Corpus = (&'static str, Vec<(String, String)>, Vec<String>);

fn edges(pairs: &[(&str, &str)]) -> Edges {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn dspace_cc(name: &str) -> String {
    corpus_text(&format!("dspace_mini/{name}"))
}

fn fqn(path: &str) -> String {
    let rel = path.split("/src/").nth(1).unwrap();
    rel.trim_end_matches(".jl").replace('/', ".")
}

fn check_files(files: &[(String, String)], program: &str) -> Vec<archlint::Violation> {
    let g = extract(files).unwrap_or_else(|e| panic!("{e}"));
    run_check(&g, program)
}

// 1.

fn imagemgr_example() -> Result<String, String> {
    let start = Instant::now();
    let files = corpus_files("imagemgr");
    let vs = check_files(&files, &corpus_text("imagemgr/hideScope.cc"));
    let elapsed = start.elapsed();
    let want = edges(&[
        ("ImageMgr.ImageMgr()", "ImageDoc"),
        ("ImageMgr.display()", "ImageDoc"),
        ("ImageMgr.images", "ImageDoc"),
        ("ImageMgr.display()", "ImageDoc.getName()"),
        ("ImageMgr.addImage()", "ImageDoc.ImageDoc()"),
        ("ImageMgr.addImage()", "ImageDoc"),
    ]);
    let got = edge_set(&vs);
    if vs.len() != 6 || got != want {
        return Err(format!("got {got:?}"));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("6 violations in {elapsed:?}"))
}

// 2.

/// Layer breaches in every direction: app skipping to storage, storage
/// reaching up into business and app, and business reaching up into app.
fn layer_breaches() -> Vec<(String, String)> {
    let mut files = dspace();
    inject(&mut files, "app/util/Util.jl", "private org.dspace.storage.rdbms.TableRow row;");
    inject(&mut files, "storage/rdbms/TableRow.jl", "private org.dspace.content.Item item;");
    inject(&mut files, "storage/rdbms/DatabaseManager.jl", "private org.dspace.app.util.Util util;");
    inject(&mut files, "content/Collection.jl", "private org.dspace.app.util.Util util;");
    files
}

fn layers_equivalence() -> Result<String, String> {
    let layered = dspace_cc("layers.cc");
    let expanded = dspace_cc("layers_expanded.cc");
    let mut sizes = Vec::new();
    for files in [dspace(), layer_breaches()] {
        let a: BTreeSet<_> = check_files(&files, &layered)
            .into_iter()
            .map(|v| (v.src().to_string(), v.tgt().to_string(), v.edge.occurrences.clone()))
            .collect();
        let b: BTreeSet<_> = check_files(&files, &expanded)
            .into_iter()
            .map(|v| (v.src().to_string(), v.tgt().to_string(), v.edge.occurrences.clone()))
            .collect();
        if a != b {
            return Err(format!("layers {a:?}\nexpanded {b:?}"));
        }
        sizes.push(a.len());
    }
    if sizes != [0, 4] {
        return Err(format!("unexpected violation counts {sizes:?}"));
    }
    Ok("identical sets on base (0) and breached (4) corpora".into())
}

// 3.

const APP_CLASSES: [&str; 5] = [
    "app/statistics/StatsReport.jl",
    "app/oai/OaiCrosswalk.jl",
    "app/util/Util.jl",
    "app/webui/jsptag/ItemListTag.jl",
    "app/webui/jsptag/BrowseListTag.jl",
];

const BUSINESS_CLASSES: [&str; 5] = [
    "content/Item.jl",
    "content/Collection.jl",
    "content/Bundle.jl",
    "workflow/WorkflowItem.jl",
    "checker/BitstreamInfoDAO.jl",
];

fn class_of(files: &[(String, String)], suffix: &str) -> String {
    fqn(&files.iter().find(|(p, _)| p.ends_with(suffix)).unwrap().0)
}

/// Adds a field of type `ty` named `field` to each host; returns the
/// expected violating edges.
fn inject_fields(files: &mut [(String, String)], hosts: &[&str], field: &str, ty: &str) -> Edges {
    let mut want = Edges::new();
    for h in hosts {
        inject(files, h, &format!("private {ty} {field};"));
        want.insert((format!("{}.{field}", class_of(files, h)), ty.to_string()));
    }
    want
}

fn exact(label: &str, got: Edges, want: &Edges) -> Result<(), String> {
    if got != *want {
        let missed: Vec<_> = want.difference(&got).collect();
        let extra: Vec<_> = got.difference(want).collect();
        return Err(format!("{label}: missed {missed:?}, false positives {extra:?}"));
    }
    Ok(())
}

fn setter_call(setter: &str) -> String {
    let (name, params) = setter.split_once('(').unwrap();
    let args: Vec<&str> = params
        .trim_end_matches(')')
        .split(',')
        .map(|p| if p == "boolean" { "true" } else { "\"x\"" })
        .collect();
    format!("p.{name}({});", args.join(", "))
}

fn injection_study() -> Result<String, String> {
    // Package level: app classes grabbing storage rows directly.
    let mut files = dspace();
    let want = inject_fields(&mut files, &APP_CLASSES, "row", "org.dspace.storage.rdbms.TableRow");
    exact("package", edge_set(&check_files(&files, &dspace_cc("storage.cc"))), &want)?;
    let package = want.len();

    // Class level: business classes bypassing Bitstream.
    let mut files = dspace();
    let bsm = "org.dspace.storage.bitstore.BitstreamStorageManager";
    let want = inject_fields(&mut files, &BUSINESS_CLASSES, "store", bsm);
    exact("class", edge_set(&check_files(&files, &dspace_cc("bitstore.cc"))), &want)?;
    let class = want.len();

    // Method level: nothing injected, nothing found.
    let method = check_files(&dspace(), &dspace_cc("mutators.cc")).len();
    if method != 0 {
        return Err(format!("method: {method} false positives"));
    }

    // Random fault injection: k mutator calls from random non-EPerson
    // classes, and k random app classes reaching into storage.
    let mut r = rng(0xfa017);
    let hosts: Vec<String> = dspace()
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| !p.ends_with("EPerson.jl"))
        .collect();
    let app_hosts: Vec<String> = hosts.iter().filter(|p| p.contains("/app/")).cloned().collect();
    let mut injected = 0;
    for trial in 0..40 {
        let mut files = dspace();
        let k = r.gen_range(1..=8);
        let mut want = Edges::new();
        for n in 0..k {
            let host = hosts.choose(&mut r).unwrap();
            let setter = EPERSON_MUTATORS.choose(&mut r).unwrap();
            inject(
                &mut files,
                host,
                &format!("void inj{n}(org.dspace.eperson.EPerson p) {{ {} }}", setter_call(setter)),
            );
            want.insert((
                format!("{}.inj{n}(EPerson)", fqn(host)),
                format!("org.dspace.eperson.EPerson.{setter}"),
            ));
        }
        exact(&format!("mutator trial {trial}"), edge_set(&check_files(&files, &dspace_cc("mutators.cc"))), &want)?;
        injected += k;

        let mut files = dspace();
        let k = r.gen_range(1..=app_hosts.len());
        let chosen: Vec<&str> = app_hosts.choose_multiple(&mut r, k).map(String::as_str).collect();
        let want = inject_fields(&mut files, &chosen, "row", "org.dspace.storage.rdbms.TableRow");
        exact(&format!("storage trial {trial}"), edge_set(&check_files(&files, &dspace_cc("storage.cc"))), &want)?;
        injected += k;
    }
    Ok(format!(
        "package {package}, class {class}, method {method}; {injected} random injections all detected"
    ))
}

// 4.

const CASES: u64 = 500;

fn oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let mut nonempty = 0;
    let mut total = 0;
    for seed in 0..CASES {
        let case = random_case(seed);
        let got = as_expected(&run_check(&case.graph(), &case.program()));
        let mut want = oracle(&case, &case.clauses);
        want.sort();
        if got != want {
            return Err(format!("seed {seed}:\n{}\ngot {got:?}\nwant {want:?}", case.program()));
        }
        nonempty += usize::from(!got.is_empty());
        total += got.len();
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{CASES} cases, {nonempty} with violations, {total} violations, 0 discrepancies in {elapsed:?}"
    ))
}

// 5.

fn exception_axiom() -> Result<String, String> {
    let mut probes = 0;
    for seed in 0..CASES {
        let case = random_case(seed);
        let g = case.graph();
        let before = as_expected(&run_check(&g, &case.program()));
        for v in &before {
            let mut clauses = case.clauses.clone();
            clauses.push(GenClause::CanSee(v.viewer.clone(), v.tgt.clone()));
            let after = as_expected(&run_check(&g, &program_text(&clauses)));
            let mut want = oracle(&case, &clauses);
            want.sort();
            if after != want {
                return Err(format!("seed {seed}: disagrees with reference after canSee"));
            }
            let scope = oracle_scope(&case, &clauses, &v.viewer);
            let removed: Vec<&Expected> = before.iter().filter(|x| !after.contains(x)).collect();
            let expected: Vec<&Expected> = before
                .iter()
                .filter(|x| x.tgt == v.tgt && scope.contains(&x.src))
                .collect();
            if removed != expected || after.len() + removed.len() != before.len() {
                return Err(format!(
                    "seed {seed}: canSee({}, {}) removed {removed:?}, expected {expected:?}",
                    v.viewer, v.tgt
                ));
            }
            probes += 1;
        }
    }
    Ok(format!("{probes} canSee probes, exact deltas"))
}

// 6.

fn cli(args: &[&str]) -> (i32, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with_color(
        std::iter::once("archlint").chain(args.iter().copied()),
        false,
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

fn write_tree(root: &Path, files: &[(String, String)]) {
    for (rel, text) in files {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }
}

fn red_edges_match(g: &AccessGraph, report: &CheckReport) -> Result<(), String> {
    let dot = render_dot(g, Some(report), None).map_err(|e| e.to_string())?;
    let parsed = parse_dot(&dot).map_err(|e| e.to_string())?;
    let red = parsed.edges_with("color", "red").count();
    if red != report.violating_edges().len() {
        return Err(format!("{red} red edges for {} violating edges", report.violating_edges().len()));
    }
    Ok(())
}

fn determinism_and_round_trips() -> Result<String, String> {
    for seed in 0..200 {
        let g = random_case(10_000 + seed).graph();
        let text = emit_facts(&g);
        let back = parse_facts(&text).map_err(|e| e.to_string())?;
        if back != g || emit_facts(&back) != text {
            return Err(format!("facts round trip differs for seed {seed}"));
        }
    }

    // Every corpus case through the command line, from sources and from
    // extracted facts.
    let mut corpora: Vec<Corpus> = vec![(
        "imagemgr",
        corpus_files("imagemgr"),
        vec![corpus_text("imagemgr/hideScope.cc")],
    )];
    let all_cc: Vec<String> = [
        "layers.cc",
        "layers_expanded.cc",
        "storage.cc",
        "bitstore.cc",
        "mutators.cc",
        "mets.cc",
        "authorize.cc",
    ]
    .iter()
    .map(|c| dspace_cc(c))
    .collect();
    corpora.push(("dspace", dspace(), all_cc.clone()));
    corpora.push(("breaches", layer_breaches(), all_cc.clone()));
    let mut injected = dspace();
    inject_fields(&mut injected, &APP_CLASSES, "row", "org.dspace.storage.rdbms.TableRow");
    inject_fields(&mut injected, &BUSINESS_CLASSES, "store", "org.dspace.storage.bitstore.BitstreamStorageManager");
    corpora.push(("injected", injected, all_cc));

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for (name, files, programs) in &corpora {
        let root = dir.path().join(name);
        write_tree(&root, files);
        let src = root.to_str().unwrap();
        let facts = root.join("graph.facts");
        let (code, msg) = cli(&["extract", src, "--out", facts.to_str().unwrap()]);
        if code != 0 {
            return Err(format!("{name}: extract failed: {msg}"));
        }
        let g = parse_facts(&fs::read_to_string(&facts).unwrap()).map_err(|e| e.to_string())?;
        for (i, program) in programs.iter().enumerate() {
            let cc = root.join(format!("c{i}.cc"));
            fs::write(&cc, program).unwrap();
            let cc = cc.to_str().unwrap();
            for format in ["text", "structured"] {
                let direct = cli(&["check", src, "--constraints", cc, "--format", format]);
                let via = cli(&["check", "--facts", facts.to_str().unwrap(), "--constraints", cc, "--format", format]);
                if direct != via {
                    return Err(format!("{name}/c{i}: extract+check differs from check"));
                }
                runs += 1;
            }
            let bp = archlint::bind_refs(&archlint::parse_constraints(program).unwrap(), &g).unwrap();
            let report = CheckReport::new(&g, archlint::check(&bp, &g), "c.cc");
            red_edges_match(bp.graph(), &report).map_err(|e| format!("{name}/c{i}: {e}"))?;
            let (_, dot) = cli(&["graph", src, "--constraints", cc]);
            let red = parse_dot(&dot).map_err(|e| e.to_string())?.edges_with("color", "red").count();
            if red != report.violating_edges().len() {
                return Err(format!("{name}/c{i}: graph command drew {red} red edges"));
            }
        }
    }
    for seed in 0..CASES {
        let case = random_case(seed);
        let g = case.graph();
        let bp = archlint::bind_refs(&archlint::parse_constraints(&case.program()).unwrap(), &g).unwrap();
        let report = CheckReport::new(&g, archlint::check(&bp, &g), "c.cc");
        red_edges_match(bp.graph(), &report).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(format!(
        "200 facts round trips; {runs} byte-equal check runs; red edges match on all corpus and {CASES} random cases"
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 6] = [
        ("imagemgr example", imagemgr_example),
        ("layers equivalence", layers_equivalence),
        ("injection study", injection_study),
        ("reference equivalence", oracle_equivalence),
        ("exception axiom", exception_axiom),
        ("determinism and round trips", determinism_and_round_trips),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
