//! The `archlint` command line: `extract`, `check` and `graph`.
//!
//! Exit codes: 0 no violations, 1 violations found, 2 invalid sources,
//! facts or constraints (or bad usage), 3 I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::constraint::{bind_refs, parse_constraints};
use crate::facts::{emit_facts, parse_facts};
use crate::graph::AccessGraph;
use crate::javalite::{self, FrontendError, SOURCE_EXTENSIONS};
use crate::report::{render_dot_styled, render_structured, render_text_with, CheckReport, DotStyle};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "archlint", version, about = "Check coupling constraints against a program's access graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract the access graph of JavaLite sources as facts
    Extract {
        /// Source files or directories (scanned for .jl and .java files)
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Write the facts here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a constraint file and report violations
    Check {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the DOT drawing here
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Draw the access graph in DOT, highlighting violations
    Graph {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        constraints: Option<PathBuf>,
        /// Only draw the declaration scope of this entity
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, alias = "out")]
        dot: Option<PathBuf>,
        #[arg(long, default_value = "red")]
        violation_color: String,
    },
}

#[derive(Debug, Args)]
struct GraphSource {
    /// Source files or directories
    inputs: Vec<PathBuf>,
    /// Read the graph from a facts file instead of sources
    #[arg(long, conflicts_with = "inputs")]
    facts: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn has_source_extension(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| SOURCE_EXTENSIONS.contains(&e))
}

/// Reads every input; directories contribute their source files, sorted.
pub fn collect_sources(inputs: &[PathBuf]) -> Result<Vec<(String, String)>, std::io::Error> {
    let at = |p: &Path, e: std::io::Error| std::io::Error::new(e.kind(), format!("{}: {e}", p.display()));
    let mut paths = Vec::new();
    for input in inputs {
        if fs::metadata(input).map_err(|e| at(input, e))?.is_dir() {
            for entry in walkdir::WalkDir::new(input).sort_by_file_name() {
                let entry = entry.map_err(std::io::Error::from)?;
                if entry.file_type().is_file() && has_source_extension(entry.path()) {
                    paths.push(entry.into_path());
                }
            }
        } else {
            paths.push(input.clone());
        }
    }
    paths.sort();
    paths.dedup();
    paths
        .into_iter()
        .map(|p| Ok((p.display().to_string(), fs::read_to_string(&p).map_err(|e| at(&p, e))?)))
        .collect()
}

fn extract_graph(inputs: &[PathBuf]) -> Result<AccessGraph, Failure> {
    let files = collect_sources(inputs).map_err(|e| Failure::Io(e.to_string()))?;
    javalite::extract(&files).map_err(|e| match e {
        FrontendError::Parse(errs) => Failure::Invalid(errs.to_string()),
        FrontendError::Resolve(e) => Failure::Invalid(e.to_string()),
    })
}

fn load_graph(source: &GraphSource) -> Result<AccessGraph, Failure> {
    match &source.facts {
        Some(path) => parse_facts(&read(path)?)
            .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display()))),
        None if source.inputs.is_empty() => Err(Failure::Invalid(
            "no input: give source paths or --facts".into(),
        )),
        None => extract_graph(&source.inputs),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("standard output: {e}"))),
    }
}

fn checked(g: &AccessGraph, constraints: &Path) -> Result<(AccessGraph, CheckReport), Failure> {
    let text = read(constraints)?;
    let name = constraints.display().to_string();
    let program = parse_constraints(&text).map_err(|e| Failure::Invalid(format!("{name}: {e}")))?;
    let bound = bind_refs(&program, g).map_err(|e| Failure::Invalid(format!("{name}: {e}")))?;
    let violations = bound.check(g);
    Ok((bound.graph().clone(), CheckReport::new(g, violations, name)))
}

fn execute(cli: Cli, color: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Extract { inputs, out: path } => {
            let g = extract_graph(&inputs)?;
            emit(out, path.as_deref(), &emit_facts(&g))?;
            Ok(EXIT_CLEAN)
        }
        Command::Check {
            source,
            constraints,
            format,
            out: path,
            dot,
        } => {
            let g = load_graph(&source)?;
            let (drawn, report) = checked(&g, &constraints)?;
            let text = match format {
                Format::Text => render_text_with(&report, color && path.is_none()),
                Format::Structured => render_structured(&report),
            };
            emit(out, path.as_deref(), &text)?;
            if let Some(dot) = dot {
                let d = render_dot_styled(&drawn, Some(&report), None, &DotStyle::default())
                    .map_err(|e| Failure::Invalid(e.to_string()))?;
                emit(out, Some(&dot), &d)?;
            }
            Ok(report.exit_status())
        }
        Command::Graph {
            source,
            constraints,
            filter,
            dot,
            violation_color,
        } => {
            let g = load_graph(&source)?;
            let (drawn, report) = match &constraints {
                Some(c) => {
                    let (drawn, report) = checked(&g, c)?;
                    (drawn, Some(report))
                }
                None => (g, None),
            };
            let filter = match &filter {
                Some(r) => Some(
                    drawn
                        .lookup(r)
                        .map_err(|e| Failure::Invalid(format!("--filter: {e}")))?,
                ),
                None => None,
            };
            let style = DotStyle {
                violation_color,
                ..DotStyle::default()
            };
            let text = render_dot_styled(&drawn, report.as_ref(), filter.as_ref(), &style)
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            emit(out, dot.as_deref(), &text)?;
            Ok(report.map_or(EXIT_CLEAN, |r| r.exit_status()))
        }
    }
}

/// Whether `ARCHLINT_COLOR` asks for ANSI colour in text reports.
pub fn color_from_env() -> bool {
    std::env::var("ARCHLINT_COLOR").is_ok_and(|v| v == "1")
}

/// Runs the command line `args` (program name first), returning the exit
/// code. Colour follows `ARCHLINT_COLOR`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_color(args, color_from_env(), out, err)
}

pub fn run_with_color<I, T>(args: I, color: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_CLEAN };
        }
    };
    match execute(cli, color, out) {
        Ok(code) => code,
        Err(f) => {
            let (Failure::Invalid(msg) | Failure::Io(msg)) = &f;
            for line in msg.lines() {
                let _ = writeln!(err, "archlint: {line}");
            }
            f.code()
        }
    }
}
