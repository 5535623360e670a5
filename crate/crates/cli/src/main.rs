//! `foldlab`: decide, search, sweep, generate, render and verify cube
//! foldings of rectangular polyominoes with holes.

mod render;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use foldlab::analyzer::{minimally_cooperating_sets_with, AnalyzerConfig, AnalyzerError, Cooperation, DEFAULT_HOLE_GUARD};
use foldlab::constructions::{
    fixture, fixture_ids, fixtures, generate_staircase, parse_fixture, staircase_witness, verify_fixture, Fixture,
};
use foldlab::engine::{
    brute_force_facemappings, check_consistency, search_facemappings, EngineError, Facemapping, SearchConfig,
    Verdict,
};
use foldlab::grid::{Cell, Polyomino};

/// Exit code for unreadable or malformed input.
const EXIT_USAGE: u8 = 64;
/// Exit code for a facemapping that does not fit its polyomino.
const EXIT_DATA: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "foldlab", version, about = "Cube folding of rectangular polyominoes with holes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a polyomino: 0 foldable, 1 unfoldable, 2 necessary only or unknown.
    Check {
        /// Polyomino file, or the id of a shipped fixture.
        file: String,
        #[arg(long)]
        json: bool,
    },
    /// Stream facemappings as JSON lines.
    Search {
        file: String,
        /// Emit every consistent facemapping, not just the first onto one.
        #[arg(long)]
        all: bool,
        /// Brute-force oracle: no propagation or pruning.
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long)]
        parallel: bool,
    },
    /// Report minimally cooperating hole sets.
    Cooperate {
        file: String,
        #[arg(long)]
        max_set_size: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_HOLE_GUARD)]
        guard: usize,
        #[arg(long)]
        json: bool,
    },
    /// Emit a polyomino in the text format.
    Generate {
        #[command(subcommand)]
        source: Source,
        /// Append the witness face labels.
        #[arg(long, global = true)]
        witness: bool,
    },
    /// Draw a polyomino, optionally labelled by a facemapping.
    Render {
        file: String,
        /// Facemapping JSON as printed by `search`.
        #[arg(long)]
        facemapping: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
    /// Check every shipped fixture.
    VerifyFixtures {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Source {
    /// A generated family.
    Family {
        #[arg(value_enum)]
        name: Family,
        #[arg(long)]
        k: u32,
    },
    /// A shipped fixture by id.
    Fixture { id: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Staircase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

/// A command failure: message for stderr and the exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match run(cli.command, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let _ = out.flush();
            eprintln!("foldlab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command, out: &mut impl std::io::Write) -> Outcome {
    let mut text = String::new();
    let code = match command {
        Command::Check { file, json } => check(&load(&file)?.polyomino, json, &mut text),
        Command::Search { file, all, no_prune, node_limit, parallel } => {
            let cfg = SearchConfig {
                enumerate_all: all,
                node_limit: node_limit.unwrap_or(SearchConfig::default().node_limit),
                use_lemma_pruning: true,
                parallel,
            };
            search(&load(&file)?.polyomino, &cfg, no_prune, out)
        }
        Command::Cooperate { file, max_set_size, guard, json } => {
            cooperate(&load(&file)?.polyomino, max_set_size, guard, json, &mut text)
        }
        Command::Generate { source, witness } => generate(source, witness, &mut text),
        Command::Render { file, facemapping, format } => {
            render(&load(&file)?.polyomino, facemapping.as_deref(), format, &mut text)
        }
        Command::VerifyFixtures { json } => verify(json, &mut text),
    };
    out.write_all(text.as_bytes()).map_err(|e| Failure::new(74, e.to_string()))?;
    code
}

/// Reads a polyomino file, accepting fixture files with label blocks.
/// A name that is not a file but is a fixture id loads that fixture.
fn load(file: &str) -> Result<Fixture, Failure> {
    let path = Path::new(file);
    if !path.exists() && fixture_ids().contains(&file) {
        return fixture(file).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{file}: {e}")))?;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or(file);
    parse_fixture(id, &text).map_err(|e| Failure::new(EXIT_USAGE, format!("{file}: {e}")))
}

fn exit_code(v: &Verdict) -> u8 {
    match v {
        Verdict::FoldableCertified { .. } => 0,
        Verdict::UnfoldableCertified { .. } => 1,
        Verdict::FacemappingExists { .. } | Verdict::Unknown { .. } => 2,
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

fn check(p: &Polyomino, json: bool, out: &mut String) -> Outcome {
    let v = foldlab::analyzer::classify_with(p, &AnalyzerConfig::default());
    if json {
        let _ = writeln!(out, "{}", to_json(&v));
    } else {
        let _ = write!(out, "{} ({})", v.status(), v.reason());
        if let Verdict::FoldableCertified { fixture: Some(id), .. } = &v {
            let _ = write!(out, " via {id}");
        }
        out.push('\n');
        if let Some(w) = v.witness() {
            let _ = write!(out, "{:?}", w.facemapping);
        }
    }
    Ok(exit_code(&v))
}

fn search(p: &Polyomino, cfg: &SearchConfig, no_prune: bool, out: &mut impl std::io::Write) -> Outcome {
    let limit = |e: EngineError| match e {
        EngineError::NodeLimitExceeded(_) => Failure::new(2, e.to_string()),
        _ => Failure::new(1, e.to_string()),
    };
    let write_err = |e: std::io::Error| Failure::new(74, e.to_string());
    if no_prune {
        let all = brute_force_facemappings(p, cfg).map_err(limit)?;
        let onto = |fm: &Facemapping| foldlab::engine::covered_faces(fm).len() == 6;
        let mut chosen: Vec<&Facemapping> = all.iter().filter(|fm| cfg.enumerate_all || onto(fm)).collect();
        if !cfg.enumerate_all {
            chosen.truncate(1);
        }
        for fm in chosen {
            writeln!(out, "{}", to_json(fm)).map_err(write_err)?;
        }
        return Ok(0);
    }
    let mut io_error = None;
    let stats = search_facemappings(p, cfg, |fm| match writeln!(out, "{}", to_json(&fm)) {
        Ok(()) if cfg.enumerate_all => ControlFlow::Continue(()),
        Ok(()) => ControlFlow::Break(()),
        Err(e) => {
            io_error = Some(e);
            ControlFlow::Break(())
        }
    })
    .map_err(limit)?;
    if let Some(e) = io_error {
        return Err(write_err(e));
    }
    eprintln!("{}", to_json(&stats));
    Ok(0)
}

fn cooperate(p: &Polyomino, max: Option<usize>, guard: usize, json: bool, out: &mut String) -> Outcome {
    let max = max.unwrap_or(p.holes().len());
    let report = minimally_cooperating_sets_with(p, max, guard, &AnalyzerConfig::default()).map_err(|e| match e {
        AnalyzerError::GuardExceeded(..) => Failure::new(2, e.to_string()),
        _ => Failure::new(1, e.to_string()),
    })?;
    if json {
        let _ = writeln!(out, "{}", to_json(&report));
    } else {
        let _ = writeln!(out, "{} holes, sets up to size {}", report.hole_count, report.max_set_size);
        for s in &report.minimal_sets {
            let (answer, provenance) = match &s.cooperation {
                Cooperation::Yes(p) => ("cooperates", p),
                Cooperation::NecessaryOnly(p) => ("onto facemapping only", p),
                Cooperation::No(p) | Cooperation::Unknown(p) => ("unresolved", p),
            };
            let _ = writeln!(out, "minimal {:?}: {answer} ({})", s.holes, to_json(provenance));
        }
        for s in &report.unknown_sets {
            let _ = writeln!(out, "unknown {s:?}");
        }
    }
    Ok(if report.unknown_sets.is_empty() { 0 } else { 2 })
}

fn label_block(p: &Polyomino, name: &str, label: impl Fn(Cell) -> Option<String>) -> String {
    let mut out = format!("{name}:\n");
    for y in (0..p.height()).rev() {
        let row: Vec<String> = (0..p.width()).map(|x| label(Cell::new(x, y)).unwrap_or_else(|| ".".into())).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn generate(source: Source, witness: bool, out: &mut String) -> Outcome {
    match source {
        Source::Family { name: Family::Staircase, k } => {
            if k == 0 {
                return Err(Failure::new(EXIT_USAGE, "staircase needs --k of at least 1"));
            }
            let p = generate_staircase(k).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
            out.push_str(&p.to_text());
            if witness {
                let labels = staircase_witness(k).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
                out.push_str(&label_block(&p, "faces", |c| labels.get(&c).map(|l| l.to_string())));
            }
        }
        Source::Fixture { id } => {
            let f = fixture(&id).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
            out.push_str(&f.polyomino.to_text());
            if witness && !f.face_labels.is_empty() {
                out.push_str(&label_block(&f.polyomino, "faces", |c| f.face_labels.get(&c).map(|l| l.to_string())));
                if let Some(layers) = &f.layer_labels {
                    out.push_str(&label_block(&f.polyomino, "layers", |c| layers.get(&c).map(|l| l.to_string())));
                }
            }
        }
    }
    Ok(0)
}

fn render(p: &Polyomino, facemapping: Option<&Path>, format: Format, out: &mut String) -> Outcome {
    let fm = match facemapping {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
            let fm: Facemapping = serde_json::from_str(text.trim())
                .map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))?;
            check_consistency(p, &fm).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
            Some(fm)
        }
    };
    out.push_str(&match format {
        Format::Ascii => render::ascii(p, fm.as_ref()),
        Format::Svg => render::svg(p, fm.as_ref()),
    });
    Ok(0)
}

fn verify(json: bool, out: &mut String) -> Outcome {
    let reports: Vec<_> = fixtures().iter().map(verify_fixture).collect();
    let failed: BTreeSet<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.figure_id.as_str()).collect();
    for r in &reports {
        if json {
            let _ = writeln!(out, "{}", to_json(r));
            continue;
        }
        let checks: Vec<String> = r
            .checks
            .iter()
            .map(|c| {
                let mark = if c.passed { "" } else { "!" };
                if c.detail.is_empty() { format!("{mark}{}", c.name) } else { format!("{mark}{}={}", c.name, c.detail) }
            })
            .collect();
        let status = if r.passed() { "ok" } else { "FAILED" };
        let _ = writeln!(out, "{:<6} {status:<6} {}", r.figure_id, checks.join(", "));
    }
    if !json {
        let _ = writeln!(out, "{} of {} fixtures verified", reports.len() - failed.len(), reports.len());
    }
    Ok(if failed.is_empty() { 0 } else { 1 })
}
