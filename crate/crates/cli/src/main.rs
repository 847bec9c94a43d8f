//! Command-line front end: parsing, evaluation, validity, countermodel and
//! double-negation probes, algebra export, bounded proof search, and frame
//! reports, with stable output and exit codes.
//!
//! Exit codes: 0 success/found, 1 negative logic outcome (invalid sequent,
//! no countermodel, not provable, non-strict frame), 2 usage error,
//! 3 input-format error, 4 budget truncation. Every error line starts with
//! `error:<class>:`.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use nodal::algebra::{build_complex_algebra, AlgebraError, ClosureComposite, ComonadComposite};
use nodal::calculus::{parse_sequent, prove_bounded, ProveConfig, ProveOutcome};
use nodal::kripke::{KripkeModel, ModelDoc};
use nodal::search::{
    find_countermodel, probe_dne, CountermodelOutcome, CounterexampleDoc, DneOutcome,
    DneWitnessDoc, SearchConfig, SearchStats,
};
use nodal::syntax::{parse, Formula, NegationScheme};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(
    name = "nodal",
    version,
    about = "Desk-scale workbench for an intuitionistic tense logic with four split negations",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula and print its canonical form.
    Parse {
        formula: String,
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Evaluate a formula on a model: its extension, or its value at one world.
    Eval {
        #[arg(long, value_name = "FILE")]
        model: String,
        #[arg(long, value_name = "FORMULA")]
        formula: String,
        #[arg(long, value_name = "WORLD")]
        world: Option<String>,
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Check whether a formula holds at every world of a model.
    Valid {
        #[arg(long, value_name = "FILE")]
        model: String,
        #[arg(long, value_name = "FORMULA")]
        formula: String,
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Search for a model and world where a formula fails.
    Countermodel {
        #[arg(long, value_name = "FORMULA")]
        formula: String,
        #[arg(long = "max-worlds", value_name = "N")]
        max_worlds: usize,
        /// Restrict the search to strict frames (all four frame conditions).
        #[arg(long)]
        strict: bool,
        /// Write the witness model as a DOT digraph to this path.
        #[arg(long, value_name = "PATH")]
        dot: Option<String>,
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Search strict models for an atom moved by a negation scheme's image.
    ProbeDne {
        /// heyting, galois, galois_flip, cogalois, cogalois_flip, or
        /// custom:FORMULA with hole atom `a`.
        #[arg(long, value_name = "SCHEME")]
        scheme: String,
        #[arg(long = "max-worlds", value_name = "N")]
        max_worlds: usize,
        /// Comma-separated atom inventory for the searched models.
        #[arg(long, value_name = "ATOMS", default_value = "p")]
        atoms: String,
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Build the up-set algebra of a model; report laws and dualizing elements.
    Algebra {
        #[arg(long, value_name = "FILE")]
        model: String,
        /// Write the element/operation tables as JSON to this path.
        #[arg(long = "export-algebra", value_name = "PATH")]
        export_algebra: Option<String>,
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Bounded backward proof search for a sequent "X |- Y".
    Prove {
        sequent: String,
        /// Maximum derivation height (an axiom leaf has height 1).
        #[arg(long, value_name = "D", default_value_t = 6)]
        depth: usize,
        /// Admit analytic cut during search.
        #[arg(long = "allow-cut")]
        allow_cut: bool,
        /// Abort after expanding this many search nodes.
        #[arg(long, value_name = "N")]
        budget: Option<u64>,
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Report a model's frame conditions and closure repairs.
    CheckFrame {
        #[arg(long, value_name = "FILE")]
        model: String,
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
}

struct Failure {
    class: &'static str,
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { class: "usage", code: EXIT_USAGE, msg: msg.into() }
    }

    fn parse(msg: impl Into<String>) -> Self {
        Failure { class: "parse", code: EXIT_INPUT, msg: msg.into() }
    }

    fn model(msg: impl Into<String>) -> Self {
        Failure { class: "model", code: EXIT_INPUT, msg: msg.into() }
    }

    fn io(msg: impl Into<String>) -> Self {
        Failure { class: "io", code: EXIT_INPUT, msg: msg.into() }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Die quietly on a closed pipe, like any other line-oriented tool, instead
/// of panicking mid-print.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::from(EXIT_OK);
            }
            // Flatten clap's message body (everything before the usage
            // banner) onto one machine-parsable line.
            let text = e.to_string();
            let body: Vec<&str> = text
                .lines()
                .take_while(|l| !l.trim_start().starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let line = if body.is_empty() { "bad arguments".to_string() } else { body.join(" ") };
            let line = line.strip_prefix("error: ").unwrap_or(&line);
            eprintln!("error:usage: {line}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error:{}: {}", f.class, f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(format!("{path}: {e}")))
}

fn write_file(path: &str, content: &str) -> CliResult<()> {
    fs::write(path, content).map_err(|e| Failure::io(format!("{path}: {e}")))
}

/// Load a model file; warn on stderr when its advisory strict flag
/// disagrees with the strictness computed from the relations.
fn load_model(path: &str) -> CliResult<(KripkeModel, usize)> {
    let text = read_file(path)?;
    let doc: ModelDoc =
        serde_json::from_str(&text).map_err(|e| Failure::model(format!("{path}: {e}")))?;
    let (model, added) =
        KripkeModel::from_doc(&doc).map_err(|e| Failure::model(format!("{path}: {e}")))?;
    if let Some(declared) = doc.strict {
        if declared != model.is_strict() {
            eprintln!(
                "warning: {path} declares strict={declared} but the relations compute strict={}; using the computed value",
                model.is_strict()
            );
        }
    }
    Ok((model, added))
}

fn parse_formula_arg(text: &str) -> CliResult<Formula> {
    parse(text).map_err(|e| Failure::parse(e.to_string()))
}

/// Send a JSON document where `--json` asked: `-` is standard output.
/// Returns true when it replaced the human-readable output.
fn emit_json<T: Serialize>(doc: &T, dest: Option<&str>) -> CliResult<bool> {
    let Some(dest) = dest else { return Ok(false) };
    let text = serde_json::to_string_pretty(doc).expect("reports serialize");
    if dest == "-" {
        println!("{text}");
        Ok(true)
    } else {
        write_file(dest, &format!("{text}\n"))?;
        Ok(false)
    }
}

/// One-line-per-fact description of a model, stable across runs.
fn describe_model(m: &KripkeModel, indent: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{indent}worlds: {}", m.names().join(" "));
    let pairs = |pairs: Vec<(usize, usize)>, skip_reflexive: bool| {
        let body: Vec<String> = pairs
            .into_iter()
            .filter(|&(a, b)| !skip_reflexive || a != b)
            .map(|(a, b)| format!("({}, {})", m.name(a), m.name(b)))
            .collect();
        if body.is_empty() { "(none)".to_string() } else { body.join(" ") }
    };
    let _ = writeln!(out, "{indent}leq: {}", pairs(m.leq().pairs(), true));
    let _ = writeln!(out, "{indent}frown: {}", pairs(m.frown().pairs(), false));
    let _ = writeln!(out, "{indent}smile: {}", pairs(m.smile().pairs(), false));
    for (atom, set) in m.valuation() {
        let _ = writeln!(out, "{indent}val: {atom} = {}", m.format_set(*set));
    }
    out
}

fn stats_line(stats: SearchStats) -> String {
    format!("stats: frames={} models={}", stats.frames, stats.models)
}

#[derive(Serialize, Deserialize)]
struct ParseDoc {
    input: String,
    canonical: String,
    atoms: Vec<String>,
    depth: usize,
}

#[derive(Serialize, Deserialize)]
struct EvalDoc {
    formula: String,
    extension: Vec<String>,
    world: Option<String>,
    value: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct ValidDoc {
    formula: String,
    valid: bool,
    failing: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CountermodelCliDoc {
    outcome: String,
    witness: Option<CounterexampleDoc>,
    stats: SearchStats,
}

#[derive(Serialize, Deserialize)]
struct ProbeCliDoc {
    outcome: String,
    witness: Option<DneWitnessDoc>,
    stats: SearchStats,
}

#[derive(Serialize, Deserialize)]
struct ProveDoc {
    sequent: String,
    depth: usize,
    outcome: String,
    height: Option<usize>,
    derivation: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FrameDoc {
    strict: bool,
    closure_added: usize,
    violations: Vec<String>,
}

fn run(cmd: Cmd) -> CliResult<u8> {
    match cmd {
        Cmd::Parse { formula, json } => {
            let f = parse_formula_arg(&formula)?;
            let doc = ParseDoc {
                input: formula,
                canonical: f.to_string(),
                atoms: f.atoms().into_iter().map(str::to_string).collect(),
                depth: f.depth(),
            };
            if !emit_json(&doc, json.as_deref())? {
                println!("{f}");
            }
            Ok(EXIT_OK)
        }
        Cmd::Eval { model, formula, world, json } => {
            let (m, _) = load_model(&model)?;
            let f = parse_formula_arg(&formula)?;
            let ext = m.extension(&f);
            let world_index = match &world {
                Some(name) => Some(
                    m.world_index(name)
                        .ok_or_else(|| Failure::model(format!("unknown world '{name}'")))?,
                ),
                None => None,
            };
            let value = world_index.map(|w| ext.contains(w));
            let doc = EvalDoc {
                formula: f.to_string(),
                extension: ext.iter().map(|w| m.name(w).to_string()).collect(),
                world,
                value,
            };
            if !emit_json(&doc, json.as_deref())? {
                match value {
                    Some(v) => println!("{v}"),
                    None => println!("{}", m.format_set(ext)),
                }
            }
            Ok(EXIT_OK)
        }
        Cmd::Valid { model, formula, json } => {
            let (m, _) = load_model(&model)?;
            let f = parse_formula_arg(&formula)?;
            let ext = m.extension(&f);
            let failing = ext.complement();
            let valid = failing.is_empty();
            let doc = ValidDoc {
                formula: f.to_string(),
                valid,
                failing: failing.iter().map(|w| m.name(w).to_string()).collect(),
            };
            if !emit_json(&doc, json.as_deref())? {
                println!("{}", if valid { "valid" } else { "invalid" });
            }
            Ok(if valid { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Cmd::Countermodel { formula, max_worlds, strict, dot, json } => {
            let f = parse_formula_arg(&formula)?;
            let cfg = SearchConfig::new(max_worlds)
                .atoms(f.atoms().into_iter().map(str::to_string))
                .strict(strict);
            let outcome =
                find_countermodel(&f, &cfg).map_err(|e| Failure::usage(e.to_string()))?;
            match outcome {
                CountermodelOutcome::Found(report) => {
                    if let Some(path) = &dot {
                        write_file(path, &report.model.to_dot())?;
                    }
                    let doc = CountermodelCliDoc {
                        outcome: "found".to_string(),
                        witness: Some(report.to_doc()),
                        stats: report.stats,
                    };
                    if !emit_json(&doc, json.as_deref())? {
                        println!("countermodel found for {f}");
                        println!("fails at: {}", report.model.name(report.world));
                        print!("{}", describe_model(&report.model, ""));
                        println!("{}", stats_line(report.stats));
                    }
                    Ok(EXIT_OK)
                }
                CountermodelOutcome::Exhausted(stats) => {
                    let doc = CountermodelCliDoc {
                        outcome: "exhausted".to_string(),
                        witness: None,
                        stats,
                    };
                    if !emit_json(&doc, json.as_deref())? {
                        println!("no countermodel within {max_worlds} world(s)");
                        println!("{}", stats_line(stats));
                    }
                    Ok(EXIT_NEGATIVE)
                }
                CountermodelOutcome::Truncated(stats) => {
                    let doc = CountermodelCliDoc {
                        outcome: "truncated".to_string(),
                        witness: None,
                        stats,
                    };
                    if !emit_json(&doc, json.as_deref())? {
                        println!("search truncated by budget");
                        println!("{}", stats_line(stats));
                    }
                    Ok(EXIT_BUDGET)
                }
            }
        }
        Cmd::ProbeDne { scheme, max_worlds, atoms, json } => {
            let scheme =
                NegationScheme::from_str(&scheme).map_err(|e| Failure::parse(e.to_string()))?;
            let atom_list: Vec<String> = atoms
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            let cfg = SearchConfig::new(max_worlds)
                .atoms(atom_list)
                .strict(true)
                .scheme(scheme.clone());
            let outcome = probe_dne(&cfg).map_err(|e| Failure::usage(e.to_string()))?;
            match outcome {
                DneOutcome::Witness(report) => {
                    let doc = ProbeCliDoc {
                        outcome: "witness".to_string(),
                        witness: Some(report.to_doc()),
                        stats: report.stats,
                    };
                    if !emit_json(&doc, json.as_deref())? {
                        let m = &report.model;
                        let a = &report.atom;
                        println!("witness found for scheme {scheme}");
                        print!("{}", describe_model(m, ""));
                        println!("N({a}) = {}", m.format_set(report.neg_extension));
                        println!("{a} = {}", m.format_set(report.atom_extension));
                        println!(
                            "forward ({a} <= N({a})): {}",
                            if report.forward_holds { "yes" } else { "no" }
                        );
                        println!(
                            "backward (N({a}) <= {a}): {}",
                            if report.backward_holds { "yes" } else { "no" }
                        );
                        let fixed: Vec<String> =
                            report.fixed.iter().map(|&s| m.format_set(s)).collect();
                        println!("fixed up-sets: {}", fixed.join(" "));
                        println!("{}", stats_line(report.stats));
                    }
                    Ok(EXIT_OK)
                }
                DneOutcome::Exhausted(stats) => {
                    let doc = ProbeCliDoc {
                        outcome: "exhausted".to_string(),
                        witness: None,
                        stats,
                    };
                    if !emit_json(&doc, json.as_deref())? {
                        println!(
                            "scheme {scheme} fixes every atom on every strict model within {max_worlds} world(s)"
                        );
                        println!("{}", stats_line(stats));
                    }
                    Ok(EXIT_NEGATIVE)
                }
                DneOutcome::Truncated(stats) => {
                    let doc = ProbeCliDoc {
                        outcome: "truncated".to_string(),
                        witness: None,
                        stats,
                    };
                    if !emit_json(&doc, json.as_deref())? {
                        println!("search truncated by budget");
                        println!("{}", stats_line(stats));
                    }
                    Ok(EXIT_BUDGET)
                }
            }
        }
        Cmd::Algebra { model, export_algebra, json } => {
            let (m, _) = load_model(&model)?;
            let algebra = build_complex_algebra(&m, None).map_err(|e| match e {
                AlgebraError::NotStrict(_) => Failure::model(e.to_string()),
                AlgebraError::TooManyWorlds { .. } => Failure::model(e.to_string()),
            })?;
            let doc = algebra.to_doc();
            if let Some(path) = &export_algebra {
                let text = serde_json::to_string_pretty(&doc).expect("algebra doc serializes");
                write_file(path, &format!("{text}\n"))?;
            }
            if !emit_json(&doc, json.as_deref())? {
                println!("worlds: {}", m.n());
                println!("elements: {}", algebra.len());
                let laws = algebra.check_laws();
                match &laws.failure {
                    None => println!("laws: pass (checked {} instances)", laws.checked),
                    Some(f) => println!(
                        "laws: FAIL at {} on elements {:?} (checked {} instances)",
                        f.law, f.elements, laws.checked
                    ),
                }
                for composite in [ComonadComposite::BnegrWnegl, ComonadComposite::WneglBnegr] {
                    let r = algebra.check_comonad(composite);
                    println!(
                        "comonad {composite}: {} ({} coalgebra(s))",
                        if r.passed() { "pass" } else { "FAIL" },
                        r.coalgebras.len()
                    );
                }
                for composite in [ClosureComposite::WnegrBnegl, ClosureComposite::BneglWnegr] {
                    let r = algebra.check_closure(composite);
                    println!(
                        "closure {composite}: {} ({} fixed point(s))",
                        if r.passed() { "pass" } else { "FAIL" },
                        r.fixed_points.len()
                    );
                }
                let dual = &doc.dualizing;
                println!("has_dualizing_element = {}", dual.has_dualizing_element);
                if dual.has_dualizing_element {
                    let ds: Vec<String> = dual
                        .dualizing_elements
                        .iter()
                        .map(|&d| m.format_set(algebra.element(d)))
                        .collect();
                    println!("dualizing: {}", ds.join(" "));
                } else {
                    for cand in &dual.candidates {
                        let d_set = m.format_set(algebra.element(cand.d));
                        match cand.witness_a {
                            Some(a) => {
                                let a_set = algebra.element(a);
                                let image = algebra
                                    .element(algebra.imp(algebra.imp(a, cand.d), cand.d));
                                println!(
                                    "candidate D = {d_set}: witness A = {} with (A -> D) -> D = {} != A",
                                    m.format_set(a_set),
                                    m.format_set(image)
                                );
                            }
                            None => println!("candidate D = {d_set}: fixes every element"),
                        }
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Cmd::Prove { sequent, depth, allow_cut, budget, json } => {
            let goal = parse_sequent(&sequent).map_err(|e| Failure::parse(e.to_string()))?;
            let mut cfg = ProveConfig::new(depth);
            cfg.allow_cut = allow_cut;
            if let Some(n) = budget {
                cfg.max_nodes = n;
            }
            let outcome = prove_bounded(&goal, &cfg);
            let (label, height, derivation, code) = match &outcome {
                ProveOutcome::Proved(d) => (
                    "proved",
                    Some(d.height()),
                    Some(d.to_text()),
                    EXIT_OK,
                ),
                ProveOutcome::NotFound => ("not-found", None, None, EXIT_NEGATIVE),
                ProveOutcome::BudgetExceeded => ("budget-exceeded", None, None, EXIT_BUDGET),
            };
            let doc = ProveDoc {
                sequent: goal.to_string(),
                depth,
                outcome: label.to_string(),
                height,
                derivation: derivation.clone(),
            };
            if !emit_json(&doc, json.as_deref())? {
                match derivation {
                    Some(text) => print!("{text}"),
                    None => println!("{label}"),
                }
            }
            Ok(code)
        }
        Cmd::CheckFrame { model, json } => {
            let (m, added) = load_model(&model)?;
            let violations: Vec<String> =
                m.check_frame_conditions().iter().map(|v| v.to_string()).collect();
            let doc = FrameDoc {
                strict: m.is_strict(),
                closure_added: added,
                violations: violations.clone(),
            };
            if !emit_json(&doc, json.as_deref())? {
                println!("strict: {}", if m.is_strict() { "yes" } else { "no" });
                println!("closure: added {added} pair(s) to <=");
                if violations.is_empty() {
                    println!("violations: (none)");
                } else {
                    println!("violations:");
                    for v in &violations {
                        println!("  {v}");
                    }
                }
            }
            Ok(if m.is_strict() { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}
