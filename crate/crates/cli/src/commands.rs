//! The `check`, `matches`, and `show` commands.
//!
//! Exit codes: 0 when everything checks, 1 when a lemma fails (or a
//! `--model` check refutes a rule), 2 for anything that prevents checking
//! at all (missing files, lexical/syntax/resolution diagnostics, bad
//! manifests).

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use strand_core::aprop::term_to_graph;
use strand_core::hypergraph::InterfacedGraph;
use strand_core::rewrite::find_matches;
use strand_core::scalar::Cx;
use strand_core::theory::{
    check_theory, concrete_model_check_by, CheckOptions, CheckReport, Lemma, OracleConfig,
    ProofSession, ProofStep, Side, Signature,
};
use strand_core::zx::ModelManifest;

use crate::lexer::Diagnostic;
use crate::parser::parse;
use crate::resolve::{resolve, Resolved};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub struct CheckArgs {
    pub files: Vec<PathBuf>,
    pub oracle: Option<u32>,
    pub seed: u64,
    pub json: bool,
    pub dump_dot: Option<PathBuf>,
    pub dump_json: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub tolerance: f64,
}

#[derive(Serialize)]
struct FileReport {
    file: String,
    #[serde(flatten)]
    report: CheckReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<Vec<ModelVerdict>>,
}

#[derive(Serialize)]
struct ModelVerdict {
    name: String,
    kind: &'static str,
    holds: bool,
}

fn print_diagnostics(path: &Path, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{}:{}: error: {}", path.display(), d.span, d.message);
    }
}

fn load_theory(path: &Path) -> Result<Resolved, i32> {
    let source = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}: error: {e}", path.display());
            return Err(EXIT_USAGE);
        }
    };
    let ast = match parse(&source) {
        Ok(ast) => ast,
        Err(diagnostic) => {
            print_diagnostics(path, &[diagnostic]);
            return Err(EXIT_USAGE);
        }
    };
    let default_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "theory".into());
    resolve(&ast, &default_name).map_err(|diagnostics| {
        print_diagnostics(path, &diagnostics);
        EXIT_USAGE
    })
}

fn load_model(path: &Path) -> Result<ModelManifest, i32> {
    let source = fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: error: {e}", path.display());
        EXIT_USAGE
    })?;
    serde_json::from_str(&source).map_err(|e| {
        eprintln!("{}: error: invalid model manifest: {e}", path.display());
        EXIT_USAGE
    })
}

pub fn run_check(args: &CheckArgs) -> i32 {
    let mut worst = EXIT_OK;
    let mut file_reports = Vec::new();

    let manifest = match &args.model {
        None => None,
        Some(path) => match load_model(path) {
            Ok(m) => Some(m),
            Err(code) => return code,
        },
    };

    for path in &args.files {
        let resolved = match load_theory(path) {
            Ok(r) => r,
            Err(code) => {
                worst = worst.max(code);
                continue;
            }
        };
        let options = CheckOptions {
            oracle: args.oracle.map(|trials| OracleConfig { trials, seed: args.seed }),
        };
        let report = match check_theory(&resolved.signature, &resolved.lemmas, &options) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("{}: error: {e}", path.display());
                worst = worst.max(EXIT_USAGE);
                continue;
            }
        };

        let model = manifest.as_ref().map(|manifest| {
            run_model_checks(manifest, &resolved.signature, &resolved.lemmas, args.tolerance)
        });
        let model = match model.transpose() {
            Ok(m) => m,
            Err(message) => {
                eprintln!("{}: error: {message}", path.display());
                worst = worst.max(EXIT_USAGE);
                continue;
            }
        };

        if let Some(dir) = &args.dump_dot {
            if let Err(e) = dump_graphs(dir, &resolved, DumpFormat::Dot) {
                eprintln!("{}: error: {e}", dir.display());
                worst = worst.max(EXIT_USAGE);
            }
        }
        if let Some(dir) = &args.dump_json {
            if let Err(e) = dump_graphs(dir, &resolved, DumpFormat::Json) {
                eprintln!("{}: error: {e}", dir.display());
                worst = worst.max(EXIT_USAGE);
            }
        }

        let failed_lemma = !report.all_ok();
        let failed_model = model.as_ref().is_some_and(|checks| checks.iter().any(|c| !c.holds));
        if failed_lemma || failed_model {
            worst = worst.max(EXIT_CHECK_FAILED);
        }

        if args.json {
            file_reports.push(FileReport { file: path.display().to_string(), report, model });
        } else {
            render_human(path, &resolved, &report, model.as_deref(), args);
        }
    }

    if args.json {
        let payload: serde_json::Value = if file_reports.len() == 1 {
            serde_json::to_value(&file_reports[0]).expect("report serializes")
        } else {
            serde_json::to_value(&file_reports).expect("reports serialize")
        };
        println!("{}", serde_json::to_string_pretty(&payload).expect("valid json"));
    }
    worst
}

fn run_model_checks(
    manifest: &ModelManifest,
    signature: &Signature<String>,
    lemmas: &[Lemma<String>],
    tolerance: f64,
) -> Result<Vec<ModelVerdict>, String> {
    let interp = manifest.to_interpretation().map_err(|e| e.to_string())?;
    let close = move |a: &Cx, b: &Cx| (a.0 - b.0).norm() <= tolerance;
    let mut out = Vec::new();
    for rule in &signature.rules {
        let holds = concrete_model_check_by(signature, &interp, &rule.lhs, &rule.rhs, close)
            .map_err(|e| format!("rule `{}`: {e}", rule.name))?;
        out.push(ModelVerdict { name: rule.name.clone(), kind: "rule", holds });
    }
    for lemma in lemmas {
        let holds = concrete_model_check_by(signature, &interp, &lemma.lhs, &lemma.rhs, close)
            .map_err(|e| format!("lemma `{}`: {e}", lemma.name))?;
        out.push(ModelVerdict { name: lemma.name.clone(), kind: "lemma", holds });
    }
    Ok(out)
}

enum DumpFormat {
    Dot,
    Json,
}

fn dump_graphs(dir: &Path, resolved: &Resolved, format: DumpFormat) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let write = |kind: &str, name: &str, side: &str, graph: &InterfacedGraph<String>| {
        let (extension, payload) = match format {
            DumpFormat::Dot => ("dot", graph.to_dot()),
            DumpFormat::Json => {
                ("json", serde_json::to_string_pretty(&graph.dump()).expect("dump serializes"))
            }
        };
        fs::write(dir.join(format!("{kind}.{name}.{side}.{extension}")), payload)
    };
    for rule in &resolved.signature.rules {
        write("rule", &rule.name, "lhs", &term_to_graph(&rule.lhs))?;
        write("rule", &rule.name, "rhs", &term_to_graph(&rule.rhs))?;
    }
    for lemma in &resolved.lemmas {
        write("lemma", &lemma.name, "lhs", &term_to_graph(&lemma.lhs))?;
        write("lemma", &lemma.name, "rhs", &term_to_graph(&lemma.rhs))?;
    }
    Ok(())
}

fn render_human(
    path: &Path,
    resolved: &Resolved,
    report: &CheckReport,
    model: Option<&[ModelVerdict]>,
    args: &CheckArgs,
) {
    println!("theory {} ({})", report.theory, path.display());
    let rule_names: Vec<&str> = resolved.signature.rules.iter().map(|r| r.name.as_str()).collect();
    println!(
        "  rules: {}",
        if rule_names.is_empty() { "(none)".into() } else { rule_names.join(", ") }
    );
    for lemma in &report.lemmas {
        if lemma.is_ok() {
            println!("  lemma {} ... ok ({} ms)", lemma.name, lemma.millis);
        } else {
            println!(
                "  lemma {} ... FAILED at step {} ({} ms)",
                lemma.name,
                lemma.failed_step.unwrap_or(0),
                lemma.millis
            );
            if let Some(reason) = &lemma.reason {
                println!("      {reason}");
            }
        }
    }
    if let Some(verdicts) = &report.oracle {
        println!(
            "  oracle ({} trials, seed {}): informational; axioms are expected to be refuted",
            args.oracle.unwrap_or(0),
            args.seed
        );
        for v in verdicts {
            println!(
                "    {}: {}",
                v.name,
                serde_json::to_string(&v.verdict).expect("verdict json")
            );
        }
    }
    if let Some(checks) = model {
        for check in checks {
            println!(
                "  model {} {} ... {}",
                check.kind,
                check.name,
                if check.holds { "holds" } else { "REFUTED" }
            );
        }
    }
}

/// List the available occurrences for one proof step's rule, replaying the
/// lemma's earlier steps first.
pub fn run_matches(path: &Path, lemma_name: &str, step_number: usize) -> i32 {
    let resolved = match load_theory(path) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let mut session = match ProofSession::new(resolved.signature.clone()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}: error: {e}", path.display());
            return EXIT_USAGE;
        }
    };

    for lemma in &resolved.lemmas {
        if lemma.name == lemma_name {
            let mut state = match session.begin(lemma) {
                Ok(s) => s,
                Err(reason) => {
                    eprintln!("lemma {lemma_name}: {reason}");
                    return EXIT_CHECK_FAILED;
                }
            };
            if step_number == 0 || step_number > lemma.proof.len() {
                eprintln!(
                    "lemma {lemma_name} has {} step(s); step {step_number} does not exist",
                    lemma.proof.len()
                );
                return EXIT_USAGE;
            }
            for (index, step) in lemma.proof.iter().take(step_number - 1).enumerate() {
                if let Err(reason) = session.step(&mut state, step) {
                    eprintln!("lemma {lemma_name}: step {} failed: {reason}", index + 1);
                    return EXIT_CHECK_FAILED;
                }
            }
            let target = &lemma.proof[step_number - 1];
            return match target {
                ProofStep::Iso => {
                    println!(
                        "lemma {lemma_name}, step {step_number} is `iso`; no occurrences to list"
                    );
                    EXIT_OK
                }
                ProofStep::Rewrite { rule, reverse, side, .. } => {
                    let Some(known) = session.available_rule(rule) else {
                        eprintln!("unknown rule `{rule}`");
                        return EXIT_USAGE;
                    };
                    let pattern = term_to_graph(if *reverse { &known.rhs } else { &known.lhs });
                    let host = match side {
                        Side::Lhs => &state.lhs,
                        Side::Rhs => &state.rhs,
                    };
                    let matches = find_matches(&pattern, host);
                    println!(
                        "lemma {lemma_name}, step {step_number}: rw {}{rule} in {side}",
                        if *reverse { "- " } else { "" }
                    );
                    println!("{} occurrence(s)", matches.len());
                    for m in &matches {
                        let edges: Vec<String> =
                            m.edge_map.values().map(|e| e.to_string()).collect();
                        let wires: Vec<String> = m
                            .image_inputs
                            .iter()
                            .chain(&m.image_outputs)
                            .map(|v| v.to_string())
                            .collect();
                        println!(
                            "  @ {}: edges [{}], boundary wires [{}]",
                            m.occurrence,
                            edges.join(", "),
                            wires.join(", ")
                        );
                    }
                    EXIT_OK
                }
            };
        }
        // lemmas before the target must check to contribute their rules
        match run_whole_lemma(&session, lemma) {
            Ok(()) => session.admit(lemma),
            Err(reason) => {
                eprintln!("lemma {}: {reason} (needed before `{lemma_name}`)", lemma.name);
                return EXIT_CHECK_FAILED;
            }
        }
    }
    eprintln!("{}: error: no lemma named `{lemma_name}`", path.display());
    EXIT_USAGE
}

fn run_whole_lemma(session: &ProofSession<String>, lemma: &Lemma<String>) -> Result<(), String> {
    let mut state = session.begin(lemma)?;
    let mut closed = false;
    for step in &lemma.proof {
        closed = session.step(&mut state, step)?;
    }
    if closed {
        Ok(())
    } else {
        Err("proof must end with a successful `iso`".into())
    }
}

/// Dump the graphs of a rule or lemma statement to stdout.
pub fn run_show(path: &Path, rule: Option<&str>, lemma: Option<&str>, json: bool) -> i32 {
    let resolved = match load_theory(path) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let (name, lhs, rhs) = match (rule, lemma) {
        (Some(name), None) => match resolved.signature.rule(name) {
            Some(rule) => (name, rule.lhs.clone(), rule.rhs.clone()),
            None => {
                eprintln!("{}: error: no rule named `{name}`", path.display());
                return EXIT_USAGE;
            }
        },
        (None, Some(name)) => match resolved.lemmas.iter().find(|l| l.name == name) {
            Some(lemma) => (name, lemma.lhs.clone(), lemma.rhs.clone()),
            None => {
                eprintln!("{}: error: no lemma named `{name}`", path.display());
                return EXIT_USAGE;
            }
        },
        _ => {
            eprintln!("usage: show FILE RULENAME, or show FILE --lemma NAME");
            return EXIT_USAGE;
        }
    };
    for (side, term) in [("lhs", &lhs), ("rhs", &rhs)] {
        let graph = term_to_graph(term);
        if json {
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "name": name, "side": side, "graph": graph.dump(),
                }))
                .expect("dump serializes")
            );
        } else {
            println!("// {name} {side}: {term}");
            print!("{}", graph.to_dot());
        }
    }
    EXIT_OK
}
