//! Command-line front end: bound computation, inequality generation,
//! behavior checking, quantum evaluation, and the interior-sampling audit.
//!
//! Output is JSON on stdout (optionally copied to `--output`); logs go to
//! stderr. Exit codes: 0 success, 1 validation failure, 2 enumeration or
//! feasibility cap exceeded, 3 a NotLHV / VIOLATES verdict under
//! `--strict`. JSON output is byte-identical across `--threads` settings;
//! `--no-timing` drops wall-clock fields so runs diff cleanly.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use bellbound::behaviors::{
    check_no_signaling, evaluate_functional, is_lhv, load_behavior, Behavior, LhvVerdict,
    NoSignalingReport,
};
use bellbound::forms::{lemma1_audit, lhv_bounds, ScanConfig};
use bellbound::generators::{self, NamedInequality};
use bellbound::quantum::{mk_violation_report, MkVerdict, Operator, State};
use bellbound::scenario::{load_document, save_document, Functional, ScenarioDocument};
use bellbound::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "bellbound",
    version,
    about = "Tight LHV bounds for Bell-type inequalities"
)]
struct Cli {
    /// Override the enumeration cap (max assignments scanned exactly).
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Worker count for bound scans; results are identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for all randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exit 3 when a behavior is NotLHV or a quantum value VIOLATES.
    #[arg(long, global = true)]
    strict: bool,
    /// Omit wall-clock fields from JSON output.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Also write the JSON output to this file (generate writes only here).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute tight LHV bounds of one functional in a scenario file.
    Bound {
        file: PathBuf,
        /// 0-based index into the file's functionals array.
        #[arg(default_value_t = 0)]
        index: usize,
    },
    /// Write a named inequality as a scenario file.
    Generate {
        /// chsh | ch | mk | cg4422 | cg2233 | zohren-gill
        name: String,
        /// Party count for mk.
        #[arg(long)]
        parties: Option<usize>,
        /// Outcome count for zohren-gill.
        #[arg(long)]
        outcomes: Option<usize>,
        /// CHSH cell (1..=4, row-major) carrying the minus sign.
        #[arg(long, default_value_t = 4)]
        sign_cell: usize,
        /// Also compute the bound and require the published value.
        #[arg(long)]
        with_bound: bool,
    },
    /// No-signaling report, inequality values, and LHV membership.
    CheckBehavior { file: PathBuf },
    /// Evaluate the Bell operator of a state and observables file.
    QuantumEval { file: PathBuf },
    /// Sample the hypercube interior against the vertex bounds.
    Lemma1Audit {
        file: PathBuf,
        /// 0-based index of a correlation functional in the file.
        #[arg(default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::CapExceeded { .. }
            | CoreError::FeasibilityCapExceeded(_)
            | CoreError::MatrixCapExceeded { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn scan_config(cli: &Cli) -> ScanConfig {
    let mut cfg = ScanConfig::default().with_threads(cli.threads);
    if let Some(cap) = cli.cap {
        cfg = cfg.with_cap(cap);
    }
    cfg
}

fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json rendering");
    text.push('\n');
    text
}

/// Prints to stdout and mirrors to `--output` when given.
fn emit(cli: &Cli, value: &Value) -> Result<(), Failure> {
    let text = render(value);
    print!("{text}");
    if let Some(path) = &cli.output {
        std::fs::write(path, &text)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Bound { file, index } => cmd_bound(cli, file, *index),
        Command::Generate {
            name,
            parties,
            outcomes,
            sign_cell,
            with_bound,
        } => cmd_generate(cli, name, *parties, *outcomes, *sign_cell, *with_bound),
        Command::CheckBehavior { file } => cmd_check_behavior(cli, file),
        Command::QuantumEval { file } => cmd_quantum_eval(cli, file),
        Command::Lemma1Audit {
            file,
            index,
            samples,
        } => cmd_lemma1_audit(cli, file, *index, *samples),
    }
}

fn functional_at(doc: &ScenarioDocument, index: usize) -> Result<&Functional, Failure> {
    doc.functionals.get(index).ok_or_else(|| {
        Failure::validation(format!(
            "functional index {index} out of range; the file has {}",
            doc.functionals.len()
        ))
    })
}

fn cmd_bound(cli: &Cli, file: &Path, index: usize) -> Result<u8, Failure> {
    let doc = load_document(file)?;
    let functional = functional_at(&doc, index)?;
    let report = lhv_bounds(functional, &scan_config(cli))?;
    emit(cli, &report.to_json(!cli.no_timing))?;
    Ok(0)
}

fn build_inequality(
    name: &str,
    parties: Option<usize>,
    outcomes: Option<usize>,
    sign_cell: usize,
) -> Result<NamedInequality, Failure> {
    match name {
        "chsh" => Ok(generators::chsh(sign_cell)?),
        "ch" => Ok(generators::ch()),
        "mk" => {
            let parties =
                parties.ok_or_else(|| Failure::validation("mk requires --parties <N>"))?;
            Ok(generators::mk_coefficients(parties)?)
        }
        "cg4422" => Ok(generators::collins_gisin_4422()),
        "cg2233" => Ok(generators::collins_gisin_2233()),
        "zohren-gill" => {
            let outcomes = outcomes
                .ok_or_else(|| Failure::validation("zohren-gill requires --outcomes <K>"))?;
            Ok(generators::zohren_gill(outcomes)?)
        }
        other => Err(Failure::validation(format!(
            "unknown inequality `{other}`; expected chsh, ch, mk, cg4422, cg2233, or zohren-gill"
        ))),
    }
}

fn cmd_generate(
    cli: &Cli,
    name: &str,
    parties: Option<usize>,
    outcomes: Option<usize>,
    sign_cell: usize,
    with_bound: bool,
) -> Result<u8, Failure> {
    let inequality = build_inequality(name, parties, outcomes, sign_cell)?;
    let doc = ScenarioDocument {
        scenario: inequality.functional.scenario().clone(),
        functionals: vec![inequality.functional.clone()],
    };
    if with_bound {
        let report = lhv_bounds(&inequality.functional, &scan_config(cli))?;
        for (label, published, computed) in [
            ("min", inequality.published_min, report.min),
            ("max", inequality.published_max, report.max),
        ] {
            if let Some(expected) = published {
                if computed != expected {
                    return Err(Failure::validation(format!(
                        "{}: computed {label} {computed} differs from the published value {expected}",
                        inequality.name
                    )));
                }
                eprintln!(
                    "{}: {label} = {computed} matches the published value",
                    inequality.name
                );
            }
        }
    }
    match &cli.output {
        Some(path) => {
            save_document(&doc, path)?;
            eprintln!("{}: wrote {}", inequality.name, path.display());
        }
        None => {
            print!("{}", render(&bellbound::scenario::document_to_json(&doc)));
        }
    }
    Ok(0)
}

fn no_signaling_json(report: &NoSignalingReport) -> Value {
    json!({
        "passed": report.passed,
        "tolerance": report.tolerance,
        "max_deviation": report.max_deviation,
        "violations": report.violations.iter().map(|v| {
            json!({
                "sites": v.sites.iter().map(|n| n + 1).collect::<Vec<_>>(),
                "settings_a": v.settings_a.iter().map(|s| s + 1).collect::<Vec<_>>(),
                "settings_b": v.settings_b.iter().map(|s| s + 1).collect::<Vec<_>>(),
                "max_deviation": v.max_deviation,
            })
        }).collect::<Vec<_>>(),
    })
}

/// The generated families that can be read against this behavior's
/// scenario: shapes must match, and correlation families additionally need
/// the same outcome values.
fn applicable_inequalities(b: &Behavior) -> Vec<NamedInequality> {
    let scenario = b.scenario();
    let mut candidates = vec![
        generators::ch(),
        generators::collins_gisin_4422(),
        generators::collins_gisin_2233(),
    ];
    if let Ok(chsh) = generators::chsh(4) {
        candidates.push(chsh);
    }
    if let Ok(mk) = generators::mk_coefficients(scenario.parties()) {
        candidates.push(mk);
    }
    if scenario.parties() == 2 && scenario.settings() == [2, 2] {
        let k = scenario.alphabet_size(0, 0);
        let uniform = (0..2).all(|n| (0..2).all(|s| scenario.alphabet_size(n, s) == k));
        if uniform {
            if let Ok(zg) = generators::zohren_gill(k) {
                candidates.push(zg);
            }
        }
    }
    let mut fitting: Vec<NamedInequality> = candidates
        .into_iter()
        .filter(|ineq| {
            if !scenario.same_shape(ineq.functional.scenario()) {
                return false;
            }
            match &ineq.functional {
                Functional::Correlation(f) => (0..scenario.parties()).all(|n| {
                    (0..scenario.settings()[n]).all(|s| {
                        scenario.outcome_space(n, s).values()
                            == f.scenario().outcome_space(n, s).values()
                    })
                }),
                _ => true,
            }
        })
        .collect();
    fitting.sort_by(|a, b| a.name.cmp(&b.name));
    fitting.dedup_by(|a, b| a.name == b.name);
    fitting
}

fn cmd_check_behavior(cli: &Cli, file: &Path) -> Result<u8, Failure> {
    let behavior = load_behavior(file)?;
    let ns = check_no_signaling(&behavior);
    let cfg = scan_config(cli);

    let mut inequalities = Vec::new();
    for ineq in applicable_inequalities(&behavior) {
        let bounds = lhv_bounds(&ineq.functional, &cfg)?;
        let value = evaluate_functional(&behavior, &ineq.functional)?;
        let satisfied = value >= bounds.min - 1e-9 && value <= bounds.max + 1e-9;
        let slack = (value - bounds.min).min(bounds.max - value);
        let mut entry = json!({
            "name": ineq.name,
            "value": value,
            "min": bounds.min,
            "max": bounds.max,
            "satisfied": satisfied,
            "slack": slack,
        });
        if let Some(published) = ineq.published_min {
            entry["published_min"] = json!(published);
        }
        if let Some(published) = ineq.published_max {
            entry["published_max"] = json!(published);
        }
        inequalities.push(entry);
    }

    let mut not_lhv = false;
    let membership = if !ns.passed {
        json!({"verdict": "skipped", "reason": "behavior is signaling"})
    } else {
        match is_lhv(&behavior)? {
            LhvVerdict::Lhv(model) => json!({
                "verdict": "lhv",
                "weights": model.weights(),
            }),
            LhvVerdict::NotLhv(cert) => {
                not_lhv = true;
                let entries: serde_json::Map<String, Value> = cert
                    .entry_coefficients
                    .iter()
                    .map(|(tuple, coeffs)| {
                        let key = tuple
                            .iter()
                            .map(|s| (s + 1).to_string())
                            .collect::<Vec<_>>()
                            .join(",");
                        (key, json!(coeffs))
                    })
                    .collect();
                json!({
                    "verdict": "not_lhv",
                    "margin": cert.margin,
                    "certificate": {
                        "entry_coefficients": entries,
                        "normalization_coefficient": cert.normalization_coefficient,
                        "value_on_behavior": cert.value_on_behavior,
                        "max_over_strategies": cert.max_over_strategies,
                    },
                })
            }
            LhvVerdict::BoundaryInconclusive { detail } => json!({
                "verdict": "boundary_inconclusive",
                "detail": detail,
            }),
        }
    };

    emit(
        cli,
        &json!({
            "no_signaling": no_signaling_json(&ns),
            "inequalities": inequalities,
            "membership": membership,
        }),
    )?;
    Ok(if cli.strict && not_lhv { 3 } else { 0 })
}

type ReImParts = (Vec<Vec<f64>>, Vec<Vec<f64>>);

fn parse_matrix(value: &Value, path: &str) -> Result<ReImParts, Failure> {
    let dim = value
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Failure::validation(format!("{path}.dim must be a positive integer")))?
        as usize;
    let read = |field: &str| -> Result<Vec<Vec<f64>>, Failure> {
        let rows: Vec<Vec<f64>> = serde_json::from_value(
            value
                .get(field)
                .cloned()
                .ok_or_else(|| Failure::validation(format!("{path}.{field} is missing")))?,
        )
        .map_err(|e| Failure::validation(format!("{path}.{field}: {e}")))?;
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Failure::validation(format!(
                "{path}.{field} must be a {dim}x{dim} matrix"
            )));
        }
        Ok(rows)
    };
    Ok((read("re")?, read("im")?))
}

fn cmd_quantum_eval(cli: &Cli, file: &Path) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure::validation(format!("cannot read {}: {e}", file.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("parse error: {e}")))?;
    let (re, im) = parse_matrix(
        value
            .get("state")
            .ok_or_else(|| Failure::validation("state is missing"))?,
        "state",
    )?;
    let state = State::from_re_im(&re, &im)?;
    let raw_sites = value
        .get("observables")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::validation("observables must be an array of per-site pairs"))?;
    let mut observables = Vec::with_capacity(raw_sites.len());
    for (n, pair) in raw_sites.iter().enumerate() {
        let pair = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
            Failure::validation(format!("observables[{n}] must be a pair of matrices"))
        })?;
        let mut ops = Vec::with_capacity(2);
        for (j, raw) in pair.iter().enumerate() {
            let (re, im) = parse_matrix(raw, &format!("observables[{n}][{j}]"))?;
            ops.push(Operator::from_re_im(&re, &im)?);
        }
        let second = ops.pop().unwrap();
        let first = ops.pop().unwrap();
        observables.push((first, second));
    }
    let report = mk_violation_report(&state, &observables)?;
    emit(
        cli,
        &serde_json::to_value(&report).expect("report serialization"),
    )?;
    Ok(if cli.strict && report.verdict == MkVerdict::Violates {
        3
    } else {
        0
    })
}

fn cmd_lemma1_audit(cli: &Cli, file: &Path, index: usize, samples: u64) -> Result<u8, Failure> {
    let doc = load_document(file)?;
    let functional = functional_at(&doc, index)?;
    let Functional::Correlation(f) = functional else {
        return Err(Failure::validation(format!(
            "functional {index} is a {} functional; the audit needs a correlation functional",
            functional.kind()
        )));
    };
    let report = lemma1_audit(f, samples, cli.seed, &scan_config(cli))?;
    let passed = report.passed();
    emit(
        cli,
        &serde_json::to_value(&report).expect("report serialization"),
    )?;
    if passed {
        Ok(0)
    } else {
        Err(Failure::validation(format!(
            "{} of {} samples escaped the vertex bounds",
            report.escapes.len(),
            report.samples
        )))
    }
}
