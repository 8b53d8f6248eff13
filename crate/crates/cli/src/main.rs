use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fbp_core::fingroup::{FinAbGroup, DEFAULT_CAP_ELEMENTS};
use fbp_core::formula::{parse_additive, parse_formula};
use fbp_core::padic::checks::{axiom_checks, digit_checks, ring_checks, torsion_checks};
use fbp_core::padic::interpret::{interpretation_checks, Interpretation};
use fbp_core::padic::predicates::predicate_checks;
use fbp_core::padic::suite::{default_grid_inputs, document, parse_grid, parse_spec, run_suite_with, SCHEMA_VERSION};
use fbp_core::padic::theta::{build_theta, theta_checks, theta_json};
use fbp_core::padic::{PadicConfig, PadicModel, DEFAULT_RING_CAP};
use fbp_core::presburger;
use fbp_core::report::{any_failed, Check};
use fbp_core::thdecide::{decide_th, DecideConfig, FbpModel, DEFAULT_CAP_WORK};

#[derive(Parser, Debug)]
#[command(name = "fbp", version, about = "Finite-by-Presburger decisions and p-adic residue ring checks")]
struct Cli {
    /// Largest finite group that may be enumerated.
    #[arg(long, global = true, env = "FBP_CAP_ELEMENTS", default_value_t = DEFAULT_CAP_ELEMENTS, value_parser = positive)]
    cap_elements: u128,
    /// Largest H-assignment count a decision may explore.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP_WORK, value_parser = positive)]
    cap_work: u128,
    /// Largest residue ring q^N a field spec may produce.
    #[arg(long, global = true, default_value_t = DEFAULT_RING_CAP, value_parser = positive)]
    cap_ring: u128,
    /// Ring arithmetic modulo p^GUARD instead of the default precision.
    #[arg(long, global = true)]
    guard: Option<u32>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Progress on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a sentence in H × Z with the standard order.
    Decide {
        /// Finite abelian group, e.g. "Z/2xZ/4" or "Z/1".
        #[arg(long)]
        group: String,
        #[arg(long)]
        sentence: String,
    },
    /// Eliminate quantifiers from a Presburger formula.
    Qe {
        /// Formula text (additive syntax, or group syntax read additively).
        formula: Option<String>,
        #[arg(long, conflicts_with = "formula")]
        sentence: Option<String>,
    },
    /// Constructions and checks for one field spec.
    Padic {
        #[command(subcommand)]
        command: PadicCommand,
    },
    /// Every check over a grid of field specs.
    Suite {
        /// Grid file (JSON list, or JSON/TOML with a `specs` list); the built-in grid otherwise.
        #[arg(long)]
        grid: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SpecArg {
    /// Field spec: a JSON or TOML file, or inline JSON.
    #[arg(long)]
    spec: String,
}

#[derive(Subcommand, Debug)]
enum PadicCommand {
    /// Ring, digit and valuation checks.
    Build(SpecArg),
    /// Order and invariant factors of the torsion subgroup.
    Torsion(SpecArg),
    /// The relation Theta from lifts.
    Theta {
        #[command(flatten)]
        spec: SpecArg,
        /// Compare with the valuation-condition description.
        #[arg(long)]
        check_lemma: bool,
    },
    /// Digit representatives, rho, and the derived operations.
    Interpret(SpecArg),
    /// Axioms on H × Z and on G, and the exponent claim.
    Axioms(SpecArg),
    /// Maximal ideal, uniformizer and Eisenstein predicates.
    Predicates(SpecArg),
}

fn positive(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Failure that maps to an exit code.
enum Failure {
    Input(String),
    Io(String),
}

impl From<fbp_core::Error> for Failure {
    fn from(e: fbp_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Output {
    body: String,
    failed: bool,
}

impl Output {
    fn json(v: &Value, failed: bool) -> Output {
        Output {
            body: serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n",
            failed,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = std::panic::catch_unwind(|| run(&cli));
    let outcome = match result {
        Ok(o) => o,
        Err(_) => Err(Failure::Input("internal error".into())),
    };
    match outcome {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Input(m)) | Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn padic_config(cli: &Cli) -> PadicConfig {
    PadicConfig {
        ring_cap: cli.cap_ring,
        element_cap: cli.cap_elements,
        guard: cli.guard,
        ..PadicConfig::default()
    }
}

fn load_model(cli: &Cli, spec: &SpecArg) -> Result<PadicModel, Failure> {
    let text = if spec.spec.trim_start().starts_with('{') {
        spec.spec.clone()
    } else {
        read(Path::new(&spec.spec))?
    };
    let field = parse_spec(&text, cli.cap_ring)?;
    Ok(PadicModel::build(&field, &padic_config(cli))?)
}

fn report(extra: Value, checks: Vec<Check>) -> Output {
    let failed = any_failed(&checks);
    let mut doc = json!({ "schema": SCHEMA_VERSION });
    if let (Some(obj), Value::Object(more)) = (doc.as_object_mut(), extra) {
        obj.extend(more);
    }
    doc["checks"] = json!(checks);
    Output::json(&doc, failed)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Decide { group, sentence } => {
            let h = FinAbGroup::parse(group)?;
            let f = parse_formula(sentence)?;
            let cfg = DecideConfig {
                element_cap: cli.cap_elements,
                work_cap: cli.cap_work,
            };
            let d = decide_th(&FbpModel::standard(h), &f, &cfg)?;
            Ok(Output::json(&json!(d), false))
        }
        Command::Qe { formula, sentence } => {
            let text = formula
                .as_ref()
                .or(sentence.as_ref())
                .ok_or_else(|| Failure::Input("qe needs a formula".into()))?;
            let f = match parse_additive(text) {
                Ok(f) => f,
                Err(additive_err) => parse_formula(text).map(|g| g.to_additive()).map_err(|_| additive_err)?,
            };
            Ok(Output {
                body: format!("{}\n", presburger::qe(&f)),
                failed: false,
            })
        }
        Command::Padic { command } => run_padic(cli, command),
        Command::Suite { grid } => {
            let (inputs, source) = match grid {
                Some(path) => (parse_grid(&read(path)?)?, path.display().to_string()),
                None => (default_grid_inputs(), "default".to_string()),
            };
            let start = Instant::now();
            let (payload, failed) = run_suite_with(&inputs, &padic_config(cli), |entry| {
                if cli.verbose {
                    eprintln!("{}: {}", entry["label"].as_str().unwrap_or("?"), entry["status"].as_str().unwrap_or("?"));
                }
            });
            let metadata = json!({
                "tool": "fbp",
                "version": env!("CARGO_PKG_VERSION"),
                "grid": source,
                "elapsed_ms": start.elapsed().as_millis() as u64,
            });
            Ok(Output::json(&document(metadata, payload), failed))
        }
    }
}

fn run_padic(cli: &Cli, command: &PadicCommand) -> Result<Output, Failure> {
    Ok(match command {
        PadicCommand::Build(spec) => {
            let model = load_model(cli, spec)?;
            let mut checks = ring_checks(&model);
            checks.extend(digit_checks(&model));
            report(json!({ "ring": model.summary() }), checks)
        }
        PadicCommand::Torsion(spec) => {
            let model = load_model(cli, spec)?;
            let (t, checks) = torsion_checks(&model);
            let failed = any_failed(&checks);
            let mut doc = json!(t);
            doc["schema"] = json!(SCHEMA_VERSION);
            doc["checks"] = json!(checks);
            Output::json(&doc, failed)
        }
        PadicCommand::Theta { spec, check_lemma } => {
            let model = load_model(cli, spec)?;
            let table = build_theta(&model)?;
            let checks = theta_checks(&model, &table)
                .into_iter()
                .filter(|c| *check_lemma || !c.paper_ref.starts_with("lemma-"))
                .collect();
            report(json!({ "theta": theta_json(&model, &table) }), checks)
        }
        PadicCommand::Interpret(spec) => {
            let model = load_model(cli, spec)?;
            let table = build_theta(&model)?;
            let interp = Interpretation::new(&model);
            report(json!({ "representatives": interp.reps.len() }), interpretation_checks(&model, &interp, &table))
        }
        PadicCommand::Axioms(spec) => {
            let model = load_model(cli, spec)?;
            report(json!({ "unit_group": model.units.group().to_string() }), axiom_checks(&model))
        }
        PadicCommand::Predicates(spec) => {
            let model = load_model(cli, spec)?;
            report(json!({ "p_class": model.summary()["p_class"] }), predicate_checks(&model))
        }
    })
}
