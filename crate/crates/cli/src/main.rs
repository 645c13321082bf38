//! `qhist` — evaluate quantum histories from the command line.
//!
//! Subcommands: `parse` an expression, `eval` a scenario file, run a
//! built-in `demo` (polarizer, double-slit, die), or `selfcheck` the
//! installation against its randomized equivalence suites.

mod demos;
mod queries;
mod report;
mod scenario;
mod selfcheck;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use qhist_core::HistoryExpr;

use report::{ErrorClass, Report};
use scenario::CliFailure;

#[derive(Parser)]
#[command(
    name = "qhist",
    version,
    about = "Quantum history calculus: histories of events in ray space, \
             evaluated as projector operators and as path amplitudes"
)]
struct Cli {
    /// Emit the machine-readable JSON report (full-precision values as
    /// decimal strings).
    #[arg(long, global = true)]
    json: bool,

    /// Downgrade non-orthogonal alternative groups from errors to
    /// warnings.
    #[arg(long, global = true)]
    lenient: bool,

    /// Decimal places in the text report; display only, never affects
    /// computation.
    #[arg(long, global = true, default_value_t = 12)]
    precision: usize,

    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form and AST outline of a history expression.
    Parse { expr: String },
    /// Run every query of a scenario file.
    Eval {
        /// Path to the scenario JSON document.
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        demo: DemoCommand,
    },
    /// Re-run the randomized representation-equivalence suites.
    Selfcheck {
        /// Number of random histories per suite.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Polarizer chain (a & b) & abar; certainty cos²θ·sin²θ.
    Polarizer {
        /// Angle of the intermediate polarizer, in radians.
        #[arg(long)]
        theta: f64,
        /// Also sweep θ over [0, π/2] in this many steps.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Two-slit history a & (b1 | b2) & c: operator decomposition,
    /// interference term and closed loops.
    DoubleSlit {
        /// Put the source on the first slit so all projectors commute
        /// and the interference vanishes.
        #[arg(long)]
        commuting: bool,
    },
    /// Quantum die with N orthogonal faces.
    Die {
        /// Number of faces (2..=64).
        #[arg(long)]
        faces: usize,
        /// Rotate the plane of the first two faces by this angle and
        /// report conditional probabilities of the rotated faces.
        #[arg(long)]
        rotate: Option<f64>,
    },
}

fn ast_json(h: &HistoryExpr) -> serde_json::Value {
    match h {
        HistoryExpr::Event(name) => json!({ "type": "event", "name": name }),
        HistoryExpr::Seq(steps) => json!({
            "type": "seq",
            "steps": steps.iter().map(ast_json).collect::<Vec<_>>(),
        }),
        HistoryExpr::Alt(branches) => json!({
            "type": "alt",
            "branches": branches.iter().map(ast_json).collect::<Vec<_>>(),
        }),
    }
}

fn ast_outline(h: &HistoryExpr, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match h {
        HistoryExpr::Event(name) => out.push_str(&format!("{pad}event {name}\n")),
        HistoryExpr::Seq(steps) => {
            out.push_str(&format!("{pad}seq\n"));
            for s in steps {
                ast_outline(s, indent + 1, out);
            }
        }
        HistoryExpr::Alt(branches) => {
            out.push_str(&format!("{pad}alt\n"));
            for b in branches {
                ast_outline(b, indent + 1, out);
            }
        }
    }
}

fn run_parse(expr: &str, machine: bool) -> Result<String, CliFailure> {
    let h = qhist_core::parse(expr).map_err(|e| CliFailure::validation(e.to_string()))?;
    if machine {
        let doc = json!({
            "command": "parse",
            "input": expr,
            "canonical": qhist_core::render(&h),
            "paths": h.path_count(),
            "ast": ast_json(&h),
        });
        Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
    } else {
        let mut out = String::new();
        out.push_str(&format!("canonical: {}\n", qhist_core::render(&h)));
        out.push_str(&format!("paths: {}\n", h.path_count()));
        out.push_str("ast:\n");
        ast_outline(&h, 1, &mut out);
        Ok(out)
    }
}

fn run_eval(path: &std::path::Path, lenient: bool) -> Result<Report, CliFailure> {
    let scenario = scenario::load_scenario(path)?;
    let mut report = Report::new("eval")
        .meta_str("scenario", path.display().to_string())
        .meta_int("dimension", scenario.space.dimension() as i64)
        .meta_int("events", scenario.space.len() as i64)
        .meta_int("histories", scenario.histories.len() as i64)
        .meta_int("queries", scenario.queries.len() as i64);
    for query in &scenario.queries {
        report.push(queries::run_query(&scenario, query, lenient));
    }
    Ok(report)
}

fn emit_error_record(class: ErrorClass, message: &str) {
    eprintln!(
        "{}",
        json!({
            "error": {
                "class": class.label(),
                "exit_code": class.exit_code(),
                "message": message,
            }
        })
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match &cli.command {
        Command::Parse { expr } => {
            return match run_parse(expr, cli.json) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(failure) => {
                    emit_error_record(failure.class, &failure.message);
                    ExitCode::from(failure.class.exit_code())
                }
            };
        }
        Command::Eval { scenario } => run_eval(scenario, cli.lenient),
        Command::Demo { demo } => match demo {
            DemoCommand::Polarizer { theta, sweep } => demos::polarizer(*theta, *sweep),
            DemoCommand::DoubleSlit { commuting } => demos::double_slit(*commuting),
            DemoCommand::Die { faces, rotate } => demos::die(*faces, *rotate),
        },
        Command::Selfcheck { cases } => selfcheck::run(cli.seed, *cases),
    };
    match report {
        Ok(report) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_json()).unwrap()
                );
            } else {
                print!("{}", report.to_text(cli.precision));
            }
            for (class, message) in report.errors() {
                emit_error_record(class, &message);
            }
            ExitCode::from(report.exit_code())
        }
        Err(failure) => {
            emit_error_record(failure.class, &failure.message);
            ExitCode::from(failure.class.exit_code())
        }
    }
}
