use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::warn;

use lnn_core::learn::{train, LearnConfig};
use lnn_core::{build_graph, infer, parse_kb_with_warnings, prepare, serialize_kb, InferenceConfig, KnowledgeBase};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_CONTRADICTION: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

const ALPHA_ENV: &str = "LNN_ALPHA";

#[derive(Debug, Parser)]
#[command(name = "lnn", version, about = "Reason over first-order knowledge bases with logical neural networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct KbArg {
    /// Knowledge base file.
    #[arg(long = "kb", value_name = "FILE")]
    path: PathBuf,
}

#[derive(Debug, Args)]
struct PassArgs {
    #[arg(long, value_name = "N", default_value_t = 100)]
    max_passes: usize,
    #[arg(long = "tol", value_name = "T", default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a knowledge base and print it in normal form.
    Parse(KbArg),
    /// Print the function-free knowledge base with all theory axioms.
    Rewrite(KbArg),
    /// Run inference and print one line per query.
    Infer {
        #[command(flatten)]
        kb: KbArg,
        /// Threshold of truth, in (0.5, 1]. Overrides LNN_ALPHA.
        #[arg(long, value_name = "A")]
        alpha: Option<f64>,
        #[command(flatten)]
        passes: PassArgs,
        /// Print the neuron graph after inference.
        #[arg(long)]
        dump_graph: bool,
    },
    /// Train connective weights to reduce contradiction.
    Learn {
        #[command(flatten)]
        kb: KbArg,
        #[arg(long, value_name = "N")]
        epochs: usize,
        #[arg(long, value_name = "R")]
        lr: f64,
        /// Accepted for reproducible scripts; training is deterministic.
        #[arg(long, value_name = "S")]
        seed: Option<u64>,
        #[command(flatten)]
        passes: PassArgs,
    },
}

/// A failed command: exit code plus a diagnostic for stderr.
struct Failure(u8, String);

impl Failure {
    fn usage(msg: impl ToString) -> Failure {
        Failure(EXIT_USAGE, msg.to_string())
    }
}

fn load(path: &Path) -> Result<KnowledgeBase, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {}", path.display(), e)))?;
    let (kb, warnings) =
        parse_kb_with_warnings(&text).map_err(|e| Failure::usage(format!("{}: {}", path.display(), e)))?;
    for w in warnings {
        warn!("{}: {}", path.display(), w);
    }
    Ok(kb)
}

fn alpha(flag: Option<f64>) -> Result<f64, Failure> {
    if let Some(a) = flag {
        return Ok(a);
    }
    match std::env::var(ALPHA_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::usage(format!("{}: not a number: {}", ALPHA_ENV, v))),
        Err(_) => Ok(lnn_core::DEFAULT_ALPHA),
    }
}

fn execute(command: Command, out: &mut String) -> Result<u8, Failure> {
    match command {
        Command::Parse(kb) => {
            out.push_str(&serialize_kb(&load(&kb.path)?));
            Ok(EXIT_OK)
        }
        Command::Rewrite(kb) => {
            let rewritten = prepare(&load(&kb.path)?).map_err(Failure::usage)?;
            out.push_str(&serialize_kb(&rewritten));
            Ok(EXIT_OK)
        }
        Command::Infer { kb, alpha: a, passes, dump_graph } => {
            let config = InferenceConfig { alpha: alpha(a)?, max_passes: passes.max_passes, tolerance: passes.tolerance };
            config.validate().map_err(Failure::usage)?;
            let mut graph = build_graph(&load(&kb.path)?).map_err(Failure::usage)?;
            let report = infer(&mut graph, &config).map_err(Failure::usage)?;
            if !report.converged {
                warn!("no convergence after {} passes", report.passes_run);
            }
            if dump_graph {
                out.push_str(&graph.dump());
            }
            for q in report.queries() {
                writeln!(out, "{} {} {:.4} {:.4}", q.name, q.state, q.bounds.lower, q.bounds.upper).unwrap();
            }
            Ok(if report.contradictions.is_empty() { EXIT_OK } else { EXIT_CONTRADICTION })
        }
        Command::Learn { kb, epochs, lr, seed: _, passes } => {
            let config = LearnConfig {
                epochs,
                learning_rate: lr,
                inference: InferenceConfig {
                    alpha: alpha(None)?,
                    max_passes: passes.max_passes,
                    tolerance: passes.tolerance,
                },
                ..LearnConfig::default()
            };
            config.validate().map_err(Failure::usage)?;
            let mut graph = build_graph(&load(&kb.path)?).map_err(Failure::usage)?;
            let history = train(&mut graph, &config).map_err(Failure::usage)?;
            for (epoch, loss) in history.totals().iter().enumerate() {
                writeln!(out, "{} {:.6}", epoch + 1, loss).unwrap();
            }
            out.push_str(&graph.dump());
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .format_target(false)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let mut out = String::new();
    let outcome = std::panic::catch_unwind(move || execute(cli.command, &mut out).map(|code| (code, out)));
    let code = match outcome {
        Ok(Ok((code, text))) => {
            if io::stdout().lock().write_all(text.as_bytes()).is_err() {
                return ExitCode::from(EXIT_INTERNAL);
            }
            code
        }
        Ok(Err(Failure(code, msg))) => {
            eprintln!("error: {}", msg);
            code
        }
        Err(_) => EXIT_INTERNAL,
    };
    ExitCode::from(code)
}
