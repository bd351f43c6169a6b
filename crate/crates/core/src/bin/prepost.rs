use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prepost::check::{check_specs, CheckConfig, CheckReport};
use prepost::dsl::{parse_checked, Specification};
use prepost::game::replay_text;
use prepost::problem::{Quadrant, Side};
use prepost::service::{serve, ServiceConfig};
use prepost::smt::SolverConfig;
use prepost::verdict::{Overall, SideVerdict};

/// Pre/post-condition specification checker.
#[derive(Parser)]
#[command(name = "prepost", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare a student specification with a model specification.
    Check {
        model: PathBuf,
        student: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        /// SMT-LIB solver executable; without it only random testing runs.
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        timeout_ms: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Service config file whose `check` section supplies defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Parse, typecheck and self-check a specification.
    Validate {
        spec: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the HTTP/WebSocket service.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-simulate a session action log and print its score report.
    Replay { log: PathBuf },
}

const EXIT_INPUT: u8 = 3;

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn read_spec(path: &Path) -> Result<Specification, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    parse_checked(&text).map_err(|d| {
        for diag in &d.0 {
            eprintln!("{}:{diag}", path.display());
        }
        ExitCode::from(EXIT_INPUT)
    })
}

fn load_config(path: Option<&Path>) -> Result<ServiceConfig, ExitCode> {
    match path {
        Some(p) => ServiceConfig::load(p).map_err(input_error),
        None => Ok(ServiceConfig::default()),
    }
}

fn print_side(name: &str, v: &SideVerdict) {
    println!("{name}: {:?}{}", v.status, if v.proved { " (proved)" } else { "" });
    for q in Quadrant::ALL {
        let fq = v.quadrant(q);
        let by = fq.decided_by.map(|b| format!(" by {b:?}")).unwrap_or_default();
        let example = fq.rendered.first().map(|w| format!("  e.g. {w}")).unwrap_or_default();
        println!("  {:<5} {:?}{by}{example}", q.name(), fq.status);
    }
}

fn print_report(r: &CheckReport) {
    print_side("pre", &r.verdict.pre);
    print_side("post", &r.verdict.post);
    println!("overall: {:?}", r.verdict.overall);
    let count = |side: Side| r.plan.entries.iter().filter(|e| e.side == side).count();
    println!("blobs: {} input, {} output", count(Side::Input), count(Side::Output));
}

fn run_check(model: &Specification, student: &Specification, cfg: &CheckConfig) -> Result<CheckReport, ExitCode> {
    check_specs(model, student, cfg).map_err(input_error)
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()))
        .init();
    match run(Cli::parse().command) {
        Ok(code) | Err(code) => code,
    }
}

fn run(command: Command) -> Result<ExitCode, ExitCode> {
    match command {
        Command::Check { model, student, trials, solver, timeout_ms, seed, config, json } => {
            let mut cfg = load_config(config.as_deref())?.check;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(path) = solver {
                cfg.solver = Some(SolverConfig { path, ..cfg.solver.unwrap_or_default() });
            }
            if let (Some(ms), Some(s)) = (timeout_ms, cfg.solver.as_mut()) {
                s.timeout_ms = ms;
            }
            let report = run_check(&read_spec(&model)?, &read_spec(&student)?, &cfg)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print_report(&report);
            }
            Ok(ExitCode::from(match report.verdict.overall {
                Overall::Equivalent => 0,
                Overall::NotEquivalent => 1,
                Overall::Undetermined => 2,
            }))
        }
        Command::Validate { spec, config } => {
            let cfg = load_config(config.as_deref())?.check;
            let s = read_spec(&spec)?;
            let report = run_check(&s, &s, &cfg)?;
            if report.verdict.overall == Overall::NotEquivalent {
                return Err(input_error("specification is not equivalent to itself"));
            }
            println!("{}: ok ({} pre, {} post; self-check {:?})", spec.display(), s.pres.len(), s.posts.len(), report.verdict.overall);
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { config } => {
            let cfg = load_config(config.as_deref())?;
            let rt = tokio::runtime::Runtime::new().map_err(input_error)?;
            rt.block_on(serve(cfg)).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { log } => {
            let text = std::fs::read_to_string(&log).map_err(|e| input_error(format!("{}: {e}", log.display())))?;
            let score = replay_text(&text).map_err(input_error)?;
            println!("{}", serde_json::to_string_pretty(&score).expect("score serializes"));
            Ok(ExitCode::SUCCESS)
        }
    }
}
