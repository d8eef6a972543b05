use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vigraal::check::run_checks;
use vigraal::error::{EXIT_CONFIG, EXIT_NUMERICAL};
use vigraal::output::{emit_csv, meta_path, run_meta, write_json, InstanceRef};
use vigraal::{run_experiment, AutoOr, GeometryName, HarnessError, RunConfig, SolverKind, Timing};
use vigraal_core::problems::{generate_instance, ProblemInstance};
use vigraal_core::ProblemFamily;

#[derive(Parser)]
#[command(
    name = "vigraal",
    version,
    about = "Bregman golden ratio solvers for monotone variational inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded repetitions and write a CSV trace plus a JSON sidecar.
    Run(RunArgs),
    /// Write the instance JSON for a problem, size and seed.
    Gen(GenArgs),
    /// Compare implementations against independent oracles.
    Check(CheckArgs),
}

fn parse_family(s: &str) -> Result<ProblemFamily, String> {
    s.parse().map_err(|e: vigraal_core::Error| e.to_string())
}

#[derive(Args)]
struct RunArgs {
    /// matrix-game, gaussian or cournot.
    #[arg(long, value_parser = parse_family)]
    problem: ProblemFamily,
    #[arg(long, value_enum)]
    geometry: GeometryName,
    #[arg(long, value_enum)]
    solver: SolverKind,
    /// Strategies per player, channels, or firms.
    #[arg(long, default_value_t = 0)]
    size: usize,
    #[arg(long)]
    iters: usize,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to 1.5 for adaptive runs and the golden ratio for fixed-step runs.
    #[arg(long)]
    phi: Option<f64>,
    /// `auto` is 1/phi + 1/phi^2.
    #[arg(long, default_value = "auto")]
    rho: AutoOr,
    /// Initial step size (the step size itself for fixed-step runs).
    #[arg(long, default_value = "auto")]
    lambda0: AutoOr,
    /// Multiplier on an automatic lambda0. Defaults to 1e-2 for KL Gaussian runs and 1 otherwise.
    #[arg(long)]
    lambda0_factor: Option<f64>,
    #[arg(long, default_value_t = 1e6)]
    lambda_max: f64,
    /// Stop a repetition once the best squared residual reaches this value.
    #[arg(long, default_value_t = 0.0)]
    target_residual_sq: f64,
    /// `wall` records elapsed time, which makes output differ between runs.
    #[arg(long, value_enum, default_value_t = Timing::Off)]
    timing: Timing,
    /// Replay this instance JSON in every repetition instead of generating one.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_family)]
    problem: ProblemFamily,
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random cases per projection suite.
    #[arg(long, default_value_t = 1000)]
    cases: usize,
}

fn read_instance(path: &Path) -> Result<ProblemInstance, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

fn cmd_run(args: RunArgs) -> Result<i32, HarnessError> {
    let instance = args.instance.as_deref().map(read_instance).transpose()?;
    let size = match &instance {
        Some(inst) if args.size == 0 => inst.size,
        _ => args.size,
    };
    let cfg = RunConfig {
        problem: args.problem,
        geometry: args.geometry,
        solver: args.solver,
        size,
        iters: args.iters,
        reps: args.reps,
        seed: args.seed,
        phi: args.phi,
        rho: args.rho,
        lambda0: args.lambda0,
        lambda0_factor: args.lambda0_factor,
        lambda_max: args.lambda_max,
        target_residual_sq: args.target_residual_sq,
        perturbation: vigraal::config::DEFAULT_PERTURBATION,
        timing: args.timing,
        instance,
    };
    let artifact = run_experiment(&cfg)?;
    emit_csv(&artifact, &args.out)?;
    let source = match &args.instance {
        Some(p) => InstanceRef::File {
            path: p.display().to_string(),
        },
        None => InstanceRef::Generated,
    };
    write_json(
        &run_meta(&artifact, &args.out, source),
        &meta_path(&args.out),
    )?;

    for rep in &artifact.reps {
        let s = &rep.summary;
        println!(
            "rep {} iters {} best_residual_sq {:.6e} status {:?}{}",
            s.rep,
            s.iterations,
            s.final_best_residual_sq,
            s.status,
            s.failure
                .as_deref()
                .map(|f| format!(" ({f})"))
                .unwrap_or_default()
        );
    }
    Ok(if artifact.any_numerical_failure() {
        EXIT_NUMERICAL
    } else {
        0
    })
}

fn cmd_gen(args: GenArgs) -> Result<i32, HarnessError> {
    let inst = generate_instance(args.problem, args.size, args.seed)?;
    match args.out {
        Some(path) => write_json(&inst, &path)?,
        None => {
            let text = serde_json::to_string_pretty(&inst).map_err(|e| HarnessError::Json {
                path: PathBuf::from("<stdout>"),
                source: e,
            })?;
            println!("{text}");
        }
    }
    Ok(0)
}

fn cmd_check(args: CheckArgs) -> i32 {
    let outcomes = run_checks(args.seed, args.cases);
    for o in &outcomes {
        println!(
            "{} {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
    if outcomes.iter().all(|o| o.passed) {
        0
    } else {
        EXIT_NUMERICAL
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Check(args) => Ok(cmd_check(args)),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("vigraal: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
