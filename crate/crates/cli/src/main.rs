use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pdip_core::diagnostics::{emit_table, TableFormat};
use pdip_core::{
    run, CentralityParams, Formulation, IterationTrace, NlpProblem, PrecisionConfig, SolverKind,
    StepConfig, StopCriteria, TRule, Termination,
};

const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "pdip",
    version,
    about = "Primal-dual interior-point runs instrumented for finite-precision effects",
    args_conflicts_with_subcommands = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment, or the cartesian product of the sweep lists.
    Run(RunArgs),
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Test problem: two-circles, two-circles-mod, scalar-quadratic, three-circles.
    #[arg(long, default_value = "two-circles", value_parser = parse_problem)]
    problem: NlpProblem,

    /// Step equations: full, augmented, condensed.
    #[arg(long, default_value = "condensed", value_parser = parse_formulation)]
    formulation: Formulation,

    /// Linear solver: cholesky, bunch-kaufman, bunch-parlett, gepp.
    /// Defaults to the formulation's natural solver.
    #[arg(long, value_parser = parse_solver)]
    solver: Option<SolverKind>,

    /// Right-hand-side rule: mu-squared (t = mu^2 e) or centering (t = -sigma mu e).
    #[arg(long, default_value = "mu-squared", value_parser = ["mu-squared", "centering"])]
    t_rule: String,

    /// Centering parameter in [0, 1]; implies --t-rule centering.
    #[arg(long)]
    sigma: Option<f64>,

    /// Significand bits of the working precision, 11 to 53 (53 is native double).
    #[arg(long, default_value_t = 53, value_parser = clap::value_parser!(u32).range(11..=53))]
    mantissa_bits: u32,

    /// Fraction of the step to the boundary actually taken.
    #[arg(long, default_value_t = 0.99)]
    step_fraction: f64,

    /// Iteration cap.
    #[arg(long, default_value_t = 12)]
    max_iters: usize,

    /// Stop once mu falls to this value. Defaults to max(1e4 u, 1e-17).
    #[arg(long)]
    mu_stop: Option<f64>,

    /// Centrality constants as C,gamma,tau.
    #[arg(long, default_value = "10,0.1,0.25", value_parser = parse_centrality)]
    centrality: CentralityParams,

    /// Table format: md, csv, json.
    #[arg(long, default_value = "md", value_parser = parse_format)]
    output: TableFormat,

    /// Write tables into this directory instead of standard output.
    #[arg(long, value_name = "DIR")]
    emit_table: Option<PathBuf>,

    /// Write full JSON traces into this directory.
    #[arg(long, value_name = "DIR")]
    trace: Option<PathBuf>,

    /// Comma-separated solvers to sweep; overrides --solver.
    #[arg(long, value_delimiter = ',', value_parser = parse_solver)]
    sweep_solver: Vec<SolverKind>,

    /// Comma-separated mantissa widths to sweep; overrides --mantissa-bits.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(11..=53))]
    sweep_bits: Vec<u32>,
}

fn parse_problem(s: &str) -> Result<NlpProblem, String> {
    NlpProblem::from_key(s).ok_or_else(|| {
        let keys: Vec<&str> = NlpProblem::ALL.iter().map(|p| p.key()).collect();
        format!("unknown problem '{s}' (expected one of {})", keys.join(", "))
    })
}

fn parse_formulation(s: &str) -> Result<Formulation, String> {
    s.parse().map_err(|e: pdip_core::Error| e.to_string())
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|e: pdip_core::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<TableFormat, String> {
    s.parse().map_err(|e: pdip_core::Error| e.to_string())
}

fn parse_centrality(s: &str) -> Result<CentralityParams, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [c, gamma, tau] = parts.as_slice() else {
        return Err(format!("expected C,gamma,tau, got '{s}'"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
    let p = CentralityParams {
        c: num(c)?,
        gamma: num(gamma)?,
        tau: num(tau)?,
    };
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

/// One fully resolved element of a sweep.
#[derive(Debug, Clone)]
struct Job {
    problem: NlpProblem,
    cfg: StepConfig,
    pc: PrecisionConfig,
    stop: StopCriteria,
}

impl Job {
    fn stem(&self) -> String {
        format!(
            "{}_{}_{}_p{}",
            self.problem.key(),
            self.cfg.formulation,
            self.cfg.solver,
            self.pc.bits()
        )
    }
}

/// Expands the sweep lists and validates every element before anything runs.
fn plan(args: &RunArgs) -> Result<Vec<Job>, String> {
    let t_rule = match (args.t_rule.as_str(), args.sigma) {
        (_, Some(sigma)) => TRule::Centering(sigma),
        ("centering", None) => return Err("--t-rule centering needs --sigma".into()),
        _ => TRule::MuSquared,
    };
    if !(args.step_fraction.is_finite() && args.step_fraction >= 0.0) {
        return Err(format!("--step-fraction {} must be finite and >= 0", args.step_fraction));
    }
    if let Some(mu) = args.mu_stop {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(format!("--mu-stop {mu} must be finite and >= 0"));
        }
    }
    let solvers = if args.sweep_solver.is_empty() {
        vec![args.solver.unwrap_or(args.formulation.default_solver())]
    } else {
        args.sweep_solver.clone()
    };
    let bits = if args.sweep_bits.is_empty() {
        vec![args.mantissa_bits]
    } else {
        args.sweep_bits.clone()
    };
    let mut jobs = Vec::new();
    for &solver in &solvers {
        for &b in &bits {
            let cfg = StepConfig::new(args.formulation)
                .with_solver(solver)
                .with_t_rule(t_rule);
            cfg.validate().map_err(|e| e.to_string())?;
            let pc = PrecisionConfig::from_bits(b).ok_or_else(|| format!("mantissa bits {b}"))?;
            let mut stop = StopCriteria::for_precision(&pc);
            stop.max_iters = args.max_iters;
            stop.step_fraction = args.step_fraction;
            if let Some(mu) = args.mu_stop {
                stop.mu_min = mu;
            }
            jobs.push(Job {
                problem: args.problem,
                cfg,
                pc,
                stop,
            });
        }
    }
    Ok(jobs)
}

enum Failure {
    Solver(String),
    Io(String),
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// A stop the solver did not choose: breakdown, failure, or lost interiority.
fn abnormal(t: &Termination) -> Option<String> {
    match t {
        Termination::MuBelowThreshold | Termination::MaxIterations => None,
        Termination::PrecisionFloor(m) => Some(format!("precision floor: {m}")),
        Termination::SolverFailure(m) => Some(format!("solver failure: {m}")),
        Termination::LostInteriority => Some("lost interiority".into()),
    }
}

fn execute_job(job: &Job, args: &RunArgs, many: bool, out: &mut impl Write) -> Result<(), Failure> {
    let known = job.problem.known_solution();
    let trace: IterationTrace = run(
        job.problem,
        Some(&known),
        &job.problem.default_start(),
        &job.cfg,
        &args.centrality,
        &job.pc,
        &job.stop,
    )
    .map_err(|e| Failure::Solver(e.to_string()))?;
    let stem = job.stem();
    let table = emit_table(&trace, Some(&known), args.output);

    if let Some(dir) = &args.trace {
        let json = serde_json::to_string_pretty(&trace).expect("trace serializes");
        write_file(dir, &format!("{stem}.trace.json"), &(json + "\n"))?;
    }
    let io_err = |e: io::Error| Failure::Io(format!("stdout: {e}"));
    match &args.emit_table {
        Some(dir) => {
            write_file(dir, &format!("{stem}.{}", args.output.extension()), &table)?;
            writeln!(out, "{stem}: {} records, {:?}", trace.records.len(), trace.termination).map_err(io_err)?;
        }
        None => {
            if many {
                writeln!(out, "# {stem}").map_err(io_err)?;
            }
            out.write_all(table.as_bytes()).map_err(io_err)?;
        }
    }
    match abnormal(&trace.termination) {
        Some(msg) => Err(Failure::Solver(format!("{stem}: {msg}"))),
        None => Ok(()),
    }
}

fn execute(args: &RunArgs) -> ExitCode {
    let jobs = match plan(args) {
        Ok(j) => j,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut out = io::stdout().lock();
    let mut solver_failed = false;
    for job in &jobs {
        match execute_job(job, args, jobs.len() > 1, &mut out) {
            Ok(()) => {}
            Err(Failure::Solver(msg)) => {
                eprintln!("error: {msg}");
                solver_failed = true;
            }
            Err(Failure::Io(msg)) => {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_IO);
            }
        }
    }
    if solver_failed {
        ExitCode::from(EXIT_SOLVER)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let args = match cli.command {
        Some(Command::Run(a)) => a,
        None => cli.run,
    };
    execute(&args)
}
