//! `mfa`: validate, solve, generate and sweep allocation instances.
//!
//! Exit codes: 0 success (Optimal/Feasible, valid input), 1 infeasible or
//! failed trend check, 2 input error, 3 limit reached.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use mfa::experiments::{self, assert_trends, ScenarioFile};
use mfa::instance::{self, Instance, ParseMode};
use mfa::model::check_feasible;
use mfa::solver::{self, ExactOptions, SolveResult, SolveStatus};

#[derive(Parser)]
#[command(
    name = "mfa",
    version,
    about = "Minimum-cost fog service allocation under availability constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file, or an assignment against it.
    Validate {
        path: PathBuf,
        /// Ignore unknown keys instead of rejecting them.
        #[arg(long)]
        lenient: bool,
        /// Solve-result JSON (or any JSON with an "assignment" pair list) to
        /// check; prints the feasibility report.
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Solve an instance file.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Seconds before the exact search stops with its incumbent.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Branch-and-bound nodes before the search stops.
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
        #[arg(long)]
        lenient: bool,
    },
    /// Generate an instance from a scenario preset or file.
    Gen {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        users: usize,
        /// Defaults to the scenario's own seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep and write its CSV.
    Experiment {
        /// fig2, fig3, fig4, fig5, or a scenario file.
        #[arg(long)]
        preset: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit 1 and list violations unless the expected trends hold.
        #[arg(long)]
        assert_trends: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Greedy,
    Bruteforce,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Csv,
}

const OK: u8 = 0;
const INFEASIBLE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const LIMIT: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate {
            path,
            lenient,
            solution,
        } => validate(&path, mode(lenient), solution.as_deref()),
        Command::Solve {
            path,
            method,
            time_limit,
            node_limit,
            output,
            lenient,
        } => solve(&path, method, time_limit, node_limit, output, mode(lenient)),
        Command::Gen {
            scenario,
            users,
            seed,
            out,
        } => gen(&scenario, users, seed, out.as_deref()),
        Command::Experiment {
            preset,
            seed,
            out,
            assert_trends,
        } => experiment(&preset, seed, out.as_deref(), assert_trends),
    };
    ExitCode::from(code.unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        INPUT_ERROR
    }))
}

fn mode(lenient: bool) -> ParseMode {
    if lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path, mode: ParseMode) -> Result<Instance, String> {
    instance::parse_instance(&read(path)?, mode).map_err(|e| e.to_string())
}

fn validate(path: &Path, mode: ParseMode, solution: Option<&Path>) -> Result<u8, String> {
    let inst =
        instance::parse_instance_unvalidated(&read(path)?, mode).map_err(|e| e.to_string())?;
    let violations = instance::validate(&inst);
    if !violations.is_empty() {
        for v in &violations {
            println!("{v}");
        }
        return Ok(INPUT_ERROR);
    }
    let Some(solution) = solution else {
        println!("OK");
        return Ok(OK);
    };
    let assignment =
        SolveResult::assignment_from_json(&read(solution)?, inst.user_count(), inst.server_count())
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{} carries no assignment", solution.display()))?;
    let report = check_feasible(&inst, &assignment).map_err(|e| e.to_string())?;
    println!("{}", report.to_json());
    Ok(if report.is_feasible() { OK } else { INFEASIBLE })
}

fn solve(
    path: &Path,
    method: Method,
    time_limit: Option<f64>,
    node_limit: Option<u64>,
    output: Output,
    mode: ParseMode,
) -> Result<u8, String> {
    let inst = load_instance(path, mode)?;
    let time_limit = time_limit
        .map(|s| Duration::try_from_secs_f64(s).map_err(|e| format!("--time-limit: {e}")))
        .transpose()?;
    let result = match method {
        Method::Exact => solver::solve_exact(
            &inst,
            &ExactOptions {
                time_limit,
                node_limit,
            },
        ),
        Method::Greedy => solver::solve_greedy(&inst),
        Method::Bruteforce => solver::solve_bruteforce(&inst).map_err(|e| e.to_string())?,
    };
    match output {
        Output::Json => println!("{}", result.to_json()),
        Output::Csv => print!("{}", result.to_csv()),
    }
    Ok(match result.status {
        SolveStatus::Optimal | SolveStatus::Feasible => OK,
        SolveStatus::Infeasible => INFEASIBLE,
        SolveStatus::TimedOut => LIMIT,
    })
}

/// A preset name, or else a path to a scenario file.
fn load_scenario(name: &str) -> Result<ScenarioFile, String> {
    if let Some(file) = experiments::preset(name) {
        return Ok(file);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(format!(
            "unknown preset `{name}` (known: {})",
            experiments::PRESET_NAMES.join(", ")
        ));
    }
    ScenarioFile::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn gen(scenario: &str, users: usize, seed: Option<u64>, out: Option<&Path>) -> Result<u8, String> {
    let file = load_scenario(scenario)?;
    let seed = seed.unwrap_or(file.scenario.seed);
    let inst =
        instance::generate_instance(&file.scenario, users, seed).map_err(|e| e.to_string())?;
    write_out(out, &instance::serialize_instance(&inst))?;
    Ok(OK)
}

fn experiment(
    preset: &str,
    seed: Option<u64>,
    out: Option<&Path>,
    check: bool,
) -> Result<u8, String> {
    let mut file = load_scenario(preset)?;
    if let Some(seed) = seed {
        file = file.with_seed(seed);
    }
    let output = file.run().map_err(|e| e.to_string())?;
    write_out(out, &output.to_csv())?;
    if check {
        let violations = assert_trends(&output, &file.trend_spec());
        if !violations.is_empty() {
            for v in &violations {
                eprintln!("trend violation: {v}");
            }
            return Ok(INFEASIBLE);
        }
    }
    Ok(OK)
}
