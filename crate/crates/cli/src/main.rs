//! `tropdiff`: solve, check, and generate tropical differential systems.
//!
//! Exit codes: 0 solvable/success, 1 unsolvable or failed check, 2 input
//! error, 3 internal invariant violation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use tropdiff_cli::formats::{
    parse_solution_str, parse_system_str, serialize_linear, serialize_nonlinear,
    serialize_solution, ParsedSystem,
};
use tropdiff_cli::gen::{generate_random_system, GeneratorConfig};
use tropdiff_core::{
    bound_n1, bound_safe, oracle_minimal_linear, oracle_solve_nonlinear, parse_dimacs,
    reduce_3sat, solve_minimal_with, solve_univar, support_to_assignment, verify_certificate,
    BoundChoice, EnumerationCaps, EquationStatus, LinearOracleOutcome, LinearSystem,
    NonlinearStatus, NonlinearSystem, SolveOptions, SolveOutcome, SolveReport, UnivarError,
};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tropdiff",
    version,
    about = "Exact solvers for tropical (min-plus) differential equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum BoundArg {
    Paper,
    Safe,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Suite {
    /// Small multivariate systems through the general solver.
    LinearSmall,
    /// One-variable systems through the jump solver.
    Univar,
    /// The polynomial-complexity smoke sizes.
    Scaling,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a linear system file; prints the minimal solution or UNSAT.
    Solve {
        file: PathBuf,
        /// Tail-start bound initializing the solver state.
        #[arg(long, value_enum, default_value_t = BoundArg::Safe)]
        bound: BoundArg,
        /// Print every discard step to stderr.
        #[arg(long)]
        trace: bool,
        /// Also write the solution file here.
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Solve a one-variable linear system with the jump algorithm.
    Solve1 {
        file: PathBuf,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Check a solution file against a system; prints per-equation status.
    Check { file: PathBuf, solution: PathBuf },
    /// Verify a non-linear solvability certificate.
    Nlverify {
        file: PathBuf,
        solution: PathBuf,
        /// Tail-start cap; defaults to the certificate bound n!*(M+rd)*d^n.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Brute-force the minimal solution of a linear system.
    Oracle {
        file: PathBuf,
        /// Tail-start cap; defaults to 2n(M+r)+r.
        #[arg(long)]
        tail_cap: Option<u64>,
        /// Candidate-tuple budget.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Brute-force the first solution of a non-linear system.
    Nlsolve {
        file: PathBuf,
        #[arg(long)]
        tail_cap: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Reduce a DIMACS CNF formula to a non-linear system file.
    FromCnf {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Read the assignment off a solution of a reduced system.
    Extract { cnf: PathBuf, solution: PathBuf },
    /// Generate a random linear system file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        k: usize,
        #[arg(long = "M")]
        max_coeff: u64,
        /// Probability that a slot carries a finite coefficient.
        #[arg(long)]
        density: f64,
        /// Probability that an equation carries a finite free term.
        #[arg(long, default_value_t = 0.5)]
        free_prob: f64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a benchmark suite and write a CSV.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        csv: PathBuf,
    },
}

struct CliError {
    code: u8,
    message: String,
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_INPUT, message: message.into() }
}

fn internal_error(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_INTERNAL, message: message.into() }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<ParsedSystem, CliError> {
    let text = read_file(path)?;
    parse_system_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_linear(path: &Path) -> Result<LinearSystem, CliError> {
    match load_system(path)? {
        ParsedSystem::Linear(system) => Ok(system),
        ParsedSystem::Nonlinear(_) => {
            Err(input_error(format!("{}: expected a linear system", path.display())))
        }
    }
}

fn load_nonlinear(path: &Path) -> Result<NonlinearSystem, CliError> {
    match load_system(path)? {
        ParsedSystem::Nonlinear(system) => Ok(system),
        ParsedSystem::Linear(_) => {
            Err(input_error(format!("{}: expected a nonlinear system", path.display())))
        }
    }
}

fn load_solution(path: &Path, n: usize) -> Result<Vec<tropdiff_core::Support>, CliError> {
    let text = read_file(path)?;
    let supports =
        parse_solution_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    if supports.len() != n {
        return Err(input_error(format!(
            "{}: {} supports for a system in {} variables",
            path.display(),
            supports.len(),
            n
        )));
    }
    Ok(supports)
}

fn default_nonlinear_cap(system: &NonlinearSystem) -> Result<u64, CliError> {
    bound_n1(
        system.n() as u64,
        system.r(),
        system.max_coefficient(),
        system.degree().max(1),
    )
    .map_err(|e| input_error(format!("cannot derive a default cap: {e}")))
}

fn emit_solution(
    report: &SolveReport,
    trace: bool,
    solution_out: Option<&Path>,
) -> Result<u8, CliError> {
    if trace {
        for step in &report.steps {
            eprintln!("{step}");
        }
        eprintln!("steps: {}", report.discard_count);
    }
    match &report.outcome {
        SolveOutcome::Solvable { supports, only_infinite } => {
            let text = serialize_solution(supports);
            print!("{text}");
            if *only_infinite {
                eprintln!("note: all supports are empty (only the infinite solution)");
            }
            if let Some(path) = solution_out {
                write_file(path, &text)?;
            }
            Ok(0)
        }
        SolveOutcome::Unsolvable { equation } => {
            println!("UNSAT equation {}", equation + 1);
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_solve(
    file: &Path,
    bound: BoundArg,
    trace: bool,
    solution: Option<&Path>,
) -> Result<u8, CliError> {
    let system = load_linear(file)?;
    let bound = match bound {
        BoundArg::Paper => BoundChoice::Paper,
        BoundArg::Safe => BoundChoice::Safe,
    };
    let report = solve_minimal_with(&system, SolveOptions { bound, record_steps: trace })
        .map_err(|e| input_error(e.to_string()))?;
    emit_solution(&report, trace, solution)
}

fn cmd_solve1(file: &Path, trace: bool, solution: Option<&Path>) -> Result<u8, CliError> {
    let system = load_linear(file)?;
    let report = solve_univar(&system).map_err(|e| match e {
        UnivarError::InternalBoundViolation(_) => internal_error(e.to_string()),
        other => input_error(other.to_string()),
    })?;
    emit_solution(&report, trace, solution)
}

fn cmd_check(file: &Path, solution: &Path) -> Result<u8, CliError> {
    let system = load_system(file)?;
    let supports = load_solution(solution, system.n())?;
    let mut first_violated: Option<usize> = None;
    match &system {
        ParsedSystem::Linear(system) => {
            for (l, eq) in system.equations().iter().enumerate() {
                match eq.status(&supports) {
                    EquationStatus::Satisfied => println!("equation {}: satisfied", l + 1),
                    EquationStatus::ViolatedAtSlot { slot, value } => {
                        println!("equation {}: violated at {slot} (value {value})", l + 1);
                        first_violated.get_or_insert(l);
                    }
                    EquationStatus::ViolatedAtFree { value } => {
                        println!("equation {}: violated at the free term (value {value})", l + 1);
                        first_violated.get_or_insert(l);
                    }
                }
            }
        }
        ParsedSystem::Nonlinear(system) => {
            for (l, eq) in system.equations().iter().enumerate() {
                match eq.status(&supports) {
                    NonlinearStatus::Satisfied => println!("equation {}: satisfied", l + 1),
                    NonlinearStatus::Violated { monomial, value } => {
                        println!(
                            "equation {}: violated at {} (value {value})",
                            l + 1,
                            eq.monomials()[monomial]
                        );
                        first_violated.get_or_insert(l);
                    }
                }
            }
        }
    }
    match first_violated {
        None => {
            println!("OK");
            Ok(0)
        }
        Some(l) => {
            println!("FAIL first violated equation {}", l + 1);
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_nlverify(file: &Path, solution: &Path, cap: Option<u64>) -> Result<u8, CliError> {
    let system = load_nonlinear(file)?;
    let supports = load_solution(solution, system.n())?;
    let cap = match cap {
        Some(cap) => cap,
        None => default_nonlinear_cap(&system)?,
    };
    if verify_certificate(&system, &supports, cap) {
        println!("ACCEPT (cap {cap})");
        return Ok(0);
    }
    // Recover the reason for the report.
    let reason = supports
        .iter()
        .enumerate()
        .find_map(|(i, s)| {
            if let Some(&e) = s.finite_part().iter().find(|&&e| e > system.r()) {
                return Some(format!("x{}: finite element {e} exceeds r={}", i + 1, system.r()));
            }
            match s.tail() {
                Some(m) if m > cap => {
                    Some(format!("x{}: tail start {m} exceeds the cap {cap}", i + 1))
                }
                _ => None,
            }
        })
        .unwrap_or_else(|| "the supports do not solve the system".to_string());
    println!("REJECT (cap {cap}): {reason}");
    Ok(EXIT_NEGATIVE)
}

fn cmd_oracle(file: &Path, tail_cap: Option<u64>, budget: Option<u64>) -> Result<u8, CliError> {
    let system = load_linear(file)?;
    let tail_cap = match tail_cap {
        Some(cap) => cap,
        None => bound_safe(system.n() as u64, system.r(), system.max_coefficient())
            .map_err(|e| input_error(format!("cannot derive a default tail cap: {e}")))?,
    };
    let mut caps = EnumerationCaps::new(system.r(), tail_cap);
    if let Some(budget) = budget {
        caps = caps.with_budget(budget);
    }
    match oracle_minimal_linear(&system, &caps).map_err(|e| input_error(e.to_string()))? {
        LinearOracleOutcome::Solvable { join, join_is_solution, solution_count } => {
            if !join_is_solution {
                return Err(internal_error(
                    "the join of all solutions is not itself a solution".to_string(),
                ));
            }
            print!("{}", serialize_solution(&join));
            println!("# solutions: {solution_count}");
            Ok(0)
        }
        LinearOracleOutcome::Unsolvable => {
            println!("UNSAT");
            println!("# solutions: 0");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_nlsolve(file: &Path, tail_cap: Option<u64>, budget: Option<u64>) -> Result<u8, CliError> {
    let system = load_nonlinear(file)?;
    let tail_cap = match tail_cap {
        Some(cap) => cap,
        None => default_nonlinear_cap(&system)?,
    };
    let mut caps = EnumerationCaps::new(system.r(), tail_cap);
    if let Some(budget) = budget {
        caps = caps.with_budget(budget);
    }
    match oracle_solve_nonlinear(&system, &caps).map_err(|e| input_error(e.to_string()))? {
        Some(supports) => {
            print!("{}", serialize_solution(&supports));
            Ok(0)
        }
        None => {
            println!("UNSAT");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_from_cnf(file: &Path, output: &Path) -> Result<u8, CliError> {
    let text = read_file(file)?;
    let cnf =
        parse_dimacs(&text).map_err(|e| input_error(format!("{}: {e}", file.display())))?;
    let system = reduce_3sat(&cnf);
    let name = file
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| file.display().to_string());
    let mut out = format!(
        "# reduced from {name}: {} variables, {} clauses\n",
        cnf.num_vars(),
        cnf.clauses().len()
    );
    out.push_str(&serialize_nonlinear(&system));
    write_file(output, &out)?;
    eprintln!("wrote {} ({} equations)", output.display(), system.k());
    Ok(0)
}

fn cmd_extract(cnf_path: &Path, solution: &Path) -> Result<u8, CliError> {
    let cnf = parse_dimacs(&read_file(cnf_path)?)
        .map_err(|e| input_error(format!("{}: {e}", cnf_path.display())))?;
    let supports = load_solution(solution, 1)?;
    let assignment = match support_to_assignment(&supports[0], cnf.num_vars()) {
        Ok(assignment) => assignment,
        Err(e) => {
            eprintln!("{e}");
            return Ok(EXIT_NEGATIVE);
        }
    };
    println!("{assignment}");
    if !cnf.evaluate(&assignment) {
        eprintln!("note: the assignment does not satisfy the formula");
        return Ok(EXIT_NEGATIVE);
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    n: usize,
    r: u64,
    k: usize,
    max_coeff: u64,
    density: f64,
    free_prob: f64,
    seed: u64,
    output: &Path,
) -> Result<u8, CliError> {
    if !(0.0..=1.0).contains(&density) || !(0.0..=1.0).contains(&free_prob) {
        return Err(input_error("--density and --free-prob must lie in [0, 1]"));
    }
    let config = GeneratorConfig { n, r, k, max_coeff, density, free_prob, seed };
    let system = generate_random_system(&config);
    write_file(output, &serialize_linear(&system))?;
    eprintln!(
        "wrote {} (n={n} r={r} k={k} M<={max_coeff} seed={seed})",
        output.display()
    );
    Ok(0)
}

struct BenchRow {
    instance: String,
    n: usize,
    r: u64,
    k: usize,
    max_coeff: u64,
    outcome: &'static str,
    steps: u64,
    finite_steps: u64,
    jumps: u64,
    max_p: Option<u64>,
    wall_nanos: u128,
}

fn bench_row(
    instance: String,
    system: &LinearSystem,
    report: &SolveReport,
    wall_nanos: u128,
) -> BenchRow {
    BenchRow {
        instance,
        n: system.n(),
        r: system.r(),
        k: system.k(),
        max_coeff: system.max_coefficient(),
        outcome: if report.outcome.is_solvable() { "solvable" } else { "unsolvable" },
        steps: report.discard_count,
        finite_steps: report.counts.finite_discards,
        jumps: report.counts.jumps,
        max_p: report.counts.max_jump_p,
        wall_nanos,
    }
}

fn cmd_bench(suite: Suite, csv: &Path) -> Result<u8, CliError> {
    let mut rows: Vec<BenchRow> = Vec::new();
    match suite {
        Suite::LinearSmall => {
            let mut idx = 0;
            for n in 1..=3usize {
                for r in 1..=3u64 {
                    for k in 1..=3usize {
                        let config = GeneratorConfig {
                            n,
                            r,
                            k,
                            max_coeff: 5,
                            density: 0.5,
                            free_prob: 0.5,
                            seed: 1000 + idx,
                        };
                        let system = generate_random_system(&config);
                        let start = Instant::now();
                        let report = solve_minimal_with(
                            &system,
                            SolveOptions { bound: BoundChoice::Safe, record_steps: false },
                        )
                        .map_err(|e| input_error(e.to_string()))?;
                        rows.push(bench_row(
                            format!("linear-small-{idx:03}"),
                            &system,
                            &report,
                            start.elapsed().as_nanos(),
                        ));
                        idx += 1;
                    }
                }
            }
        }
        Suite::Univar => {
            let mut idx = 0;
            for &r in &[10u64, 100, 1000] {
                for &k in &[4usize, 16, 64] {
                    let config = GeneratorConfig {
                        n: 1,
                        r,
                        k,
                        max_coeff: 100,
                        density: (4.0 / (r as f64 + 1.0)).min(1.0),
                        free_prob: 0.5,
                        seed: 2000 + idx,
                    };
                    let system = generate_random_system(&config);
                    let start = Instant::now();
                    let report = solve_univar(&system).map_err(|e| match e {
                        UnivarError::InternalBoundViolation(_) => internal_error(e.to_string()),
                        other => input_error(other.to_string()),
                    })?;
                    rows.push(bench_row(
                        format!("univar-{idx:03}"),
                        &system,
                        &report,
                        start.elapsed().as_nanos(),
                    ));
                    idx += 1;
                }
            }
        }
        Suite::Scaling => {
            for (idx, &(size, m)) in [(10usize, 100u64), (20, 400), (50, 1000)].iter().enumerate()
            {
                let config = GeneratorConfig {
                    n: size,
                    r: size as u64,
                    k: size,
                    max_coeff: m,
                    density: 0.3,
                    free_prob: 0.5,
                    seed: 3000 + idx as u64,
                };
                let system = generate_random_system(&config);
                let start = Instant::now();
                let report = solve_minimal_with(
                    &system,
                    SolveOptions { bound: BoundChoice::Safe, record_steps: false },
                )
                .map_err(|e| input_error(e.to_string()))?;
                rows.push(bench_row(
                    format!("scaling-{idx:03}"),
                    &system,
                    &report,
                    start.elapsed().as_nanos(),
                ));
            }
        }
    }

    let mut out = String::from("instance,n,r,k,M,outcome,steps,finite_steps,jumps,max_p,wall_nanos\n");
    for row in &rows {
        let max_p = row.max_p.map(|p| p.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.instance,
            row.n,
            row.r,
            row.k,
            row.max_coeff,
            row.outcome,
            row.steps,
            row.finite_steps,
            row.jumps,
            max_p,
            row.wall_nanos
        )
        .expect("writing to a String cannot fail");
    }
    write_file(csv, &out)?;
    eprintln!("wrote {} ({} instances)", csv.display(), rows.len());
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Solve { file, bound, trace, solution } => {
            cmd_solve(&file, bound, trace, solution.as_deref())
        }
        Command::Solve1 { file, trace, solution } => {
            cmd_solve1(&file, trace, solution.as_deref())
        }
        Command::Check { file, solution } => cmd_check(&file, &solution),
        Command::Nlverify { file, solution, cap } => cmd_nlverify(&file, &solution, cap),
        Command::Oracle { file, tail_cap, budget } => cmd_oracle(&file, tail_cap, budget),
        Command::Nlsolve { file, tail_cap, budget } => cmd_nlsolve(&file, tail_cap, budget),
        Command::FromCnf { file, output } => cmd_from_cnf(&file, &output),
        Command::Extract { cnf, solution } => cmd_extract(&cnf, &solution),
        Command::Gen { n, r, k, max_coeff, density, free_prob, seed, output } => {
            cmd_gen(n, r, k, max_coeff, density, free_prob, seed, &output)
        }
        Command::Bench { suite, csv } => cmd_bench(suite, &csv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
