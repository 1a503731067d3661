//! Subcommands. [`run`] returns the process exit code: 0 success, 1
//! infeasible or unsolved, 2 usage error, 3 I/O or parse error.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use greenroute_core::exact::{export_milp, solve_exact, ExactStatus};
use greenroute_core::instgen::{generate, GenError, GenSpec};
use greenroute_core::model::{check_feasibility, evaluate, Instance};
use greenroute_core::sa::{anneal, AnnealError, SaConfig};

use crate::compare::{run_compare, CompareConfig};
use crate::deadline::Deadline;
use crate::io::{parse_instance, parse_solution, write_instance, write_solution, write_trace};

pub const EXIT_OK: u8 = 0;
pub const EXIT_UNSOLVED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "greenroute", version, about = "Fuel- and emission-aware vehicle routing with time windows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random instance file.
    Generate(GenerateArgs),
    /// Solve an instance with annealing or exact search.
    Solve(SolveArgs),
    /// Cost and feasibility report for a solution file.
    Evaluate(EvaluateArgs),
    /// Write the mixed-integer model in LP format.
    Export(ExportArgs),
    /// Run both solvers over generated instances and tabulate the results.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub customers: u64,
    #[arg(long, env = "GREENROUTE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub fleet: Option<usize>,
    #[arg(long)]
    pub area: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub fuel_cost: Option<f64>,
    #[arg(long)]
    pub emission_cost: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Sa,
    Exact,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Sa)]
    pub method: Method,
    #[arg(long, env = "GREENROUTE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Time budget of the exact search.
    #[arg(long, default_value_t = 1800.0)]
    pub max_seconds: f64,
    /// Annealing trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Solution file; printed to stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Departure time of the vehicles, hours.
    #[arg(long, default_value_t = 0.0)]
    pub depart_time: f64,
    /// Add segment relocation between routes to the annealing moves.
    #[arg(long)]
    pub segment_moves: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub depart_time: f64,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// LP file; printed to stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [5, 6, 7, 8, 9])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    pub trials: usize,
    #[arg(long, env = "GREENROUTE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Exact search budget per instance, seconds.
    #[arg(long, default_value_t = 1800.0)]
    pub budget_exact: f64,
    #[arg(long, default_value = "compare-out")]
    pub out_dir: PathBuf,
    /// Instances solved in parallel.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }

    fn unsolved(message: impl Into<String>) -> Self {
        Self { code: EXIT_UNSOLVED, message: message.into() }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::io(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Outcome {
    let customers = usize::try_from(args.customers).map_err(|_| Failure::usage("too many customers"))?;
    let mut spec = GenSpec::new(customers, args.seed);
    spec.fleet_size = args.fleet;
    let overrides = [
        (&mut spec.area, args.area),
        (&mut spec.horizon, args.horizon),
        (&mut spec.alpha, args.alpha),
        (&mut spec.beta, args.beta),
        (&mut spec.fuel_cost, args.fuel_cost),
        (&mut spec.emission_cost, args.emission_cost),
    ];
    for (field, value) in overrides {
        if let Some(v) = value {
            *field = v;
        }
    }
    let inst = generate(&spec).map_err(|e| match e {
        GenError::InvalidSpec(_) => Failure::usage(e.to_string()),
        _ => Failure::unsolved(e.to_string()),
    })?;
    write(&args.out, &write_instance(&inst))?;
    println!(
        "wrote {}: {} customers, {} vehicles, total demand {}",
        args.out.display(),
        inst.n(),
        inst.fleet_size,
        inst.total_demand()
    );
    Ok(EXIT_OK)
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let inst = load_instance(&args.instance)?;
    if !args.depart_time.is_finite() {
        return Err(Failure::usage("--depart-time must be finite"));
    }
    match args.method {
        Method::Sa => {
            let cfg = SaConfig {
                depart_time: args.depart_time,
                segment_relocation: args.segment_moves,
                ..SaConfig::with_seed(args.seed)
            };
            let out = anneal(&inst, &cfg).map_err(|e| match e {
                AnnealError::InvalidConfig(_) => Failure::usage(e.to_string()),
                AnnealError::Unsolved(_) => Failure::unsolved(format!("unsolved: {e}")),
            })?;
            if let Some(path) = &args.trace {
                let file = fs::File::create(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
                write_trace(&out.trace, file).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            }
            emit(args.out.as_deref(), &write_solution(&out.solution, out.objective.total, Some("heuristic")))?;
            eprintln!("objective {} after {} epochs", out.objective.total, out.trace.epochs());
            Ok(EXIT_OK)
        }
        Method::Exact => {
            if args.trace.is_some() {
                return Err(Failure::usage("--trace applies to --method sa only"));
            }
            if !(args.max_seconds >= 0.0 && args.max_seconds.is_finite()) {
                return Err(Failure::usage("--max-seconds must be a non-negative number"));
            }
            let res = solve_exact(&inst, args.depart_time, &mut Deadline::seconds(args.max_seconds));
            let status = match res.status {
                ExactStatus::Optimal => "optimal",
                ExactStatus::Incumbent => "unproven",
                ExactStatus::Infeasible => return Err(Failure::unsolved("infeasible: no feasible solution exists")),
                ExactStatus::Unknown => {
                    return Err(Failure::unsolved("unproven: no feasible solution found within the time budget"))
                }
            };
            let (sol, opt) = (res.solution.expect("incumbent present"), res.optimum.expect("incumbent present"));
            emit(args.out.as_deref(), &write_solution(&sol, opt.total, Some(status)))?;
            eprintln!("{status}: objective {} after {} search nodes", opt.total, res.nodes_explored);
            Ok(EXIT_OK)
        }
    }
}

fn cmd_evaluate(args: &EvaluateArgs) -> Outcome {
    let inst = load_instance(&args.instance)?;
    let file = parse_solution(&read(&args.solution)?, &inst)
        .map_err(|e| Failure::io(format!("{}: {e}", args.solution.display())))?;
    let cost = evaluate(&inst, &file.solution).map_err(|e| Failure::io(e.to_string()))?;
    println!("tare     {}", cost.tare);
    println!("payload  {}", cost.payload);
    println!("speed    {}", cost.speed);
    println!("total    {}", cost.total);
    println!("fuel     {}", cost.fuel);
    println!("emission {}", cost.emission);
    if let Some(recorded) = file.objective {
        let rel = (recorded - cost.total).abs() / cost.total.abs().max(f64::MIN_POSITIVE);
        println!("recorded {recorded} (relative difference {rel:e})");
    }
    let report = check_feasibility(&inst, &file.solution, args.depart_time);
    println!("{report}");
    Ok(if report.is_feasible() { EXIT_OK } else { EXIT_UNSOLVED })
}

fn cmd_export(args: &ExportArgs) -> Outcome {
    let inst = load_instance(&args.instance)?;
    emit(args.out.as_deref(), &export_milp(&inst))?;
    Ok(EXIT_OK)
}

fn cmd_compare(args: &CompareArgs) -> Outcome {
    if args.sizes.is_empty() || args.sizes.contains(&0) || args.trials == 0 {
        return Err(Failure::usage("--sizes must list positive sizes and --trials must be positive"));
    }
    if !(args.budget_exact >= 0.0 && args.budget_exact.is_finite()) {
        return Err(Failure::usage("--budget-exact must be a non-negative number"));
    }
    let jobs = args.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cfg = CompareConfig {
        sizes: args.sizes.clone(),
        trials: args.trials,
        seed: args.seed,
        exact_budget_s: args.budget_exact,
        out_dir: args.out_dir.clone(),
        jobs,
    };
    let outcome = run_compare(&cfg).map_err(|e| Failure::io(e.to_string()))?;
    let gaps: Vec<f64> = outcome.rows.iter().filter_map(|r| r.gap_pct).collect();
    let failed = outcome.rows.iter().filter(|r| r.status != "ok").count();
    println!("{:<10} {:>16} {:>9} {:>6} {:>16} {:>9} {:>8}", "instance", "exact", "time", "proven", "sa", "time", "gap%");
    for r in &outcome.rows {
        let num = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
        println!(
            "{:<10} {:>16} {:>9.3} {:>6} {:>16} {:>9.3} {:>8}",
            r.instance,
            num(r.exact_objective),
            r.exact_time_s,
            r.exact_proven,
            num(r.sa_objective),
            r.sa_time_s,
            r.gap_pct.map_or("-".to_string(), |g| format!("{g:.3}"))
        );
    }
    if !gaps.is_empty() {
        println!("mean gap {:.3}% over {} instances", gaps.iter().sum::<f64>() / gaps.len() as f64, gaps.len());
    }
    if failed > 0 {
        println!("{failed} instance(s) with problems, see the status column");
    }
    println!("wrote {} and {} plot(s)", outcome.csv.display(), outcome.plots.len());
    Ok(EXIT_OK)
}

/// Executes a parsed command line and returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    let outcome = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Export(a) => cmd_export(a),
        Command::Compare(a) => cmd_compare(a),
    };
    outcome.unwrap_or_else(|f| {
        eprintln!("greenroute: {}", f.message);
        f.code
    })
}
