//! The `rainbow` command line: instance generation, solving, exact counts, log verification,
//! harness runs, bound arithmetic and batch benchmarks.
//!
//! Exit codes: 0 success, 1 validation or verification failure, 2 usage error, 3 budget
//! exhausted.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use rainbow_core::cascade::movelog::MoveLog;
use rainbow_core::cascade::SolverParams;
use rainbow_core::oracle::harness::{run_harness, HarnessConfig, HarnessId, HarnessReport};
use rainbow_core::oracle::{brute_force_t, OracleBudget};
use rainbow_core::rainbow::{overlap_kappa, BoundParams};
use rainbow_core::workbench::{
    emit_instance, generate_with_ground, parse_instance, parse_report, solve_instance, theorem_bounds, Family,
    Instance, Mode, Report, Status, CSV_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rainbow", version, about = "Disjoint rainbow basis packing workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded instance.
    Gen(GenArgs),
    /// Pack rainbow bases and write a report and move log.
    Solve(SolveArgs),
    /// Exact number of disjoint rainbow bases by exhaustive search.
    Brute(BruteArgs),
    /// Replay a move log against its instance and check it against a report.
    Verify(VerifyArgs),
    /// Run the property harnesses.
    Harness(HarnessArgs),
    /// Evaluate the lower bounds for given parameters.
    Bounds(BoundsArgs),
    /// Solve a batch of generated instances and print CSV rows.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Disjoint,
    Overlapping,
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "disjoint")]
    mode: ModeArg,
    /// Overlap bound for overlapping mode.
    #[arg(long, default_value_t = 2)]
    kappa: usize,
    /// Shared ground-set size for overlapping mode.
    #[arg(long)]
    ground: Option<usize>,
}

impl FamilyArgs {
    fn mode(&self) -> Mode {
        match self.mode {
            ModeArg::Disjoint => Mode::Disjoint,
            ModeArg::Overlapping => Mode::Overlapping { kappa: self.kappa },
        }
    }

    fn generate(&self, seed: u64) -> Result<Instance, String> {
        generate_with_ground(self.family, self.n, self.mode(), seed, self.ground).map_err(|e| e.to_string())
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Longest cascade chain.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Truncation deficit: collections hold at most n - alpha sets.
    #[arg(long, default_value_t = 0)]
    alpha: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget for the solver.
    #[arg(long)]
    budget_ms: Option<u64>,
    /// Also compute the exact count for comparison.
    #[arg(long)]
    brute: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Report path (JSON); the move log goes next to it with a `.log` extension.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Move log path, overriding the default next to `--out`.
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct BruteArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    budget_ms: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    log: PathBuf,
    /// Report to check against the replayed collection.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HarnessArgs {
    /// Harness name, or `all`.
    #[arg(long, default_value = "all")]
    id: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    /// Wall-clock cap for each harness run.
    #[arg(long)]
    budget_ms: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: usize,
    #[arg(long, default_value_t = 1)]
    kappa: usize,
    /// Disjoint base sequence bound instead of the overlapping one.
    #[arg(long)]
    disjoint: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Number of consecutive instance seeds, starting at `--seed`.
    #[arg(long, default_value_t = 10)]
    count: u64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Write 0 in the elapsed_ms column so that output is byte-stable.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure::new(EXIT_USAGE, message)
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure::new(EXIT_INVALID, message)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot write output: {e}"))),
    }
}

fn brute_budget(budget_ms: Option<u64>) -> OracleBudget {
    let mut b = OracleBudget::default();
    if let Some(ms) = budget_ms {
        b.wall = Duration::from_millis(ms);
    }
    b
}

/// Solver parameters for an instance: β as declared (or from the girth), κ from the bases.
fn solver_params(instance: &Instance, args: &SolverArgs) -> Result<SolverParams, Failure> {
    let universe = instance.validate().map_err(|e| invalid(e.to_string()))?;
    let beta = instance.declared.beta.unwrap_or_else(|| {
        let girth = universe.matroid().girth().ok().and_then(|g| g.finite());
        BoundParams::beta_for_girth(instance.n(), girth)
    });
    let params = SolverParams {
        bounds: BoundParams::new(beta, overlap_kappa(&instance.bases), args.alpha),
        depth: args.depth,
        seed: args.seed,
        time_budget: args.budget_ms.map(Duration::from_millis),
        ..SolverParams::default()
    };
    params.validate().map_err(|e| usage(e.to_string()))?;
    params.bounds.eta(instance.n()).map_err(|e| usage(e.to_string()))?;
    Ok(params)
}

fn solve_one(instance: &Instance, args: &SolverArgs) -> Result<(Report, MoveLog), Failure> {
    let params = solver_params(instance, args)?;
    let brute = args.brute.then(OracleBudget::default);
    let solved = solve_instance(instance, &params, brute.as_ref()).map_err(|e| invalid(e.to_string()))?;
    Ok((solved.report, solved.log))
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::Ok => EXIT_OK,
        Status::Budget => EXIT_BUDGET,
        Status::Invalid => EXIT_INVALID,
    }
}

fn cmd_gen(args: GenArgs, out: &mut dyn Write) -> CmdResult {
    let instance = args.family.generate(args.seed).map_err(usage)?;
    emit(out, args.out.as_deref(), &emit_instance(&instance))?;
    Ok(EXIT_OK)
}

fn cmd_solve(args: SolveArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let (mut report, log) = solve_one(&instance, &args.solver)?;
    let log_path = args.log.clone().or_else(|| args.out.as_ref().map(|p| p.with_extension("log")));
    if let Some(path) = &log_path {
        write_file(path, &log.to_string())?;
        report.move_log = Some(path.display().to_string());
    }
    if let Some(path) = &args.out {
        write_file(path, &(report.to_json() + "\n"))?;
    }
    let text = match args.format {
        Format::Csv => format!("{CSV_HEADER}\n{}\n", report.csv_row()),
        Format::Text => {
            let brute = report.brute_t.map_or_else(String::new, |t| format!(" (exact {t})"));
            format!(
                "{} rainbow bases{brute}, signature {}, {} moves, status {}\n",
                report.solver_rbs,
                report.signature,
                report.moves,
                report.status.name()
            )
        }
    };
    emit(out, None, &text)?;
    Ok(status_code(report.status))
}

fn cmd_brute(args: BruteArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let universe = instance.validate().map_err(|e| invalid(e.to_string()))?;
    match brute_force_t(&universe, &brute_budget(args.budget_ms)) {
        Ok(t) => {
            emit(out, None, &format!("{t}\n"))?;
            Ok(EXIT_OK)
        }
        // every oracle error is a budget limit
        Err(e) => Err(Failure::new(EXIT_BUDGET, e.to_string())),
    }
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let universe = instance.validate().map_err(|e| invalid(e.to_string()))?;
    let log = MoveLog::parse(&read(&args.log)?).map_err(|e| invalid(format!("{}: {e}", args.log.display())))?;
    let coll = log.replay(&universe).map_err(|e| invalid(format!("replay failed: {e}")))?;
    if let Some(path) = &args.report {
        let report = parse_report(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        if report.instance_digest != instance.digest() {
            return Err(invalid("report was produced for a different instance"));
        }
        if report.solver_rbs != coll.full_count() || report.signature != coll.signature().to_string() {
            return Err(invalid(format!(
                "report claims {} rainbow bases with signature {}, replay gives {} with {}",
                report.solver_rbs,
                report.signature,
                coll.full_count(),
                coll.signature()
            )));
        }
        if report.moves != log.moves.len() {
            return Err(invalid(format!(
                "report claims {} moves, log has {}",
                report.moves,
                log.moves.len()
            )));
        }
    }
    emit(
        out,
        None,
        &format!(
            "ok: {} moves replayed, {} rainbow bases, signature {}\n",
            log.moves.len(),
            coll.full_count(),
            coll.signature()
        ),
    )?;
    Ok(EXIT_OK)
}

fn harness_text(r: &HarnessReport) -> String {
    let verdict = if r.passed() {
        "pass"
    } else if r.counterexamples > 0 {
        "FAIL"
    } else if r.incomplete {
        "incomplete"
    } else {
        "below coverage floor"
    };
    let mut text = format!("{r} [{verdict}, floor {}]\n", r.id.coverage_floor());
    if let Some(c) = &r.first_counterexample {
        text.push_str(&format!("first counterexample:\n{c}\n"));
    }
    text
}

fn cmd_harness(args: HarnessArgs, out: &mut dyn Write) -> CmdResult {
    let ids: Vec<HarnessId> = if args.id == "all" {
        HarnessId::ALL.to_vec()
    } else {
        vec![HarnessId::from_name(&args.id).ok_or_else(|| {
            let names: Vec<&str> = HarnessId::ALL.iter().map(|h| h.name()).collect();
            usage(format!("unknown harness `{}`; expected one of {}", args.id, names.join(", ")))
        })?]
    };
    let mut config = HarnessConfig {
        seed: args.seed,
        ..HarnessConfig::default()
    };
    if let Some(k) = args.instances {
        config.instances = k;
    }
    if let Some(d) = args.depth {
        config.depth = d;
    }
    if let Some(ms) = args.budget_ms {
        config.wall = Duration::from_millis(ms);
    }
    let reports: Vec<HarnessReport> = ids.iter().map(|&id| run_harness(id, &config)).collect();
    let text: String = match args.format {
        Format::Text => reports.iter().map(harness_text).collect(),
        Format::Csv => {
            let mut s = format!("harness,{CSV_HEADER}\n");
            for r in &reports {
                for row in &r.rows {
                    s.push_str(&format!("{},{}\n", r.id, row.csv_row()));
                }
            }
            s
        }
    };
    emit(out, args.out.as_deref(), &text)?;
    let code = if reports.iter().any(|r| r.counterexamples > 0) {
        EXIT_INVALID
    } else if reports.iter().any(|r| r.incomplete) {
        EXIT_BUDGET
    } else {
        EXIT_OK
    };
    Ok(code)
}

fn cmd_bounds(args: BoundsArgs, out: &mut dyn Write) -> CmdResult {
    if !args.disjoint && args.kappa == 0 {
        return Err(usage("the overlapping bound needs --kappa of at least 1"));
    }
    let b = theorem_bounds(args.n, args.beta, args.kappa, args.disjoint);
    let text = match args.format {
        Format::Text => {
            let alpha = b.alpha.map_or_else(String::new, |a| format!(", alpha {a}"));
            let flag = if b.applicable { "applicable" } else { "not applicable" };
            format!("bound {} ({flag}{alpha})\n", b.value)
        }
        Format::Csv => format!(
            "n,beta,kappa,disjoint,alpha,applicable,value\n{},{},{},{},{},{},{}\n",
            b.n,
            b.beta,
            b.kappa,
            b.disjoint,
            b.alpha.map_or_else(String::new, |a| a.to_string()),
            b.applicable,
            b.value
        ),
    };
    emit(out, None, &text)?;
    Ok(EXIT_OK)
}

fn cmd_bench(args: BenchArgs, out: &mut dyn Write) -> CmdResult {
    let seeds: Vec<u64> = (0..args.count).map(|i| args.solver.seed.wrapping_add(i)).collect();
    let job = |seed: u64| -> Result<Report, Failure> {
        let instance = args.family.generate(seed).map_err(usage)?;
        let solver = SolverArgs {
            seed,
            ..args.solver.clone()
        };
        let (mut report, _) = solve_one(&instance, &solver)?;
        if args.no_timing {
            report.elapsed_ms = 0;
        }
        Ok(report)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| usage(e.to_string()))?;
    // par_iter keeps input order in the collected vector
    let results: Vec<Result<Report, Failure>> = pool.install(|| seeds.par_iter().map(|&s| job(s)).collect());
    let mut text = format!("{CSV_HEADER}\n");
    let mut code = EXIT_OK;
    for r in results {
        let report = r?;
        code = code.max(status_code(report.status));
        text.push_str(&report.csv_row());
        text.push('\n');
    }
    emit(out, args.out.as_deref(), &text)?;
    Ok(code)
}

/// Runs the command line with output going to the given streams; returns the exit code.
pub fn run_with(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version also arrive here, on stdout with status 0
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Brute(a) => cmd_brute(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Harness(a) => cmd_harness(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run(argv: Vec<String>) -> i32 {
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
