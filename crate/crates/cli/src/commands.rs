use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, Context};
use aspp_core::instances::{generate_grid, CostMode, GeneratorConfig, ImpededMode};
use aspp_core::labeling::DominanceRule;
use aspp_core::solvers::validate_solution;
use aspp_core::{solve, Algorithm, Budget, Instance, SolveError, SolverOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, Class1Config, Class2Config, Class3Config, CompareConfig};
use crate::verify::{run_verify, VerifyConfig};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "aspp", version, about = "Assisted shortest path solvers and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance file.
    Solve(SolveArgs),
    /// Write a seeded grid instance.
    Generate(GenerateArgs),
    /// Run an experiment sweep and write CSV tables.
    Bench(BenchArgs),
    /// Cross-check both solvers against the brute-force oracle.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AlgoArg {
    Gpla,
    GplaStar,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::Gpla => Algorithm::Gpla,
            AlgoArg::GplaStar => Algorithm::GplaStar,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "gpla-star")]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = 900)]
    pub timeout_s: u64,
    /// Stop after this many extended labels.
    #[arg(long)]
    pub max_extended: Option<u64>,
    /// Solution file; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CostModeArg {
    Ranged,
    Fixed,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, conflicts_with = "cuts", required_unless_present = "cuts")]
    pub impeded_fraction: Option<f64>,
    #[arg(long)]
    pub cuts: Option<usize>,
    #[arg(long, value_enum, default_value = "ranged")]
    pub cost_mode: CostModeArg,
    /// Service vehicle start; random when omitted.
    #[arg(long)]
    pub service_start: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Experiment {
    Compare,
    Class1,
    Class2,
    Class3,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// Full-size sweep instead of the desk-scale default.
    #[arg(long)]
    pub full: bool,
    /// Instances per configuration.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Per-run wall-clock limit.
    #[arg(long)]
    pub timeout_s: Option<u64>,
    /// Per-run extended-label limit, independent of machine speed.
    #[arg(long)]
    pub max_extended: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FaultArg {
    /// Drop the service-time comparison from dominance.
    IgnoreServiceTimes,
    /// Compare only the two clocks in dominance.
    ClocksOnly,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Oracle walk length bound; defaults to |V| + 2|K| per instance.
    #[arg(long)]
    pub bound: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub timeout_s: u64,
    /// Write the per-instance report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run with a deliberately broken dominance rule.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Generate(args) => run_generate(args),
        Command::Bench(args) => run_bench(args),
        Command::Verify(args) => run_verify_cmd(args),
    }
}

fn invalid(err: impl Into<anyhow::Error>) -> CliError {
    CliError::InvalidInput(err.into())
}

fn run_solve(args: SolveArgs) -> Result<(), CliError> {
    let inst = Instance::read(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))
        .map_err(invalid)?;
    let options = SolverOptions {
        budget: Budget { timeout: Duration::from_secs(args.timeout_s), max_extended: args.max_extended },
        ..Default::default()
    };
    let sol = match solve(&inst, args.algo.into(), &options) {
        Ok(sol) => sol,
        Err(err @ SolveError::Timeout { .. }) => return Err(CliError::Timeout(err.to_string())),
        Err(err) => return Err(anyhow::Error::from(err).into()),
    };
    validate_solution(&inst, &sol)
        .map_err(|err| CliError::VerificationFailed(format!("solution failed validation: {err}")))?;
    match args.out {
        Some(path) => sol.write(&path).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{}", sol.to_json()),
    }
    eprintln!("cost {} ({} extended, {:.1} ms)", sol.total_cost, sol.stats.extended, sol.stats.elapsed_ms);
    Ok(())
}

fn run_generate(args: GenerateArgs) -> Result<(), CliError> {
    let impeded = match (args.impeded_fraction, args.cuts) {
        (Some(f), None) => ImpededMode::Fraction(f),
        (None, Some(c)) => ImpededMode::Cuts(c),
        _ => return Err(invalid(anyhow!("give exactly one of --impeded-fraction and --cuts"))),
    };
    let cost = match args.cost_mode {
        CostModeArg::Ranged => CostMode::Ranged,
        CostModeArg::Fixed => CostMode::Fixed,
    };
    let mut config = GeneratorConfig::new(args.rows, args.cols, args.seed, impeded, cost);
    if let Some(q) = args.service_start {
        config.service_start = aspp_core::instances::ServiceStart::Vertex(q);
    }
    let inst = generate_grid(&config).map_err(invalid)?;
    inst.write(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

fn print_table<T: serde::Serialize>(rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(std::io::stdout());
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn apply_overrides(n: &mut usize, seed: &mut u64, limits: &mut bench::RunLimits, args: &BenchArgs) {
    if let Some(v) = args.n {
        *n = v;
    }
    *seed = args.seed;
    if let Some(t) = args.timeout_s {
        limits.timeout = Duration::from_secs(t);
    }
    if args.max_extended.is_some() {
        limits.max_extended = args.max_extended;
    }
}

fn out_file(dir: &Path, name: impl Display) -> PathBuf {
    dir.join(format!("{name}.csv"))
}

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))
        .map_err(invalid)?;
    let dir = args.out_dir.as_path();
    match args.experiment {
        Experiment::Compare => {
            let mut cfg = if args.full { CompareConfig::full() } else { CompareConfig::desk() };
            apply_overrides(&mut cfg.n, &mut cfg.base_seed, &mut cfg.limits, &args);
            let pairs = bench::compare_instances(&cfg)?;
            let runs: Vec<_> = pairs.iter().flat_map(|p| [p.gpla.clone(), p.gpla_star.clone()]).collect();
            let summary = bench::compare_summary(&cfg, &pairs);
            bench::write_csv(&out_file(dir, "compare_runs"), &runs)?;
            bench::write_csv(&out_file(dir, "compare_summary"), &summary)?;
            print_table(&summary)?;
        }
        Experiment::Class1 => {
            let mut cfg = if args.full { Class1Config::full() } else { Class1Config::desk() };
            apply_overrides(&mut cfg.n, &mut cfg.base_seed, &mut cfg.limits, &args);
            let runs = bench::class1_instances(&cfg)?;
            let summary = bench::class1_summary(&cfg, &runs);
            bench::write_csv(&out_file(dir, "class1_runs"), &runs)?;
            bench::write_csv(&out_file(dir, "class1_summary"), &summary)?;
            print_table(&summary)?;
        }
        Experiment::Class2 => {
            let mut cfg = if args.full { Class2Config::full() } else { Class2Config::desk() };
            apply_overrides(&mut cfg.n, &mut cfg.base_seed, &mut cfg.limits, &args);
            let runs = bench::class2_instances(&cfg)?;
            let summary = bench::class2_summary(&cfg, &runs);
            bench::write_csv(&out_file(dir, "class2_runs"), &runs)?;
            bench::write_csv(&out_file(dir, "class2_summary"), &summary)?;
            print_table(&summary)?;
        }
        Experiment::Class3 => {
            let mut cfg = if args.full { Class3Config::full() } else { Class3Config::desk() };
            apply_overrides(&mut cfg.n, &mut cfg.base_seed, &mut cfg.limits, &args);
            let runs = bench::class3_instances(&cfg)?;
            let summary = bench::class3_summary(&cfg, &runs);
            bench::write_csv(&out_file(dir, "class3_runs"), &runs)?;
            bench::write_csv(&out_file(dir, "class3_summary"), &summary)?;
            print_table(&summary)?;
        }
    }
    Ok(())
}

fn run_verify_cmd(args: VerifyArgs) -> Result<(), CliError> {
    let config = VerifyConfig {
        n: args.n,
        bound: args.bound,
        base_seed: args.seed,
        timeout: Duration::from_secs(args.timeout_s),
        dominance: match args.inject_fault {
            None => DominanceRule::Full,
            Some(FaultArg::IgnoreServiceTimes) => DominanceRule::IgnoreServiceTimes,
            Some(FaultArg::ClocksOnly) => DominanceRule::ClocksOnly,
        },
    };
    let report = run_verify(&config)?;
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&report).context("serializing report")?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    for case in report.cases.iter().filter(|c| !c.agrees()) {
        eprintln!(
            "instance {} ({}x{}, f={}, seed {}): {}",
            case.index,
            case.rows,
            case.cols,
            case.fraction,
            case.seed,
            case.problem.as_deref().unwrap_or_default()
        );
    }
    println!("{}/{} instances agree", report.agreeing(), report.cases.len());
    if report.all_agree() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "{} of {} instances disagree",
            report.cases.len() - report.agreeing(),
            report.cases.len()
        )))
    }
}
