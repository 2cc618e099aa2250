//! `mhpp` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or other runtime error, 2 usage or
//! instance-generation error, 3 infeasible instance, 4 time limit hit with
//! no solution, 5 solution rejected by `validate`.

mod bench;
mod explore;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mhpp::gridmap::AgentClass;
use mhpp::instance::io::{load_instance, read_map, InstanceFile};
use mhpp::instance::{generate_random_instance, validate_solution, GoalMode};
use mhpp::peaf::SolveStatus;
use mhpp::{Instance, SolverReport};

pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_TIMEOUT: u8 = 4;
pub const EXIT_INVALID: u8 = 5;

/// Error carrying a specific exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    Failure { code: EXIT_USAGE, message: message.into() }.into()
}

#[derive(Parser)]
#[command(name = "mhpp", version, about = "Heterogeneous multi-robot path planning and exploration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random instance on a MovingAI map.
    Gen(GenArgs),
    /// Solve an instance and write a solver report.
    Solve(SolveArgs),
    /// Check a solver report against its instance.
    Validate(ValidateArgs),
    /// Run a seed sweep over maps and algorithms and write a CSV table.
    Bench(bench::BenchArgs),
    /// Run exploration episodes from a scenario file.
    Explore(explore::ExploreArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 60 nodes, 3 GV + 3 AV.
    SettingA,
    /// 150 nodes, 10 GV + 10 AV.
    SettingB,
    /// 20 nodes, 2 GV + 2 AV.
    Desk,
}

impl Preset {
    pub fn shape(self) -> (usize, usize, usize) {
        match self {
            Preset::SettingA => (60, 3, 3),
            Preset::SettingB => (150, 10, 10),
            Preset::Desk => (20, 2, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::SettingA => "setting-a",
            Preset::SettingB => "setting-b",
            Preset::Desk => "desk",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Goals {
    /// Every agent returns to its start cell.
    Return,
    /// Goals are sampled separately from starts.
    Distinct,
}

impl From<Goals> for GoalMode {
    fn from(g: Goals) -> Self {
        match g {
            Goals::Return => GoalMode::ReturnToStart,
            Goals::Distinct => GoalMode::Distinct,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// MovingAI map file.
    #[arg(long)]
    map: PathBuf,
    /// Sizes from a preset; explicit --nodes/--gv/--av override it.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    gv: Option<usize>,
    #[arg(long)]
    av: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Goals::Return)]
    goals: Goals,
    /// Instance JSON to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Peaf,
    B1,
    B2,
    Oracle,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Peaf => "peaf",
            Algo::B1 => "b1",
            Algo::B2 => "b2",
            Algo::Oracle => "oracle",
        }
    }
}

/// Solver settings shared by `solve` and `bench`.
#[derive(Args, Clone, Debug)]
pub struct SolverOpts {
    /// Wall-clock budget for peaf, in milliseconds.
    #[arg(long)]
    pub time_limit_ms: Option<u64>,
    /// Expansion budget for peaf; unlike a time limit this is reproducible.
    #[arg(long)]
    pub expansions: Option<u64>,
    #[arg(long, default_value_t = 0.5)]
    pub eps0: f64,
    /// Factor applied to eps after every incumbent.
    #[arg(long, default_value_t = 0.5)]
    pub eps_decay: f64,
    #[arg(long)]
    pub no_dominance: bool,
    #[arg(long)]
    pub no_post_opt: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Peaf)]
    algo: Algo,
    #[command(flatten)]
    solver: SolverOpts,
    /// Report JSON; defaults to `<instance>.<algo>.json` next to the instance.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Solver report JSON.
    #[arg(long)]
    report: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Bench(a) => bench::cmd_bench(a),
        Command::Explore(a) => explore::cmd_explore(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.downcast_ref::<Failure>().map_or(EXIT_RUNTIME, |f| f.code))
        }
    }
}

/// Map path as stored in an instance written to `out`: relative to the
/// output directory when the map lives below it, absolute otherwise.
fn map_reference(map: &Path, out: &Path) -> Result<String> {
    let map = map.canonicalize().with_context(|| format!("reading map {}", map.display()))?;
    let dir = match out.parent().filter(|p| !p.as_os_str().is_empty()) {
        Some(p) => p.canonicalize().with_context(|| format!("output directory {}", p.display()))?,
        None => std::env::current_dir()?,
    };
    let shown = map.strip_prefix(&dir).unwrap_or(&map);
    Ok(shown.to_string_lossy().into_owned())
}

pub fn fleet(gv: usize, av: usize) -> Vec<(AgentClass, usize)> {
    vec![(AgentClass::ground_vehicle(), gv), (AgentClass::aerial_vehicle(), av)]
}

fn cmd_gen(a: GenArgs) -> Result<u8> {
    let (pn, pg, pa) = a.preset.map_or((0, 0, 0), Preset::shape);
    let nodes = a.nodes.unwrap_or(pn);
    let (gv, av) = (a.gv.unwrap_or(pg), a.av.unwrap_or(pa));
    if nodes == 0 {
        return Err(usage("--nodes must be positive (or pick a --preset)"));
    }
    if gv + av == 0 {
        return Err(usage("need at least one agent (--gv/--av or --preset)"));
    }
    let grid = read_map(&a.map)?;
    let inst: Instance = generate_random_instance(&grid, nodes, &fleet(gv, av), a.seed, a.goals.into())
        .map_err(|e| usage(format!("generation failed: {e}")))?;
    let file = InstanceFile::from_instance(&inst, &map_reference(&a.map, &a.out)?)?;
    file.write(&a.out)?;
    println!("wrote {} ({nodes} nodes, {gv} GV + {av} AV, seed {})", a.out.display(), a.seed);
    Ok(0)
}

fn default_report_path(instance: &Path, algo: Algo) -> PathBuf {
    let stem = instance.file_stem().map_or("instance".into(), |s| s.to_string_lossy().into_owned());
    instance.with_file_name(format!("{stem}.{}.json", algo.name()))
}

fn cmd_solve(a: SolveArgs) -> Result<u8> {
    let inst: Instance = load_instance(&a.instance)?;
    let report = run::solve(&inst, a.algo, &a.solver)?;
    let out = a.out.unwrap_or_else(|| default_report_path(&a.instance, a.algo));
    std::fs::write(&out, report.to_json()).with_context(|| format!("writing {}", out.display()))?;
    match &report.best {
        Some(sol) => {
            println!("algo:        {}", a.algo.name());
            println!("status:      {}", run::status_name(report.status));
            println!("makespan:    {}", sol.makespan);
            println!("total:       {}", sol.total);
            println!("time to best: {:.1} ms", report.time_to_best_ms().unwrap_or(0.0));
            println!("report:      {}", out.display());
            Ok(0)
        }
        None if report.status == SolveStatus::NoSolution => {
            eprintln!("no solution within the budget; report written to {}", out.display());
            Ok(EXIT_TIMEOUT)
        }
        None => {
            eprintln!("instance is infeasible; report written to {}", out.display());
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<u8> {
    let inst: Instance = load_instance(&a.instance)?;
    let text = std::fs::read_to_string(&a.report).with_context(|| format!("reading {}", a.report.display()))?;
    let report: SolverReport = serde_json::from_str(&text).with_context(|| format!("parsing {}", a.report.display()))?;
    let Some(sol) = report.best else {
        eprintln!("report holds no solution");
        return Ok(EXIT_INVALID);
    };
    match validate_solution(&inst, &sol) {
        Ok(makespan) if makespan == sol.makespan => {
            println!("valid: makespan {makespan}");
            Ok(0)
        }
        Ok(makespan) => {
            eprintln!("invalid: report claims makespan {} but paths cost {makespan}", sol.makespan);
            Ok(EXIT_INVALID)
        }
        Err(v) => {
            eprintln!("invalid: {v}");
            Ok(EXIT_INVALID)
        }
    }
}

pub fn time_limit(opts: &SolverOpts) -> Option<Duration> {
    opts.time_limit_ms.map(Duration::from_millis)
}
