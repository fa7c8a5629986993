use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use dca_harness::generate::{gen_instance, Family, GenParams};
use dca_harness::instance::{parse_prediction, Instance, ProblemKind};
use dca_harness::learn::{run_learning_experiment, write_loss_csv, LearnConfig, Sequence};
use dca_harness::run::{project_for_instance, project_onto_system, solve_instance, SOLVE_CSV_HEADER};
use dca_harness::sweep::{parse_ks, run_warmstart_sweep, write_sweep_csv, Noise, SweepConfig};
use dca_warmstart::descent::StepKind;
use dca_warmstart::lnat::LNatSystem;

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "DCAWS_THREADS";

#[derive(Parser)]
#[command(name = "dcaws", version, about = "Warm-started discrete convex minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance as JSON.
    Gen(GenArgs),
    /// Solve an instance, optionally from a predicted point.
    Solve(SolveArgs),
    /// Project a point onto an L♮ system or an instance's domain and round it.
    Project(ProjectArgs),
    /// Warm-start from noisy optima and record iteration counts as CSV.
    WarmstartSweep(SweepArgs),
    /// Learn a prediction online over a sequence of instances.
    Learn(LearnArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Step {
    Unit,
    Long,
}

impl From<Step> for StepKind {
    fn from(s: Step) -> Self {
        match s {
            Step::Unit => StepKind::Unit,
            Step::Long => StepKind::Long,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: ProblemKind,
    /// Matching: total vertex count. Matroid: ground-set size. Energy: vertices.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "random")]
    family: Family,
    #[arg(long, default_value_t = 10)]
    max_weight: i64,
    #[arg(long, default_value_t = 5)]
    labels: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// JSON array, or an object with a `p_hat` array. Defaults to zero.
    #[arg(long)]
    prediction: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "unit")]
    step: Step,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ProjectArgs {
    /// An L♮ system (`n`, `alpha`, `beta`, `gamma`) or a typed instance.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    point: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    kind: ProblemKind,
    #[arg(long)]
    n: usize,
    /// Comma-separated noise magnitudes.
    #[arg(long, default_value = "0,1,2,4,8,16")]
    k: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "unit")]
    step: Step,
    #[arg(long, value_enum, default_value = "integer")]
    noise: Noise,
    #[arg(long, default_value_t = 10)]
    max_weight: i64,
    #[arg(long, default_value_t = 5)]
    labels: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long, value_enum)]
    kind: ProblemKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Box radius. Defaults to the largest optimal coordinate in the sequence.
    #[arg(long = "radius")]
    c: Option<f64>,
    #[arg(long, value_enum, default_value = "iid")]
    sequence: Sequence,
    #[arg(long, default_value_t = 3)]
    noise: i64,
    #[arg(long, default_value_t = 20)]
    heldout: usize,
    #[arg(long, value_enum, default_value = "unit")]
    step: Step,
    #[arg(long, default_value_t = 10)]
    max_weight: i64,
    #[arg(long, default_value_t = 5)]
    labels: i64,
    /// Per-round loss CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Regret summary JSON; stderr when absent.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(io::BufWriter::new(fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn gen(a: GenArgs) -> Result<()> {
    let params = GenParams {
        family: a.family,
        max_weight: a.max_weight,
        labels: a.labels,
        ..GenParams::new(a.kind, a.n, a.seed)
    };
    let inst = gen_instance(&params)?;
    let mut out = sink(&a.out)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&inst.to_value())?)?;
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let inst = Instance::from_json(&read(&a.instance)?)?;
    let prediction = a.prediction.as_deref().map(read).transpose()?.map(|t| parse_prediction(&t)).transpose()?;
    let report = solve_instance(&inst, prediction.as_deref(), a.step.into())?;
    match a.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Csv => println!("{SOLVE_CSV_HEADER}\n{}", report.csv_row()),
    }
    Ok(())
}

fn project(a: ProjectArgs) -> Result<()> {
    let value: Value = serde_json::from_str(&read(&a.instance)?).context("instance file is not valid JSON")?;
    let point = parse_prediction(&read(&a.point)?)?;
    let report = if value.get("type").is_some() {
        project_for_instance(&Instance::from_value(value)?, &point)?
    } else {
        let system: LNatSystem = serde_json::from_value(value).context("invalid L♮ system")?;
        project_onto_system(&system, &point)?
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let cfg = SweepConfig {
        step: a.step.into(),
        noise: a.noise,
        max_weight: a.max_weight,
        labels: a.labels,
        ..SweepConfig::new(a.kind, a.n, parse_ks(&a.k)?, a.trials, a.seed)
    };
    let rows = run_warmstart_sweep(&cfg)?;
    write_sweep_csv(&rows, sink(&a.out)?)
}

fn learn(a: LearnArgs) -> Result<()> {
    let cfg = LearnConfig {
        c: a.c,
        sequence: a.sequence,
        noise: a.noise,
        heldout: a.heldout,
        step: a.step.into(),
        max_weight: a.max_weight,
        labels: a.labels,
        ..LearnConfig::new(a.kind, a.n, a.rounds, a.seed)
    };
    let report = run_learning_experiment(&cfg)?;
    write_loss_csv(&report.rows, sink(&a.out)?)?;
    let summary = serde_json::to_string_pretty(&report.summary)?;
    match &a.summary {
        Some(p) => fs::write(p, summary + "\n").with_context(|| format!("cannot write {}", p.display()))?,
        None => eprintln!("{summary}"),
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.parse().with_context(|| format!("{THREADS_VAR} must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Project(a) => project(a),
        Command::WarmstartSweep(a) => sweep(a),
        Command::Learn(a) => learn(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // solver failures exit 2; bad inputs and I/O exit 1
            let solver = e.chain().any(|c| c.downcast_ref::<dca_warmstart::Error>().is_some());
            ExitCode::from(if solver { 2 } else { 1 })
        }
    }
}
