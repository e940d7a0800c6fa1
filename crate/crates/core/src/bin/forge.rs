use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use forge_core::feedback::CentroidSet;
use forge_core::ideation::Problem;
use forge_core::orchestrator::report::{self, write_json};
use forge_core::orchestrator::{
    run_campaign, BuiltinEvaluator, CampaignConfig, EvaluatorConfig, Evaluator, ProcessSpawner, SandboxEvaluator,
    SolutionStore, TraceMetrics, CONFIG_SNAPSHOT,
};
use forge_core::trace::SuiteSpec;

#[derive(Parser)]
#[command(name = "forge", version, about = "Policy ideation and evaluation workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace suites.
    Traces {
        #[command(subcommand)]
        command: TracesCommand,
    },
    /// Native baseline heuristics.
    Baselines {
        #[command(subcommand)]
        command: BaselinesCommand,
    },
    /// Run or resume an ideation campaign.
    Ideate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Diversity, cluster and cost reports for a store.
    Analyze {
        #[arg(long)]
        store: PathBuf,
        /// Centroid set written by `baselines run`.
        #[arg(long)]
        centroids: Option<PathBuf>,
        /// Defaults to the store's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Post-campaign evaluation reports.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Subcommand)]
enum TracesCommand {
    /// Write a suite (builtin name or directory) to a directory.
    Gen {
        #[arg(long)]
        suite: SuiteSpec,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum BaselinesCommand {
    /// Evaluate every baseline on a suite and write their centroids.
    Run {
        #[arg(long)]
        problem: Problem,
        #[arg(long)]
        suite: SuiteSpec,
        #[arg(long, default_value_t = 0.10)]
        capacity_fraction: f64,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        /// Centroid JSON output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Rank ok solutions and re-evaluate the best on the evaluation suite.
    Top {
        #[arg(long)]
        store: PathBuf,
        #[arg(short, default_value_t = 5)]
        k: usize,
        /// Campaign config; defaults to the snapshot next to the store.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        eval_suite: Option<SuiteSpec>,
        /// Defaults to `top.json` next to the store.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn store_dir(store: &Path) -> PathBuf {
    store.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

fn traces_gen(suite: &SuiteSpec, out: &Path) -> Result<()> {
    let s = suite.load().context("loading suite")?;
    s.write_dir(out).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {} traces of suite {} to {}", s.len(), s.id, out.display());
    Ok(())
}

fn baselines_run(problem: Problem, suite: &SuiteSpec, fraction: f64, jobs: usize, out: Option<&Path>) -> Result<()> {
    let s = suite.load().context("loading suite")?;
    let runs = report::baseline_policies(problem);
    let results = report::run_baselines(problem, &s, fraction, jobs)?;
    println!("suite {} ({} traces)", s.id, s.len());
    for ((name, _), (_, ev)) in runs.iter().zip(&results) {
        let e = ev.embedding.as_ref().expect("ok baseline");
        let detail = match (problem, ev.per_trace.first()) {
            (Problem::Cache, _) => format!("avg miss ratio {:.4}", report::loss(e)),
            (Problem::Binpack, Some(TraceMetrics::Pack(_))) => {
                let bins: u64 = ev
                    .per_trace
                    .iter()
                    .map(|m| match m {
                        TraceMetrics::Pack(p) => p.bins_used,
                        TraceMetrics::Cache(_) => 0,
                    })
                    .sum();
                format!("avg bins {:.2}  avg lb/bins {:.4}", bins as f64 / ev.per_trace.len() as f64, e.mean())
            }
            _ => String::new(),
        };
        println!("  {name:<20} {detail}");
    }
    if let Some(out) = out {
        write_json(out, &report::centroids_of(&s.id, &results))?;
        println!("centroids written to {}", out.display());
    }
    Ok(())
}

fn ideate(config: &Path) -> Result<()> {
    let cfg = CampaignConfig::load(config)?;
    let store = run_campaign(&cfg)?;
    let ok = store.ok_records().count();
    println!("{} records ({ok} ok) in {}", store.len(), store.path().display());
    let problems = store.audit(Some(&cfg.feedback_spec().load()?.id));
    if !problems.is_empty() {
        bail!("store audit failed:\n{}", problems.join("\n"));
    }
    Ok(())
}

fn analyze(store: &Path, centroids: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let s = SolutionStore::load(store)?;
    let c: Option<CentroidSet> = centroids
        .map(|p| -> Result<CentroidSet> {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .transpose()?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| store_dir(store));
    let a = report::analyze(&s, c.as_ref(), &out)?;
    print!("{}", a.summary());
    Ok(())
}

fn report_top(store: &Path, k: usize, config: Option<&Path>, eval_suite: Option<SuiteSpec>, out: Option<&Path>) -> Result<()> {
    let s = SolutionStore::load(store)?;
    let cfg_path = config
        .map(Path::to_path_buf)
        .unwrap_or_else(|| store_dir(store).join(CONFIG_SNAPSHOT));
    let cfg = CampaignConfig::load(&cfg_path).with_context(|| "report top needs the campaign config")?;
    let suite = eval_suite.unwrap_or_else(|| cfg.eval_spec()).load()?;
    let evaluator: Box<dyn Evaluator> = match &cfg.evaluator {
        EvaluatorConfig::Builtin => Box::new(BuiltinEvaluator {
            capacity_fraction: cfg.capacity_fraction,
            jobs: cfg.jobs,
        }),
        EvaluatorConfig::Sandbox { command, work_dir } => Box::new(SandboxEvaluator {
            spawner: ProcessSpawner { command: command.clone() },
            work_dir: work_dir.clone().unwrap_or_else(|| cfg.out_dir.join("sandbox")),
            capacity_fraction: cfg.capacity_fraction,
            limits: cfg.limits,
            jobs: cfg.jobs,
        }),
    };
    let t = report::top(&s, k, cfg.problem, &suite, evaluator.as_ref(), cfg.capacity_fraction, cfg.jobs)?;
    let out = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| store_dir(store).join(report::TOP_FILE));
    write_json(&out, &t)?;
    println!("top {} on {} vs {} (loss {:.4})", t.entries.len(), t.eval_suite, t.baseline, t.baseline_loss);
    for e in &t.entries {
        match (e.eval_loss, e.reduction) {
            (Some(l), Some(r)) => println!("  {:>2}. {}  feedback {:.4}  eval {l:.4}  reduction {:+.2}%", e.rank, e.id, e.feedback_loss, r * 100.0),
            _ => println!("  {:>2}. {}  feedback {:.4}  {}", e.rank, e.id, e.feedback_loss, e.error.as_deref().unwrap_or("")),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Traces { command: TracesCommand::Gen { suite, out } } => traces_gen(suite, out),
        Command::Baselines {
            command: BaselinesCommand::Run { problem, suite, capacity_fraction, jobs, out },
        } => baselines_run(*problem, suite, *capacity_fraction, *jobs, out.as_deref()),
        Command::Ideate { config } => ideate(config),
        Command::Analyze { store, centroids, out } => analyze(store, centroids.as_deref(), out.as_deref()),
        Command::Report {
            command: ReportCommand::Top { store, k, config, eval_suite, out },
        } => report_top(store, *k, config.as_deref(), eval_suite.clone(), out.as_deref()),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
