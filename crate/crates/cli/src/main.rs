use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use unitgp_cli::classify::Classifier;
use unitgp_cli::config::Settings;
use unitgp_cli::experiment::{load_reports, metrics_of, read_front, run_experiment};
use unitgp_cli::stats::front_stats;
use unitgp_core::benchmarks::{generate, Benchmark, BenchmarkSpec};
use unitgp_core::expr::parse;

#[derive(Parser)]
#[command(name = "unitgp", version, about = "Unit-aware genetic programming for symbolic regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment over several seeds and write reports.
    Run {
        /// Config file of `key = value` lines; flags take precedence.
        #[arg(long, env = "UNITGP_CONFIG")]
        config: Option<PathBuf>,
        #[command(flatten)]
        settings: Settings,
    },
    /// Write a benchmark dataset as CSV with a unit row.
    GenerateData {
        #[arg(long)]
        benchmark: Benchmark,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 100)]
        n_samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Classify equations or a front export against a benchmark.
    Classify {
        #[arg(long)]
        benchmark: Benchmark,
        /// Front export (`run_<seed>.jsonl`).
        #[arg(long)]
        front: Option<PathBuf>,
        /// Equation text, e.g. `(c0[2.5] * x0)`; repeatable.
        #[arg(long = "equation")]
        equations: Vec<String>,
    },
    /// Pool front statistics over experiment directories.
    Stats {
        /// Experiment output directories or aggregate.json files.
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run { config, settings } => {
            let base = match &config {
                Some(path) => Settings::from_file(path)?,
                None => Settings::default(),
            };
            let cfg = base.overlay(settings).resolve()?;
            if cfg.threads == Some(1) && matches!(cfg.budget, unitgp_core::evolution::Budget::Time(_)) {
                eprintln!("note: time budgets make generation counts, and so results, timing-dependent");
            }
            let report = run_experiment(&cfg)?;
            print!("{}", unitgp_cli::experiment::summary_text(&report));
            eprintln!("reports written to {}", cfg.out_dir.display());
            let failed = report.runs.iter().filter(|r| r.error.is_some()).count();
            Ok(if failed == report.runs.len() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Command::GenerateData { benchmark, noise, n_samples, seed, output } => {
            let spec = BenchmarkSpec::new(benchmark, noise).context("--noise")?;
            if n_samples == 0 {
                bail!("--n-samples must be at least 1");
            }
            generate(&spec, n_samples, seed).write_csv(&output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { benchmark, front, equations } => {
            let mut trees = Vec::new();
            if let Some(path) = &front {
                for r in read_front(path)? {
                    trees.push((r.equation.clone(), r.tree()?));
                }
            }
            for e in &equations {
                trees.push((e.clone(), parse(e).with_context(|| format!("--equation `{e}`"))?));
            }
            if trees.is_empty() {
                bail!("nothing to classify: pass --front or --equation");
            }
            let c = Classifier::new(benchmark);
            let mut best = unitgp_cli::classify::Verdict::Wrong;
            for (text, tree) in &trees {
                let v = c.classify(tree);
                best = best.max(v.verdict);
                println!("{}\t{}", v.verdict, text);
            }
            println!("front verdict: {best}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { dirs } => {
            let reports = load_reports(&dirs)?;
            let metrics: Vec<_> = reports
                .iter()
                .flat_map(|r| r.runs.iter().filter(|x| x.error.is_none()).map(metrics_of))
                .collect();
            if metrics.is_empty() {
                bail!("no completed runs in the given reports");
            }
            println!("{}", serde_json::to_string_pretty(&front_stats(&metrics))?);
            Ok(ExitCode::SUCCESS)
        }
    }
}
