//! Experiment configuration: defaults, a flat `key = value` file, then
//! command-line flags (or their `UNITGP_*` environment variables).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;

use unitgp_core::benchmarks::{Benchmark, BenchmarkSpec};
use unitgp_core::evolution::{Budget, Mode};

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Benchmark { spec: BenchmarkSpec, n_samples: usize },
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub mode: Mode,
    pub seeds: usize,
    /// Seed of the first run; run `i` uses `first_seed + i`.
    pub first_seed: u64,
    pub budget: Budget,
    pub population_size: usize,
    pub max_complexity: usize,
    pub threads: Option<usize>,
    pub stall_generations: Option<usize>,
    pub out_dir: PathBuf,
}

/// Settings accepted on the command line and in config files. Every field
/// is optional so that layers can be merged.
#[derive(Debug, Clone, Default, Args)]
pub struct Settings {
    /// Built-in benchmark (hubble, kepler, newton, idealgas, rydberg).
    #[arg(long, env = "UNITGP_BENCHMARK")]
    pub benchmark: Option<Benchmark>,
    /// CSV dataset with a unit row below the header.
    #[arg(long, env = "UNITGP_DATASET")]
    pub dataset: Option<PathBuf>,
    /// baseline, culling, repair or multiobjective.
    #[arg(long, env = "UNITGP_MODE")]
    pub mode: Option<Mode>,
    /// Relative noise level for benchmark data.
    #[arg(long, env = "UNITGP_NOISE")]
    pub noise: Option<f64>,
    /// Number of independent runs.
    #[arg(long, env = "UNITGP_SEEDS")]
    pub seeds: Option<usize>,
    /// Seed of the first run.
    #[arg(long, env = "UNITGP_SEED")]
    pub seed: Option<u64>,
    /// Per-run budget: `120s` or `500g`.
    #[arg(long, env = "UNITGP_BUDGET")]
    pub budget: Option<Budget>,
    /// Population size.
    #[arg(long = "pop", env = "UNITGP_POP")]
    pub population_size: Option<usize>,
    #[arg(long, env = "UNITGP_MAX_COMPLEXITY")]
    pub max_complexity: Option<usize>,
    /// Samples generated for benchmark data.
    #[arg(long, env = "UNITGP_N_SAMPLES")]
    pub n_samples: Option<usize>,
    #[arg(long, env = "UNITGP_THREADS")]
    pub threads: Option<usize>,
    /// Single-threaded evaluation.
    #[arg(long, env = "UNITGP_DETERMINISTIC", num_args = 0..=1, default_missing_value = "true")]
    pub deterministic: Option<bool>,
    /// Stop a run once the front has not improved for this many generations.
    #[arg(long = "stall", env = "UNITGP_STALL")]
    pub stall_generations: Option<usize>,
    #[arg(long, env = "UNITGP_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| anyhow::anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

impl Settings {
    /// Reads a config file of `key = value` lines; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Settings::parse_text(&text).with_context(|| format!("in config file {}", path.display()))
    }

    pub fn parse_text(text: &str) -> Result<Settings> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`", lineno + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let r: Result<()> = (|| {
                match key {
                    "benchmark" => s.benchmark = Some(parse_value(key, value)?),
                    "dataset" => s.dataset = Some(PathBuf::from(value)),
                    "mode" => s.mode = Some(parse_value(key, value)?),
                    "noise" => s.noise = Some(parse_value(key, value)?),
                    "seeds" => s.seeds = Some(parse_value(key, value)?),
                    "seed" => s.seed = Some(parse_value(key, value)?),
                    "budget" => s.budget = Some(parse_value(key, value)?),
                    "population_size" => s.population_size = Some(parse_value(key, value)?),
                    "max_complexity" => s.max_complexity = Some(parse_value(key, value)?),
                    "n_samples" => s.n_samples = Some(parse_value(key, value)?),
                    "threads" => s.threads = Some(parse_value(key, value)?),
                    "deterministic" => s.deterministic = Some(parse_value(key, value)?),
                    "stall_generations" => s.stall_generations = Some(parse_value(key, value)?),
                    "out_dir" => s.out_dir = Some(PathBuf::from(value)),
                    _ => bail!("unknown key `{key}`"),
                }
                Ok(())
            })();
            r.with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(s)
    }

    /// Fields set in `top` win over those in `self`.
    pub fn overlay(self, top: Settings) -> Settings {
        Settings {
            benchmark: top.benchmark.or(self.benchmark),
            dataset: top.dataset.or(self.dataset),
            mode: top.mode.or(self.mode),
            noise: top.noise.or(self.noise),
            seeds: top.seeds.or(self.seeds),
            seed: top.seed.or(self.seed),
            budget: top.budget.or(self.budget),
            population_size: top.population_size.or(self.population_size),
            max_complexity: top.max_complexity.or(self.max_complexity),
            n_samples: top.n_samples.or(self.n_samples),
            threads: top.threads.or(self.threads),
            deterministic: top.deterministic.or(self.deterministic),
            stall_generations: top.stall_generations.or(self.stall_generations),
            out_dir: top.out_dir.or(self.out_dir),
        }
    }

    pub fn resolve(self) -> Result<ExperimentConfig> {
        let source = match (self.benchmark, self.dataset) {
            (Some(_), Some(_)) => bail!("--benchmark and --dataset are mutually exclusive"),
            (None, None) => bail!("no data: set --benchmark or --dataset"),
            (Some(b), None) => {
                let noise = self.noise.unwrap_or(0.0);
                let spec = BenchmarkSpec::new(b, noise).map_err(|e| anyhow::anyhow!("--noise: {e}"))?;
                DataSource::Benchmark { spec, n_samples: self.n_samples.unwrap_or(100) }
            }
            (None, Some(path)) => {
                if self.noise.is_some() {
                    bail!("--noise only applies to --benchmark data");
                }
                DataSource::Csv(path)
            }
        };
        let Some(mode) = self.mode else {
            bail!("no mode: set --mode (baseline, culling, repair or multiobjective)");
        };
        let threads = if self.deterministic.unwrap_or(false) { Some(1) } else { self.threads };
        if threads == Some(0) {
            bail!("--threads must be at least 1");
        }
        let seeds = self.seeds.unwrap_or(5);
        if seeds == 0 {
            bail!("--seeds must be at least 1");
        }
        Ok(ExperimentConfig {
            source,
            mode,
            seeds,
            first_seed: self.seed.unwrap_or(1),
            budget: self.budget.unwrap_or(Budget::Time(std::time::Duration::from_secs(120))),
            population_size: self.population_size.unwrap_or(500),
            max_complexity: self.max_complexity.unwrap_or(30),
            threads,
            stall_generations: self.stall_generations,
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("unitgp-out")),
        })
    }
}
