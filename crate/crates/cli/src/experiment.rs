//! Runs the seeds of one experiment and writes their reports.
//!
//! Output directory layout:
//!
//! * `run_<seed>.jsonl`: one record per front member, ascending complexity.
//! * `run_<seed>_generations.jsonl`: per-generation statistics.
//! * `aggregate.json`: configuration, per-run summaries and pooled stats.
//! * `summary.txt`: the `correct/almost/wrong` tally.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use unitgp_core::benchmarks::{generate, load_csv, Benchmark, Dataset};
use unitgp_core::dim_analysis::DimSummary;
use unitgp_core::evolution::{run, Front, RunConfig, RunResult};
use unitgp_core::expr::{parse, render, ExprTree};

use crate::classify::{Classifier, Verdict};
use crate::config::{DataSource, ExperimentConfig};
use crate::stats::{front_stats, FrontStats, RunMetrics};

/// One front member as exported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRecord {
    pub complexity: usize,
    pub mse: f64,
    pub spearman_support: f64,
    pub violations: f64,
    pub dim: Option<DimSummary>,
    pub n_constants: usize,
    pub equation: String,
}

impl FrontRecord {
    pub fn tree(&self) -> Result<ExprTree> {
        parse(&self.equation).with_context(|| format!("parsing `{}`", self.equation))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub front_file: Option<String>,
    pub generations: usize,
    pub elapsed_secs: f64,
    pub front_size: usize,
    pub pct_violating: f64,
    pub mean_constants: f64,
    pub verdict: Option<Verdict>,
    /// Front equation that earned the verdict.
    pub matched: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub correct: usize,
    pub almost: usize,
    pub wrong: usize,
}

impl Tally {
    pub fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Correct => self.correct += 1,
            Verdict::Almost => self.almost += 1,
            Verdict::Wrong => self.wrong += 1,
        }
    }

    pub fn correct_or_almost(&self) -> usize {
        self.correct + self.almost
    }
}

impl std::fmt::Display for Tally {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}/{}", self.correct, self.almost, self.wrong)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub data: String,
    pub benchmark: Option<Benchmark>,
    pub noise: Option<f64>,
    pub mode: String,
    pub budget: String,
    pub population_size: usize,
    pub runs: Vec<RunReport>,
    pub tally: Option<Tally>,
    pub stats: Option<FrontStats>,
}

pub fn front_records(front: &Front) -> Vec<FrontRecord> {
    front
        .members
        .iter()
        .map(|m| FrontRecord {
            complexity: m.complexity(),
            mse: m.mse(),
            spearman_support: m.fit.spearman_support,
            violations: m.violations(),
            dim: m.dim.as_ref().map(DimSummary::from),
            n_constants: m.tree.n_constants(),
            equation: render(&m.tree),
        })
        .collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_front(path: &Path) -> Result<Vec<FrontRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{} line {}", path.display(), i + 1)))
        .collect()
}

fn load_data(cfg: &ExperimentConfig, seed: u64) -> Result<Dataset> {
    match &cfg.source {
        DataSource::Benchmark { spec, n_samples } => Ok(generate(spec, *n_samples, seed)),
        DataSource::Csv(path) => Ok(load_csv(path)?),
    }
}

pub fn run_config(cfg: &ExperimentConfig, seed: u64) -> RunConfig {
    let mut rc = RunConfig::new(cfg.mode, cfg.budget, seed);
    rc.population_size = cfg.population_size;
    rc.max_complexity = cfg.max_complexity;
    rc.threads = cfg.threads;
    rc.stall_generations = cfg.stall_generations;
    if let DataSource::Benchmark { spec, .. } = &cfg.source {
        rc.functions = spec.benchmark.function_set();
    }
    rc
}

/// Runs one seed and writes its front and generation files.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64, classifier: Option<&Classifier>) -> Result<(RunReport, RunResult)> {
    let data = load_data(cfg, seed)?;
    let result = run(&run_config(cfg, seed), &data)?;
    let records = front_records(&result.front);
    let front_file = format!("run_{seed}.jsonl");
    write_jsonl(&cfg.out_dir.join(&front_file), &records)?;
    write_jsonl(&cfg.out_dir.join(format!("run_{seed}_generations.jsonl")), &result.stats)?;
    let (verdict, matched) = match classifier {
        Some(c) => {
            let (v, idx) = c.classify_front(result.front.members.iter().map(|m| &m.tree));
            (Some(v), idx.map(|i| records[i].equation.clone()))
        }
        None => (None, None),
    };
    let report = RunReport {
        seed,
        front_file: Some(front_file),
        generations: result.generations,
        elapsed_secs: result.elapsed.as_secs_f64(),
        front_size: result.front.len(),
        pct_violating: result.front.pct_violating(),
        mean_constants: result.front.mean_constants(),
        verdict,
        matched,
        error: None,
    };
    Ok((report, result))
}

/// Runs every seed, writes per-run files, `aggregate.json` and `summary.txt`.
/// A failing seed is recorded and the remaining seeds still run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    fs::create_dir_all(&cfg.out_dir).with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    // surface configuration problems once, before any run starts
    let probe = load_data(cfg, cfg.first_seed)?;
    run_config(cfg, cfg.first_seed).validate(&probe)?;

    let benchmark = match &cfg.source {
        DataSource::Benchmark { spec, .. } => Some(spec.benchmark),
        DataSource::Csv(_) => None,
    };
    let classifier = benchmark.map(Classifier::new);
    let mut runs = Vec::with_capacity(cfg.seeds);
    for i in 0..cfg.seeds {
        let seed = cfg.first_seed + i as u64;
        match run_seed(cfg, seed, classifier.as_ref()) {
            Ok((report, _)) => runs.push(report),
            Err(e) => runs.push(RunReport {
                seed,
                front_file: None,
                generations: 0,
                elapsed_secs: 0.0,
                front_size: 0,
                pct_violating: 0.0,
                mean_constants: 0.0,
                verdict: None,
                matched: None,
                error: Some(format!("{e:#}")),
            }),
        }
    }
    let report = build_report(cfg, benchmark, runs);
    fs::write(cfg.out_dir.join("aggregate.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    fs::write(cfg.out_dir.join("summary.txt"), summary_text(&report))?;
    Ok(report)
}

fn build_report(cfg: &ExperimentConfig, benchmark: Option<Benchmark>, runs: Vec<RunReport>) -> ExperimentReport {
    let ok: Vec<&RunReport> = runs.iter().filter(|r| r.error.is_none()).collect();
    let tally = benchmark.map(|_| {
        let mut t = Tally::default();
        ok.iter().filter_map(|r| r.verdict).for_each(|v| t.add(v));
        t
    });
    let metrics: Vec<RunMetrics> = ok.iter().map(|r| metrics_of(r)).collect();
    let (data, noise) = match &cfg.source {
        DataSource::Benchmark { spec, .. } => (spec.benchmark.to_string(), Some(spec.noise)),
        DataSource::Csv(p) => (p.display().to_string(), None),
    };
    ExperimentReport {
        data,
        benchmark,
        noise,
        mode: cfg.mode.to_string(),
        budget: cfg.budget.to_string(),
        population_size: cfg.population_size,
        stats: (!metrics.is_empty()).then(|| front_stats(&metrics)),
        tally,
        runs,
    }
}

pub fn metrics_of(r: &RunReport) -> RunMetrics {
    RunMetrics {
        seed: r.seed,
        front_size: r.front_size,
        pct_violating: r.pct_violating,
        mean_constants: r.mean_constants,
        generations: r.generations,
    }
}

pub fn summary_text(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let noise = report.noise.map_or_else(|| "-".to_string(), |n| format!("{:.0}%", n * 100.0));
    s.push_str("data\tmode\tnoise\tcorrect/almost/wrong\tmedian front\tviolating %\tmean constants\n");
    let tally = report.tally.as_ref().map_or_else(|| "n/a".to_string(), Tally::to_string);
    let (size, viol, consts) = match &report.stats {
        Some(st) => (
            format!("{}", st.front_size.median),
            format!("{:.1}", st.pct_violating.mean),
            format!("{:.2}", st.mean_constants.mean),
        ),
        None => ("-".into(), "-".into(), "-".into()),
    };
    s.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", report.data, report.mode, noise, tally, size, viol, consts));
    let failed: Vec<String> = report
        .runs
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("seed {}: {e}", r.seed)))
        .collect();
    if !failed.is_empty() {
        s.push_str("\nfailed runs:\n");
        for f in failed {
            s.push_str(&f);
            s.push('\n');
        }
    }
    if report.tally.is_some() {
        s.push_str("\n`almost` means the shape matches after removing at most two surplus constants.\n");
    }
    s
}

/// Collects `aggregate.json` files from experiment directories.
pub fn load_reports(dirs: &[PathBuf]) -> Result<Vec<ExperimentReport>> {
    dirs.iter()
        .map(|d| {
            let p = if d.is_dir() { d.join("aggregate.json") } else { d.clone() };
            let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}
