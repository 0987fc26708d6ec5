//! NSGA-II genetic programming loop with the unit-violation handling modes.
//!
//! * `Baseline` ignores units during selection.
//! * `Culling` drops offspring with violations before they are fitted.
//! * `Repair` inserts balancing constants into every offspring.
//! * `MultiObjective` adds the violation magnitude as a fourth objective.

mod front;
mod nsga;

pub use front::{extract_front, Front};
pub use nsga::{crowding_distance, dominates, nondominated_sort};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{empirical_function_set, Dataset};
use crate::dim_analysis::{analyze, repair, DimReport};
use crate::error::{ConfigError, ParseError};
use crate::expr::{random_tree, vary, ExprTree, OperatorRates, TreeConfig};
use crate::fitting::{fit_constants_with, FitOptions, FitResult};
use crate::units::UnitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Baseline,
    Culling,
    Repair,
    MultiObjective,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Baseline, Mode::Culling, Mode::Repair, Mode::MultiObjective];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::Culling => "culling",
            Mode::Repair => "repair",
            Mode::MultiObjective => "multiobjective",
        }
    }

    pub fn n_objectives(self) -> usize {
        if self == Mode::MultiObjective {
            4
        } else {
            3
        }
    }

    pub fn uses_units(self) -> bool {
        self != Mode::Baseline
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace(['-', '_'], "");
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| {
                ParseError::new(format!(
                    "invalid mode `{s}` (expected baseline, culling, repair or multiobjective)"
                ))
            })
    }
}

/// Stopping rule, checked between generations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Time(Duration),
    Generations(usize),
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Time(d) => write!(f, "{}s", d.as_secs_f64()),
            Budget::Generations(g) => write!(f, "{g}g"),
        }
    }
}

impl FromStr for Budget {
    type Err = ParseError;

    /// `120s` for wall-clock seconds, `500g` for generations.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseError::new(format!("invalid budget `{s}` (expected e.g. 120s or 500g)"));
        if let Some(g) = s.strip_suffix('g') {
            return g.parse().map(Budget::Generations).map_err(|_| bad());
        }
        if let Some(secs) = s.strip_suffix('s') {
            let v: f64 = secs.parse().map_err(|_| bad())?;
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad());
            }
            return Ok(Budget::Time(Duration::from_secs_f64(v)));
        }
        Err(bad())
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub population_size: usize,
    pub max_complexity: usize,
    pub functions: Vec<crate::units::OpKind>,
    pub budget: Budget,
    pub seed: u64,
    pub rates: OperatorRates,
    pub fit: FitOptions,
    /// Stop early once no complexity level of the first front has improved
    /// its best MSE for this many generations.
    pub stall_generations: Option<usize>,
    /// Relative MSE decrease that counts as an improvement for stall detection.
    pub stall_tolerance: f64,
    /// Worker threads for fitting; `Some(1)` runs everything on the caller's
    /// thread.
    pub threads: Option<usize>,
    /// Variation attempts per offspring slot before culling/repair falls back
    /// to fresh random valid trees.
    pub oversampling: usize,
}

impl RunConfig {
    pub fn new(mode: Mode, budget: Budget, seed: u64) -> Self {
        RunConfig {
            mode,
            population_size: 500,
            max_complexity: 30,
            functions: empirical_function_set(),
            budget,
            seed,
            rates: OperatorRates::default(),
            fit: FitOptions::default(),
            stall_generations: None,
            stall_tolerance: 1e-6,
            threads: None,
            oversampling: 5,
        }
    }

    pub fn validate(&self, data: &Dataset) -> Result<(), ConfigError> {
        if self.population_size < 10 {
            return Err(ConfigError::PopulationTooSmall(self.population_size));
        }
        if self.max_complexity == 0 {
            return Err(ConfigError::ZeroComplexity);
        }
        if self.functions.is_empty() {
            return Err(ConfigError::EmptyFunctionSet);
        }
        if let Some(op) = self.functions.iter().find(|op| matches!(op, crate::units::OpKind::FixedPow(k) if *k < 2)) {
            return Err(ConfigError::BadOperator(format!("{op:?}")));
        }
        if !self.rates.is_valid() {
            return Err(ConfigError::BadOperatorRates);
        }
        if self.mode.uses_units() && data.units.is_none() {
            return Err(ConfigError::MissingUnits(self.mode.to_string()));
        }
        if data.n_features() == 0 {
            return Err(ConfigError::NoFeatures);
        }
        if matches!(self.budget, Budget::Generations(0)) || self.budget == Budget::Time(Duration::ZERO) {
            return Err(ConfigError::Budget);
        }
        Ok(())
    }
}

/// A fitted member of the population.
#[derive(Debug, Clone)]
pub struct Individual {
    /// Tree with its fitted constant values.
    pub tree: ExprTree,
    pub fit: FitResult,
    /// Unit analysis; `None` for Baseline individuals until reported.
    pub dim: Option<DimReport>,
    /// `[mse, complexity, spearman_support]`, plus violations in
    /// MultiObjective mode.
    pub objectives: Vec<f64>,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    pub fn complexity(&self) -> usize {
        self.tree.complexity()
    }

    pub fn mse(&self) -> f64 {
        self.fit.mse
    }

    /// Violation magnitude, zero when not analyzed.
    pub fn violations(&self) -> f64 {
        self.dim.map_or(0.0, |d| d.violations_f64())
    }
}

/// Per-generation summary of the first front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub front_size: usize,
    pub best_mse: f64,
    pub pct_violating: f64,
    pub mean_constants: f64,
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub mode: Mode,
    pub front: Front,
    pub population: Vec<Individual>,
    pub stats: Vec<GenerationStats>,
    /// Generations evolved after the initial population.
    pub generations: usize,
    pub elapsed: Duration,
}

struct Candidate {
    tree: ExprTree,
    dim: Option<DimReport>,
    seed: u64,
}

struct Engine<'a> {
    cfg: &'a RunConfig,
    data: &'a Dataset,
    tree_cfg: TreeConfig,
    var_units: Vec<UnitVector>,
    target_unit: UnitVector,
}

impl Engine<'_> {
    /// Applies the mode's unit handling to a freshly varied tree. Returns
    /// `None` if the tree is discarded.
    fn admit(&self, tree: ExprTree, rng: &mut ChaCha8Rng) -> Option<Candidate> {
        let dim = match self.cfg.mode {
            Mode::Baseline => return Some(Candidate { tree, dim: None, seed: rng.random() }),
            Mode::Culling | Mode::MultiObjective => {
                let report = analyze(&tree, &self.var_units, &self.target_unit, rng);
                if self.cfg.mode == Mode::Culling && !report.is_valid() {
                    return None;
                }
                report
            }
            Mode::Repair => {
                let fixed = repair(&tree, &self.var_units, &self.target_unit, self.cfg.max_complexity, rng).ok()?;
                let report = analyze(&fixed, &self.var_units, &self.target_unit, rng);
                debug_assert!(report.is_valid());
                return Some(Candidate { tree: fixed, dim: Some(report), seed: rng.random() });
            }
        };
        Some(Candidate { tree, dim: Some(dim), seed: rng.random() })
    }

    /// Random tree made valid by repair; used to keep culling and repair
    /// populations full.
    fn fresh_valid(&self, rng: &mut ChaCha8Rng) -> Candidate {
        loop {
            let t = random_tree(&self.tree_cfg, rng);
            let fixed = match self.cfg.mode {
                Mode::Culling | Mode::Repair => {
                    match repair(&t, &self.var_units, &self.target_unit, self.cfg.max_complexity, rng) {
                        Ok(f) => f,
                        Err(_) => continue,
                    }
                }
                _ => t,
            };
            if let Some(c) = self.admit(fixed, rng) {
                return c;
            }
        }
    }

    fn evaluate(&self, c: Candidate) -> Individual {
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        let fit = fit_constants_with(&c.tree, self.data, &self.cfg.fit, &mut rng);
        let tree = c.tree.with_constants(fit.constants.clone());
        let mut objectives = vec![fit.mse, tree.complexity() as f64, fit.spearman_support];
        if self.cfg.mode == Mode::MultiObjective {
            objectives.push(c.dim.map_or(0.0, |d| d.violations_f64()));
        }
        Individual { tree, fit, dim: c.dim, objectives, rank: 0, crowding: 0.0 }
    }

    fn evaluate_all(&self, batch: Vec<Candidate>) -> Vec<Individual> {
        if self.cfg.threads == Some(1) {
            batch.into_iter().map(|c| self.evaluate(c)).collect()
        } else {
            batch.into_par_iter().map(|c| self.evaluate(c)).collect()
        }
    }

    fn initial(&self, rng: &mut ChaCha8Rng) -> Vec<Candidate> {
        let n = self.cfg.population_size;
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0;
        while out.len() < n {
            if attempts >= self.cfg.oversampling * n {
                out.push(self.fresh_valid(rng));
                continue;
            }
            attempts += 1;
            let t = random_tree(&self.tree_cfg, rng);
            if let Some(c) = self.admit(t, rng) {
                out.push(c);
            }
        }
        out
    }

    fn offspring(&self, pop: &[Individual], rng: &mut ChaCha8Rng) -> Vec<Candidate> {
        let n = self.cfg.population_size;
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0;
        while out.len() < n {
            if attempts >= self.cfg.oversampling * n {
                out.push(self.fresh_valid(rng));
                continue;
            }
            attempts += 1;
            let a = tournament(pop, rng);
            let b = tournament(pop, rng);
            for child in vary(&pop[a].tree, &pop[b].tree, &self.tree_cfg, &self.cfg.rates, rng) {
                if out.len() == n {
                    break;
                }
                if let Some(c) = self.admit(child, rng) {
                    out.push(c);
                }
            }
        }
        out
    }
}

/// Binary tournament on (rank, crowding distance).
fn tournament(pop: &[Individual], rng: &mut ChaCha8Rng) -> usize {
    let a = rng.random_range(0..pop.len());
    let b = rng.random_range(0..pop.len());
    let (x, y) = (&pop[a], &pop[b]);
    if y.rank < x.rank || (y.rank == x.rank && y.crowding > x.crowding) {
        b
    } else {
        a
    }
}

/// Ranks `pool` and keeps the best `n` by front, then crowding distance.
/// Individuals whose objective vector repeats an earlier one are only used
/// when the distinct ones run out.
fn environmental_selection(pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    let mut seen = std::collections::HashSet::new();
    let (unique, dups): (Vec<_>, Vec<_>) = pool
        .into_iter()
        .partition(|ind| seen.insert(ind.objectives.iter().map(|v| v.to_bits()).collect::<Vec<_>>()));
    let mut selected = select_by_fronts(unique, n);
    if selected.len() < n {
        let rank_offset = selected.iter().map(|i| i.rank + 1).max().unwrap_or(0);
        let mut extra = select_by_fronts(dups, n - selected.len());
        for ind in &mut extra {
            ind.rank += rank_offset;
        }
        selected.extend(extra);
    }
    selected
}

fn select_by_fronts(pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    let objs: Vec<Vec<f64>> = pool.iter().map(|i| i.objectives.clone()).collect();
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    let mut out = Vec::with_capacity(n);
    for (rank, front) in nondominated_sort(&objs).into_iter().enumerate() {
        if out.len() >= n {
            break;
        }
        let refs: Vec<&[f64]> = front.iter().map(|&i| objs[i].as_slice()).collect();
        let dist = crowding_distance(&refs);
        let mut members: Vec<(usize, f64)> = front.into_iter().zip(dist).collect();
        if out.len() + members.len() > n {
            members.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            members.truncate(n - out.len());
        }
        for (i, d) in members {
            let mut ind = slots[i].take().expect("each index selected once");
            ind.rank = rank;
            ind.crowding = d;
            out.push(ind);
        }
    }
    out
}

/// Ranks and crowding distances for a population in place.
fn assign_ranks(pop: &mut [Individual]) {
    let objs: Vec<Vec<f64>> = pop.iter().map(|i| i.objectives.clone()).collect();
    for (rank, front) in nondominated_sort(&objs).into_iter().enumerate() {
        let refs: Vec<&[f64]> = front.iter().map(|&i| objs[i].as_slice()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&refs)) {
            pop[i].rank = rank;
            pop[i].crowding = d;
        }
    }
}

/// Runs the search until the budget is spent.
pub fn run(cfg: &RunConfig, data: &Dataset) -> Result<RunResult, ConfigError> {
    cfg.validate(data)?;
    match cfg.threads {
        Some(t) if t > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .expect("thread pool");
            Ok(pool.install(|| run_inner(cfg, data)))
        }
        _ => Ok(run_inner(cfg, data)),
    }
}

fn run_inner(cfg: &RunConfig, data: &Dataset) -> RunResult {
    let start = Instant::now();
    let (var_units, target_unit) = match &data.units {
        Some(u) => (u.features.clone(), u.target),
        None => (vec![UnitVector::Joker; data.n_features()], UnitVector::Joker),
    };
    let engine = Engine {
        cfg,
        data,
        tree_cfg: TreeConfig::new(data.n_features(), cfg.functions.clone(), cfg.max_complexity),
        var_units,
        target_unit,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let init = engine.initial(&mut rng);
    let mut population = engine.evaluate_all(init);
    population = environmental_selection(population, cfg.population_size);

    let mut stats = vec![engine.generation_stats(&population, 0, start)];
    let mut best_by_complexity = BTreeMap::new();
    let mut stalled = 0;
    update_archive(&population, &mut best_by_complexity, cfg.stall_tolerance);

    let mut generation = 0;
    loop {
        let done = match cfg.budget {
            Budget::Generations(g) => generation >= g,
            Budget::Time(limit) => start.elapsed() >= limit,
        };
        if done || cfg.stall_generations.is_some_and(|s| stalled >= s) {
            break;
        }
        generation += 1;
        assign_ranks(&mut population);
        let children = engine.offspring(&population, &mut rng);
        let mut pool = population;
        pool.extend(engine.evaluate_all(children));
        population = environmental_selection(pool, cfg.population_size);
        stats.push(engine.generation_stats(&population, generation, start));
        if update_archive(&population, &mut best_by_complexity, cfg.stall_tolerance) {
            stalled = 0;
        } else {
            stalled += 1;
        }
    }

    let mut report_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ REPORT_STREAM);
    let front = extract_front(&population, cfg.mode, |t| {
        analyze(t, &engine.var_units, &engine.target_unit, &mut report_rng)
    });
    RunResult {
        mode: cfg.mode,
        front,
        population,
        stats,
        generations: generation,
        elapsed: start.elapsed(),
    }
}

const REPORT_STREAM: u64 = 0x7265_706f_7274_0000;

impl Engine<'_> {
    fn generation_stats(&self, pop: &[Individual], generation: usize, start: Instant) -> GenerationStats {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ REPORT_STREAM ^ generation as u64);
        let front = extract_front(pop, self.cfg.mode, |t| {
            analyze(t, &self.var_units, &self.target_unit, &mut rng)
        });
        GenerationStats {
            generation,
            front_size: front.members.len(),
            best_mse: front.members.iter().map(|i| i.mse()).fold(f64::INFINITY, f64::min),
            pct_violating: front.pct_violating(),
            mean_constants: front.mean_constants(),
            elapsed_secs: start.elapsed().as_secs_f64(),
        }
    }
}

/// Records the best MSE per complexity among rank-0 individuals; true if any
/// level is new or improved by more than `tol` relative.
fn update_archive(pop: &[Individual], archive: &mut BTreeMap<usize, f64>, tol: f64) -> bool {
    let objs: Vec<Vec<f64>> = pop.iter().map(|i| i.objectives.clone()).collect();
    let Some(first) = nondominated_sort(&objs).into_iter().next() else {
        return false;
    };
    let mut improved = false;
    for i in first {
        let ind = &pop[i];
        let entry = archive.entry(ind.complexity()).or_insert_with(|| {
            improved = true;
            f64::INFINITY
        });
        if ind.mse() < *entry {
            if ind.mse() < *entry - tol * entry.abs() || !entry.is_finite() {
                improved = true;
            }
            *entry = ind.mse();
        }
    }
    improved
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{generate, Benchmark, BenchmarkSpec};
    use crate::expr::render;

    fn small(mode: Mode, gens: usize, seed: u64) -> RunConfig {
        let mut cfg = RunConfig::new(mode, Budget::Generations(gens), seed);
        cfg.population_size = 60;
        cfg.threads = Some(1);
        cfg
    }

    fn hubble() -> Dataset {
        generate(&BenchmarkSpec::new(Benchmark::Hubble, 0.0).unwrap(), 50, 1)
    }

    #[test]
    fn mode_and_budget_parse() {
        assert_eq!("multi-objective".parse::<Mode>().unwrap(), Mode::MultiObjective);
        assert_eq!("Culling".parse::<Mode>().unwrap(), Mode::Culling);
        assert!("pareto".parse::<Mode>().is_err());
        assert_eq!("120s".parse::<Budget>().unwrap(), Budget::Time(Duration::from_secs(120)));
        assert_eq!("500g".parse::<Budget>().unwrap(), Budget::Generations(500));
        assert!("12".parse::<Budget>().is_err());
        assert!("-1s".parse::<Budget>().is_err());
    }

    #[test]
    fn config_validation() {
        let d = hubble();
        let mut cfg = small(Mode::Culling, 1, 0);
        cfg.population_size = 5;
        assert_eq!(cfg.validate(&d), Err(ConfigError::PopulationTooSmall(5)));
        let cfg = small(Mode::Culling, 0, 0);
        assert_eq!(cfg.validate(&d), Err(ConfigError::Budget));
        let mut unitless = d.clone();
        unitless.units = None;
        assert!(matches!(small(Mode::Repair, 1, 0).validate(&unitless), Err(ConfigError::MissingUnits(_))));
        assert!(small(Mode::Baseline, 1, 0).validate(&unitless).is_ok());
    }

    #[test]
    fn culling_and_repair_populations_stay_valid() {
        let d = hubble();
        let u = d.units.clone().unwrap();
        for mode in [Mode::Culling, Mode::Repair] {
            let res = run(&small(mode, 8, 3), &d).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for ind in &res.population {
                assert!(ind.dim.unwrap().is_valid());
                assert!(analyze(&ind.tree, &u.features, &u.target, &mut rng).is_valid(), "{}", render(&ind.tree));
            }
            assert_eq!(res.population.len(), 60);
            assert!(res.front.members.iter().all(|m| m.violations() == 0.0));
        }
    }

    #[test]
    fn objective_counts_follow_mode() {
        let d = hubble();
        for mode in Mode::ALL {
            let res = run(&small(mode, 2, 1), &d).unwrap();
            assert!(res.population.iter().all(|i| i.objectives.len() == mode.n_objectives()));
            assert_eq!(res.population.iter().all(|i| i.dim.is_none()), mode == Mode::Baseline);
            // reporting attaches dims in every mode
            assert!(res.front.members.iter().all(|i| i.dim.is_some()));
        }
    }

    #[test]
    fn multiobjective_front_is_mutually_nondominated() {
        let res = run(&small(Mode::MultiObjective, 10, 4), &hubble()).unwrap();
        let objs: Vec<&Vec<f64>> = res.front.members.iter().map(|m| &m.objectives).collect();
        for a in &objs {
            for b in &objs {
                assert!(!dominates(a, b));
            }
        }
    }

    #[test]
    fn deterministic_single_threaded() {
        let d = hubble();
        let a = run(&small(Mode::MultiObjective, 5, 9), &d).unwrap();
        let b = run(&small(Mode::MultiObjective, 5, 9), &d).unwrap();
        let ra: Vec<String> = a.front.members.iter().map(|m| render(&m.tree)).collect();
        let rb: Vec<String> = b.front.members.iter().map(|m| render(&m.tree)).collect();
        assert_eq!(ra, rb);
    }

    #[test]
    fn parallel_matches_sequential() {
        let d = hubble();
        let mut par = small(Mode::Repair, 4, 2);
        par.threads = Some(2);
        let a = run(&small(Mode::Repair, 4, 2), &d).unwrap();
        let b = run(&par, &d).unwrap();
        let ra: Vec<String> = a.front.members.iter().map(|m| render(&m.tree)).collect();
        let rb: Vec<String> = b.front.members.iter().map(|m| render(&m.tree)).collect();
        assert_eq!(ra, rb);
    }

    #[test]
    fn elitism_per_complexity() {
        // the best MSE among trees no more complex than c never gets worse
        let d = generate(&BenchmarkSpec::new(Benchmark::Kepler, 0.05).unwrap(), 50, 2);
        let cfg = small(Mode::Baseline, 1, 6);
        let data = &d;
        let mut prev: Option<Vec<f64>> = None;
        for gens in 1..=6 {
            let mut c = cfg.clone();
            c.budget = Budget::Generations(gens);
            let res = run(&c, data).unwrap();
            let best: Vec<f64> = (1..=30)
                .map(|cap| {
                    res.population
                        .iter()
                        .filter(|i| i.complexity() <= cap)
                        .map(|i| i.mse())
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            if let Some(p) = &prev {
                for (now, before) in best.iter().zip(p) {
                    assert!(now <= before, "{now} > {before}");
                }
            }
            prev = Some(best);
        }
    }

    #[test]
    fn stall_stops_early() {
        let mut cfg = small(Mode::Culling, 10_000, 5);
        cfg.stall_generations = Some(3);
        let res = run(&cfg, &hubble()).unwrap();
        assert!(res.generations < 10_000);
        assert_eq!(res.stats.len(), res.generations + 1);
    }

    #[test]
    fn selection_prefers_lower_fronts() {
        let mk = |o: Vec<f64>| Individual {
            tree: crate::expr::parse("x0").unwrap(),
            fit: FitResult { constants: vec![], mse: o[0], spearman_support: o[2] },
            dim: None,
            objectives: o,
            rank: 0,
            crowding: 0.0,
        };
        let pool = vec![
            mk(vec![3.0, 3.0, 0.0]),
            mk(vec![1.0, 1.0, 0.0]),
            mk(vec![1.0, 1.0, 0.0]),
            mk(vec![2.0, 2.0, 0.0]),
        ];
        let kept = environmental_selection(pool, 3);
        let firsts: Vec<f64> = kept.iter().map(|i| i.objectives[0]).collect();
        // the duplicate (1,1) only comes back after every distinct vector
        assert_eq!(firsts, vec![1.0, 2.0, 3.0]);
    }
}
