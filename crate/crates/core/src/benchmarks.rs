//! Datasets: the five empirical-law generators, additive noise, and CSV
//! files with a unit header row.

use std::fmt;
use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{DataError, ParseError};
use crate::expr::{parse, ExprTree};
use crate::units::{OpKind, UnitVector};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetUnits {
    pub features: Vec<UnitVector>,
    pub target: UnitVector,
}

/// Named feature columns and a target column, optionally unit-annotated.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub units: Option<DatasetUnits>,
    /// Feature-major storage: `columns[j][i]` is feature `j` of sample `i`.
    columns: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        target_name: String,
        columns: Vec<Vec<f64>>,
        targets: Vec<f64>,
        units: Option<DatasetUnits>,
    ) -> Result<Self, ParseError> {
        if feature_names.len() != columns.len() {
            return Err(ParseError::new(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                columns.len()
            )));
        }
        if let Some(col) = columns.iter().find(|c| c.len() != targets.len()) {
            return Err(ParseError::new(format!(
                "feature column has {} samples, target has {}",
                col.len(),
                targets.len()
            )));
        }
        if let Some(u) = &units {
            if u.features.len() != columns.len() {
                return Err(ParseError::new(format!(
                    "{} feature units for {} features",
                    u.features.len(),
                    columns.len()
                )));
            }
        }
        Ok(Dataset { feature_names, target_name, units, columns, targets })
    }

    pub fn n_samples(&self) -> usize {
        self.targets.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn feature_units(&self) -> Option<&[UnitVector]> {
        self.units.as_ref().map(|u| u.features.as_slice())
    }

    pub fn target_unit(&self) -> Option<UnitVector> {
        self.units.as_ref().map(|u| u.target)
    }

    /// Same features with a different target vector.
    pub fn with_targets(&self, targets: Vec<f64>) -> Self {
        assert_eq!(targets.len(), self.targets.len());
        Dataset { targets, ..self.clone() }
    }

    /// Writes the dataset in the two-header-row CSV format read by [`load_csv`].
    pub fn write_csv(&self, path: &Path) -> Result<(), DataError> {
        let file = File::create(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })?;
        let mut w = csv::Writer::from_writer(file);
        let csv_err = |source| DataError::Csv { path: path.to_path_buf(), source };
        let mut names = self.feature_names.clone();
        names.push(self.target_name.clone());
        w.write_record(&names).map_err(csv_err)?;
        if let Some(u) = &self.units {
            let mut row: Vec<String> = u.features.iter().map(ToString::to_string).collect();
            row.push(u.target.to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
        for i in 0..self.n_samples() {
            let mut row: Vec<String> = self.columns.iter().map(|c| format!("{:e}", c[i])).collect();
            row.push(format!("{:e}", self.targets[i]));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|source| DataError::Io { path: path.to_path_buf(), source })
    }
}

/// Reads a comma-separated file: a row of column names, a row of unit strings,
/// then numeric rows. The last column is the target.
///
/// If the second row is entirely numeric it is taken as data and the dataset
/// carries no units.
pub fn load_csv(path: &Path) -> Result<Dataset, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut records = reader.records();
    let p = || path.to_path_buf();
    let names = records
        .next()
        .ok_or(DataError::MissingHeader { path: p(), what: "name" })?
        .map_err(|source| DataError::Csv { path: p(), source })?;
    let names: Vec<String> = names.iter().map(str::to_string).collect();
    let width = names.len();
    if width < 2 {
        return Err(DataError::TooFewColumns { path: p(), found: width });
    }

    let mut body: Vec<(usize, csv::StringRecord)> = Vec::new();
    let mut units = None;
    for (k, rec) in records.enumerate() {
        let rec = rec.map_err(|source| DataError::Csv { path: p(), source })?;
        // file line numbers: names are line 1
        let line = k + 2;
        if k == 0 && !rec.iter().all(|c| parse_cell(c).is_some()) {
            if rec.len() != width {
                return Err(DataError::Ragged { path: p(), row: line, found: rec.len(), expected: width });
            }
            let mut parsed = Vec::with_capacity(width);
            for (column, cell) in rec.iter().enumerate() {
                let u = cell.parse::<UnitVector>().map_err(|e| DataError::BadUnit {
                    path: p(),
                    column: column + 1,
                    name: names[column].clone(),
                    message: e.message,
                })?;
                parsed.push(u);
            }
            let target = parsed.pop().expect("width >= 2");
            units = Some(DatasetUnits { features: parsed, target });
            continue;
        }
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        body.push((line, rec));
    }
    if body.is_empty() {
        return Err(DataError::Empty { path: p() });
    }

    let mut columns = vec![Vec::with_capacity(body.len()); width];
    for (line, rec) in &body {
        if rec.len() != width {
            return Err(DataError::Ragged { path: p(), row: *line, found: rec.len(), expected: width });
        }
        for (j, cell) in rec.iter().enumerate() {
            let v = parse_cell(cell).ok_or_else(|| DataError::NotNumeric {
                path: p(),
                row: *line,
                column: j + 1,
                name: names[j].clone(),
                cell: cell.to_string(),
            })?;
            columns[j].push(v);
        }
    }
    let targets = columns.pop().expect("width >= 2");
    let mut feature_names = names;
    let target_name = feature_names.pop().expect("width >= 2");
    Dataset::new(feature_names, target_name, columns, targets, units)
        .map_err(|e| DataError::BadUnit { path: p(), column: 0, name: String::new(), message: e.message })
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// The five empirical laws used for rediscovery experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Benchmark {
    Hubble,
    Kepler,
    Newton,
    IdealGas,
    Rydberg,
}

/// Hubble constant, 70 km/s/Mpc in 1/s.
pub const HUBBLE_H0: f64 = 70.0e3 / 3.0857e22;
/// Standard gravitational parameter of the sun, m^3/s^2.
pub const GM_SUN: f64 = 1.327e20;
pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const GRAVITATIONAL_G: f64 = 6.674e-11;
pub const GAS_R: f64 = 8.314;
pub const RYDBERG_RH: f64 = 1.0974e7;

/// Kepler period constant: `P[days] = KEPLER_K * a^(3/2)`.
pub fn kepler_k() -> f64 {
    2.0 * std::f64::consts::PI / GM_SUN.sqrt() / SECONDS_PER_DAY
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] =
        [Benchmark::Hubble, Benchmark::Kepler, Benchmark::Newton, Benchmark::IdealGas, Benchmark::Rydberg];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Hubble => "hubble",
            Benchmark::Kepler => "kepler",
            Benchmark::Newton => "newton",
            Benchmark::IdealGas => "idealgas",
            Benchmark::Rydberg => "rydberg",
        }
    }

    pub fn feature_names(self) -> &'static [&'static str] {
        match self {
            Benchmark::Hubble => &["D"],
            Benchmark::Kepler => &["a"],
            Benchmark::Newton => &["m1", "m2", "r"],
            Benchmark::IdealGas => &["n", "T", "V"],
            Benchmark::Rydberg => &["n1", "n2"],
        }
    }

    pub fn target_name(self) -> &'static str {
        match self {
            Benchmark::Hubble => "v",
            Benchmark::Kepler => "P",
            Benchmark::Newton => "F",
            Benchmark::IdealGas => "P",
            Benchmark::Rydberg => "lambda",
        }
    }

    /// Feature and target units. Kepler's period in days is carried on the
    /// seconds axis; the day scaling lives in the constant.
    pub fn units(self) -> DatasetUnits {
        let u = UnitVector::from_ints;
        let (features, target) = match self {
            Benchmark::Hubble => (vec![u([1, 0, 0, 0, 0, 0, 0])], u([1, 0, -1, 0, 0, 0, 0])),
            Benchmark::Kepler => (vec![u([1, 0, 0, 0, 0, 0, 0])], u([0, 0, 1, 0, 0, 0, 0])),
            Benchmark::Newton => (
                vec![u([0, 1, 0, 0, 0, 0, 0]), u([0, 1, 0, 0, 0, 0, 0]), u([1, 0, 0, 0, 0, 0, 0])],
                u([1, 1, -2, 0, 0, 0, 0]),
            ),
            Benchmark::IdealGas => (
                vec![u([0, 0, 0, 0, 0, 1, 0]), u([0, 0, 0, 0, 1, 0, 0]), u([3, 0, 0, 0, 0, 0, 0])],
                u([-1, 1, -2, 0, 0, 0, 0]),
            ),
            Benchmark::Rydberg => {
                (vec![UnitVector::dimensionless(), UnitVector::dimensionless()], u([1, 0, 0, 0, 0, 0, 0]))
            }
        };
        DatasetUnits { features, target }
    }

    /// Ground-truth law evaluated on one sample.
    pub fn closure(self, x: &[f64]) -> f64 {
        match self {
            Benchmark::Hubble => HUBBLE_H0 * x[0],
            Benchmark::Kepler => kepler_k() * (x[0] * x[0] * x[0]).sqrt(),
            Benchmark::Newton => GRAVITATIONAL_G * x[0] * x[1] / (x[2] * x[2]),
            Benchmark::IdealGas => x[0] * GAS_R * x[1] / x[2],
            Benchmark::Rydberg => 1.0 / (RYDBERG_RH * (1.0 / (x[0] * x[0]) - 1.0 / (x[1] * x[1]))),
        }
    }

    /// The law written with its physical constant as a fitted constant slot.
    pub fn ground_truth(self) -> ExprTree {
        let text = match self {
            Benchmark::Hubble => "(c0 * x0)",
            Benchmark::Kepler => "(c0 * sqrt(pow3(x0)))",
            Benchmark::Newton => "((c0 * (x0 * x1)) / pow2(x2))",
            Benchmark::IdealGas => "((c0 * (x0 * x1)) / x2)",
            Benchmark::Rydberg => "((c0 * (pow2(x0) * pow2(x1))) / (pow2(x1) - pow2(x0)))",
        };
        parse(text).expect("ground-truth expressions are well formed")
    }

    /// Function set for this benchmark family.
    pub fn function_set(self) -> Vec<OpKind> {
        empirical_function_set()
    }

    /// Permitted noise levels.
    pub fn noise_levels(self) -> &'static [f64] {
        match self {
            Benchmark::Rydberg => &[0.0, 0.01, 0.03],
            _ => &[0.0, 0.05, 0.10],
        }
    }

    fn sample_features(self, rng: &mut impl Rng) -> Vec<f64> {
        match self {
            Benchmark::Hubble => vec![log_uniform(rng, 1e22, 1e26)],
            Benchmark::Kepler => vec![log_uniform(rng, 5e10, 5e12)],
            Benchmark::Newton => vec![
                log_uniform(rng, 1e22, 1e30),
                log_uniform(rng, 1e22, 1e30),
                log_uniform(rng, 1e8, 1e12),
            ],
            Benchmark::IdealGas => vec![
                rng.random_range(0.1..=10.0),
                rng.random_range(100.0..=1000.0),
                rng.random_range(1e-3..=1.0),
            ],
            Benchmark::Rydberg => {
                let n1: u32 = rng.random_range(1..=5);
                let n2: u32 = rng.random_range(n1 + 1..=10);
                vec![n1 as f64, n2 as f64]
            }
        }
    }
}

/// `+ - * / exp log sqrt pow2 pow3`.
pub fn empirical_function_set() -> Vec<OpKind> {
    vec![
        OpKind::Add,
        OpKind::Sub,
        OpKind::Mul,
        OpKind::Div,
        OpKind::Exp,
        OpKind::Log,
        OpKind::Sqrt,
        OpKind::FixedPow(2),
        OpKind::FixedPow(3),
    ]
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace(['-', '_', ' '], "");
        Benchmark::ALL
            .into_iter()
            .find(|b| b.name() == key)
            .ok_or_else(|| ParseError::new(format!("unknown benchmark `{s}` (expected hubble, kepler, newton, idealgas or rydberg)")))
    }
}

/// A benchmark together with a permitted noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkSpec {
    pub benchmark: Benchmark,
    pub noise: f64,
}

impl BenchmarkSpec {
    pub fn new(benchmark: Benchmark, noise: f64) -> Result<Self, ParseError> {
        if !benchmark.noise_levels().iter().any(|l| (l - noise).abs() < 1e-12) {
            return Err(ParseError::new(format!(
                "noise level {noise} not permitted for {benchmark} (allowed: {:?})",
                benchmark.noise_levels()
            )));
        }
        Ok(BenchmarkSpec { benchmark, noise })
    }
}

/// Samples `n_samples` rows, evaluates the ground-truth law and adds noise.
pub fn generate(spec: &BenchmarkSpec, n_samples: usize, seed: u64) -> Dataset {
    assert!(n_samples >= 1, "need at least one sample");
    let b = spec.benchmark;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_features = b.feature_names().len();
    let mut columns = vec![Vec::with_capacity(n_samples); n_features];
    let mut clean = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let x = b.sample_features(&mut rng);
        clean.push(b.closure(&x));
        for (col, v) in columns.iter_mut().zip(x) {
            col.push(v);
        }
    }
    let targets = apply_noise(&clean, spec.noise, noise_seed(seed));
    Dataset::new(
        b.feature_names().iter().map(|s| s.to_string()).collect(),
        b.target_name().to_string(),
        columns,
        targets,
        Some(b.units()),
    )
    .expect("generated dataset is consistent")
}

fn noise_seed(seed: u64) -> u64 {
    seed ^ 0x6e6f_6973_6500_0001
}

/// Sample standard deviation (n - 1 denominator); zero for fewer than two values.
pub fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let ss: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
    (ss / (v.len() - 1) as f64).sqrt()
}

/// Adds `Normal(0, level * sample_std(targets))` noise to every target.
pub fn apply_noise(targets: &[f64], level: f64, seed: u64) -> Vec<f64> {
    assert!(level >= 0.0, "noise level must be non-negative");
    let sigma = level * sample_std(targets);
    if level == 0.0 || sigma == 0.0 {
        return targets.to_vec();
    }
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    targets.iter().map(|y| y + normal.sample(&mut rng)).collect()
}
