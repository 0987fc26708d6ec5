//! Aggregate front metrics across seeds.

use serde::{Deserialize, Serialize};

/// Front metrics of one finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub seed: u64,
    pub front_size: usize,
    pub pct_violating: f64,
    pub mean_constants: f64,
    pub generations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub values: Vec<f64>,
    pub median: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: Vec<f64>) -> Summary {
        if values.is_empty() {
            return Summary { values, median: f64::NAN, mean: f64::NAN, min: f64::NAN, max: f64::NAN };
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
        Summary {
            mean: values.iter().sum::<f64>() / n as f64,
            median,
            min: sorted[0],
            max: sorted[n - 1],
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontStats {
    pub runs: Vec<RunMetrics>,
    pub front_size: Summary,
    pub pct_violating: Summary,
    pub mean_constants: Summary,
    /// Generations divided by the smallest generation count among `runs`.
    pub normalized_generations: Summary,
}

/// Pools per-seed metrics. Generation counts are normalized by the minimum
/// over all given runs, so pass every run of one dataset together.
pub fn front_stats(runs: &[RunMetrics]) -> FrontStats {
    let min_gen = runs.iter().map(|r| r.generations).min().unwrap_or(0).max(1) as f64;
    let col = |f: &dyn Fn(&RunMetrics) -> f64| Summary::of(runs.iter().map(f).collect());
    FrontStats {
        front_size: col(&|r| r.front_size as f64),
        pct_violating: col(&|r| r.pct_violating),
        mean_constants: col(&|r| r.mean_constants),
        normalized_generations: col(&|r| r.generations as f64 / min_gen),
        runs: runs.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(front_size: usize, pct: f64, generations: usize) -> RunMetrics {
        RunMetrics { seed: 0, front_size, pct_violating: pct, mean_constants: 1.0, generations }
    }

    #[test]
    fn sizes_and_median() {
        let s = front_stats(&[m(3, 0.0, 10), m(5, 0.0, 10)]);
        assert_eq!(s.front_size.values, vec![3.0, 5.0]);
        assert_eq!(s.front_size.median, 4.0);
        assert_eq!(s.pct_violating.max, 0.0);
    }

    #[test]
    fn generations_normalized_by_minimum() {
        let s = front_stats(&[m(1, 0.0, 100), m(1, 0.0, 150)]);
        assert_eq!(s.normalized_generations.values, vec![1.0, 1.5]);
    }

    #[test]
    fn odd_median_and_mean() {
        let s = Summary::of(vec![5.0, 1.0, 3.0]);
        assert_eq!((s.median, s.mean, s.min, s.max), (3.0, 3.0, 1.0, 5.0));
        assert!(Summary::of(vec![]).median.is_nan());
    }
}
