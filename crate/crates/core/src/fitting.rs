//! Constant estimation and the error/support objectives.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::Dataset;
use crate::expr::{evaluate_columns, ExprTree};

/// MSE assigned to individuals whose predictions are not finite.
pub const WORST_MSE: f64 = f64::MAX / 4.0;
/// Support objective assigned to non-finite predictions.
pub const WORST_SUPPORT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub constants: Vec<f64>,
    pub mse: f64,
    /// `1 - |spearman rho|` of predictions against targets.
    pub spearman_support: f64,
}

/// Budget of the multi-start damped least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Number of starts: the all-ones point, then random log-uniform points.
    pub starts: usize,
    pub max_iterations: usize,
    /// Stop once an accepted step improves the MSE by less than this fraction.
    pub tolerance: f64,
    /// Log10 range of the random start magnitudes.
    pub start_exponent_range: (f64, f64),
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            starts: 3,
            max_iterations: 100,
            tolerance: 1e-10,
            start_exponent_range: (-12.0, 12.0),
        }
    }
}

/// Mean squared error; [`WORST_MSE`] if any prediction is not finite.
pub fn mse(predictions: &[f64], targets: &[f64]) -> f64 {
    debug_assert_eq!(predictions.len(), targets.len());
    if predictions.iter().any(|p| !p.is_finite()) || predictions.is_empty() {
        return WORST_MSE;
    }
    let sum: f64 = predictions.iter().zip(targets).map(|(p, t)| (p - t) * (p - t)).sum();
    let m = sum / predictions.len() as f64;
    if m.is_finite() {
        m.min(WORST_MSE)
    } else {
        WORST_MSE
    }
}

/// Ranks starting at 1, ties receive the mean of their positions.
fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

/// Spearman rank correlation with average-rank ties; zero when either side
/// is constant.
pub fn spearman_rho(predictions: &[f64], targets: &[f64]) -> f64 {
    pearson(&average_ranks(predictions), &average_ranks(targets))
}

/// `1 - |rho|`, in `[0, 1]`; [`WORST_SUPPORT`] for non-finite predictions.
pub fn spearman_support(predictions: &[f64], targets: &[f64]) -> f64 {
    if predictions.iter().any(|p| !p.is_finite()) {
        return WORST_SUPPORT;
    }
    1.0 - spearman_rho(predictions, targets).abs()
}

/// Fits the constants of `tree` to `data` with the default budget.
pub fn fit_constants<R: Rng + ?Sized>(tree: &ExprTree, data: &Dataset, rng: &mut R) -> FitResult {
    fit_constants_with(tree, data, &FitOptions::default(), rng)
}

/// Fits the constants of `tree` by minimizing the MSE.
///
/// Each start runs a Levenberg-Marquardt iteration with forward-difference
/// sensitivities; the best start wins. The input tree is not modified.
pub fn fit_constants_with<R: Rng + ?Sized>(
    tree: &ExprTree,
    data: &Dataset,
    opts: &FitOptions,
    rng: &mut R,
) -> FitResult {
    let problem = Problem { tree, data };
    let k = tree.n_constants();
    if k == 0 {
        let pred = problem.predict(&[]);
        return FitResult {
            constants: Vec::new(),
            mse: mse(&pred, data.targets()),
            spearman_support: spearman_support(&pred, data.targets()),
        };
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in 0..opts.starts.max(1) {
        let c0: Vec<f64> = if start == 0 {
            vec![1.0; k]
        } else {
            let (lo, hi) = opts.start_exponent_range;
            (0..k)
                .map(|_| {
                    let mag = 10f64.powf(rng.random_range(lo..=hi));
                    if rng.random::<bool>() {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect()
        };
        let (c, cost) = levenberg_marquardt(&problem, c0, opts);
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((c, cost));
        }
    }
    let (constants, cost) = best.expect("at least one start");
    let pred = problem.predict(&constants);
    FitResult {
        spearman_support: spearman_support(&pred, data.targets()),
        mse: cost,
        constants,
    }
}

/// Runs one damped least-squares descent starting from the constants already
/// stored in `tree`.
pub fn refine_constants(tree: &ExprTree, data: &Dataset, opts: &FitOptions) -> FitResult {
    let problem = Problem { tree, data };
    let (constants, mse) = if tree.n_constants() == 0 {
        (Vec::new(), problem.cost(&[]).1)
    } else {
        levenberg_marquardt(&problem, tree.constants().to_vec(), opts)
    };
    let pred = problem.predict(&constants);
    FitResult { spearman_support: spearman_support(&pred, data.targets()), mse, constants }
}

struct Problem<'a> {
    tree: &'a ExprTree,
    data: &'a Dataset,
}

impl Problem<'_> {
    fn predict(&self, c: &[f64]) -> Vec<f64> {
        evaluate_columns(self.tree.root(), c, self.data.columns(), self.data.n_samples())
    }

    fn cost(&self, c: &[f64]) -> (Vec<f64>, f64) {
        let pred = self.predict(c);
        let m = mse(&pred, self.data.targets());
        (pred, m)
    }
}

fn levenberg_marquardt(p: &Problem<'_>, mut c: Vec<f64>, opts: &FitOptions) -> (Vec<f64>, f64) {
    let k = c.len();
    let n = p.data.n_samples();
    let y = p.data.targets();
    let (mut pred, mut cost) = p.cost(&c);
    if cost >= WORST_MSE {
        return (c, WORST_MSE);
    }
    let mut lambda = 1e-3;
    let mut jac = vec![vec![0.0; n]; k];

    for _ in 0..opts.max_iterations {
        // forward-difference sensitivities
        for j in 0..k {
            let h = if c[j] == 0.0 { 1.5e-8 } else { 1.5e-8 * c[j].abs() };
            let mut cj = c.clone();
            cj[j] += h;
            let step = cj[j] - c[j];
            let pj = p.predict(&cj);
            for i in 0..n {
                jac[j][i] = (pj[i] - pred[i]) / step;
            }
        }
        if jac.iter().flatten().any(|v| !v.is_finite()) {
            break;
        }

        // normal equations, Jacobi-scaled
        let mut a = vec![vec![0.0; k]; k];
        let mut g = vec![0.0; k];
        for r in 0..k {
            for s in r..k {
                let v: f64 = jac[r].iter().zip(&jac[s]).map(|(x, z)| x * z).sum();
                a[r][s] = v;
                a[s][r] = v;
            }
            g[r] = jac[r].iter().zip(pred.iter().zip(y)).map(|(x, (pr, t))| x * (pr - t)).sum();
        }
        if a.iter().flatten().chain(&g).any(|v| !v.is_finite()) {
            break;
        }
        let scale: Vec<f64> = (0..k).map(|j| if a[j][j] > 0.0 { a[j][j].sqrt() } else { 1.0 }).collect();
        for r in 0..k {
            g[r] /= scale[r];
            for s in 0..k {
                a[r][s] /= scale[r] * scale[s];
            }
        }

        let mut accepted = None;
        for _ in 0..12 {
            let mut m = a.clone();
            for (j, row) in m.iter_mut().enumerate() {
                row[j] += lambda * (1.0 + row[j]);
            }
            let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            if let Some(delta) = solve(m, rhs) {
                let trial: Vec<f64> = c.iter().zip(&delta).zip(&scale).map(|((ci, d), s)| ci + d / s).collect();
                let (tp, tc) = p.cost(&trial);
                if tc < cost {
                    accepted = Some((trial, tp, tc));
                    lambda = (lambda / 10.0).max(1e-15);
                    break;
                }
            }
            lambda *= 10.0;
        }
        let Some((trial, tp, tc)) = accepted else { break };
        let improvement = cost - tc;
        c = trial;
        pred = tp;
        cost = tc;
        if improvement <= opts.tolerance * (cost + improvement) || cost == 0.0 {
            break;
        }
    }
    (c, cost)
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
