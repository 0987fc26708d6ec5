//! Recovery classification of a Pareto front against a benchmark's known
//! equation.
//!
//! Two routes are tried for every front member and the better verdict wins:
//!
//! * Structural: both trees are rewritten into a canonical sum-of-products
//!   form where constant-only subtrees fold into one free constant, and the
//!   candidate is matched against the target allowing up to two surplus
//!   constants.
//! * Numeric: the candidate is refitted to noise-free data from the benchmark
//!   (and to a rescaled copy of it). If it reproduces both to round-off, the
//!   number of identifiable constants decides between correct and almost.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use unitgp_core::benchmarks::{generate, sample_std, Benchmark, BenchmarkSpec, Dataset};
use unitgp_core::expr::{evaluate, ExprNode, ExprTree};
use unitgp_core::fitting::{fit_constants_with, refine_constants, FitOptions};
use unitgp_core::OpKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Wrong,
    Almost,
    Correct,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Wrong => "wrong",
            Verdict::Almost => "almost",
            Verdict::Correct => "correct",
        })
    }
}

/// Surplus constants tolerated for an `almost` verdict.
pub const MAX_SURPLUS: u32 = 2;

/// Relative MSE (to the target variance) below which a refit counts as exact.
const EXACT_FIT: f64 = 1e-10;
/// Second target scaling used by the numeric route.
const RESCALE: f64 = 3.7;
const CHECK_SAMPLES: usize = 200;
const CHECK_SEED: u64 = 0x636c_6173_7369_6679;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Structural,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberVerdict {
    pub verdict: Verdict,
    /// Route that produced the verdict; `None` for `wrong`.
    pub route: Option<Route>,
    /// Surplus constants over the known equation.
    pub surplus: Option<u32>,
}

impl MemberVerdict {
    fn wrong() -> Self {
        MemberVerdict { verdict: Verdict::Wrong, route: None, surplus: None }
    }

    fn from_surplus(surplus: u32, route: Route) -> Self {
        let verdict = match surplus {
            0 => Verdict::Correct,
            s if s <= MAX_SURPLUS => Verdict::Almost,
            _ => return Self::wrong(),
        };
        MemberVerdict { verdict, route: Some(route), surplus: Some(surplus) }
    }
}

pub struct Classifier {
    benchmark: Benchmark,
    target: Shape,
    target_constants: usize,
    clean: Dataset,
    rescaled: Dataset,
}

impl Classifier {
    /// Builds the classifier and checks that the known equation classifies
    /// as correct through both routes.
    pub fn new(benchmark: Benchmark) -> Self {
        let truth = benchmark.ground_truth();
        let target = canonical(&truth).expect("ground truth canonicalizes");
        let clean = generate(&BenchmarkSpec::new(benchmark, 0.0).expect("noise-free spec"), CHECK_SAMPLES, CHECK_SEED);
        let rescaled = clean.with_targets(clean.targets().iter().map(|y| y * RESCALE).collect());
        let c = Classifier { benchmark, target, target_constants: truth.n_constants(), clean, rescaled };
        for route in [c.structural(&truth), c.numeric(&truth)] {
            assert_eq!(route.verdict, Verdict::Correct, "{benchmark}: known equation not recognized");
        }
        c
    }

    pub fn benchmark(&self) -> Benchmark {
        self.benchmark
    }

    pub fn classify(&self, tree: &ExprTree) -> MemberVerdict {
        let s = self.structural(tree);
        if s.verdict == Verdict::Correct {
            return s;
        }
        let n = self.numeric(tree);
        if n.verdict > s.verdict {
            n
        } else {
            s
        }
    }

    /// Best verdict over a front, with the index of the member achieving it.
    pub fn classify_front<'a>(&self, trees: impl IntoIterator<Item = &'a ExprTree>) -> (Verdict, Option<usize>) {
        let mut best = (Verdict::Wrong, None);
        for (i, t) in trees.into_iter().enumerate() {
            let v = self.classify(t).verdict;
            if v > best.0 {
                best = (v, Some(i));
                if v == Verdict::Correct {
                    break;
                }
            }
        }
        best
    }

    pub fn structural(&self, tree: &ExprTree) -> MemberVerdict {
        match canonical(tree).and_then(|s| match_shape(&s, &self.target)) {
            Some(surplus) => MemberVerdict::from_surplus(surplus, Route::Structural),
            None => MemberVerdict::wrong(),
        }
    }

    pub fn numeric(&self, tree: &ExprTree) -> MemberVerdict {
        if tree.n_constants() == 0 {
            return MemberVerdict::wrong();
        }
        let Some(fitted) = exact_refit(tree, &self.clean) else {
            return MemberVerdict::wrong();
        };
        if exact_refit(&fitted, &self.rescaled).is_none() {
            return MemberVerdict::wrong();
        }
        let effective = identifiable_constants(&fitted, &self.clean);
        let surplus = effective.saturating_sub(self.target_constants) as u32;
        MemberVerdict::from_surplus(surplus, Route::Numeric)
    }
}

/// Refits `tree` to `data`; returns the fitted tree if it matches to
/// round-off.
fn exact_refit(tree: &ExprTree, data: &Dataset) -> Option<ExprTree> {
    let var = sample_std(data.targets()).powi(2);
    let opts = FitOptions { starts: 6, max_iterations: 200, tolerance: 1e-14, ..FitOptions::default() };
    let local = refine_constants(tree, data, &opts);
    let best = if local.mse <= EXACT_FIT * var {
        local
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED);
        let global = fit_constants_with(tree, data, &opts, &mut rng);
        if global.mse < local.mse {
            global
        } else {
            local
        }
    };
    (best.mse <= EXACT_FIT * var).then(|| tree.with_constants(best.constants))
}

/// Numerical rank of the prediction sensitivities to the constants.
fn identifiable_constants(tree: &ExprTree, data: &Dataset) -> usize {
    let base = tree.constants().to_vec();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..base.len() {
        let h = if base[j] == 0.0 { 1e-8 } else { 1e-6 * base[j].abs() };
        let mut up = base.clone();
        up[j] += h;
        let mut down = base.clone();
        down[j] -= h;
        let fu = evaluate(&tree.with_constants(up), data);
        let fd = evaluate(&tree.with_constants(down), data);
        let mut col: Vec<f64> = fu.iter().zip(&fd).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        if col.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            col.iter_mut().for_each(|v| *v /= norm);
            cols.push(col);
        }
    }
    // Gram-Schmidt with pivoting on the largest remaining norm
    let mut rank = 0;
    while !cols.is_empty() {
        let (idx, norm) = cols
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if norm < 1e-6 {
            break;
        }
        rank += 1;
        let q: Vec<f64> = cols.swap_remove(idx).into_iter().map(|v| v / norm).collect();
        for c in &mut cols {
            let dot: f64 = c.iter().zip(&q).map(|(a, b)| a * b).sum();
            c.iter_mut().zip(&q).for_each(|(a, b)| *a -= dot * b);
        }
    }
    rank
}

// ---------------------------------------------------------------------------
// Canonical form

/// Term coefficient. Products of constant slots keep their identity so that
/// a constant distributed over a sum can be factored out again exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Coef {
    Fixed(Rational64),
    /// Rational multiple of a product of constant slots raised to powers.
    Sym(Rational64, BTreeMap<usize, Rational64>),
    /// Any other constant-valued expression.
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Factor {
    Var(usize),
    Func(String, Vec<Shape>),
    /// A sum that could not be distributed; its first term has coefficient 1.
    Group(Shape),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Term {
    factors: BTreeMap<Factor, Rational64>,
    coef: Coef,
}

/// Sum of terms, sorted by factors, with like terms combined and zero terms
/// removed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Shape {
    terms: Vec<Term>,
}

/// Terms beyond which products are kept factored.
const MAX_EXPANSION: usize = 16;

fn ratio(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

impl Coef {
    fn sym(r: Rational64, slots: BTreeMap<usize, Rational64>) -> Coef {
        if r.is_zero() || slots.is_empty() {
            Coef::Fixed(r)
        } else {
            Coef::Sym(r, slots)
        }
    }

    fn add(&self, o: &Coef) -> Option<Coef> {
        match (self, o) {
            (Coef::Fixed(a), Coef::Fixed(b)) => a.checked_add(b).map(Coef::Fixed),
            (Coef::Sym(a, x), Coef::Sym(b, y)) if x == y => Some(Coef::sym(a.checked_add(b)?, x.clone())),
            _ => Some(Coef::Free),
        }
    }

    fn mul(&self, o: &Coef) -> Option<Coef> {
        match (self, o) {
            (Coef::Fixed(a), Coef::Fixed(b)) => a.checked_mul(b).map(Coef::Fixed),
            (Coef::Fixed(a), Coef::Sym(b, m)) | (Coef::Sym(b, m), Coef::Fixed(a)) => {
                Some(Coef::sym(a.checked_mul(b)?, m.clone()))
            }
            (Coef::Sym(a, x), Coef::Sym(b, y)) => {
                let mut slots = x.clone();
                for (k, e) in y {
                    let sum = match slots.get(k) {
                        Some(v) => v.checked_add(e)?,
                        None => *e,
                    };
                    if sum.is_zero() {
                        slots.remove(k);
                    } else {
                        slots.insert(*k, sum);
                    }
                }
                Some(Coef::sym(a.checked_mul(b)?, slots))
            }
            _ => Some(Coef::Free),
        }
    }

    /// Exact rational powers stay exact, anything else becomes free.
    fn pow(&self, k: Rational64) -> Coef {
        match self {
            Coef::Fixed(v) => match rational_pow(*v, k) {
                Some(r) => Coef::Fixed(r),
                None => Coef::Free,
            },
            Coef::Sym(r, slots) => {
                let Some(r) = rational_pow(*r, k) else {
                    return Coef::Free;
                };
                let mut out = BTreeMap::new();
                for (s, e) in slots {
                    match e.checked_mul(&k) {
                        Some(v) => out.insert(*s, v),
                        None => return Coef::Free,
                    };
                }
                Coef::sym(r, out)
            }
            Coef::Free => Coef::Free,
        }
    }

    fn inverse(&self) -> Coef {
        self.pow(ratio(-1))
    }
}

/// `v^k` when it is exactly rational and small enough to compute.
fn rational_pow(v: Rational64, k: Rational64) -> Option<Rational64> {
    if v.is_one() {
        return Some(v);
    }
    if !k.is_integer() || v.is_zero() || k.numer().abs() > 16 {
        return None;
    }
    let mut acc = ratio(1);
    for _ in 0..k.numer().abs() {
        acc = acc.checked_mul(&v)?;
    }
    Some(if k.is_negative() { acc.recip() } else { acc })
}

impl Term {
    fn constant(coef: Coef) -> Term {
        Term { factors: BTreeMap::new(), coef }
    }

    fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    fn mul(&self, o: &Term) -> Option<Term> {
        let mut factors = self.factors.clone();
        for (f, e) in &o.factors {
            let sum = match factors.get(f) {
                Some(x) => x.checked_add(e)?,
                None => *e,
            };
            if sum.is_zero() {
                factors.remove(f);
            } else {
                factors.insert(f.clone(), sum);
            }
        }
        Some(Term { factors, coef: self.coef.mul(&o.coef)? })
    }

    fn pow(&self, k: Rational64) -> Option<Term> {
        let mut factors = BTreeMap::new();
        for (f, e) in &self.factors {
            factors.insert(f.clone(), e.checked_mul(&k)?);
        }
        Some(Term { factors, coef: self.coef.pow(k) })
    }
}

impl Shape {
    fn from_terms(mut terms: Vec<Term>) -> Option<Shape> {
        terms.sort();
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.factors == t.factors => last.coef = last.coef.add(&t.coef)?,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coef != Coef::Fixed(ratio(0)));
        Some(Shape { terms: out })
    }

    fn free() -> Shape {
        Shape { terms: vec![Term::constant(Coef::Free)] }
    }

    fn variable(i: usize) -> Shape {
        let mut factors = BTreeMap::new();
        factors.insert(Factor::Var(i), ratio(1));
        Shape { terms: vec![Term { factors, coef: Coef::Fixed(ratio(1)) }] }
    }

    fn is_constant(&self) -> bool {
        self.terms.iter().all(Term::is_constant)
    }

    fn single(factor: Factor) -> Shape {
        let mut factors = BTreeMap::new();
        factors.insert(factor, ratio(1));
        Shape { terms: vec![Term { factors, coef: Coef::Fixed(ratio(1)) }] }
    }

    fn add(&self, o: &Shape) -> Option<Shape> {
        Shape::from_terms(self.terms.iter().chain(&o.terms).cloned().collect())
    }

    fn neg(&self) -> Option<Shape> {
        let minus = Coef::Fixed(ratio(-1));
        Shape::from_terms(
            self.terms
                .iter()
                .map(|t| Some(Term { factors: t.factors.clone(), coef: t.coef.mul(&minus)? }))
                .collect::<Option<_>>()?,
        )
    }

    fn mul(&self, o: &Shape) -> Option<Shape> {
        if self.terms.len() * o.terms.len() <= MAX_EXPANSION {
            let mut terms = Vec::new();
            for a in &self.terms {
                for b in &o.terms {
                    terms.push(a.mul(b)?);
                }
            }
            return Shape::from_terms(terms);
        }
        let t = self.as_term(ratio(1))?.mul(&o.as_term(ratio(1))?)?;
        Shape::from_terms(vec![t])
    }

    fn pow(&self, k: Rational64) -> Option<Shape> {
        match self.terms.len() {
            0 if k.is_positive() => Some(self.clone()),
            0 => Some(Shape::free()),
            1 => Shape::from_terms(vec![self.terms[0].pow(k)?]),
            _ => {
                if k.is_integer() && k.is_positive() && self.terms.len().pow(*k.numer() as u32) <= MAX_EXPANSION {
                    let mut acc = self.clone();
                    for _ in 1..*k.numer() {
                        acc = acc.mul(self)?;
                    }
                    return Some(acc);
                }
                Shape::from_terms(vec![self.as_term(k)?])
            }
        }
    }

    /// `self^k` as a single term. A sum becomes a group factor after its
    /// leading coefficient is pulled out.
    fn as_term(&self, k: Rational64) -> Option<Term> {
        if self.terms.len() == 1 {
            return self.terms[0].pow(k);
        }
        let lead = self.terms[0].coef.clone();
        let inv = lead.inverse();
        let normalized = Shape {
            terms: self
                .terms
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let coef = if i == 0 { Some(Coef::Fixed(ratio(1))) } else { t.coef.mul(&inv) };
                    Some(Term { factors: t.factors.clone(), coef: coef? })
                })
                .collect::<Option<_>>()?,
        };
        let mut factors = BTreeMap::new();
        factors.insert(Factor::Group(normalized), k);
        Some(Term { factors, coef: lead.pow(k) })
    }
}

fn func(name: String, args: Vec<Shape>) -> Shape {
    if args.iter().all(Shape::is_constant) {
        Shape::free()
    } else {
        Shape::single(Factor::Func(name, args))
    }
}

/// Canonical form of a tree; `None` if exact rational bookkeeping overflows.
pub fn canonical(tree: &ExprTree) -> Option<Shape> {
    canon_node(tree.root())
}

fn canon_node(node: &ExprNode) -> Option<Shape> {
    match node {
        ExprNode::Constant(i) => {
            let mut slots = BTreeMap::new();
            slots.insert(*i, ratio(1));
            Some(Shape { terms: vec![Term::constant(Coef::sym(ratio(1), slots))] })
        }
        ExprNode::Variable(i) => Some(Shape::variable(*i)),
        ExprNode::Unary(op, child) => {
            let c = canon_node(child)?;
            match op {
                OpKind::Sqrt => c.pow(Rational64::new(1, 2)),
                OpKind::FixedPow(k) => c.pow(ratio(*k as i64)),
                other => Some(func(other.symbol(), vec![c])),
            }
        }
        ExprNode::Binary(op, l, r) => {
            let (a, b) = (canon_node(l)?, canon_node(r)?);
            match op {
                OpKind::Add => a.add(&b),
                OpKind::Sub => a.add(&b.neg()?),
                OpKind::Mul => a.mul(&b),
                OpKind::Div => a.mul(&b.pow(ratio(-1))?),
                OpKind::BinaryPow => match fixed_value(&b) {
                    Some(k) => a.pow(k),
                    None => Some(func("^".to_string(), vec![a, b])),
                },
                _ => unreachable!("unary operator in binary node"),
            }
        }
    }
}

fn fixed_value(s: &Shape) -> Option<Rational64> {
    match s.terms.as_slice() {
        [] => Some(ratio(0)),
        [t] if t.is_constant() => match t.coef {
            Coef::Fixed(v) => Some(v),
            _ => None,
        },
        _ => None,
    }
}

fn split_constant(s: &Shape) -> (Option<&Term>, Vec<&Term>) {
    let (c, v): (Vec<&Term>, Vec<&Term>) = s.terms.iter().partition(|t| t.is_constant());
    (c.first().copied(), v)
}

/// Surplus constants of `cand` relative to `target`, or `None` when the
/// shapes differ.
fn match_shape(cand: &Shape, target: &Shape) -> Option<u32> {
    let (cc, cv) = split_constant(cand);
    let (tc, tv) = split_constant(target);
    let mut cost = match (cc, tc) {
        (None, None) => 0,
        (Some(_), None) => 1,
        (None, Some(_)) => return None,
        (Some(a), Some(b)) => coef_cost(&a.coef, &b.coef)?,
    };
    if cv.len() != tv.len() {
        return None;
    }
    let mut used = vec![false; cv.len()];
    for t in tv {
        let (i, c) = cv
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .filter_map(|(i, c)| term_cost(c, t).map(|k| (i, k)))
            .min_by_key(|&(_, k)| k)?;
        used[i] = true;
        cost += c;
    }
    Some(cost)
}

fn coef_cost(cand: &Coef, target: &Coef) -> Option<u32> {
    match (cand, target) {
        (Coef::Fixed(a), Coef::Fixed(b)) => (a == b).then_some(0),
        (Coef::Fixed(_), _) => None,
        (_, Coef::Fixed(_)) => Some(1),
        _ => Some(0),
    }
}

fn term_cost(cand: &Term, target: &Term) -> Option<u32> {
    if cand.factors.len() != target.factors.len() {
        return None;
    }
    let mut cost = coef_cost(&cand.coef, &target.coef)?;
    for ((cf, ce), (tf, te)) in cand.factors.iter().zip(&target.factors) {
        if ce != te {
            return None;
        }
        cost += match (cf, tf) {
            (Factor::Var(a), Factor::Var(b)) if a == b => 0,
            (Factor::Func(a, xs), Factor::Func(b, ys)) if a == b && xs.len() == ys.len() => {
                let mut c = 0;
                for (x, y) in xs.iter().zip(ys) {
                    c += match_shape(x, y)?;
                }
                c
            }
            (Factor::Group(x), Factor::Group(y)) => match_shape(x, y)?,
            _ => return None,
        };
    }
    Some(cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use unitgp_core::expr::parse;

    fn shape(s: &str) -> Shape {
        canonical(&parse(s).unwrap()).unwrap()
    }

    /// Equal up to which constant slots the coefficients come from.
    fn same(a: &str, b: &str) -> bool {
        let (x, y) = (shape(a), shape(b));
        match_shape(&x, &y) == Some(0) && match_shape(&y, &x) == Some(0)
    }

    fn structural(b: Benchmark, s: &str) -> Verdict {
        Classifier::new(b).structural(&parse(s).unwrap()).verdict
    }

    #[test]
    fn ground_truths_are_correct() {
        for b in Benchmark::ALL {
            let c = Classifier::new(b);
            assert_eq!(c.classify(&b.ground_truth()).verdict, Verdict::Correct, "{b}");
        }
    }

    #[test]
    fn constants_fold_and_absorb() {
        assert!(same("(c0 * (c1 * x0))", "(c0 * x0)"));
        assert!(same("((exp(c0) + c1) * x0)", "(x0 * c0)"));
        assert!(same("((c0 + c1) + x0)", "(x0 + c0)"));
        assert!(same("(x0 / c0)", "(c0 * x0)"));
        assert!(!same("(c0 * x0)", "x0"));
    }

    #[test]
    fn commutative_operands_sorted() {
        assert_eq!(shape("((x1 * x0) + x2)"), shape("(x2 + (x0 * x1))"));
        assert_eq!(shape("(sqrt(x0) * x0)"), shape("sqrt(pow3(x0))"));
    }

    #[test]
    fn distributed_constants_factor_back_out() {
        // c0 * (x1 - x0) expands to two terms sharing c0; grouping divides it
        // out again, leaving the fixed -1 intact
        assert!(same("pow2((c0 * (x1 - x0)))", "(c1 * pow2((x1 - x0)))"));
        assert!(same("(x2 / (c0 * (x1 - x0)))", "(c1 * (x2 / (x1 - x0)))"));
        assert!(!same("(x2 / ((c0 * x1) - (c1 * x0)))", "(c2 * (x2 / (x1 - x0)))"));
    }

    #[test]
    fn fixed_coefficients_are_tracked() {
        assert_eq!(shape("(x0 + x0)"), shape("((x0 + x0) * (x1 / x1))"));
        assert_ne!(shape("(x0 + x0)"), shape("x0"));
        assert_eq!(shape("(x0 - x0)"), Shape { terms: vec![] });
    }

    #[test]
    fn hubble_examples() {
        assert_eq!(structural(Benchmark::Hubble, "(c0 * x0)"), Verdict::Correct);
        assert_eq!(structural(Benchmark::Hubble, "(x0 * c0)"), Verdict::Correct);
        assert_eq!(structural(Benchmark::Hubble, "((c0 * x0) + c1)"), Verdict::Almost);
        assert_eq!(structural(Benchmark::Hubble, "pow2(x0)"), Verdict::Wrong);
        assert_eq!(structural(Benchmark::Hubble, "(c0 * pow2(x0))"), Verdict::Wrong);
        // a fixed coefficient cannot stand in for the unknown constant
        assert_eq!(structural(Benchmark::Hubble, "x0"), Verdict::Wrong);
    }

    #[test]
    fn rydberg_rearrangements() {
        let c = Classifier::new(Benchmark::Rydberg);
        let same = "((pow2(x0) * pow2(x1)) / ((pow2(x1) - pow2(x0)) * c0))";
        assert_eq!(c.structural(&parse(same).unwrap()).verdict, Verdict::Correct);
        // dividing through by x1^2 leaves the shape intact but frees a second
        // constant; only the numeric route sees it
        let scaled = "((x0 / (c0 - pow2(((x0 / x1) * c1)))) * x0)";
        assert_eq!(c.structural(&parse(scaled).unwrap()).verdict, Verdict::Wrong);
        let v = c.classify(&parse(scaled).unwrap());
        assert_eq!(v.verdict, Verdict::Almost);
        assert_eq!(v.route, Some(Route::Numeric));
        assert_eq!(v.surplus, Some(1));
    }

    #[test]
    fn numeric_route_sees_through_rewrites() {
        let c = Classifier::new(Benchmark::Kepler);
        // x^1.5 written as x * sqrt(x) with a redundant constant pair
        let v = c.classify(&parse("((c0 * x0) * sqrt((x0 * c1)))").unwrap());
        assert_eq!(v.verdict, Verdict::Correct);
        assert_eq!(c.numeric(&parse("(c0 * pow2(x0))").unwrap()).verdict, Verdict::Wrong);
        assert_eq!(c.numeric(&parse("sqrt(pow3(x0))").unwrap()).verdict, Verdict::Wrong);
    }

    #[test]
    fn numeric_counts_useless_terms_as_surplus() {
        let c = Classifier::new(Benchmark::Hubble);
        let v = c.numeric(&parse("((c0 * x0) + (c1 * pow2(x0)))").unwrap());
        assert_eq!((v.verdict, v.surplus), (Verdict::Almost, Some(1)));
        let v = c.numeric(&parse("((c0 * x0) + ((c1 * pow2(x0)) + (c2 * pow3(x0))))").unwrap());
        assert_eq!((v.verdict, v.surplus), (Verdict::Almost, Some(2)));
        let v = c.numeric(&parse("((c0 * x0) + ((c1 * pow2(x0)) + ((c2 * pow3(x0)) + c3)))").unwrap());
        assert_eq!(v.verdict, Verdict::Wrong);
    }

    #[test]
    fn front_takes_best_member() {
        let c = Classifier::new(Benchmark::Hubble);
        let trees: Vec<ExprTree> =
            ["x0", "((c0 * x0) + c1)", "(c0 * x0)"].iter().map(|s| parse(s).unwrap()).collect();
        assert_eq!(c.classify_front(&trees[..2]), (Verdict::Almost, Some(1)));
        assert_eq!(c.classify_front(&trees), (Verdict::Correct, Some(2)));
        assert_eq!(c.classify_front(&trees[..1]), (Verdict::Wrong, None));
    }

    #[test]
    fn deep_powers_do_not_overflow() {
        let mut s = String::from("(x0 + x0)");
        for _ in 0..12 {
            s = format!("pow3({s})");
        }
        // either a shape or a clean refusal
        let _ = canonical(&parse(&s).unwrap());
    }
}
