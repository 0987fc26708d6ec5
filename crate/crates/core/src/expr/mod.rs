//! Expression trees: representation, column-wise evaluation and the weighted
//! complexity measure.

mod render;
mod variation;

pub use render::{format_value, parse, render, render_symbolic};
pub use variation::{mutate, random_tree, subtree_crossover, vary, OperatorRates, TreeConfig};

use crate::benchmarks::Dataset;
use crate::units::OpKind;

/// Complexity weight of a constant leaf.
pub const CONSTANT_WEIGHT: usize = 2;
/// Complexity weight of a variable leaf or an operation node.
pub const NODE_WEIGHT: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    /// Index into the owning tree's constant vector.
    Constant(usize),
    /// Index of a dataset feature column.
    Variable(usize),
    Unary(OpKind, Box<ExprNode>),
    Binary(OpKind, Box<ExprNode>, Box<ExprNode>),
}

impl ExprNode {
    pub fn unary(op: OpKind, child: ExprNode) -> Self {
        debug_assert!(op.is_unary());
        ExprNode::Unary(op, Box::new(child))
    }

    pub fn binary(op: OpKind, left: ExprNode, right: ExprNode) -> Self {
        debug_assert!(op.is_binary());
        ExprNode::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn complexity(&self) -> usize {
        match self {
            ExprNode::Constant(_) => CONSTANT_WEIGHT,
            ExprNode::Variable(_) => NODE_WEIGHT,
            ExprNode::Unary(_, c) => NODE_WEIGHT + c.complexity(),
            ExprNode::Binary(_, l, r) => NODE_WEIGHT + l.complexity() + r.complexity(),
        }
    }

    /// Number of nodes in this subtree.
    pub fn size(&self) -> usize {
        match self {
            ExprNode::Constant(_) | ExprNode::Variable(_) => 1,
            ExprNode::Unary(_, c) => 1 + c.size(),
            ExprNode::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprNode::Constant(_) | ExprNode::Variable(_) => 0,
            ExprNode::Unary(_, c) => 1 + c.depth(),
            ExprNode::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn count_constants(&self) -> usize {
        match self {
            ExprNode::Constant(_) => 1,
            ExprNode::Variable(_) => 0,
            ExprNode::Unary(_, c) => c.count_constants(),
            ExprNode::Binary(_, l, r) => l.count_constants() + r.count_constants(),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_feature(&self) -> Option<usize> {
        match self {
            ExprNode::Constant(_) => None,
            ExprNode::Variable(i) => Some(*i),
            ExprNode::Unary(_, c) => c.max_feature(),
            ExprNode::Binary(_, l, r) => l.max_feature().max(r.max_feature()),
        }
    }

    /// Subtree at pre-order position `idx` (root is 0).
    pub fn get(&self, idx: usize) -> Option<&ExprNode> {
        if idx == 0 {
            return Some(self);
        }
        match self {
            ExprNode::Constant(_) | ExprNode::Variable(_) => None,
            ExprNode::Unary(_, c) => c.get(idx - 1),
            ExprNode::Binary(_, l, r) => {
                let ls = l.size();
                if idx <= ls {
                    l.get(idx - 1)
                } else {
                    r.get(idx - 1 - ls)
                }
            }
        }
    }

    /// Mutable subtree at pre-order position `idx`.
    pub fn get_mut(&mut self, idx: usize) -> Option<&mut ExprNode> {
        if idx == 0 {
            return Some(self);
        }
        match self {
            ExprNode::Constant(_) | ExprNode::Variable(_) => None,
            ExprNode::Unary(_, c) => c.get_mut(idx - 1),
            ExprNode::Binary(_, l, r) => {
                let ls = l.size();
                if idx <= ls {
                    l.get_mut(idx - 1)
                } else {
                    r.get_mut(idx - 1 - ls)
                }
            }
        }
    }

    fn visit_constants_mut(&mut self, f: &mut impl FnMut(&mut usize)) {
        match self {
            ExprNode::Constant(i) => f(i),
            ExprNode::Variable(_) => {}
            ExprNode::Unary(_, c) => c.visit_constants_mut(f),
            ExprNode::Binary(_, l, r) => {
                l.visit_constants_mut(f);
                r.visit_constants_mut(f);
            }
        }
    }

    /// Constant slot indices in pre-order.
    pub fn constant_slots(&self) -> Vec<usize> {
        fn walk(node: &ExprNode, out: &mut Vec<usize>) {
            match node {
                ExprNode::Constant(i) => out.push(*i),
                ExprNode::Variable(_) => {}
                ExprNode::Unary(_, c) => walk(c, out),
                ExprNode::Binary(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

/// An expression together with the values of its constant slots.
///
/// Constant slots are numbered `0..n` in pre-order with no gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprTree {
    root: ExprNode,
    constants: Vec<f64>,
}

impl ExprTree {
    /// Builds a tree and renumbers its constant slots in pre-order.
    ///
    /// `values[i]` is the value of a node `Constant(i)` as written in `root`;
    /// slots without a value default to 1.0.
    pub fn from_parts(mut root: ExprNode, values: &[f64]) -> Self {
        let mut constants = Vec::new();
        root.visit_constants_mut(&mut |slot| {
            constants.push(values.get(*slot).copied().unwrap_or(1.0));
            *slot = constants.len() - 1;
        });
        ExprTree { root, constants }
    }

    /// Builds a tree whose constants all start at 1.0.
    pub fn new(root: ExprNode) -> Self {
        Self::from_parts(root, &[])
    }

    pub fn root(&self) -> &ExprNode {
        &self.root
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    pub fn n_constants(&self) -> usize {
        self.constants.len()
    }

    /// Same structure with replaced constant values.
    ///
    /// # Panics
    ///
    /// Panics if the number of values differs from the number of slots.
    pub fn with_constants(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.constants.len(), "constant count mismatch");
        ExprTree { root: self.root.clone(), constants: values }
    }

    pub fn complexity(&self) -> usize {
        self.root.complexity()
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Copy of the subtree at pre-order `idx` with its own constant values,
    /// renumbered from zero.
    pub fn fragment(&self, idx: usize) -> ExprTree {
        let node = self.root.get(idx).expect("subtree index out of range").clone();
        ExprTree::from_parts(node, &self.constants)
    }

    /// Replaces the subtree at pre-order `idx` with `fragment`.
    pub fn graft(&self, idx: usize, fragment: &ExprTree) -> ExprTree {
        let offset = self.constants.len();
        let mut insert = fragment.root.clone();
        insert.visit_constants_mut(&mut |i| *i += offset);
        let mut root = self.root.clone();
        *root.get_mut(idx).expect("subtree index out of range") = insert;
        let mut values = self.constants.clone();
        values.extend_from_slice(&fragment.constants);
        ExprTree::from_parts(root, &values)
    }
}

/// Evaluates `tree` on every sample of `data`.
///
/// Domain errors and overflow yield NaN or infinite entries; no protected
/// operators are used.
pub fn evaluate(tree: &ExprTree, data: &Dataset) -> Vec<f64> {
    evaluate_columns(tree.root(), tree.constants(), data.columns(), data.n_samples())
}

/// Evaluates `root` over feature-major `columns` of length `n`.
pub fn evaluate_columns(root: &ExprNode, constants: &[f64], columns: &[Vec<f64>], n: usize) -> Vec<f64> {
    match root {
        ExprNode::Constant(i) => vec![constants[*i]; n],
        ExprNode::Variable(i) => columns[*i].clone(),
        ExprNode::Unary(op, child) => {
            let mut v = evaluate_columns(child, constants, columns, n);
            for x in &mut v {
                *x = apply_unary(*op, *x);
            }
            v
        }
        ExprNode::Binary(op, left, right) => {
            let mut a = evaluate_columns(left, constants, columns, n);
            let b = evaluate_columns(right, constants, columns, n);
            for (x, y) in a.iter_mut().zip(&b) {
                *x = apply_binary(*op, *x, *y);
            }
            a
        }
    }
}

pub fn apply_unary(op: OpKind, x: f64) -> f64 {
    match op {
        OpKind::Exp => x.exp(),
        OpKind::Log => x.ln(),
        OpKind::Sin => x.sin(),
        OpKind::Cos => x.cos(),
        OpKind::Tan => x.tan(),
        OpKind::Sqrt => x.sqrt(),
        OpKind::FixedPow(k) => x.powi(k as i32),
        _ => unreachable!("binary operation {op:?} in unary position"),
    }
}

pub fn apply_binary(op: OpKind, x: f64, y: f64) -> f64 {
    match op {
        OpKind::Add => x + y,
        OpKind::Sub => x - y,
        OpKind::Mul => x * y,
        OpKind::Div => x / y,
        OpKind::BinaryPow => x.powf(y),
        _ => unreachable!("unary operation {op:?} in binary position"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::Dataset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn data(rows: &[&[f64]]) -> Dataset {
        let n_features = rows[0].len();
        let names = (0..n_features).map(|i| format!("x{i}")).collect();
        let columns = (0..n_features).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Dataset::new(names, "y".into(), columns, vec![0.0; rows.len()], None).unwrap()
    }

    #[test]
    fn evaluate_sum() {
        let t = parse("(x0 + x1)").unwrap();
        assert_eq!(evaluate(&t, &data(&[&[2.0, 3.0]])), vec![5.0]);
    }

    #[test]
    fn evaluate_scaled_variable() {
        let t = parse("(c0[2.2e-18] * x0)").unwrap();
        let y = evaluate(&t, &data(&[&[1e24]]))[0];
        assert!((y - 2.2e6).abs() / 2.2e6 < 1e-14);
    }

    #[test]
    fn log_of_negative_is_not_finite() {
        let t = parse("log(x0)").unwrap();
        assert!(!evaluate(&t, &data(&[&[-1.0]]))[0].is_finite());
    }

    #[test]
    fn complexity_weights() {
        assert_eq!(parse("(c0 * x0)").unwrap().complexity(), 4);
        assert_eq!(parse("x0").unwrap().complexity(), 1);
        assert_eq!(parse("(c0 * sqrt(pow3(x0)))").unwrap().complexity(), 6);
    }

    #[test]
    fn constants_renumbered_in_preorder() {
        let root = ExprNode::binary(OpKind::Add, ExprNode::Constant(5), ExprNode::Constant(2));
        let t = ExprTree::from_parts(root, &[0.0, 0.0, 7.0, 0.0, 0.0, 3.0]);
        assert_eq!(t.root().constant_slots(), vec![0, 1]);
        assert_eq!(t.constants(), &[3.0, 7.0]);
    }

    #[test]
    fn graft_carries_fragment_constants() {
        let a = parse("(c0[2] * x0)").unwrap();
        let b = parse("(x1 + c0[9])").unwrap();
        let child = a.graft(2, &b.fragment(0));
        assert_eq!(render(&child), "(c0[2] * (x1 + c1[9]))");
    }

    #[test]
    fn get_follows_preorder() {
        let t = parse("((x0 + x1) * log(x2))").unwrap();
        let nodes: Vec<String> = (0..t.size())
            .map(|i| render(&t.fragment(i)))
            .collect();
        assert_eq!(nodes, ["((x0 + x1) * log(x2))", "(x0 + x1)", "x0", "x1", "log(x2)", "x2"]);
        assert!(t.root().get(6).is_none());
    }

    /// Row-at-a-time recursive interpreter used as an independent reference.
    fn reference(node: &ExprNode, c: &[f64], row: &[f64]) -> f64 {
        match node {
            ExprNode::Constant(i) => c[*i],
            ExprNode::Variable(i) => row[*i],
            ExprNode::Unary(op, ch) => {
                let x = reference(ch, c, row);
                match op {
                    OpKind::Exp => x.exp(),
                    OpKind::Log => x.ln(),
                    OpKind::Sin => x.sin(),
                    OpKind::Cos => x.cos(),
                    OpKind::Tan => x.tan(),
                    OpKind::Sqrt => x.sqrt(),
                    OpKind::FixedPow(k) => x.powi(*k as i32),
                    _ => unreachable!(),
                }
            }
            ExprNode::Binary(op, l, r) => {
                let (a, b) = (reference(l, c, row), reference(r, c, row));
                match op {
                    OpKind::Add => a + b,
                    OpKind::Sub => a - b,
                    OpKind::Mul => a * b,
                    OpKind::Div => a / b,
                    OpKind::BinaryPow => a.powf(b),
                    _ => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn evaluation_matches_reference_interpreter() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = TreeConfig::new(
            3,
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
            ],
            30,
        );
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..3).map(|_| rng.random_range(0.5..3.0)).collect())
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let d = data(&refs);
        let mut compared = 0;
        for _ in 0..100 {
            let mut t = random_tree(&cfg, &mut rng);
            let vals = (0..t.n_constants()).map(|_| rng.random_range(-2.0..2.0)).collect();
            t = t.with_constants(vals);
            let fast = evaluate(&t, &d);
            for (row, y) in rows.iter().zip(&fast) {
                let want = reference(t.root(), t.constants(), row);
                if !want.is_finite() || !y.is_finite() {
                    continue;
                }
                compared += 1;
                let scale = want.abs().max(1e-300);
                assert!((y - want).abs() / scale <= 1e-12, "{} row {row:?}: {y} vs {want}", render(&t));
            }
        }
        assert!(compared > 5000);
    }
}
