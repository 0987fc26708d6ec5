//! Random tree generation, subtree crossover and mutation.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{ExprNode, ExprTree};
use crate::units::OpKind;

/// Attempts per variation before falling back to a fresh random tree.
const RETRIES: usize = 10;

/// Shape constraints for generated trees.
#[derive(Debug, Clone)]
pub struct TreeConfig {
    pub n_features: usize,
    pub functions: Vec<OpKind>,
    pub max_complexity: usize,
    /// Depth range for ramped half-and-half initialization.
    pub min_depth: usize,
    pub max_depth: usize,
    /// Maximum depth of subtrees inserted by subtree mutation.
    pub mutation_depth: usize,
    /// Probability that a generated leaf is a constant rather than a variable.
    pub constant_prob: f64,
}

impl TreeConfig {
    pub fn new(n_features: usize, functions: Vec<OpKind>, max_complexity: usize) -> Self {
        TreeConfig {
            n_features,
            functions,
            max_complexity,
            min_depth: 2,
            max_depth: 5,
            mutation_depth: 3,
            constant_prob: 0.3,
        }
    }

    fn unary_ops(&self) -> Vec<OpKind> {
        self.functions.iter().copied().filter(|o| o.is_unary()).collect()
    }

    fn binary_ops(&self) -> Vec<OpKind> {
        self.functions.iter().copied().filter(|o| o.is_binary()).collect()
    }
}

/// Relative weights of the variation operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorRates {
    pub crossover: f64,
    pub subtree_mutation: f64,
    pub point_mutation: f64,
    pub constant_perturbation: f64,
}

impl Default for OperatorRates {
    fn default() -> Self {
        OperatorRates {
            crossover: 0.5,
            subtree_mutation: 0.2,
            point_mutation: 0.2,
            constant_perturbation: 0.1,
        }
    }
}

impl OperatorRates {
    pub fn is_valid(&self) -> bool {
        let all = [self.crossover, self.subtree_mutation, self.point_mutation, self.constant_perturbation];
        all.iter().all(|w| w.is_finite() && *w >= 0.0) && all.iter().sum::<f64>() > 0.0
    }
}

fn random_leaf<R: Rng + ?Sized>(cfg: &TreeConfig, rng: &mut R) -> ExprNode {
    if cfg.n_features == 0 || rng.random_bool(cfg.constant_prob) {
        ExprNode::Constant(0)
    } else {
        ExprNode::Variable(rng.random_range(0..cfg.n_features))
    }
}

fn grow<R: Rng + ?Sized>(cfg: &TreeConfig, depth: usize, full: bool, rng: &mut R) -> ExprNode {
    let unary = cfg.unary_ops();
    let binary = cfg.binary_ops();
    let n_ops = unary.len() + binary.len();
    if depth == 0 || n_ops == 0 {
        return random_leaf(cfg, rng);
    }
    if !full {
        // grow: terminals compete with functions
        let n_terminals = cfg.n_features.max(1) + 1;
        if rng.random_range(0..n_terminals + n_ops) < n_terminals {
            return random_leaf(cfg, rng);
        }
    }
    let pick = rng.random_range(0..n_ops);
    if pick < unary.len() {
        ExprNode::unary(unary[pick], grow(cfg, depth - 1, full, rng))
    } else {
        let op = binary[pick - unary.len()];
        let l = grow(cfg, depth - 1, full, rng);
        let r = grow(cfg, depth - 1, full, rng);
        ExprNode::binary(op, l, r)
    }
}

/// Ramped half-and-half tree within the complexity cap.
///
/// Each failed attempt lowers the depth limit; if nothing fits, a single leaf
/// is returned.
pub fn random_tree<R: Rng + ?Sized>(cfg: &TreeConfig, rng: &mut R) -> ExprTree {
    let mut max_depth = cfg.max_depth.max(cfg.min_depth);
    for attempt in 0..4 * RETRIES {
        let min_depth = cfg.min_depth.min(max_depth);
        let depth = rng.random_range(min_depth..=max_depth);
        let full = rng.random_bool(0.5);
        let tree = ExprTree::new(grow(cfg, depth, full, rng));
        if tree.complexity() <= cfg.max_complexity {
            return tree;
        }
        if attempt % 4 == 3 && max_depth > 1 {
            max_depth -= 1;
        }
    }
    ExprTree::new(random_leaf(cfg, rng))
}

fn random_subtree<R: Rng + ?Sized>(cfg: &TreeConfig, rng: &mut R) -> ExprTree {
    let depth = rng.random_range(0..=cfg.mutation_depth);
    ExprTree::new(grow(cfg, depth, false, rng))
}

/// Swaps a random subtree of `a` with a random subtree of `b`.
pub fn subtree_crossover<R: Rng + ?Sized>(
    a: &ExprTree,
    b: &ExprTree,
    cfg: &TreeConfig,
    rng: &mut R,
) -> (ExprTree, ExprTree) {
    let mut best: (Option<ExprTree>, Option<ExprTree>) = (None, None);
    for _ in 0..RETRIES {
        let i = rng.random_range(0..a.size());
        let j = rng.random_range(0..b.size());
        let c1 = a.graft(i, &b.fragment(j));
        let c2 = b.graft(j, &a.fragment(i));
        let ok1 = c1.complexity() <= cfg.max_complexity;
        let ok2 = c2.complexity() <= cfg.max_complexity;
        if best.0.is_none() && ok1 {
            best.0 = Some(c1);
        }
        if best.1.is_none() && ok2 {
            best.1 = Some(c2);
        }
        if best.0.is_some() && best.1.is_some() {
            break;
        }
    }
    let c1 = best.0.unwrap_or_else(|| random_tree(cfg, rng));
    let c2 = best.1.unwrap_or_else(|| random_tree(cfg, rng));
    (c1, c2)
}

#[derive(Debug, Clone, Copy)]
enum Mutation {
    Subtree,
    Point,
    Constant,
}

/// Applies one mutation: subtree replacement, point mutation or Gaussian
/// constant perturbation, chosen by the relative weights in `rates`.
pub fn mutate<R: Rng + ?Sized>(tree: &ExprTree, cfg: &TreeConfig, rates: &OperatorRates, rng: &mut R) -> ExprTree {
    let weights = [
        (Mutation::Subtree, rates.subtree_mutation),
        (Mutation::Point, rates.point_mutation),
        (Mutation::Constant, rates.constant_perturbation),
    ];
    let total: f64 = weights.iter().map(|w| w.1).sum();
    let kind = if total <= 0.0 {
        Mutation::Subtree
    } else {
        let mut x = rng.random_range(0.0..total);
        let mut kind = Mutation::Subtree;
        for (k, w) in weights {
            if x < w {
                kind = k;
                break;
            }
            x -= w;
        }
        kind
    };
    for _ in 0..RETRIES {
        let child = match kind {
            Mutation::Subtree => subtree_mutation(tree, cfg, rng),
            Mutation::Point => point_mutation(tree, cfg, rng),
            Mutation::Constant if tree.n_constants() > 0 => perturb_constant(tree, rng),
            Mutation::Constant => point_mutation(tree, cfg, rng),
        };
        if child.complexity() <= cfg.max_complexity {
            return child;
        }
    }
    random_tree(cfg, rng)
}

fn subtree_mutation<R: Rng + ?Sized>(tree: &ExprTree, cfg: &TreeConfig, rng: &mut R) -> ExprTree {
    let idx = rng.random_range(0..tree.size());
    tree.graft(idx, &random_subtree(cfg, rng))
}

fn point_mutation<R: Rng + ?Sized>(tree: &ExprTree, cfg: &TreeConfig, rng: &mut R) -> ExprTree {
    let idx = rng.random_range(0..tree.size());
    let node = tree.root().get(idx).expect("index within tree");
    let replacement = match node {
        ExprNode::Constant(_) | ExprNode::Variable(_) => {
            let mut leaf = random_leaf(cfg, rng);
            for _ in 0..RETRIES {
                let same = matches!((&leaf, node), (ExprNode::Constant(_), ExprNode::Constant(_)))
                    || leaf == *node;
                if !same {
                    break;
                }
                leaf = random_leaf(cfg, rng);
            }
            leaf
        }
        ExprNode::Unary(op, child) => {
            let others: Vec<OpKind> = cfg.unary_ops().into_iter().filter(|o| o != op).collect();
            match others.choose(rng) {
                Some(new_op) => ExprNode::Unary(*new_op, child.clone()),
                None => return subtree_mutation(tree, cfg, rng),
            }
        }
        ExprNode::Binary(op, l, r) => {
            let others: Vec<OpKind> = cfg.binary_ops().into_iter().filter(|o| o != op).collect();
            match others.choose(rng) {
                Some(new_op) => ExprNode::Binary(*new_op, l.clone(), r.clone()),
                None => return subtree_mutation(tree, cfg, rng),
            }
        }
    };
    // replacement keeps the original slot numbering, so graft with the
    // tree's own constants
    let mut root = tree.root().clone();
    *root.get_mut(idx).expect("index within tree") = replacement;
    let fresh = tree.n_constants();
    let mut values = tree.constants().to_vec();
    if let Some(ExprNode::Constant(slot)) = root.get_mut(idx) {
        if !matches!(node, ExprNode::Constant(_)) {
            *slot = fresh;
            values.push(1.0);
        }
    }
    ExprTree::from_parts(root, &values)
}

fn perturb_constant<R: Rng + ?Sized>(tree: &ExprTree, rng: &mut R) -> ExprTree {
    let normal = Normal::new(0.0, 0.1).expect("valid normal");
    let mut values = tree.constants().to_vec();
    let k = rng.random_range(0..values.len());
    values[k] *= 1.0 + normal.sample(rng);
    tree.with_constants(values)
}

/// Produces offspring from two parents: crossover yields two children, each
/// mutation kind one child of the first parent.
pub fn vary<R: Rng + ?Sized>(
    a: &ExprTree,
    b: &ExprTree,
    cfg: &TreeConfig,
    rates: &OperatorRates,
    rng: &mut R,
) -> Vec<ExprTree> {
    let total = rates.crossover + rates.subtree_mutation + rates.point_mutation + rates.constant_perturbation;
    if rng.random_range(0.0..total) < rates.crossover {
        let (c1, c2) = subtree_crossover(a, b, cfg, rng);
        vec![c1, c2]
    } else {
        let rest = OperatorRates { crossover: 0.0, ..*rates };
        vec![mutate(a, cfg, &rest, rng)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, render};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bench_ops() -> Vec<OpKind> {
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

    fn slots_contiguous(t: &ExprTree) -> bool {
        t.root().constant_slots() == (0..t.n_constants()).collect::<Vec<_>>()
    }

    #[test]
    fn random_trees_respect_cap() {
        let cfg = TreeConfig::new(3, bench_ops(), 30);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let t = random_tree(&cfg, &mut rng);
            assert!(t.complexity() <= 30);
            assert!(slots_contiguous(&t));
            assert!(t.root().max_feature().is_none_or(|f| f < 3));
        }
    }

    #[test]
    fn crossover_of_leaves_swaps_them() {
        let cfg = TreeConfig::new(2, bench_ops(), 30);
        let a = parse("x0").unwrap();
        let b = parse("c0[4]").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (c1, c2) = subtree_crossover(&a, &b, &cfg, &mut rng);
        assert_eq!(c1, b);
        assert_eq!(c2, a);
    }

    #[test]
    fn mutation_reaches_log() {
        let cfg = TreeConfig::new(1, vec![OpKind::Log], 30);
        let rates = OperatorRates::default();
        let x0 = parse("x0").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let found = (0..500).any(|_| render(&mutate(&x0, &cfg, &rates, &mut rng)) == "log(x0)");
        assert!(found);
    }

    #[test]
    fn crossover_falls_back_when_cap_unreachable() {
        // a cap of 1 only admits a single variable
        let cfg = TreeConfig::new(1, bench_ops(), 1);
        let a = parse("(c0 * x0)").unwrap();
        let b = parse("(x0 + c0)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (c1, c2) = subtree_crossover(&a, &b, &cfg, &mut rng);
        assert!(c1.complexity() <= 1 && c2.complexity() <= 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn variation_preserves_invariants(seed in any::<u64>()) {
            let cfg = TreeConfig::new(3, bench_ops(), 30);
            let rates = OperatorRates::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_tree(&cfg, &mut rng);
            let b = random_tree(&cfg, &mut rng);
            for _ in 0..20 {
                for child in vary(&a, &b, &cfg, &rates, &mut rng) {
                    prop_assert!(child.complexity() <= 30);
                    prop_assert!(slots_contiguous(&child));
                    prop_assert_eq!(child.constants().len(), child.root().count_constants());
                }
            }
        }
    }
}
