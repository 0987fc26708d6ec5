//! Recursive dimensional analysis with violation counting, and the repair
//! transformer that inserts balancing constants at violation sites.
//!
//! Both traversals visit the right operand of a binary node before the left
//! one, so a seeded random source reproduces the same Add/Sub choices.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ExprNode, ExprTree};
use crate::units::{manhattan_distance, propagate_binary, propagate_unary, OpKind, UnitVector};

/// Output unit and violation tally of one tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimReport {
    pub output_unit: UnitVector,
    /// Number of operations whose operands broke their unit rule.
    pub internal_violations: u32,
    /// Manhattan distance between the output unit and the target unit.
    pub target_mismatch: Rational64,
}

impl DimReport {
    /// Internal count plus target mismatch, as one exact number.
    pub fn violations(&self) -> Rational64 {
        Rational64::from_integer(self.internal_violations as i64) + self.target_mismatch
    }

    pub fn violations_f64(&self) -> f64 {
        self.violations().to_f64().unwrap_or(f64::MAX)
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_zero()
    }
}

/// Serializable view of a [`DimReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimSummary {
    pub output_unit: String,
    pub internal_violations: u32,
    pub target_mismatch: String,
    pub violations: f64,
}

impl From<&DimReport> for DimSummary {
    fn from(r: &DimReport) -> Self {
        DimSummary {
            output_unit: r.output_unit.to_string(),
            internal_violations: r.internal_violations,
            target_mismatch: r.target_mismatch.to_string(),
            violations: r.violations_f64(),
        }
    }
}

/// Runs the dimensional analysis of `tree`.
///
/// Constants are jokers; variables take their unit from `var_units`. Every
/// operation whose operands break its unit rule adds one violation, and the
/// Manhattan distance of the output unit to `target` is added at the end.
pub fn analyze<R: Rng + ?Sized>(
    tree: &ExprTree,
    var_units: &[UnitVector],
    target: &UnitVector,
    rng: &mut R,
) -> DimReport {
    let (unit, internal) = analyze_node(tree.root(), var_units, rng);
    DimReport {
        output_unit: unit,
        internal_violations: internal,
        target_mismatch: manhattan_distance(&unit, target),
    }
}

fn analyze_node<R: Rng + ?Sized>(node: &ExprNode, var_units: &[UnitVector], rng: &mut R) -> (UnitVector, u32) {
    match node {
        ExprNode::Constant(_) => (UnitVector::Joker, 0),
        ExprNode::Variable(i) => (var_units[*i], 0),
        ExprNode::Unary(op, child) => {
            let (u, v) = analyze_node(child, var_units, rng);
            let (out, bad) = propagate_unary(*op, u);
            (out, v + bad as u32)
        }
        ExprNode::Binary(op, left, right) => {
            let (ur, vr) = analyze_node(right, var_units, rng);
            let (ul, vl) = analyze_node(left, var_units, rng);
            let (out, bad) = propagate_binary(*op, ul, ur, rng);
            (out, vl + vr + bad as u32)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("repaired tree has complexity {complexity}, cap is {max}")]
pub struct RepairError {
    pub complexity: usize,
    pub max: usize,
}

/// Rewrites `tree` so that it has no unit violations.
///
/// Wherever the analysis would count a violation, the offending operand is
/// multiplied by a new constant (which makes it a joker):
/// one random operand of a mismatched Add/Sub, the argument of a
/// dimensionless-input function, and each non-dimensionless operand of a
/// binary power. If the resulting output unit still differs from `target`
/// the whole tree is multiplied by a constant. New constants start at 1.0,
/// so the repaired tree evaluates exactly like the original until refitted.
///
/// Fails if the result exceeds `max_complexity`.
pub fn repair<R: Rng + ?Sized>(
    tree: &ExprTree,
    var_units: &[UnitVector],
    target: &UnitVector,
    max_complexity: usize,
    rng: &mut R,
) -> Result<ExprTree, RepairError> {
    let mut next_slot = tree.n_constants();
    let (mut root, unit) = repair_node(tree.root(), var_units, &mut next_slot, rng);
    if !manhattan_distance(&unit, target).is_zero() {
        root = wrap(root, &mut next_slot);
    }
    let repaired = ExprTree::from_parts(root, tree.constants());
    let complexity = repaired.complexity();
    if complexity > max_complexity {
        return Err(RepairError { complexity, max: max_complexity });
    }
    Ok(repaired)
}

fn wrap(node: ExprNode, next_slot: &mut usize) -> ExprNode {
    let c = ExprNode::Constant(*next_slot);
    *next_slot += 1;
    ExprNode::binary(OpKind::Mul, c, node)
}

fn repair_node<R: Rng + ?Sized>(
    node: &ExprNode,
    var_units: &[UnitVector],
    next_slot: &mut usize,
    rng: &mut R,
) -> (ExprNode, UnitVector) {
    match node {
        ExprNode::Constant(_) => (node.clone(), UnitVector::Joker),
        ExprNode::Variable(i) => (node.clone(), var_units[*i]),
        ExprNode::Unary(op, child) => {
            let (mut c, u) = repair_node(child, var_units, next_slot, rng);
            let (mut out, bad) = propagate_unary(*op, u);
            if bad {
                c = wrap(c, next_slot);
                out = propagate_unary(*op, UnitVector::Joker).0;
            }
            (ExprNode::unary(*op, c), out)
        }
        ExprNode::Binary(op, left, right) => {
            let (mut r, ur) = repair_node(right, var_units, next_slot, rng);
            let (mut l, ul) = repair_node(left, var_units, next_slot, rng);
            let out = match op {
                OpKind::Add | OpKind::Sub => match (ul, ur) {
                    (UnitVector::Known(a), UnitVector::Known(b)) if a != b => {
                        if rng.random::<bool>() {
                            l = wrap(l, next_slot);
                            ur
                        } else {
                            r = wrap(r, next_slot);
                            ul
                        }
                    }
                    (UnitVector::Joker, _) => ur,
                    _ => ul,
                },
                OpKind::BinaryPow => {
                    if is_known_dimensional(&ul) {
                        l = wrap(l, next_slot);
                    }
                    if is_known_dimensional(&ur) {
                        r = wrap(r, next_slot);
                    }
                    UnitVector::dimensionless()
                }
                OpKind::Mul | OpKind::Div => propagate_binary(*op, ul, ur, rng).0,
                _ => unreachable!("unary op in binary node"),
            };
            (ExprNode::binary(*op, l, r), out)
        }
    }
}

fn is_known_dimensional(u: &UnitVector) -> bool {
    !u.is_joker() && !u.is_dimensionless()
}
