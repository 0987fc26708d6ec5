//! Reportable Pareto front: one representative per complexity level.

use std::collections::BTreeMap;

use super::{nondominated_sort, Individual, Mode};
use crate::dim_analysis::DimReport;
use crate::expr::ExprTree;

#[derive(Debug, Clone)]
pub struct Front {
    pub mode: Mode,
    /// Best-MSE rank-0 individual per complexity level, ascending complexity.
    /// MSE ties go to fewer violations.
    pub members: Vec<Individual>,
    /// Lowest violation magnitude among all rank-0 individuals at each
    /// complexity level.
    pub min_violations: BTreeMap<usize, f64>,
}

impl Front {
    /// Percentage of front entries with unit violations. In MultiObjective
    /// mode a complexity level counts as violating only if every rank-0
    /// solution at that level violates; elsewhere the representatives count.
    pub fn pct_violating(&self) -> f64 {
        if self.members.is_empty() {
            return 0.0;
        }
        let bad = match self.mode {
            Mode::MultiObjective => self.min_violations.values().filter(|&&v| v > 0.0).count(),
            _ => self.members.iter().filter(|m| m.violations() > 0.0).count(),
        };
        let total = match self.mode {
            Mode::MultiObjective => self.min_violations.len(),
            _ => self.members.len(),
        };
        100.0 * bad as f64 / total as f64
    }

    pub fn mean_constants(&self) -> f64 {
        if self.members.is_empty() {
            return 0.0;
        }
        let sum: usize = self.members.iter().map(|m| m.tree.n_constants()).sum();
        sum as f64 / self.members.len() as f64
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Extracts the rank-0 front of `population`. Individuals without a unit
/// report (Baseline) get one from `analyze`, used for reporting only.
pub fn extract_front(
    population: &[Individual],
    mode: Mode,
    mut analyze: impl FnMut(&ExprTree) -> DimReport,
) -> Front {
    assert!(!population.is_empty(), "empty population");
    let objs: Vec<Vec<f64>> = population.iter().map(|i| i.objectives.clone()).collect();
    let first = nondominated_sort(&objs).swap_remove(0);

    let mut best: BTreeMap<usize, Individual> = BTreeMap::new();
    let mut min_violations = BTreeMap::new();
    for i in first {
        let mut ind = population[i].clone();
        if ind.dim.is_none() {
            ind.dim = Some(analyze(&ind.tree));
        }
        let c = ind.complexity();
        let v = ind.violations();
        min_violations.entry(c).and_modify(|m: &mut f64| *m = m.min(v)).or_insert(v);
        let replace = match best.get(&c) {
            None => true,
            Some(cur) => ind.mse() < cur.mse() || (ind.mse() == cur.mse() && v < cur.violations()),
        };
        if replace {
            best.insert(c, ind);
        }
    }
    Front { mode, members: best.into_values().collect(), min_violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::fitting::FitResult;
    use crate::units::UnitVector;
    use num_rational::Rational64;

    fn ind(expr: &str, mse: f64, violations: Option<i64>, mode: Mode) -> Individual {
        let tree = parse(expr).unwrap();
        let dim = violations.map(|v| DimReport {
            output_unit: UnitVector::dimensionless(),
            internal_violations: v as u32,
            target_mismatch: Rational64::from_integer(0),
        });
        let mut objectives = vec![mse, tree.complexity() as f64, 0.0];
        if mode == Mode::MultiObjective {
            objectives.push(violations.unwrap_or(0) as f64);
        }
        Individual {
            tree,
            fit: FitResult { constants: vec![], mse, spearman_support: 0.0 },
            dim,
            objectives,
            rank: 0,
            crowding: 0.0,
        }
    }

    fn no_analysis(_: &ExprTree) -> DimReport {
        panic!("analysis not expected")
    }

    #[test]
    fn tie_prefers_fewer_violations() {
        let m = Mode::MultiObjective;
        let pop = vec![ind("(x0 + x1)", 1.0, Some(2), m), ind("(x0 * x1)", 1.0, Some(0), m)];
        let f = extract_front(&pop, m, no_analysis);
        assert_eq!(f.members.len(), 1);
        assert_eq!(f.members[0].violations(), 0.0);
        assert_eq!(f.pct_violating(), 0.0);
    }

    #[test]
    fn multiobjective_uses_lowest_violation_per_level() {
        let m = Mode::MultiObjective;
        // at complexity 3 the accurate solution violates but a valid one
        // exists; at complexity 1 only a violating one exists
        let pop = vec![
            ind("(x0 + x1)", 1.0, Some(1), m),
            ind("(x0 * x1)", 2.0, Some(0), m),
            ind("x0", 5.0, Some(1), m),
        ];
        let f = extract_front(&pop, m, no_analysis);
        assert_eq!(f.members.len(), 2);
        assert_eq!(f.members[1].violations(), 1.0);
        assert_eq!(f.pct_violating(), 50.0);
    }

    #[test]
    fn baseline_gets_post_hoc_reports() {
        let m = Mode::Baseline;
        let pop = vec![ind("x0", 2.0, None, m), ind("(c0[2] * x0)", 1.0, None, m)];
        let mut calls = 0;
        let f = extract_front(&pop, m, |_| {
            calls += 1;
            DimReport {
                output_unit: UnitVector::Joker,
                internal_violations: 1,
                target_mismatch: Rational64::from_integer(0),
            }
        });
        assert_eq!(calls, 2);
        assert_eq!(f.members.len(), 2);
        assert_eq!(f.pct_violating(), 100.0);
        assert_eq!(f.mean_constants(), 0.5);
    }

    #[test]
    fn dominated_individuals_excluded() {
        let m = Mode::Culling;
        let pop = vec![ind("x0", 1.0, Some(0), m), ind("(x0 * x0)", 3.0, Some(0), m)];
        let f = extract_front(&pop, m, no_analysis);
        assert_eq!(f.members.len(), 1);
        assert_eq!(f.members[0].complexity(), 1);
    }

    #[test]
    #[should_panic(expected = "empty population")]
    fn empty_population_asserted() {
        extract_front(&[], Mode::Baseline, no_analysis);
    }
}
