//! Reference solutions on the full history tree.
//!
//! These routines never use the drawdown reduction or the value function
//! `G`: the payoff of stopping at a node is computed from the law of the
//! final maximum `M_N` over the subtree below that node. They are slow
//! (exponential in the horizon) and exist to cross-check [`super::snell`].

use std::collections::BTreeMap;

use crate::error::{bail, Result};
use crate::lattice::snell::PredictionProblem;
use crate::montecarlo::rules::{RuleState, StoppingRuleSpec};
use crate::weight::Weight;

/// Largest number of tree nodes the oracles will visit.
pub const TREE_NODE_LIMIT: f64 = 1e7;

struct Tree<'a, W> {
    p: &'a PredictionProblem<W>,
    atoms: Vec<(i64, W)>,
}

impl<'a, W: Weight> Tree<'a, W> {
    fn new(p: &'a PredictionProblem<W>) -> Result<Self> {
        let atoms: Vec<(i64, W)> = p.dist().live_atoms().cloned().collect();
        let s = atoms.len() as f64;
        let nodes: f64 = (0..=p.horizon()).map(|n| s.powi(n as i32)).sum();
        if nodes > TREE_NODE_LIMIT {
            bail!(Resource, "history tree has {nodes:.3e} nodes, above the limit {TREE_NODE_LIMIT:.0e}");
        }
        Ok(Tree { p, atoms })
    }

    fn reward(&self, level: i64) -> Result<W> {
        W::reward(self.p.reward(), level, self.p.dist().h())
    }

    /// `E[f(M_N - x) | node]` from the conditional law of `M_N`.
    fn stop_payoff(&self, final_max: &BTreeMap<i64, W>, x: i64) -> Result<W> {
        let mut acc = W::zero();
        for (m, q) in final_max {
            if !q.is_zero() {
                acc = acc + q.clone() * self.reward(m - x)?;
            }
        }
        Ok(acc)
    }

    fn add_scaled(into: &mut BTreeMap<i64, W>, from: BTreeMap<i64, W>, p: &W) {
        for (m, q) in from {
            let w = p.clone() * q;
            match into.get_mut(&m) {
                Some(v) => *v = v.clone() + w,
                None => {
                    into.insert(m, w);
                }
            }
        }
    }

    /// Conditional law of `M_N` below the node `(n, m, x)`.
    fn final_max(&self, n: usize, m: i64, x: i64) -> BTreeMap<i64, W> {
        if n == self.p.horizon() {
            return BTreeMap::from([(m, W::one())]);
        }
        let mut out = BTreeMap::new();
        for (k, q) in &self.atoms {
            let x1 = x + k;
            Self::add_scaled(&mut out, self.final_max(n + 1, m.max(x1), x1), q);
        }
        out
    }

    /// Optimal value below `(n, m, x)` together with the law of `M_N`.
    fn optimal(&self, n: usize, m: i64, x: i64) -> Result<(BTreeMap<i64, W>, W)> {
        if n == self.p.horizon() {
            return Ok((BTreeMap::from([(m, W::one())]), self.reward(m - x)?));
        }
        let mut law = BTreeMap::new();
        let mut cont = W::zero();
        for (k, q) in &self.atoms {
            let x1 = x + k;
            let (child_law, child_value) = self.optimal(n + 1, m.max(x1), x1)?;
            Self::add_scaled(&mut law, child_law, q);
            cont = cont + q.clone() * child_value;
        }
        let stop = self.stop_payoff(&law, x)?;
        Ok((law, W::max_of(stop, cont)))
    }

    fn under_rule(&self, n: usize, m: i64, x: i64, mut state: RuleState) -> Result<W> {
        let h = self.p.dist().h();
        if state.observe(n as f64, x as f64 * h, m as f64 * h) {
            let law = self.final_max(n, m, x);
            return self.stop_payoff(&law, x);
        }
        let mut acc = W::zero();
        for (k, q) in &self.atoms {
            let x1 = x + k;
            acc = acc + q.clone() * self.under_rule(n + 1, m.max(x1), x1, state.clone())?;
        }
        Ok(acc)
    }
}

/// `sup_tau E f(M_N - X_tau)` by backward induction over every history.
pub fn brute_force_value<W: Weight>(p: &PredictionProblem<W>) -> Result<W> {
    let tree = Tree::new(p)?;
    Ok(tree.optimal(0, 0, 0)?.1)
}

/// Exact `E f(M_N - X_tau)` for a rule, evaluated on the history tree with
/// epochs `t = 0, 1, ..., N`. A randomized threshold is drawn once, from
/// path stream 0, so the tree evaluates one realisation of the rule.
pub fn rule_value<W: Weight>(p: &PredictionProblem<W>, rule: &StoppingRuleSpec) -> Result<W> {
    rule.validate()?;
    let tree = Tree::new(p)?;
    tree.under_rule(0, 0, 0, rule.start(p.horizon() as f64, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::snell::snell_solve;
    use crate::lattice::testing::*;
    use crate::lattice::LatticeStepDistribution;
    use crate::reward::RewardSpec;

    #[test]
    fn example_one_rules() {
        let p = PredictionProblem::new(example_one_exact(), 2, RewardSpec::Indicator0).unwrap();
        assert_eq!(rule_value(&p, &StoppingRuleSpec::Constant { t: 0.0 }).unwrap(), q(4, 9));
        assert_eq!(rule_value(&p, &StoppingRuleSpec::Constant { t: 2.0 }).unwrap(), q(1, 3));
        assert_eq!(brute_force_value(&p).unwrap(), q(4, 9));
    }

    #[test]
    fn oracle_matches_backward_induction() {
        let d = LatticeStepDistribution::new(0.5, vec![(2, q(1, 5)), (-1, q(1, 2)), (1, q(3, 10))]).unwrap();
        for f in [RewardSpec::Indicator0, RewardSpec::linear(-2.0)] {
            let p = PredictionProblem::new(d.clone(), 6, f).unwrap();
            assert_eq!(brute_force_value(&p).unwrap(), snell_solve(&p).unwrap().value);
        }
    }

    #[test]
    fn node_guard() {
        let d = LatticeStepDistribution::new(1.0, vec![(1, 0.25), (2, 0.25), (-1, 0.25), (-2, 0.25)]).unwrap();
        let p = PredictionProblem::new(d, 12, RewardSpec::Indicator0).unwrap();
        assert!(matches!(brute_force_value(&p), Err(crate::Error::Resource(_))));
    }
}
