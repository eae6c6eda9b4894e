//! Optimal stopping by backward induction on the drawdown chain.
//!
//! After time `n` the walk restarts: `M_N - X_n = Z_n v M'_{N-n}` where
//! `M'` is the running maximum of the fresh walk `X_{n+j} - X_n`. Hence
//! `E[f(M_N - X_n) | F_n] = G(N - n, Z_n)`. The problem is therefore a
//! Markov stopping problem for `Z_n` with gain `G(N - n, z)`, solved on the
//! states actually reachable from `Z_0 = 0`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::lattice::law::{check_range, drawdown_step_law, expect_levels, joint_laws_up_to};
use crate::lattice::LatticeStepDistribution;
use crate::reward::RewardSpec;
use crate::weight::{expectation, Weight};

/// `sup_tau E f(M_N - X_tau)` over stopping times `tau <= N` of the walk.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionProblem<W = f64> {
    dist: LatticeStepDistribution<W>,
    horizon: usize,
    reward: RewardSpec,
}

impl<W: Weight> PredictionProblem<W> {
    pub fn new(dist: LatticeStepDistribution<W>, horizon: usize, reward: RewardSpec) -> Result<Self> {
        if horizon == 0 {
            bail!(Argument, "horizon must be at least 1");
        }
        reward.validate_admissible()?;
        // fails early for rewards the exact mode cannot represent
        W::reward(&reward, 0, dist.h())?;
        check_range(&dist, horizon)?;
        Ok(PredictionProblem { dist, horizon, reward })
    }

    pub fn dist(&self) -> &LatticeStepDistribution<W> {
        &self.dist
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn reward(&self) -> &RewardSpec {
        &self.reward
    }

    /// The same problem for the mirrored walk.
    pub fn dual(&self) -> Self {
        PredictionProblem { dist: self.dist.dual(), horizon: self.horizon, reward: self.reward.clone() }
    }
}

/// How ties between stopping and continuing are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Stop whenever stopping is at least as good as continuing (the
    /// smallest optimal stopping time).
    Stop,
}

/// One state `(n, z)` of the solved problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SnellCell<W = f64> {
    /// Drawdown in lattice units.
    pub z: i64,
    /// Snell envelope `V(n, z)`.
    pub value: W,
    /// `G(N - n, z)`.
    pub stop_value: W,
    /// `E V(n + 1, (z - xi)^+)`; absent at the horizon.
    pub continuation: Option<W>,
    pub stop: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnellSolution<W = f64> {
    /// `V(0, 0)`.
    pub value: W,
    /// `table[n]` lists the reachable states at time `n`, sorted by `z`.
    pub table: Vec<Vec<SnellCell<W>>>,
    pub tie_break: TieBreak,
}

impl<W: Weight> SnellSolution<W> {
    pub fn cell(&self, n: usize, z: i64) -> Option<&SnellCell<W>> {
        let row = self.table.get(n)?;
        row.binary_search_by_key(&z, |c| c.z).ok().map(|i| &row[i])
    }

    /// Reachable drawdowns at which the optimal rule stops at time `n`.
    pub fn stop_region(&self, n: usize) -> Vec<i64> {
        self.table.get(n).map(|r| r.iter().filter(|c| c.stop).map(|c| c.z).collect()).unwrap_or_default()
    }
}

/// Reachable drawdown states, one-step transitions and the gain table.
struct DrawdownChain<W> {
    reachable: Vec<BTreeSet<i64>>,
    transitions: HashMap<i64, Vec<(i64, W)>>,
    /// `max_marginals[k]` is the law of `M_k`.
    max_marginals: Vec<BTreeMap<i64, W>>,
}

impl<W: Weight> DrawdownChain<W> {
    fn build(p: &PredictionProblem<W>) -> Result<Self> {
        let n_max = p.horizon;
        let mut reachable = vec![BTreeSet::from([0i64])];
        let mut transitions: HashMap<i64, Vec<(i64, W)>> = HashMap::new();
        for n in 0..n_max {
            let mut next = BTreeSet::new();
            for &z in &reachable[n] {
                let t = transitions
                    .entry(z)
                    .or_insert_with(|| drawdown_step_law(&p.dist, z).into_iter().collect());
                next.extend(t.iter().map(|(z1, _)| *z1));
            }
            reachable.push(next);
        }
        let max_marginals = joint_laws_up_to(&p.dist, n_max)?.iter().map(|l| l.max_marginal()).collect();
        Ok(DrawdownChain { reachable, transitions, max_marginals })
    }

    /// `G(k, z)`.
    fn gain(&self, f: &RewardSpec, h: f64, k: usize, z: i64) -> Result<W> {
        expect_levels(self.max_marginals[k].iter().map(|(m, p)| (p.clone(), z.max(*m))), f, h)
    }

    fn continuation(&self, z: i64, next: &BTreeMap<i64, W>) -> W {
        expectation(self.transitions[&z].iter().map(|(z1, q)| (q.clone(), next[z1].clone())))
    }
}

/// Solves the stopping problem, returning the Snell envelope on every
/// reachable state together with the stop/continue decision.
pub fn snell_solve<W: Weight>(p: &PredictionProblem<W>) -> Result<SnellSolution<W>> {
    let chain = DrawdownChain::build(p)?;
    let (f, h, n_max) = (&p.reward, p.dist.h(), p.horizon);

    let mut table: Vec<Vec<SnellCell<W>>> = vec![Vec::new(); n_max + 1];
    let mut next: BTreeMap<i64, W> = BTreeMap::new();
    for n in (0..=n_max).rev() {
        let mut row = Vec::with_capacity(chain.reachable[n].len());
        let mut values = BTreeMap::new();
        for &z in &chain.reachable[n] {
            let stop_value = chain.gain(f, h, n_max - n, z)?;
            let cell = if n == n_max {
                SnellCell { z, value: stop_value.clone(), stop_value, continuation: None, stop: true }
            } else {
                let cont = chain.continuation(z, &next);
                let stop = stop_value.ge_tol(&cont);
                let value = if stop { W::max_of(stop_value.clone(), cont.clone()) } else { cont.clone() };
                SnellCell { z, value, stop_value, continuation: Some(cont), stop }
            };
            values.insert(z, cell.value.clone());
            row.push(cell);
        }
        table[n] = row;
        next = values;
    }
    let value = next[&0].clone();
    Ok(SnellSolution { value, table, tie_break: TieBreak::Stop })
}

/// Exact value of the Markov rule "stop at the first `n` with
/// `stop(n, Z_n)`", forced to stop at the horizon. `Z_n` is in lattice units.
pub fn markov_rule_value<W: Weight>(p: &PredictionProblem<W>, stop: impl Fn(usize, i64) -> bool) -> Result<W> {
    let chain = DrawdownChain::build(p)?;
    let (f, h, n_max) = (&p.reward, p.dist.h(), p.horizon);
    let mut next: BTreeMap<i64, W> = BTreeMap::new();
    for n in (0..=n_max).rev() {
        let mut values = BTreeMap::new();
        for &z in &chain.reachable[n] {
            let v = if n == n_max || stop(n, z) {
                chain.gain(f, h, n_max - n, z)?
            } else {
                chain.continuation(z, &next)
            };
            values.insert(z, v);
        }
        next = values;
    }
    Ok(next[&0].clone())
}
