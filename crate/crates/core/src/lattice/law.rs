//! Exact laws of the running maximum, the endpoint and the drawdown.

use std::collections::BTreeMap;

use crate::error::{bail, Result};
use crate::lattice::LatticeStepDistribution;
use crate::reward::RewardSpec;
use crate::weight::{expectation, Weight};

/// Largest `n * max|k|` the joint-law builders accept.
pub const LATTICE_RANGE_LIMIT: i64 = 2048;

pub(crate) fn check_range<W: Weight>(dist: &LatticeStepDistribution<W>, n: usize) -> Result<()> {
    let span = (n as i64).saturating_mul(dist.max_abs_step());
    if span > LATTICE_RANGE_LIMIT {
        bail!(
            Resource,
            "lattice range n * max|k| = {span} exceeds the limit {LATTICE_RANGE_LIMIT}"
        );
    }
    Ok(())
}

/// Law of `(M_n, X_n)` in lattice units, with `M_n = max(0, X_1, ..., X_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointLaw<W = f64> {
    n: usize,
    entries: BTreeMap<(i64, i64), W>,
}

impl<W: Weight> JointLaw<W> {
    /// The point mass at `(0, 0)`.
    pub fn initial() -> Self {
        JointLaw { n: 0, entries: BTreeMap::from([((0, 0), W::one())]) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `((m, x), p)` with `m >= max(x, 0)`.
    pub fn entries(&self) -> &BTreeMap<(i64, i64), W> {
        &self.entries
    }

    pub fn step(&self, dist: &LatticeStepDistribution<W>) -> Self {
        let mut next: BTreeMap<(i64, i64), W> = BTreeMap::new();
        for ((m, x), p) in &self.entries {
            for (k, q) in dist.live_atoms() {
                let x1 = x + k;
                let key = ((*m).max(x1), x1);
                let w = p.clone() * q.clone();
                match next.get_mut(&key) {
                    Some(v) => *v = v.clone() + w,
                    None => {
                        next.insert(key, w);
                    }
                }
            }
        }
        JointLaw { n: self.n + 1, entries: next }
    }

    pub fn total(&self) -> W {
        self.entries.values().fold(W::zero(), |s, p| s + p.clone())
    }

    /// Law of `M_n`.
    pub fn max_marginal(&self) -> BTreeMap<i64, W> {
        marginal(self.entries.iter().map(|((m, _), p)| (*m, p)))
    }

    /// Law of `X_n`.
    pub fn end_marginal(&self) -> BTreeMap<i64, W> {
        marginal(self.entries.iter().map(|((_, x), p)| (*x, p)))
    }

    /// Law of the drawdown `Z_n = M_n - X_n`.
    pub fn drawdown_marginal(&self) -> BTreeMap<i64, W> {
        marginal(self.entries.iter().map(|((m, x), p)| (m - x, p)))
    }

    /// `G(n, z) = E f(z v M_n)` for a lattice level `z >= 0`.
    pub fn expect_g(&self, f: &RewardSpec, z: i64, h: f64) -> Result<W> {
        expect_levels(self.max_marginal().into_iter().map(|(m, p)| (p, z.max(m))), f, h)
    }

    /// `D(n, z) = E f(z v M_n - X_n)`.
    pub fn expect_d(&self, f: &RewardSpec, z: i64, h: f64) -> Result<W> {
        expect_levels(self.entries.iter().map(|((m, x), p)| (p.clone(), z.max(*m) - x)), f, h)
    }

    /// `E f(z v Z_n)`, the lower bound for `D(n, z)`.
    pub fn expect_drawdown(&self, f: &RewardSpec, z: i64, h: f64) -> Result<W> {
        expect_levels(self.drawdown_marginal().into_iter().map(|(d, p)| (p, z.max(d))), f, h)
    }
}

fn marginal<'a, W: Weight>(it: impl Iterator<Item = (i64, &'a W)>) -> BTreeMap<i64, W> {
    let mut out: BTreeMap<i64, W> = BTreeMap::new();
    for (key, p) in it {
        match out.get_mut(&key) {
            Some(v) => *v = v.clone() + p.clone(),
            None => {
                out.insert(key, p.clone());
            }
        }
    }
    out
}

/// `E f(level h)` over `(probability, level)` pairs.
pub(crate) fn expect_levels<W: Weight>(
    terms: impl Iterator<Item = (W, i64)>,
    f: &RewardSpec,
    h: f64,
) -> Result<W> {
    let terms = terms
        .filter(|(p, _)| !p.is_zero())
        .map(|(p, level)| Ok((p, W::reward(f, level, h)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(expectation(terms))
}

/// Laws of `(M_k, X_k)` for `k = 0..=n`.
pub fn joint_laws_up_to<W: Weight>(dist: &LatticeStepDistribution<W>, n: usize) -> Result<Vec<JointLaw<W>>> {
    check_range(dist, n)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(JointLaw::initial());
    for k in 0..n {
        let next = out[k].step(dist);
        out.push(next);
    }
    Ok(out)
}

pub fn joint_law_max_end<W: Weight>(dist: &LatticeStepDistribution<W>, n: usize) -> Result<JointLaw<W>> {
    check_range(dist, n)?;
    let mut law = JointLaw::initial();
    for _ in 0..n {
        law = law.step(dist);
    }
    Ok(law)
}

/// One step of the drawdown chain: the law of `(z - xi)^+` in lattice units.
pub fn drawdown_step_law<W: Weight>(dist: &LatticeStepDistribution<W>, z: i64) -> BTreeMap<i64, W> {
    marginal(dist.live_atoms().map(|(k, p)| ((z - k).max(0), p)))
}

/// Law of `Z_n` obtained by running the drawdown chain from `0`.
pub fn drawdown_law<W: Weight>(dist: &LatticeStepDistribution<W>, n: usize) -> Result<BTreeMap<i64, W>> {
    check_range(dist, n)?;
    let mut law: BTreeMap<i64, W> = BTreeMap::from([(0, W::one())]);
    for _ in 0..n {
        let mut next: BTreeMap<i64, W> = BTreeMap::new();
        for (z, p) in &law {
            for (z1, q) in drawdown_step_law(dist, *z) {
                let w = p.clone() * q;
                match next.get_mut(&z1) {
                    Some(v) => *v = v.clone() + w,
                    None => {
                        next.insert(z1, w);
                    }
                }
            }
        }
        law = next;
    }
    Ok(law)
}
