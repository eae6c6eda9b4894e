//! Exact finite-horizon machinery for random walks on a lattice `h Z`.
//!
//! The walk `X_n = xi_1 + ... + xi_n` has i.i.d. steps with finite support
//! on multiples of `h`. All state is kept as integer lattice levels, so the
//! indicator reward is evaluated by exact integer comparison.
//!
//! * [`classify_skew`] decides whether `xi >= -xi` or `xi <= -xi` in the
//!   usual stochastic order.
//! * [`law`] builds the joint law of `(M_n, X_n)` and the drawdown chain.
//! * [`values`] evaluates `G(k, z) = E f(z v M_k)` and
//!   `D(k, z) = E f(z v M_k - X_k)`.
//! * [`snell`] solves the stopping problem by backward induction on the
//!   drawdown `Z_n = M_n - X_n`; [`oracle`] re-solves it on the full
//!   history tree.
//! * [`verify`] runs the bang-bang verifier and the inequality suite.

pub mod law;
pub mod oracle;
pub mod snell;
pub mod values;
pub mod verify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::weight::{exact_from_decimal_f64, parse_exact, Weight};

pub use law::{drawdown_law, drawdown_step_law, joint_law_max_end, joint_laws_up_to, JointLaw};
pub use oracle::{brute_force_value, rule_value};
pub use snell::{markov_rule_value, snell_solve, PredictionProblem, SnellCell, SnellSolution, TieBreak};
pub use values::{value_d, value_g};
pub use verify::{lemma_suite, verify_bang_bang, BangBangReport, DesignatedRule, LemmaReport, LemmaRow};

/// Finite-support step law on `h Z`: atom `(k, p)` puts mass `p` on `k h`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeStepDistribution<W = f64> {
    h: f64,
    atoms: Vec<(i64, W)>,
}

impl<W: Weight> LatticeStepDistribution<W> {
    /// Atoms are sorted by `k`; `k` values must be distinct, masses
    /// nonnegative and summing to one (exactly in the rational mode).
    pub fn new(h: f64, mut atoms: Vec<(i64, W)>) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            bail!(Argument, "lattice mesh h must be positive, got {h}");
        }
        if atoms.is_empty() {
            bail!(Argument, "step law needs at least one atom");
        }
        atoms.sort_by_key(|(k, _)| *k);
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            bail!(Argument, "atom locations must be distinct");
        }
        if atoms.iter().any(|(_, p)| *p < W::zero()) {
            bail!(Argument, "atom masses must be nonnegative");
        }
        let total = atoms.iter().fold(W::zero(), |s, (_, p)| s + p.clone());
        if !total.eq_tol(&W::one()) {
            bail!(Argument, "atom masses sum to {}, not 1", total.to_f64());
        }
        Ok(LatticeStepDistribution { h, atoms })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn atoms(&self) -> &[(i64, W)] {
        &self.atoms
    }

    /// Atoms with nonzero mass.
    pub(crate) fn live_atoms(&self) -> impl Iterator<Item = &(i64, W)> {
        self.atoms.iter().filter(|(_, p)| !p.is_zero())
    }

    pub fn max_abs_step(&self) -> i64 {
        self.live_atoms().map(|(k, _)| k.abs()).max().unwrap_or(0)
    }

    pub fn support_size(&self) -> usize {
        self.live_atoms().count()
    }

    /// Mirror image `k -> -k` with the same masses.
    pub fn dual(&self) -> Self {
        let atoms = self.atoms.iter().rev().map(|(k, p)| (-k, p.clone())).collect();
        LatticeStepDistribution { h: self.h, atoms }
    }

    pub fn to_f64(&self) -> LatticeStepDistribution<f64> {
        LatticeStepDistribution {
            h: self.h,
            atoms: self.atoms.iter().map(|(k, p)| (*k, p.to_f64())).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(k, p)| *k as f64 * self.h * p.to_f64()).sum()
    }

    /// `P(xi > a h)` and `P(xi < -a h)` for an integer threshold `a`.
    fn tails(&self, a: i64) -> (W, W) {
        let mut up = W::zero();
        let mut down = W::zero();
        for (k, p) in &self.atoms {
            if *k > a {
                up = up + p.clone();
            }
            if *k < -a {
                down = down + p.clone();
            }
        }
        (up, down)
    }
}

/// Mirror image of a step law.
pub fn dual_distribution<W: Weight>(dist: &LatticeStepDistribution<W>) -> LatticeStepDistribution<W> {
    dist.dual()
}

/// Position of a step law relative to its mirror image in the stochastic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkewClass {
    /// `xi >= -xi`: `P(xi > a) >= P(xi < -a)` for every real `a`.
    RightSkew,
    /// `xi <= -xi`.
    LeftSkew,
    /// `xi` and `-xi` have the same law.
    Symmetric,
    /// Neither order holds.
    Neither,
}

/// [`SkewClass`] together with the thresholds that refute each order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewAnalysis {
    pub class: SkewClass,
    /// A threshold `a` (in step units, not lattice units) with
    /// `P(xi > a) < P(xi < -a)`, if any.
    pub right_witness: Option<f64>,
    /// A threshold `a` with `P(xi > a) > P(xi < -a)`, if any.
    pub left_witness: Option<f64>,
}

/// Both tail functions are right-continuous step functions whose jumps sit
/// at the support points and their negatives, so comparing them at those
/// thresholds decides the order exactly.
pub fn skew_analysis<W: Weight>(dist: &LatticeStepDistribution<W>) -> SkewAnalysis {
    let mut thresholds: Vec<i64> = dist.atoms.iter().flat_map(|(k, _)| [*k, -*k]).collect();
    thresholds.sort_unstable();
    thresholds.dedup();

    let mut right_witness = None;
    let mut left_witness = None;
    for &a in &thresholds {
        let (up, down) = dist.tails(a);
        if right_witness.is_none() && !up.ge_tol(&down) {
            right_witness = Some(a as f64 * dist.h);
        }
        if left_witness.is_none() && !down.ge_tol(&up) {
            left_witness = Some(a as f64 * dist.h);
        }
    }

    let mirror: BTreeMap<i64, &W> = dist.atoms.iter().map(|(k, p)| (*k, p)).collect();
    let zero = W::zero();
    let symmetric = dist.atoms.iter().all(|(k, p)| {
        let q = mirror.get(&-k).copied().unwrap_or(&zero);
        p.eq_tol(q)
    });

    let class = if symmetric {
        SkewClass::Symmetric
    } else {
        match (right_witness, left_witness) {
            (None, _) => SkewClass::RightSkew,
            (Some(_), None) => SkewClass::LeftSkew,
            (Some(_), Some(_)) => SkewClass::Neither,
        }
    };
    SkewAnalysis { class, right_witness, left_witness }
}

pub fn classify_skew<W: Weight>(dist: &LatticeStepDistribution<W>) -> SkewClass {
    skew_analysis(dist).class
}

/// A step mass in a config file: a JSON number, or a string holding a
/// decimal or a ratio such as `"1/3"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MassValue {
    Number(f64),
    Text(String),
}

impl MassValue {
    fn to_weight<W: Weight>(&self) -> Result<W> {
        let q = match self {
            MassValue::Number(x) if !W::EXACT => return W::from_f64(*x),
            MassValue::Number(x) => exact_from_decimal_f64(*x)?,
            MassValue::Text(s) => parse_exact(s)?,
        };
        Ok(W::from_exact(&q))
    }
}

/// Config-file form `{"h": 1.0, "atoms": [[1, 0.6], [-1, 0.4]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub h: f64,
    pub atoms: Vec<(i64, MassValue)>,
}

impl LatticeSpec {
    pub fn build<W: Weight>(&self) -> Result<LatticeStepDistribution<W>> {
        let atoms = self
            .atoms
            .iter()
            .map(|(k, m)| Ok((*k, m.to_weight::<W>()?)))
            .collect::<Result<Vec<_>>>()?;
        LatticeStepDistribution::new(self.h, atoms)
    }
}

impl From<&LatticeStepDistribution<f64>> for LatticeSpec {
    fn from(d: &LatticeStepDistribution<f64>) -> Self {
        LatticeSpec { h: d.h, atoms: d.atoms.iter().map(|(k, p)| (*k, MassValue::Number(*p))).collect() }
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    pub use crate::weight::Exact;

    pub fn bernoulli(p: f64) -> LatticeStepDistribution<f64> {
        LatticeStepDistribution::new(1.0, vec![(1, p), (-1, 1.0 - p)]).unwrap()
    }

    pub fn example_one() -> LatticeStepDistribution<f64> {
        LatticeStepDistribution::new(1.0, vec![(3, 1.0 / 3.0), (-1, 2.0 / 3.0)]).unwrap()
    }

    pub fn q(n: i64, d: i64) -> Exact {
        Exact::new(n.into(), d.into())
    }

    pub fn example_one_exact() -> LatticeStepDistribution<Exact> {
        LatticeStepDistribution::new(1.0, vec![(3, q(1, 3)), (-1, q(2, 3))]).unwrap()
    }
}
