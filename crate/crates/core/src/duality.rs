//! A process and its dual (the mirrored process): the dominating coupling
//! and the time-reversal identity.
//!
//! If `xi >= -xi` stochastically, the steps can be realised together with
//! dual steps `xi~` (distributed as `-xi`) such that `xi >= xi~` pointwise.
//! Summing gives `X_t - X_s >= X~_t - X~_s`, hence `M >= M~` and
//! `Z = M - X <= Z~ = M~ - X~`. Reversing time shows that
//! `(M_n - X_n, X_n)` has the law of `(M~_n, -X~_n)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::lattice::{joint_law_max_end, skew_analysis, LatticeStepDistribution, SkewClass};
use crate::rng::{substream, Stream};
use crate::weight::{abs_diff, Weight};

/// Joint law of a step and its coupled dual step, in lattice units.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledStepLaw<W = f64> {
    h: f64,
    /// `(xi, xi~, p)` with `xi >= xi~`.
    joint_atoms: Vec<(i64, i64, W)>,
}

impl<W: Weight> CoupledStepLaw<W> {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn joint_atoms(&self) -> &[(i64, i64, W)] {
        &self.joint_atoms
    }

    /// Law of the first coordinate.
    pub fn base_marginal(&self) -> BTreeMap<i64, W> {
        merge(self.joint_atoms.iter().map(|(a, _, p)| (*a, p.clone())))
    }

    /// Law of the second coordinate.
    pub fn dual_marginal(&self) -> BTreeMap<i64, W> {
        merge(self.joint_atoms.iter().map(|(_, b, p)| (*b, p.clone())))
    }
}

fn merge<W: Weight>(it: impl Iterator<Item = (i64, W)>) -> BTreeMap<i64, W> {
    let mut out: BTreeMap<i64, W> = BTreeMap::new();
    for (k, p) in it {
        match out.get_mut(&k) {
            Some(v) => *v = v.clone() + p,
            None => {
                out.insert(k, p);
            }
        }
    }
    out
}

/// Comonotone coupling `xi = F^-1(U)`, `xi~ = F~^-1(U)` of the step law and
/// its mirror image, built by overlaying the two quantile partitions of
/// `(0, 1]`.
pub fn dominating_coupling<W: Weight>(dist: &LatticeStepDistribution<W>) -> Result<CoupledStepLaw<W>> {
    match skew_analysis(dist).class {
        SkewClass::RightSkew | SkewClass::Symmetric => {}
        SkewClass::LeftSkew => bail!(
            Precondition,
            "stochastic domination coupling requires xi >=_st -xi; couple the mirrored law and swap the roles"
        ),
        SkewClass::Neither => bail!(Precondition, "stochastic domination coupling requires xi >=_st -xi"),
    }
    let base: Vec<(i64, W)> = dist.live_atoms().cloned().collect();
    let dual: Vec<(i64, W)> = dist.dual().live_atoms().cloned().collect();

    let mut joint = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut ri = base[0].1.clone();
    let mut rj = dual[0].1.clone();
    while i < base.len() && j < dual.len() {
        let take = if ri <= rj { ri.clone() } else { rj.clone() };
        if !take.is_zero() {
            joint.push((base[i].0, dual[j].0, take.clone()));
        }
        ri = ri - take.clone();
        rj = rj - take;
        // in floating mode a leftover below the slack counts as exhausted
        if ri.eq_tol(&W::zero()) {
            i += 1;
            if let Some(a) = base.get(i) {
                ri = a.1.clone();
            }
        }
        if rj.eq_tol(&W::zero()) {
            j += 1;
            if let Some(a) = dual.get(j) {
                rj = a.1.clone();
            }
        }
    }
    if let Some((a, b, _)) = joint.iter().find(|(a, b, _)| a < b) {
        bail!(Internal, "quantile overlay produced xi = {a} < xi~ = {b}");
    }
    Ok(CoupledStepLaw { h: dist.h(), joint_atoms: joint })
}

/// Coupled trajectories of a process and its dual on a common time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledPathPair {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub x_dual: Vec<f64>,
    pub m: Vec<f64>,
    pub m_dual: Vec<f64>,
    pub z: Vec<f64>,
    pub z_dual: Vec<f64>,
}

impl CoupledPathPair {
    /// Builds the maxima and drawdowns from the two paths (both starting at 0).
    pub fn from_paths(times: Vec<f64>, x: Vec<f64>, x_dual: Vec<f64>) -> Self {
        let m = running_max(&x);
        let m_dual = running_max(&x_dual);
        let z = m.iter().zip(&x).map(|(a, b)| a - b).collect();
        let z_dual = m_dual.iter().zip(&x_dual).map(|(a, b)| a - b).collect();
        CoupledPathPair { times, x, x_dual, m, m_dual, z, z_dual }
    }

    /// Checks increment domination, `M >= M~` and `Z <= Z~`, allowing an
    /// absolute slack `tol` for floating-point accumulation.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        // X - X~ nondecreasing is equivalent to domination of all increments
        let gap: Vec<f64> = self.x.iter().zip(&self.x_dual).map(|(a, b)| a - b).collect();
        for (i, w) in gap.windows(2).enumerate() {
            if w[1] < w[0] - tol {
                bail!(Internal, "increment domination fails on [{}, {}]", self.times[i], self.times[i + 1]);
            }
        }
        for i in 0..self.times.len() {
            if self.m[i] < self.m_dual[i] - tol {
                bail!(Internal, "M < M~ at t = {}", self.times[i]);
            }
            if self.z[i] > self.z_dual[i] + tol {
                bail!(Internal, "Z > Z~ at t = {}", self.times[i]);
            }
        }
        Ok(())
    }
}

pub(crate) fn running_max(x: &[f64]) -> Vec<f64> {
    let mut m = 0.0f64;
    x.iter()
        .map(|v| {
            m = m.max(*v);
            m
        })
        .collect()
}

/// `n` joint steps from the coupled law, using path stream 0 of `seed`.
pub fn couple_paths<W: Weight>(law: &CoupledStepLaw<W>, n: usize, seed: u64) -> Result<CoupledPathPair> {
    let mut rng = substream(seed, Stream::Paths, 0);
    let cdf: Vec<f64> = law
        .joint_atoms
        .iter()
        .scan(0.0, |acc, (_, _, p)| {
            *acc += p.to_f64();
            Some(*acc)
        })
        .collect();
    let (mut a, mut b) = (0i64, 0i64);
    let mut levels = vec![(0i64, 0i64)];
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * cdf.last().copied().unwrap_or(1.0);
        let idx = cdf.partition_point(|c| *c <= u).min(cdf.len() - 1);
        let (s, t, _) = &law.joint_atoms[idx];
        a += s;
        b += t;
        levels.push((a, b));
    }
    let h = law.h;
    let times = (0..=n).map(|i| i as f64).collect();
    let pair = CoupledPathPair::from_paths(
        times,
        levels.iter().map(|(a, _)| *a as f64 * h).collect(),
        levels.iter().map(|(_, b)| *b as f64 * h).collect(),
    );
    // lattice levels are exact integers times h, so no slack is needed
    pair.check_invariants(0.0)?;
    Ok(pair)
}

/// Law tables of `(M_n - X_n, X_n)` and of `(M~_n, -X~_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReversalTables {
    pub n: usize,
    /// `((M_n - X_n, X_n), p)` in lattice units.
    pub drawdown_end: Vec<((i64, i64), f64)>,
    /// `((M~_n, -X~_n), p)` in lattice units.
    pub dual_max_end: Vec<((i64, i64), f64)>,
    pub max_abs_diff: f64,
    pub equal: bool,
}

/// Computes both tables exactly (rational mode) or in floating point and
/// compares them entry by entry.
pub fn time_reversal_check_exact<W: Weight>(dist: &LatticeStepDistribution<W>, n: usize) -> Result<ReversalTables> {
    let left: BTreeMap<(i64, i64), W> =
        merge_pairs(joint_law_max_end(dist, n)?.entries().iter().map(|((m, x), p)| ((m - x, *x), p.clone())));
    let right: BTreeMap<(i64, i64), W> =
        merge_pairs(joint_law_max_end(&dist.dual(), n)?.entries().iter().map(|((m, x), p)| ((*m, -x), p.clone())));

    let keys: BTreeSet<(i64, i64)> = left.keys().chain(right.keys()).copied().collect();
    let zero = W::zero();
    let mut equal = true;
    let mut max_abs_diff = 0.0f64;
    for k in &keys {
        let a = left.get(k).unwrap_or(&zero);
        let b = right.get(k).unwrap_or(&zero);
        if !a.eq_tol(b) {
            equal = false;
        }
        max_abs_diff = max_abs_diff.max(abs_diff(a, b));
    }
    Ok(ReversalTables {
        n,
        drawdown_end: left.into_iter().map(|(k, p)| (k, p.to_f64())).collect(),
        dual_max_end: right.into_iter().map(|(k, p)| (k, p.to_f64())).collect(),
        max_abs_diff,
        equal,
    })
}

/// Monte Carlo comparison of `(M_T - X_T, X_T)` for `X` against
/// `(M~_T, -X~_T)` for independently simulated dual paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReversalReport {
    pub paths: usize,
    pub horizon: f64,
    pub scheme: String,
    /// Largest gap between the two joint empirical CDFs over the grid.
    pub max_cdf_gap: f64,
    /// Where the largest gap occurs, `(drawdown level, end level)`.
    pub worst_point: (f64, f64),
    pub threshold: f64,
    pub pass: bool,
}

/// Failure probability behind [`time_reversal_check_mc`]'s threshold.
pub const REVERSAL_DELTA: f64 = 1e-3;

/// Compares the joint empirical CDFs on a 19 x 19 grid of pooled 5%..95%
/// quantiles; the threshold is `4 sqrt(ln(2 / delta) / paths)`. Dual paths
/// use the same seed with indices offset by
/// [`DUAL_INDEX_OFFSET`](crate::levy::simulate::DUAL_INDEX_OFFSET).
pub fn time_reversal_check_mc(
    triplet: &crate::levy::LevyTriplet,
    horizon: f64,
    scheme: &crate::levy::SimScheme,
    paths: usize,
    seed: u64,
) -> Result<McReversalReport> {
    use crate::levy::simulate::{PathSimulator, DUAL_INDEX_OFFSET};
    use rayon::prelude::*;
    if paths < 100 {
        bail!(Argument, "the reversal check needs at least 100 paths, got {paths}");
    }
    let base = PathSimulator::new(triplet, horizon, scheme)?;
    let dual = PathSimulator::new(&triplet.dual(), horizon, scheme)?;
    let left: Vec<(f64, f64)> = (0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let p = base.simulate(seed, i);
            (p.terminal_max() - p.terminal(), p.terminal())
        })
        .collect();
    let right: Vec<(f64, f64)> = (0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let p = dual.simulate(seed, DUAL_INDEX_OFFSET + i);
            (p.terminal_max(), -p.terminal())
        })
        .collect();
    let grid = |coord: fn(&(f64, f64)) -> f64| {
        let mut v: Vec<f64> = left.iter().chain(&right).map(coord).collect();
        v.sort_by(f64::total_cmp);
        (1..20).map(|k| v[(k * v.len() / 20).min(v.len() - 1)]).collect::<Vec<f64>>()
    };
    let ga = grid(|p| p.0);
    let gb = grid(|p| p.1);
    let ecdf = |s: &[(f64, f64)], a: f64, b: f64| s.iter().filter(|p| p.0 <= a && p.1 <= b).count() as f64 / s.len() as f64;
    let mut max_cdf_gap = 0.0;
    let mut worst_point = (0.0, 0.0);
    for &a in &ga {
        for &b in &gb {
            let gap = (ecdf(&left, a, b) - ecdf(&right, a, b)).abs();
            if gap > max_cdf_gap {
                max_cdf_gap = gap;
                worst_point = (a, b);
            }
        }
    }
    let threshold = 4.0 * ((2.0 / REVERSAL_DELTA).ln() / paths as f64).sqrt();
    Ok(McReversalReport {
        paths,
        horizon,
        scheme: scheme.label(),
        max_cdf_gap,
        worst_point,
        threshold,
        pass: max_cdf_gap <= threshold,
    })
}

fn merge_pairs<W: Weight>(it: impl Iterator<Item = ((i64, i64), W)>) -> BTreeMap<(i64, i64), W> {
    let mut out: BTreeMap<(i64, i64), W> = BTreeMap::new();
    for (k, p) in it {
        match out.get_mut(&k) {
            Some(v) => *v = v.clone() + p,
            None => {
                out.insert(k, p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::testing::*;

    #[test]
    fn bernoulli_overlay() {
        let c = dominating_coupling(&bernoulli(0.6)).unwrap();
        let atoms: Vec<(i64, i64, f64)> = c.joint_atoms().to_vec();
        assert_eq!(atoms.len(), 3);
        let expect = [(-1, -1, 0.4), (1, -1, 0.2), (1, 1, 0.4)];
        for ((a, b, p), (ea, eb, ep)) in atoms.iter().zip(expect) {
            assert_eq!((*a, *b), (ea, eb));
            assert!((p - ep).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_overlay_marginals() {
        let d = LatticeStepDistribution::new(1.0, vec![(3, q(1, 2)), (-1, q(1, 3)), (1, q(1, 6))]).unwrap();
        let c = dominating_coupling(&d).unwrap();
        let base: BTreeMap<i64, Exact> = d.atoms().iter().cloned().collect();
        let dual: BTreeMap<i64, Exact> = d.dual().atoms().iter().cloned().collect();
        assert_eq!(c.base_marginal(), base);
        assert_eq!(c.dual_marginal(), dual);
        assert!(c.joint_atoms().iter().all(|(a, b, _)| a >= b));
    }

    #[test]
    fn trivial_couplings() {
        let c = dominating_coupling(&bernoulli(0.5)).unwrap();
        assert!(c.joint_atoms().iter().all(|(a, b, _)| a == b));
        let d = LatticeStepDistribution::new(1.0, vec![(2, 1.0)]).unwrap();
        assert_eq!(dominating_coupling(&d).unwrap().joint_atoms(), &[(2, -2, 1.0)]);
        assert!(dominating_coupling(&bernoulli(0.4)).is_err());
        assert!(dominating_coupling(&example_one()).is_err());
    }

    #[test]
    fn coupled_paths() {
        let c = dominating_coupling(&bernoulli(0.6)).unwrap();
        let p = couple_paths(&c, 100, 1).unwrap();
        assert!(p.z.iter().zip(&p.z_dual).all(|(a, b)| a <= b));
        let s = dominating_coupling(&bernoulli(0.5)).unwrap();
        let p = couple_paths(&s, 50, 2).unwrap();
        assert_eq!(p.x, p.x_dual);
        let p = couple_paths(&c, 0, 3).unwrap();
        assert_eq!(p.x, vec![0.0]);
        assert_eq!(p.z_dual, vec![0.0]);
    }

    #[test]
    fn reversal_tables() {
        let r = time_reversal_check_exact(&bernoulli(0.6), 1).unwrap();
        assert!(r.equal);
        assert_eq!(r.drawdown_end.len(), 2);
        assert_eq!(r.drawdown_end[0].0, (0, 1));
        assert_eq!(r.drawdown_end[1].0, (1, -1));
        let r = time_reversal_check_exact(&example_one_exact(), 0).unwrap();
        assert_eq!(r.drawdown_end, vec![((0, 0), 1.0)]);
        let r = time_reversal_check_exact(&example_one_exact(), 3).unwrap();
        assert!(r.equal && r.max_abs_diff == 0.0);
    }

    #[test]
    fn reversal_in_law_for_levy_paths() {
        use crate::levy::{LevyMeasureSpec, LevyTriplet, SimScheme};
        let t = LevyTriplet::new(0.3, 0.5, LevyMeasureSpec { atoms: vec![(1.0, 1.0), (-0.4, 1.5)], pieces: vec![] }).unwrap();
        let r = time_reversal_check_mc(&t, 1.0, &SimScheme::interlacing(20).with_bridge(), 4000, 17).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.threshold < 0.2 && r.max_cdf_gap > 0.0);
        assert!(time_reversal_check_mc(&t, 1.0, &SimScheme::interlacing(20), 50, 1).is_err());
    }
}
