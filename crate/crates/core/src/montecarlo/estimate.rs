//! Monte Carlo values of stopping rules with common random numbers.
//!
//! Every path index owns its substreams, so a path is the same whichever
//! rules look at it and however the work is split across threads. All
//! means are pairwise sums in index order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::lattice::LatticeStepDistribution;
use crate::levy::{LevyTriplet, PathSimulator, SamplePath, SimScheme};
use crate::montecarlo::rules::StoppingRuleSpec;
use crate::reward::RewardSpec;
use crate::rng::{pairwise_sum, substream, Stream};

/// Minimum number of paths for an estimate.
pub const MIN_PATHS: usize = 100;

/// Conclusions hold for the process observed at its simulated epochs.
pub const DISCRETIZATION_NOTE: &str =
    "estimates concern the process observed at its simulated epochs (grid and jump times); rules stop only at those epochs";

/// A model to simulate: a lattice random walk or a Lévy process.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Lattice { dist: LatticeStepDistribution<f64>, horizon: usize },
    Levy { triplet: LevyTriplet, horizon: f64, scheme: SimScheme },
}

impl Model {
    pub fn horizon(&self) -> f64 {
        match self {
            Model::Lattice { horizon, .. } => *horizon as f64,
            Model::Levy { horizon, .. } => *horizon,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Model::Lattice { dist, horizon } => {
                format!("lattice walk, h = {}, {} atoms, N = {horizon}", dist.h(), dist.atoms().len())
            }
            Model::Levy { horizon, scheme, .. } => format!("Lévy process, T = {horizon}, {}", scheme.label()),
        }
    }

    pub fn prepare(&self) -> Result<PreparedModel> {
        match self {
            Model::Lattice { dist, horizon } => {
                let mut acc = 0.0;
                let mut steps = Vec::new();
                let mut cum = Vec::new();
                for &(k, p) in dist.atoms() {
                    if p > 0.0 {
                        acc += p;
                        steps.push(k);
                        cum.push(acc);
                    }
                }
                Ok(PreparedModel::Lattice { h: dist.h(), steps, cum, horizon: *horizon })
            }
            Model::Levy { triplet, horizon, scheme } => Ok(PreparedModel::Levy(PathSimulator::new(triplet, *horizon, scheme)?)),
        }
    }
}

/// A model ready to produce paths by index.
#[derive(Clone, Debug)]
pub enum PreparedModel {
    Lattice { h: f64, steps: Vec<i64>, cum: Vec<f64>, horizon: usize },
    Levy(PathSimulator),
}

impl PreparedModel {
    pub fn horizon(&self) -> f64 {
        match self {
            PreparedModel::Lattice { horizon, .. } => *horizon as f64,
            PreparedModel::Levy(sim) => sim.horizon(),
        }
    }

    /// Path number `index` under `seed`. Lattice positions are integers
    /// times `h`, so `M - X` is exactly 0 at the running maximum.
    pub fn path(&self, seed: u64, index: u64) -> SamplePath {
        match self {
            PreparedModel::Levy(sim) => sim.simulate(seed, index),
            PreparedModel::Lattice { h, steps, cum, horizon } => {
                let mut rng = substream(seed, Stream::Paths, index);
                let total = *cum.last().unwrap_or(&1.0);
                let (mut k, mut top) = (0i64, 0i64);
                let mut p = SamplePath {
                    times: Vec::with_capacity(horizon + 1),
                    values: Vec::with_capacity(horizon + 1),
                    running_max: Vec::with_capacity(horizon + 1),
                    jumps: *horizon,
                };
                p.times.push(0.0);
                p.values.push(0.0);
                p.running_max.push(0.0);
                for n in 1..=*horizon {
                    let u = crate::levy::sampler::open01(&mut rng) * total;
                    let i = cum.partition_point(|&c| c < u).min(steps.len() - 1);
                    k += steps[i];
                    top = top.max(k);
                    p.times.push(n as f64);
                    p.values.push(k as f64 * h);
                    p.running_max.push(top as f64 * h);
                }
                p
            }
        }
    }
}

/// `f(M_T - X_tau)` on one path, the rule seeing the epochs in order.
pub fn rule_payoff(path: &SamplePath, f: &RewardSpec, rule: &StoppingRuleSpec, horizon: f64, index: u64) -> f64 {
    let mut state = rule.start(horizon, index);
    let last = path.times.len() - 1;
    let stop = (0..=last)
        .find(|&i| state.observe(path.times[i], path.values[i], path.running_max[i]))
        .unwrap_or(last);
    let top = path.running_max[last];
    f.eval_unchecked((top - path.values[stop]).max(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mean: f64,
    pub se: f64,
    pub ci95: (f64, f64),
    pub count: usize,
    pub seed: u64,
    pub scheme: String,
    /// Set for unbounded rewards, whose confidence intervals may be unreliable.
    pub heavy_tail_warning: bool,
}

impl EstimateReport {
    pub fn from_samples(xs: &[f64], seed: u64, scheme: String, heavy_tail_warning: bool) -> Result<Self> {
        if xs.iter().any(|x| !x.is_finite()) {
            bail!(Numeric, "non-finite payoff among the simulated paths");
        }
        let n = xs.len() as f64;
        let mean = pairwise_sum(xs) / n;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if xs.len() > 1 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
        let se = (var / n).sqrt();
        Ok(EstimateReport { mean, se, ci95: (mean - 1.96 * se, mean + 1.96 * se), count: xs.len(), seed, scheme, heavy_tail_warning })
    }
}

fn check_inputs(f: &RewardSpec, rules: &[&StoppingRuleSpec], count: usize) -> Result<()> {
    if count < MIN_PATHS {
        bail!(Argument, "need at least {MIN_PATHS} paths, got {count}");
    }
    f.validate()?;
    for r in rules {
        r.validate()?;
    }
    Ok(())
}

/// Payoffs of every rule on paths `0..count`: `out[r][i]`.
pub fn payoff_matrix(model: &PreparedModel, f: &RewardSpec, rules: &[StoppingRuleSpec], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let horizon = model.horizon();
    let rows: Vec<Vec<f64>> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let path = model.path(seed, i);
            rules.iter().map(|r| rule_payoff(&path, f, r, horizon, i)).collect()
        })
        .collect();
    (0..rules.len()).map(|r| rows.iter().map(|row| row[r]).collect()).collect()
}

/// Estimates `E f(M_T - X_tau)`.
pub fn estimate_value(model: &Model, f: &RewardSpec, rule: &StoppingRuleSpec, count: usize, seed: u64) -> Result<EstimateReport> {
    check_inputs(f, &[rule], count)?;
    let prepared = model.prepare()?;
    let m = payoff_matrix(&prepared, f, std::slice::from_ref(rule), count, seed);
    EstimateReport::from_samples(&m[0], seed, model.describe(), !f.is_bounded())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedReport {
    pub rule_a: String,
    pub rule_b: String,
    pub value_a: EstimateReport,
    pub value_b: EstimateReport,
    /// Estimate of `E[f(M - X_tauA) - f(M - X_tauB)]` on common paths.
    pub difference: EstimateReport,
    /// Paths on which A paid more / less / the same.
    pub a_better: usize,
    pub b_better: usize,
    pub ties: usize,
}

pub(crate) fn paired_from(
    a: &StoppingRuleSpec,
    b: &StoppingRuleSpec,
    va: &[f64],
    vb: &[f64],
    seed: u64,
    scheme: &str,
    heavy: bool,
) -> Result<PairedReport> {
    let diff: Vec<f64> = va.iter().zip(vb).map(|(x, y)| x - y).collect();
    Ok(PairedReport {
        rule_a: a.label(),
        rule_b: b.label(),
        value_a: EstimateReport::from_samples(va, seed, scheme.to_string(), heavy)?,
        value_b: EstimateReport::from_samples(vb, seed, scheme.to_string(), heavy)?,
        difference: EstimateReport::from_samples(&diff, seed, scheme.to_string(), heavy)?,
        a_better: diff.iter().filter(|d| **d > 0.0).count(),
        b_better: diff.iter().filter(|d| **d < 0.0).count(),
        ties: diff.iter().filter(|d| **d == 0.0).count(),
    })
}

/// Both rules on the same simulated paths.
pub fn paired_compare(
    model: &Model,
    f: &RewardSpec,
    a: &StoppingRuleSpec,
    b: &StoppingRuleSpec,
    count: usize,
    seed: u64,
) -> Result<PairedReport> {
    check_inputs(f, &[a, b], count)?;
    let prepared = model.prepare()?;
    let m = payoff_matrix(&prepared, f, &[a.clone(), b.clone()], count, seed);
    paired_from(a, b, &m[0], &m[1], seed, &model.describe(), !f.is_bounded())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::testing::bernoulli;
    use crate::lattice::{rule_value, value_d, value_g, PredictionProblem};

    #[test]
    fn lattice_estimate_matches_exact_value() {
        let model = Model::Lattice { dist: bernoulli(0.6), horizon: 10 };
        let rule = StoppingRuleSpec::Constant { t: 10.0 };
        let est = estimate_value(&model, &RewardSpec::Indicator0, &rule, 100_000, 3).unwrap();
        let exact = value_d(&bernoulli(0.6), &RewardSpec::Indicator0, 10, 0).unwrap();
        let p = PredictionProblem::new(bernoulli(0.6), 10, RewardSpec::Indicator0).unwrap();
        assert!((rule_value(&p, &rule).unwrap() - exact).abs() < 1e-12);
        assert!((est.mean - exact).abs() <= 3.0 * est.se, "{est:?} vs {exact}");
    }

    #[test]
    fn stopping_immediately_gives_g() {
        let model = Model::Lattice { dist: bernoulli(0.45), horizon: 6 };
        let f = RewardSpec::exponential(1.0);
        let est = estimate_value(&model, &f, &StoppingRuleSpec::Constant { t: 0.0 }, 50_000, 9).unwrap();
        let g = value_g(&bernoulli(0.45), &f, 6, 0).unwrap();
        assert!((est.mean - g).abs() <= 4.0 * est.se);
    }

    #[test]
    fn deterministic_drift() {
        let model = Model::Levy { triplet: LevyTriplet::brownian(1.0, 0.0).unwrap(), horizon: 1.0, scheme: SimScheme::interlacing(10) };
        let est = estimate_value(&model, &RewardSpec::exponential(1.0), &StoppingRuleSpec::Constant { t: 1.0 }, 100, 1).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.se, 0.0);
    }

    #[test]
    fn identical_rules_tie_exactly() {
        let model = Model::Lattice { dist: bernoulli(0.3), horizon: 8 };
        let r = StoppingRuleSpec::DrawdownTrigger { z: 2.0 };
        let p = paired_compare(&model, &RewardSpec::Indicator0, &r, &r, 500, 4).unwrap();
        assert_eq!((p.difference.mean, p.difference.se, p.ties), (0.0, 0.0, 500));
    }

    #[test]
    fn reward_shift_is_linear() {
        let model = Model::Lattice { dist: bernoulli(0.5), horizon: 5 };
        let r = StoppingRuleSpec::StopAtNewMax { after: 1.0 };
        let f = RewardSpec::PiecewiseLinear { knots: vec![(0.0, 1.0), (2.0, 0.0), (3.0, 0.0)] };
        let g = RewardSpec::PiecewiseLinear { knots: vec![(0.0, 3.5), (2.0, 2.5), (3.0, 2.5)] };
        let a = estimate_value(&model, &f, &r, 1000, 8).unwrap();
        let b = estimate_value(&model, &g, &r, 1000, 8).unwrap();
        assert!((b.mean - a.mean - 2.5).abs() < 1e-12);
    }

    #[test]
    fn too_few_paths() {
        let model = Model::Lattice { dist: bernoulli(0.3), horizon: 2 };
        let r = estimate_value(&model, &RewardSpec::Indicator0, &StoppingRuleSpec::Constant { t: 0.0 }, 99, 0);
        assert!(matches!(r, Err(crate::Error::Argument(_))));
    }
}
