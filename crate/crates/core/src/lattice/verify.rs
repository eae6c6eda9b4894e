//! Checks of the bang-bang property and of the inequalities behind it.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::lattice::law::joint_laws_up_to;
use crate::lattice::snell::{markov_rule_value, snell_solve, PredictionProblem};
use crate::lattice::{skew_analysis, LatticeStepDistribution, SkewClass};
use crate::reward::RewardSpec;
use crate::weight::{abs_diff, Weight};

/// Agreement required between a designated rule and the optimal value.
pub const BANG_BANG_TOL: f64 = 1e-9;

/// The rule the skew class singles out as optimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignatedRule {
    /// `tau = N` (right skew).
    RunToHorizon,
    /// `tau = 0` (left skew).
    StopImmediately,
    /// Any rule stopping at a running maximum or at `N` (symmetric).
    AtMaximumOrHorizon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BangBangReport {
    pub class: SkewClass,
    pub horizon: usize,
    /// Value of `tau = 0`, i.e. `G(N, 0)`.
    pub value_stop_now: f64,
    /// Value of `tau = N`, i.e. `D(N, 0)`.
    pub value_run_to_end: f64,
    pub snell_value: f64,
    pub designated: DesignatedRule,
    /// For symmetric steps: values of "stop at the first running maximum
    /// after `t0`" for several `t0`, as `(t0, value)`.
    pub at_maximum_values: Vec<(usize, f64)>,
    /// Largest distance between a designated rule and the optimal value.
    pub max_gap: f64,
    pub pass: bool,
}

/// Solves the problem and checks that the rule designated by the skew class
/// of the steps attains the optimal value.
pub fn verify_bang_bang<W: Weight>(p: &PredictionProblem<W>) -> Result<BangBangReport> {
    let class = skew_analysis(p.dist()).class;
    let designated = match class {
        SkewClass::RightSkew => DesignatedRule::RunToHorizon,
        SkewClass::LeftSkew => DesignatedRule::StopImmediately,
        SkewClass::Symmetric => DesignatedRule::AtMaximumOrHorizon,
        SkewClass::Neither => bail!(
            Precondition,
            "steps are neither right- nor left-skewed; no trivial rule is designated (solve the problem directly)"
        ),
    };
    let n = p.horizon();
    let snell = snell_solve(p)?.value;
    let stop_now = markov_rule_value(p, |_, _| true)?;
    let run = markov_rule_value(p, |_, _| false)?;

    let mut gaps = Vec::new();
    let mut at_maximum_values = Vec::new();
    match designated {
        DesignatedRule::RunToHorizon => gaps.push(abs_diff(&run, &snell)),
        DesignatedRule::StopImmediately => gaps.push(abs_diff(&stop_now, &snell)),
        DesignatedRule::AtMaximumOrHorizon => {
            gaps.push(abs_diff(&run, &snell));
            gaps.push(abs_diff(&stop_now, &snell));
            let mut starts = vec![0, 1, n.div_ceil(2)];
            starts.dedup();
            for t0 in starts {
                // the walk sits at its running maximum exactly when Z_n = 0
                let v = markov_rule_value(p, |m, z| m >= t0 && z == 0)?;
                gaps.push(abs_diff(&v, &snell));
                at_maximum_values.push((t0, v.to_f64()));
            }
        }
    }
    let max_gap = gaps.into_iter().fold(0.0, f64::max);
    Ok(BangBangReport {
        class,
        horizon: n,
        value_stop_now: stop_now.to_f64(),
        value_run_to_end: run.to_f64(),
        snell_value: snell.to_f64(),
        designated,
        at_maximum_values,
        max_gap,
        pass: max_gap <= BANG_BANG_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub k: usize,
    pub z: i64,
    pub g: f64,
    pub d: f64,
    /// `E f(z v Z_k)`.
    pub drawdown_bound: f64,
    /// `D(k, z) - E f(z v Z_k)`.
    pub slack_drawdown: f64,
    /// `D(k, z) - G(k, z)`.
    pub slack_gain: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub class: SkewClass,
    pub rows: Vec<LemmaRow>,
    pub min_slack_drawdown: f64,
    pub min_slack_gain: f64,
    pub violations: usize,
    /// Whether `D(k, 0) = E f(Z_k)` for every `k` (it is an identity).
    pub equality_at_zero: bool,
    pub pass: bool,
}

/// Checks `D(k, z) >= E f(z v Z_k)` and `D(k, z) >= G(k, z)` for every
/// `k <= n` and every drawdown level in `z_levels`.
pub fn lemma_suite<W: Weight>(
    dist: &LatticeStepDistribution<W>,
    f: &RewardSpec,
    n: usize,
    z_levels: &[i64],
) -> Result<LemmaReport> {
    let class = skew_analysis(dist).class;
    match class {
        SkewClass::RightSkew | SkewClass::Symmetric => {}
        SkewClass::LeftSkew => bail!(Precondition, "steps are left-skewed; run the suite on the mirrored law"),
        SkewClass::Neither => bail!(Precondition, "steps are neither right- nor left-skewed"),
    }
    f.validate_admissible()?;
    if let Some(z) = z_levels.iter().find(|z| **z < 0) {
        bail!(Domain, "drawdown level must be >= 0, got {z}");
    }
    let h = dist.h();
    let laws = joint_laws_up_to(dist, n)?;
    let mut rows = Vec::new();
    let mut violations = 0;
    let mut equality_at_zero = true;
    for (k, law) in laws.iter().enumerate() {
        for &z in z_levels {
            let g = law.expect_g(f, z, h)?;
            let d = law.expect_d(f, z, h)?;
            let bound = law.expect_drawdown(f, z, h)?;
            let holds = d.ge_tol(&bound) && d.ge_tol(&g);
            if !holds {
                violations += 1;
            }
            if z == 0 && !d.eq_tol(&bound) {
                equality_at_zero = false;
            }
            rows.push(LemmaRow {
                k,
                z,
                g: g.to_f64(),
                d: d.to_f64(),
                drawdown_bound: bound.to_f64(),
                slack_drawdown: signed_diff(&d, &bound),
                slack_gain: signed_diff(&d, &g),
                holds,
            });
        }
    }
    let min = |sel: fn(&LemmaRow) -> f64| rows.iter().map(sel).fold(f64::INFINITY, f64::min);
    Ok(LemmaReport {
        class,
        min_slack_drawdown: min(|r| r.slack_drawdown),
        min_slack_gain: min(|r| r.slack_gain),
        violations,
        equality_at_zero,
        pass: violations == 0,
        rows,
    })
}

fn signed_diff<W: Weight>(a: &W, b: &W) -> f64 {
    if W::EXACT {
        (a.clone() - b.clone()).to_f64()
    } else {
        a.to_f64() - b.to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::testing::*;

    #[test]
    fn designated_rules() {
        let p = PredictionProblem::new(bernoulli(0.6), 10, RewardSpec::Indicator0).unwrap();
        let r = verify_bang_bang(&p).unwrap();
        assert!(r.pass);
        assert_eq!(r.designated, DesignatedRule::RunToHorizon);

        let p = PredictionProblem::new(bernoulli(0.4), 10, RewardSpec::exponential(1.0)).unwrap();
        let r = verify_bang_bang(&p).unwrap();
        assert!(r.pass);
        assert_eq!(r.designated, DesignatedRule::StopImmediately);

        let p = PredictionProblem::new(bernoulli(0.5), 8, RewardSpec::Indicator0).unwrap();
        let r = verify_bang_bang(&p).unwrap();
        assert!(r.pass);
        assert!((r.value_stop_now - r.value_run_to_end).abs() < 1e-12);
        assert_eq!(r.at_maximum_values.len(), 3);
    }

    #[test]
    fn neither_is_refused() {
        let p = PredictionProblem::new(example_one(), 2, RewardSpec::Indicator0).unwrap();
        assert!(matches!(verify_bang_bang(&p), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn suite_on_bernoulli() {
        let z: Vec<i64> = (0..=12).collect();
        let r = lemma_suite(&bernoulli(0.6), &RewardSpec::Indicator0, 12, &z).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.equality_at_zero);
        assert_eq!(r.rows.len(), 13 * 13);
        assert!(lemma_suite(&bernoulli(0.4), &RewardSpec::Indicator0, 3, &z).is_err());
    }

    #[test]
    fn suite_symmetric_equality_at_zero() {
        let z: Vec<i64> = (0..=6).collect();
        let r = lemma_suite(&bernoulli(0.5), &RewardSpec::exponential(0.7), 8, &z).unwrap();
        assert!(r.pass);
        for row in r.rows.iter().filter(|r| r.z == 0) {
            assert!(row.slack_gain.abs() < 1e-12);
        }
    }
}
