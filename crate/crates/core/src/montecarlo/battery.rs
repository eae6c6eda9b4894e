//! Bang-bang batteries: does any adversarial rule beat the trivial rule the
//! skew class designates?
//!
//! Right skew-symmetric models designate `tau = T`, left skew-symmetric
//! ones `tau = 0`. For symmetric models `tau = T` is designated, and
//! `tau = 0` and "stop at a running maximum" are additionally checked to be
//! tied with it. All rules are scored on the same paths; a rule beats the
//! designated one when the paired difference is below `-3 SE`.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::lattice::{skew_analysis, SkewAnalysis, SkewClass};
use crate::levy::{classify, LevyClass};
use crate::montecarlo::estimate::{paired_from, payoff_matrix, EstimateReport, Model, PreparedModel, DISCRETIZATION_NOTE, MIN_PATHS};
use crate::montecarlo::rules::StoppingRuleSpec;
use crate::reward::RewardSpec;

/// Multiple of the paired standard error tolerated before a rule counts as
/// beating (or, for tie checks, differing from) the designated rule.
pub const SE_MULTIPLE: f64 = 3.0;

/// Seed of the randomized rule in the default battery.
const RANDOMIZED_RULE_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkewDirection {
    /// `tau = T` is optimal.
    Right,
    /// `tau = 0` is optimal.
    Left,
    /// Both, and every rule stopping only at running maxima or at `T`.
    Symmetric,
}

/// Which hypothesis licenses the bang-bang assertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Lattice steps with `xi >= -xi` (or `<=`) stochastically.
    LatticeSkew,
    /// Finite Lévy measure, drift `b` and tail comparison (RSS / LSS).
    FiniteMeasureSkew,
    /// Balanced small jumps, drift, tails and small-jump majorization (SRSS / SLSS).
    StrongSkew,
    /// Drift against the lim inf of small-jump means plus tails; only for
    /// bounded continuous rewards.
    WeakSkewBoundedReward,
}

impl Provenance {
    pub fn license(&self) -> &'static str {
        match self {
            Provenance::LatticeSkew => "random walk whose step stochastically dominates its negative (or is dominated by it)",
            Provenance::FiniteMeasureSkew => "compound Poisson plus Brownian motion with b >= 0 and dominating tails (or the mirror)",
            Provenance::StrongSkew => "balanced small jumps with gamma >= L, dominating tails and small-jump majorization (or the mirror)",
            Provenance::WeakSkewBoundedReward => {
                "gamma >= lim inf of small-jump means with dominating tails (or the mirror), for a bounded continuous reward"
            }
        }
    }
}

/// Which class hypothesis to invoke for a Lévy model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LicenseMode {
    /// Symmetric, then finite-measure, then strong, then weak classes.
    #[default]
    Strongest,
    /// Only the weak classes, which need a bounded continuous reward.
    Weak,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Lattice(SkewAnalysis),
    Levy(Box<LevyClass>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Designation {
    pub direction: SkewDirection,
    pub provenance: Provenance,
    pub rule: StoppingRuleSpec,
    pub classification: Classification,
}

/// Classifies the model and picks the trivial rule the theory designates.
pub fn designate(model: &Model, f: &RewardSpec, mode: LicenseMode) -> Result<Designation> {
    let horizon = model.horizon();
    let (direction, provenance, classification) = match model {
        Model::Lattice { dist, .. } => {
            let a = skew_analysis(dist);
            let d = match a.class {
                SkewClass::RightSkew => SkewDirection::Right,
                SkewClass::LeftSkew => SkewDirection::Left,
                SkewClass::Symmetric => SkewDirection::Symmetric,
                SkewClass::Neither => bail!(
                    Precondition,
                    "the step law is neither right nor left skew-symmetric (witnesses {:?} / {:?}); no trivial rule is designated",
                    a.right_witness,
                    a.left_witness
                ),
            };
            (d, Provenance::LatticeSkew, Classification::Lattice(a))
        }
        Model::Levy { triplet, .. } => {
            let c = classify(triplet)?;
            let strongest = mode == LicenseMode::Strongest;
            let (d, p) = if strongest && c.symmetric {
                (SkewDirection::Symmetric, if c.finite_nu { Provenance::FiniteMeasureSkew } else { Provenance::StrongSkew })
            } else if strongest && c.rss {
                (SkewDirection::Right, Provenance::FiniteMeasureSkew)
            } else if strongest && c.lss {
                (SkewDirection::Left, Provenance::FiniteMeasureSkew)
            } else if strongest && c.srss {
                (SkewDirection::Right, Provenance::StrongSkew)
            } else if strongest && c.slss {
                (SkewDirection::Left, Provenance::StrongSkew)
            } else if c.weak_rss || c.weak_lss {
                if !(f.is_bounded() && f.is_continuous()) {
                    bail!(
                        Precondition,
                        "the model is only weakly skew-symmetric, which licenses the bang-bang claim for bounded continuous rewards only"
                    );
                }
                let d = if c.weak_rss { SkewDirection::Right } else { SkewDirection::Left };
                (d, Provenance::WeakSkewBoundedReward)
            } else {
                bail!(Precondition, "the Lévy model is not skew-symmetric in any sense checked: {}", c.reasons.join("; "));
            };
            (d, p, Classification::Levy(Box::new(c)))
        }
    };
    let rule = match direction {
        SkewDirection::Left => StoppingRuleSpec::Constant { t: 0.0 },
        _ => StoppingRuleSpec::Constant { t: horizon },
    };
    Ok(Designation { direction, provenance, rule, classification })
}

/// The default adversaries: fixed times, passage levels, drawdown triggers,
/// stop-at-maximum rules and a randomized threshold. Levels scale with `s`.
pub fn default_rules(horizon: f64, s: f64, designated: &StoppingRuleSpec) -> Vec<StoppingRuleSpec> {
    use StoppingRuleSpec::*;
    let t = horizon;
    let candidates = vec![
        Constant { t: 0.0 },
        Constant { t: t / 4.0 },
        Constant { t: t / 2.0 },
        Constant { t: 3.0 * t / 4.0 },
        Constant { t },
        FirstPassageAbove { level: s / 2.0 },
        FirstPassageAbove { level: s },
        DrawdownTrigger { z: s / 4.0 },
        DrawdownTrigger { z: s / 2.0 },
        StopAtNewMax { after: 0.0 },
        StopAtNewMax { after: t / 4.0 },
        StopAtNewMax { after: t / 2.0 },
        RandomizedThreshold { lo: s / 10.0, hi: s, seed: RANDOMIZED_RULE_SEED },
    ];
    candidates.into_iter().filter(|r| r != designated).take(12).collect()
}

/// Typical size of the terminal maximum: the median of `M_T` over the
/// first 256 paths, used to scale passage and drawdown levels.
pub fn level_scale(model: &PreparedModel, seed: u64) -> f64 {
    let mut ms: Vec<f64> = (0..256).map(|i| model.path(seed, i).terminal_max()).collect();
    ms.sort_by(f64::total_cmp);
    let med = ms[ms.len() / 2];
    if med > 0.0 {
        med
    } else {
        let mean = ms.iter().sum::<f64>() / ms.len() as f64;
        if mean > 0.0 { mean } else { 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// The rule must not beat the designated one by more than `3 SE`.
    NotBetter,
    /// The rule must agree with the designated one within `3 SE`.
    Tied,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub rule: StoppingRuleSpec,
    pub label: String,
    pub value: EstimateReport,
    /// Designated minus this rule, on common paths.
    pub difference: EstimateReport,
    pub check: Check,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub model: String,
    pub reward: RewardSpec,
    pub horizon: f64,
    pub count: usize,
    pub seed: u64,
    pub designation: Designation,
    pub license: String,
    pub designated_value: EstimateReport,
    pub level_scale: f64,
    pub rows: Vec<BatteryRow>,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Scores the designated rule against `rules` (or the default dozen) on
/// `count` common paths.
pub fn bangbang_battery(
    model: &Model,
    f: &RewardSpec,
    rules: Option<&[StoppingRuleSpec]>,
    mode: LicenseMode,
    count: usize,
    seed: u64,
) -> Result<BatteryReport> {
    if count < MIN_PATHS {
        bail!(Argument, "need at least {MIN_PATHS} paths, got {count}");
    }
    f.validate_admissible()?;
    let designation = designate(model, f, mode)?;
    let prepared = model.prepare()?;
    let horizon = model.horizon();
    let scale = level_scale(&prepared, seed);
    let rules: Vec<StoppingRuleSpec> = match rules {
        Some(r) => r.to_vec(),
        None => default_rules(horizon, scale, &designation.rule),
    };
    for r in &rules {
        r.validate()?;
    }
    let mut all = vec![designation.rule.clone()];
    all.extend(rules.iter().cloned());
    let payoffs = payoff_matrix(&prepared, f, &all, count, seed);
    let heavy = !f.is_bounded();
    let describe = model.describe();

    let tied = |r: &StoppingRuleSpec| {
        designation.direction == SkewDirection::Symmetric
            && matches!(r, StoppingRuleSpec::Constant { t } if *t == 0.0 || *t >= horizon)
            || designation.direction == SkewDirection::Symmetric && matches!(r, StoppingRuleSpec::StopAtNewMax { .. })
    };
    let mut rows = Vec::with_capacity(rules.len());
    for (k, rule) in rules.iter().enumerate() {
        let paired = paired_from(&designation.rule, rule, &payoffs[0], &payoffs[k + 1], seed, &describe, heavy)?;
        let d = &paired.difference;
        let check = if tied(rule) { Check::Tied } else { Check::NotBetter };
        let pass = match check {
            Check::NotBetter => d.mean >= -SE_MULTIPLE * d.se,
            Check::Tied => d.mean.abs() <= SE_MULTIPLE * d.se,
        };
        rows.push(BatteryRow { rule: rule.clone(), label: rule.label(), value: paired.value_b, difference: paired.difference, check, pass });
    }
    let designated_value = EstimateReport::from_samples(&payoffs[0], seed, describe.clone(), heavy)?;
    let mut notes = vec![
        DISCRETIZATION_NOTE.to_string(),
        "a battery can refute the optimality of the designated rule but never confirm it".to_string(),
    ];
    if heavy {
        notes.push("the reward is unbounded: standard errors may be unreliable".to_string());
    }
    Ok(BatteryReport {
        model: describe,
        reward: f.clone(),
        horizon,
        count,
        seed,
        license: designation.provenance.license().to_string(),
        designation,
        designated_value,
        level_scale: scale,
        pass: rows.iter().all(|r| r.pass),
        rows,
        notes,
    })
}
