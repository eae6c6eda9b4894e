//! Stopping rules evaluated online along a path.
//!
//! A rule sees the observable epochs `(t, X_t, M_t)` in order, starting with
//! `(0, 0, 0)`, and answers "stop now?". Every rule is forced to stop at the
//! horizon. Rules only look at the past, so they are stopping times of the
//! observed process (the randomized rule is a mixture of such times).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::rng::{substream, Stream};

/// Relative slack for level comparisons, so that lattice levels computed as
/// `k * h` in floating point compare as intended.
const LEVEL_SLACK: f64 = 1e-12;

fn reached(value: f64, level: f64) -> bool {
    value >= level - LEVEL_SLACK * level.abs().max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StoppingRuleSpec {
    /// Stop at the first epoch `>= t`. `t = 0` stops immediately, `t >= T`
    /// keeps going to the horizon.
    Constant { t: f64 },
    /// Stop the first time `X >= level`.
    FirstPassageAbove { level: f64 },
    /// Stop the first time the drawdown `M - X` reaches `z`.
    DrawdownTrigger { z: f64 },
    /// Stop at the first epoch `>= after` at which `X` sits at its running
    /// maximum.
    StopAtNewMax { after: f64 },
    /// Draw `z` uniformly from `[lo, hi]` once per path (from a stream keyed
    /// by `seed` and the path index), then act as `DrawdownTrigger { z }`.
    RandomizedThreshold { lo: f64, hi: f64, seed: u64 },
}

impl StoppingRuleSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, name: &str| -> Result<()> {
            if x.is_nan() {
                bail!(Argument, "rule parameter {name} is NaN");
            }
            Ok(())
        };
        match *self {
            StoppingRuleSpec::Constant { t } => {
                finite(t, "t")?;
                if t < 0.0 {
                    bail!(Argument, "constant rule needs t >= 0, got {t}");
                }
            }
            StoppingRuleSpec::FirstPassageAbove { level } => finite(level, "level")?,
            StoppingRuleSpec::DrawdownTrigger { z } => {
                finite(z, "z")?;
                if z < 0.0 {
                    bail!(Argument, "drawdown trigger needs z >= 0, got {z}");
                }
            }
            StoppingRuleSpec::StopAtNewMax { after } => {
                finite(after, "after")?;
                if after < 0.0 {
                    bail!(Argument, "stop_at_new_max needs after >= 0, got {after}");
                }
            }
            StoppingRuleSpec::RandomizedThreshold { lo, hi, .. } => {
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                    bail!(Argument, "randomized threshold needs 0 <= lo <= hi, got [{lo}, {hi}]");
                }
            }
        }
        Ok(())
    }

    /// Short human-readable name.
    pub fn label(&self) -> String {
        match self {
            StoppingRuleSpec::Constant { t } => format!("constant(t={t})"),
            StoppingRuleSpec::FirstPassageAbove { level } => format!("first_passage_above({level})"),
            StoppingRuleSpec::DrawdownTrigger { z } => format!("drawdown_trigger({z})"),
            StoppingRuleSpec::StopAtNewMax { after } => format!("stop_at_new_max(after={after})"),
            StoppingRuleSpec::RandomizedThreshold { lo, hi, seed } => {
                format!("randomized_threshold([{lo}, {hi}], seed={seed})")
            }
        }
    }

    /// Fresh state for path number `path_index`.
    pub fn start(&self, horizon: f64, path_index: u64) -> RuleState {
        let threshold = match *self {
            StoppingRuleSpec::RandomizedThreshold { lo, hi, seed } => {
                let u: f64 = substream(seed, Stream::Rules, path_index).random();
                lo + (hi - lo) * u
            }
            StoppingRuleSpec::DrawdownTrigger { z } => z,
            _ => 0.0,
        };
        RuleState { spec: self.clone(), horizon, threshold }
    }
}

/// Per-path state of a rule.
#[derive(Clone, Debug)]
pub struct RuleState {
    spec: StoppingRuleSpec,
    horizon: f64,
    threshold: f64,
}

impl RuleState {
    /// Whether to stop at epoch `t` with `X_t = x` and `M_t = m`.
    pub fn observe(&mut self, t: f64, x: f64, m: f64) -> bool {
        if reached(t, self.horizon) {
            return true;
        }
        match self.spec {
            StoppingRuleSpec::Constant { t: t0 } => reached(t, t0),
            StoppingRuleSpec::FirstPassageAbove { level } => reached(x, level),
            StoppingRuleSpec::DrawdownTrigger { .. } | StoppingRuleSpec::RandomizedThreshold { .. } => {
                reached(m - x, self.threshold)
            }
            StoppingRuleSpec::StopAtNewMax { after } => reached(t, after) && reached(x, m),
        }
    }
}
