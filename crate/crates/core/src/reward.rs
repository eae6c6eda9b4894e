//! Reward functions `f` for the prediction objective `E[f(M_T - X_tau)]`.
//!
//! Every admissible reward is nonincreasing and convex on `[0, inf)`. It
//! is continuous on `(0, inf)` but may jump down right after `0`, which is
//! how the indicator of `{0}` fits in. The built-in kinds are admissible by
//! construction; piecewise-linear inputs are checked from their knots.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

/// Comparison slack used by the shape predicates.
pub const SHAPE_TOL: f64 = 1e-12;

/// A reward function `f : [0, inf) -> R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardSpec {
    /// `f(0) = 1`, `f(x) = 0` for `x > 0`: the probability of stopping at the top.
    Indicator0,
    /// `f(x) = exp(-sigma x)`: expected ratio of selling price to the maximum.
    Exponential { sigma: f64 },
    /// `f(x) = -x^alpha` with `alpha` in `(0, 1]`.
    NegPower { alpha: f64 },
    /// `f(x) = slope * x` with `slope <= 0`.
    Linear { slope: f64 },
    /// Linear interpolation through `(x, value)` knots. The first knot must
    /// sit at `x = 0`; past the last knot the final segment is extended.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

/// A single failing pair or triple found by [`RewardSpec::verify_shape`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeViolation {
    /// `f(x) < f(y)` for `x < y`.
    Increase { x: f64, y: f64 },
    /// `f(y)` lies above the chord through `(x, f(x))` and `(z, f(z))`.
    Concavity { x: f64, y: f64, z: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub nonincreasing: bool,
    pub convex: bool,
    pub violations: Vec<ShapeViolation>,
}

impl RewardSpec {
    pub fn exponential(sigma: f64) -> Self {
        RewardSpec::Exponential { sigma }
    }

    pub fn linear(slope: f64) -> Self {
        RewardSpec::Linear { slope }
    }

    /// Checks the parameters of the kind (not the shape).
    pub fn validate(&self) -> Result<()> {
        match self {
            RewardSpec::Indicator0 => Ok(()),
            RewardSpec::Exponential { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    bail!(Argument, "exponential reward needs sigma > 0, got {sigma}");
                }
                Ok(())
            }
            RewardSpec::NegPower { alpha } => {
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    bail!(Argument, "neg_power reward needs alpha in (0, 1], got {alpha}");
                }
                Ok(())
            }
            RewardSpec::Linear { slope } => {
                if !(slope.is_finite() && *slope <= 0.0) {
                    bail!(Argument, "linear reward needs a finite slope <= 0, got {slope}");
                }
                Ok(())
            }
            RewardSpec::PiecewiseLinear { knots } => {
                let Some(first) = knots.first() else {
                    bail!(Argument, "piecewise_linear reward needs at least one knot");
                };
                if first.0 != 0.0 {
                    bail!(Argument, "first knot must be at x = 0, got x = {}", first.0);
                }
                if knots.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
                    bail!(Argument, "knots must be finite");
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    bail!(Argument, "knots must be strictly increasing in x");
                }
                Ok(())
            }
        }
    }

    /// Validates parameters and, for piecewise-linear input, the
    /// nonincreasing/convex shape (exact on the knots: slopes must be
    /// nonpositive and nondecreasing).
    pub fn validate_admissible(&self) -> Result<()> {
        self.validate()?;
        if let RewardSpec::PiecewiseLinear { knots } = self {
            let slopes: Vec<f64> = knots
                .windows(2)
                .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
                .collect();
            if let Some(s) = slopes.iter().find(|s| **s > SHAPE_TOL) {
                bail!(Argument, "piecewise_linear reward increases (segment slope {s})");
            }
            if slopes.windows(2).any(|w| w[1] < w[0] - SHAPE_TOL) {
                bail!(Argument, "piecewise_linear reward is not convex");
            }
        }
        Ok(())
    }

    /// `f(x)` for `x >= 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            bail!(Domain, "reward evaluated at x = {x}; needs x >= 0");
        }
        Ok(self.eval_unchecked(x))
    }

    /// `f(x)` without the domain check; callers guarantee `x >= 0`.
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match self {
            RewardSpec::Indicator0 => {
                if x == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            RewardSpec::Exponential { sigma } => (-sigma * x).exp(),
            RewardSpec::NegPower { alpha } => -x.powf(*alpha),
            RewardSpec::Linear { slope } => slope * x,
            RewardSpec::PiecewiseLinear { knots } => piecewise_eval(knots, x),
        }
    }

    /// True if `sup |f| < inf`.
    pub fn is_bounded(&self) -> bool {
        match self {
            RewardSpec::Indicator0 | RewardSpec::Exponential { .. } => true,
            RewardSpec::NegPower { .. } => false,
            RewardSpec::Linear { slope } => *slope == 0.0,
            RewardSpec::PiecewiseLinear { knots } => match knots.len() {
                0 | 1 => true,
                n => knots[n - 1].1 == knots[n - 2].1,
            },
        }
    }

    /// True if `f` is continuous on all of `[0, inf)` (no jump at 0).
    pub fn is_continuous(&self) -> bool {
        !matches!(self, RewardSpec::Indicator0)
    }

    /// Grid certificate of the nonincreasing and convex shape.
    ///
    /// `grid` must be strictly increasing, start at `0` and have at least
    /// three points. Pairs of neighbours are checked for monotonicity and
    /// triples of neighbours for the chord inequality; for sampled values the
    /// neighbour triples are equivalent to all triples.
    pub fn verify_shape(&self, grid: &[f64]) -> Result<ShapeReport> {
        self.validate()?;
        if grid.len() < 3 {
            bail!(Argument, "shape grid needs at least 3 points, got {}", grid.len());
        }
        if grid[0] != 0.0 {
            bail!(Argument, "shape grid must start at 0");
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            bail!(Argument, "shape grid must be strictly increasing");
        }
        let values: Vec<f64> = grid.iter().map(|&x| self.eval_unchecked(x)).collect();
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let tol = SHAPE_TOL * scale;

        let mut violations = Vec::new();
        let mut nonincreasing = true;
        for i in 0..grid.len() - 1 {
            if values[i] < values[i + 1] - tol {
                nonincreasing = false;
                violations.push(ShapeViolation::Increase { x: grid[i], y: grid[i + 1] });
            }
        }
        let mut convex = true;
        for i in 0..grid.len() - 2 {
            let (x, y, z) = (grid[i], grid[i + 1], grid[i + 2]);
            let chord = ((z - y) * values[i] + (y - x) * values[i + 2]) / (z - x);
            if values[i + 1] > chord + tol {
                convex = false;
                violations.push(ShapeViolation::Concavity { x, y, z });
            }
        }
        Ok(ShapeReport { nonincreasing, convex, violations })
    }

    /// `(f(z) - f(0)) / z`, the chord slope from the origin. By convexity
    /// `f(u + z) - f(u) >= alpha * z` for every `u >= 0`.
    pub fn alpha_slope(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) || !z.is_finite() {
            bail!(Domain, "alpha_slope needs z > 0, got {z}");
        }
        Ok((self.eval_unchecked(z) - self.eval_unchecked(0.0)) / z)
    }

    /// `f(x) - f(x + d) >= f(y) - f(y + d)` for `0 <= x < y`, `d > 0`.
    pub fn check_shift_inequality(&self, x: f64, y: f64, d: f64) -> Result<bool> {
        if !(x >= 0.0 && x < y && d > 0.0) || !y.is_finite() || !d.is_finite() {
            bail!(Argument, "shift inequality needs 0 <= x < y and d > 0 (x={x}, y={y}, d={d})");
        }
        let f = |u: f64| self.eval_unchecked(u);
        Ok(f(x) - f(x + d) >= f(y) - f(y + d) - SHAPE_TOL)
    }

    /// `h(z, m, x) = f(z v m - x) - f(z v (m - x))`.
    pub fn h(&self, z: f64, m: f64, x: f64) -> f64 {
        self.eval_unchecked(z.max(m) - x) - self.eval_unchecked(z.max(m - x))
    }

    /// Checks `h(z,m,x) + h(z,m-x,-x) >= 0` together with the bracket
    /// `alpha z <= h(z,m,x) <= |alpha| z` (with `alpha = alpha_slope(z)`;
    /// the bracket is skipped at `z = 0`).
    pub fn check_h_nonnegativity(&self, z: f64, m: f64, x: f64) -> Result<bool> {
        if !(z >= 0.0) || !z.is_finite() {
            bail!(Argument, "h check needs z >= 0, got {z}");
        }
        if !(x > 0.0 && x <= m) || !m.is_finite() {
            bail!(Argument, "h check needs 0 < x <= m (x={x}, m={m})");
        }
        let h1 = self.h(z, m, x);
        let h2 = self.h(z, m - x, -x);
        let mut ok = h1 + h2 >= -SHAPE_TOL;
        if z > 0.0 {
            let alpha = self.alpha_slope(z)?;
            ok &= alpha * z <= h1 + SHAPE_TOL && h1 <= alpha.abs() * z + SHAPE_TOL;
        }
        Ok(ok)
    }
}

fn piecewise_eval(knots: &[(f64, f64)], x: f64) -> f64 {
    match knots.len() {
        0 => 0.0,
        1 => knots[0].1,
        n => {
            // index of the segment containing x; the last one extends to inf
            let i = knots[1..n - 1].partition_point(|k| k.0 <= x);
            let (x0, y0) = knots[i];
            let (x1, y1) = knots[i + 1];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

/// Piecewise-linear interpolation shared with the exact evaluator.
pub(crate) fn piecewise_segment(knots: &[(f64, f64)], x: f64) -> Option<((f64, f64), (f64, f64))> {
    match knots.len() {
        0 | 1 => None,
        n => {
            let i = knots[1..n - 1].partition_point(|k| k.0 <= x);
            Some((knots[i], knots[i + 1]))
        }
    }
}

/// The reward kinds used by the test batteries.
pub fn builtin_kinds() -> Vec<RewardSpec> {
    vec![
        RewardSpec::Indicator0,
        RewardSpec::Exponential { sigma: 1.0 },
        RewardSpec::Exponential { sigma: 2.5 },
        RewardSpec::NegPower { alpha: 0.5 },
        RewardSpec::NegPower { alpha: 1.0 },
        RewardSpec::Linear { slope: -1.0 },
        RewardSpec::PiecewiseLinear { knots: vec![(0.0, 2.0), (1.0, 0.5), (3.0, 0.0), (4.0, 0.0)] },
    ]
}
