//! Truncation levels for small-jump approximation.
//!
//! Level `n` keeps the jumps of magnitude at least `eps_n` and replaces
//! the rest by their compensated mean. The thresholds start from
//! `eps_0 = eps_seed` and satisfy
//!
//! * `int_{|y| < eps_n} y^2 nu(dy) <= 8^-n` (so the discarded part has
//!   standard deviation at most `8^(-n/2)` over unit time), and
//! * `eps_n <= eps_{n-1} / 2` (strictly decreasing, nested bands).
//!
//! Each `eps_n` is the largest value that meets both constraints.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::levy::measure::LevyTriplet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationLevel {
    pub n: usize,
    pub eps: f64,
    /// `int_{|y| < eps} y^2 nu(dy)`.
    pub second_moment: f64,
    /// `8^-n`.
    pub bound: f64,
    /// Drift of level `n` relative to the top band:
    /// `gamma - L + int_{eps_n <= |y| < eps_seed} y nu(dy)`, when `L` is finite.
    pub gamma_n: Option<f64>,
    /// Rate of kept jumps, `nu(|y| >= eps)`.
    pub intensity: f64,
}

/// Levels `0..=n_max`; level 0 is the seed itself.
pub fn truncation_schedule(t: &LevyTriplet, n_max: usize, eps_seed: f64) -> Result<Vec<TruncationLevel>> {
    t.validate()?;
    if !(eps_seed.is_finite() && eps_seed > 0.0) {
        bail!(Argument, "eps_seed must be positive and finite, got {eps_seed}");
    }
    let nu = &t.nu;
    let l = nu.small_jump_mean_limit().finite();
    let level = |n: usize, eps: f64| TruncationLevel {
        n,
        eps,
        second_moment: nu.small_second_moment(eps),
        bound: 8f64.powi(-(n as i32)),
        gamma_n: l.map(|l| t.gamma - l + nu.band_first_moment(eps, eps_seed)),
        intensity: nu.band_mass(eps, f64::INFINITY),
    };
    let mut out = vec![level(0, eps_seed)];
    let mut eps = eps_seed;
    for n in 1..=n_max {
        let bound = 8f64.powi(-(n as i32));
        eps = largest_below(|e| nu.small_second_moment(e) <= bound, eps / 2.0)
            .ok_or_else(|| crate::Error::Resource(format!("truncation level {n} underflows: no positive eps with int_(|y|<eps) y^2 nu(dy) <= {bound:e}")))?;
        out.push(level(n, eps));
    }
    Ok(out)
}

/// Largest `e` in `(0, hi]` with `ok(e)`, for `ok` monotone (true near 0).
/// Brackets geometrically, then bisects to full precision.
fn largest_below(ok: impl Fn(f64) -> bool, hi: f64) -> Option<f64> {
    if ok(hi) {
        return Some(hi);
    }
    let mut upper = hi;
    let mut lower = hi / 2.0;
    while !ok(lower) {
        upper = lower;
        lower /= 2.0;
        if lower < 1e-280 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lower + upper);
        if mid <= lower || mid >= upper {
            break;
        }
        if ok(mid) {
            lower = mid;
        } else {
            upper = mid;
        }
    }
    Some(lower)
}
