//! Probability/value arithmetic shared by the exact lattice routines.
//!
//! Everything in [`crate::lattice`] and the exact parts of
//! [`crate::duality`] is generic over [`Weight`]. `f64` gives the fast
//! floating mode with a `1e-12` comparison slack; [`Exact`] (a big
//! rational) gives an exact mode in which every comparison is strict
//! equality or order.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{bail, Result};
use crate::reward::{piecewise_segment, RewardSpec};

/// Comparison slack of the floating mode.
pub const FLOAT_TOL: f64 = 1e-12;

/// Exact rational numbers.
pub type Exact = BigRational;

pub trait Weight:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for the rational mode.
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    fn from_f64(x: f64) -> Result<Self>;

    /// `self >= other`, up to the mode's slack.
    fn ge_tol(&self, other: &Self) -> bool;

    /// `self == other`, up to the mode's slack.
    fn eq_tol(&self, other: &Self) -> bool {
        self.ge_tol(other) && other.ge_tol(self)
    }

    /// `f(level * h)`.
    fn reward(f: &RewardSpec, level: i64, h: f64) -> Result<Self>;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Rounds (floating mode) or copies (exact mode) a rational.
    fn from_exact(q: &Exact) -> Self;
}

impl Weight for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Result<Self> {
        Ok(x)
    }

    fn ge_tol(&self, other: &Self) -> bool {
        if *other == f64::NEG_INFINITY {
            return true;
        }
        *self >= other - FLOAT_TOL
    }

    fn reward(f: &RewardSpec, level: i64, h: f64) -> Result<Self> {
        if level < 0 {
            bail!(Domain, "reward evaluated at negative lattice level {level}");
        }
        Ok(f.eval_unchecked(level as f64 * h))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_exact(q: &Exact) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
}

impl Weight for Exact {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Result<Self> {
        match BigRational::from_float(x) {
            Some(r) => Ok(r),
            None => bail!(Domain, "{x} has no exact rational value"),
        }
    }

    fn ge_tol(&self, other: &Self) -> bool {
        self >= other
    }

    fn reward(f: &RewardSpec, level: i64, h: f64) -> Result<Self> {
        if level < 0 {
            bail!(Domain, "reward evaluated at negative lattice level {level}");
        }
        let x = Exact::from_integer(level.into()) * Exact::from_f64(h)?;
        match f {
            RewardSpec::Indicator0 => Ok(if level == 0 { Exact::one() } else { Exact::zero() }),
            RewardSpec::Linear { slope } => Ok(Exact::from_f64(*slope)? * x),
            RewardSpec::NegPower { alpha } if *alpha == 1.0 => Ok(-x),
            RewardSpec::PiecewiseLinear { knots } => match piecewise_segment(knots, level as f64 * h) {
                None => Exact::from_f64(knots.first().map(|k| k.1).unwrap_or(0.0)),
                Some(((x0, y0), (x1, y1))) => {
                    let (x0, y0) = (Exact::from_f64(x0)?, Exact::from_f64(y0)?);
                    let (x1, y1) = (Exact::from_f64(x1)?, Exact::from_f64(y1)?);
                    Ok(y0.clone() + (y1 - y0) * (x - x0.clone()) / (x1 - x0))
                }
            },
            other => bail!(Argument, "reward {other:?} has no exact rational values; use the f64 mode"),
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Exact::new(num.into(), den.into())
    }

    fn from_exact(q: &Exact) -> Self {
        q.clone()
    }
}

/// `sum_i p_i * v_i`, skipping zero weights so that a `-inf` value paired
/// with probability zero contributes nothing.
pub(crate) fn expectation<W: Weight, I>(terms: I) -> W
where
    I: IntoIterator<Item = (W, W)>,
{
    terms
        .into_iter()
        .filter(|(p, _)| !p.is_zero())
        .fold(W::zero(), |acc, (p, v)| acc + p * v)
}

/// `|a - b|` as f64, for reporting.
pub(crate) fn abs_diff<W: Weight>(a: &W, b: &W) -> f64 {
    if W::EXACT {
        (a.clone() - b.clone()).to_f64().abs()
    } else {
        (a.to_f64() - b.to_f64()).abs()
    }
}

/// Parses `"p/q"` or a decimal (`"0.6"`, `"-1.25e-3"`) into an exact
/// rational. Decimals are read digit by digit, so `"0.6"` is `3/5`.
pub fn parse_exact(s: &str) -> Result<Exact> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| crate::Error::Argument(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| crate::Error::Argument(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            bail!(Argument, "zero denominator in {s:?}");
        }
        return Ok(Exact::new(n, d));
    }
    parse_decimal(s).ok_or_else(|| crate::Error::Argument(format!("not a number: {s:?}")))
}

fn parse_decimal(s: &str) -> Option<Exact> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        Exact::from_integer(all * ten.pow(scale as u32))
    } else {
        Exact::new(all, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

/// Exact value of the shortest decimal that round-trips to `x`, so that a
/// JSON `0.6` means `3/5` in the exact mode.
pub fn exact_from_decimal_f64(x: f64) -> Result<Exact> {
    if !x.is_finite() {
        bail!(Domain, "{x} has no exact rational value");
    }
    parse_exact(&format!("{x:e}"))
}
