//! Lévy triplets with measures built from atoms and one-sided power-law or
//! constant density pieces.
//!
//! In magnitude coordinates `u = |y|` every density piece is `c u^s` on an
//! interval `[a, b]` (`s = -1 - alpha` for a power law, `s = 0` for a
//! constant), so masses, moments, tails and quantiles all have closed forms.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{bail, Result};

/// Density of a piece on its interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DensityForm {
    /// `c / |y|^(1 + alpha)`.
    Power { c: f64, alpha: f64 },
    /// `c`.
    Constant { c: f64 },
}

/// A density on an interval that does not straddle `0`. Infinite endpoints
/// are written `null`, `"inf"` or `"-inf"` in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPiece {
    #[serde(serialize_with = "ser_interval", deserialize_with = "de_interval")]
    pub interval: (f64, f64),
    #[serde(flatten)]
    pub form: DensityForm,
}

impl DensityPiece {
    pub fn power(lo: f64, hi: f64, c: f64, alpha: f64) -> Self {
        DensityPiece { interval: (lo, hi), form: DensityForm::Power { c, alpha } }
    }

    pub fn constant(lo: f64, hi: f64, c: f64) -> Self {
        DensityPiece { interval: (lo, hi), form: DensityForm::Constant { c } }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawBound {
    Num(f64),
    Text(String),
}

fn de_interval<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<(f64, f64), D::Error> {
    use serde::de::Error as _;
    let raw: [Option<RawBound>; 2] = Deserialize::deserialize(d)?;
    let conv = |b: &Option<RawBound>, default: f64| -> std::result::Result<f64, D::Error> {
        match b {
            None => Ok(default),
            Some(RawBound::Num(x)) => Ok(*x),
            Some(RawBound::Text(s)) => match s.trim() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => Err(D::Error::custom(format!("bad interval endpoint {other:?}"))),
            },
        }
    };
    Ok((conv(&raw[0], f64::NEG_INFINITY)?, conv(&raw[1], f64::INFINITY)?))
}

fn ser_interval<S: Serializer>(v: &(f64, f64), s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    for x in [v.0, v.1] {
        if x == f64::INFINITY {
            seq.serialize_element("inf")?;
        } else if x == f64::NEG_INFINITY {
            seq.serialize_element("-inf")?;
        } else {
            seq.serialize_element(&x)?;
        }
    }
    seq.end()
}

/// Lévy measure: atoms `(y, mass)` plus non-overlapping density pieces.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevyMeasureSpec {
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pub pieces: Vec<DensityPiece>,
}

/// Generating triplet `(gamma, sigma^2, nu)` with truncation function
/// `1_{(-1, 1)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub gamma: f64,
    #[serde(default)]
    pub sigma2: f64,
    #[serde(default)]
    pub nu: LevyMeasureSpec,
}

/// Density piece in magnitude coordinates: `c u^s` on `[a, b]`, on the
/// positive (`side = 1`) or negative (`side = -1`) half-line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Part {
    pub side: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub s: f64,
}

/// `u^(e+1) / (e+1)`, or `ln u` for `e = -1`.
pub(crate) fn antiderivative(e: f64, u: f64) -> f64 {
    if e == -1.0 {
        u.ln()
    } else {
        u.powf(e + 1.0) / (e + 1.0)
    }
}

impl Part {
    #[allow(dead_code)]
    pub fn density(&self, u: f64) -> f64 {
        if u < self.a || u > self.b {
            0.0
        } else {
            self.c * u.powf(self.s)
        }
    }

    /// `int_{[lo, hi] cap [a, b]} u^p c u^s du`; may be infinite.
    pub fn moment(&self, p: f64, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(self.a);
        let hi = hi.min(self.b);
        if !(hi > lo) || self.c == 0.0 {
            return 0.0;
        }
        let e = p + self.s;
        let upper = if hi.is_infinite() {
            if e < -1.0 {
                0.0
            } else {
                return f64::INFINITY;
            }
        } else {
            antiderivative(e, hi)
        };
        let lower = if lo == 0.0 {
            if e > -1.0 {
                0.0
            } else {
                return f64::INFINITY;
            }
        } else {
            antiderivative(e, lo)
        };
        self.c * (upper - lower)
    }

    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        self.moment(0.0, lo, hi)
    }

    /// The `u` in `[lo, hi]` with `int_lo^u c t^s dt = w`, for `w` in
    /// `[0, mass(lo, hi)]`. Inverts from whichever end keeps precision.
    pub fn quantile_in(&self, lo: f64, hi: f64, w: f64) -> f64 {
        let lo = lo.max(self.a);
        let hi = hi.min(self.b);
        let total = self.mass(lo, hi);
        let e = self.s + 1.0;
        let u = if w <= 0.5 * total {
            // from the bottom: F(u) = F(lo) + w / c
            if e == 0.0 {
                lo * (w / self.c).exp()
            } else {
                (lo.powf(e) + e * w / self.c).powf(1.0 / e)
            }
        } else {
            let v = (total - w).max(0.0);
            // from the top: F(u) = F(hi) - v / c
            if e == 0.0 {
                hi * (-v / self.c).exp()
            } else {
                let top = if hi.is_infinite() { 0.0 } else { hi.powf(e) };
                (top - e * v / self.c).powf(1.0 / e)
            }
        };
        u.clamp(lo, hi)
    }
}

/// Tolerance for comparing measure-derived quantities.
pub(crate) const MEASURE_TOL: f64 = 1e-12;

impl LevyMeasureSpec {
    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.pieces.iter().all(|p| piece_coef(p) == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for &(y, m) in &self.atoms {
            if !(y.is_finite() && y != 0.0) {
                bail!(Argument, "atom location must be finite and nonzero, got {y}");
            }
            if !(m.is_finite() && m > 0.0) {
                bail!(Argument, "atom mass must be positive, got {m} at y = {y}");
            }
        }
        let mut ys: Vec<f64> = self.atoms.iter().map(|a| a.0).collect();
        ys.sort_by(f64::total_cmp);
        if ys.windows(2).any(|w| w[0] == w[1]) {
            bail!(Argument, "atom locations must be distinct");
        }
        for p in &self.pieces {
            let (lo, hi) = p.interval;
            if lo.is_nan() || hi.is_nan() || !(lo < hi) {
                bail!(Argument, "piece interval [{lo}, {hi}] is empty or malformed");
            }
            if lo < 0.0 && hi > 0.0 {
                bail!(Argument, "piece interval [{lo}, {hi}] straddles 0; split it into one-sided pieces");
            }
            let (c, alpha) = match p.form {
                DensityForm::Power { c, alpha } => (c, alpha),
                DensityForm::Constant { c } => (c, -1.0),
            };
            if !(c.is_finite() && c >= 0.0) {
                bail!(Argument, "density coefficient must be finite and >= 0, got {c}");
            }
            if !alpha.is_finite() {
                bail!(Argument, "power-law exponent must be finite");
            }
            let part = to_part(p);
            if part.a == 0.0 && alpha >= 2.0 {
                bail!(
                    Argument,
                    "power law c/|y|^(1+alpha) near 0 needs alpha < 2 for int (y^2 ^ 1) nu(dy) < inf, got alpha = {alpha}"
                );
            }
            if part.b.is_infinite() && alpha <= 0.0 {
                bail!(Argument, "unbounded piece [{lo}, {hi}] has infinite mass; needs a power law with alpha > 0");
            }
        }
        for side in [1.0, -1.0] {
            let mut parts: Vec<Part> = self.parts().into_iter().filter(|p| p.side == side).collect();
            parts.sort_by(|x, y| x.a.total_cmp(&y.a));
            if parts.windows(2).any(|w| w[1].a < w[0].b) {
                bail!(Argument, "density pieces must not overlap");
            }
        }
        Ok(())
    }

    pub(crate) fn parts(&self) -> Vec<Part> {
        self.pieces.iter().map(to_part).filter(|p| p.c > 0.0).collect()
    }

    /// The mirrored measure `A -> nu(-A)`.
    pub fn mirror(&self) -> Self {
        LevyMeasureSpec {
            atoms: self.atoms.iter().map(|(y, m)| (-y, *m)).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| DensityPiece { interval: (-p.interval.1, -p.interval.0), form: p.form.clone() })
                .collect(),
        }
    }

    /// Total mass (may be infinite).
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.parts().iter().map(|p| p.mass(0.0, f64::INFINITY)).sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.total_mass().is_finite()
    }

    /// `nu((a, inf))` for `a > 0`.
    pub fn tail_pos(&self, a: f64) -> f64 {
        self.tail(1.0, a, false)
    }

    /// `nu((-inf, -a))` for `a > 0`.
    pub fn tail_neg(&self, a: f64) -> f64 {
        self.tail(-1.0, a, false)
    }

    /// Tail on one side beyond magnitude `a`, optionally including an atom at `a`.
    pub(crate) fn tail(&self, side: f64, a: f64, closed: bool) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|(y, _)| y.signum() == side && (y.abs() > a || (closed && y.abs() == a)))
            .map(|a| a.1)
            .sum();
        let dens: f64 = self.parts().iter().filter(|p| p.side == side).map(|p| p.mass(a, f64::INFINITY)).sum();
        atoms + dens
    }

    /// `int_{|y| < eps} y^2 nu(dy)`.
    pub fn small_second_moment(&self, eps: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|(y, _)| y.abs() < eps).map(|(y, m)| y * y * m).sum();
        atoms + self.parts().iter().map(|p| p.moment(2.0, 0.0, eps)).sum::<f64>()
    }

    /// `int_{lo <= |y| < hi} y nu(dy)` for `0 < lo`.
    pub fn band_first_moment(&self, lo: f64, hi: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|(y, _)| y.abs() >= lo && y.abs() < hi)
            .map(|(y, m)| y * m)
            .sum();
        atoms + self.parts().iter().map(|p| p.side * p.moment(1.0, lo, hi)).sum::<f64>()
    }

    /// Mass of `{lo <= |y| < hi}`.
    pub fn band_mass(&self, lo: f64, hi: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|(y, _)| y.abs() >= lo && y.abs() < hi).map(|a| a.1).sum();
        atoms + self.parts().iter().map(|p| p.mass(lo, hi)).sum::<f64>()
    }

    /// `lim_{eps -> 0} int_{eps <= |y| < 1} y nu(dy)`, exactly per piece.
    pub fn small_jump_mean_limit(&self) -> Limit {
        let mut finite: f64 = self.atoms.iter().filter(|(y, _)| y.abs() < 1.0).map(|(y, m)| y * m).sum();
        let mut terms = Vec::new();
        for p in self.parts() {
            if p.a == 0.0 {
                terms.push((p.side * p.c, p.s + 1.0, p.b.min(1.0)));
            } else {
                finite += p.side * p.moment(1.0, p.a, 1.0);
            }
        }
        power_sum_limit(&terms).shift(finite)
    }

    /// `lim_{a -> 0} [nu((a, inf)) - nu((-inf, -a))]`.
    pub(crate) fn tail_difference_at_zero(&self) -> Limit {
        let mut finite: f64 = self.atoms.iter().map(|(y, m)| y.signum() * m).sum();
        let mut terms = Vec::new();
        for p in self.parts() {
            if p.a == 0.0 {
                if p.b.is_infinite() {
                    // split at 1 so that every term has a finite upper end
                    terms.push((p.side * p.c, p.s, 1.0));
                    finite += p.side * p.mass(1.0, f64::INFINITY);
                } else {
                    terms.push((p.side * p.c, p.s, p.b));
                }
            } else {
                finite += p.side * p.mass(p.a, p.b);
            }
        }
        power_sum_limit(&terms).shift(finite)
    }
}

fn piece_coef(p: &DensityPiece) -> f64 {
    match p.form {
        DensityForm::Power { c, .. } | DensityForm::Constant { c } => c,
    }
}

fn to_part(p: &DensityPiece) -> Part {
    let (lo, hi) = p.interval;
    let (side, a, b) = if lo >= 0.0 { (1.0, lo, hi) } else { (-1.0, -hi, -lo) };
    let (c, s) = match p.form {
        DensityForm::Power { c, alpha } => (c, -1.0 - alpha),
        DensityForm::Constant { c } => (c, 0.0),
    };
    Part { side, a: a.max(0.0), b, c, s }
}

/// An extended real limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl Limit {
    pub fn finite(self) -> Option<f64> {
        match self {
            Limit::Finite(x) => Some(x),
            _ => None,
        }
    }

    fn shift(self, x: f64) -> Limit {
        match self {
            Limit::Finite(v) => Limit::Finite(v + x),
            other => other,
        }
    }

    /// `self <= x` (with the usual conventions for infinities).
    pub fn le(self, x: f64, tol: f64) -> bool {
        match self {
            Limit::Finite(v) => v <= x + tol,
            Limit::PlusInfinity => false,
            Limit::MinusInfinity => true,
        }
    }

    pub fn neg(self) -> Limit {
        match self {
            Limit::Finite(v) => Limit::Finite(-v),
            Limit::PlusInfinity => Limit::MinusInfinity,
            Limit::MinusInfinity => Limit::PlusInfinity,
        }
    }
}

/// `lim_{eps -> 0} sum_i coef_i int_eps^{upper_i} u^(e_i) du` with finite
/// upper ends. Terms with `e_i <= -1` diverge; those sharing an exponent
/// cancel when their coefficients sum to zero, and otherwise the most
/// singular uncancelled group decides the sign of the infinite limit.
pub(crate) fn power_sum_limit(terms: &[(f64, f64, f64)]) -> Limit {
    let mut finite = 0.0;
    let mut groups: Vec<(f64, f64, f64)> = Vec::new(); // (exponent, net coefficient, scale)
    for &(coef, e, upper) in terms {
        finite += coef * antiderivative(e, upper);
        if e > -1.0 {
            continue;
        }
        match groups.iter_mut().find(|g| (g.0 - e).abs() <= 1e-12 * e.abs().max(1.0)) {
            Some(g) => {
                g.1 += coef;
                g.2 += coef.abs();
            }
            None => groups.push((e, coef, coef.abs())),
        }
    }
    groups.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (_, net, scale) in groups {
        if net.abs() > MEASURE_TOL * scale {
            return if net > 0.0 { Limit::PlusInfinity } else { Limit::MinusInfinity };
        }
    }
    Limit::Finite(finite)
}

impl LevyTriplet {
    pub fn new(gamma: f64, sigma2: f64, nu: LevyMeasureSpec) -> Result<Self> {
        let t = LevyTriplet { gamma, sigma2, nu };
        t.validate()?;
        Ok(t)
    }

    /// Stable triplet: power laws `c_pos / y^(1+alpha)` on `(0, inf)` and
    /// `c_neg / |y|^(1+alpha)` on `(-inf, 0)`.
    pub fn stable(alpha: f64, c_pos: f64, c_neg: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            bail!(Argument, "stable index must lie in (0, 2), got {alpha}");
        }
        if !(c_pos >= 0.0 && c_neg >= 0.0 && c_pos + c_neg > 0.0) {
            bail!(Argument, "stable coefficients need c_pos, c_neg >= 0 with c_pos + c_neg > 0");
        }
        let mut pieces = Vec::new();
        if c_pos > 0.0 {
            pieces.push(DensityPiece::power(0.0, f64::INFINITY, c_pos, alpha));
        }
        if c_neg > 0.0 {
            pieces.push(DensityPiece::power(f64::NEG_INFINITY, 0.0, c_neg, alpha));
        }
        LevyTriplet::new(gamma, 0.0, LevyMeasureSpec { atoms: Vec::new(), pieces })
    }

    pub fn brownian(gamma: f64, sigma2: f64) -> Result<Self> {
        LevyTriplet::new(gamma, sigma2, LevyMeasureSpec::default())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() {
            bail!(Argument, "gamma must be finite");
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            bail!(Argument, "sigma2 must be finite and >= 0, got {}", self.sigma2);
        }
        self.nu.validate()
    }

    /// Triplet of the dual process `-X`: `(-gamma, sigma^2, nu(-.))`.
    pub fn dual(&self) -> Self {
        LevyTriplet { gamma: -self.gamma, sigma2: self.sigma2, nu: self.nu.mirror() }
    }

    /// If every piece is a full half-line power law with one common index,
    /// returns `(alpha, c_pos, c_neg)`.
    pub fn stable_parameters(&self) -> Option<(f64, f64, f64)> {
        if !self.nu.atoms.is_empty() || self.sigma2 != 0.0 || self.nu.pieces.is_empty() {
            return None;
        }
        let mut alpha = None;
        let (mut c_pos, mut c_neg) = (0.0, 0.0);
        for p in &self.nu.pieces {
            let DensityForm::Power { c, alpha: a } = p.form else { return None };
            match alpha {
                None => alpha = Some(a),
                Some(x) if x == a => {}
                _ => return None,
            }
            match p.interval {
                (lo, hi) if lo == 0.0 && hi == f64::INFINITY => c_pos += c,
                (lo, hi) if lo == f64::NEG_INFINITY && hi == 0.0 => c_neg += c,
                _ => return None,
            }
        }
        alpha.map(|a| (a, c_pos, c_neg))
    }
}

/// `b = gamma - int_{0 < |y| < 1} y nu(dy)`, the drift of the compound
/// Poisson representation; requires a finite measure.
pub fn finite_drift_b(t: &LevyTriplet) -> Result<f64> {
    t.validate()?;
    if !t.nu.is_finite() {
        bail!(Precondition, "the Lévy measure has infinite mass; no compound Poisson drift exists");
    }
    match t.nu.small_jump_mean_limit() {
        Limit::Finite(l) => Ok(t.gamma - l),
        _ => bail!(Internal, "finite measure with divergent small-jump mean"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(a: &[(f64, f64)]) -> LevyMeasureSpec {
        LevyMeasureSpec { atoms: a.to_vec(), pieces: Vec::new() }
    }

    #[test]
    fn drift_examples() {
        let t = LevyTriplet::new(1.0, 0.0, atoms(&[(0.5, 2.0)])).unwrap();
        assert_eq!(finite_drift_b(&t).unwrap(), 0.0);
        let t = LevyTriplet::new(0.0, 0.0, atoms(&[(0.3, 1.5), (-0.3, 1.5)])).unwrap();
        assert!(finite_drift_b(&t).unwrap().abs() < 1e-15);
        let t = LevyTriplet::new(-1.0, 0.0, atoms(&[(1.0, 1.0), (-2.0, 3.0)])).unwrap();
        assert_eq!(finite_drift_b(&t).unwrap(), -1.0);
        let s = LevyTriplet::stable(0.5, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(finite_drift_b(&s), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn stable_small_jump_limit() {
        let s = LevyTriplet::stable(0.5, 2.0, 1.0, 3.0).unwrap();
        let l = s.nu.small_jump_mean_limit().finite().unwrap();
        assert!((l - 2.0).abs() < 1e-12);
        let s = LevyTriplet::stable(1.5, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(s.nu.small_jump_mean_limit(), Limit::Finite(0.0));
        let s = LevyTriplet::stable(1.5, 2.0, 1.0, 0.0).unwrap();
        assert_eq!(s.nu.small_jump_mean_limit(), Limit::PlusInfinity);
        let s = LevyTriplet::stable(1.0, 1.0, 2.0, 0.0).unwrap();
        assert_eq!(s.nu.small_jump_mean_limit(), Limit::MinusInfinity);
    }

    #[test]
    fn moments_and_tails() {
        let s = LevyTriplet::stable(1.0, 1.0, 1.0, 0.0).unwrap();
        // 2 * int_0^eps y^2 y^-2 dy = 2 eps
        assert!((s.nu.small_second_moment(0.25) - 0.5).abs() < 1e-15);
        // int_a^inf y^-2 dy = 1/a
        assert!((s.nu.tail_pos(4.0) - 0.25).abs() < 1e-15);
        assert!(!s.nu.is_finite());
        let n = atoms(&[(1.0, 2.0), (-1.0, 1.0)]);
        assert_eq!(n.tail_pos(0.5), 2.0);
        assert_eq!(n.tail_pos(1.0), 0.0);
        assert_eq!(n.tail(1.0, 1.0, true), 2.0);
        assert_eq!(n.total_mass(), 3.0);
    }

    #[test]
    fn quantiles_invert_mass() {
        for (a, b, s) in [(0.1, 2.0, -1.5), (0.0, 1.0, 0.0), (0.5, f64::INFINITY, -2.0), (0.2, 3.0, -1.0)] {
            let p = Part { side: 1.0, a, b, c: 1.7, s };
            let total = p.mass(a, b);
            for w in [0.0, 0.1, 0.5, 0.9, 1.0] {
                let u = p.quantile_in(a, b, w * total);
                assert!((p.mass(a, u) - w * total).abs() < 1e-12 * total.max(1.0), "{a} {b} {s} {w}");
            }
        }
    }

    #[test]
    fn validation() {
        assert!(LevyTriplet::new(0.0, -1.0, LevyMeasureSpec::default()).is_err());
        let bad = LevyMeasureSpec { atoms: vec![], pieces: vec![DensityPiece::power(-1.0, 1.0, 1.0, 0.5)] };
        assert!(bad.validate().is_err());
        let bad = LevyMeasureSpec { atoms: vec![], pieces: vec![DensityPiece::power(0.0, 1.0, 1.0, 2.0)] };
        assert!(bad.validate().is_err());
        let bad = LevyMeasureSpec { atoms: vec![], pieces: vec![DensityPiece::constant(1.0, f64::INFINITY, 1.0)] };
        assert!(bad.validate().is_err());
        let bad = LevyMeasureSpec {
            atoms: vec![],
            pieces: vec![DensityPiece::constant(0.0, 2.0, 1.0), DensityPiece::constant(1.0, 3.0, 1.0)],
        };
        assert!(bad.validate().is_err());
        assert!(atoms(&[(0.0, 1.0)]).validate().is_err());
    }

    #[test]
    fn json_form() {
        let t: LevyTriplet = serde_json::from_str(
            r#"{"gamma": 0.5, "sigma2": 1, "nu": {"atoms": [[1, 2]],
                "pieces": [{"interval": [0, null], "form": "power", "c": 1, "alpha": 0.5},
                           {"interval": ["-inf", -0.5], "form": "power", "c": 2, "alpha": 1.5},
                           {"interval": [-0.5, 0], "form": "constant", "c": 3}]}}"#,
        )
        .unwrap();
        t.validate().unwrap();
        assert_eq!(t.nu.pieces[0].interval, (0.0, f64::INFINITY));
        assert_eq!(t.nu.pieces[1].interval, (f64::NEG_INFINITY, -0.5));
        let back: LevyTriplet = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
