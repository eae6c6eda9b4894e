//! Skew-symmetry classes of a Lévy triplet.
//!
//! * finite measure: RSS (`b >= 0` and `nu((a, inf)) >= nu((-inf, -a))` for
//!   all `a > 0`), LSS (mirror), symmetric;
//! * balanced small jumps: `L = lim int_{eps <= |y| < 1} y nu(dy)` finite;
//! * strong classes: SRSS = balanced, `gamma >= L`, the tail inequality and
//!   `nu` majorizing its mirror on some `(0, eps)`; SLSS is SRSS of the dual;
//! * weak classes: `gamma >= liminf int_{delta < |y| < 1} y nu(dy)` plus the
//!   tail inequality.
//!
//! All checks are exact on the atom + power-piece representation: between
//! consecutive breakpoints the density difference `g+(y) - g-(y)` has at
//! most two power terms, so its sign changes and the minima of the tail
//! difference can be located in closed form.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::levy::measure::{LevyMeasureSpec, LevyTriplet, Limit, Part, MEASURE_TOL};

/// Largest `eps` such that `nu` majorizes its mirror image on `(0, eps)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Majorization {
    /// Majorization holds on all of `(0, inf)`.
    Everywhere,
    /// Holds on `(0, eps)` and fails on every larger interval.
    UpTo { eps: f64 },
    /// Fails on every `(0, eps)`.
    Nowhere,
}

impl Majorization {
    /// Whether some `eps > 0` works, as the strong classes require.
    pub fn holds(&self) -> bool {
        !matches!(self, Majorization::Nowhere)
    }

    /// Whether majorization holds on `(0, eps)`.
    pub fn holds_on(&self, eps: f64) -> bool {
        match *self {
            Majorization::Everywhere => true,
            Majorization::UpTo { eps: e } => eps <= e,
            Majorization::Nowhere => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyClass {
    pub finite_nu: bool,
    /// `|nu|` when finite.
    pub total_mass: Option<f64>,
    /// Compound Poisson drift `gamma - int_{0<|y|<1} y nu(dy)` (finite `nu` only).
    pub b: Option<f64>,
    /// `nu((a, inf)) >= nu((-inf, -a))` for all `a > 0`.
    pub tails_right: bool,
    pub tails_left: bool,
    /// A threshold refuting `tails_right`, if any.
    pub tails_right_witness: Option<f64>,
    pub tails_left_witness: Option<f64>,
    pub rss: bool,
    pub lss: bool,
    /// `gamma = 0` and `nu` equals its mirror image.
    pub symmetric: bool,
    pub bsj: bool,
    pub l: Option<f64>,
    /// `lim_{delta -> 0} int_{delta < |y| < 1} y nu(dy)` in the extended reals.
    pub small_jump_limit: Limit,
    pub srss: bool,
    pub slss: bool,
    pub weak_rss: bool,
    pub weak_lss: bool,
    /// `nu` majorizes its mirror on `(0, eps)`.
    pub majorization: Majorization,
    /// The mirror majorizes `nu` on `(0, eps)`.
    pub dual_majorization: Majorization,
    /// Why each failing class fails.
    pub reasons: Vec<String>,
}

fn tol(scale: f64) -> f64 {
    MEASURE_TOL * (1.0 + scale.abs())
}

/// Breakpoints in `(0, inf)`: atom magnitudes and finite piece endpoints.
fn breakpoints(nu: &LevyMeasureSpec) -> Vec<f64> {
    let mut xs: Vec<f64> = nu.atoms.iter().map(|(y, _)| y.abs()).collect();
    for p in nu.parts() {
        xs.extend([p.a, p.b].into_iter().filter(|x| *x > 0.0 && x.is_finite()));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Density pieces covering the open interval `(l, r)` on each side.
fn covering(parts: &[Part], l: f64, r: f64) -> (Option<Part>, Option<Part>) {
    let find = |side: f64| parts.iter().copied().find(|p| p.side == side && p.a <= l && p.b >= r);
    (find(1.0), find(-1.0))
}

fn term(p: Option<Part>, y: f64) -> f64 {
    p.map(|p| p.c * y.powf(p.s)).unwrap_or(0.0)
}

/// Interior point of `(l, r)` with `r` possibly infinite and `l` possibly 0.
fn interior(l: f64, r: f64) -> f64 {
    match (l == 0.0, r.is_infinite()) {
        (true, true) => 1.0,
        (true, false) => r / 2.0,
        (false, true) => 2.0 * l,
        (false, false) => (l * r).sqrt(),
    }
}

/// Sub-intervals of `(l, r)` on which `g+ - g-` has constant sign, each
/// with that sign (`-1`, `0`, `1`). `root` is the interior sign change, if any.
fn sign_segments(pos: Option<Part>, neg: Option<Part>, l: f64, r: f64) -> (Option<f64>, Vec<(f64, f64, i8)>) {
    let root = match (pos, neg) {
        (Some(p), Some(n)) if p.s != n.s => {
            let y = (n.c / p.c).powf(1.0 / (p.s - n.s));
            (y > l && y < r).then_some(y)
        }
        _ => None,
    };
    let cuts: Vec<(f64, f64)> = match root {
        Some(y) => vec![(l, y), (y, r)],
        None => vec![(l, r)],
    };
    let segs = cuts
        .into_iter()
        .map(|(a, b)| {
            let y = interior(a, b);
            let (gp, gn) = (term(pos, y), term(neg, y));
            let d = gp - gn;
            let sign = if d.abs() <= MEASURE_TOL * (gp + gn) {
                0
            } else if d > 0.0 {
                1
            } else {
                -1
            };
            (a, b, sign)
        })
        .collect();
    (root, segs)
}

/// `nu((a, inf)) - nu((-inf, -a))`, or the closed-tail version for left limits.
fn tail_gap(nu: &LevyMeasureSpec, a: f64, closed: bool) -> (f64, f64) {
    let p = nu.tail(1.0, a, closed);
    let n = nu.tail(-1.0, a, closed);
    (p - n, p + n)
}

/// First `a > 0` with `nu((a, inf)) < nu((-inf, -a))`, if any. Minima of
/// the tail gap sit at breakpoints (from either side), at interior
/// critical points, or at the origin.
fn tail_witness(nu: &LevyMeasureSpec) -> Option<f64> {
    let parts = nu.parts();
    let xs = breakpoints(nu);
    let mut candidates: Vec<(f64, bool)> = Vec::new();
    let mut edges = vec![0.0];
    edges.extend(xs.iter().copied());
    edges.push(f64::INFINITY);
    for w in edges.windows(2) {
        let (l, r) = (w[0], w[1]);
        if l > 0.0 {
            candidates.push((l, false));
        }
        if r.is_finite() {
            candidates.push((r, true));
        }
        let (pos, neg) = covering(&parts, l, r);
        if let (Some(root), _) = sign_segments(pos, neg, l, r) {
            candidates.push((root, false));
        }
    }
    let first = xs.first().copied().unwrap_or(1.0);
    let near_zero = match nu.tail_difference_at_zero() {
        Limit::MinusInfinity => true,
        Limit::Finite(v) => v < -tol(v),
        Limit::PlusInfinity => false,
    };
    if near_zero {
        // the gap approaches a negative limit at 0: find a concrete threshold
        let mut a = first / 2.0;
        for _ in 0..200 {
            let (gap, scale) = tail_gap(nu, a, false);
            if gap < -tol(scale) {
                return Some(a);
            }
            a /= 2.0;
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates
        .into_iter()
        .find(|&(a, closed)| {
            let (gap, scale) = tail_gap(nu, a, closed);
            gap < -tol(scale)
        })
        .map(|(a, _)| a)
}

/// Largest `eps` with `nu(F) >= nu(-F)` for every `F` inside `(0, eps)`.
fn majorization(nu: &LevyMeasureSpec) -> Majorization {
    let mut first_failure = f64::INFINITY;
    for &(y, m) in nu.atoms.iter().filter(|(y, _)| *y < 0.0) {
        let mirror = nu.atoms.iter().find(|(x, _)| *x == -y).map(|a| a.1).unwrap_or(0.0);
        if mirror < m - tol(m) {
            first_failure = first_failure.min(-y);
        }
    }
    let parts = nu.parts();
    let mut edges = vec![0.0];
    edges.extend(breakpoints(nu));
    edges.push(f64::INFINITY);
    'scan: for w in edges.windows(2) {
        let (l, r) = (w[0], w[1]);
        if l >= first_failure {
            break;
        }
        let (pos, neg) = covering(&parts, l, r);
        for (a, _, sign) in sign_segments(pos, neg, l, r).1 {
            if sign < 0 {
                first_failure = first_failure.min(a);
                break 'scan;
            }
        }
    }
    if first_failure == f64::INFINITY {
        Majorization::Everywhere
    } else if first_failure <= 0.0 {
        Majorization::Nowhere
    } else {
        Majorization::UpTo { eps: first_failure }
    }
}

fn is_symmetric_measure(nu: &LevyMeasureSpec) -> bool {
    matches!(majorization(nu), Majorization::Everywhere) && matches!(majorization(&nu.mirror()), Majorization::Everywhere)
}

pub fn classify(t: &LevyTriplet) -> Result<LevyClass> {
    t.validate()?;
    let nu = &t.nu;
    let mut reasons = Vec::new();
    let mass = nu.total_mass();
    let finite_nu = mass.is_finite();

    let small_jump_limit = nu.small_jump_mean_limit();
    let l = small_jump_limit.finite();
    let bsj = l.is_some();
    let b = if finite_nu { l.map(|l| t.gamma - l) } else { None };

    let tails_right_witness = tail_witness(nu);
    let tails_left_witness = tail_witness(&nu.mirror());
    let tails_right = tails_right_witness.is_none();
    let tails_left = tails_left_witness.is_none();
    if let Some(a) = tails_right_witness {
        reasons.push(format!("nu((a, inf)) < nu((-inf, -a)) at a = {a}"));
    }
    if let Some(a) = tails_left_witness {
        reasons.push(format!("nu((a, inf)) > nu((-inf, -a)) at a = {a}"));
    }

    let majorization = majorization(nu);
    let dual_majorization = majorization_of_mirror(nu);
    let symmetric = t.gamma.abs() <= tol(0.0) && is_symmetric_measure(nu);

    let (rss, lss) = match b {
        Some(b) => (b >= -tol(t.gamma) && tails_right, b <= tol(t.gamma) && tails_left),
        None => {
            reasons.push("nu has infinite mass: the finite-measure classes do not apply".into());
            (false, false)
        }
    };
    if let Some(b) = b {
        if b < -tol(t.gamma) {
            reasons.push(format!("compound Poisson drift b = {b} < 0"));
        } else if b > tol(t.gamma) {
            reasons.push(format!("compound Poisson drift b = {b} > 0"));
        }
    }

    let (srss, slss) = match l {
        Some(l) => {
            let slack = tol(t.gamma.abs() + l.abs());
            let up = t.gamma >= l - slack;
            let down = t.gamma <= l + slack;
            if !up {
                reasons.push(format!("gamma = {} < L = {l}", t.gamma));
            }
            if !down {
                reasons.push(format!("gamma = {} > L = {l}", t.gamma));
            }
            if !majorization.holds() {
                reasons.push("nu does not majorize its mirror on any (0, eps)".into());
            }
            if !dual_majorization.holds() {
                reasons.push("the mirror of nu does not majorize nu on any (0, eps)".into());
            }
            (
                up && tails_right && majorization.holds(),
                down && tails_left && dual_majorization.holds(),
            )
        }
        None => {
            reasons.push(format!("small jumps are not balanced: int y nu(dy) tends to {small_jump_limit:?}"));
            (false, false)
        }
    };

    let slack = tol(t.gamma.abs() + l.map(f64::abs).unwrap_or(0.0));
    let weak_rss = small_jump_limit.le(t.gamma, slack) && tails_right;
    let weak_lss = small_jump_limit.neg().le(-t.gamma, slack) && tails_left;

    Ok(LevyClass {
        finite_nu,
        total_mass: finite_nu.then_some(mass),
        b,
        tails_right,
        tails_left,
        tails_right_witness,
        tails_left_witness,
        rss,
        lss,
        symmetric,
        bsj,
        l,
        small_jump_limit,
        srss,
        slss,
        weak_rss,
        weak_lss,
        majorization,
        dual_majorization,
        reasons,
    })
}

fn majorization_of_mirror(nu: &LevyMeasureSpec) -> Majorization {
    majorization(&nu.mirror())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::measure::DensityPiece;

    fn atoms(gamma: f64, a: &[(f64, f64)]) -> LevyTriplet {
        LevyTriplet::new(gamma, 0.0, LevyMeasureSpec { atoms: a.to_vec(), pieces: vec![] }).unwrap()
    }

    #[test]
    fn stable_examples() {
        let c = classify(&LevyTriplet::stable(1.5, 1.0, 1.0, 0.0).unwrap()).unwrap();
        assert!(c.symmetric && c.srss && c.slss && c.bsj);
        assert_eq!(c.l, Some(0.0));

        let c = classify(&LevyTriplet::stable(0.5, 2.0, 1.0, 3.0).unwrap()).unwrap();
        assert!(c.bsj && c.srss && !c.slss && !c.symmetric);
        assert!((c.l.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(c.majorization, Majorization::Everywhere);
        assert_eq!(c.dual_majorization, Majorization::Nowhere);

        let c = classify(&LevyTriplet::stable(1.5, 2.0, 1.0, 0.0).unwrap()).unwrap();
        assert!(!c.bsj && !c.srss);
        assert_eq!(c.small_jump_limit, Limit::PlusInfinity);
        assert!(!c.weak_rss && !c.weak_lss);
    }

    #[test]
    fn finite_examples() {
        let c = classify(&atoms(0.0, &[(1.0, 2.0), (-1.0, 1.0)])).unwrap();
        assert!(c.rss && !c.lss && !c.symmetric);
        assert_eq!(c.b, Some(0.0));
        // Remark: SRSS with finite nu implies RSS
        assert!(c.srss);

        let c = classify(&atoms(0.0, &[(1.0, 0.5), (-1.0, 1.0)])).unwrap();
        assert!(c.lss && !c.rss);

        let c = classify(&atoms(0.0, &[(0.5, 1.0), (-0.5, 1.0)])).unwrap();
        assert!(c.symmetric && c.rss && c.lss && c.srss && c.slss);

        // larger jumps up, but more small jumps down: tails cross
        let c = classify(&atoms(5.0, &[(2.0, 1.0), (-0.5, 3.0)])).unwrap();
        assert!(!c.tails_right && !c.tails_left);
        assert!(c.tails_right_witness.unwrap() < 0.5);
        let a = c.tails_left_witness.unwrap();
        assert!((0.5..2.0).contains(&a), "{a}");
    }

    #[test]
    fn tail_crossing_inside_pieces() {
        // g+ = 1 on (0, 2), g- = y^{-1/2}/4 ... tails cross at an interior critical point
        let nu = LevyMeasureSpec {
            atoms: vec![],
            pieces: vec![DensityPiece::constant(0.0, 2.0, 1.0), DensityPiece::power(-4.0, 0.0, 0.5, -0.5)],
        };
        let t = LevyTriplet::new(0.0, 0.0, nu).unwrap();
        let c = classify(&t).unwrap();
        // compare with a dense scan of the tail gap
        let mut worst = f64::INFINITY;
        for k in 1..4000 {
            let a = k as f64 * 0.001;
            worst = worst.min(t.nu.tail_pos(a) - t.nu.tail_neg(a));
        }
        assert_eq!(c.tails_right, worst >= -1e-12, "worst gap {worst}");
    }

    #[test]
    fn majorization_radius() {
        // positive density dominates below 1, negative above
        let nu = LevyMeasureSpec {
            atoms: vec![],
            pieces: vec![DensityPiece::power(0.0, 3.0, 2.0, 0.5), DensityPiece::power(-3.0, 0.0, 1.0, 1.5)],
        };
        // 2 y^-1.5 >= y^-2.5  iff  y >= 1/2
        let c = classify(&LevyTriplet::new(0.0, 0.0, nu).unwrap()).unwrap();
        assert_eq!(c.majorization, Majorization::Nowhere);
        match c.dual_majorization {
            Majorization::UpTo { eps } => assert!((eps - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }

        let nu = LevyMeasureSpec { atoms: vec![(0.2, 1.0), (-0.3, 1.0)], pieces: vec![] };
        let c = classify(&LevyTriplet::new(0.0, 0.0, nu).unwrap()).unwrap();
        assert_eq!(c.majorization, Majorization::UpTo { eps: 0.3 });
        assert_eq!(c.dual_majorization, Majorization::UpTo { eps: 0.2 });
    }

    #[test]
    fn dual_swaps_classes() {
        for t in [
            LevyTriplet::stable(0.5, 2.0, 1.0, 3.0).unwrap(),
            LevyTriplet::stable(1.2, 1.0, 1.0, -0.4).unwrap(),
            atoms(0.3, &[(1.0, 2.0), (-0.5, 1.0)]),
        ] {
            let a = classify(&t).unwrap();
            let b = classify(&t.dual()).unwrap();
            assert_eq!((a.rss, a.lss), (b.lss, b.rss));
            assert_eq!((a.srss, a.slss), (b.slss, b.srss));
            assert_eq!((a.weak_rss, a.weak_lss), (b.weak_lss, b.weak_rss));
            assert_eq!(a.symmetric, b.symmetric);
            assert_eq!(a.bsj, b.bsj);
            assert_eq!(a.l.map(|l| -l), b.l);
        }
    }

    #[test]
    fn rss_without_majorization() {
        // g+ = 2 on (0, 1), g- = 3 on (0, 1/2): tails dominate, small jumps do not
        let nu = LevyMeasureSpec {
            atoms: vec![],
            pieces: vec![DensityPiece::constant(0.0, 1.0, 2.0), DensityPiece::constant(-0.5, 0.0, 3.0)],
        };
        let c = classify(&LevyTriplet::new(1.0, 0.0, nu).unwrap()).unwrap();
        assert!(c.tails_right && c.rss && c.weak_rss);
        assert!((c.l.unwrap() - 0.625).abs() < 1e-12);
        assert_eq!(c.majorization, Majorization::Nowhere);
        assert!(!c.srss);
    }

    #[test]
    fn unbalanced_downward_small_jumps_break_tails() {
        let nu = LevyMeasureSpec {
            atoms: vec![(3.0, 50.0)],
            pieces: vec![DensityPiece::power(-0.1, 0.0, 1.0, 1.5)],
        };
        let c = classify(&LevyTriplet::new(0.0, 0.0, nu).unwrap()).unwrap();
        assert_eq!(c.small_jump_limit, Limit::MinusInfinity);
        let a = c.tails_right_witness.unwrap();
        assert!(a > 0.0 && a < 0.1);
        assert!(!c.weak_rss && !c.srss);
    }
}
