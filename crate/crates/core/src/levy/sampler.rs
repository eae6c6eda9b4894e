//! Jump-size samplers.
//!
//! [`BandSampler`] draws from `nu` restricted to a magnitude band
//! `{lo <= |y| < hi}`, normalised, by exact inversion. It exposes both the
//! left-continuous quantile `Q` and the upper quantile `Q+`, which the
//! comonotone coupling `(Q(U), -Q+(1 - U))` needs.
//!
//! [`StableLaw`] samples increments of a pure stable process by the
//! Chambers–Mallows–Stuck method.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{bail, Result};
use crate::levy::measure::{LevyMeasureSpec, LevyTriplet, Part};

/// Uniform draw in the open interval `(0, 1)`.
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[derive(Clone, Debug)]
enum Comp {
    Atom { y: f64 },
    /// Density part restricted to magnitudes `[lo, hi]`.
    Dens { part: Part, lo: f64, hi: f64 },
}

impl Comp {
    /// Leftmost real coordinate, for ordering.
    fn left(&self) -> f64 {
        match *self {
            Comp::Atom { y } => y,
            Comp::Dens { part, lo, hi } => {
                if part.side > 0.0 {
                    lo
                } else {
                    -hi
                }
            }
        }
    }

    fn right(&self) -> f64 {
        match *self {
            Comp::Atom { y } => y,
            Comp::Dens { part, lo, hi } => {
                if part.side > 0.0 {
                    hi
                } else {
                    -lo
                }
            }
        }
    }

    /// Point with mass `w` of this component to its left.
    fn locate(&self, w: f64, mass: f64) -> f64 {
        match *self {
            Comp::Atom { y } => y,
            Comp::Dens { part, lo, hi } => {
                if part.side > 0.0 {
                    part.quantile_in(lo, hi, w)
                } else {
                    -part.quantile_in(lo, hi, (mass - w).max(0.0))
                }
            }
        }
    }
}

/// `nu` restricted to `{lo <= |y| < hi}`.
#[derive(Clone, Debug)]
pub struct BandSampler {
    comps: Vec<(Comp, f64)>,
    /// `ends[i]` is the mass of components `0..=i`.
    ends: Vec<f64>,
    total: f64,
}

impl BandSampler {
    pub fn new(nu: &LevyMeasureSpec, lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo) {
            bail!(Argument, "bad magnitude band [{lo}, {hi})");
        }
        let mut comps: Vec<(Comp, f64)> = nu
            .atoms
            .iter()
            .filter(|(y, _)| y.abs() >= lo && y.abs() < hi)
            .map(|&(y, m)| (Comp::Atom { y }, m))
            .collect();
        for part in nu.parts() {
            let a = part.a.max(lo);
            let b = part.b.min(hi);
            if !(b > a) {
                continue;
            }
            // split at atoms inside the piece so that components never interleave
            let mut cuts = vec![a];
            cuts.extend(
                nu.atoms
                    .iter()
                    .filter(|(y, _)| y.signum() == part.side && y.abs() > a && y.abs() < b)
                    .map(|(y, _)| y.abs()),
            );
            cuts.push(b);
            cuts.sort_by(f64::total_cmp);
            for w in cuts.windows(2) {
                let m = part.mass(w[0], w[1]);
                if m > 0.0 {
                    comps.push((Comp::Dens { part, lo: w[0], hi: w[1] }, m));
                }
            }
        }
        if comps.iter().any(|(_, m)| !m.is_finite()) {
            bail!(Precondition, "the Lévy measure has infinite mass on |y| in [{lo}, {hi}); raise the lower cutoff");
        }
        comps.sort_by(|x, y| x.0.left().total_cmp(&y.0.left()).then(x.0.right().total_cmp(&y.0.right())));
        let mut ends = Vec::with_capacity(comps.len());
        let mut acc = 0.0;
        for (_, m) in &comps {
            acc += m;
            ends.push(acc);
        }
        Ok(BandSampler { comps, ends, total: acc })
    }

    /// Mass of the band.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// `Q(u) = inf{y : F(y) >= u}` for the normalised band law.
    pub fn quantile(&self, u: f64) -> f64 {
        if self.comps.is_empty() {
            return 0.0;
        }
        let t = u * self.total;
        let i = self.ends.partition_point(|&e| e < t).min(self.comps.len() - 1);
        self.at(i, t)
    }

    /// `Q+(v) = inf{y : F(y) > v}`.
    pub fn upper_quantile(&self, v: f64) -> f64 {
        if self.comps.is_empty() {
            return 0.0;
        }
        let t = v * self.total;
        let i = self.ends.partition_point(|&e| e <= t);
        if i >= self.comps.len() {
            return self.comps[self.comps.len() - 1].0.right();
        }
        self.at(i, t)
    }

    fn at(&self, i: usize, t: f64) -> f64 {
        let start = if i == 0 { 0.0 } else { self.ends[i - 1] };
        let (comp, mass) = &self.comps[i];
        comp.locate((t - start).clamp(0.0, *mass), *mass)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open01(rng))
    }
}

/// Unit-time law of a pure stable process, `alpha != 1` or symmetric `alpha = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StableLaw {
    pub alpha: f64,
    /// Scale `sigma` of the unit-time marginal.
    pub scale: f64,
    pub beta: f64,
    /// Location of the unit-time marginal.
    pub mu: f64,
}

impl StableLaw {
    /// From a stable triplet `(gamma, 0, c+ y^{-1-alpha} dy + c- |y|^{-1-alpha} dy)`:
    /// `sigma^alpha = -Gamma(-alpha) (c+ + c-) cos(pi alpha / 2)`,
    /// `beta = (c+ - c-) / (c+ + c-)` and `mu = gamma - (c+ - c-) / (1 - alpha)`
    /// (the compensator `1_{|y|<1}` shifts the location). For `alpha = 1`
    /// only the symmetric case is supported: Cauchy with scale `pi c`.
    pub fn from_triplet(t: &LevyTriplet) -> Result<Self> {
        t.validate()?;
        let Some((alpha, c1, c2)) = t.stable_parameters() else {
            bail!(Precondition, "exact stable sampling needs sigma2 = 0 and a pure power-law measure on both half-lines");
        };
        if alpha == 1.0 {
            if (c1 - c2).abs() > 1e-12 * (c1 + c2) {
                bail!(Precondition, "exact stable sampling at alpha = 1 needs c_pos = c_neg");
            }
            return Ok(StableLaw { alpha, scale: PI * c1, beta: 0.0, mu: t.gamma });
        }
        let scale = (-libm::tgamma(-alpha) * (c1 + c2) * (FRAC_PI_2 * alpha).cos()).powf(1.0 / alpha);
        Ok(StableLaw {
            alpha,
            scale,
            beta: (c1 - c2) / (c1 + c2),
            mu: t.gamma - (c1 - c2) / (1.0 - alpha),
        })
    }

    /// Standard draw with characteristic function
    /// `exp(-|u|^alpha (1 - i beta sgn(u) tan(pi alpha / 2)))`.
    fn standard<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v = PI * (open01(rng) - 0.5);
        if self.alpha == 1.0 {
            return v.tan();
        }
        let w: f64 = Exp1.sample(rng);
        let a = self.alpha;
        let t = self.beta * (FRAC_PI_2 * a).tan();
        let b = t.atan() / a;
        let s = (1.0 + t * t).powf(1.0 / (2.0 * a));
        s * (a * (v + b)).sin() / v.cos().powf(1.0 / a) * ((v - a * (v + b)).cos() / w).powf((1.0 - a) / a)
    }

    /// Increment over a time step `dt`.
    pub fn increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        let x = self.standard(rng);
        if self.alpha == 1.0 {
            self.scale * dt * x + self.mu * dt
        } else {
            self.scale * dt.powf(1.0 / self.alpha) * x + self.mu * dt
        }
    }
}
