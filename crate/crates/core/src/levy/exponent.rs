//! The characteristic exponent
//! `eta(u) = i gamma u - sigma^2 u^2 / 2 + int (e^{iuy} - 1 - iuy 1_{|y|<1}) nu(dy)`.
//!
//! Atoms are summed directly. Half-line power laws use the closed forms
//! `Gamma(-alpha) (-iu)^alpha - iu / (1 - alpha)` (alpha != 1) and
//! `-pi|u|/2 - iu ln|u| + iu (1 - euler_gamma)` (alpha = 1); tails
//! `(a, inf)` rotate the oscillatory part onto the imaginary axis, and
//! bounded pieces away from the origin are integrated adaptively.

use num_complex::Complex64;

use crate::error::Result;
use crate::levy::measure::{antiderivative, LevyTriplet, Part};
use crate::levy::quad::integrate;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ABS_TOL: f64 = 1e-12;
const REL_TOL: f64 = 1e-11;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

pub fn characteristic_exponent(t: &LevyTriplet, u: f64) -> Result<Complex64> {
    t.validate()?;
    if u == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut eta = Complex64::new(-0.5 * t.sigma2 * u * u, t.gamma * u);
    for &(y, m) in &t.nu.atoms {
        let comp = if y.abs() < 1.0 { u * y } else { 0.0 };
        eta += m * (Complex64::new(0.0, u * y).exp() - 1.0 - i() * comp);
    }
    for p in t.nu.parts() {
        eta += p.c * half_line(p.side * u, &p)?;
    }
    Ok(eta)
}

/// `E exp(iu X_time) = exp(time * eta(u))`.
pub fn characteristic_function(t: &LevyTriplet, u: f64, time: f64) -> Result<Complex64> {
    Ok((time * characteristic_exponent(t, u)?).exp())
}

/// `int_a^b (e^{iuy} - 1 - iuy 1_{y<1}) y^s dy` on the positive half-line.
fn half_line(u: f64, p: &Part) -> Result<Complex64> {
    let alpha = -1.0 - p.s;
    let singular_ok = alpha > 0.0 && alpha < 2.0;
    match (p.a == 0.0, p.b.is_infinite()) {
        (true, true) => Ok(full(u, alpha)),
        (true, false) if singular_ok => Ok(full(u, alpha) - tail(u, p.b, p.s)?),
        (false, true) => tail(u, p.a, p.s),
        _ => bounded(u, p.a, p.b, p.s),
    }
}

/// Whole half-line power law `y^(-1-alpha)`, `0 < alpha < 2`.
fn full(u: f64, alpha: f64) -> Complex64 {
    if alpha == 1.0 {
        let au = u.abs();
        Complex64::new(-std::f64::consts::FRAC_PI_2 * au, -u * au.ln() + u * (1.0 - EULER_GAMMA))
    } else {
        let phase = -std::f64::consts::FRAC_PI_2 * alpha * u.signum();
        let pow = u.abs().powf(alpha) * Complex64::new(0.0, phase).exp();
        libm::tgamma(-alpha) * pow - i() * (u / (1.0 - alpha))
    }
}

/// `int_a^inf (e^{iuy} - 1 - iuy 1_{y<1}) y^s dy` for `a > 0`, `s < -1`.
fn tail(u: f64, a: f64, s: f64) -> Result<Complex64> {
    let mass = -a.powf(s + 1.0) / (s + 1.0);
    let comp = if a < 1.0 { antiderivative(s + 1.0, 1.0) - antiderivative(s + 1.0, a) } else { 0.0 };
    Ok(oscillatory_tail(u, a, s)? - mass - i() * (u * comp))
}

/// `int_a^inf e^{iuy} y^s dy` via `y = a + it`: for `u > 0` this equals
/// `i e^{iua} int_0^inf e^{-ut} (a + it)^s dt`; negative `u` conjugates.
fn oscillatory_tail(u: f64, a: f64, s: f64) -> Result<Complex64> {
    let w = u.abs();
    let upper = 60.0 / w;
    let g = |t: f64| (-w * t).exp() * Complex64::new(a, t).powf(s);
    let scale = a.powf(s) / w;
    let mut v = integrate(g, 0.0, upper.min(a), ABS_TOL * scale, REL_TOL)?;
    if upper > a {
        v += integrate(g, a, upper, ABS_TOL * scale, REL_TOL)?;
    }
    let r = i() * Complex64::new(0.0, w * a).exp() * v;
    Ok(if u > 0.0 { r } else { r.conj() })
}

/// Bounded piece `[a, b]` by adaptive quadrature, split at the
/// compensation boundary `1`.
fn bounded(u: f64, a: f64, b: f64, s: f64) -> Result<Complex64> {
    let inner = |y: f64| {
        let z = u * y;
        // e^{iz} - 1 - iz without cancellation for small z
        let d = if z.abs() < 1e-3 {
            Complex64::new(-z * z / 2.0 + z.powi(4) / 24.0, -z.powi(3) / 6.0)
        } else {
            Complex64::new(z.cos() - 1.0, z.sin() - z)
        };
        d * y.powf(s)
    };
    let outer = |y: f64| Complex64::new((u * y).cos() - 1.0, (u * y).sin()) * y.powf(s);
    let scale = b.max(1.0).powf(s.max(0.0)) * (b - a);
    let mut v = Complex64::new(0.0, 0.0);
    if a < 1.0 {
        v += integrate(inner, a, b.min(1.0), ABS_TOL * scale, REL_TOL)?;
    }
    if b > 1.0 {
        v += integrate(outer, a.max(1.0), b, ABS_TOL * scale, REL_TOL)?;
    }
    Ok(v)
}
