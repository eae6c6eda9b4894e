//! Path simulation on a fixed grid plus jump epochs.
//!
//! * `Interlacing`: exact compound Poisson + drift `b` + Brownian motion;
//!   needs a finite measure.
//! * `Truncated`: jumps with `|y| >= eps_n` are kept exactly; the smaller
//!   ones are replaced by their compensated mean, giving drift `gamma - L`.
//!   Needs balanced small jumps (`L` finite).
//! * `StableExact`: independent stable increments on the grid.
//!
//! Per path the `Paths` stream is consumed in a fixed order: jump count,
//! jump times and marks (band by band), then one normal per epoch. With
//! bridge refinement the continuous running maximum between epochs is
//! drawn from the `Bridge` stream.

use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::duality::CoupledPathPair;
use crate::error::{bail, Result};
use crate::levy::classify::classify;
use crate::levy::measure::{LevyTriplet, Limit};
use crate::levy::sampler::{open01, BandSampler, StableLaw};
use crate::levy::truncation::truncation_schedule;
use crate::rng::{substream, Stream, StreamRng};

/// Expected jump count per path above which simulation is refused.
pub const MAX_EXPECTED_JUMPS: f64 = 1e8;

/// Dual paths use stream indices offset by this amount.
pub const DUAL_INDEX_OFFSET: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SimMode {
    Interlacing,
    Truncated { level: usize, eps_seed: f64 },
    StableExact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimScheme {
    #[serde(flatten)]
    pub mode: SimMode,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub bridge_max_refinement: bool,
}

fn default_steps() -> usize {
    100
}

impl SimScheme {
    pub fn interlacing(steps: usize) -> Self {
        SimScheme { mode: SimMode::Interlacing, steps, bridge_max_refinement: false }
    }

    pub fn truncated(level: usize, eps_seed: f64, steps: usize) -> Self {
        SimScheme { mode: SimMode::Truncated { level, eps_seed }, steps, bridge_max_refinement: false }
    }

    pub fn stable_exact(steps: usize) -> Self {
        SimScheme { mode: SimMode::StableExact, steps, bridge_max_refinement: false }
    }

    pub fn with_bridge(mut self) -> Self {
        self.bridge_max_refinement = true;
        self
    }

    pub fn label(&self) -> String {
        let base = match self.mode {
            SimMode::Interlacing => "interlacing".to_string(),
            SimMode::Truncated { level, eps_seed } => format!("truncated(n={level}, eps_seed={eps_seed})"),
            SimMode::StableExact => "stable_exact".to_string(),
        };
        format!("{base}, {} steps{}", self.steps, if self.bridge_max_refinement { ", bridge max" } else { "" })
    }
}

/// A simulated path observed at grid and jump epochs (starting at `(0, 0)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Running maximum, including bridge maxima between epochs when enabled.
    pub running_max: Vec<f64>,
    pub jumps: usize,
}

impl SamplePath {
    pub fn terminal(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    pub fn terminal_max(&self) -> f64 {
        *self.running_max.last().unwrap_or(&0.0)
    }
}

#[derive(Clone, Debug)]
enum Engine {
    Jumps(Vec<BandSampler>),
    Stable(StableLaw),
}

/// A validated simulation setup, reusable across paths.
#[derive(Clone, Debug)]
pub struct PathSimulator {
    horizon: f64,
    steps: usize,
    bridge: bool,
    sigma: f64,
    drift: f64,
    engine: Engine,
    eps: Option<f64>,
}

fn check_common(t: &LevyTriplet, horizon: f64, scheme: &SimScheme) -> Result<()> {
    t.validate()?;
    if !(horizon.is_finite() && horizon > 0.0) {
        bail!(Argument, "horizon must be positive and finite, got {horizon}");
    }
    if scheme.steps == 0 {
        bail!(Argument, "steps must be at least 1");
    }
    Ok(())
}

fn check_rate(rate: f64, horizon: f64) -> Result<()> {
    if rate * horizon > MAX_EXPECTED_JUMPS {
        bail!(
            Resource,
            "expected {:.3e} jumps per path exceeds the limit {MAX_EXPECTED_JUMPS:e}; lower the truncation level or the horizon",
            rate * horizon
        );
    }
    Ok(())
}

/// `(drift, eps_n)` of the truncated scheme, and the truncation thresholds `eps_0..=eps_n`.
fn truncated_setup(t: &LevyTriplet, level: usize, eps_seed: f64) -> Result<(f64, Vec<f64>)> {
    let l = match t.nu.small_jump_mean_limit() {
        Limit::Finite(l) => l,
        other => bail!(
            Precondition,
            "truncated simulation needs balanced small jumps, but int_(eps<=|y|<1) y nu(dy) tends to {other:?}"
        ),
    };
    let schedule = truncation_schedule(t, level, eps_seed)?;
    Ok((t.gamma - l, schedule.iter().map(|lv| lv.eps).collect()))
}

impl PathSimulator {
    pub fn new(t: &LevyTriplet, horizon: f64, scheme: &SimScheme) -> Result<Self> {
        check_common(t, horizon, scheme)?;
        let sigma = t.sigma2.sqrt();
        let (drift, engine, eps) = match scheme.mode {
            SimMode::Interlacing => {
                if !t.nu.is_finite() {
                    bail!(Precondition, "interlacing simulation needs a finite Lévy measure; use the truncated scheme");
                }
                let b = crate::levy::measure::finite_drift_b(t)?;
                let band = BandSampler::new(&t.nu, 0.0, f64::INFINITY)?;
                (b, Engine::Jumps(vec![band]), None)
            }
            SimMode::Truncated { level, eps_seed } => {
                let (drift, eps) = truncated_setup(t, level, eps_seed)?;
                let eps_n = eps[level];
                (drift, Engine::Jumps(vec![BandSampler::new(&t.nu, eps_n, f64::INFINITY)?]), Some(eps_n))
            }
            SimMode::StableExact => {
                let law = StableLaw::from_triplet(t)?;
                (law.mu, Engine::Stable(law), None)
            }
        };
        if let Engine::Jumps(bands) = &engine {
            check_rate(bands.iter().map(BandSampler::total).sum(), horizon)?;
        }
        Ok(PathSimulator { horizon, steps: scheme.steps, bridge: scheme.bridge_max_refinement, sigma, drift, engine, eps })
    }

    /// Drift of the continuous part (the stable location for exact stable sampling).
    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Rate of simulated jumps (0 for exact stable sampling).
    pub fn jump_rate(&self) -> f64 {
        match &self.engine {
            Engine::Jumps(b) => b.iter().map(BandSampler::total).sum(),
            Engine::Stable(_) => 0.0,
        }
    }

    /// Truncation threshold `eps_n` of the truncated scheme.
    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn simulate(&self, seed: u64, index: u64) -> SamplePath {
        let mut rng = substream(seed, Stream::Paths, index);
        let mut bridge = self.bridge.then(|| substream(seed, Stream::Bridge, index));
        match &self.engine {
            Engine::Jumps(bands) => {
                let jumps = draw_jumps(bands, self.horizon, &mut rng, |s, r| [s.sample(r)]);
                let w = walk(self.horizon, self.steps, [self.drift], self.sigma, &jumps, &mut rng, bridge.as_mut());
                SamplePath {
                    times: w.times,
                    values: w.x.iter().map(|v| v[0]).collect(),
                    running_max: w.m.iter().map(|v| v[0]).collect(),
                    jumps: jumps.len(),
                }
            }
            Engine::Stable(law) => {
                let grid = grid(self.horizon, self.steps);
                let mut times = vec![0.0];
                let mut values = vec![0.0];
                let mut running_max = vec![0.0];
                let (mut x, mut m, mut prev) = (0.0f64, 0.0f64, 0.0);
                for t in grid {
                    x += law.increment(t - prev, &mut rng);
                    m = m.max(x);
                    prev = t;
                    times.push(t);
                    values.push(x);
                    running_max.push(m);
                }
                SamplePath { times, values, running_max, jumps: 0 }
            }
        }
    }
}

fn grid(horizon: f64, steps: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (1..steps).map(|k| horizon * k as f64 / steps as f64).collect();
    g.push(horizon);
    g
}

/// Poisson count, uniform times and marks for each band; merged in time order.
fn draw_jumps<const K: usize>(
    bands: &[BandSampler],
    horizon: f64,
    rng: &mut StreamRng,
    mark: impl Fn(&BandSampler, &mut StreamRng) -> [f64; K],
) -> Vec<(f64, [f64; K])> {
    let mut out = Vec::new();
    for band in bands {
        let lambda = band.total() * horizon;
        if !(lambda > 0.0) {
            continue;
        }
        let count = Poisson::new(lambda).map(|p| p.sample(rng) as usize).unwrap_or(0);
        let times: Vec<f64> = (0..count).map(|_| horizon * open01(rng)).collect();
        for t in times {
            out.push((t, mark(band, rng)));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

struct Walk<const K: usize> {
    times: Vec<f64>,
    x: Vec<[f64; K]>,
    m: Vec<[f64; K]>,
}

/// Advances `K` tracks that share the Brownian increments (and bridge
/// uniforms) but have their own drifts and jump marks.
fn walk<const K: usize>(
    horizon: f64,
    steps: usize,
    drift: [f64; K],
    sigma: f64,
    jumps: &[(f64, [f64; K])],
    rng: &mut StreamRng,
    mut bridge: Option<&mut StreamRng>,
) -> Walk<K> {
    let grid = grid(horizon, steps);
    let cap = grid.len() + jumps.len() + 1;
    let mut out = Walk { times: Vec::with_capacity(cap), x: Vec::with_capacity(cap), m: Vec::with_capacity(cap) };
    let mut x = [0.0; K];
    let mut m = [0.0; K];
    out.times.push(0.0);
    out.x.push(x);
    out.m.push(m);
    let (mut gi, mut ji) = (0, 0);
    let mut now = 0.0;
    while gi < grid.len() || ji < jumps.len() {
        let t = match (grid.get(gi), jumps.get(ji)) {
            (Some(&g), Some(&(j, _))) => g.min(j),
            (Some(&g), None) => g,
            (None, Some(&(j, _))) => j,
            (None, None) => unreachable!(),
        };
        let dt = t - now;
        let noise = if sigma > 0.0 && dt > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            sigma * dt.sqrt() * z
        } else {
            0.0
        };
        let log_u = match bridge.as_deref_mut() {
            Some(b) if sigma > 0.0 && dt > 0.0 => Some(open01(b).ln()),
            _ => None,
        };
        for k in 0..K {
            let start = x[k];
            let end = start + drift[k] * dt + noise;
            let seg_max = match log_u {
                // maximum of a Brownian bridge from `start` to `end` over `dt`
                Some(lu) => 0.5 * (start + end + ((end - start).powi(2) - 2.0 * sigma * sigma * dt * lu).sqrt()),
                None => start.max(end),
            };
            x[k] = end;
            m[k] = m[k].max(seg_max);
        }
        while ji < jumps.len() && jumps[ji].0 == t {
            for k in 0..K {
                x[k] += jumps[ji].1[k];
            }
            ji += 1;
        }
        if gi < grid.len() && grid[gi] == t {
            gi += 1;
        }
        for k in 0..K {
            m[k] = m[k].max(x[k]);
        }
        now = t;
        out.times.push(t);
        out.x.push(x);
        out.m.push(m);
    }
    out
}

/// Simulates `paths` independent paths (indices `0..paths`).
pub fn simulate_paths(t: &LevyTriplet, horizon: f64, scheme: &SimScheme, seed: u64, paths: usize) -> Result<Vec<SamplePath>> {
    use rayon::prelude::*;
    let sim = PathSimulator::new(t, horizon, scheme)?;
    Ok((0..paths as u64).into_par_iter().map(|i| sim.simulate(seed, i)).collect())
}

/// Coupled simulation of `X` and its dual `X~` with `X - X~` nondecreasing.
#[derive(Clone, Debug)]
pub struct CoupledSimulator {
    horizon: f64,
    steps: usize,
    bridge: bool,
    sigma: f64,
    drift: f64,
    bands: Vec<BandSampler>,
}

impl CoupledSimulator {
    /// Needs RSS for the interlacing scheme, or SRSS with majorization on
    /// `(0, eps_seed)` for the truncated scheme. Jumps are coupled band by
    /// band through `(Q(U), -Q+(1 - U))`; the Brownian parts coincide.
    pub fn new(t: &LevyTriplet, horizon: f64, scheme: &SimScheme) -> Result<Self> {
        check_common(t, horizon, scheme)?;
        let class = classify(t)?;
        let (drift, bands) = match scheme.mode {
            SimMode::Interlacing => {
                if !class.rss {
                    bail!(
                        Precondition,
                        "coupled interlacing simulation needs a right skew-symmetric process (finite nu, b >= 0, dominating tails): {}",
                        class.reasons.join("; ")
                    );
                }
                (class.b.unwrap_or(0.0), vec![BandSampler::new(&t.nu, 0.0, f64::INFINITY)?])
            }
            SimMode::Truncated { level, eps_seed } => {
                if !class.srss {
                    bail!(Precondition, "coupled truncated simulation needs a strongly right skew-symmetric process: {}", class.reasons.join("; "));
                }
                if !class.majorization.holds_on(eps_seed) {
                    bail!(
                        Precondition,
                        "nu does not majorize its mirror on (0, {eps_seed}) ({:?}); lower eps_seed",
                        class.majorization
                    );
                }
                let (drift, eps) = truncated_setup(t, level, eps_seed)?;
                let mut bands = vec![BandSampler::new(&t.nu, eps[0], f64::INFINITY)?];
                for w in eps.windows(2) {
                    bands.push(BandSampler::new(&t.nu, w[1], w[0])?);
                }
                (drift, bands)
            }
            SimMode::StableExact => bail!(Argument, "exact stable sampling has no coupled version; use the truncated scheme"),
        };
        check_rate(bands.iter().map(BandSampler::total).sum(), horizon)?;
        Ok(CoupledSimulator {
            horizon,
            steps: scheme.steps,
            bridge: scheme.bridge_max_refinement,
            sigma: t.sigma2.sqrt(),
            drift,
            bands,
        })
    }

    pub fn simulate(&self, seed: u64, index: u64) -> Result<CoupledPathPair> {
        let mut rng = substream(seed, Stream::Paths, index);
        let mut bridge = self.bridge.then(|| substream(seed, Stream::Bridge, index));
        let jumps = draw_jumps(&self.bands, self.horizon, &mut rng, |s, r| {
            let u = open01(r);
            [s.quantile(u), -s.upper_quantile(1.0 - u)]
        });
        let w = walk(self.horizon, self.steps, [self.drift, -self.drift], self.sigma, &jumps, &mut rng, bridge.as_mut());
        let x: Vec<f64> = w.x.iter().map(|v| v[0]).collect();
        let x_dual: Vec<f64> = w.x.iter().map(|v| v[1]).collect();
        let m: Vec<f64> = w.m.iter().map(|v| v[0]).collect();
        let m_dual: Vec<f64> = w.m.iter().map(|v| v[1]).collect();
        let z = m.iter().zip(&x).map(|(a, b)| a - b).collect();
        let z_dual = m_dual.iter().zip(&x_dual).map(|(a, b)| a - b).collect();
        let pair = CoupledPathPair { times: w.times, x, x_dual, m, m_dual, z, z_dual };
        let scale = pair.x.iter().chain(&pair.x_dual).fold(1.0f64, |a, v| a.max(v.abs()));
        pair.check_invariants(1e-9 * scale)?;
        Ok(pair)
    }
}

/// `count` coupled pairs `(X, X~)` (indices `0..count`); see [`CoupledSimulator`].
pub fn simulate_coupled_dual(t: &LevyTriplet, horizon: f64, scheme: &SimScheme, count: usize, seed: u64) -> Result<Vec<CoupledPathPair>> {
    use rayon::prelude::*;
    let sim = CoupledSimulator::new(t, horizon, scheme)?;
    (0..count as u64).into_par_iter().map(|i| sim.simulate(seed, i)).collect()
}
