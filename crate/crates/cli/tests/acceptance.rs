//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if
//! any fails. Monte Carlo criteria run the shipped configs in `configs/`
//! through the same code path as the `bangbang` binary.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bangbang::duality::{time_reversal_check_exact, CoupledPathPair};
use bangbang::lattice::{
    brute_force_value, classify_skew, markov_rule_value, rule_value, snell_solve, verify_bang_bang, DesignatedRule,
    LatticeSpec, MassValue, PredictionProblem, SkewClass,
};
use bangbang::levy::{
    characteristic_function, classify, simulate_coupled_dual, truncation_schedule, LevyTriplet, PathSimulator, SimScheme,
};
use bangbang::montecarlo::{Check, StoppingRuleSpec};
use bangbang::reward::RewardSpec;
use bangbang::weight::Exact;
use bangbang_cli::{run, LoadedConfig, Outcome, Overrides, Task, TaskResult};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const CONFIGS: &[(&str, &str)] = &[
    ("example_one", include_str!("../../../configs/example_one.json")),
    ("bernoulli_verify", include_str!("../../../configs/bernoulli_verify.json")),
    ("rss_battery", include_str!("../../../configs/rss_battery.json")),
    ("lss_battery", include_str!("../../../configs/lss_battery.json")),
    ("cauchy_battery", include_str!("../../../configs/cauchy_battery.json")),
    ("srss_battery", include_str!("../../../configs/srss_battery.json")),
    ("srss_classify", include_str!("../../../configs/srss_classify.json")),
    ("brownian_reversal", include_str!("../../../configs/brownian_reversal.json")),
    ("poisson_reversal", include_str!("../../../configs/poisson_reversal.json")),
];

fn config(name: &str) -> LoadedConfig {
    let (_, text) = CONFIGS.iter().find(|(n, _)| *n == name).expect("unknown config");
    LoadedConfig::from_str(text, &format!("configs/{name}.json")).expect("shipped config parses")
}

/// Every (config, task) run by the battery, kept for the rerun check.
#[derive(Default)]
struct Runs {
    done: Vec<(&'static str, Task, Outcome)>,
}

impl Runs {
    fn run(&mut self, name: &'static str, task: Task) -> Result<&Outcome, String> {
        let out = run(&config(name), task, &Overrides::default()).map_err(|e| format!("{name} {task}: {e}"))?;
        self.done.push((name, task, out));
        Ok(&self.done.last().unwrap().2)
    }
}

// ---------------------------------------------------------------------------
// random lattice laws

fn random_spec(rng: &mut ChaCha8Rng, max_support: usize, max_step: i64) -> LatticeSpec {
    let k = rng.random_range(2..=max_support);
    let mut steps: Vec<i64> = Vec::new();
    while steps.len() < k {
        let s = rng.random_range(-max_step..=max_step);
        if !steps.contains(&s) {
            steps.push(s);
        }
    }
    let w: Vec<i64> = (0..k).map(|_| rng.random_range(1..=9)).collect();
    let total: i64 = w.iter().sum();
    LatticeSpec { h: 1.0, atoms: steps.into_iter().zip(w).map(|(s, w)| (s, MassValue::Text(format!("{w}/{total}")))).collect() }
}

fn mirror(spec: &LatticeSpec) -> LatticeSpec {
    LatticeSpec { h: spec.h, atoms: spec.atoms.iter().map(|(k, m)| (-k, m.clone())).collect() }
}

fn symmetric_spec(rng: &mut ChaCha8Rng) -> LatticeSpec {
    let k = rng.random_range(1..=2);
    let mut steps: Vec<i64> = Vec::new();
    while steps.len() < k {
        let s = rng.random_range(1..=3);
        if !steps.contains(&s) {
            steps.push(s);
        }
    }
    let w: Vec<i64> = (0..k).map(|_| rng.random_range(1..=5)).collect();
    let zero = rng.random_range(0..=3);
    let total = 2 * w.iter().sum::<i64>() + zero;
    let mut atoms = Vec::new();
    for (s, w) in steps.iter().zip(&w) {
        atoms.push((*s, MassValue::Text(format!("{w}/{total}"))));
        atoms.push((-s, MassValue::Text(format!("{w}/{total}"))));
    }
    if zero > 0 {
        atoms.push((0, MassValue::Text(format!("{zero}/{total}"))));
    }
    LatticeSpec { h: 1.0, atoms }
}

fn right_skew_spec(rng: &mut ChaCha8Rng) -> LatticeSpec {
    loop {
        let s = random_spec(rng, 4, 3);
        if classify_skew(&s.build::<Exact>().unwrap()) == SkewClass::RightSkew {
            return s;
        }
    }
}

fn rewards() -> [RewardSpec; 3] {
    [RewardSpec::Indicator0, RewardSpec::exponential(1.0), RewardSpec::linear(-1.0)]
}

// ---------------------------------------------------------------------------
// criteria

/// Snell backward induction against brute force over every history-dependent rule.
fn solver_matches_brute_force() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0f64;
    for i in 0..50 {
        let dist = random_spec(&mut rng, 3, 3).build::<f64>().unwrap();
        let n = rng.random_range(1..=8);
        let f = rewards()[i % 3].clone();
        let p = PredictionProblem::new(dist, n, f).unwrap();
        let snell = snell_solve(&p).map_err(|e| e.to_string())?.value;
        let brute = brute_force_value(&p).map_err(|e| e.to_string())?;
        worst = worst.max((snell - brute).abs());
        ensure!((snell - brute).abs() <= 1e-12, "problem {i}: snell {snell} vs brute force {brute}");
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(30), "took {took:?}");
    Ok(format!("50 problems, worst gap {worst:.1e}, {:.1}s", took.as_secs_f64()))
}

/// The trivial rule designated by the skew class is optimal on the lattice.
fn designated_rules_are_optimal(runs: &mut Runs) -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0f64;
    let mut count = BTreeMap::new();
    let mut check = |spec: &LatticeSpec, n: usize, f: &RewardSpec, want: DesignatedRule| -> Result<(), String> {
        let p = PredictionProblem::new(spec.build::<f64>().unwrap(), n, f.clone()).unwrap();
        let r = verify_bang_bang(&p).map_err(|e| e.to_string())?;
        ensure!(r.designated == want, "{:?}: designated {:?}, want {want:?}", spec.atoms, r.designated);
        let attained = match want {
            DesignatedRule::RunToHorizon => r.value_run_to_end,
            DesignatedRule::StopImmediately => r.value_stop_now,
            DesignatedRule::AtMaximumOrHorizon => r.value_run_to_end,
        };
        let gap = (attained - r.snell_value).abs().max(r.max_gap);
        worst = worst.max(gap);
        ensure!(r.pass && gap <= 1e-9, "{:?} N={n} {f:?}: gap {gap:e}", spec.atoms);
        if want == DesignatedRule::AtMaximumOrHorizon {
            ensure!(!r.at_maximum_values.is_empty(), "no stop-at-maximum rules were scored");
            ensure!((r.value_stop_now - r.snell_value).abs() <= 1e-9, "symmetric: G(N,0) != optimum");
            // and exactly, where the reward is rational
            if !matches!(f, RewardSpec::Exponential { .. }) {
                let q = PredictionProblem::new(spec.build::<Exact>().unwrap(), n, f.clone()).unwrap();
                let exact = snell_solve(&q).map_err(|e| e.to_string())?.value;
                // "stop at the first running maximum from t0 on" is Markov in (n, drawdown)
                for t0 in [0, 1, n / 2, n] {
                    let v = markov_rule_value(&q, |k, z| k == n || (k >= t0 && z == 0)).map_err(|e| e.to_string())?;
                    ensure!(v == exact, "{:?} N={n}: stop at a maximum after {t0} gives {v}, optimum {exact}", spec.atoms);
                }
            }
        }
        *count.entry(format!("{want:?}")).or_insert(0) += 1;
        Ok(())
    };
    for i in 0..20 {
        let spec = right_skew_spec(&mut rng);
        let n = rng.random_range(1..=12);
        let f = &rewards()[i % 3];
        check(&spec, n, f, DesignatedRule::RunToHorizon)?;
        let left = mirror(&right_skew_spec(&mut rng));
        ensure!(classify_skew(&left.build::<Exact>().unwrap()) == SkewClass::LeftSkew, "mirror is not left-skewed");
        check(&left, n, f, DesignatedRule::StopImmediately)?;
    }
    for i in 0..10 {
        let spec = symmetric_spec(&mut rng);
        let n = rng.random_range(1..=12);
        check(&spec, n, &rewards()[i % 3], DesignatedRule::AtMaximumOrHorizon)?;
    }
    let out = runs.run("bernoulli_verify", Task::Verify)?;
    let TaskResult::Verify(r) = &out.report.result else { return Err("not a verify result".into()) };
    ensure!(r.designated == DesignatedRule::RunToHorizon && r.pass && out.report.pass, "bernoulli config: {:?}", out.report.failures);
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!("{count:?}, worst gap {worst:.1e}, {:.1}s", took.as_secs_f64()))
}

/// `D(k, z) >= E f(z v Z_k)` and `D(k, z) >= G(k, z)` on right-skewed laws.
fn value_inequalities_hold() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let z: Vec<i64> = (0..=12).collect();
    let mut min_slack = f64::INFINITY;
    for i in 0..20 {
        let spec = right_skew_spec(&mut rng);
        let f = &rewards()[i % 3];
        let r = bangbang::lattice::lemma_suite(&spec.build::<f64>().unwrap(), f, 12, &z).map_err(|e| e.to_string())?;
        ensure!(r.rows.len() == 13 * 13, "expected 169 rows, got {}", r.rows.len());
        ensure!(r.violations == 0 && r.equality_at_zero && r.pass, "{:?} {f:?}: {} violations", spec.atoms, r.violations);
        min_slack = min_slack.min(r.min_slack_drawdown.min(r.min_slack_gain));
    }
    Ok(format!("20 laws x 169 (k, z) cells, min slack {min_slack:.2e}"))
}

/// The counterexample: neither trivial rule is optimal and they differ.
fn counterexample_values(runs: &mut Runs) -> Verdict {
    let out = runs.run("example_one", Task::Solve)?;
    let TaskResult::Solve(s) = &out.report.result else { return Err("not a solve result".into()) };
    ensure!(s.value_exact.as_deref() == Some("4/9"), "optimal value {:?}", s.value_exact);
    let spec = LatticeSpec { h: 1.0, atoms: vec![(3, MassValue::Text("1/3".into())), (-1, MassValue::Text("2/3".into()))] };
    let dist = spec.build::<Exact>().unwrap();
    ensure!(classify_skew(&dist) == SkewClass::Neither, "class {:?}", classify_skew(&dist));
    let p = PredictionProblem::new(dist, 2, RewardSpec::Indicator0).unwrap();
    let now = rule_value(&p, &StoppingRuleSpec::Constant { t: 0.0 }).unwrap();
    let end = rule_value(&p, &StoppingRuleSpec::Constant { t: 2.0 }).unwrap();
    // independent oracle: enumerate the four two-step paths by hand
    let (mut hand_now, mut hand_end) = (Exact::from_integer(0.into()), Exact::from_integer(0.into()));
    for (a, pa) in [(3i64, (1, 3)), (-1, (2, 3))] {
        for (b, pb) in [(3i64, (1, 3)), (-1, (2, 3))] {
            let prob = Exact::new((pa.0 * pb.0).into(), (pa.1 * pb.1).into());
            let m = 0.max(a).max(a + b);
            if m == 0 {
                hand_now += prob.clone();
            }
            if m == a + b {
                hand_end += prob;
            }
        }
    }
    ensure!(now == hand_now && now == Exact::new(4.into(), 9.into()), "tau=0 gives {now}, hand count {hand_now}");
    ensure!(end == hand_end && end == Exact::new(1.into(), 3.into()), "tau=N gives {end}, hand count {hand_end}");
    Ok(format!("tau=0: {now}, tau=N: {end}, class neither"))
}

/// `(M_n - X_n, X_n)` and `(M~_n, -X~_n)` have the same law.
fn time_reversal(runs: &mut Runs) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut laws = 0;
    for _ in 0..25 {
        let dist = random_spec(&mut rng, 4, 3).build::<Exact>().unwrap();
        for n in 1..=10 {
            let t = time_reversal_check_exact(&dist, n).map_err(|e| e.to_string())?;
            ensure!(t.equal && t.max_abs_diff == 0.0, "{:?} n={n}: tables differ by {}", dist.atoms(), t.max_abs_diff);
        }
        laws += 1;
    }
    let mut mc = Vec::new();
    for name in ["brownian_reversal", "poisson_reversal"] {
        let out = runs.run(name, Task::Reversal)?;
        let TaskResult::ReversalMc(r) = &out.report.result else { return Err(format!("{name}: not a Monte Carlo reversal")) };
        ensure!(r.paths == 100_000, "{name}: {} paths", r.paths);
        ensure!(r.pass && out.report.pass, "{name}: cdf gap {} > {}", r.max_cdf_gap, r.threshold);
        mc.push(format!("{name} gap {:.4} <= {:.4}", r.max_cdf_gap, r.threshold));
    }
    Ok(format!("{laws} laws x n=1..10 exact; {}", mc.join(", ")))
}

fn battery_summary(out: &Outcome, want: &StoppingRuleSpec, check: impl Fn(&StoppingRuleSpec) -> Check) -> Verdict {
    let TaskResult::Battery(b) = &out.report.result else { return Err("not a battery result".into()) };
    ensure!(b.count == 100_000, "{} paths", b.count);
    ensure!(&b.designation.rule == want, "designated {:?}, want {want:?}", b.designation.rule);
    ensure!(b.rows.len() == 12, "{} rules scored", b.rows.len());
    for row in &b.rows {
        ensure!(row.check == check(&row.rule), "{}: check {:?}", row.label, row.check);
        ensure!(row.pass, "{} beats the designated rule: difference {} (se {})", row.label, row.difference.mean, row.difference.se);
    }
    ensure!(b.pass && out.report.pass, "battery failed: {:?}", out.report.failures);
    let worst = b.rows.iter().map(|r| -r.difference.mean / r.difference.se.max(1e-300)).fold(f64::NEG_INFINITY, f64::max);
    Ok(format!("value {:.4}, worst z {worst:.2}", b.designated_value.mean))
}

/// Compound Poisson plus Brownian motion with `b > 0`: never stop early; its mirror: stop now.
fn finite_measure_battery(runs: &mut Runs) -> Verdict {
    let rss = config("rss_battery").config.model.triplet().map_err(|e| e.to_string())?;
    let lss = config("lss_battery").config.model.triplet().map_err(|e| e.to_string())?;
    ensure!(lss == rss.dual(), "the left config is not the mirror of the right one");
    let c = classify(&rss).map_err(|e| e.to_string())?;
    ensure!(c.rss && (c.b.unwrap() - 0.5).abs() < 1e-12, "rss {} b {:?}", c.rss, c.b);
    let right = battery_summary(runs.run("rss_battery", Task::Battery)?, &StoppingRuleSpec::Constant { t: 1.0 }, |_| Check::NotBetter)?;
    let left = battery_summary(runs.run("lss_battery", Task::Battery)?, &StoppingRuleSpec::Constant { t: 0.0 }, |_| Check::NotBetter)?;
    Ok(format!("b = 0.5; right: {right}; left: {left}"))
}

/// Symmetric laws: stopping now, at the horizon or at a running maximum all
/// attain the optimum, so they must tie; nothing may beat them.
fn symmetric_check(rule: &StoppingRuleSpec) -> Check {
    match rule {
        StoppingRuleSpec::Constant { t } if *t == 0.0 || *t == 1.0 => Check::Tied,
        StoppingRuleSpec::StopAtNewMax { .. } => Check::Tied,
        _ => Check::NotBetter,
    }
}

/// Composite Simpson on `[a, b]`.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Stable processes: the symmetric Cauchy ties, the strongly right-skewed one runs to the end.
fn stable_batteries(runs: &mut Runs) -> Verdict {
    let tied = battery_summary(runs.run("cauchy_battery", Task::Battery)?, &StoppingRuleSpec::Constant { t: 1.0 }, symmetric_check)?;
    let strong = battery_summary(runs.run("srss_battery", Task::Battery)?, &StoppingRuleSpec::Constant { t: 1.0 }, |_| Check::NotBetter)?;
    let out = runs.run("srss_classify", Task::Classify)?;
    let TaskResult::ClassifyLevy(c) = &out.report.result else { return Err("not a Lévy classification".into()) };
    ensure!(c.class.srss && c.class.bsj, "srss {} bsj {}", c.class.srss, c.class.bsj);
    let l = c.class.l.ok_or("L missing")?;
    // independent limit: int_{delta<|y|<1} y nu(dy) with nu = 2 y^-1.5 dy (y > 0), |y|^-1.5 dy (y < 0),
    // by quadrature in log scale down to delta = 1e-24
    let delta: f64 = 1e-24;
    let density = |y: f64| (2.0 - 1.0) * y.powf(-1.5);
    let numeric = simpson(|s| s.exp() * s.exp() * density(s.exp()), delta.ln(), 0.0, 20_000);
    ensure!((l - numeric).abs() <= 1e-8, "L = {l}, quadrature {numeric}");
    ensure!((l - 2.0).abs() <= 1e-12, "L = {l}");
    Ok(format!("cauchy tied: {tied}; srss: {strong}; L = {l} (quadrature {numeric:.10})"))
}

/// Truncation levels meet their bound and coupled dual paths stay ordered.
fn truncation_and_coupling() -> Verdict {
    let start = Instant::now();
    let mut epochs = 0usize;
    let mut worst = 0f64;
    for alpha in [0.5, 1.0, 1.5] {
        let t = LevyTriplet::stable(alpha, 1.0, 1.0, 0.0).unwrap();
        let schedule = truncation_schedule(&t, 10, 1.0).map_err(|e| e.to_string())?;
        ensure!(schedule.len() == 11, "{} levels", schedule.len());
        for lvl in &schedule {
            // int_{|y|<eps} y^2 nu(dy) = 2 eps^(2 - alpha) / (2 - alpha) in closed form
            let exact = 2.0 * lvl.eps.powf(2.0 - alpha) / (2.0 - alpha);
            // level 0 is the seed itself; the bound applies from level 1 on
            ensure!(lvl.n == 0 || exact <= lvl.bound * (1.0 + 1e-9), "alpha {alpha} level {}: {exact:e} > {:e}", lvl.n, lvl.bound);
            ensure!((exact - lvl.second_moment).abs() <= 1e-9 * exact.max(1e-300), "alpha {alpha} level {}: reported moment off", lvl.n);
            if lvl.n > 0 {
                ensure!(lvl.eps < schedule[lvl.n - 1].eps, "eps not decreasing at level {}", lvl.n);
            }
            let horizon = (2e3 / lvl.intensity).min(1.0);
            let scheme = SimScheme::truncated(lvl.n, 1.0, 20).with_bridge();
            let pairs = simulate_coupled_dual(&t, horizon, &scheme, 1000, 8 + lvl.n as u64).map_err(|e| format!("alpha {alpha} level {}: {e}", lvl.n))?;
            for pair in &pairs {
                worst = worst.max(violation(pair));
                epochs += pair.times.len();
            }
        }
    }
    ensure!(worst <= 1e-9, "coupled paths violate the ordering by {worst:e} (relative)");
    Ok(format!("3 x 11 levels, {epochs} coupled epochs, worst relative violation {worst:.1e}, {:.1}s", start.elapsed().as_secs_f64()))
}

/// Relative size of the worst breach of `X - X~` nondecreasing, `M~ <= M`, `Z <= Z~`.
fn violation(p: &CoupledPathPair) -> f64 {
    let scale = p.x.iter().chain(&p.x_dual).fold(1.0f64, |a, v| a.max(v.abs()));
    let mut worst = 0f64;
    for i in 0..p.times.len() {
        if i > 0 {
            let inc = (p.x[i] - p.x_dual[i]) - (p.x[i - 1] - p.x_dual[i - 1]);
            worst = worst.max(-inc);
        }
        worst = worst.max(p.m_dual[i] - p.m[i]).max(p.z[i] - p.z_dual[i]);
    }
    worst / scale
}

/// Empirical characteristic function of `X_T` against `exp(T psi(u))`.
fn calibration(runs: &mut Runs) -> Verdict {
    let mut rows = 0;
    let mut worst: f64 = 0.0;
    for name in ["rss_battery", "lss_battery", "cauchy_battery", "srss_battery", "brownian_reversal", "poisson_reversal"] {
        let out = runs.run(name, Task::Simulate)?;
        let TaskResult::Simulate(s) = &out.report.result else { return Err(format!("{name}: not a simulation")) };
        ensure!(s.calibration.len() == 3, "{name}: {} points", s.calibration.len());
        for r in &s.calibration {
            ensure!((r.threshold - 4.0 / (s.paths as f64).sqrt()).abs() < 1e-15, "{name}: threshold {}", r.threshold);
            ensure!(r.pass, "{name} u={}: gap {} > {}", r.u, r.gap, r.threshold);
            worst = worst.max(r.gap / r.threshold);
            rows += 1;
        }
        ensure!(out.report.pass, "{name}: {:?}", out.report.failures);
    }
    // the symmetric laws of the truncation criterion, sampled exactly and truncated
    // (truncation at T = 1 is only affordable for the lighter small-jump activity)
    for (alpha, level) in [(0.5, Some(4)), (1.0, Some(3)), (1.5, None)] {
        let t = LevyTriplet::stable(alpha, 1.0, 1.0, 0.0).unwrap();
        let schemes = std::iter::once(SimScheme::stable_exact(10)).chain(level.map(|l| SimScheme::truncated(l, 1.0, 10)));
        for scheme in schemes {
            let paths = 20_000;
            let sim = PathSimulator::new(&t, 1.0, &scheme).map_err(|e| e.to_string())?;
            let xs: Vec<f64> = (0..paths as u64).into_par_iter().map(|i| sim.simulate(77, i).terminal()).collect();
            for u in [0.5, 1.0, 2.0] {
                let (re, im) = xs.iter().fold((0.0, 0.0), |(a, b), x| (a + (u * x).cos(), b + (u * x).sin()));
                let phi = characteristic_function(&t, u, 1.0).unwrap();
                let gap = ((re / paths as f64 - phi.re).powi(2) + (im / paths as f64 - phi.im).powi(2)).sqrt();
                let threshold = 4.0 / (paths as f64).sqrt();
                ensure!(gap <= threshold, "stable alpha {alpha} {} u={u}: gap {gap} > {threshold}", scheme.label());
                worst = worst.max(gap / threshold);
                rows += 1;
            }
        }
    }
    Ok(format!("{rows} (triplet, scheme, u) points, worst gap {:.0}% of 4/sqrt(n)", 100.0 * worst))
}

/// Same config, same seed: the same bytes, whatever the thread count.
fn reruns_are_identical(runs: &Runs) -> Verdict {
    ensure!(runs.done.len() >= 10, "only {} runs recorded", runs.done.len());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let mut files = 0;
    for (name, task, first) in &runs.done {
        let again = pool.install(|| run(&config(name), *task, &Overrides::default())).map_err(|e| e.to_string())?;
        ensure!(first.artifacts.names() == again.artifacts.names(), "{name} {task}: different files");
        for ((file, a), (_, b)) in first.artifacts.files.iter().zip(&again.artifacts.files) {
            ensure!(a == b, "{name} {task}: {file} differs on rerun");
            files += 1;
        }
    }
    Ok(format!("{} runs, {files} files byte-identical on 3 threads", runs.done.len()))
}

fn main() -> ExitCode {
    let mut runs = Runs::default();
    let mut criteria: Vec<(&str, Box<dyn FnMut(&mut Runs) -> Verdict>)> = vec![
        ("exact solver agrees with brute force", Box::new(|_| solver_matches_brute_force())),
        ("designated trivial rules are optimal on the lattice", Box::new(designated_rules_are_optimal)),
        ("value-function inequalities on right-skewed laws", Box::new(|_| value_inequalities_hold())),
        ("skew-free counterexample: 4/9 vs 1/3", Box::new(counterexample_values)),
        ("time reversal, exact and Monte Carlo", Box::new(time_reversal)),
        ("compound Poisson plus Brownian battery and its mirror", Box::new(finite_measure_battery)),
        ("stable batteries and the small-jump limit", Box::new(stable_batteries)),
        ("truncation bound and coupled dual paths", Box::new(|_| truncation_and_coupling())),
        ("simulator characteristic-function calibration", Box::new(calibration)),
        ("byte-identical reruns", Box::new(|r: &mut Runs| reruns_are_identical(r))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter_mut().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(|| check(&mut runs))).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS  {:>2}. {name} [{secs:.1}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name} [{secs:.1}s]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
