//! One function per task. Each returns a typed result and records failed
//! assertions, notes and CSV tables in a [`Ctx`].

use bangbang::duality::{time_reversal_check_exact, time_reversal_check_mc};
use bangbang::lattice::{
    classify_skew, lemma_suite, skew_analysis, snell_solve, value_d, value_g, verify_bang_bang, LatticeStepDistribution,
    PredictionProblem, SkewClass, SnellSolution,
};
use bangbang::levy::{characteristic_function, classify, truncation_schedule, CoupledSimulator};
use bangbang::montecarlo::estimate::DISCRETIZATION_NOTE;
use bangbang::montecarlo::{bangbang_battery, Check};
use bangbang::reward::RewardSpec;
use bangbang::weight::{Exact, Weight};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, LoadedConfig, Overrides, Task};
use crate::error::CliError;
use crate::output::{cell, Artifacts, Table};
use crate::plot::{emit_plots, PlotKind};
use crate::report::*;

/// Frequencies at which simulated laws are checked against the exact
/// characteristic function.
pub const CF_POINTS: [f64; 3] = [0.5, 1.0, 2.0];

/// A finished run: the report and every file to write.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Artifacts,
}

#[derive(Default)]
struct Ctx {
    failures: Vec<String>,
    notes: Vec<String>,
    tables: Vec<Table>,
}

impl Ctx {
    fn check(&mut self, ok: bool, failure: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(failure());
        }
    }
}

/// Runs `task` on a loaded config. Assertion failures are part of the
/// outcome (`report.pass == false`); errors are returned.
pub fn run(loaded: &LoadedConfig, task: Task, overrides: &Overrides) -> Result<Outcome, CliError> {
    let cfg = loaded.resolve(task, overrides)?;
    let mut ctx = Ctx::default();
    let result = match task {
        Task::Classify => run_classify(&cfg, &mut ctx)?,
        Task::Solve if cfg.model.is_exact() => run_solve::<Exact>(&cfg, &mut ctx, |d| d.model.lattice_exact())?,
        Task::Solve => run_solve::<f64>(&cfg, &mut ctx, |d| d.model.lattice())?,
        Task::Verify => run_verify(&cfg, &mut ctx)?,
        Task::Suite => run_suite(&cfg, &mut ctx)?,
        Task::Simulate => run_simulate(&cfg, &mut ctx)?,
        Task::Battery => run_battery(&cfg, &mut ctx)?,
        Task::Reversal => run_reversal(&cfg, &mut ctx)?,
    };
    let report = Report {
        tool: format!("bangbang {}", env!("CARGO_PKG_VERSION")),
        task,
        seed: cfg.seed,
        substreams: SUBSTREAMS.iter().map(|s| s.to_string()).collect(),
        pass: ctx.failures.is_empty(),
        failures: ctx.failures,
        notes: ctx.notes,
        config: cfg,
        result,
    };
    let mut artifacts = Artifacts::default();
    let json = to_json(&report)?;
    artifacts.add("report.json", json.into_bytes());
    for t in &ctx.tables {
        artifacts.add(format!("{}.csv", t.name), t.to_bytes());
    }
    if report.config.plots {
        for kind in PlotKind::for_report(&report) {
            artifacts.add(kind.file_name(), emit_plots(&report, kind)?.into_bytes());
        }
    }
    Ok(Outcome { report, artifacts })
}

/// Pretty JSON that is known to parse back into a [`Report`].
pub fn to_json(report: &Report) -> Result<String, CliError> {
    let mut json = serde_json::to_string_pretty(report)
        .map_err(|e| bangbang::Error::Internal(format!("report does not serialize: {e}")))?;
    json.push('\n');
    validate_report(&json)?;
    Ok(json)
}

/// Parses an emitted report against the output schema.
pub fn validate_report(json: &str) -> Result<Report, CliError> {
    serde_json::from_str(json).map_err(|e| bangbang::Error::Internal(format!("report does not re-validate: {e}")).into())
}

fn reward(cfg: &ExperimentConfig) -> &RewardSpec {
    cfg.reward.as_ref().expect("resolved config has a reward")
}

fn run_classify(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<TaskResult, CliError> {
    let mut t = Table::new("classify", &["property", "value"]);
    if cfg.model.is_lattice() {
        let (analysis, dual_class) = if cfg.model.is_exact() {
            let d = cfg.model.lattice_exact()?;
            (skew_analysis(&d), classify_skew(&d.dual()))
        } else {
            let d = cfg.model.lattice()?;
            (skew_analysis(&d), classify_skew(&d.dual()))
        };
        let mean = cfg.model.lattice()?.mean();
        t.push(vec!["class".into(), format!("{:?}", analysis.class)]);
        t.push(vec!["right_witness".into(), cell(analysis.right_witness)]);
        t.push(vec!["left_witness".into(), cell(analysis.left_witness)]);
        t.push(vec!["mean".into(), mean.to_string()]);
        t.push(vec!["dual_class".into(), format!("{dual_class:?}")]);
        ctx.tables.push(t);
        return Ok(TaskResult::ClassifyLattice(LatticeClassification { analysis, mean, dual_class }));
    }
    let triplet = cfg.model.triplet()?;
    let class = classify(&triplet)?;
    let stable = triplet.stable_parameters();
    let stable_l = stable.filter(|(a, _, _)| *a < 1.0).map(|(a, c1, c2)| (c1 - c2) / (1.0 - a));
    let truncation = cfg.truncation.as_ref().map(|tc| truncation_schedule(&triplet, tc.n_max, tc.eps_seed)).transpose()?;
    for (k, v) in [
        ("finite_nu", class.finite_nu.to_string()),
        ("rss", class.rss.to_string()),
        ("lss", class.lss.to_string()),
        ("symmetric", class.symmetric.to_string()),
        ("bsj", class.bsj.to_string()),
        ("l", cell(class.l)),
        ("srss", class.srss.to_string()),
        ("slss", class.slss.to_string()),
        ("weak_rss", class.weak_rss.to_string()),
        ("weak_lss", class.weak_lss.to_string()),
        ("tails_right", class.tails_right.to_string()),
        ("tails_left", class.tails_left.to_string()),
        ("b", cell(class.b)),
    ] {
        t.push(vec![k.into(), v]);
    }
    ctx.tables.push(t);
    if let Some(levels) = &truncation {
        let mut t = Table::new("truncation", &["n", "eps", "second_moment", "bound", "gamma_n", "intensity"]);
        for lv in levels {
            t.push(vec![
                lv.n.to_string(),
                lv.eps.to_string(),
                lv.second_moment.to_string(),
                lv.bound.to_string(),
                cell(lv.gamma_n),
                lv.intensity.to_string(),
            ]);
            ctx.check(lv.n == 0 || lv.second_moment <= lv.bound, || {
                format!("truncation level {}: small-jump second moment {} exceeds 8^-n = {}", lv.n, lv.second_moment, lv.bound)
            });
        }
        ctx.tables.push(t);
    }
    ctx.notes.extend(class.reasons.iter().cloned());
    Ok(TaskResult::ClassifyLevy(LevyClassification { class, stable, stable_l, truncation }))
}

fn solve_rows<W: Weight>(sol: &SnellSolution<W>) -> Vec<SolveRow> {
    sol.table
        .iter()
        .enumerate()
        .flat_map(|(n, row)| {
            row.iter().map(move |c| SolveRow {
                n,
                z: c.z,
                value: c.value.to_f64(),
                stop_value: c.stop_value.to_f64(),
                continuation: c.continuation.as_ref().map(Weight::to_f64),
                stop: c.stop,
            })
        })
        .collect()
}

fn run_solve<W: Weight + std::fmt::Display>(
    cfg: &ExperimentConfig,
    ctx: &mut Ctx,
    dist: impl Fn(&ExperimentConfig) -> Result<LatticeStepDistribution<W>, CliError>,
) -> Result<TaskResult, CliError> {
    let d = dist(cfg)?;
    let n = cfg.steps();
    let f = reward(cfg);
    let p = PredictionProblem::new(d.clone(), n, f.clone())?;
    let sol = snell_solve(&p)?;
    let g = value_g(&d, f, n, 0)?;
    let dv = value_d(&d, f, n, 0)?;
    ctx.check(sol.value.ge_tol(&g) && sol.value.ge_tol(&dv), || {
        format!("optimal value {} is below a trivial rule (G = {}, D = {})", sol.value.to_f64(), g.to_f64(), dv.to_f64())
    });
    let rows = solve_rows(&sol);
    let mut t = Table::new("value_function", &["n", "z", "value", "stop_value", "continuation", "stop"]);
    for r in &rows {
        t.push(vec![r.n.to_string(), r.z.to_string(), r.value.to_string(), r.stop_value.to_string(), cell(r.continuation), r.stop.to_string()]);
    }
    ctx.tables.push(t);
    Ok(TaskResult::Solve(SolveResult {
        horizon: n,
        h: d.h(),
        class: classify_skew(&d),
        value: sol.value.to_f64(),
        value_exact: W::EXACT.then(|| sol.value.to_string()),
        value_stop_now: g.to_f64(),
        value_run_to_end: dv.to_f64(),
        rows,
    }))
}

fn run_verify(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<TaskResult, CliError> {
    let n = cfg.steps();
    let f = reward(cfg).clone();
    let r = if cfg.model.is_exact() {
        verify_bang_bang(&PredictionProblem::new(cfg.model.lattice_exact()?, n, f)?)?
    } else {
        verify_bang_bang(&PredictionProblem::new(cfg.model.lattice()?, n, f)?)?
    };
    ctx.check(r.pass, || format!("designated rule {:?} misses the optimal value by {:e}", r.designated, r.max_gap));
    let mut t = Table::new("verify", &["rule", "value"]);
    t.push(vec!["stop_now".into(), r.value_stop_now.to_string()]);
    t.push(vec!["run_to_end".into(), r.value_run_to_end.to_string()]);
    t.push(vec!["optimal".into(), r.snell_value.to_string()]);
    for (t0, v) in &r.at_maximum_values {
        t.push(vec![format!("stop_at_new_max(after={t0})"), v.to_string()]);
    }
    ctx.tables.push(t);
    Ok(TaskResult::Verify(r))
}

fn reversal_summaries<W: Weight>(d: &LatticeStepDistribution<W>, n: usize, ctx: &mut Ctx) -> Result<Vec<ReversalSummary>, CliError> {
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let r = time_reversal_check_exact(d, k)?;
        ctx.check(r.equal, || format!("time reversal: law of (M - X, X) differs from (M~, -X~) at n = {k} by {:e}", r.max_abs_diff));
        out.push(ReversalSummary { n: k, entries: r.drawdown_end.len(), max_abs_diff: r.max_abs_diff, equal: r.equal });
    }
    Ok(out)
}

fn lattice_suite<W: Weight>(
    d: &LatticeStepDistribution<W>,
    cfg: &ExperimentConfig,
    ctx: &mut Ctx,
) -> Result<SuiteResult, CliError> {
    let n = cfg.steps();
    let f = reward(cfg);
    let z_levels: Vec<i64> = cfg.z_levels.clone().unwrap_or_else(|| (0..=n as i64).collect());
    let (lemma, on_mirror) = match classify_skew(d) {
        SkewClass::RightSkew | SkewClass::Symmetric => (Some(lemma_suite(d, f, n, &z_levels)?), false),
        SkewClass::LeftSkew => {
            ctx.notes.push("steps are left-skewed: the inequalities were checked for the mirrored walk".into());
            (Some(lemma_suite(&d.dual(), f, n, &z_levels)?), true)
        }
        SkewClass::Neither => {
            ctx.notes.push("steps are neither right- nor left-skewed: the value-function inequalities are not asserted".into());
            (None, false)
        }
    };
    if let Some(l) = &lemma {
        ctx.check(l.violations == 0, || {
            format!(
                "D(k, z) >= E f(z v Z_k) and D(k, z) >= G(k, z): {} violations (min slacks {:e}, {:e})",
                l.violations, l.min_slack_drawdown, l.min_slack_gain
            )
        });
        let mut t = Table::new("lemma", &["k", "z", "g", "d", "drawdown_bound", "slack_drawdown", "slack_gain", "holds"]);
        for r in &l.rows {
            t.push(vec![
                r.k.to_string(),
                r.z.to_string(),
                r.g.to_string(),
                r.d.to_string(),
                r.drawdown_bound.to_string(),
                r.slack_drawdown.to_string(),
                r.slack_gain.to_string(),
                r.holds.to_string(),
            ]);
        }
        ctx.tables.push(t);
    }
    let reversal_exact = reversal_summaries(d, n, ctx)?;
    let mut t = Table::new("reversal", &["n", "entries", "max_abs_diff", "equal"]);
    for r in &reversal_exact {
        t.push(vec![r.n.to_string(), r.entries.to_string(), r.max_abs_diff.to_string(), r.equal.to_string()]);
    }
    ctx.tables.push(t);
    Ok(SuiteResult { lemma, lemma_on_mirror: on_mirror, reversal_exact, reversal_mc: None })
}

fn mc_reversal(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<bangbang::duality::McReversalReport, CliError> {
    let t = cfg.model.triplet()?;
    let scheme = cfg.scheme.clone().expect("resolved config has a scheme");
    let r = time_reversal_check_mc(&t, cfg.horizon.unwrap_or(1.0), &scheme, cfg.paths(), cfg.seed())?;
    ctx.check(r.pass, || {
        format!(
            "time reversal: joint CDFs of (M - X, X) and (M~, -X~) differ by {} > {} at {:?}",
            r.max_cdf_gap, r.threshold, r.worst_point
        )
    });
    ctx.notes.push(DISCRETIZATION_NOTE.into());
    let mut table = Table::new("reversal", &["paths", "max_cdf_gap", "threshold", "worst_drawdown", "worst_end", "pass"]);
    table.push(vec![
        r.paths.to_string(),
        r.max_cdf_gap.to_string(),
        r.threshold.to_string(),
        r.worst_point.0.to_string(),
        r.worst_point.1.to_string(),
        r.pass.to_string(),
    ]);
    ctx.tables.push(table);
    Ok(r)
}

fn run_suite(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<TaskResult, CliError> {
    if !cfg.model.is_lattice() {
        let r = mc_reversal(cfg, ctx)?;
        return Ok(TaskResult::Suite(SuiteResult { lemma: None, lemma_on_mirror: false, reversal_exact: vec![], reversal_mc: Some(r) }));
    }
    let s = if cfg.model.is_exact() {
        lattice_suite(&cfg.model.lattice_exact()?, cfg, ctx)?
    } else {
        lattice_suite(&cfg.model.lattice()?, cfg, ctx)?
    };
    Ok(TaskResult::Suite(s))
}

fn run_reversal(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<TaskResult, CliError> {
    if !cfg.model.is_lattice() {
        return Ok(TaskResult::ReversalMc(mc_reversal(cfg, ctx)?));
    }
    let n = cfg.steps();
    let r = if cfg.model.is_exact() {
        time_reversal_check_exact(&cfg.model.lattice_exact()?, n)?
    } else {
        time_reversal_check_exact(&cfg.model.lattice()?, n)?
    };
    ctx.check(r.equal, || format!("time reversal: law of (M - X, X) differs from (M~, -X~) at n = {n} by {:e}", r.max_abs_diff));
    let mut t = Table::new("reversal", &["drawdown", "end", "p_drawdown_end", "p_dual_max_end"]);
    let right: std::collections::BTreeMap<(i64, i64), f64> = r.dual_max_end.iter().copied().collect();
    let mut keys: Vec<(i64, i64)> = r.drawdown_end.iter().map(|(k, _)| *k).chain(right.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    let left: std::collections::BTreeMap<(i64, i64), f64> = r.drawdown_end.iter().copied().collect();
    for k in keys {
        t.push(vec![
            k.0.to_string(),
            k.1.to_string(),
            left.get(&k).copied().unwrap_or(0.0).to_string(),
            right.get(&k).copied().unwrap_or(0.0).to_string(),
        ]);
    }
    ctx.tables.push(t);
    Ok(TaskResult::ReversalExact(r))
}

/// `E exp(i u X_N)` for the lattice walk.
fn lattice_cf(d: &LatticeStepDistribution<f64>, u: f64, n: usize) -> (f64, f64) {
    let (re, im) = d.atoms().iter().fold((0.0, 0.0), |(re, im), (k, p)| {
        let a = u * *k as f64 * d.h();
        (re + p * a.cos(), im + p * a.sin())
    });
    let r = (re * re + im * im).sqrt().powi(n as i32);
    let theta = im.atan2(re) * n as f64;
    (r * theta.cos(), r * theta.sin())
}

fn run_simulate(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<TaskResult, CliError> {
    let model = cfg.mc_model()?;
    let prepared = model.prepare()?;
    let (seed, count) = (cfg.seed(), cfg.paths());
    if count == 0 {
        return Err(bangbang::Error::Argument("simulate needs at least one path".into()).into());
    }
    let horizon = model.horizon();
    // (X_T, M_T, jumps) per path, in index order
    let stats: Vec<(f64, f64, usize)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let p = prepared.path(seed, i);
            (p.terminal(), p.terminal_max(), p.jumps)
        })
        .collect();
    let n = count as f64;
    let terminal_mean = stats.iter().map(|s| s.0).sum::<f64>() / n;
    let terminal_sd = (stats.iter().map(|s| (s.0 - terminal_mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    let max_mean = stats.iter().map(|s| s.1).sum::<f64>() / n;
    let mean_jumps = stats.iter().map(|s| s.2 as f64).sum::<f64>() / n;

    let threshold = 4.0 / n.sqrt();
    let mut calibration = Vec::new();
    let mut cf_table = Table::new("calibration", &["u", "empirical_re", "empirical_im", "exact_re", "exact_im", "gap", "threshold", "pass"]);
    for u in CF_POINTS {
        let re = stats.iter().map(|s| (u * s.0).cos()).sum::<f64>() / n;
        let im = stats.iter().map(|s| (u * s.0).sin()).sum::<f64>() / n;
        let exact = if cfg.model.is_lattice() {
            lattice_cf(&cfg.model.lattice()?, u, cfg.steps())
        } else {
            let phi = characteristic_function(&cfg.model.triplet()?, u, horizon)?;
            (phi.re, phi.im)
        };
        let gap = ((re - exact.0).powi(2) + (im - exact.1).powi(2)).sqrt();
        let row = CfRow { u, empirical: (re, im), exact, gap, threshold, pass: gap <= threshold };
        ctx.check(row.pass, || format!("empirical characteristic function at u = {u} is {gap:e} from exp(T eta(u)), above {threshold:e}"));
        cf_table.push(vec![
            u.to_string(),
            re.to_string(),
            im.to_string(),
            exact.0.to_string(),
            exact.1.to_string(),
            gap.to_string(),
            threshold.to_string(),
            row.pass.to_string(),
        ]);
        calibration.push(row);
    }
    ctx.tables.push(cf_table);

    let dump = cfg.dump_paths.unwrap_or(0).min(count);
    let mut sample_paths = Vec::new();
    let mut paths_table = Table::new("paths", &["path", "series", "t", "x", "m"]);
    let coupled = if cfg.coupled {
        let sim = CoupledSimulator::new(&cfg.model.triplet()?, horizon, cfg.scheme.as_ref().expect("resolved"))?;
        let worst: Vec<(f64, usize)> = (0..count as u64)
            .into_par_iter()
            .map(|i| sim.simulate(seed, i).map(|p| (worst_violation(&p), p.times.len())))
            .collect::<Result<_, _>>()?;
        for i in 0..dump as u64 {
            let p = sim.simulate(seed, i)?;
            for (series, x, m) in [("x", &p.x, &p.m), ("x_dual", &p.x_dual, &p.m_dual)] {
                for k in 0..p.times.len() {
                    paths_table.push(vec![i.to_string(), series.into(), p.times[k].to_string(), x[k].to_string(), m[k].to_string()]);
                }
                sample_paths.push(bangbang::levy::SamplePath { times: p.times.clone(), values: x.clone(), running_max: m.clone(), jumps: 0 });
            }
        }
        let worst_violation = worst.iter().map(|w| w.0).fold(0.0, f64::max);
        let epochs = worst.iter().map(|w| w.1).sum();
        Some(CoupledSummary { pairs: count, epochs, worst_violation, pass: true })
    } else {
        for i in 0..dump as u64 {
            let p = prepared.path(seed, i);
            for k in 0..p.times.len() {
                paths_table.push(vec![i.to_string(), "x".into(), p.times[k].to_string(), p.values[k].to_string(), p.running_max[k].to_string()]);
            }
            sample_paths.push(p);
        }
        None
    };
    ctx.tables.push(paths_table);
    ctx.notes.push(DISCRETIZATION_NOTE.into());
    if matches!(cfg.scheme.as_ref().map(|s| &s.mode), Some(bangbang::levy::SimMode::Truncated { .. })) {
        ctx.notes.push("truncated scheme: calibration compares against the untruncated law".into());
    }
    Ok(TaskResult::Simulate(SimulateResult {
        scheme: model.describe(),
        paths: count,
        horizon,
        terminal_mean,
        terminal_sd,
        max_mean,
        mean_jumps,
        calibration,
        coupled,
        sample_paths,
    }))
}

/// Largest breach of the coupling invariants, relative to the path scale.
/// Pairs breaching by more than rounding are already rejected upstream.
fn worst_violation(p: &bangbang::duality::CoupledPathPair) -> f64 {
    let scale = p.x.iter().chain(&p.x_dual).fold(1.0f64, |a, v| a.max(v.abs()));
    let mut worst = 0.0f64;
    for k in 0..p.times.len() {
        if k > 0 {
            worst = worst.max((p.x[k - 1] - p.x_dual[k - 1]) - (p.x[k] - p.x_dual[k]));
        }
        worst = worst.max(p.m_dual[k] - p.m[k]).max(p.z[k] - p.z_dual[k]);
    }
    worst / scale
}

fn run_battery(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<TaskResult, CliError> {
    let model = cfg.mc_model()?;
    let b = bangbang_battery(&model, reward(cfg), cfg.rules.as_deref(), cfg.license, cfg.paths(), cfg.seed())?;
    let mut table = Table::new(
        "battery",
        &["index", "rule", "check", "value_mean", "value_se", "difference_mean", "difference_se", "ci_lo", "ci_hi", "pass"],
    );
    let mut plot = Table::new("battery_plot", &["index", "rule", "difference", "lo", "hi"]);
    for (i, r) in b.rows.iter().enumerate() {
        ctx.check(r.pass, || match r.check {
            Check::NotBetter => format!(
                "{} beats the designated {} by more than 3 SE: {} (se {})",
                r.label,
                b.designation.rule.label(),
                -r.difference.mean,
                r.difference.se
            ),
            Check::Tied => format!(
                "{} and the designated {} are not tied within 3 SE: {} (se {})",
                r.label,
                b.designation.rule.label(),
                r.difference.mean,
                r.difference.se
            ),
        });
        table.push(vec![
            (i + 1).to_string(),
            r.label.clone(),
            format!("{:?}", r.check),
            r.value.mean.to_string(),
            r.value.se.to_string(),
            r.difference.mean.to_string(),
            r.difference.se.to_string(),
            r.difference.ci95.0.to_string(),
            r.difference.ci95.1.to_string(),
            r.pass.to_string(),
        ]);
        plot.push(vec![
            (i + 1).to_string(),
            r.label.clone(),
            r.difference.mean.to_string(),
            r.difference.ci95.0.to_string(),
            r.difference.ci95.1.to_string(),
        ]);
    }
    ctx.tables.push(table);
    ctx.tables.push(plot);
    ctx.notes.push(format!("licensed by: {}", b.license));
    ctx.notes.extend(b.notes.iter().cloned());
    Ok(TaskResult::Battery(b))
}
