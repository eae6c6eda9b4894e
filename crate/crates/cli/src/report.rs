//! The JSON report written by every run. It deserializes back into the same
//! types, which is how emitted reports are re-validated.

use bangbang::duality::{McReversalReport, ReversalTables};
use bangbang::lattice::{BangBangReport, LemmaReport, SkewAnalysis, SkewClass};
use bangbang::levy::{LevyClass, SamplePath, TruncationLevel};
use bangbang::montecarlo::BatteryReport;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Task};

/// Substreams derived from the root seed, listed in every report.
pub const SUBSTREAMS: [&str; 4] = ["paths", "rules", "bridge", "diagnostics"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool: String,
    pub task: Task,
    pub seed: Option<u64>,
    pub substreams: Vec<String>,
    /// The effective config (overrides applied, defaults filled in).
    pub config: ExperimentConfig,
    pub pass: bool,
    /// One line per failed assertion, naming the invariant.
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub result: TaskResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaskResult {
    ClassifyLattice(LatticeClassification),
    ClassifyLevy(LevyClassification),
    Solve(SolveResult),
    Verify(BangBangReport),
    Suite(SuiteResult),
    Simulate(SimulateResult),
    Battery(BatteryReport),
    ReversalExact(ReversalTables),
    ReversalMc(McReversalReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeClassification {
    pub analysis: SkewAnalysis,
    pub mean: f64,
    /// Class of the mirrored walk.
    pub dual_class: SkewClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyClassification {
    pub class: LevyClass,
    /// `(alpha, c_pos, c_neg)` for a pure stable measure.
    pub stable: Option<(f64, f64, f64)>,
    /// `(c_pos - c_neg) / (1 - alpha)` for stable `alpha < 1`.
    pub stable_l: Option<f64>,
    pub truncation: Option<Vec<TruncationLevel>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveRow {
    pub n: usize,
    /// Drawdown in lattice units.
    pub z: i64,
    pub value: f64,
    pub stop_value: f64,
    pub continuation: Option<f64>,
    pub stop: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub horizon: usize,
    pub h: f64,
    pub class: SkewClass,
    pub value: f64,
    /// `p/q` in rational mode.
    pub value_exact: Option<String>,
    /// `G(N, 0)`, the value of stopping at once.
    pub value_stop_now: f64,
    /// `D(N, 0)`, the value of running to the horizon.
    pub value_run_to_end: f64,
    pub rows: Vec<SolveRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReversalSummary {
    pub n: usize,
    pub entries: usize,
    pub max_abs_diff: f64,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub lemma: Option<LemmaReport>,
    /// The inequalities were checked on the mirrored (right-skewed) walk.
    pub lemma_on_mirror: bool,
    pub reversal_exact: Vec<ReversalSummary>,
    pub reversal_mc: Option<McReversalReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfRow {
    pub u: f64,
    pub empirical: (f64, f64),
    pub exact: (f64, f64),
    pub gap: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledSummary {
    pub pairs: usize,
    pub epochs: usize,
    /// Largest `max(0, -(increment of X - X~), M~ - M, Z - Z~)` seen.
    pub worst_violation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub scheme: String,
    pub paths: usize,
    pub horizon: f64,
    pub terminal_mean: f64,
    pub terminal_sd: f64,
    pub max_mean: f64,
    pub mean_jumps: f64,
    pub calibration: Vec<CfRow>,
    pub coupled: Option<CoupledSummary>,
    pub sample_paths: Vec<SamplePath>,
}
