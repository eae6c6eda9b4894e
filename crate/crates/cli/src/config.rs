//! Experiment configuration: one JSON file per run.
//!
//! ```json
//! {
//!   "model": {"kind": "lattice", "h": 1.0, "atoms": [[1, 0.6], [-1, 0.4]]},
//!   "reward": {"kind": "indicator0"},
//!   "horizon": 10
//! }
//! ```
//!
//! Schema errors carry the line of the offending key so that a script can
//! point straight at it.

use std::fmt;
use std::path::{Path, PathBuf};

use bangbang::lattice::{LatticeSpec, LatticeStepDistribution, MassValue};
use bangbang::levy::{LevyMeasureSpec, LevyTriplet, SimScheme};
use bangbang::montecarlo::{LicenseMode, Model, StoppingRuleSpec};
use bangbang::reward::RewardSpec;
use bangbang::weight::Exact;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_PATHS: usize = 10_000;
pub const DEFAULT_STEPS: usize = 100;
pub const DEFAULT_DUMP: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classify,
    Solve,
    Verify,
    Suite,
    Simulate,
    Battery,
    Reversal,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Solve => "solve",
            Task::Verify => "verify",
            Task::Suite => "suite",
            Task::Simulate => "simulate",
            Task::Battery => "battery",
            Task::Reversal => "reversal",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    /// Random walk on `h Z`; `exact` switches the lattice solvers to
    /// rational arithmetic.
    Lattice {
        h: f64,
        atoms: Vec<(i64, MassValue)>,
        #[serde(default)]
        exact: bool,
    },
    /// Lévy triplet with a piecewise Lévy measure.
    Levy {
        gamma: f64,
        #[serde(default)]
        sigma2: f64,
        #[serde(default)]
        nu: LevyMeasureSpec,
    },
    /// Pure-jump stable process with density `c_pos / y^(1+alpha)` on the
    /// right and `c_neg / |y|^(1+alpha)` on the left.
    Stable {
        alpha: f64,
        c_pos: f64,
        c_neg: f64,
        #[serde(default)]
        gamma: f64,
    },
}

impl ModelConfig {
    pub fn is_lattice(&self) -> bool {
        matches!(self, ModelConfig::Lattice { .. })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ModelConfig::Lattice { exact: true, .. })
    }

    fn lattice_spec(&self) -> Option<LatticeSpec> {
        match self {
            ModelConfig::Lattice { h, atoms, .. } => Some(LatticeSpec { h: *h, atoms: atoms.clone() }),
            _ => None,
        }
    }

    pub fn lattice(&self) -> Result<LatticeStepDistribution<f64>, CliError> {
        let spec = self.lattice_spec().ok_or_else(|| CliError::usage("this task requires a lattice model"))?;
        if self.is_exact() {
            // masses given as "p/q" must sum to one exactly
            Ok(spec.build::<Exact>()?.to_f64())
        } else {
            Ok(spec.build::<f64>()?)
        }
    }

    pub fn lattice_exact(&self) -> Result<LatticeStepDistribution<Exact>, CliError> {
        let spec = self.lattice_spec().ok_or_else(|| CliError::usage("this task requires a lattice model"))?;
        Ok(spec.build::<Exact>()?)
    }

    pub fn triplet(&self) -> Result<LevyTriplet, CliError> {
        match self {
            ModelConfig::Levy { gamma, sigma2, nu } => Ok(LevyTriplet::new(*gamma, *sigma2, nu.clone())?),
            ModelConfig::Stable { alpha, c_pos, c_neg, gamma } => Ok(LevyTriplet::stable(*alpha, *c_pos, *c_neg, *gamma)?),
            ModelConfig::Lattice { .. } => Err(CliError::usage("this task requires a Lévy model")),
        }
    }
}

/// Level schedule requested alongside a classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    pub n_max: usize,
    #[serde(default = "one")]
    pub eps_seed: f64,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; when present it must agree with the subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward: Option<RewardSpec>,
    /// `N` for lattice models (an integer), `T` for Lévy models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SimScheme>,
    /// Battery adversaries; the default dozen when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<StoppingRuleSpec>>,
    #[serde(default)]
    pub license: LicenseMode,
    /// Drawdown levels for the suite (lattice units); `0..=N` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_levels: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationConfig>,
    /// Simulate coupled `(X, X~)` pairs instead of single paths.
    #[serde(default)]
    pub coupled: bool,
    /// Paths written to the CSV dump and the path plot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_paths: Option<usize>,
    #[serde(default = "yes")]
    pub plots: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Command-line settings that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paths: Option<usize>,
}

/// A parsed config together with its source text, for line-anchored errors.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub origin: String,
    text: String,
}

impl LoadedConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_str(&text, &path.display().to_string())
    }

    pub fn from_str(text: &str, origin: &str) -> Result<Self, CliError> {
        let config = serde_json::from_str(text).map_err(|e| CliError::Schema {
            origin: origin.to_string(),
            line: e.line(),
            message: strip_position(&e.to_string()),
        })?;
        Ok(LoadedConfig { config, origin: origin.to_string(), text: text.to_string() })
    }

    /// A schema error anchored at the first line mentioning `"key"`.
    pub fn error_at(&self, key: &str, message: impl Into<String>) -> CliError {
        let needle = format!("\"{key}\"");
        let line = self.text.lines().position(|l| l.contains(&needle)).map_or(1, |i| i + 1);
        CliError::Schema { origin: self.origin.clone(), line, message: message.into() }
    }

    /// Checks that the config suits `task`, applies overrides and fills in
    /// defaults. The result is what the report echoes for replay.
    pub fn resolve(&self, task: Task, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
        let mut c = self.config.clone();
        if let Some(t) = c.task {
            if t != task {
                return Err(self.error_at("task", format!("config is for task '{t}' but '{task}' was requested")));
            }
        }
        c.task = Some(task);
        c.out = None;
        if overrides.seed.is_some() {
            c.seed = overrides.seed;
        }
        if overrides.paths.is_some() {
            c.paths = overrides.paths;
        }
        let lattice = c.model.is_lattice();
        let stochastic = matches!(task, Task::Simulate | Task::Battery)
            || (matches!(task, Task::Reversal | Task::Suite) && !lattice);

        match task {
            Task::Solve | Task::Verify if !lattice => {
                let what = if task == Task::Solve { "exact solver" } else { "exact verification" };
                return Err(self.error_at("model", format!("{what} requires a lattice model (use 'battery' for Lévy models)")));
            }
            _ => {}
        }
        if c.model.is_exact() && matches!(task, Task::Simulate | Task::Battery) {
            return Err(self.error_at("exact", "rational mode applies to the exact solvers only"));
        }
        let needs_reward = matches!(task, Task::Solve | Task::Verify | Task::Battery) || (task == Task::Suite && lattice);
        if needs_reward && c.reward.is_none() {
            return Err(self.error_at("model", format!("task '{task}' needs a \"reward\"")));
        }
        if let Some(f) = &c.reward {
            f.validate().map_err(|e| self.error_at("reward", e.to_string()))?;
        }
        if task != Task::Classify {
            let Some(h) = c.horizon else {
                return Err(self.error_at("model", format!("task '{task}' needs a \"horizon\"")));
            };
            let ok = if lattice { h >= 1.0 && h.fract() == 0.0 && h <= 1e6 } else { h > 0.0 && h.is_finite() };
            if !ok {
                let want = if lattice { "a positive integer number of steps" } else { "a positive time" };
                return Err(self.error_at("horizon", format!("horizon must be {want}, got {h}")));
            }
        }
        if stochastic {
            if c.seed.is_none() {
                return Err(self.error_at("model", format!("task '{task}' is stochastic: give a \"seed\" (or --seed)")));
            }
            c.paths.get_or_insert(DEFAULT_PATHS);
        }
        if !lattice && task != Task::Classify && c.scheme.is_none() {
            c.scheme = Some(match c.model {
                ModelConfig::Stable { .. } => SimScheme::stable_exact(DEFAULT_STEPS),
                _ => SimScheme::interlacing(DEFAULT_STEPS),
            });
        }
        if lattice && c.scheme.is_some() {
            return Err(self.error_at("scheme", "simulation schemes apply to Lévy models only"));
        }
        if c.coupled && (task != Task::Simulate || lattice) {
            return Err(self.error_at("coupled", "\"coupled\" applies to simulating Lévy models only"));
        }
        if c.truncation.is_some() && (lattice || task != Task::Classify) {
            return Err(self.error_at("truncation", "\"truncation\" applies to classifying Lévy models only"));
        }
        if c.rules.is_some() && task != Task::Battery {
            return Err(self.error_at("rules", "\"rules\" applies to the battery task only"));
        }
        if let Some(rules) = &c.rules {
            for r in rules {
                r.validate().map_err(|e| self.error_at("rules", e.to_string()))?;
            }
        }
        if c.z_levels.is_some() && !(lattice && task == Task::Suite) {
            return Err(self.error_at("z_levels", "\"z_levels\" applies to the lattice suite only"));
        }
        if task == Task::Simulate {
            c.dump_paths.get_or_insert(DEFAULT_DUMP);
        }
        Ok(c)
    }
}

impl ExperimentConfig {
    pub fn task(&self) -> Task {
        self.task.expect("resolved config")
    }

    pub fn steps(&self) -> usize {
        self.horizon.unwrap_or(0.0) as usize
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn paths(&self) -> usize {
        self.paths.unwrap_or(DEFAULT_PATHS)
    }

    /// The Monte Carlo view of the model.
    pub fn mc_model(&self) -> Result<Model, CliError> {
        if self.model.is_lattice() {
            Ok(Model::Lattice { dist: self.model.lattice()?, horizon: self.steps() })
        } else {
            Ok(Model::Levy {
                triplet: self.model.triplet()?,
                horizon: self.horizon.unwrap_or(1.0),
                scheme: self.scheme.clone().unwrap_or_else(|| SimScheme::interlacing(DEFAULT_STEPS)),
            })
        }
    }
}

/// `serde_json` appends " at line L column C"; the line goes in front instead.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}
