//! Monte Carlo evaluation of stopping rules and bang-bang batteries.

pub mod battery;
pub mod estimate;
pub mod rules;

pub use battery::{bangbang_battery, designate, BatteryReport, BatteryRow, Check, LicenseMode, Provenance, SkewDirection};
pub use estimate::{estimate_value, paired_compare, EstimateReport, Model, PairedReport, PreparedModel};
pub use rules::StoppingRuleSpec;
