//! Lévy processes: triplets, classification, truncation and simulation.

pub mod classify;
pub mod exponent;
pub mod measure;
pub mod quad;
pub mod sampler;
pub mod simulate;
pub mod truncation;

pub use classify::{classify, LevyClass, Majorization};
pub use exponent::{characteristic_exponent, characteristic_function};
pub use measure::{finite_drift_b, DensityForm, DensityPiece, LevyMeasureSpec, LevyTriplet, Limit};
pub use truncation::{truncation_schedule, TruncationLevel};
pub use sampler::{BandSampler, StableLaw};
pub use simulate::{simulate_coupled_dual, simulate_paths, CoupledSimulator, PathSimulator, SamplePath, SimMode, SimScheme};
