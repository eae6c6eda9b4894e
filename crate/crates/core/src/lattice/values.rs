//! The value functions `G(k, z) = E f(z v M_k)` and `D(k, z) = E f(z v M_k - X_k)`.
//!
//! `G(N - n, Z_n)` is the payoff of stopping at time `n` with drawdown
//! `Z_n`; `D(k, z)` is the payoff of continuing all the way to the horizon.
//! Arguments `z` are lattice levels.

use crate::error::{bail, Result};
use crate::lattice::law::joint_law_max_end;
use crate::lattice::LatticeStepDistribution;
use crate::reward::RewardSpec;
use crate::weight::Weight;

fn check_z(z: i64) -> Result<()> {
    if z < 0 {
        bail!(Domain, "drawdown level must be >= 0, got {z}");
    }
    Ok(())
}

pub fn value_g<W: Weight>(dist: &LatticeStepDistribution<W>, f: &RewardSpec, k: usize, z: i64) -> Result<W> {
    check_z(z)?;
    joint_law_max_end(dist, k)?.expect_g(f, z, dist.h())
}

pub fn value_d<W: Weight>(dist: &LatticeStepDistribution<W>, f: &RewardSpec, k: usize, z: i64) -> Result<W> {
    check_z(z)?;
    joint_law_max_end(dist, k)?.expect_d(f, z, dist.h())
}
