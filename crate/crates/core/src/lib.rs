//! Optimal prediction of the ultimate maximum of a random walk or Lévy
//! process: when does stopping immediately or never stopping solve
//! `sup_tau E f(M_T - X_tau)`?

pub mod duality;
pub mod error;
pub mod lattice;
pub mod levy;
pub mod montecarlo;
pub mod reward;
pub mod rng;
pub mod weight;

pub use error::{Error, Result};

// The guide's code listings run as doctests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    pub mod chapter1 {}
    #[doc = include_str!("../../../book/src/duality.md")]
    pub mod chapter2 {}
    #[doc = include_str!("../../../book/src/levy.md")]
    pub mod chapter3 {}
    #[doc = include_str!("../../../book/src/montecarlo.md")]
    pub mod chapter4 {}
}
