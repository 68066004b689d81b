//! Signature-based comparison of redundancy allocation policies for coherent
//! systems.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`system`] | coherent systems given by minimal path sets, active redundancy |
//! | [`signature`] | exact signatures and the order-statistic mixture |
//! | [`poly`] | structure reliability polynomial `H`, its diagonal `h`, `h⁻¹` |
//! | [`lifetimes`] | lifetime families, convolution, MTTF, stochastic order checks |
//! | [`dependence`] | survival copulas and the structure-dependence function `W` |
//! | [`engine`] | policy evaluation, comparison and optimal allocation |
//! | [`montecarlo`] | seeded simulation used to cross-check the analytic pipeline |
//!
//! File formats, the command line and thread-parallel simulation live in the
//! companion `rapsig` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dependence;
pub mod engine;
pub mod error;
pub mod grid;
pub mod lifetimes;
pub mod montecarlo;
pub mod poly;
pub mod quadrature;
pub mod signature;
pub mod system;

pub use error::{Error, Result};
pub use signature::{Rational, Signature};
pub use system::{ActiveAssignment, CoherentSystem, ComponentIndex, ComponentSet};
