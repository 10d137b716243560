//! Thermodynamics of a Bose gas with Bogoliubov pairing and a superstabilizing mean-field repulsion.
//!
//! The crate evaluates the Bogoliubov pressure `p₀ᴮ(β, α, x)`, solves the
//! nested `sup_x inf_α` problem for the pressure, locates the first-order
//! transition in the chemical potential, builds the large-deviation rate
//! functions of the condensate and depletion densities, and checks the
//! limiting two-peak laws against finite-volume surrogates.
//!
//! Units: `ħ²/2m = 1`, so the free dispersion is `ε_k = k²`.

// NaN inputs must fail validation, hence `!(v > 0.0)` over `v <= 0.0`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bog_pressure;
pub mod cli;
pub mod config;
pub mod error;
pub mod finite_volume;
pub mod kac_mixture;
pub mod legendre;
pub mod potential;
pub mod quad;
pub mod rates;
pub mod roots;
pub mod special;
pub mod variational;

pub use error::{Error, Result};
