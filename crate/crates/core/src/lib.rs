//! Multiplicity cycles for polynomial data restricted to integrable Pfaffian
//! systems.
//!
//! The crate builds the recursive multiplicity cycle of a system
//! `(f_1..f_{n-k}; ω_1..ω_k)`, evaluates its local multiplicity at rational
//! points through Macaulay dual spaces, computes the closed-form degree
//! bounds, and checks the resulting inequalities against independent oracles
//! (truncated leaf series, Lie derivatives, Milnor numbers).
//!
//! Everything is exact: coefficients, points and generic parameters are
//! rationals drawn from a seeded generator.

pub mod algebra;
pub mod campaign;
pub mod cycle;
mod error;
pub mod forms;
pub mod groebner;
pub mod group;
pub mod linalg;
pub mod local;
pub mod milnor;
pub mod oracle;
pub mod params;

pub use error::{Error, Result};
