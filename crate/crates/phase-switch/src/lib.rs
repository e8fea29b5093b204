//! Simulation and analysis of the nonlinear π phase switch realized by a
//! single two-level atom in a one-sided, dissipation-free cavity.
//!
//! The library covers three layers:
//!
//! - [`core`]: domain types and closed-form physics — the stationary
//!   atom-field solution, the reflected-field response ratio, the
//!   coherent/incoherent power decomposition, and the loss-extended
//!   (β-parameterized) linear response.
//! - [`dynamics`]: fixed-step 4th-order integration of the driven Bloch
//!   equations under arbitrary drive envelopes, with per-sample output
//!   amplitude, noise power, and energy-conservation auditing.
//! - [`sweep`]: parameter-grid evaluation of the response and noise curves
//!   over the scaled input intensity, plus β-scans of the linear response.
//!
//! All rates are expressed in caller-chosen units; the physics depends only
//! on the ratios `|b_in|²/Γ` and `γ/Γ`.

pub mod core;
pub mod dynamics;
pub mod error;
pub mod sweep;

pub use error::{Error, Result};
pub use num_complex::Complex64;
