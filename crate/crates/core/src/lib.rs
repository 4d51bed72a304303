//! Pseudospectral laboratory for the half-wave maps flow on a periodic box.
//!
//! The target equation is the S²-valued geometric flow
//!
//! ```text
//!     ∂ₜu = u × (−Δ)^{1/2} u
//! ```
//!
//! which this crate never integrates directly. Instead it integrates the
//! parabolic regularization ∂ₜu − εΔu = u × (−Δ)^{1/2}u for ε > 0 with
//! exponential (exact heat kernel) time stepping, and treats the ε = 0
//! equation purely as a weak-form limit: every structural property of the
//! regularized flow — the maximum principle for |u|², monotone decay of the
//! critical energy, Picard contraction of the Duhamel map, frequency-tail
//! bounds, commutator cancellation — is exposed as a measurable diagnostic,
//! and a viscosity sweep drives ε → 0 while watching the weak residual of
//! the half-wave equation vanish.
//!
//! Module map:
//! - [`grid`]: periodic collocation grid, FFT plans, wavenumber table
//! - [`multiplier`]: Fourier-multiplier operators ((−Δ)^s, Hilbert, heat,
//!   Littlewood–Paley projections, derivative)
//! - [`field`]: 3-component vector fields, norms, sphere geometry,
//!   trajectories
//! - [`initial`]: admissible initial maps (sphere-valued bumps, constant
//!   far field)
//! - [`solver`]: exponential integrators and the Picard/Duhamel local solver
//! - [`diagnostics`]: energies, identity residuals, maximum-principle and
//!   far-field reports, tail and commutator measurements
//! - [`weak`]: space-time test functions and weak-formulation residuals
//! - [`sweep`]: the vanishing-viscosity ladder and its verdict
//! - [`config`], [`snapshot`], [`manifest`]: run configuration, binary field
//!   snapshots, and the run manifest with artifact checksums
//! - [`tol`]: every tolerance used by the verification suite, in one place

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod initial;
pub mod manifest;
pub mod multiplier;
pub mod selftest;
pub mod snapshot;
pub mod solver;
pub mod sweep;
pub mod tol;
pub mod weak;

pub use error::{HwmError, Result};
pub use field::{Trajectory, VectorField3};
pub use grid::SpectralGrid;
pub use multiplier::MultiplierSpec;
