//! Fourier-multiplier operators.
//!
//! Every linear operator used by the flow is diagonal in frequency:
//!
//! | kind                      | gain at ξ                    |
//! |---------------------------|------------------------------|
//! | `FractionalLaplacian{s}`  | \|ξ\|^s (0 at ξ = 0)         |
//! | `Hilbert`                 | −i·sgn(ξ) (0 at ξ = 0)       |
//! | `Heat{eps, t}`            | e^{−ε ξ² t}                  |
//! | `LpLow{cutoff}`           | 1 if \|ξ\| < N else 0        |
//! | `LpHigh{cutoff}`          | 1 if \|ξ\| ≥ N else 0        |
//! | `Derivative`              | iξ (0 at the Nyquist bin)    |
//!
//! Sign conventions: the Hilbert gain is −i·sgn(ξ), fixed so that the
//! composition H∘∂ₓ equals (−Δ)^{1/2} mode by mode. Odd multipliers
//! (Hilbert, derivative) zero the unpaired Nyquist bin so that real input
//! maps to real output; fractional powers treat the Nyquist bin like any
//! other mode via |ξ|^s.

use rustfft::num_complex::Complex64;

use crate::error::{HwmError, Result};
use crate::field::VectorField3;
use crate::grid::SpectralGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplierSpec {
    /// Gain |ξ|^s, i.e. the operator (−Δ)^{s/2}. `s` is the gain exponent:
    /// the half-Laplacian is `s = 1`, the quarter-Laplacian `s = 1/2`, the
    /// full (negative) Laplacian `s = 2`.
    FractionalLaplacian { s: f64 },
    Hilbert,
    Heat { eps: f64, t: f64 },
    LpLow { cutoff: f64 },
    LpHigh { cutoff: f64 },
    Derivative,
}

impl MultiplierSpec {
    /// The half-Laplacian (−Δ)^{1/2}, gain |ξ|.
    pub fn half_laplacian() -> Self {
        MultiplierSpec::FractionalLaplacian { s: 1.0 }
    }

    /// The quarter-Laplacian (−Δ)^{1/4}, gain |ξ|^{1/2}.
    pub fn quarter_laplacian() -> Self {
        MultiplierSpec::FractionalLaplacian { s: 0.5 }
    }

    /// Validate the spec against a grid. LP cutoffs must not exceed the
    /// Nyquist wavenumber πM/L; fractional exponents must lie in [0, 2].
    pub fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        match *self {
            MultiplierSpec::FractionalLaplacian { s } => {
                if !(0.0..=2.0).contains(&s) || !s.is_finite() {
                    return Err(HwmError::domain(format!(
                        "fractional_laplacian exponent s must lie in [0, 2], got {s}"
                    )));
                }
            }
            MultiplierSpec::Heat { eps, t } => {
                if !(eps.is_finite() && eps > 0.0) {
                    return Err(HwmError::domain(format!(
                        "heat viscosity must be positive, got {eps}"
                    )));
                }
                if !(t.is_finite() && t >= 0.0) {
                    return Err(HwmError::domain(format!(
                        "heat time must be nonnegative, got {t}"
                    )));
                }
            }
            MultiplierSpec::LpLow { cutoff } | MultiplierSpec::LpHigh { cutoff } => {
                if !(cutoff.is_finite() && cutoff > 0.0) {
                    return Err(HwmError::domain(format!(
                        "LP cutoff must be positive, got {cutoff}"
                    )));
                }
                let nyquist = grid.max_wavenumber();
                if cutoff > nyquist {
                    return Err(HwmError::domain(format!(
                        "LP cutoff N = {cutoff} exceeds the Nyquist wavenumber πM/L = {nyquist}"
                    )));
                }
            }
            MultiplierSpec::Hilbert | MultiplierSpec::Derivative => {}
        }
        Ok(())
    }

    /// Complex gain for one bin.
    fn gain(&self, xi: f64, is_nyquist: bool) -> Complex64 {
        match *self {
            MultiplierSpec::FractionalLaplacian { s } => {
                if xi == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(xi.abs().powf(s), 0.0)
                }
            }
            MultiplierSpec::Hilbert => {
                if xi == 0.0 || is_nyquist {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -xi.signum())
                }
            }
            MultiplierSpec::Heat { eps, t } => Complex64::new((-eps * xi * xi * t).exp(), 0.0),
            MultiplierSpec::LpLow { cutoff } => {
                if xi.abs() < cutoff {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            MultiplierSpec::LpHigh { cutoff } => {
                if xi.abs() < cutoff {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            }
            MultiplierSpec::Derivative => {
                if is_nyquist {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, xi)
                }
            }
        }
    }

    /// Full gain table in FFT bin order.
    pub fn gains(&self, grid: &SpectralGrid) -> Result<Vec<Complex64>> {
        self.validate(grid)?;
        let nyq = grid.nyquist_bin();
        Ok(grid
            .wavenumbers()
            .iter()
            .enumerate()
            .map(|(j, &xi)| self.gain(xi, j == nyq))
            .collect())
    }
}

/// Apply a multiplier to one scalar component.
pub fn apply_scalar(grid: &SpectralGrid, spec: MultiplierSpec, samples: &[f64]) -> Result<Vec<f64>> {
    let gains = spec.gains(grid)?;
    let mut coeffs = grid.forward(samples);
    for (c, g) in coeffs.iter_mut().zip(gains.iter()) {
        *c *= g;
    }
    grid.inverse(&coeffs)
}

/// Apply a multiplier componentwise to a vector field.
pub fn apply_multiplier(
    grid: &SpectralGrid,
    spec: MultiplierSpec,
    f: &VectorField3,
) -> Result<VectorField3> {
    if f.grid().as_ref() != grid {
        return Err(HwmError::GridMismatch);
    }
    let gains = spec.gains(grid)?;
    f.map_spectral(|coeffs| {
        for (c, g) in coeffs.iter_mut().zip(gains.iter()) {
            *c *= g;
        }
    })
}

/// Relative L² residual of the identity H∂ₓ = (−Δ)^{1/2} on `f`.
///
/// The identity fixes the Hilbert sign convention. It holds mode by mode
/// away from the Nyquist bin, so the contract (≤ `tol::COMPOSE_RESIDUAL`)
/// applies to band-limited fields.
pub fn compose_check(grid: &SpectralGrid, f: &VectorField3) -> Result<f64> {
    let df = apply_multiplier(grid, MultiplierSpec::Derivative, f)?;
    let hdf = apply_multiplier(grid, MultiplierSpec::Hilbert, &df)?;
    let lam = apply_multiplier(grid, MultiplierSpec::half_laplacian(), f)?;
    let diff = hdf.sub(&lam)?;
    Ok(diff.l2_norm() / f.l2_norm().max(1e-30))
}
