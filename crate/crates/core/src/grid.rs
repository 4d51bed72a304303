//! Periodic collocation grid and its spectral transforms.
//!
//! The box is `[−L/2, L/2)` sampled at `M` equispaced points. Wavenumbers
//! are `ξ_k = 2πk/L` for `k ∈ {−M/2, …, M/2 − 1}`, stored in FFT bin order
//! (`0, 1, …, M/2−1, −M/2, …, −1`). Transforms are unnormalized internally;
//! the `1/M` normalization is applied once in [`SpectralGrid::forward`], so
//! the externally visible convention is
//!
//! ```text
//!     f̂_k = (1/L) ∫ f e^{−iξ_k x} dx     (discrete: DFT/M)
//!     h Σ_x f(x)²  =  L Σ_k |f̂_k|²       (Plancherel)
//! ```

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{HwmError, Result};

/// Immutable grid geometry plus FFT plans. Cheap to clone (plans are shared);
/// safe to share across threads.
#[derive(Clone)]
pub struct SpectralGrid {
    box_length: f64,
    num_points: usize,
    spacing: f64,
    wavenumbers: Vec<f64>,
    positions: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("box_length", &self.box_length)
            .field("num_points", &self.num_points)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.num_points == other.num_points && self.box_length == other.box_length
    }
}

impl SpectralGrid {
    /// Build a grid with box length `box_length` and `num_points` samples.
    /// `num_points` must be even and at least 8.
    pub fn new(box_length: f64, num_points: usize) -> Result<Arc<Self>> {
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(HwmError::domain(format!(
                "box_length must be positive and finite, got {box_length}"
            )));
        }
        if num_points < 8 || num_points % 2 != 0 {
            return Err(HwmError::domain(format!(
                "num_points must be even and >= 8, got {num_points}"
            )));
        }
        let m = num_points;
        let spacing = box_length / m as f64;
        let base = 2.0 * std::f64::consts::PI / box_length;
        let wavenumbers = (0..m)
            .map(|j| {
                let k = if j < m / 2 {
                    j as i64
                } else {
                    j as i64 - m as i64
                };
                base * k as f64
            })
            .collect();
        let positions = (0..m)
            .map(|j| -0.5 * box_length + spacing * j as f64)
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        Ok(Arc::new(SpectralGrid {
            box_length,
            num_points,
            spacing,
            wavenumbers,
            positions,
            fwd,
            inv,
        }))
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight h = L/M.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Wavenumber of FFT bin `j` (bin order: 0, 1, …, M/2−1, −M/2, …, −1).
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.wavenumbers[j]
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Collocation point of sample `j`: x_j = −L/2 + j·h.
    pub fn position(&self, j: usize) -> f64 {
        self.positions[j]
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Index of the unpaired Nyquist bin k = −M/2.
    pub fn nyquist_bin(&self) -> usize {
        self.num_points / 2
    }

    /// Largest resolved |ξ| = π M / L (attained at the Nyquist bin).
    pub fn max_wavenumber(&self) -> f64 {
        std::f64::consts::PI * self.num_points as f64 / self.box_length
    }

    /// Forward transform of a real sample vector, normalized so that the
    /// output is the coefficient table f̂ of the Plancherel convention above.
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        assert_eq!(samples.len(), self.num_points, "sample length != grid size");
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.num_points as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Inverse transform back to physical samples. The result of a
    /// multiplier application must be real up to roundoff; the imaginary
    /// residue is checked against `tol::IM_RESIDUE` and then discarded.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<f64>> {
        let (re, im_max, re_max) = self.inverse_unchecked(coeffs);
        let tol = crate::tol::IM_RESIDUE * (1.0 + re_max);
        if im_max > tol {
            return Err(HwmError::domain(format!(
                "inverse transform produced imaginary residue {im_max:.3e} (tol {tol:.3e}); \
                 the multiplier broke Hermitian symmetry"
            )));
        }
        Ok(re)
    }

    /// Inverse transform returning (real parts, max |Im|, max |Re|) without
    /// the realness check.
    pub fn inverse_unchecked(&self, coeffs: &[Complex64]) -> (Vec<f64>, f64, f64) {
        assert_eq!(coeffs.len(), self.num_points, "coeff length != grid size");
        let mut buf = coeffs.to_vec();
        self.inv.process(&mut buf);
        let mut im_max = 0.0f64;
        let mut re_max = 0.0f64;
        let re = buf
            .iter()
            .map(|c| {
                im_max = im_max.max(c.im.abs());
                re_max = re_max.max(c.re.abs());
                c.re
            })
            .collect();
        (re, im_max, re_max)
    }

    /// L² norm of one scalar sample vector, h·Σ f² under the trapezoid rule
    /// (endpoints identified on the periodic box).
    pub fn l2_norm_physical(&self, samples: &[f64]) -> f64 {
        (self.spacing * samples.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// L² norm computed on the spectral side, (L·Σ|f̂|²)^{1/2}.
    pub fn l2_norm_spectral(&self, coeffs: &[Complex64]) -> f64 {
        (self.box_length * coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }
}
