//! Admissible initial maps: smooth, sphere-valued, equal to a fixed unit
//! vector Q outside a compact support interval.
//!
//! The bump profile is polynomial, b(s) = (1 − s²)^p on |s| < 1 and zero
//! outside, with p ≥ 8 continuous grid-level derivatives. It avoids the
//! denormal underflow of the classical exp(−1/(1−s²)) bump near the support
//! edge while keeping the data exactly constant outside the support.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{HwmError, Result};
use crate::field::VectorField3;
use crate::grid::SpectralGrid;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFamily {
    /// Planar geodesic excursion: u = cos(θ)Q + sin(θ)e with a fixed e ⊥ Q.
    GeodesicBump,
    /// Same polar profile but the transverse direction rotates across the
    /// support (one half-turn), so the cross-product nonlinearity is not
    /// planar-degenerate.
    TwistBump,
    /// u ≡ Q.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub family: DataFamily,
    /// Far-field value; must be a unit vector.
    pub q: [f64; 3],
    /// Winding amplitude in radians (peak polar angle away from Q).
    pub amplitude: f64,
    /// Support radius R₀; the data equals Q exactly for |x − x₀| ≥ R₀.
    pub support_radius: f64,
    /// Support center x₀.
    pub center: f64,
    /// Bump order p (number of grid-level derivatives), p ≥ 8.
    pub bump_order: u32,
}

impl InitialDataSpec {
    pub fn constant(q: [f64; 3]) -> Self {
        InitialDataSpec {
            family: DataFamily::Constant,
            q,
            amplitude: 0.0,
            support_radius: 1.0,
            center: 0.0,
            bump_order: 8,
        }
    }

    /// The reference bump used throughout the verification suite:
    /// a = π, R₀ = 1, centered, far field (0,0,1).
    pub fn reference_bump() -> Self {
        InitialDataSpec {
            family: DataFamily::GeodesicBump,
            q: [0.0, 0.0, 1.0],
            amplitude: std::f64::consts::PI,
            support_radius: 1.0,
            center: 0.0,
            bump_order: 8,
        }
    }

    pub fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        let qn = (self.q[0] * self.q[0] + self.q[1] * self.q[1] + self.q[2] * self.q[2]).sqrt();
        if (qn - 1.0).abs() > tol::UNIT_Q {
            return Err(HwmError::domain(format!(
                "far-field q must be a unit vector (|q| − 1 = {:+.3e})",
                qn - 1.0
            )));
        }
        if !(self.support_radius.is_finite() && self.support_radius > 0.0) {
            return Err(HwmError::domain("support_radius must be positive"));
        }
        if self.support_radius > grid.box_length() / 8.0 {
            return Err(HwmError::domain(format!(
                "support_radius {} violates the padding rule R0 <= L/8 = {}",
                self.support_radius,
                grid.box_length() / 8.0
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(HwmError::domain("amplitude must be finite"));
        }
        if self.bump_order < 8 {
            return Err(HwmError::domain(format!(
                "bump_order must be at least 8, got {}",
                self.bump_order
            )));
        }
        if !self.center.is_finite() || self.center.abs() > grid.box_length() / 2.0 {
            return Err(HwmError::domain("center must lie inside the box"));
        }
        Ok(())
    }
}

/// b(s) = (1 − s²)^p for |s| < 1, zero outside. b(0) = 1.
pub fn poly_bump(s: f64, p: u32) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - s * s).powi(p as i32)
    }
}

/// First derivative of the bump.
pub fn poly_bump_deriv(s: f64, p: u32) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        -2.0 * p as f64 * s * (1.0 - s * s).powi(p as i32 - 1)
    }
}

/// Second derivative of the bump.
pub fn poly_bump_second_deriv(s: f64, p: u32) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let pf = p as f64;
        let w = 1.0 - s * s;
        -2.0 * pf * w.powi(p as i32 - 1) + 4.0 * pf * (pf - 1.0) * s * s * w.powi(p as i32 - 2)
    }
}

/// A fixed orthonormal frame (e1, e2) transverse to q, chosen
/// deterministically from the coordinate axis least aligned with q.
pub fn transverse_frame(q: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let dots = [q[0].abs(), q[1].abs(), q[2].abs()];
    let mut pick = 0;
    for i in 1..3 {
        if dots[i] < dots[pick] {
            pick = i;
        }
    }
    let a = axes[pick];
    let ad = a[0] * q[0] + a[1] * q[1] + a[2] * q[2];
    let mut e1 = [a[0] - ad * q[0], a[1] - ad * q[1], a[2] - ad * q[2]];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    for v in &mut e1 {
        *v /= n;
    }
    let e2 = [
        q[1] * e1[2] - q[2] * e1[1],
        q[2] * e1[0] - q[0] * e1[2],
        q[0] * e1[1] - q[1] * e1[0],
    ];
    (e1, e2)
}

/// Construct the initial map on the grid. The result is sphere-valued to
/// machine precision and equals Q exactly outside the support interval.
pub fn make_initial(grid: &Arc<SpectralGrid>, spec: &InitialDataSpec) -> Result<VectorField3> {
    spec.validate(grid)?;
    let q = spec.q;
    match spec.family {
        DataFamily::Constant => Ok(VectorField3::constant(grid.clone(), q)),
        DataFamily::GeodesicBump | DataFamily::TwistBump => {
            let (e1, e2) = transverse_frame(q);
            let twisted = spec.family == DataFamily::TwistBump;
            let a = spec.amplitude;
            let r0 = spec.support_radius;
            let x0 = spec.center;
            let p = spec.bump_order;
            Ok(VectorField3::from_fn(grid.clone(), |x| {
                let s = (x - x0) / r0;
                let theta = a * poly_bump(s, p);
                if theta == 0.0 {
                    return q;
                }
                // transverse direction: fixed e1, or rotated by a half-turn
                // across the support for the twisted family
                let (c_g, s_g) = if twisted {
                    let gamma = std::f64::consts::PI * s;
                    (gamma.cos(), gamma.sin())
                } else {
                    (1.0, 0.0)
                };
                let e = [
                    c_g * e1[0] + s_g * e2[0],
                    c_g * e1[1] + s_g * e2[1],
                    c_g * e1[2] + s_g * e2[2],
                ];
                let (st, ct) = theta.sin_cos();
                [
                    ct * q[0] + st * e[0],
                    ct * q[1] + st * e[1],
                    ct * q[2] + st * e[2],
                ]
            }))
        }
    }
}

/// Everything `verify_admissibility` measures about a candidate u₀.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub sphere_deviation: f64,
    /// max |u₀ − Q| over |x − x₀| ≥ R₀ (periodic distance).
    pub far_field_residue: f64,
    pub h1_norm: f64,
    pub h_half_norm: f64,
    /// Fitted decay exponent of the spectral tail |û₀(ξ)| ~ ξ^{−rate};
    /// infinite when the tail is already at the floor (e.g. constants).
    pub spectral_decay_rate: f64,
    pub sphere_ok: bool,
    pub far_field_ok: bool,
    pub decay_ok: bool,
    pub pass: bool,
}

/// Measure the admissibility hypotheses on a slice: sphere-valued, constant
/// far field, finite energies, grid-level smoothness of the spectrum.
pub fn verify_admissibility(u0: &VectorField3, spec: &InitialDataSpec) -> AdmissibilityReport {
    let grid = u0.grid();
    let sphere_deviation = u0.sphere_deviation();

    let l = grid.box_length();
    let mut far = 0.0f64;
    for (j, &x) in grid.positions().iter().enumerate() {
        let mut d = (x - spec.center).abs();
        d = d.min(l - d); // periodic distance
        if d >= spec.support_radius {
            let v = u0.at(j);
            let dv = [v[0] - spec.q[0], v[1] - spec.q[1], v[2] - spec.q[2]];
            far = far.max((dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2]).sqrt());
        }
    }

    let h1 = u0.hs_norm(1.0);
    let h_half = u0.hs_norm(0.5);
    let rate = spectral_decay_rate(u0);

    let sphere_ok = sphere_deviation <= tol::DATA_SPHERE_DEV;
    let far_field_ok = far <= tol::DATA_FAR_FIELD;
    let decay_ok = rate > tol::SPECTRAL_DECAY_MIN;
    AdmissibilityReport {
        sphere_deviation,
        far_field_residue: far,
        h1_norm: h1,
        h_half_norm: h_half,
        spectral_decay_rate: rate,
        sphere_ok,
        far_field_ok,
        decay_ok,
        pass: sphere_ok && far_field_ok && decay_ok,
    }
}

/// Least-squares exponent of |û(ξ)| against ξ on the resolved tail.
///
/// Modes below the noise floor (1e−13 of the peak) are excluded so machine
/// noise cannot flatten the fit; if fewer than 6 usable tail modes remain,
/// the spectrum has already decayed to the floor and the rate is +∞.
pub fn spectral_decay_rate(u: &VectorField3) -> f64 {
    let grid = u.grid();
    let spectra = u.spectra();
    let m = grid.len();
    // amplitude per positive mode index, max over components
    let mut amp = vec![0.0f64; m / 2];
    for s in &spectra {
        for (k, a) in amp.iter_mut().enumerate().take(m / 2).skip(1) {
            *a = a.max(s[k].norm());
        }
    }
    let peak = amp.iter().fold(0.0f64, |acc, &v| acc.max(v));
    if peak == 0.0 {
        return f64::INFINITY;
    }
    let floor = 1e-13 * peak;
    // tail region: above mode 4, below the noise floor cutoff
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (k, &a) in amp.iter().enumerate().skip(4) {
        if a > floor {
            let xi = grid.wavenumber(k);
            pts.push((xi.ln(), a.ln()));
        }
    }
    if pts.len() < 6 {
        return f64::INFINITY;
    }
    -least_squares_slope(&pts)
}

/// Slope of the least-squares line through (x, y) points.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Intercept and slope of the least-squares line through (x, y) points.
pub fn least_squares_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let slope = least_squares_slope(pts);
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    (my - slope * mx, slope)
}
