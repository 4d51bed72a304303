//! Space-time weak-formulation residuals.
//!
//! A trajectory u is tested against tensor-product fields
//! φ(t,x) = χ(t)ψ(x) with ψ a compactly supported polynomial bump times a
//! fixed orientation (analytic Δψ) and χ a polynomial bump in time
//! (analytic χ′). Pairing the flow ∂ₜu = εΔu + u × (−Δ)^{1/2}u against φ
//! and integrating by parts gives the identity
//!
//! ```text
//!   −∫∫ u·∂ₜφ − ∫ u₀·φ(0) = ε∫∫ u·Δφ + ∫∫ (−Δ)^{1/4}(φ × u)·(−Δ)^{1/4}u
//! ```
//!
//! whose ε-free version is the weak half-wave equation. The cross-product
//! orientation in the fractional pairing is the one forced by the cyclic
//! triple-product identity (u × Λu)·φ = (φ × u)·Λu together with
//! self-adjointness of (−Δ)^{1/4}; `pairing_identity_check` pins that chain
//! to spectral accuracy.
//!
//! Space integrals use the periodic trapezoid rule (spectrally exact).
//! Time integrals live on the trajectory's stored stride, so residual
//! provenance stays tied to one run artifact: the χ and χ′ factors are
//! integrated exactly (their antiderivative is a closed-form polynomial)
//! against piecewise-linear interpolants of the sampled space integrals,
//! which keeps the u₀ boundary cancellation machine-exact and the overall
//! quadrature second order in the stride.

use serde::Serialize;

use crate::error::{HwmError, Result};
use crate::field::{Trajectory, VectorField3};
use crate::grid::SpectralGrid;
use crate::initial::{poly_bump, poly_bump_deriv, poly_bump_second_deriv};
use crate::multiplier::{apply_multiplier, MultiplierSpec};

/// Smooth bump in time, χ(t) = b((t − center)/half_width) with the same
/// polynomial profile as the spatial bumps. A profile centered at 0 is the
/// "initial-data" variant: χ(0) = 1 exercises the u₀ term of the weak
/// identity; interior profiles vanish at both ends of [0, T].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TemporalProfile {
    pub center: f64,
    pub half_width: f64,
    pub order: u32,
}

impl TemporalProfile {
    pub fn eval(&self, t: f64) -> f64 {
        poly_bump((t - self.center) / self.half_width, self.order)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        poly_bump_deriv((t - self.center) / self.half_width, self.order) / self.half_width
    }

    /// Exact ∫ₐᵇ χ(t) dt via the closed-form antiderivative of the
    /// polynomial bump, B(s) = Σ_k C(q,k)(−1)^k s^{2k+1}/(2k+1).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let clamp = |t: f64| ((t - self.center) / self.half_width).clamp(-1.0, 1.0);
        self.half_width * (bump_antiderivative(clamp(b), self.order) - bump_antiderivative(clamp(a), self.order))
    }

    pub fn is_initial(&self) -> bool {
        self.eval(0.0) != 0.0
    }
}

/// B(s) = ∫₀^s (1 − r²)^q dr for |s| ≤ 1, by binomial expansion.
fn bump_antiderivative(s: f64, q: u32) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0f64; // C(q, k)
    for k in 0..=q {
        let term = binom * s.powi(2 * k as i32 + 1) / (2 * k + 1) as f64;
        acc += if k % 2 == 0 { term } else { -term };
        binom *= (q - k) as f64 / (k + 1) as f64;
    }
    acc
}

/// One space-time test function φ(t,x) = χ(t)ψ(x).
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub psi: VectorField3,
    /// Analytic Δψ (no spectral differentiation involved).
    pub lap_psi: VectorField3,
    pub chi: TemporalProfile,
    /// Final time of the horizon the profile was built for.
    pub horizon: f64,
    pub label: String,
}

impl TestFunction {
    /// Build ψ(x) = orientation·b((x − center)/width) with its analytic
    /// Laplacian. The support must sit strictly inside the box.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: &std::sync::Arc<SpectralGrid>,
        center: f64,
        width: f64,
        order: u32,
        orientation: [f64; 3],
        chi: TemporalProfile,
        horizon: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        let l = grid.box_length();
        if center.abs() + width >= l / 2.0 {
            return Err(HwmError::domain(format!(
                "test-function support [{center} ± {width}] leaves the box of length {l}"
            )));
        }
        if chi.center - chi.half_width > horizon || chi.center + chi.half_width < 0.0 {
            return Err(HwmError::domain(
                "temporal profile support misses [0, T] entirely",
            ));
        }
        let psi = VectorField3::from_fn(grid.clone(), |x| {
            let b = poly_bump((x - center) / width, order);
            [orientation[0] * b, orientation[1] * b, orientation[2] * b]
        });
        let lap_psi = VectorField3::from_fn(grid.clone(), |x| {
            let b2 = poly_bump_second_deriv((x - center) / width, order) / (width * width);
            [orientation[0] * b2, orientation[1] * b2, orientation[2] * b2]
        });
        Ok(TestFunction {
            psi,
            lap_psi,
            chi,
            horizon,
            label: label.into(),
        })
    }

    /// Largest deviation between the analytic Δψ and the spectral Laplacian
    /// of the sampled ψ — the smoothness certificate of the profile.
    pub fn laplacian_mismatch(&self) -> f64 {
        let spectral = apply_multiplier(
            self.psi.grid(),
            MultiplierSpec::FractionalLaplacian { s: 2.0 },
            &self.psi,
        )
        .expect("grid is valid")
        .scale(-1.0);
        spectral.sub(&self.lap_psi).expect("same grid").linf_norm()
    }
}

/// The canonical 27-member battery: 3 spatial bumps × 3 orientations × 3
/// temporal profiles (two interior, one with χ(0) = 1). Geometry scales
/// with the box and horizon so the same battery works on any admissible
/// grid.
pub fn battery(grid: &std::sync::Arc<SpectralGrid>, horizon: f64) -> Result<Vec<TestFunction>> {
    let l = grid.box_length();
    let spatial = [(0.0, l / 6.0), (l / 8.0, l / 6.0), (-l / 6.0, l / 5.0)];
    let orientations = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let temporal = [
        TemporalProfile {
            center: horizon / 2.0,
            half_width: 0.4 * horizon,
            order: 8,
        },
        TemporalProfile {
            center: 0.6 * horizon,
            half_width: 0.25 * horizon,
            order: 8,
        },
        // χ(0) = 1: tests the initial-data pairing
        TemporalProfile {
            center: 0.0,
            half_width: 0.9 * horizon,
            order: 8,
        },
    ];
    let mut out = Vec::with_capacity(27);
    for (si, &(c, w)) in spatial.iter().enumerate() {
        for (oi, &e) in orientations.iter().enumerate() {
            for (ti, &chi) in temporal.iter().enumerate() {
                out.push(TestFunction::new(
                    grid,
                    c,
                    w,
                    8,
                    e,
                    chi,
                    horizon,
                    format!("s{si}-o{oi}-t{ti}"),
                )?);
            }
        }
    }
    Ok(out)
}

/// The four scalar building blocks of the weak identity for one (u, φ).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeakTerms {
    /// ∫∫ u·∂ₜφ
    pub time_term: f64,
    /// ∫ u₀·φ(0)
    pub init_term: f64,
    /// ∫∫ u·Δφ (the viscosity pairing, without the ε factor)
    pub eps_term: f64,
    /// ∫∫ (−Δ)^{1/4}(φ × u)·(−Δ)^{1/4}u
    pub pairing_term: f64,
}

fn space_integral(grid: &SpectralGrid, samples: &[f64]) -> f64 {
    grid.spacing() * samples.iter().sum::<f64>()
}

/// Composite trapezoid over the stored times.
fn time_trapezoid(times: &[f64], values: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..times.len() - 1 {
        acc += 0.5 * (times[j + 1] - times[j]) * (values[j] + values[j + 1]);
    }
    acc
}

pub fn weak_terms(traj: &Trajectory, tf: &TestFunction) -> Result<WeakTerms> {
    if traj.grid().as_ref() != tf.psi.grid().as_ref() {
        return Err(HwmError::GridMismatch);
    }
    let t_end = *traj.times.last().unwrap();
    if (t_end - tf.horizon).abs() > 1e-9 * tf.horizon.max(1.0) {
        return Err(HwmError::domain(format!(
            "horizon mismatch: trajectory ends at {t_end}, test function built for {}",
            tf.horizon
        )));
    }
    let grid = traj.grid();
    let quarter = MultiplierSpec::quarter_laplacian();

    let mut c = Vec::with_capacity(traj.len()); // ∫u·ψ
    let mut d = Vec::with_capacity(traj.len()); // ∫u·Δψ
    let mut p = Vec::with_capacity(traj.len()); // ∫(−Δ)^{1/4}(ψ×u)·(−Δ)^{1/4}u
    for u in &traj.slices {
        c.push(space_integral(grid, &u.dot(&tf.psi)?));
        d.push(space_integral(grid, &u.dot(&tf.lap_psi)?));
        let cross = tf.psi.cross(u)?;
        let a = apply_multiplier(grid, quarter, &cross)?;
        let b = apply_multiplier(grid, quarter, u)?;
        p.push(space_integral(grid, &a.dot(&b)?));
    }

    let chi: Vec<f64> = traj.times.iter().map(|&t| tf.chi.eval(t)).collect();

    // ∫χ′(t)c(t)dt with χ′ integrated exactly against the piecewise-linear
    // interpolant of the sampled c: per interval,
    //   ∫ₐᵇ χ′ c_lin = c_a(χ_b − χ_a) + (c_b − c_a)(χ_b − (1/Δ)∫ₐᵇχ).
    // For constant c the sum telescopes to c(χ(T) − χ(0)) exactly, so the
    // boundary cancellation against the u₀ term is machine-exact.
    let mut time_term = 0.0;
    for j in 0..traj.len() - 1 {
        let (a, b) = (traj.times[j], traj.times[j + 1]);
        let delta = b - a;
        let chi_int = tf.chi.integral(a, b);
        time_term += c[j] * (chi[j + 1] - chi[j]) + (c[j + 1] - c[j]) * (chi[j + 1] - chi_int / delta);
    }

    let eps_vals: Vec<f64> = chi.iter().zip(d.iter()).map(|(a, b)| a * b).collect();
    let pair_vals: Vec<f64> = chi.iter().zip(p.iter()).map(|(a, b)| a * b).collect();

    Ok(WeakTerms {
        time_term,
        init_term: chi[0] * c[0],
        eps_term: time_trapezoid(&traj.times, &eps_vals),
        pairing_term: time_trapezoid(&traj.times, &pair_vals),
    })
}

/// Signed residual of the regularized weak identity:
///   (−∫∫u·∂ₜφ − ∫u₀φ(0)) − ε∫∫u·Δφ − ∫∫(−Δ)^{1/4}(φ×u)·(−Δ)^{1/4}u.
pub fn weak_residual_regularized_signed(traj: &Trajectory, tf: &TestFunction) -> Result<f64> {
    let w = weak_terms(traj, tf)?;
    let lhs = -w.time_term - w.init_term;
    Ok(lhs - traj.config.eps * w.eps_term - w.pairing_term)
}

/// |signed regularized residual|; O(dt²) + quadrature for the ε-flow.
pub fn weak_residual_regularized(traj: &Trajectory, tf: &TestFunction) -> Result<f64> {
    Ok(weak_residual_regularized_signed(traj, tf)?.abs())
}

/// Signed residual of the ε-free (half-wave) weak identity. For an ε > 0
/// trajectory this equals the viscosity pairing ε∫∫u·Δφ plus discretization
/// error — the quantity the sweep drives to zero.
pub fn weak_residual_halfwave_signed(traj: &Trajectory, tf: &TestFunction) -> Result<f64> {
    let w = weak_terms(traj, tf)?;
    let lhs = -w.time_term - w.init_term;
    Ok(lhs - w.pairing_term)
}

pub fn weak_residual_halfwave(traj: &Trajectory, tf: &TestFunction) -> Result<f64> {
    Ok(weak_residual_halfwave_signed(traj, tf)?.abs())
}

/// The reformulation chain at the single-slice level:
///   ∫(u × (−Δ)^{1/2}u)·φ = ∫(φ × u)·(−Δ)^{1/2}u
///                        = ∫(−Δ)^{1/4}(φ × u)·(−Δ)^{1/4}u.
/// The first step is the cyclic triple product (pointwise exact), the
/// second is self-adjointness of (−Δ)^{1/4} (exact in spectral
/// arithmetic). Returns the absolute mismatch between the outer pairings;
/// contract ≤ `tol::PAIRING_IDENTITY`·(1 + norms).
pub fn pairing_identity_check(u: &VectorField3, phi_slice: &VectorField3) -> Result<f64> {
    let grid = u.grid();
    if phi_slice.grid().as_ref() != grid.as_ref() {
        return Err(HwmError::GridMismatch);
    }
    let quarter = MultiplierSpec::quarter_laplacian();
    let nl = crate::solver::nonlinearity(u)?;
    let lhs = space_integral(grid, &nl.dot(phi_slice)?);
    let a = apply_multiplier(grid, quarter, &phi_slice.cross(u)?)?;
    let b = apply_multiplier(grid, quarter, u)?;
    let rhs = space_integral(grid, &a.dot(&b)?);
    Ok((lhs - rhs).abs())
}

/// Battery evaluation: per test function, both residuals.
#[derive(Debug, Clone, Serialize)]
pub struct BatteryRow {
    pub label: String,
    pub chi_initial: bool,
    pub residual_regularized: f64,
    pub residual_halfwave: f64,
}

pub fn evaluate_battery(traj: &Trajectory, battery: &[TestFunction]) -> Result<Vec<BatteryRow>> {
    battery
        .iter()
        .map(|tf| {
            Ok(BatteryRow {
                label: tf.label.clone(),
                chi_initial: tf.chi.is_initial(),
                residual_regularized: weak_residual_regularized(traj, tf)?,
                residual_halfwave: weak_residual_halfwave(traj, tf)?,
            })
        })
        .collect()
}

pub fn battery_csv(rows: &[BatteryRow]) -> String {
    let mut out = String::from(
        "phi[label],chi_initial[bool],residual_regularized[-],residual_halfwave[-]\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.label, r.chi_initial, r.residual_regularized, r.residual_halfwave
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_band_limited, random_sphere_valued};
    use crate::grid::SpectralGrid;
    use crate::solver::{evolve, SolverConfig};
    use std::sync::Arc;

    fn grid() -> Arc<SpectralGrid> {
        // M = 256 on L = 16: the order-8 bumps resolve their Laplacians to
        // below the 1e-8 smoothness contract on this grid and finer
        SpectralGrid::new(16.0, 256).unwrap()
    }

    fn constant_traj(g: &Arc<SpectralGrid>) -> Trajectory {
        let q = VectorField3::constant(g.clone(), [0.0, 0.0, 1.0]);
        let cfg = SolverConfig::new(1e-2, 0.5, 1e-2);
        evolve(&q, &cfg).unwrap()
    }

    fn bump_traj(g: &Arc<SpectralGrid>) -> Trajectory {
        let u0 =
            crate::initial::make_initial(g, &crate::initial::InitialDataSpec::reference_bump())
                .unwrap();
        let mut cfg = SolverConfig::new(5e-2, 0.2, 2e-3);
        cfg.output_stride = 4;
        evolve(&u0, &cfg).unwrap()
    }

    #[test]
    fn battery_has_27_members_with_smooth_profiles() {
        let g = grid();
        let batt = battery(&g, 1.0).unwrap();
        assert_eq!(batt.len(), 27);
        let initial_count = batt.iter().filter(|tf| tf.chi.is_initial()).count();
        assert_eq!(initial_count, 9);
        for tf in &batt {
            // analytic vs spectral Laplacian of ψ
            assert!(
                tf.laplacian_mismatch() <= 1e-8,
                "{}: mismatch {}",
                tf.label,
                tf.laplacian_mismatch()
            );
            // analytic χ′ vs central differences
            let h = 1e-6;
            for &t in &[0.2, 0.5, 0.77] {
                let fd = (tf.chi.eval(t + h) - tf.chi.eval(t - h)) / (2.0 * h);
                assert!((fd - tf.chi.deriv(t)).abs() <= 1e-7 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn constant_trajectory_has_vanishing_residuals() {
        let g = grid();
        let traj = constant_traj(&g);
        for tf in battery(&g, 0.5).unwrap() {
            let r = weak_residual_regularized(&traj, &tf).unwrap();
            let rh = weak_residual_halfwave(&traj, &tf).unwrap();
            assert!(r <= 1e-10, "{}: regularized residual {r}", tf.label);
            assert!(rh <= 1e-10, "{}: half-wave residual {rh}", tf.label);
        }
    }

    #[test]
    fn zero_test_function_gives_exactly_zero() {
        let g = grid();
        let traj = constant_traj(&g);
        let chi = TemporalProfile {
            center: 0.25,
            half_width: 0.2,
            order: 8,
        };
        let tf = TestFunction::new(&g, 0.0, 2.0, 8, [0.0, 0.0, 0.0], chi, 0.5, "zero").unwrap();
        assert_eq!(weak_residual_regularized(&traj, &tf).unwrap(), 0.0);
        assert_eq!(weak_residual_halfwave(&traj, &tf).unwrap(), 0.0);
    }

    #[test]
    fn pairing_identity_is_spectrally_exact() {
        let g = grid();
        // u constant: both sides 0
        let q = VectorField3::constant(g.clone(), [0.0, 1.0, 0.0]);
        let phi = random_band_limited(&g, 20, 3);
        assert!(pairing_identity_check(&q, &phi).unwrap() <= 1e-14);
        // u = φ: both sides 0 (x × x = 0)
        assert!(pairing_identity_check(&phi, &phi).unwrap() <= 1e-10);
        // random pairs
        for seed in 0..6u64 {
            let u = random_sphere_valued(&g, 25, 40 + seed);
            let phi = random_band_limited(&g, 15, 80 + seed);
            let scale = 1.0 + u.hs_norm(0.5).powi(2) * (1.0 + phi.linf_norm());
            let diff = pairing_identity_check(&u, &phi).unwrap();
            assert!(
                diff <= crate::tol::PAIRING_IDENTITY * scale,
                "seed {seed}: diff {diff}"
            );
        }
    }

    #[test]
    fn self_adjointness_of_quarter_laplacian() {
        let g = grid();
        for seed in 0..6u64 {
            let f = random_band_limited(&g, 30, 500 + seed);
            let ge = random_band_limited(&g, 30, 600 + seed);
            let quarter = MultiplierSpec::quarter_laplacian();
            let lf = apply_multiplier(&g, quarter, &f).unwrap();
            let lg = apply_multiplier(&g, quarter, &ge).unwrap();
            let a = space_integral(&g, &lf.dot(&ge).unwrap());
            let b = space_integral(&g, &f.dot(&lg).unwrap());
            let scale = 1.0 + f.hs_norm(0.5) * ge.hs_norm(0.5);
            assert!((a - b).abs() <= crate::tol::SELF_ADJOINT * scale);
        }
    }

    #[test]
    fn residual_is_linear_in_the_test_function() {
        let g = grid();
        let traj = bump_traj(&g);
        let chi = TemporalProfile {
            center: 0.1,
            half_width: 0.08,
            order: 8,
        };
        let tf1 = TestFunction::new(&g, 0.0, 2.5, 8, [1.0, 0.0, 0.0], chi, 0.2, "a").unwrap();
        let tf2 = TestFunction::new(&g, 1.0, 2.0, 8, [0.0, 1.0, 0.5], chi, 0.2, "b").unwrap();
        // φ₁ + φ₂ shares χ, so the sum is again a tensor-product function
        let mut sum = tf1.clone();
        sum.psi = tf1.psi.add(&tf2.psi).unwrap();
        sum.lap_psi = tf1.lap_psi.add(&tf2.lap_psi).unwrap();
        let r1 = weak_residual_regularized_signed(&traj, &tf1).unwrap();
        let r2 = weak_residual_regularized_signed(&traj, &tf2).unwrap();
        let rs = weak_residual_regularized_signed(&traj, &sum).unwrap();
        assert!(
            (rs - (r1 + r2)).abs() <= 1e-10 * (1.0 + r1.abs() + r2.abs()),
            "rs {rs} vs r1+r2 {}",
            r1 + r2
        );
    }

    #[test]
    fn halfwave_minus_regularized_is_the_viscosity_pairing() {
        let g = grid();
        let traj = bump_traj(&g);
        for tf in battery(&g, 0.2).unwrap().iter().take(9) {
            let w = weak_terms(&traj, tf).unwrap();
            let shw = weak_residual_halfwave_signed(&traj, tf).unwrap();
            let srg = weak_residual_regularized_signed(&traj, tf).unwrap();
            let diff = shw - srg - traj.config.eps * w.eps_term;
            assert!(diff.abs() <= 1e-12 * (1.0 + w.eps_term.abs()));
        }
    }

    #[test]
    fn chi_antiderivative_matches_fine_riemann_sum() {
        let chi = TemporalProfile {
            center: 0.3,
            half_width: 0.25,
            order: 8,
        };
        for (a, b) in [(0.0, 1.0), (0.1, 0.4), (0.35, 0.9)] {
            let n = 200_000;
            let h = (b - a) / n as f64;
            let riemann: f64 = (0..n)
                .map(|j| h * chi.eval(a + (j as f64 + 0.5) * h))
                .sum();
            let exact = chi.integral(a, b);
            assert!((riemann - exact).abs() < 1e-10, "({a},{b}): {riemann} vs {exact}");
        }
    }

    #[test]
    fn horizon_mismatch_is_an_error() {
        let g = grid();
        let traj = constant_traj(&g); // T = 0.5
        let batt = battery(&g, 1.0).unwrap(); // built for T = 1
        assert!(weak_residual_regularized(&traj, &batt[0]).is_err());
    }
}
