//! Time integration of the regularized flow ∂ₜu − εΔu = u × (−Δ)^{1/2}u.
//!
//! Two independent routes are implemented and cross-validated:
//!
//! 1. Exponential time marching. The heat factor e^{−εξ²dt} is applied
//!    exactly (it *is* the fundamental-solution convolution K_ε ⋆), so the
//!    stiff term costs nothing in stability; dt is limited only by the
//!    nonlinear rotation rate, which on near-sphere states is at most
//!    max|ξ|. ETD-RK2 is the default; an integrating-factor RK4 is
//!    available for tighter error floors.
//!
//! 2. A Picard iteration on the Duhamel (mild) form over a short window
//!    [0, T_loc]: u^{(0)} = K_ε ⋆ u₀ solves the homogeneous heat equation,
//!    and u^{(j)} = K_ε ⋆ N(u^{(j−1)}) + K_ε ⋆ u₀ with the time integral
//!    evaluated by the trapezoid rule on a substep lattice. The iteration
//!    contracts for small windows; the measured contraction ratios are part
//!    of the report.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HwmError, Result};
use crate::field::{Trajectory, VectorField3};
use crate::grid::SpectralGrid;
use crate::multiplier::{apply_multiplier, MultiplierSpec};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    EtdRk2,
    Ifrk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardParams {
    /// Hard cap on Picard iterations.
    pub max_iters: usize,
    /// Contraction window T_loc (the local existence horizon probed).
    pub t_loc: f64,
    /// Substeps of the trapezoid Duhamel quadrature, at least 8.
    pub duhamel_substeps: usize,
}

impl Default for PicardParams {
    fn default() -> Self {
        PicardParams {
            max_iters: 12,
            t_loc: 1e-2,
            duhamel_substeps: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Viscosity ε > 0. The ε = 0 flow is never integrated directly; it is
    /// probed only as the weak-form limit of a sweep.
    pub eps: f64,
    /// Final time T.
    pub t_final: f64,
    /// Time step.
    pub dt: f64,
    /// A slice is stored every `output_stride` steps.
    pub output_stride: usize,
    pub integrator: Integrator,
    /// Renormalize |u| = 1 after every step. Off by default: the regularized
    /// flow genuinely leaves the sphere, and the projected variant exists
    /// only as a comparison/negative control. Excluded from acceptance runs.
    pub project_to_sphere: bool,
    /// Evaluate the cross product with 3/2-rule anti-aliasing.
    pub dealias: bool,
    pub picard: PicardParams,
}

impl SolverConfig {
    pub fn new(eps: f64, t_final: f64, dt: f64) -> Self {
        SolverConfig {
            eps,
            t_final,
            dt,
            output_stride: 1,
            integrator: Integrator::EtdRk2,
            project_to_sphere: false,
            dealias: false,
            picard: PicardParams::default(),
        }
    }

    /// Startup checks: positive parameters, integer step count, stride
    /// dividing the step count, and the explicit-stability bound
    /// dt·max|ξ| within the integrator's documented region.
    pub fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(HwmError::domain(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(HwmError::domain("t_final must be positive"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(HwmError::domain("dt must be positive"));
        }
        if self.dt > self.t_final {
            return Err(HwmError::domain(format!(
                "dt = {} exceeds t_final = {}",
                self.dt, self.t_final
            )));
        }
        let steps = self.num_steps();
        if ((steps as f64) * self.dt - self.t_final).abs() > 1e-9 * self.t_final.max(1.0) {
            return Err(HwmError::domain(format!(
                "t_final = {} is not an integer number of steps of dt = {}",
                self.t_final, self.dt
            )));
        }
        if self.output_stride == 0 || steps % self.output_stride != 0 {
            return Err(HwmError::domain(format!(
                "output_stride = {} must divide the step count {}",
                self.output_stride, steps
            )));
        }
        let cfl = self.dt * grid.max_wavenumber();
        let bound = match self.integrator {
            Integrator::EtdRk2 => tol::STABILITY_ETD_RK2,
            Integrator::Ifrk4 => tol::STABILITY_IFRK4,
        };
        if cfl > bound {
            return Err(HwmError::domain(format!(
                "stability check failed: dt·max|xi| = {cfl:.3} exceeds {bound} \
                 for {:?}; reduce dt or the grid resolution",
                self.integrator
            )));
        }
        if self.picard.duhamel_substeps < 8 {
            return Err(HwmError::domain("duhamel_substeps must be at least 8"));
        }
        if self.picard.t_loc > self.t_final {
            return Err(HwmError::domain("picard window t_loc must not exceed t_final"));
        }
        Ok(())
    }

    pub fn num_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// N(u) = u × (−Δ)^{1/2}u, the half-wave nonlinearity. Pointwise orthogonal
/// to u (triple product with a repeated factor), which is the algebraic
/// heart of the maximum principle.
pub fn nonlinearity(u: &VectorField3) -> Result<VectorField3> {
    let w = apply_multiplier(u.grid(), MultiplierSpec::half_laplacian(), u)?;
    u.cross(&w)
}

/// Dealiased variant (3/2-rule product).
pub fn nonlinearity_dealiased(u: &VectorField3) -> Result<VectorField3> {
    let w = apply_multiplier(u.grid(), MultiplierSpec::half_laplacian(), u)?;
    u.cross_dealiased(&w)
}

/// Exact heat flow of a field: e^{εtΔ}f = K_ε(·, t) ⋆ f.
pub fn heat_flow(eps: f64, t: f64, f: &VectorField3) -> Result<VectorField3> {
    apply_multiplier(f.grid(), MultiplierSpec::Heat { eps, t }, f)
}

// ── exponential stepper ─────────────────────────────────────────────────

/// φ₁(z) = (e^z − 1)/z, φ₂(z) = (e^z − 1 − z)/z², series-stabilized near 0.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0 + z * z * z * z / 120.0
    } else {
        z.exp_m1() / z
    }
}

fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0 + z * z * z * z / 720.0
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// Per-mode coefficient tables for one (grid, ε, dt) triple.
struct Stepper {
    grid: Arc<SpectralGrid>,
    cfg: SolverConfig,
    e_full: Vec<f64>,
    e_half: Vec<f64>,
    phi1_dt: Vec<f64>,
    phi2_dt: Vec<f64>,
}

impl Stepper {
    fn new(grid: Arc<SpectralGrid>, cfg: SolverConfig) -> Self {
        let dt = cfg.dt;
        let eps = cfg.eps;
        let mut e_full = Vec::with_capacity(grid.len());
        let mut e_half = Vec::with_capacity(grid.len());
        let mut p1 = Vec::with_capacity(grid.len());
        let mut p2 = Vec::with_capacity(grid.len());
        for &xi in grid.wavenumbers() {
            let z = -eps * xi * xi * dt;
            e_full.push(z.exp());
            e_half.push((0.5 * z).exp());
            p1.push(phi1(z));
            p2.push(phi2(z));
        }
        Stepper {
            grid,
            cfg,
            e_full,
            e_half,
            phi1_dt: p1,
            phi2_dt: p2,
        }
    }

    fn nonlin(&self, u: &VectorField3) -> Result<VectorField3> {
        if self.cfg.dealias {
            nonlinearity_dealiased(u)
        } else {
            nonlinearity(u)
        }
    }

    /// One ETD-RK2 (Cox–Matthews) step:
    ///   a  = E·u + dt·φ₁·N(u)
    ///   u⁺ = a + dt·φ₂·(N(a) − N(u))
    fn step_etd2(&self, u: &VectorField3) -> Result<VectorField3> {
        let dt = self.cfg.dt;
        let n1 = self.nonlin(u)?;
        let u_spec = u.spectra();
        let n1_spec = n1.spectra();
        let mut a_spec = combine3(&u_spec, &self.e_full, &n1_spec, &scaled(&self.phi1_dt, dt));
        let a = VectorField3::from_spectra(self.grid.clone(), &a_spec)?;
        let n2 = self.nonlin(&a)?;
        let n2_spec = n2.spectra();
        for i in 0..3 {
            for (k, slot) in a_spec[i].iter_mut().enumerate() {
                *slot += dt * self.phi2_dt[k] * (n2_spec[i][k] - n1_spec[i][k]);
            }
        }
        VectorField3::from_spectra(self.grid.clone(), &a_spec)
    }

    /// One integrating-factor RK4 step. All exponential factors appear with
    /// nonpositive exponents, so the scheme inherits the heat kernel's
    /// unconditional damping of high modes.
    fn step_ifrk4(&self, u: &VectorField3) -> Result<VectorField3> {
        let h = self.cfg.dt;
        let g = &self.grid;
        let u_spec = u.spectra();

        let n1 = self.nonlin(u)?.spectra();
        // a = E_half·(u + h/2 N(u))
        let a_spec = combine3(&u_spec, &self.e_half, &n1, &scaled(&self.e_half, 0.5 * h));
        let a = VectorField3::from_spectra(g.clone(), &a_spec)?;

        let n2 = self.nonlin(&a)?.spectra();
        // b = E_half·u + h/2 N(a)
        let ones = vec![1.0; g.len()];
        let b_spec = combine3(&u_spec, &self.e_half, &n2, &scaled(&ones, 0.5 * h));
        let b = VectorField3::from_spectra(g.clone(), &b_spec)?;

        let n3 = self.nonlin(&b)?.spectra();
        // c = E_full·u + h·E_half·N(b)
        let c_spec = combine3(&u_spec, &self.e_full, &n3, &scaled(&self.e_half, h));
        let c = VectorField3::from_spectra(g.clone(), &c_spec)?;

        let n4 = self.nonlin(&c)?.spectra();
        // u⁺ = E_full·u + h/6·(E_full·N1 + 2E_half·(N2 + N3) + N4)
        let mut out = combine3(&u_spec, &self.e_full, &n1, &scaled(&self.e_full, h / 6.0));
        for i in 0..3 {
            for (k, slot) in out[i].iter_mut().enumerate() {
                *slot += (h / 3.0) * self.e_half[k] * (n2[i][k] + n3[i][k])
                    + (h / 6.0) * n4[i][k];
            }
        }
        VectorField3::from_spectra(g.clone(), &out)
    }

    fn step(&self, u: &VectorField3) -> Result<VectorField3> {
        let next = match self.cfg.integrator {
            Integrator::EtdRk2 => self.step_etd2(u)?,
            Integrator::Ifrk4 => self.step_ifrk4(u)?,
        };
        Ok(if self.cfg.project_to_sphere {
            next.normalized()
        } else {
            next
        })
    }
}

fn scaled(v: &[f64], c: f64) -> Vec<f64> {
    v.iter().map(|&x| c * x).collect()
}

/// componentwise w1·a + w2·b over the three spectra
fn combine3(
    a: &[Vec<Complex64>; 3],
    w1: &[f64],
    b: &[Vec<Complex64>; 3],
    w2: &[f64],
) -> [Vec<Complex64>; 3] {
    let mut out = a.clone();
    for i in 0..3 {
        for (k, slot) in out[i].iter_mut().enumerate() {
            *slot = w1[k] * a[i][k] + w2[k] * b[i][k];
        }
    }
    out
}

/// Advance one step. Constant fields are fixed exactly (N vanishes and the
/// heat factor is 1 at the zero mode).
pub fn step(u: &VectorField3, cfg: &SolverConfig) -> Result<VectorField3> {
    cfg.validate(u.grid())?;
    let stepper = Stepper::new(u.grid().clone(), *cfg);
    let next = stepper.step(u)?;
    check_finite(&next, cfg.dt)?;
    Ok(next)
}

fn check_finite(u: &VectorField3, time: f64) -> Result<()> {
    if u.is_finite() {
        Ok(())
    } else {
        let norm = u
            .component(0)
            .iter()
            .chain(u.component(1))
            .chain(u.component(2))
            .fold(0.0f64, |a, &v| if v.is_finite() { a.max(v.abs()) } else { f64::INFINITY });
        Err(HwmError::BlowUp { time, norm })
    }
}

/// Integrate to T, storing a slice every `output_stride` steps (the initial
/// slice included). Aborts with a blow-up diagnostic on the first
/// non-finite state.
pub fn evolve(u0: &VectorField3, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate(u0.grid())?;
    check_finite(u0, 0.0)?;
    let stepper = Stepper::new(u0.grid().clone(), *cfg);
    let steps = cfg.num_steps();
    let stride = cfg.output_stride;
    let mut times = Vec::with_capacity(steps / stride + 1);
    let mut slices = Vec::with_capacity(steps / stride + 1);
    times.push(0.0);
    slices.push(u0.clone());
    let mut u = u0.clone();
    for n in 1..=steps {
        u = stepper.step(&u)?;
        let t = n as f64 * cfg.dt;
        check_finite(&u, t)?;
        if n % stride == 0 {
            times.push(t);
            slices.push(u.clone());
        }
    }
    Ok(Trajectory {
        times,
        slices,
        config: *cfg,
    })
}

// ── Picard / Duhamel local solver ───────────────────────────────────────

/// Contraction record of one Picard run. `xt_differences[j]` is the
/// discrete X-norm (max_t L^∞ₓ + max_t Ḣ¹ₓ) of u^{(j+1)} − u^{(j)};
/// `contraction_ratios` are the consecutive quotients of those differences.
#[derive(Debug, Clone, Serialize)]
pub struct PicardReport {
    pub iterates_kept: usize,
    pub xt_differences: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
}

fn xt_norm_of_difference(a: &[VectorField3], b: &[VectorField3]) -> f64 {
    let mut linf = 0.0f64;
    let mut h1 = 0.0f64;
    for (ua, ub) in a.iter().zip(b.iter()) {
        let d = ua.sub(ub).expect("picard slabs share a grid");
        linf = linf.max(d.linf_norm());
        h1 = h1.max(d.hs_norm(1.0));
    }
    linf + h1
}

/// Solve the mild equation on [0, T_loc] by Picard iteration.
///
/// Returns the fixed point at t = T_loc together with the contraction
/// report. Non-contraction (a ratio ≥ 1 anywhere in the window) is an
/// error advising a smaller window, mirroring the smallness requirement of
/// the local existence proof.
pub fn picard_local_solve(
    u0: &VectorField3,
    cfg: &SolverConfig,
) -> Result<(VectorField3, PicardReport)> {
    cfg.validate(u0.grid())?;
    let grid = u0.grid().clone();
    let n = cfg.picard.duhamel_substeps;
    let tau = cfg.picard.t_loc / n as f64;
    let eps = cfg.eps;

    // heat gains per lag l·tau
    let lag_gains: Vec<Vec<f64>> = (0..=n)
        .map(|l| {
            grid.wavenumbers()
                .iter()
                .map(|&xi| (-eps * xi * xi * (l as f64) * tau).exp())
                .collect()
        })
        .collect();

    let u0_spec = u0.spectra();
    // homogeneous iterate: u^{(0)}(t_i) = K_ε(t_i) ⋆ u₀
    let base_spec: Vec<[Vec<Complex64>; 3]> = (0..=n)
        .map(|i| {
            let mut s = u0_spec.clone();
            for comp in &mut s {
                for (k, c) in comp.iter_mut().enumerate() {
                    *c *= lag_gains[i][k];
                }
            }
            s
        })
        .collect();
    let mut prev: Vec<VectorField3> = base_spec
        .iter()
        .map(|s| VectorField3::from_spectra(grid.clone(), s))
        .collect::<Result<_>>()?;

    let scale = 1.0 + {
        let mut linf = 0.0f64;
        let mut h1 = 0.0f64;
        for s in &prev {
            linf = linf.max(s.linf_norm());
            h1 = h1.max(s.hs_norm(1.0));
        }
        linf + h1
    };

    let mut differences = Vec::new();
    let mut converged = false;

    for _iter in 0..cfg.picard.max_iters {
        // nonlinearity spectra along the previous slab
        let n_spec: Vec<[Vec<Complex64>; 3]> = prev
            .iter()
            .map(|s| {
                let nl = if cfg.dealias {
                    nonlinearity_dealiased(s)?
                } else {
                    nonlinearity(s)?
                };
                Ok(nl.spectra())
            })
            .collect::<Result<_>>()?;

        // u^{(j)}(t_i) = base(t_i) + ∫₀^{t_i} K_ε(t_i − s) N(u^{(j−1)}(s)) ds
        let mut next: Vec<VectorField3> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut acc = base_spec[i].clone();
            if i > 0 {
                for m in 0..=i {
                    // trapezoid weights over 0..=i
                    let w = if m == 0 || m == i { 0.5 * tau } else { tau };
                    let g = &lag_gains[i - m];
                    for c in 0..3 {
                        for (k, slot) in acc[c].iter_mut().enumerate() {
                            *slot += w * g[k] * n_spec[m][c][k];
                        }
                    }
                }
            }
            next.push(VectorField3::from_spectra(grid.clone(), &acc)?);
        }

        let diff = xt_norm_of_difference(&next, &prev);
        differences.push(diff);
        prev = next;
        if diff <= tol::PICARD_CONVERGED * scale {
            converged = true;
            break;
        }
    }

    let ratios: Vec<f64> = differences
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();

    let report = PicardReport {
        iterates_kept: differences.len(),
        xt_differences: differences,
        contraction_ratios: ratios.clone(),
        converged,
    };

    if !converged && ratios.iter().all(|&r| r >= 1.0) && !ratios.is_empty() {
        return Err(HwmError::domain(format!(
            "picard iteration does not contract on T_loc = {} (ratios all >= 1); \
             choose a smaller contraction window",
            cfg.picard.t_loc
        )));
    }

    Ok((prev.last().unwrap().clone(), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_sphere_valued;
    use crate::initial::{make_initial, InitialDataSpec};

    fn grid(m: usize) -> Arc<SpectralGrid> {
        SpectralGrid::new(16.0, m).unwrap()
    }

    #[test]
    fn nonlinearity_vanishes_on_constants_and_eigenfields() {
        let g = grid(64);
        let q = VectorField3::constant(g.clone(), [0.3, 0.0, (1.0f64 - 0.09).sqrt()]);
        assert_eq!(nonlinearity(&q).unwrap().linf_norm(), 0.0);

        // u = (cos x, sin x, 0) on L = 2π: (−Δ)^{1/2}u = u, so u × u = 0
        let g2 = SpectralGrid::new(2.0 * std::f64::consts::PI, 64).unwrap();
        let u = VectorField3::from_fn(g2, |x| [x.cos(), x.sin(), 0.0]);
        assert!(nonlinearity(&u).unwrap().linf_norm() < 1e-13);
    }

    #[test]
    fn nonlinearity_is_pointwise_orthogonal_to_u() {
        let g = grid(128);
        let u = random_sphere_valued(&g, 20, 9);
        let nl = nonlinearity(&u).unwrap();
        let scale = u.linf_norm() * nl.linf_norm();
        for v in nl.dot(&u).unwrap() {
            assert!(v.abs() <= tol::ORTHOGONALITY * scale.max(1.0));
        }
    }

    #[test]
    fn step_fixes_constants_exactly() {
        let g = grid(64);
        let q = VectorField3::constant(g, [0.0, 0.6, 0.8]);
        for integrator in [Integrator::EtdRk2, Integrator::Ifrk4] {
            let mut cfg = SolverConfig::new(0.05, 1.0, 1e-2);
            cfg.integrator = integrator;
            let next = step(&q, &cfg).unwrap();
            for j in 0..q.len() {
                assert_eq!(next.at(j), [0.0, 0.6, 0.8]);
            }
        }
    }

    #[test]
    fn evolve_constant_data_gives_constant_trajectory() {
        let g = grid(64);
        let q = VectorField3::constant(g, [0.0, 0.0, 1.0]);
        let mut cfg = SolverConfig::new(1e-2, 0.1, 1e-2);
        cfg.output_stride = 5;
        let traj = evolve(&q, &cfg).unwrap();
        assert_eq!(traj.len(), 3);
        assert_eq!(traj.times, vec![0.0, 0.05, 0.1]);
        for s in &traj.slices {
            assert_eq!(s.sphere_deviation(), 0.0);
        }
    }

    #[test]
    fn stability_check_rejects_oversized_dt() {
        let g = grid(1024); // max|ξ| = π·1024/16 ≈ 201
        let q = VectorField3::constant(g, [0.0, 0.0, 1.0]);
        let cfg = SolverConfig::new(1e-2, 1.0, 1e-2); // dt·max|ξ| ≈ 2.0
        assert!(matches!(step(&q, &cfg), Err(HwmError::Domain(_))));
    }

    #[test]
    fn config_validation_catches_bad_strides_and_times() {
        let g = grid(64);
        let mut cfg = SolverConfig::new(1e-2, 1.0, 1e-3);
        cfg.output_stride = 7; // 1000 % 7 != 0
        assert!(cfg.validate(&g).is_err());
        let cfg2 = SolverConfig::new(1e-2, 1.0, 3e-3); // 1/3e-3 not integer
        assert!(cfg2.validate(&g).is_err());
        let cfg3 = SolverConfig::new(-1.0, 1.0, 1e-3);
        assert!(cfg3.validate(&g).is_err());
    }

    #[test]
    fn unprojected_flow_leaves_the_sphere() {
        // the regularized flow genuinely leaves S²: |u|² = 1 − 2ε∫K⋆|∇u|²,
        // so the deviation is positive, of size O(ε·t·max|∇u₀|²), and
        // strictly downward — this guards against a silently projected
        // implementation
        let g = grid(256);
        let u0 = make_initial(&g, &InitialDataSpec::reference_bump()).unwrap();
        let mut cfg = SolverConfig::new(1e-2, 0.2, 2e-3);
        cfg.output_stride = 10;
        let traj = evolve(&u0, &cfg).unwrap();
        let dev = traj
            .slices
            .iter()
            .map(|s| s.sphere_deviation())
            .fold(0.0f64, f64::max);
        assert!(dev > 1e-10, "flow looks projected, dev = {dev}");
        let grad_max = crate::multiplier::apply_multiplier(&g, MultiplierSpec::Derivative, &u0)
            .unwrap()
            .linf_norm();
        let a_priori = 2.0 * cfg.eps * cfg.t_final * grad_max * grad_max;
        assert!(dev <= a_priori, "dev {dev} exceeds the source bound {a_priori}");
        // and the excursion is downward: max|u|² obeys the discrete
        // maximum-principle envelope
        let max_v = traj
            .slices
            .iter()
            .map(|s| {
                (0..s.len())
                    .map(|j| {
                        let v = s.at(j);
                        v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
                    })
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        let envelope = 1.0 + tol::MAX_PRINCIPLE_BASE + tol::MAX_PRINCIPLE_DT2 * cfg.dt * cfg.dt;
        assert!(max_v <= envelope, "max |u|^2 = {max_v} above {envelope}");
    }

    #[test]
    fn picard_on_constant_data_converges_immediately() {
        let g = grid(64);
        let q = VectorField3::constant(g, [0.0, 0.0, 1.0]);
        let mut cfg = SolverConfig::new(1e-1, 1.0, 1e-3);
        cfg.picard = PicardParams {
            max_iters: 6,
            t_loc: 1e-2,
            duhamel_substeps: 8,
        };
        let (fixed, report) = picard_local_solve(&q, &cfg).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterates_kept, 1);
        assert_eq!(report.xt_differences, vec![0.0]);
        for j in 0..fixed.len() {
            assert_eq!(fixed.at(j), [0.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn phi_functions_match_series_and_limits() {
        assert!((phi1(0.0) - 1.0).abs() < 1e-15);
        assert!((phi2(0.0) - 0.5).abs() < 1e-15);
        for &z in &[-1e-6, -1e-3, -0.5e-1, -1.0, -10.0] {
            let p1 = phi1(z);
            let p2 = phi2(z);
            assert!((z * p1 - z.exp_m1()).abs() < 1e-14);
            assert!((z * z * p2 - (z.exp_m1() - z)).abs() < 1e-14);
        }
    }
}
