//! Measurable reports on a trajectory: energies and their decay laws, the
//! discrete maximum principle, far-field pinning, frequency-tail bounds,
//! and the commutator cancellation.
//!
//! Time derivatives inside identity residuals use centered differences on
//! the stored output stride; the primary contract for those residuals is
//! the refinement slope under dt → dt/2 (with the stride held fixed), not
//! an absolute threshold.

use serde::Serialize;

use crate::error::{HwmError, Result};
use crate::field::{Trajectory, VectorField3};
use crate::initial::least_squares_slope;
use crate::multiplier::{apply_multiplier, apply_scalar, MultiplierSpec};
use crate::tol;

/// Per-time scalar series and tail table of one run.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsSeries {
    pub times: Vec<f64>,
    /// Ḣ¹ energy ½‖∇u‖².
    pub e_h1: Vec<f64>,
    /// Critical energy ½‖(−Δ)^{1/4}u‖².
    pub e_c: Vec<f64>,
    pub sphere_dev: Vec<f64>,
    /// max |u − Q| outside the padded support (NaN column if not configured).
    pub far_field: Vec<f64>,
    /// (N, ‖P_{≥N}u(t)‖_{L²} per time) per configured cutoff.
    pub tail: Vec<(f64, Vec<f64>)>,
}

impl DiagnosticsSeries {
    /// CSV with a header naming columns and units (all quantities are
    /// dimensionless except `time[tu]`, in simulation time units).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time[tu],e_h1[-],e_c[-],sphere_dev[-],far_field[-]");
        for (n, _) in &self.tail {
            out.push_str(&format!(",tail_N{n}[-]"));
        }
        out.push('\n');
        for (j, &t) in self.times.iter().enumerate() {
            let ff = self.far_field.get(j).copied().unwrap_or(f64::NAN);
            out.push_str(&format!(
                "{},{},{},{},{}",
                t, self.e_h1[j], self.e_c[j], self.sphere_dev[j], ff
            ));
            for (_, col) in &self.tail {
                out.push_str(&format!(",{}", col[j]));
            }
            out.push('\n');
        }
        out
    }
}

/// Ḣ¹ energy per slice, ½‖∇u‖²_{L²}.
pub fn h1_energy(traj: &Trajectory) -> Vec<f64> {
    traj.slices
        .iter()
        .map(|u| 0.5 * u.hs_norm(1.0).powi(2))
        .collect()
}

/// Critical energy per slice, ½‖(−Δ)^{1/4}u‖²_{L²}. Nonincreasing along
/// the regularized flow (its exact dissipation is −ε‖(−Δ)^{3/4}u‖²).
pub fn critical_energy(traj: &Trajectory) -> Vec<f64> {
    traj.slices
        .iter()
        .map(|u| 0.5 * u.hs_norm(0.5).powi(2))
        .collect()
}

/// Largest single-step increase of a series (0 if monotone nonincreasing).
pub fn max_upward_step(series: &[f64]) -> f64 {
    series
        .windows(2)
        .map(|w| (w[1] - w[0]).max(0.0))
        .fold(0.0, f64::max)
}

/// Check E_c monotonicity at the documented tolerance
/// `tol::EC_MONOTONE`·(1 + E_c(0)) per stored step. Returns (pass, worst
/// upward step).
pub fn critical_energy_monotone(traj: &Trajectory) -> (bool, f64) {
    let ec = critical_energy(traj);
    let allowed = tol::EC_MONOTONE * (1.0 + ec[0]);
    let worst = max_upward_step(&ec);
    (worst <= allowed, worst)
}

fn laplacian(u: &VectorField3) -> Result<VectorField3> {
    Ok(apply_multiplier(u.grid(), MultiplierSpec::FractionalLaplacian { s: 2.0 }, u)?.scale(-1.0))
}

fn integral(grid: &crate::grid::SpectralGrid, samples: &[f64]) -> f64 {
    grid.spacing() * samples.iter().sum::<f64>()
}

/// |∇u|² as a scalar sample vector.
fn grad_squared(u: &VectorField3) -> Result<Vec<f64>> {
    let du = apply_multiplier(u.grid(), MultiplierSpec::Derivative, u)?;
    Ok(du.dot(&du).expect("same grid"))
}

/// Residual of the Ḣ¹ energy identity
///   d/dt ½‖∇u‖² = −ε‖Δu‖² − ∫(u × (−Δ)^{1/2}u)·Δu dx
/// per interior stored time, normalized by 1 + |RHS|.
pub fn energy_identity_residual(traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.len() < 3 {
        return Err(HwmError::domain(
            "energy identity residual needs at least 3 stored slices",
        ));
    }
    let eps = traj.config.eps;
    let delta = traj.output_dt();
    let e = h1_energy(traj);
    let mut out = Vec::with_capacity(traj.len() - 2);
    for j in 1..traj.len() - 1 {
        let u = &traj.slices[j];
        let lap = laplacian(u)?;
        let diss = -eps * lap.l2_norm().powi(2);
        let nl = crate::solver::nonlinearity(u)?;
        let pairing = integral(u.grid(), &nl.dot(&lap)?);
        let rhs = diss - pairing;
        let lhs = (e[j + 1] - e[j - 1]) / (2.0 * delta);
        out.push((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    Ok(out)
}

/// Residual of the exact critical-energy dissipation law
///   d/dt E_c = −ε‖(−Δ)^{3/4}u‖²
/// per interior stored time, normalized.
pub fn critical_energy_dissipation_residual(traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.len() < 3 {
        return Err(HwmError::domain(
            "dissipation residual needs at least 3 stored slices",
        ));
    }
    let eps = traj.config.eps;
    let delta = traj.output_dt();
    let ec = critical_energy(traj);
    let mut out = Vec::with_capacity(traj.len() - 2);
    for j in 1..traj.len() - 1 {
        let u = &traj.slices[j];
        let w = apply_multiplier(u.grid(), MultiplierSpec::FractionalLaplacian { s: 1.5 }, u)?;
        let rhs = -eps * w.l2_norm().powi(2);
        let lhs = (ec[j + 1] - ec[j - 1]) / (2.0 * delta);
        out.push((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    Ok(out)
}

/// Discrete residual of the |u|² constraint equation
///   ∂ₜv − εΔv = −2ε|∇u|²,   v = u·u
/// per interior stored time: L² norm of the residual field over
/// (1 + L² norm of the source).
pub fn constraint_equation_residual(traj: &Trajectory) -> Result<Vec<f64>> {
    constraint_residual_impl(traj, true)
}

/// Same discrete operator with the source term omitted — the ablation
/// control: it must fail by exactly the source magnitude.
pub fn constraint_equation_residual_no_source(traj: &Trajectory) -> Result<Vec<f64>> {
    constraint_residual_impl(traj, false)
}

fn constraint_residual_impl(traj: &Trajectory, with_source: bool) -> Result<Vec<f64>> {
    if traj.len() < 3 {
        return Err(HwmError::domain(
            "constraint residual needs at least 3 stored slices",
        ));
    }
    let eps = traj.config.eps;
    let delta = traj.output_dt();
    let grid = traj.grid().clone();
    let v: Vec<Vec<f64>> = traj
        .slices
        .iter()
        .map(|u| u.dot(u).expect("same grid"))
        .collect();
    let mut out = Vec::with_capacity(traj.len() - 2);
    for j in 1..traj.len() - 1 {
        let minus_lap_v = apply_scalar(&grid, MultiplierSpec::FractionalLaplacian { s: 2.0 }, &v[j])?;
        let gsq = grad_squared(&traj.slices[j])?;
        let mut resid = vec![0.0; grid.len()];
        for k in 0..grid.len() {
            let dv_dt = (v[j + 1][k] - v[j - 1][k]) / (2.0 * delta);
            let source = if with_source { 2.0 * eps * gsq[k] } else { 0.0 };
            // ∂ₜv − εΔv + 2ε|∇u|², with Δv = −(−Δ)v
            resid[k] = dv_dt + eps * minus_lap_v[k] + source;
        }
        let source_field: Vec<f64> = gsq.iter().map(|g| 2.0 * eps * g).collect();
        let source_norm = grid.l2_norm_physical(&source_field);
        out.push(grid.l2_norm_physical(&resid) / (1.0 + source_norm));
    }
    Ok(out)
}

/// Conclusion of the global maximum principle, measured.
#[derive(Debug, Clone, Serialize)]
pub struct MaxPrincipleReport {
    /// max over stored times and grid points of |u|².
    pub max_v: f64,
    pub time_of_max: f64,
    pub position_of_max: f64,
    /// 1 + tol::MAX_PRINCIPLE_BASE + tol::MAX_PRINCIPLE_DT2·dt².
    pub envelope: f64,
    pub pass: bool,
}

pub fn max_principle_report(traj: &Trajectory) -> MaxPrincipleReport {
    let mut max_v = f64::MIN;
    let mut t_at = 0.0;
    let mut x_at = 0.0;
    for (j, u) in traj.slices.iter().enumerate() {
        for k in 0..u.len() {
            let v = u.at(k);
            let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            if n2 > max_v {
                max_v = n2;
                t_at = traj.times[j];
                x_at = u.grid().position(k);
            }
        }
    }
    let dt = traj.config.dt;
    let envelope = 1.0 + tol::MAX_PRINCIPLE_BASE + tol::MAX_PRINCIPLE_DT2 * dt * dt;
    MaxPrincipleReport {
        max_v,
        time_of_max: t_at,
        position_of_max: x_at,
        envelope,
        pass: max_v <= envelope,
    }
}

/// Per-time max |u(t,x) − Q| over the far region |x − x₀| > R (periodic
/// distance). R must stay inside the half-box.
pub fn far_field_report(
    traj: &Trajectory,
    q: [f64; 3],
    center: f64,
    radius: f64,
) -> Result<Vec<f64>> {
    let grid = traj.grid();
    let l = grid.box_length();
    if !(radius > 0.0 && radius < l / 2.0) {
        return Err(HwmError::domain(format!(
            "far-field radius {radius} must lie inside the half-box {}",
            l / 2.0
        )));
    }
    let far_idx: Vec<usize> = grid
        .positions()
        .iter()
        .enumerate()
        .filter(|(_, &x)| {
            let mut d = (x - center).abs();
            d = d.min(l - d);
            d > radius
        })
        .map(|(j, _)| j)
        .collect();
    Ok(traj
        .slices
        .iter()
        .map(|u| {
            far_idx
                .iter()
                .map(|&j| {
                    let v = u.at(j);
                    let d = [v[0] - q[0], v[1] - q[1], v[2] - q[2]];
                    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
                })
                .fold(0.0f64, f64::max)
        })
        .collect())
}

/// ‖P_{≥N}u‖_{L²} of one slice, by direct spectral sum.
pub fn tail_l2(u: &VectorField3, cutoff: f64) -> Result<f64> {
    let grid = u.grid();
    MultiplierSpec::LpHigh { cutoff }.validate(grid)?;
    let l = grid.box_length();
    let mut acc = 0.0;
    for s in u.spectra().iter() {
        for (j, c) in s.iter().enumerate() {
            if grid.wavenumber(j).abs() >= cutoff {
                acc += c.norm_sqr();
            }
        }
    }
    Ok((l * acc).sqrt())
}

/// ‖P_{≥N}u(t)‖_{L²} per time, one series per cutoff.
pub fn tail_norm(traj: &Trajectory, cutoffs: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    cutoffs
        .iter()
        .map(|&n| {
            let series = traj
                .slices
                .iter()
                .map(|u| tail_l2(u, n))
                .collect::<Result<Vec<f64>>>()?;
            Ok((n, series))
        })
        .collect()
}

/// Verify the sharp-cutoff Chebyshev bound ‖P_{≥N}u‖ ≤ N^{−1/2}‖u‖_{Ḣ^{1/2}}
/// on every slice; returns the worst signed slack (negative means the bound
/// holds with room, positive is a violation).
pub fn tail_bound_worst_slack(traj: &Trajectory, cutoffs: &[f64]) -> Result<f64> {
    let mut worst = f64::MIN;
    for &n in cutoffs {
        for u in &traj.slices {
            let lhs = tail_l2(u, n)?;
            let rhs = n.powf(-0.5) * u.hs_norm(0.5);
            worst = worst.max(lhs - rhs);
        }
    }
    Ok(worst)
}

/// ‖(−Δ)^{1/4}(u × φ) − ((−Δ)^{1/4}u) × φ‖_{L²}: how far the multiplier is
/// from commuting with pointwise multiplication by φ.
pub fn commutator_norm(u: &VectorField3, phi: &VectorField3) -> Result<f64> {
    let quarter = MultiplierSpec::quarter_laplacian();
    let a = apply_multiplier(u.grid(), quarter, &u.cross(phi)?)?;
    let b = apply_multiplier(u.grid(), quarter, u)?.cross(phi)?;
    Ok(a.sub(&b)?.l2_norm())
}

/// Commutator norms of the high-frequency pieces P_{≥N}u against a fixed
/// smooth φ, plus the fitted log–log exponent over the usable rungs.
/// Rungs whose value sits at the floor (1e−13 of the first rung) are
/// excluded from the fit; if fewer than 3 rungs remain the tail is already
/// numerically empty and the exponent is reported as −∞.
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorLadder {
    pub cutoffs: Vec<f64>,
    pub values: Vec<f64>,
    pub exponent: f64,
}

pub fn commutator_ladder(
    u: &VectorField3,
    phi: &VectorField3,
    cutoffs: &[f64],
) -> Result<CommutatorLadder> {
    let mut values = Vec::with_capacity(cutoffs.len());
    for &n in cutoffs {
        let tail = apply_multiplier(u.grid(), MultiplierSpec::LpHigh { cutoff: n }, u)?;
        values.push(commutator_norm(&tail, phi)?);
    }
    let floor = values.first().copied().unwrap_or(0.0) * 1e-13;
    let pts: Vec<(f64, f64)> = cutoffs
        .iter()
        .zip(values.iter())
        .filter(|&(_, &v)| v > floor && v > 0.0)
        .map(|(&n, &v)| (n.ln(), v.ln()))
        .collect();
    let exponent = if pts.len() < 3 {
        f64::NEG_INFINITY
    } else {
        least_squares_slope(&pts)
    };
    Ok(CommutatorLadder {
        cutoffs: cutoffs.to_vec(),
        values,
        exponent,
    })
}

/// L²_{t,x} norms of the discrete time derivative (forward differences on
/// the stored stride): the P_{<N}-projected norm and the unprojected one.
/// The projected norm is the quantity that stays bounded as ε shrinks.
pub fn time_derivative_norms(traj: &Trajectory, cutoff: f64) -> Result<(f64, f64)> {
    if traj.len() < 2 {
        return Err(HwmError::domain("need at least 2 slices"));
    }
    let delta = traj.output_dt();
    let mut low_sq = 0.0;
    let mut full_sq = 0.0;
    for w in traj.slices.windows(2) {
        let d = w[1].sub(&w[0])?.scale(1.0 / delta);
        full_sq += delta * d.l2_norm().powi(2);
        let low = apply_multiplier(d.grid(), MultiplierSpec::LpLow { cutoff }, &d)?;
        low_sq += delta * low.l2_norm().powi(2);
    }
    Ok((low_sq.sqrt(), full_sq.sqrt()))
}

/// Options for assembling the standard per-run series.
#[derive(Debug, Clone)]
pub struct SeriesOptions {
    pub tail_cutoffs: Vec<f64>,
    /// Far-field monitor (Q, center, radius); skipped when `None`.
    pub far_field: Option<([f64; 3], f64, f64)>,
}

pub fn compute_series(traj: &Trajectory, opts: &SeriesOptions) -> Result<DiagnosticsSeries> {
    let far_field = match opts.far_field {
        Some((q, x0, r)) => far_field_report(traj, q, x0, r)?,
        None => vec![f64::NAN; traj.len()],
    };
    Ok(DiagnosticsSeries {
        times: traj.times.clone(),
        e_h1: h1_energy(traj),
        e_c: critical_energy(traj),
        sphere_dev: traj.slices.iter().map(|u| u.sphere_deviation()).collect(),
        far_field,
        tail: tail_norm(traj, &opts.tail_cutoffs)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_band_limited, VectorField3};
    use crate::grid::SpectralGrid;
    use crate::initial::{make_initial, InitialDataSpec};
    use crate::solver::{evolve, SolverConfig};
    use std::sync::Arc;

    fn constant_traj() -> Trajectory {
        let g = SpectralGrid::new(16.0, 64).unwrap();
        let q = VectorField3::constant(g, [0.0, 0.0, 1.0]);
        let cfg = SolverConfig::new(1e-2, 0.1, 1e-2);
        evolve(&q, &cfg).unwrap()
    }

    fn bump_traj() -> Trajectory {
        let g = SpectralGrid::new(16.0, 256).unwrap();
        let u0 = make_initial(&g, &InitialDataSpec::reference_bump()).unwrap();
        let mut cfg = SolverConfig::new(1e-2, 0.2, 1e-3);
        cfg.output_stride = 20;
        evolve(&u0, &cfg).unwrap()
    }

    #[test]
    fn constant_trajectory_has_trivial_diagnostics() {
        let traj = constant_traj();
        assert!(critical_energy(&traj).iter().all(|&e| e == 0.0));
        assert!(h1_energy(&traj).iter().all(|&e| e == 0.0));
        let rep = max_principle_report(&traj);
        assert_eq!(rep.max_v, 1.0);
        assert!(rep.pass);
        assert!(energy_identity_residual(&traj)
            .unwrap()
            .iter()
            .all(|&r| r == 0.0));
        assert!(constraint_equation_residual(&traj)
            .unwrap()
            .iter()
            .all(|&r| r == 0.0));
        let ff = far_field_report(&traj, [0.0, 0.0, 1.0], 0.0, 2.0).unwrap();
        assert!(ff.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn critical_energy_decreases_on_bump_run() {
        let traj = bump_traj();
        let (ok, worst) = critical_energy_monotone(&traj);
        assert!(ok, "worst upward step {worst}");
        let ec = critical_energy(&traj);
        assert!(ec.last().unwrap() < ec.first().unwrap());
    }

    #[test]
    fn max_principle_holds_on_bump_run() {
        let traj = bump_traj();
        let rep = max_principle_report(&traj);
        assert!(rep.pass, "max v {} envelope {}", rep.max_v, rep.envelope);
    }

    #[test]
    fn far_field_shrinks_with_radius() {
        // max over a subset cannot exceed max over the superset
        let traj = bump_traj();
        let q = [0.0, 0.0, 1.0];
        let r = 2.0;
        let a = far_field_report(&traj, q, 0.0, r).unwrap();
        let b = far_field_report(&traj, q, 0.0, 1.5 * r).unwrap();
        let c = far_field_report(&traj, q, 0.0, 2.0 * r).unwrap();
        for j in 0..a.len() {
            assert!(b[j] <= a[j] + 1e-15);
            assert!(c[j] <= b[j] + 1e-15);
        }
        // at t = 0 the data is exactly Q beyond the support
        assert_eq!(a[0], 0.0);
        assert!(far_field_report(&traj, q, 0.0, 8.1).is_err());
    }

    #[test]
    fn tail_bound_is_exact_with_equality_on_single_mode() {
        let g = SpectralGrid::new(2.0 * std::f64::consts::PI, 64).unwrap();
        // single mode at |ξ| = 4: equality in the Chebyshev bound at N = 4
        let u = VectorField3::from_fn(g.clone(), |x| [(4.0 * x).cos(), 0.0, 0.0]);
        let lhs = tail_l2(&u, 4.0).unwrap();
        let rhs = 4.0f64.powf(-0.5) * u.hs_norm(0.5);
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        // band-limited below N: tail at the FFT roundoff floor
        assert!(tail_l2(&u, 4.5).unwrap() <= 1e-13);
        // above Nyquist: domain error
        assert!(tail_l2(&u, g.max_wavenumber() * 1.01).is_err());
    }

    #[test]
    fn tail_bound_holds_on_run() {
        let traj = bump_traj();
        let slack = tail_bound_worst_slack(&traj, &[8.0, 16.0, 32.0]).unwrap();
        assert!(slack <= 0.0, "worst slack {slack}");
    }

    #[test]
    fn tail_matches_projection_route() {
        let g = SpectralGrid::new(16.0, 128).unwrap();
        let u = random_band_limited(&g, 40, 5);
        let direct = tail_l2(&u, 7.0).unwrap();
        let via_proj = apply_multiplier(&g, MultiplierSpec::LpHigh { cutoff: 7.0 }, &u)
            .unwrap()
            .l2_norm();
        assert!((direct - via_proj).abs() <= 1e-10 * direct.max(1.0));
    }

    #[test]
    fn commutator_vanishes_for_constant_phi_and_scales_linearly() {
        let g: Arc<SpectralGrid> = SpectralGrid::new(16.0, 128).unwrap();
        let u = random_band_limited(&g, 30, 17);
        let c = VectorField3::constant(g.clone(), [0.4, -0.2, 0.1]);
        assert!(commutator_norm(&u, &c).unwrap() <= 1e-13);

        let phi = random_band_limited(&g, 10, 23);
        let v1 = commutator_norm(&u, &phi).unwrap();
        let v2 = commutator_norm(&u, &phi.scale(2.0)).unwrap();
        assert!((v2 - 2.0 * v1).abs() <= 1e-12 * v1.max(1.0));
    }

    #[test]
    fn ablated_constraint_residual_equals_source_magnitude() {
        let traj = bump_traj();
        let full = constraint_equation_residual(&traj).unwrap();
        let ablated = constraint_equation_residual_no_source(&traj).unwrap();
        // R' = R − source ⇒ | ‖R'‖ − ‖source‖ | ≤ ‖R‖ (triangle inequality),
        // all normalized by the same 1 + ‖source‖
        let eps = traj.config.eps;
        for j in 1..traj.len() - 1 {
            let u = &traj.slices[j];
            let gsq = grad_squared(u).unwrap();
            let src: Vec<f64> = gsq.iter().map(|g| 2.0 * eps * g).collect();
            let src_norm = u.grid().l2_norm_physical(&src);
            let normalized_src = src_norm / (1.0 + src_norm);
            let i = j - 1;
            assert!(
                (ablated[i] - normalized_src).abs() <= full[i] + 1e-14,
                "slice {j}: ablated {} vs source {} (full {})",
                ablated[i],
                normalized_src,
                full[i]
            );
            assert!(ablated[i] > 10.0 * full[i]);
        }
    }

    #[test]
    fn series_csv_has_header_and_rows() {
        let traj = constant_traj();
        let opts = SeriesOptions {
            tail_cutoffs: vec![4.0, 8.0],
            far_field: Some(([0.0, 0.0, 1.0], 0.0, 2.0)),
        };
        let s = compute_series(&traj, &opts).unwrap();
        let csv = s.to_csv();
        let mut lines = csv.lines();
        let head = lines.next().unwrap();
        assert!(head.starts_with("time[tu],e_h1[-]"));
        assert!(head.contains("tail_N4"));
        assert_eq!(lines.count(), traj.len());
    }
}
