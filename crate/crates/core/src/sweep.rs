//! The vanishing-viscosity program: run a decreasing ε-ladder from shared
//! data on a shared grid, measure adjacent-rung Cauchy differences in
//! L²_{t,x} over nested space-time windows, split the differences at the
//! diagonal frequency pairing N_j ≈ 1/ε_j, and certify the limit candidate
//! by trend evidence.
//!
//! Subsequence extraction is replaced by a deterministic geometric ladder;
//! the diagonal pairing couples each rung's frequency cutoff to its
//! viscosity. Windows are nested index ranges on the one fixed grid, so
//! all rungs live in a single discrete space and the window norms are
//! monotone under inclusion by construction.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics;
use crate::error::{HwmError, Result};
use crate::field::Trajectory;
use crate::grid::SpectralGrid;
use crate::initial::{least_squares_line, make_initial, InitialDataSpec};
use crate::solver::{evolve, Integrator, SolverConfig};
use crate::tol;
use crate::weak::{battery, evaluate_battery, BatteryRow};

/// Everything one sweep needs. All rungs share the grid, data, dt and
/// integrator; only ε varies.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    /// Strictly decreasing viscosities, at least 4 for trend fits.
    pub eps_ladder: Vec<f64>,
    /// Per-rung solver settings; the `eps` field is overwritten per rung.
    pub base: SolverConfig,
    pub data: InitialDataSpec,
    pub box_length: f64,
    pub num_points: usize,
    /// Number of nested space-time windows (fractions k/n of the horizon
    /// and of the box around the data center).
    pub windows: usize,
    /// Fixed cutoff for the low-frequency time-regularity table.
    pub time_reg_cutoff: f64,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        if self.eps_ladder.len() < 4 {
            return Err(HwmError::domain(
                "eps ladder needs at least 4 rungs for trend fits",
            ));
        }
        if self.eps_ladder.len() > 64 {
            return Err(HwmError::domain(
                "eps ladder exceeds the compute budget (64 rungs)",
            ));
        }
        if !self
            .eps_ladder
            .windows(2)
            .all(|w| w[1] < w[0] && w[1] > 0.0)
        {
            return Err(HwmError::domain(
                "eps ladder must be strictly decreasing and positive",
            ));
        }
        if self.windows == 0 || self.windows > 16 {
            return Err(HwmError::domain("window count must lie in 1..=16"));
        }
        let grid = SpectralGrid::new(self.box_length, self.num_points)?;
        self.data.validate(&grid)?;
        for &eps in &self.eps_ladder {
            let cfg = SolverConfig {
                eps,
                ..self.base
            };
            cfg.validate(&grid)?;
        }
        if self.time_reg_cutoff > grid.max_wavenumber() {
            return Err(HwmError::domain(
                "time-regularity cutoff exceeds the Nyquist wavenumber",
            ));
        }
        Ok(())
    }

    /// Diagonal pairing N_j = round(1/ε_j), capped at the Nyquist
    /// wavenumber so the projection stays admissible on the shared grid.
    pub fn diagonal_pairing(&self) -> Vec<f64> {
        let nyquist = std::f64::consts::PI * self.num_points as f64 / self.box_length;
        self.eps_ladder
            .iter()
            .map(|&e| (1.0 / e).round().min(nyquist.floor()))
            .collect()
    }
}

/// Identifies the flow family of a rung; a sweep mixing families (for
/// example a projected-sphere variant among plain rungs) is not a
/// vanishing-viscosity family and is rejected by the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowFingerprint {
    pub project_to_sphere: bool,
    pub dealias: bool,
    pub integrator: Integrator,
    pub box_length: f64,
    pub num_points: usize,
    pub dt: f64,
    pub t_final: f64,
    pub data: InitialDataSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct RungSummary {
    pub eps: f64,
    /// Diagonal frequency pairing N_j.
    pub n_pairing: f64,
    pub sphere_dev_max: f64,
    pub ec_initial: f64,
    pub ec_final: f64,
    pub hs12_initial: f64,
    pub hs12_max: f64,
    pub max_principle_v: f64,
    pub max_principle_pass: bool,
    /// ‖P_{<N}∂ₜu‖ and ‖∂ₜu‖ in L²_{t,x} (discrete time differences).
    pub dt_norm_low: f64,
    pub dt_norm_full: f64,
    pub battery: Vec<BatteryRow>,
    pub fingerprint: FlowFingerprint,
}

/// One L²_{t,x} Cauchy difference of an adjacent rung pair on one window.
#[derive(Debug, Clone, Serialize)]
pub struct CauchyCell {
    pub pair: usize,
    pub window: usize,
    /// Fractions (time, space) of the horizon/box this window covers.
    pub time_fraction: f64,
    pub space_fraction: f64,
    pub value: f64,
}

/// Frequency split of one adjacent difference at the diagonal pairing.
#[derive(Debug, Clone, Serialize)]
pub struct TailSplitRow {
    pub pair: usize,
    pub cutoff: f64,
    /// ‖P_{≥N}(u_j − u_{j+1})‖_{L²_{t,x}} (full box, full horizon).
    pub tail_value: f64,
    /// N^{−1/2}·‖u_j − u_{j+1}‖_{L²_t Ḣ^{1/2}}, the exact Chebyshev bound.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepVerdict {
    pub pass: bool,
    pub reasons: Vec<String>,
    /// Slope of ln(difference) against ln(1/ε) per window; negative means
    /// the differences shrink as ε → 0. NaN when trivially zero.
    pub cauchy_slopes: Vec<f64>,
    pub trivially_convergent: bool,
    pub weak_decreasing_count: usize,
    pub sphere_decreasing: bool,
    /// Least-squares line of max||u|²−1| against ε over the rungs.
    pub sphere_fit_slope: f64,
    pub sphere_fit_intercept: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub eps_ladder: Vec<f64>,
    pub window_fractions: Vec<f64>,
    pub rungs: Vec<RungSummary>,
    pub cauchy: Vec<CauchyCell>,
    pub tail_split: Vec<TailSplitRow>,
    pub verdict: SweepVerdict,
    /// Populated when a rung aborted; the report is then partial.
    pub aborted: Option<String>,
}

fn rung_summary(
    plan: &SweepPlan,
    eps: f64,
    n_pairing: f64,
    traj: &Trajectory,
) -> Result<RungSummary> {
    let ec = diagnostics::critical_energy(traj);
    let hs12: Vec<f64> = traj.slices.iter().map(|u| u.hs_norm(0.5)).collect();
    let mp = diagnostics::max_principle_report(traj);
    let (low, full) = diagnostics::time_derivative_norms(traj, plan.time_reg_cutoff)?;
    let batt = battery(traj.grid(), plan.base.t_final)?;
    let rows = evaluate_battery(traj, &batt)?;
    Ok(RungSummary {
        eps,
        n_pairing,
        sphere_dev_max: traj
            .slices
            .iter()
            .map(|u| u.sphere_deviation())
            .fold(0.0, f64::max),
        ec_initial: ec[0],
        ec_final: *ec.last().unwrap(),
        hs12_initial: hs12[0],
        hs12_max: hs12.iter().fold(0.0f64, |a, &b| a.max(b)),
        max_principle_v: mp.max_v,
        max_principle_pass: mp.pass,
        dt_norm_low: low,
        dt_norm_full: full,
        battery: rows,
        fingerprint: FlowFingerprint {
            project_to_sphere: traj.config.project_to_sphere,
            dealias: traj.config.dealias,
            integrator: traj.config.integrator,
            box_length: plan.box_length,
            num_points: plan.num_points,
            dt: traj.config.dt,
            t_final: traj.config.t_final,
            data: plan.data,
        },
    })
}

/// L²_{t,x} norm of the slice-wise difference of two trajectories over a
/// window: uniform Riemann weights in time, the grid weight h in space,
/// restricted to stored times ≤ tf·T and periodic distance ≤ sf·L/2 from
/// the data center. Identical weights across windows make the norms
/// monotone under window inclusion, exactly.
fn cauchy_window_norm(
    a: &Trajectory,
    b: &Trajectory,
    center: f64,
    time_fraction: f64,
    space_fraction: f64,
) -> Result<f64> {
    let grid = a.grid();
    let l = grid.box_length();
    let h = grid.spacing();
    let delta = a.output_dt();
    let t_max = time_fraction * *a.times.last().unwrap();
    let idx: Vec<usize> = grid
        .positions()
        .iter()
        .enumerate()
        .filter(|(_, &x)| {
            let mut d = (x - center).abs();
            d = d.min(l - d);
            d <= space_fraction * l / 2.0
        })
        .map(|(j, _)| j)
        .collect();
    let mut acc = 0.0;
    for (j, &t) in a.times.iter().enumerate() {
        if t > t_max + 1e-12 {
            break;
        }
        let da = a.slices[j].sub(&b.slices[j])?;
        let mut slice_sq = 0.0;
        for &k in &idx {
            let v = da.at(k);
            slice_sq += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        }
        acc += delta * h * slice_sq;
    }
    Ok(acc.sqrt())
}

/// ‖P_{≥N}(a − b)‖ and its Chebyshev bound over the full horizon.
fn tail_split_row(a: &Trajectory, b: &Trajectory, pair: usize, cutoff: f64) -> Result<TailSplitRow> {
    let delta = a.output_dt();
    let mut tail_sq = 0.0;
    let mut h12_sq = 0.0;
    for (ua, ub) in a.slices.iter().zip(b.slices.iter()) {
        let d = ua.sub(ub)?;
        tail_sq += delta * diagnostics::tail_l2(&d, cutoff)?.powi(2);
        h12_sq += delta * d.hs_norm(0.5).powi(2);
    }
    let tail_value = tail_sq.sqrt();
    let bound = (h12_sq / cutoff).sqrt();
    Ok(TailSplitRow {
        pair,
        cutoff,
        tail_value,
        bound,
        holds: tail_value <= bound * (1.0 + 1e-12),
    })
}

/// Run every rung (in parallel), assemble the report, and attach the
/// verdict. A rung blow-up aborts the cross-rung analyses and the report
/// comes back partial with the abort reason recorded.
pub fn run_viscosity_sweep(plan: &SweepPlan) -> Result<SweepReport> {
    plan.validate()?;
    let grid = SpectralGrid::new(plan.box_length, plan.num_points)?;
    let u0 = make_initial(&grid, &plan.data)?;
    let pairing = plan.diagonal_pairing();

    let results: Vec<Result<(Trajectory, RungSummary)>> = plan
        .eps_ladder
        .par_iter()
        .zip(pairing.par_iter())
        .map(|(&eps, &n_pair)| {
            let cfg = SolverConfig { eps, ..plan.base };
            let traj = evolve(&u0, &cfg)?;
            let summary = rung_summary(plan, eps, n_pair, &traj)?;
            Ok((traj, summary))
        })
        .collect();

    let window_fractions: Vec<f64> = (1..=plan.windows)
        .map(|k| k as f64 / plan.windows as f64)
        .collect();

    let mut rungs = Vec::new();
    let mut trajs = Vec::new();
    let mut aborted = None;
    for (j, r) in results.into_iter().enumerate() {
        match r {
            Ok((t, s)) => {
                trajs.push(t);
                rungs.push(s);
            }
            Err(e) => {
                aborted = Some(format!("rung eps = {}: {e}", plan.eps_ladder[j]));
                break;
            }
        }
    }

    if let Some(reason) = aborted {
        return Ok(SweepReport {
            eps_ladder: plan.eps_ladder.clone(),
            window_fractions,
            rungs,
            cauchy: Vec::new(),
            tail_split: Vec::new(),
            verdict: SweepVerdict {
                pass: false,
                reasons: vec![format!("sweep aborted: {reason}")],
                cauchy_slopes: Vec::new(),
                trivially_convergent: false,
                weak_decreasing_count: 0,
                sphere_decreasing: false,
                sphere_fit_slope: f64::NAN,
                sphere_fit_intercept: f64::NAN,
            },
            aborted: Some(reason),
        });
    }

    let mut cauchy = Vec::new();
    for pair in 0..trajs.len() - 1 {
        for (w, &(mut tf)) in window_fractions.iter().enumerate().map(|(i, f)| (i, f)) {
            let sf = tf;
            if !(0.0..=1.0).contains(&tf) {
                tf = 1.0;
            }
            let value = cauchy_window_norm(
                &trajs[pair],
                &trajs[pair + 1],
                plan.data.center,
                tf,
                sf,
            )?;
            cauchy.push(CauchyCell {
                pair,
                window: w,
                time_fraction: tf,
                space_fraction: sf,
                value,
            });
        }
    }

    let mut tail_split = Vec::new();
    for pair in 0..trajs.len() - 1 {
        tail_split.push(tail_split_row(
            &trajs[pair],
            &trajs[pair + 1],
            pair,
            pairing[pair],
        )?);
    }

    let mut report = SweepReport {
        eps_ladder: plan.eps_ladder.clone(),
        window_fractions,
        rungs,
        cauchy,
        tail_split,
        verdict: SweepVerdict {
            pass: false,
            reasons: Vec::new(),
            cauchy_slopes: Vec::new(),
            trivially_convergent: false,
            weak_decreasing_count: 0,
            sphere_decreasing: false,
            sphere_fit_slope: f64::NAN,
            sphere_fit_intercept: f64::NAN,
        },
        aborted: None,
    };
    report.verdict = certify_limit(&report);
    Ok(report)
}

/// Trend fit of the adjacent Cauchy differences on one window:
/// slope of ln(difference) against ln(1/ε). Negative slope = differences
/// shrink as ε → 0. Returns NaN when every difference is zero.
pub fn cauchy_trend(report: &SweepReport, window: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> = report
        .cauchy
        .iter()
        .filter(|c| c.window == window && c.value > 0.0)
        .map(|c| ((1.0 / report.eps_ladder[c.pair]).ln(), c.value.ln()))
        .collect();
    if pts.is_empty() {
        return Ok(f64::NAN);
    }
    if pts.len() < 3 {
        return Err(HwmError::domain(
            "trend fit needs at least 3 adjacent pairs",
        ));
    }
    Ok(crate::initial::least_squares_slope(&pts))
}

/// The verdict: (a) negative Cauchy trend on every window, (b) the
/// half-wave weak residual decreasing along the ladder for at least
/// `tol::WEAK_BATTERY_MIN_DECREASING` of the 27 battery members, (c) the
/// sphere certificate decreasing along the ladder, and one flow family
/// across all rungs. The linear-in-ε envelope of the certificate is
/// fitted and recorded alongside.
pub fn certify_limit(report: &SweepReport) -> SweepVerdict {
    let mut reasons = Vec::new();

    // one flow family
    let consistent = report
        .rungs
        .windows(2)
        .all(|w| w[0].fingerprint == w[1].fingerprint);
    if !consistent {
        reasons.push("inconsistent flow family across rungs".to_string());
    }

    // (a) Cauchy trend per window
    let mut slopes = Vec::new();
    let mut trivially_convergent = false;
    let n_windows = report.window_fractions.len();
    if report.cauchy.is_empty() {
        reasons.push("no cauchy data".to_string());
    }
    for w in 0..n_windows {
        match cauchy_trend(report, w) {
            Ok(s) if s.is_nan() => {
                slopes.push(f64::NAN);
                trivially_convergent = true;
            }
            Ok(s) => {
                slopes.push(s);
                if s >= 0.0 {
                    reasons.push(format!("cauchy differences do not shrink on window {w}"));
                }
            }
            Err(e) => reasons.push(format!("window {w}: {e}")),
        }
    }

    // (b) battery decrease count
    let n_phi = report.rungs.first().map(|r| r.battery.len()).unwrap_or(0);
    let mut decreasing = 0;
    for phi in 0..n_phi {
        let vals: Vec<f64> = report
            .rungs
            .iter()
            .map(|r| r.battery[phi].residual_halfwave)
            .collect();
        if vals.windows(2).all(|w| w[1] < w[0]) || vals.iter().all(|&v| v <= 1e-14) {
            decreasing += 1;
        }
    }
    if n_phi > 0 && decreasing < tol::WEAK_BATTERY_MIN_DECREASING {
        reasons.push(format!(
            "half-wave weak residual decreases for only {decreasing}/{n_phi} test functions"
        ));
    }

    // (c) sphere certificate decreasing, plus the recorded envelope fit
    let devs: Vec<f64> = report.rungs.iter().map(|r| r.sphere_dev_max).collect();
    let sphere_decreasing =
        devs.windows(2).all(|w| w[1] < w[0]) || devs.iter().all(|&v| v == 0.0);
    if !sphere_decreasing {
        reasons.push("sphere certificate does not decrease along the ladder".to_string());
    }
    let pts: Vec<(f64, f64)> = report
        .eps_ladder
        .iter()
        .zip(devs.iter())
        .map(|(&e, &d)| (e, d))
        .collect();
    let (intercept, slope) = if pts.len() >= 2 {
        least_squares_line(&pts)
    } else {
        (f64::NAN, f64::NAN)
    };

    SweepVerdict {
        pass: reasons.is_empty(),
        reasons,
        cauchy_slopes: slopes,
        trivially_convergent,
        weak_decreasing_count: decreasing,
        sphere_decreasing,
        sphere_fit_slope: slope,
        sphere_fit_intercept: intercept,
    }
}

// ── CSV emitters ────────────────────────────────────────────────────────

pub fn rungs_csv(report: &SweepReport) -> String {
    let mut out = String::from(
        "eps[-],n_pairing[1/len],sphere_dev_max[-],ec_initial[-],ec_final[-],\
         hs12_initial[-],hs12_max[-],max_principle_v[-],dt_norm_low[-],dt_norm_full[-]\n",
    );
    for r in &report.rungs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.eps,
            r.n_pairing,
            r.sphere_dev_max,
            r.ec_initial,
            r.ec_final,
            r.hs12_initial,
            r.hs12_max,
            r.max_principle_v,
            r.dt_norm_low,
            r.dt_norm_full
        ));
    }
    out
}

pub fn cauchy_csv(report: &SweepReport) -> String {
    let mut out = String::from("pair[idx],window[idx],time_fraction[-],space_fraction[-],l2tx_difference[-]\n");
    for c in &report.cauchy {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.pair, c.window, c.time_fraction, c.space_fraction, c.value
        ));
    }
    out
}

pub fn battery_matrix_csv(report: &SweepReport) -> String {
    let mut out =
        String::from("eps[-],phi[label],chi_initial[bool],residual_regularized[-],residual_halfwave[-]\n");
    for r in &report.rungs {
        for row in &r.battery {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.eps, row.label, row.chi_initial, row.residual_regularized, row.residual_halfwave
            ));
        }
    }
    out
}

pub fn tail_split_csv(report: &SweepReport) -> String {
    let mut out = String::from("pair[idx],cutoff[1/len],tail_l2tx[-],chebyshev_bound[-],holds[bool]\n");
    for t in &report.tail_split {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t.pair, t.cutoff, t.tail_value, t.bound, t.holds
        ));
    }
    out
}
