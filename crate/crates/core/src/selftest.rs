//! The operator property suite behind `selftest`: every exact identity the
//! spectral layer promises, checked on seeded pseudo-random fields in a few
//! seconds. Pass/fail per property, no files written.

use crate::diagnostics;
use crate::field::{random_band_limited, random_sphere_valued, VectorField3};
use crate::grid::SpectralGrid;
use crate::multiplier::{apply_multiplier, compose_check, MultiplierSpec};
use crate::snapshot;
use crate::solver;
use crate::tol;
use crate::weak;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

/// Run the whole property suite with a base seed. Deterministic.
pub fn run(seed: u64) -> crate::error::Result<SelftestReport> {
    let mut checks = Vec::new();
    let grid = SpectralGrid::new(16.0, 256)?;
    let band = grid.len() / 3;

    // transform round trip
    {
        let f = random_band_limited(&grid, band, seed);
        let mut worst = 0.0f64;
        for i in 0..3 {
            let back = grid.inverse(&grid.forward(f.component(i)))?;
            for (a, b) in f.component(i).iter().zip(back.iter()) {
                worst = worst.max((a - b).abs());
            }
        }
        let scale = f.linf_norm().max(1.0);
        checks.push(check(
            "transform_round_trip",
            worst <= tol::ROUND_TRIP * scale,
            format!("max abs error {worst:.3e}"),
        ));
    }

    // Plancherel
    {
        let mut worst = 0.0f64;
        for k in 0..8 {
            let f = random_band_limited(&grid, band, seed + 10 + k);
            for i in 0..3 {
                let phys = grid.l2_norm_physical(f.component(i));
                let spec = grid.l2_norm_spectral(&grid.forward(f.component(i)));
                worst = worst.max((phys - spec).abs() / phys.max(1e-30));
            }
        }
        checks.push(check(
            "plancherel",
            worst <= tol::PLANCHEREL,
            format!("worst relative gap {worst:.3e}"),
        ));
    }

    // composition identity on 100 random band-limited fields
    {
        let mut worst = 0.0f64;
        for k in 0..100 {
            let f = random_band_limited(&grid, band, seed + 100 + k);
            worst = worst.max(compose_check(&grid, &f)?);
        }
        checks.push(check(
            "hilbert_derivative_composition",
            worst <= tol::COMPOSE_RESIDUAL,
            format!("worst residual {worst:.3e} over 100 fields"),
        ));
    }

    // repeated quarter-Laplacian equals half-Laplacian, per mode
    {
        let f = random_band_limited(&grid, band, seed + 300);
        let twice = apply_multiplier(
            &grid,
            MultiplierSpec::quarter_laplacian(),
            &apply_multiplier(&grid, MultiplierSpec::quarter_laplacian(), &f)?,
        )?;
        let once = apply_multiplier(&grid, MultiplierSpec::half_laplacian(), &f)?;
        let mut worst = 0.0f64;
        for i in 0..3 {
            let a = grid.forward(twice.component(i));
            let b = grid.forward(once.component(i));
            for (x, y) in a.iter().zip(b.iter()) {
                worst = worst.max((x - y).norm() / (1.0 + y.norm()));
            }
        }
        checks.push(check(
            "double_quarter_equals_half",
            worst <= tol::PER_MODE,
            format!("worst per-mode gap {worst:.3e}"),
        ));
    }

    // heat semigroup property, per mode
    {
        let eps = 0.07;
        let g1 = MultiplierSpec::Heat { eps, t: 0.31 }.gains(&grid)?;
        let g2 = MultiplierSpec::Heat { eps, t: 0.58 }.gains(&grid)?;
        let g3 = MultiplierSpec::Heat { eps, t: 0.89 }.gains(&grid)?;
        let worst = g1
            .iter()
            .zip(g2.iter())
            .zip(g3.iter())
            .map(|((a, b), c)| (a * b - c).norm())
            .fold(0.0f64, f64::max);
        checks.push(check(
            "heat_semigroup",
            worst <= tol::PER_MODE,
            format!("worst per-mode gap {worst:.3e}"),
        ));
    }

    // LP projections: 0/1 gains, exact partition, exact Chebyshev tail bound
    {
        let n = 11.0;
        let low = MultiplierSpec::LpLow { cutoff: n }.gains(&grid)?;
        let high = MultiplierSpec::LpHigh { cutoff: n }.gains(&grid)?;
        let partition = low
            .iter()
            .zip(high.iter())
            .all(|(l, h)| (l.re == 0.0 || l.re == 1.0) && (l + h).re == 1.0 && l.im == 0.0);
        let mut worst_slack = f64::MIN;
        for k in 0..16 {
            let f = random_band_limited(&grid, band, seed + 400 + k);
            let lhs = diagnostics::tail_l2(&f, n)?;
            let rhs = n.powf(-0.5) * f.hs_norm(0.5);
            worst_slack = worst_slack.max(lhs - rhs);
        }
        checks.push(check(
            "lp_partition_and_tail_bound",
            partition && worst_slack <= 0.0,
            format!("partition {partition}, worst tail slack {worst_slack:.3e}"),
        ));
    }

    // cross-product orthogonality and the nonlinearity
    {
        let mut worst = 0.0f64;
        for k in 0..8 {
            let u = random_sphere_valued(&grid, band, seed + 500 + k);
            let nl = solver::nonlinearity(&u)?;
            let scale = (u.linf_norm() * nl.linf_norm()).max(1.0);
            for v in nl.dot(&u)? {
                worst = worst.max(v.abs() / scale);
            }
        }
        checks.push(check(
            "nonlinearity_orthogonal_to_u",
            worst <= tol::ORTHOGONALITY,
            format!("worst normalized dot {worst:.3e}"),
        ));
    }

    // norm homogeneity and the interpolation bound
    {
        let f = random_band_limited(&grid, band, seed + 600);
        let c = -3.7;
        let mut ok = true;
        for s in [0.0, 0.5, 1.0, 1.5] {
            let lhs = f.scale(c).hs_norm(s);
            let rhs = c.abs() * f.hs_norm(s);
            ok &= (lhs - rhs).abs() <= 1e-12 * rhs.max(1.0);
        }
        let interp = f.hs_norm(0.5) <= f.hs_norm(0.0).sqrt() * f.hs_norm(1.0).sqrt() * (1.0 + 1e-12);
        checks.push(check(
            "hs_norm_homogeneity_and_interpolation",
            ok && interp,
            String::new(),
        ));
    }

    // self-adjointness and the pairing reformulation
    {
        let mut worst = 0.0f64;
        for k in 0..8 {
            let u = random_sphere_valued(&grid, band, seed + 700 + k);
            let phi = random_band_limited(&grid, 12, seed + 800 + k);
            let scale = 1.0 + u.hs_norm(0.5).powi(2) * (1.0 + phi.linf_norm());
            worst = worst.max(weak::pairing_identity_check(&u, &phi)? / scale);
        }
        checks.push(check(
            "pairing_reformulation",
            worst <= tol::PAIRING_IDENTITY,
            format!("worst normalized mismatch {worst:.3e}"),
        ));
    }

    // snapshot byte round trip
    {
        let f = random_band_limited(&grid, band, seed + 900);
        let bytes = snapshot::snapshot_bytes(&f);
        let g = snapshot::snapshot_from_bytes(&bytes)?;
        let bit_equal = (0..3).all(|i| {
            f.component(i)
                .iter()
                .zip(g.component(i).iter())
                .all(|(a, b)| a.to_bits() == b.to_bits())
        });
        checks.push(check(
            "snapshot_round_trip",
            bit_equal && bytes.len() == snapshot::snapshot_size(grid.len()),
            format!("{} bytes", bytes.len()),
        ));
    }

    // integrators fix constants; picard converges instantly on constants
    {
        let q = VectorField3::constant(grid.clone(), [0.0, 0.6, 0.8]);
        let cfg = solver::SolverConfig::new(0.05, 1.0, 1e-2);
        let stepped = solver::step(&q, &cfg)?;
        let fixed = (0..q.len()).all(|j| stepped.at(j) == [0.0, 0.6, 0.8]);
        let (point, rep) = solver::picard_local_solve(&q, &cfg)?;
        let picard_ok = rep.converged
            && rep.iterates_kept == 1
            && rep.xt_differences == vec![0.0]
            && (0..point.len()).all(|j| point.at(j) == [0.0, 0.6, 0.8]);
        checks.push(check(
            "constants_are_fixed_points",
            fixed && picard_ok,
            String::new(),
        ));
    }

    Ok(SelftestReport { checks })
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        let report = super::run(42).unwrap();
        for c in &report.checks {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
        assert!(report.checks.len() >= 10);
    }
}
