// temporary measurement harness — deleted before release
use hwm_core::grid::SpectralGrid;
use hwm_core::initial::{least_squares_line, make_initial, DataFamily, InitialDataSpec};
use hwm_core::solver::{evolve, SolverConfig};

#[test]
fn intercept_landscape() {
    let ladder = [1e-1, 5e-2, 2.5e-2, 1.25e-2];
    for family in [DataFamily::GeodesicBump, DataFamily::TwistBump] {
        for ampl in [std::f64::consts::PI, 1.5707963, 0.7853981, 0.4, 0.2] {
            for t_final in [1.0, 0.5, 0.25] {
                let g = SpectralGrid::new(16.0, 512).unwrap();
                let spec = InitialDataSpec {
                    family,
                    amplitude: ampl,
                    ..InitialDataSpec::reference_bump()
                };
                let u0 = make_initial(&g, &spec).unwrap();
                let mut devs = Vec::new();
                for &eps in &ladder {
                    let mut cfg = SolverConfig::new(eps, t_final, 1e-3);
                    cfg.output_stride = 25;
                    let traj = evolve(&u0, &cfg).unwrap();
                    let dev = traj
                        .slices
                        .iter()
                        .map(|s| s.sphere_deviation())
                        .fold(0.0f64, f64::max);
                    devs.push(dev);
                }
                let pts: Vec<(f64, f64)> =
                    ladder.iter().copied().zip(devs.iter().copied()).collect();
                let (intercept, slope) = least_squares_line(&pts);
                println!(
                    "{:?} a={ampl:.4} T={t_final}: devs={:?} slope={slope:.3e} intercept={intercept:+.3e}",
                    family,
                    devs.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>()
                );
            }
        }
    }
}

#[test]
fn battery_decrease_count() {
    let ladder = [1e-1, 5e-2, 2.5e-2, 1.25e-2];
    let g = SpectralGrid::new(16.0, 1024).unwrap();
    let u0 = make_initial(&g, &InitialDataSpec::reference_bump()).unwrap();
    let mut runs = Vec::new();
    for &eps in &ladder {
        let mut cfg = SolverConfig::new(eps, 1.0, 1e-3);
        cfg.output_stride = 10;
        runs.push(evolve(&u0, &cfg).unwrap());
    }
    let batt = hwm_core::weak::battery(&g, 1.0).unwrap();
    let mut decreasing = 0;
    for tf in &batt {
        let vals: Vec<f64> = runs
            .iter()
            .map(|t| hwm_core::weak::weak_residual_halfwave(t, tf).unwrap())
            .collect();
        let dec = vals.windows(2).all(|w| w[1] < w[0]);
        if dec {
            decreasing += 1;
        } else {
            println!("NOT decreasing {}: {:?}", tf.label, vals);
        }
    }
    println!("decreasing: {decreasing}/27");
}
