// temporary measurement harness — deleted before release
use hwm_core::diagnostics::*;
use hwm_core::field::Trajectory;
use hwm_core::grid::SpectralGrid;
use hwm_core::initial::{make_initial, InitialDataSpec};
use hwm_core::solver::{evolve, picard_local_solve, PicardParams, SolverConfig};
use hwm_core::weak::{battery, weak_residual_halfwave, weak_residual_regularized, weak_terms};

fn bump_run(m: usize, eps: f64, t: f64, dt: f64, stride: usize) -> Trajectory {
    let g = SpectralGrid::new(16.0, m).unwrap();
    let u0 = make_initial(&g, &InitialDataSpec::reference_bump()).unwrap();
    let mut cfg = SolverConfig::new(eps, t, dt);
    cfg.output_stride = stride;
    evolve(&u0, &cfg).unwrap()
}

#[test]
fn measure_weak_refinement() {
    // fixed stride in steps: the stored Δ shrinks with dt
    let mut prev = None;
    for dt in [2e-3, 1e-3, 5e-4] {
        let traj = bump_run(512, 1e-2, 0.4, dt, 8);
        let batt = battery(traj.grid(), 0.4).unwrap();
        let r0 = weak_residual_regularized(&traj, &batt[0]).unwrap();
        let r2 = weak_residual_regularized(&traj, &batt[2]).unwrap(); // initial-profile chi
        print!("dt={dt}: r[interior]={r0:.3e} r[initial]={r2:.3e}");
        if let Some((p0, p2)) = prev {
            let a: f64 = p0 / r0;
            let b: f64 = p2 / r2;
            print!("  ratios {:.2} {:.2}", a, b);
        }
        println!();
        prev = Some((r0, r2));
    }
}

#[test]
fn measure_picard() {
    let g = SpectralGrid::new(16.0, 1024).unwrap();
    let u0 = make_initial(&g, &InitialDataSpec::reference_bump()).unwrap();
    for t_loc in [1e-2, 5e-3, 2.5e-3, 1.25e-3] {
        let mut cfg = SolverConfig::new(1e-1, 1.0, 1e-3);
        cfg.picard = PicardParams {
            max_iters: 10,
            t_loc,
            duhamel_substeps: 16,
        };
        let (fixed, rep) = picard_local_solve(&u0, &cfg).unwrap();
        println!(
            "t_loc={t_loc}: converged={} diffs={:?}",
            rep.converged,
            rep.xt_differences
                .iter()
                .map(|d| format!("{d:.2e}"))
                .collect::<Vec<_>>()
        );
        println!(
            "   ratios={:?}",
            rep.contraction_ratios
                .iter()
                .map(|d| format!("{d:.3}"))
                .collect::<Vec<_>>()
        );
        // cross-validate against evolve at matching dt
        let mut ecfg = SolverConfig::new(1e-1, t_loc, t_loc / 16.0);
        ecfg.output_stride = 16;
        ecfg.picard.t_loc = t_loc;
        let traj = evolve(&u0, &ecfg).unwrap();
        let dist = fixed.sub(traj.terminal()).unwrap().l2_norm();
        println!("   |picard - evolve|_L2 = {dist:.3e}");
    }
}

#[test]
fn measure_commutator_ladder() {
    let g = SpectralGrid::new(16.0, 1024).unwrap();
    let u0 = make_initial(&g, &InitialDataSpec::reference_bump()).unwrap();
    let mut cfg = SolverConfig::new(1e-2, 1.0, 1e-3);
    cfg.output_stride = 100;
    let traj = evolve(&u0, &cfg).unwrap();
    let batt = battery(&g, 1.0).unwrap();
    let ns = [8.0, 16.0, 32.0, 64.0];
    for (which, u) in [("u0", traj.initial()), ("uT", traj.terminal())] {
        for tf in batt.iter().step_by(9).take(3) {
            let lad = commutator_ladder(u, &tf.psi, &ns).unwrap();
            println!(
                "{} {}: values={:?} exp={:.3}",
                which,
                tf.label,
                lad.values
                    .iter()
                    .map(|v| format!("{v:.2e}"))
                    .collect::<Vec<_>>(),
                lad.exponent
            );
        }
    }
}

#[test]
fn measure_richardson_orders() {
    // identity residuals at dt, dt/2, dt/4 with fixed stride-in-steps
    let mut e_prev = None;
    let mut v_prev = None;
    for dt in [2e-3, 1e-3, 5e-4] {
        let traj = bump_run(512, 1e-2, 0.5, dt, 5);
        let e = energy_identity_residual(&traj)
            .unwrap()
            .iter()
            .fold(0.0f64, |a, &b| a.max(b));
        let v = constraint_equation_residual(&traj)
            .unwrap()
            .iter()
            .fold(0.0f64, |a, &b| a.max(b));
        print!("dt={dt}: energy_res={e:.3e} v_res={v:.3e}");
        if let (Some(ep), Some(vp)) = (e_prev, v_prev) {
            let ep: f64 = ep;
            let vp: f64 = vp;
            print!(
                "  orders: {:.2} {:.2}",
                (ep / e).log2(),
                (vp / v).log2()
            );
        }
        println!();
        e_prev = Some(e);
        v_prev = Some(v);
    }
}

#[test]
fn measure_step_order_and_resolution() {
    // Richardson self-convergence of one global run, ref at dt/4
    let run = |dt: f64| {
        let traj = bump_run(512, 1e-2, 0.2, dt, (0.2 / dt) as usize);
        traj.terminal().clone()
    };
    let dt = 2e-3;
    let ref4 = run(dt / 4.0);
    let e1 = run(dt).sub(&ref4).unwrap().l2_norm();
    let e2 = run(dt / 2.0).sub(&ref4).unwrap().l2_norm();
    println!("etd_rk2: err(dt)={e1:.3e} err(dt/2)={e2:.3e} p={:.2}", (e1 / e2).log2());

    // ifrk4
    let run4 = |dt: f64| {
        let g = SpectralGrid::new(16.0, 512).unwrap();
        let u0 = make_initial(&g, &InitialDataSpec::reference_bump()).unwrap();
        let mut cfg = SolverConfig::new(1e-2, 0.2, dt);
        cfg.output_stride = (0.2 / dt) as usize;
        cfg.integrator = hwm_core::solver::Integrator::Ifrk4;
        evolve(&u0, &cfg).unwrap().terminal().clone()
    };
    let rf = run4(dt / 4.0);
    let f1 = run4(dt).sub(&rf).unwrap().l2_norm();
    let f2 = run4(dt / 2.0).sub(&rf).unwrap().l2_norm();
    println!("ifrk4:   err(dt)={f1:.3e} err(dt/2)={f2:.3e} p={:.2}", (f1 / f2).log2());

    // resolution doubling at matched (dt, T)
    let run_m = |m: usize| {
        let g = SpectralGrid::new(16.0, m).unwrap();
        let u0 = make_initial(&g, &InitialDataSpec::reference_bump()).unwrap();
        let mut cfg = SolverConfig::new(1e-2, 1.0, 1e-3);
        cfg.output_stride = 1000;
        evolve(&u0, &cfg).unwrap().terminal().clone()
    };
    let a = run_m(512);
    let b = run_m(1024);
    // compare on the coarse grid by sampling the fine run at even indices
    let g512 = a.grid().clone();
    let down = hwm_core::field::VectorField3::from_components(
        g512.clone(),
        b.component(0).iter().step_by(2).copied().collect(),
        b.component(1).iter().step_by(2).copied().collect(),
        b.component(2).iter().step_by(2).copied().collect(),
    )
    .unwrap();
    let diff = a.sub(&down).unwrap().l2_norm();
    println!("M=512 vs M=1024 terminal L2 diff = {diff:.3e}");
}

#[test]
fn measure_sweep_quantities() {
    let eps_ladder = [1e-1, 5e-2, 2.5e-2, 1.25e-2];
    let mut runs = Vec::new();
    for &eps in &eps_ladder {
        let traj = bump_run(1024, eps, 1.0, 1e-3, 10);
        runs.push(traj);
    }
    // sphere certificate
    for (j, traj) in runs.iter().enumerate() {
        let dev = traj
            .slices
            .iter()
            .map(|s| s.sphere_deviation())
            .fold(0.0f64, f64::max);
        println!("eps={}: sphere_dev={dev:.4e}", eps_ladder[j]);
    }
    // cauchy differences in L2_{t,x} over the full window
    for w in runs.windows(2) {
        let mut acc = 0.0;
        let delta = w[0].output_dt();
        for (ua, ub) in w[0].slices.iter().zip(w[1].slices.iter()) {
            acc += delta * ua.sub(ub).unwrap().l2_norm().powi(2);
        }
        println!("cauchy diff = {:.4e}", acc.sqrt());
    }
    // weak residual decrease along ladder (first 3 battery members)
    let batt = battery(runs[0].grid(), 1.0).unwrap();
    for tf in batt.iter().take(3) {
        let vals: Vec<String> = runs
            .iter()
            .map(|t| format!("{:.3e}", weak_residual_halfwave(t, tf).unwrap()))
            .collect();
        println!("{}: halfwave residuals along ladder = {:?}", tf.label, vals);
    }
    // time-regularity table
    for (j, traj) in runs.iter().enumerate() {
        let (low, full) = time_derivative_norms(traj, 16.0).unwrap();
        println!("eps={}: |P<16 du/dt| = {low:.4} |du/dt| = {full:.4}", eps_ladder[j]);
    }
}
