//! Small-scale comparison of the discretized-bath oracle against the
//! closed-form decay and tunneling results, with timing.
//!
//! Run with: cargo run --release -p twinwell --example oracle_vs_theory

use std::time::Instant;
use twinwell::bath::{build_grid, integrate, k_correlator, photon_amp_closedform, survival, z_over_b2, IntegrationConfig};
use twinwell::closed_form::{gamma_pm_ratio, z_analytic, Branch};
use twinwell::{InitialExternalState, ModelParams};

fn main() {
    // Internal decay at beta = 0: survival should be exponential at Gamma.
    let p = ModelParams::new(1.0, 0.005, 0.02, 0.0, 0.0).unwrap();
    let grid = build_grid(&p, 3.0, 1600, 16).unwrap();
    let start = Instant::now();
    let traj = integrate(&grid, &p, &InitialExternalState::plus(), &IntegrationConfig::new(150.0)).unwrap();
    let dt_run = start.elapsed();
    let (sp, _) = survival(&traj);
    let mut worst_rel = 0.0f64;
    for (s, &t) in sp.iter().zip(&traj.t) {
        let expected = (-p.gamma_rate * t).exp();
        worst_rel = worst_rel.max((s - expected).abs() / expected);
    }
    println!(
        "beta=0 survival: worst relative deviation {worst_rel:.3e} over t<=150 ({} modes, {:.2?})",
        grid.len(),
        dt_run
    );
    println!("norm drift: {:.3e}", (traj.norm.last().unwrap() - 1.0).abs());

    // K(t) fill-in at beta = 0.
    let init = InitialExternalState::right_well();
    let traj = integrate(&grid, &p, &init, &IntegrationConfig::new(150.0)).unwrap();
    let mut worst_k = 0.0f64;
    for (k, &t) in k_correlator(&traj).iter().zip(&traj.t) {
        let expected = init.product() * (1.0 - (-p.gamma_rate * t).exp());
        worst_k = worst_k.max((k.re - expected).abs().max(k.im.abs()));
    }
    println!("beta=0 K(t): worst absolute deviation {worst_k:.3e}");

    // Tunneling trajectory at beta = 3 for a few gamma ratios.
    for (gamma_ratio, n_omega) in [(0.5f64, 12000usize), (1.0, 6000), (2.0, 3000)] {
        let p = ModelParams::from_dimensionless(1.0, 3.0, 0.005, gamma_ratio, 0.0).unwrap();
        let grid = build_grid(&p, 3.0, n_omega, 16).unwrap();
        let t_end = 5.0 / p.gamma_rate;
        let start = Instant::now();
        let traj = integrate(&grid, &p, &init, &IntegrationConfig::new(t_end)).unwrap();
        let elapsed = start.elapsed();
        let z = z_over_b2(&traj, &p);
        let mut worst = 0.0f64;
        let mut worst_t = 0.0;
        for (zi, &t) in z.iter().zip(&traj.t) {
            let za = z_analytic(t, &p, &init) / (p.b / 2.0);
            if (zi - za).abs() > worst {
                worst = (zi - za).abs();
                worst_t = t;
            }
        }
        let rate_plus = gamma_pm_ratio(p.eta, p.beta, p.delta_small, Branch::Plus).re * p.gamma_rate;
        println!(
            "gamma_ratio={gamma_ratio}: |z_oracle - z_analytic| max {worst:.4} (t={worst_t:.0}) of b/2, \
             {} modes x {} steps in {elapsed:.2?}, norm drift {:.2e}, Re Gamma+ = {rate_plus:.5}",
            grid.len(),
            (t_end / (0.05 / grid.omega_max)).ceil(),
            (traj.norm.last().unwrap() - 1.0).abs(),
        );
    }

    // Photon amplitudes against the finite-time closed form.
    let p = ModelParams::new(1.0, 0.01, 0.04, 3.0, 0.0).unwrap();
    let grid = build_grid(&p, 3.0, 1200, 16).unwrap();
    let t_end = 3.0 / p.gamma_rate;
    let cfg = IntegrationConfig {
        t_end,
        dt: None,
        snapshot_stride: None,
        capture_final_state: true,
    };
    let traj = integrate(&grid, &p, &init, &cfg).unwrap();
    let state = traj.final_state.as_ref().unwrap();
    let mut scale = 0.0f64;
    let mut worst = 0.0f64;
    for i in 0..grid.len() {
        let (cm, cp) = photon_amp_closedform(&grid, i, t_end, &p, &init);
        scale = scale.max(cm.norm()).max(cp.norm());
        worst = worst
            .max((cm - state.photon_minus[i]).norm())
            .max((cp - state.photon_plus[i]).norm());
    }
    println!("photon amplitudes: worst |diff| = {worst:.3e} vs scale {scale:.3e} ({:.1}%)", 100.0 * worst / scale);
}
