//! Time integrators and the scenario driver.

use spectral_boltzmann::collision::CollisionOperator;
use spectral_boltzmann::config::{Scenario, ScenarioConfig};
use spectral_boltzmann::conserve::{ConserveMode, ConstraintSystem};
use spectral_boltzmann::grid::{VelocityField, VelocityGrid};
use spectral_boltzmann::kernel::{KernelCache, KernelSpec};
use spectral_boltzmann::reference::{bkw_exact, bkw_t0, maxwell_second_moment_exact};
use spectral_boltzmann::sources::{Rhs, SourceSpec};
use spectral_boltzmann::stepper::{run_scenario, step_euler, step_rk2};

struct Bkw {
    grid: VelocityGrid,
    op: CollisionOperator,
    sys: ConstraintSystem,
    f0: VelocityField,
}

fn bkw_setup(n: usize) -> Bkw {
    let grid = VelocityGrid::new(n, 6.0).unwrap();
    let w = grid.quadrature_weights();
    let op = CollisionOperator::new(&KernelCache::new(KernelSpec::maxwell(1.0), &grid, 1.0, 4096).unwrap(), &grid);
    let f0 = grid.sample(|v| bkw_exact(v, bkw_t0(), 1.0).unwrap()).unwrap();
    let sys = ConstraintSystem::from_initial(&f0, &w, ConserveMode::Elastic).unwrap();
    Bkw { grid, op, sys, f0 }
}

/// Integrates BKW over `span` in `steps` steps, checking feasibility after
/// every step.
fn integrate(b: &Bkw, rk2: bool, span: f64, steps: usize) -> VelocityField {
    let rhs = Rhs::new(&b.op, SourceSpec::default());
    let eval = |f: &VelocityField, t: f64| rhs.eval(f, t);
    let a_norm = b.sys.targets().iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let dt = span / steps as f64;
    let mut f = b.f0.clone();
    for n in 0..steps {
        let t = bkw_t0() + n as f64 * dt;
        let s = if rk2 {
            step_rk2(&f, t, dt, eval, &b.sys).unwrap()
        } else {
            step_euler(&f, t, dt, eval, &b.sys).unwrap()
        };
        f = s.f;
        assert!(b.sys.residual(&f) <= 1e-12 * (1.0 + a_norm));
    }
    f
}

fn sup_diff(a: &VelocityField, b: &VelocityField) -> f64 {
    a.values.iter().zip(&b.values).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn temporal_orders_by_self_convergence() {
    let b = bkw_setup(12);
    let span = 0.4;
    for (rk2, order) in [(false, 1.0), (true, 2.0)] {
        let fine = integrate(&b, rk2, span, 128);
        let errs: Vec<f64> = [4, 8, 16].iter().map(|&s| sup_diff(&integrate(&b, rk2, span, s), &fine)).collect();
        for w in errs.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!((rate - order).abs() < 0.3, "rk2 {rk2}: errors {errs:?}");
        }
    }
}

#[test]
fn rk2_tracks_bkw_better_than_euler() {
    let b = bkw_setup(24);
    let exact = b.grid.sample(|v| bkw_exact(v, bkw_t0() + 1.0, 1.0).unwrap()).unwrap();
    let e_euler = sup_diff(&integrate(&b, false, 1.0, 25), &exact);
    let e_rk2 = sup_diff(&integrate(&b, true, 1.0, 25), &exact);
    assert!(e_rk2 < e_euler, "rk2 {e_rk2} euler {e_euler}");
}

#[test]
fn rejects_nonpositive_step() {
    let b = bkw_setup(8);
    let rhs = Rhs::new(&b.op, SourceSpec::default());
    assert!(step_euler(&b.f0, 0.0, 0.0, |f, t| rhs.eval(f, t), &b.sys).is_err());
    assert!(step_rk2(&b.f0, 0.0, -1.0, |f, t| rhs.eval(f, t), &b.sys).is_err());
}

#[test]
fn zero_length_run_records_initial_state_only() {
    let t0 = bkw_t0();
    let c = ScenarioConfig::parse_str(
        &format!("scenario = bkw\ngrid.N = 8\ntime.t_start = {t0}\ntime.t_final = {t0}\n"),
        &[],
    )
    .unwrap();
    let out = run_scenario(&c).unwrap();
    assert_eq!(out.steps, 0);
    assert_eq!(out.records.len(), 1);
    assert!(out.aborted.is_none());
    assert_eq!(out.records[0].t, t0);
    assert_eq!(out.snapshots.len(), 1);
}

#[test]
fn maxwell_shear_stress_relaxes_monotonically() {
    let mut c = ScenarioConfig::for_scenario(Scenario::MaxwellElastic, 16).unwrap();
    c.t_final = 2.0;
    c.snapshot_times.clear();
    let out = run_scenario(&c).unwrap();
    assert!(out.aborted.is_none());
    let m12: Vec<f64> = out.records.iter().map(|m| m.momentum_flow[0][1]).collect();
    assert!(m12.windows(2).all(|w| w[1] > w[0]), "{m12:?}");
    let exact = maxwell_second_moment_exact(2.0).0[0][1];
    let last = *m12.last().unwrap();
    assert!((last - exact).abs() < 0.1 * 11.0 / 3.0, "{last} vs {exact}");
    for m in &out.records {
        assert!((m.rho - out.records[0].rho).abs() < 1e-12);
        assert!((m.temperature - out.records[0].temperature).abs() < 1e-10);
    }
}
