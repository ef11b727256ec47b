//! Heating sources: diffusion bath and linear thermostat.

use spectral_boltzmann::collision::CollisionOperator;
use spectral_boltzmann::grid::{VelocityField, VelocityGrid};
use spectral_boltzmann::kernel::{KernelCache, KernelSpec, C_LAMBDA_DEFAULT};
use spectral_boltzmann::reference::{diffusion_rate, maxwellian};
use spectral_boltzmann::sources::{
    apply_diffusion, thermostat_operator, Rhs, SourceKind, SourceSpec, ThermostatSchedule,
};
use spectral_boltzmann::transform::{from_fourier, to_fourier};

fn r2(v: [f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

fn operator(spec: KernelSpec, g: &VelocityGrid) -> CollisionOperator {
    CollisionOperator::new(&KernelCache::new(spec, g, 1.0, 4096).unwrap(), g)
}

/// `(2/3)(1/2ρ)∫|v|² q`: temperature production of a rate `q` for a centered
/// state of mass `rho`.
fn temperature_rate(q: &VelocityField, w: &[f64], rho: f64) -> f64 {
    let e: f64 = q.values.iter().zip(w).enumerate().map(|(i, (x, w))| w * x * r2(q.grid.point(i))).sum();
    2.0 / 3.0 * e / (2.0 * rho)
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn diffusion_heats_at_twice_mu() {
    let g = VelocityGrid::new(16, 6.0).unwrap();
    let w = g.quadrature_weights();
    let f = g.sample(|v| maxwellian(r2(v), 1.0)).unwrap();
    let mu = 0.3;
    let (d, _) = from_fourier(&apply_diffusion(&to_fourier(&f), mu)).unwrap();
    let rate = temperature_rate(&d, &w, 1.0);
    assert!((rate - 2.0 * mu).abs() < 1e-4, "dT/dt = {rate}");
}

#[test]
fn diffusion_is_linear() {
    let g = VelocityGrid::new(8, 4.0).unwrap();
    let a = to_fourier(&g.sample(|v| maxwellian(r2(v), 1.0)).unwrap());
    let b = to_fourier(&g.sample(|v| v[0] * maxwellian(r2(v), 0.7)).unwrap());
    let mut ab = a.scaled(2.0);
    ab.add_assign_scaled(-3.0, &b);
    let lhs = apply_diffusion(&ab, 0.4);
    let mut rhs = apply_diffusion(&a, 0.4).scaled(2.0);
    rhs.add_assign_scaled(-3.0, &apply_diffusion(&b, 0.4));
    let err = lhs.values.iter().zip(&rhs.values).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    assert!(err <= 1e-15 * lhs.max_abs().max(1.0));
}

#[test]
fn thermostat_fixed_point_mass_and_energy_relaxation() {
    let g = VelocityGrid::new(16, 6.0).unwrap();
    let w = g.quadrature_weights();
    let lin = operator(KernelSpec::maxwell(1.0), &g);
    let sched = ThermostatSchedule::constant(1.0).unwrap();

    let m = g.sample(|v| maxwellian(r2(v), 1.0)).unwrap();
    let q = thermostat_operator(&m, &sched, 0.0, &lin).unwrap();
    assert!(sup(&q.values) <= 1e-3 * sup(&m.values), "{}", sup(&q.values));

    let hot = g.sample(|v| maxwellian(r2(v), 2.0)).unwrap();
    let q = thermostat_operator(&hot, &sched, 0.0, &lin).unwrap();
    // the zero mode is the plain lattice sum
    let mass: f64 = q.values.iter().sum::<f64>() * g.h_v.powi(3);
    assert!(mass.abs() < 1e-10, "{mass}");
    let rate = temperature_rate(&q, &w, 1.0);
    assert!(rate < 0.0);
}

#[test]
fn thermostat_energy_rate_converges_to_relaxation_law() {
    // equal masses, isotropic scattering: E|v'|² = (|v|² + |w|²)/2 at unit
    // collision frequency, so dT/dt = (T_bath − T)/2
    let want = 0.5 * (1.0 - 2.0);
    let mut errs = Vec::new();
    for n in [16, 24] {
        let g = VelocityGrid::new(n, 8.0).unwrap();
        let w = g.quadrature_weights();
        let lin = operator(KernelSpec::maxwell(1.0), &g);
        let hot = g.sample(|v| maxwellian(r2(v), 2.0)).unwrap();
        let q = thermostat_operator(&hot, &ThermostatSchedule::constant(1.0).unwrap(), 0.0, &lin).unwrap();
        errs.push((temperature_rate(&q, &w, 1.0) - want).abs());
    }
    assert!(errs[1] < errs[0] && errs[1] < 2e-3 * want.abs(), "{errs:?}");
}

#[test]
fn rhs_without_source_is_the_collision_operator() {
    let g = VelocityGrid::new(8, 4.0).unwrap();
    let op = operator(KernelSpec::hard_sphere(0.75), &g);
    let f = g.sample(|v| maxwellian(r2([v[0] - 0.5, v[1], v[2]]), 0.8)).unwrap();
    let rhs = Rhs::new(&op, SourceSpec::default());
    let a = rhs.eval(&f, 0.0).unwrap();
    let (b, _) = op.collide(&f, &f).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn thermostat_rhs_adds_four_thirds_linear_term() {
    let g = VelocityGrid::new(8, 4.0).unwrap();
    let op = operator(KernelSpec::maxwell(1.0), &g);
    let separate = operator(KernelSpec::maxwell(1.0), &g);
    let f = g.sample(|v| maxwellian(r2([v[0] - 0.5, v[1], v[2]]), 1.3)).unwrap();
    let sched = ThermostatSchedule::constant(0.5).unwrap();
    let source = SourceSpec::new(
        SourceKind::Thermostat {
            theta: 4.0 / 3.0,
            schedule: sched,
        },
        1.0,
    )
    .unwrap();
    let fused = Rhs::new(&op, source).eval(&f, 0.0).unwrap();
    let split = Rhs::new(&op, source).with_linear(&separate).eval(&f, 0.0).unwrap();
    let (qff, _) = op.collide(&f, &f).unwrap();
    let ql = thermostat_operator(&f, &sched, 0.0, &separate).unwrap();
    let scale = sup(&fused.values);
    for i in 0..g.len() {
        let want = qff.values[i] + 4.0 / 3.0 * ql.values[i];
        assert!((fused.values[i] - want).abs() <= 1e-12 * scale);
        assert!((split.values[i] - want).abs() <= 1e-12 * scale);
    }
}

#[test]
fn heated_inelastic_temperature_rate() {
    let g = VelocityGrid::new(24, 8.0).unwrap();
    let w = g.quadrature_weights();
    let (e, mu, t0) = (0.5, 0.3, 1.0);
    let op = operator(KernelSpec::new(0.0, e, C_LAMBDA_DEFAULT).unwrap(), &g);
    let source = SourceSpec::new(SourceKind::Diffusion { mu }, 1.0).unwrap();
    let f = g.sample(|v| maxwellian(r2(v), t0)).unwrap();
    let q = Rhs::new(&op, source).eval(&f, 0.0).unwrap();
    let rate = temperature_rate(&q, &w, 1.0);
    let want = 2.0 * mu - diffusion_rate(1.0, C_LAMBDA_DEFAULT, e) * t0;
    assert!((rate - want).abs() < 2e-3 * want.abs(), "{rate} vs {want}");
}

