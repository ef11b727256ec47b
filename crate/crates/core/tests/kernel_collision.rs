//! Kernel tables and the collision operator: structural identities, the
//! Maxwellian fixed point and the BKW time derivative.

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_boltzmann::collision::{collide_direct_oracle, CollisionOperator};
use spectral_boltzmann::grid::{VelocityField, VelocityGrid};
use spectral_boltzmann::kernel::{KernelCache, KernelSpec, C_LAMBDA_DEFAULT};
use spectral_boltzmann::reference::{bkw_exact, bkw_t0, maxwellian};
use spectral_boltzmann::transform::to_fourier;

fn r2(v: [f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

fn operator(spec: KernelSpec, n: usize, l: f64) -> (VelocityGrid, CollisionOperator) {
    let g = VelocityGrid::new(n, l).unwrap();
    let cache = KernelCache::new(spec, &g, 1.0, 4096).unwrap();
    let op = CollisionOperator::new(&cache, &g);
    (g, op)
}

fn random_bump(g: &VelocityGrid, rng: &mut ChaCha8Rng) -> VelocityField {
    let c: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let t = rng.gen_range(0.5..1.5);
    g.sample(|v| maxwellian(r2([v[0] - c[0], v[1] - c[1], v[2] - c[2]]), t)).unwrap()
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn general_exponent_table_self_converges() {
    let spec = KernelSpec::new(0.5, 1.0, C_LAMBDA_DEFAULT).unwrap();
    let coarse = KernelCache::with_radius(spec, 5.0, 20.0, 2048);
    let fine = KernelCache::with_radius(spec, 5.0, 20.0, 4096);
    assert!(coarse.uses_table());
    let scale = 5f64.powf(1.5) / 1.5;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let c = rng.gen_range(0.0..20.0);
        let d = (coarse.cos_moment(c) - fine.cos_moment(c)).abs();
        assert!(d <= 1e-8 * scale, "c = {c}: {d}");
    }
}

#[test]
fn radial_i_is_symmetric() {
    for lambda in [0.0, 0.5, 1.0] {
        let cache = KernelCache::with_radius(KernelSpec::new(lambda, 1.0, C_LAMBDA_DEFAULT).unwrap(), 4.0, 20.0, 1024);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (a, b) = (rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0));
            assert_eq!(cache.radial_i(a, b), cache.radial_i(b, a));
        }
    }
}

#[test]
fn zero_mode_of_output_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in [KernelSpec::maxwell(1.0), KernelSpec::hard_sphere(0.5)] {
        let (g, op) = operator(spec, 8, 4.0);
        let f = random_bump(&g, &mut rng);
        let h = random_bump(&g, &mut rng);
        let q = op.collide_fourier(&to_fourier(&f), &to_fourier(&h)).unwrap();
        let zero = (4 * 8 + 4) * 8 + 4;
        assert_eq!(q.values[zero].norm(), 0.0);
        let qd = collide_direct_oracle(&f, &h, &spec, op.radius()).unwrap();
        // the zero mode is the plain lattice sum
        let mass: f64 = qd.values.iter().sum();
        assert!(mass.abs() < 1e-12 * sup(&qd.values), "{mass}");
    }
}

#[test]
fn zero_input_gives_zero_output() {
    let spec = KernelSpec::maxwell(1.0);
    let (g, op) = operator(spec, 8, 4.0);
    let z = g.zeros();
    let (q, _) = op.collide(&z, &z).unwrap();
    assert!(q.values.iter().all(|&x| x == 0.0));
    let qd = collide_direct_oracle(&z, &z, &spec, op.radius()).unwrap();
    assert!(qd.values.iter().all(|&x| x == 0.0));
}

#[test]
fn bilinear_in_first_argument() {
    let (g, op) = operator(KernelSpec::hard_sphere(0.75), 8, 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = random_bump(&g, &mut rng);
    let h = random_bump(&g, &mut rng);
    let (q1, _) = op.collide(&f, &h).unwrap();
    let (q2, _) = op.collide(&f.scaled(2.0), &h).unwrap();
    let err = q1.values.iter().zip(&q2.values).fold(0.0f64, |m, (a, b)| m.max((2.0 * a - b).abs()));
    assert!(err <= 1e-12 * sup(&q2.values), "{err}");
}

#[test]
fn cube_symmetric_input_gives_cube_symmetric_output() {
    let n = 10;
    let (g, op) = operator(KernelSpec::hard_sphere(1.0), n, 4.0);
    // anisotropic but invariant under axis permutations and reflections
    let f = g
        .sample(|v| (-(v[0].powi(4) + v[1].powi(4) + v[2].powi(4)) / 4.0 - r2(v) / 2.0).exp())
        .unwrap();
    let (q, _) = op.collide(&f, &f).unwrap();
    let at = |i: [usize; 3]| q.values[(i[0] * n + i[1]) * n + i[2]];
    let scale = sup(&q.values);
    let mut worst = 0.0f64;
    for a in 1..n {
        for b in 1..n {
            for c in 1..n {
                let x = at([a, b, c]);
                for p in [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a], [n - a, b, c], [a, n - b, n - c]] {
                    worst = worst.max((x - at(p)).abs());
                }
            }
        }
    }
    assert!(worst <= 1e-13 * scale, "asymmetry {worst} vs scale {scale}");
}

#[test]
fn maxwellian_is_annihilated_and_improves_with_n() {
    let mut norms = Vec::new();
    for n in [8, 16] {
        let (g, op) = operator(KernelSpec::maxwell(1.0), n, 6.0);
        let m = g.sample(|v| maxwellian(r2(v), 1.0)).unwrap();
        let (q, _) = op.collide(&m, &m).unwrap();
        norms.push(sup(&q.values) / sup(&m.values));
    }
    assert!(norms[1] <= 1e-3, "{norms:?}");
    assert!(norms[1] < norms[0], "{norms:?}");
}

/// `∂_t` of the BKW profile with `K' = (1 − K)/6`.
fn bkw_time_derivative(v: [f64; 3], t: f64, eta: f64) -> f64 {
    let k = -(-t / 6.0).exp_m1();
    let x = r2(v) / (eta * eta);
    let pref = (2.0 * PI * eta * eta).powf(-1.5) / 2.0 * k.powf(-1.5) * (-x / (2.0 * k)).exp();
    let p = 5.0 - 3.0 / k + (1.0 - k) * x / (k * k);
    let dp = 3.0 / (k * k) - 2.0 * x / k.powi(3) + x / (k * k);
    let dlog = -1.5 / k + x / (2.0 * k * k);
    pref * (dlog * p + dp) * (1.0 - k) / 6.0
}

#[test]
fn bkw_derivative_closed_form_matches_finite_difference() {
    let t = bkw_t0() + 0.3;
    let h = 1e-5;
    for v in [[0.0, 0.0, 0.0], [1.0, 0.5, 0.0], [2.0, -1.0, 1.5]] {
        let fd = (bkw_exact(v, t + h, 1.0).unwrap() - bkw_exact(v, t - h, 1.0).unwrap()) / (2.0 * h);
        assert!((fd - bkw_time_derivative(v, t, 1.0)).abs() < 1e-9);
    }
}

#[test]
fn collision_of_bkw_is_its_time_derivative() {
    let t0 = bkw_t0();
    let (g, op) = operator(KernelSpec::maxwell(1.0), 24, 6.0);
    let f = g.sample(|v| bkw_exact(v, t0, 1.0).unwrap()).unwrap();
    let (q, _) = op.collide(&f, &f).unwrap();
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &qi) in q.values.iter().enumerate() {
        let d = bkw_time_derivative(g.point(i), t0, 1.0);
        num += (qi - d).powi(2);
        den += d * d;
    }
    let rel = (num / den).sqrt();
    assert!(rel <= 1e-2, "relative L2 error {rel}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn output_mass_vanishes(seed in any::<u64>(), lambda in prop::sample::select(vec![0.0, 1.0]), e in 0.2f64..=1.0) {
        let spec = KernelSpec::new(lambda, e, C_LAMBDA_DEFAULT).unwrap();
        let (g, op) = operator(spec, 8, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_bump(&g, &mut rng);
        let (q, _) = op.collide(&f, &f).unwrap();
        let mass: f64 = q.values.iter().sum::<f64>() / g.len() as f64;
        prop_assert!(mass.abs() <= 1e-14 * sup(&q.values), "{}", mass);
    }
}
