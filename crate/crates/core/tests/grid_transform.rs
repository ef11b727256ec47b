//! Velocity grid, trapezoid weights and the centered transform pair.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use spectral_boltzmann::grid::{build_grids, VelocityGrid};
use spectral_boltzmann::observables::compute_moments;
use spectral_boltzmann::reference::maxwellian;
use spectral_boltzmann::stepper::bimodal_datum;
use spectral_boltzmann::transform::{from_fourier, sample_fourier, to_fourier};

fn r2(v: [f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

/// Mills bound on the one-dimensional Gaussian mass outside `[−L, L]`.
fn gaussian_tail_bound(l: f64, temperature: f64) -> f64 {
    let x = l / temperature.sqrt();
    2.0 * (-0.5 * x * x).exp() / ((2.0 * PI).sqrt() * x)
}

#[test]
fn maxwellian_mass_is_one_up_to_box_tail() {
    for (n, l) in [(16, 5.0), (16, 7.0), (24, 7.0)] {
        let g = VelocityGrid::new(n, l).unwrap();
        let w = g.quadrature_weights();
        let f = g.sample(|v| maxwellian(r2(v), 1.0)).unwrap();
        let mass: f64 = f.values.iter().zip(&w).map(|(a, b)| a * b).sum();
        // The infinite lattice sum is exact to spectral accuracy. The half-open
        // grid drops h/2 at v = −L, the node at +L and everything beyond.
        let h = 2.0 * l / n as f64;
        let edge = 1.5 * h * maxwellian(l * l, 1.0) * (2.0 * PI);
        let tol = 3.0 * (edge + gaussian_tail_bound(l, 1.0)) + 1e-12;
        assert!((mass - 1.0).abs() <= tol, "N={n} L={l}: mass {mass}, tol {tol}");
        if l >= 7.0 {
            assert!((mass - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn bimodal_datum_moments() {
    let g = VelocityGrid::new(32, 8.0).unwrap();
    let w = g.quadrature_weights();
    let f = bimodal_datum(&g, 1.0).unwrap();
    let m = compute_moments(&f, &w, 0.0).unwrap();
    assert!((m.rho - 1.0).abs() < 1e-6);
    for (got, want) in m.bulk_velocity.iter().zip([0.0, 1.0, 0.0]) {
        assert!((got - want).abs() < 1e-6, "V = {:?}", m.bulk_velocity);
    }
    assert!((m.temperature - 8.0 / 3.0).abs() < 1e-6, "T = {}", m.temperature);
}

#[test]
fn weights_and_constants() {
    let g = VelocityGrid::new(8, 2.0).unwrap();
    let w = g.quadrature_weights();
    let h3 = g.h_v.powi(3);
    let interior = (3 * 8 + 4) * 8 + 5;
    assert_eq!(w[interior], h3);
    let one = g.sample(|_| 1.0).unwrap();
    assert!(one.values.iter().all(|&x| x == 1.0));
    let total: f64 = w.iter().sum();
    let integral: f64 = one.values.iter().zip(&w).map(|(a, b)| a * b).sum();
    assert_eq!(integral, total);
}

#[test]
fn inverse_transform_recovers_maxwellian() {
    let (g, _) = build_grids(32, 5.0).unwrap();
    let c = (2.0 * PI).powf(-1.5);
    let fh = sample_fourier(&g, |k| Complex64::new(c * (-0.5 * r2(k)).exp(), 0.0));
    let (f, residue) = from_fourier(&fh).unwrap();
    assert!(residue < 1e-12);
    let err = f
        .values
        .iter()
        .enumerate()
        .fold(0.0f64, |m, (i, &x)| m.max((x - maxwellian(r2(g.point(i)), 1.0)).abs()));
    assert!(err < 1e-6, "max error {err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weight_sum_is_product_of_1d_trapezoids(half in 2usize..10, l in 0.5f64..10.0) {
        let n = 2 * half;
        let g = VelocityGrid::new(n, l).unwrap();
        let h = 2.0 * l / n as f64;
        let one_d = h / 2.0 + (n - 1) as f64 * h;
        let total: f64 = g.quadrature_weights().iter().sum();
        prop_assert!((total - one_d.powi(3)).abs() <= 1e-12 * one_d.powi(3));
    }

    #[test]
    fn round_trip_is_identity(
        centre in prop::array::uniform3(-1.5f64..1.5),
        temp in 0.3f64..2.0,
        amp in 0.1f64..3.0,
    ) {
        let g = VelocityGrid::new(12, 5.0).unwrap();
        let f = g
            .sample(|v| amp * maxwellian(r2([v[0] - centre[0], v[1] - centre[1], v[2] - centre[2]]), temp) + 0.1 * v[0] * (-r2(v)).exp())
            .unwrap();
        let (back, _) = from_fourier(&to_fourier(&f)).unwrap();
        let scale = f.max_abs();
        let err = f.values.iter().zip(&back.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(err <= 1e-10 * scale, "err {}", err);
    }
}
