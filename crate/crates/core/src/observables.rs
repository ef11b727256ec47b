//! Moments, temperature, flows, rescaled moments and axis slices.
//!
//! The Boltzmann constant is 1 and the dimension is 3 throughout.

use crate::error::{Error, Result};
use crate::grid::{join_index, VelocityField};

/// Default energy dissipation rate of the slow-down benchmark.
pub const MU_ONE: f64 = 2.0 / 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    pub t: f64,
    pub rho: f64,
    pub momentum: [f64; 3],
    pub bulk_velocity: [f64; 3],
    /// `∫ v vᵀ f`
    pub momentum_flow: [[f64; 3]; 3],
    /// `(1/2ρ) ∫ v |v|² f`
    pub energy_flow: [f64; 3],
    pub internal_energy: f64,
    pub temperature: f64,
    pub min_f: f64,
    pub corr_norm: f64,
    pub stationarity_norm: f64,
}

impl MomentSet {
    pub fn trace(&self) -> f64 {
        self.momentum_flow[0][0] + self.momentum_flow[1][1] + self.momentum_flow[2][2]
    }

    /// `(tr M₂ − ρ|V|²)/(2ρ)` recomputed from the stored fields.
    pub fn internal_energy_from_flow(&self) -> f64 {
        let v2: f64 = self.bulk_velocity.iter().map(|x| x * x).sum();
        (self.trace() - self.rho * v2) / (2.0 * self.rho)
    }

    /// Row in the `moments.csv` column order.
    pub fn csv_row(&self) -> Vec<f64> {
        let m = &self.momentum_flow;
        vec![
            self.t,
            self.rho,
            self.momentum[0],
            self.momentum[1],
            self.momentum[2],
            self.bulk_velocity[0],
            self.bulk_velocity[1],
            self.bulk_velocity[2],
            m[0][0],
            m[0][1],
            m[0][2],
            m[1][1],
            m[1][2],
            m[2][2],
            self.energy_flow[0],
            self.energy_flow[1],
            self.energy_flow[2],
            self.internal_energy,
            self.temperature,
            self.min_f,
            self.corr_norm,
            self.stationarity_norm,
        ]
    }
}

pub const MOMENT_COLUMNS: [&str; 22] = [
    "t", "rho", "mx", "my", "mz", "Vx", "Vy", "Vz", "M11", "M12", "M13", "M22", "M23", "M33", "r1", "r2", "r3",
    "E", "T", "min_f", "corr_norm", "stationarity_norm",
];

/// Weighted sums over the grid. `corr_norm` and `stationarity_norm` are left
/// at zero for the caller to fill.
pub fn compute_moments(f: &VelocityField, weights: &[f64], t: f64) -> Result<MomentSet> {
    let grid = f.grid;
    let mut rho = 0.0;
    let mut m = [0.0; 3];
    let mut m2 = [[0.0; 3]; 3];
    let mut q = [0.0; 3];
    for (idx, (&fv, &w)) in f.values.iter().zip(weights).enumerate() {
        let v = grid.point(idx);
        let wf = w * fv;
        let s = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        rho += wf;
        for i in 0..3 {
            m[i] += wf * v[i];
            q[i] += wf * v[i] * s;
            for j in i..3 {
                m2[i][j] += wf * v[i] * v[j];
            }
        }
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidState(format!("non-positive mass {rho} at t = {t}")));
    }
    for i in 0..3 {
        for j in 0..i {
            m2[i][j] = m2[j][i];
        }
    }
    let bulk = [m[0] / rho, m[1] / rho, m[2] / rho];
    let v2: f64 = bulk.iter().map(|x| x * x).sum();
    let energy = (m2[0][0] + m2[1][1] + m2[2][2] - rho * v2) / (2.0 * rho);
    Ok(MomentSet {
        t,
        rho,
        momentum: m,
        bulk_velocity: bulk,
        momentum_flow: m2,
        energy_flow: [q[0] / (2.0 * rho), q[1] / (2.0 * rho), q[2] / (2.0 * rho)],
        internal_energy: energy,
        temperature: 2.0 * energy / 3.0,
        min_f: f.min(),
        corr_norm: 0.0,
        stationarity_norm: 0.0,
    })
}

/// `e^{q μ₁ t} Σ ω f |v|^{2q}`: bounded in time exactly when the `q`-th
/// moment of the self-similar profile is finite.
pub fn rescaled_moment(f: &VelocityField, weights: &[f64], q: f64, t: f64, mu1: f64) -> f64 {
    let grid = f.grid;
    let sum: f64 = f
        .values
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(idx, (&fv, &w))| {
            let v = grid.point(idx);
            let s = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            let p = if q == 0.0 { 1.0 } else { s.powf(q) };
            w * fv * p
        })
        .sum();
    (q * mu1 * t).exp() * sum
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Profile along `axis` through the grid center `v = 0`.
pub fn axis_slice(f: &VelocityField, axis: Axis) -> Vec<(f64, f64)> {
    let n = f.grid.n;
    let c = n / 2;
    (0..n)
        .map(|j| {
            let mut i = [c, c, c];
            i[axis.index()] = j;
            (f.grid.node(j), f.values[join_index(i, n)])
        })
        .collect()
}

/// Self-similar variables: speeds scaled by `e^{μ₁t/2}` and the amplitude
/// `e^{3μ₁t/2}`, so that `amplitude · f(v, t)` plotted against the scaled
/// speeds approaches the profile `F`.
pub fn self_similar_rescale_points(speeds: &[f64], t: f64, mu1: f64) -> (Vec<f64>, f64) {
    let s = (0.5 * mu1 * t).exp();
    (speeds.iter().map(|v| v * s).collect(), (1.5 * mu1 * t).exp())
}
