//! Dual uniform velocity / Fourier lattices and the sampled-field containers.
//!
//! Nodes are `v_j = -L + j h_v` and `ζ_k = -L_ζ + k h_ζ` per axis, `j, k = 0..N-1`,
//! with `h_v h_ζ = 2π/N`. Three-dimensional arrays are stored row-major over
//! `(x, y, z)`, so `z` is the fastest index.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityGrid {
    pub n: usize,
    pub l: f64,
    pub h_v: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralGrid {
    pub n: usize,
    pub h_zeta: f64,
    pub l_zeta: f64,
    /// Half-width of the velocity grid this lattice is dual to.
    pub l_v: f64,
}

pub fn build_grids(n: usize, l: f64) -> Result<(VelocityGrid, SpectralGrid)> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "N must be an even integer >= 4, got {n}"
        )));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidGrid(format!("L must be positive, got {l}")));
    }
    let vel = VelocityGrid {
        n,
        l,
        h_v: 2.0 * l / n as f64,
    };
    Ok((vel, vel.dual()))
}

#[inline]
pub(crate) fn split_index(idx: usize, n: usize) -> [usize; 3] {
    [idx / (n * n), (idx / n) % n, idx % n]
}

#[inline]
pub(crate) fn join_index(i: [usize; 3], n: usize) -> usize {
    (i[0] * n + i[1]) * n + i[2]
}

impl VelocityGrid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        build_grids(n, l).map(|(v, _)| v)
    }

    pub fn dual(&self) -> SpectralGrid {
        let h_zeta = 2.0 * PI / (self.n as f64 * self.h_v);
        SpectralGrid {
            n: self.n,
            h_zeta,
            l_zeta: self.n as f64 * h_zeta / 2.0,
            l_v: self.l,
        }
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// One-dimensional node `v_j`.
    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.h_v
    }

    pub fn nodes_1d(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = split_index(idx, self.n);
        [self.node(i), self.node(j), self.node(k)]
    }

    /// Tensor-product trapezoid weights on the half-open box: half weight at
    /// `j = 0` on each axis, full weight elsewhere.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let w1 = self.weights_1d();
        let n = self.n;
        let mut w = Vec::with_capacity(self.len());
        for a in &w1 {
            for b in &w1 {
                for c in &w1 {
                    w.push(a * b * c);
                }
            }
        }
        debug_assert_eq!(w.len(), n * n * n);
        w
    }

    pub fn weights_1d(&self) -> Vec<f64> {
        let mut w = vec![self.h_v; self.n];
        w[0] = 0.5 * self.h_v;
        w
    }

    pub fn sample<F: Fn([f64; 3]) -> f64>(&self, density: F) -> Result<VelocityField> {
        let mut values = Vec::with_capacity(self.len());
        for idx in 0..self.len() {
            let v = density(self.point(idx));
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    index: idx,
                    value: v,
                });
            }
            values.push(v);
        }
        Ok(VelocityField { grid: *self, values })
    }

    pub fn zeros(&self) -> VelocityField {
        VelocityField {
            grid: *self,
            values: vec![0.0; self.len()],
        }
    }
}

impl SpectralGrid {
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn velocity(&self) -> VelocityGrid {
        VelocityGrid {
            n: self.n,
            l: self.l_v,
            h_v: 2.0 * self.l_v / self.n as f64,
        }
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.h_zeta
    }

    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = split_index(idx, self.n);
        [self.node(i), self.node(j), self.node(k)]
    }

    pub fn zeros(&self) -> FourierField {
        FourierField {
            grid: *self,
            values: vec![Complex64::new(0.0, 0.0); self.len()],
        }
    }
}

/// Real field sampled on the velocity grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    pub grid: VelocityGrid,
    pub values: Vec<f64>,
}

/// Complex field sampled on the centered Fourier lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    pub grid: SpectralGrid,
    pub values: Vec<Complex64>,
}

impl VelocityField {
    pub fn new(grid: VelocityGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite {
                index,
                value: self.values[index],
            }),
            None => Ok(()),
        }
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: f64, other: &VelocityField) -> VelocityField {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + alpha * b)
            .collect();
        VelocityField {
            grid: self.grid,
            values,
        }
    }

    pub fn scaled(&self, alpha: f64) -> VelocityField {
        VelocityField {
            grid: self.grid,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }
}

impl FourierField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn scaled(&self, alpha: f64) -> FourierField {
        FourierField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, alpha: f64, other: &FourierField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * alpha;
        }
    }
}
