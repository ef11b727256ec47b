//! Discrete approximation of the continuous Fourier pair
//! `f̂(ζ) = (2π)^{-3/2} ∫ f(v) e^{-iζ·v} dv` on the centered dual grids.
//!
//! With centered nodes the phase `e^{-iζ_k·v_j}` factors into the raw FFT
//! kernel times `(-1)^{k+j}` per axis and a global `(-1)^{N/2}`, so the
//! twiddles reduce to sign flips.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::grid::{split_index, FourierField, SpectralGrid, VelocityField, VelocityGrid};

/// Imaginary residue above this fraction of `‖f̂‖∞` signals a symmetry bug.
pub const RESIDUE_ERROR: f64 = 1e-6;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Unnormalized in-place 3-D FFT of a row-major `n³` array.
pub(crate) fn fft3(data: &mut [Complex64], n: usize, inverse: bool) {
    let p = plans(n);
    let fft = if inverse { &p.inverse } else { &p.forward };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // z lines are contiguous
    fft.process_with_scratch(data, &mut scratch);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    // y lines
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                line[j] = data[(i * n + j) * n + k];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for j in 0..n {
                data[(i * n + j) * n + k] = line[j];
            }
        }
    }
    // x lines
    for j in 0..n {
        for k in 0..n {
            for i in 0..n {
                line[i] = data[(i * n + j) * n + k];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for i in 0..n {
                data[(i * n + j) * n + k] = line[i];
            }
        }
    }
}

#[inline]
fn centering_sign(idx: usize, n: usize) -> f64 {
    let [i, j, k] = split_index(idx, n);
    if (i + j + k + n / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn to_fourier(f: &VelocityField) -> FourierField {
    let grid = f.grid;
    let n = grid.n;
    let mut data: Vec<Complex64> = f
        .values
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            let [i, j, k] = split_index(idx, n);
            Complex64::new(if (i + j + k) % 2 == 0 { v } else { -v }, 0.0)
        })
        .collect();
    fft3(&mut data, n, false);
    let scale = grid.h_v.powi(3) / (2.0 * PI).powf(1.5);
    for (idx, z) in data.iter_mut().enumerate() {
        *z *= centering_sign(idx, n) * scale;
    }
    FourierField {
        grid: grid.dual(),
        values: data,
    }
}

/// Inverse transform. Returns the real field and the discarded imaginary
/// residue `max |Im|`.
pub fn from_fourier(fh: &FourierField) -> Result<(VelocityField, f64)> {
    let mut data = inverse_raw(fh);
    let mut residue: f64 = 0.0;
    let mut values = Vec::with_capacity(data.len());
    for z in data.iter_mut() {
        residue = residue.max(z.im.abs());
        values.push(z.re);
    }
    let fmax = fh.max_abs();
    if residue > RESIDUE_ERROR * fmax {
        return Err(Error::ImaginaryResidue {
            residue,
            scale: fmax,
        });
    }
    Ok((
        VelocityField {
            grid: fh.grid.velocity(),
            values,
        },
        residue,
    ))
}

/// Inverse transform keeping the complex result.
pub fn from_fourier_complex(fh: &FourierField) -> Vec<Complex64> {
    inverse_raw(fh)
}

fn inverse_raw(fh: &FourierField) -> Vec<Complex64> {
    let grid: SpectralGrid = fh.grid;
    let n = grid.n;
    let mut data: Vec<Complex64> = fh
        .values
        .iter()
        .enumerate()
        .map(|(idx, &z)| {
            let [i, j, k] = split_index(idx, n);
            if (i + j + k) % 2 == 0 {
                z
            } else {
                -z
            }
        })
        .collect();
    fft3(&mut data, n, true);
    let scale = grid.h_zeta.powi(3) / (2.0 * PI).powf(1.5);
    for (idx, z) in data.iter_mut().enumerate() {
        *z *= centering_sign(idx, n) * scale;
    }
    data
}

/// Sample `f̂` of a known analytic transform on the lattice.
pub fn sample_fourier<F: Fn([f64; 3]) -> Complex64>(grid: &VelocityGrid, fhat: F) -> FourierField {
    let s = grid.dual();
    FourierField {
        grid: s,
        values: (0..s.len()).map(|idx| fhat(s.point(idx))).collect(),
    }
}
