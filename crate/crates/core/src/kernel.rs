//! VHP collision model and its Fourier weight functions.
//!
//! The velocity-space weight is
//! `G(u, ζ) = C_λ 4π |u|^λ [e^{iβ ζ·u/2} sinc(β|u||ζ|/2) − 1]`, and its
//! transform over the ball `|u| < R` reduces to radial integrals
//! `Ĝ(ξ, ζ) = 16π² C_λ [I(β|ζ|/2, |ξ − βζ/2|) − J(|ξ|)]` with
//! `I(a, b) = ∫₀^R r^{λ+2} sinc(ar) sinc(br) dr` and `J(c) = I(0, c)`.
//!
//! `I` is evaluated through the cosine moment `C(c) = ∫₀^R r^λ cos(cr) dr`
//! using `I(a, b) = [C(a−b) − C(a+b)] / (2ab)`. For λ ∈ {0, 1} all moments
//! have closed forms; other exponents use a cubic Hermite table.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::VelocityGrid;
use crate::quad::gauss_legendre;

/// Default isotropic cross-section constant, `C_λ · 4π = 1`.
pub const C_LAMBDA_DEFAULT: f64 = 1.0 / (4.0 * PI);

/// Default table resolution for non-integer exponents.
pub const DEFAULT_TABLE_RESOLUTION: usize = 4096;

/// Below this value of `min(a, b)·R` the difference formula for `I` loses
/// digits, so the integral is evaluated by quadrature instead.
const CANCELLATION_GUARD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    lambda: f64,
    e: f64,
    beta: f64,
    c_lambda: f64,
}

impl KernelSpec {
    pub fn new(lambda: f64, e: f64, c_lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::config("kernel.lambda", format!("must lie in [0, 1], got {lambda}")));
        }
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::config("kernel.e", format!("must lie in [0, 1], got {e}")));
        }
        if !(c_lambda > 0.0) || !c_lambda.is_finite() {
            return Err(Error::config("kernel.C_lambda", format!("must be positive, got {c_lambda}")));
        }
        Ok(Self {
            lambda,
            e,
            beta: 0.5 * (1.0 + e),
            c_lambda,
        })
    }

    /// Normalized Maxwell molecules (`λ = 0`, `C_λ = 1/(4π)`).
    pub fn maxwell(e: f64) -> Self {
        Self::new(0.0, e, C_LAMBDA_DEFAULT).expect("valid restitution")
    }

    pub fn hard_sphere(e: f64) -> Self {
        Self::new(1.0, e, C_LAMBDA_DEFAULT).expect("valid restitution")
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c_lambda(&self) -> f64 {
        self.c_lambda
    }

    pub fn set_e(&mut self, e: f64) -> Result<()> {
        *self = Self::new(self.lambda, e, self.c_lambda)?;
        Ok(())
    }

    pub fn is_elastic(&self) -> bool {
        self.beta == 1.0
    }

    /// `C_λ` times the sphere measure.
    pub fn angular_total(&self) -> f64 {
        self.c_lambda * 4.0 * PI
    }
}

#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

#[inline]
fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn eval_g(spec: &KernelSpec, u: [f64; 3], zeta: [f64; 3]) -> Complex64 {
    let ru = norm3(u);
    let rz = norm3(zeta);
    let beta = spec.beta;
    let dot = zeta[0] * u[0] + zeta[1] * u[1] + zeta[2] * u[2];
    let bracket = Complex64::from_polar(sinc(beta * ru * rz / 2.0), beta * dot / 2.0) - 1.0;
    let weight = if spec.lambda == 0.0 { 1.0 } else { ru.powf(spec.lambda) };
    bracket * (spec.angular_total() * weight)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Exponent {
    Zero,
    One,
    General,
}

/// Cubic Hermite table of the moments `C_λ(c)`, `S_{λ+1}(c)` with their
/// derivatives on `[0, c_max]`.
#[derive(Clone, Debug)]
struct MomentTable {
    step: f64,
    c_max: f64,
    cos0: Vec<f64>,
    sin1: Vec<f64>,
    cos2: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct KernelCache {
    spec: KernelSpec,
    radius: f64,
    resolution: usize,
    exponent: Exponent,
    table: Option<MomentTable>,
}

pub fn build_cache(spec: KernelSpec, grid: &VelocityGrid, resolution: usize) -> Result<KernelCache> {
    KernelCache::new(spec, grid, 1.0, resolution)
}

impl KernelCache {
    /// Builds the cache for the ball `|u| < radius_factor · L`.
    pub fn new(spec: KernelSpec, grid: &VelocityGrid, radius_factor: f64, resolution: usize) -> Result<Self> {
        if resolution < 64 {
            return Err(Error::config(
                "kernel.table_resolution",
                format!("must be at least 64, got {resolution}"),
            ));
        }
        if !(radius_factor > 0.0) || !radius_factor.is_finite() {
            return Err(Error::config(
                "kernel.radius_factor",
                format!("must be positive, got {radius_factor}"),
            ));
        }
        let radius = radius_factor * grid.l;
        // largest radial argument a + b over the lattice: |ξ| + β|ζ| ≤ 2√3 L_ζ
        let c_max = 2.0 * 3f64.sqrt() * grid.dual().l_zeta * 1.001;
        Ok(Self::with_radius(spec, radius, c_max, resolution))
    }

    pub fn with_radius(spec: KernelSpec, radius: f64, c_max: f64, resolution: usize) -> Self {
        let exponent = if spec.lambda == 0.0 {
            Exponent::Zero
        } else if spec.lambda == 1.0 {
            Exponent::One
        } else {
            Exponent::General
        };
        let mut cache = Self {
            spec,
            radius,
            resolution,
            exponent,
            table: None,
        };
        if exponent == Exponent::General {
            let step = c_max / resolution as f64;
            let nodes: Vec<f64> = (0..=resolution).map(|i| i as f64 * step).collect();
            let lam = spec.lambda;
            cache.table = Some(MomentTable {
                step,
                c_max,
                cos0: nodes.iter().map(|&c| cache.moment_direct(lam, c, true)).collect(),
                sin1: nodes.iter().map(|&c| cache.moment_direct(lam + 1.0, c, false)).collect(),
                cos2: nodes.iter().map(|&c| cache.moment_direct(lam + 2.0, c, true)).collect(),
            });
        }
        cache
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn uses_table(&self) -> bool {
        self.table.is_some()
    }

    /// `∫₀^ρ r^p cos(cr) dr` (or `sin`) by its Taylor series; valid for `cρ ≲ 1`.
    fn moment_series(p: f64, c: f64, rho: f64, cosine: bool) -> f64 {
        let x = c * rho;
        let x2 = x * x;
        let mut term = if cosine { 1.0 } else { x };
        let mut power = if cosine { 0.0 } else { 1.0 };
        let mut sum = 0.0;
        for n in 0..30 {
            let contrib = term / (p + power + 1.0);
            sum += contrib;
            if contrib.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
            let k = 2.0 * n as f64 + if cosine { 1.0 } else { 2.0 };
            term *= -x2 / (k * (k + 1.0));
            power += 2.0;
        }
        sum * rho.powf(p + 1.0)
    }

    /// `∫₀^R r^p cos(cr) dr` (or `sin`) by a series head on `[0, min(R, 1/c)]`
    /// and composite Gauss–Legendre panels of width `≤ 1/c` beyond.
    fn moment_direct(&self, p: f64, c: f64, cosine: bool) -> f64 {
        let r = self.radius;
        let c = c.abs();
        if c * r <= 1.0 {
            return Self::moment_series(p, c, r, cosine);
        }
        let head = 1.0 / c;
        let mut total = Self::moment_series(p, c, head, cosine);
        let panels = ((r - head) * c).ceil() as usize;
        let width = (r - head) / panels as f64;
        let (x, w) = gauss_legendre(16);
        for k in 0..panels {
            let mid = head + (k as f64 + 0.5) * width;
            let mut s = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                let rr = mid + 0.5 * width * xi;
                let t = if cosine { (c * rr).cos() } else { (c * rr).sin() };
                s += wi * rr.powf(p) * t;
            }
            total += 0.5 * width * s;
        }
        total
    }

    fn hermite(values: &[f64], slopes: &[f64], step: f64, c: f64) -> f64 {
        let pos = c / step;
        let i = (pos.floor() as usize).min(values.len() - 2);
        let t = pos - i as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * values[i] + h10 * step * slopes[i] + h01 * values[i + 1] + h11 * step * slopes[i + 1]
    }

    /// Cosine moment `∫₀^R r^λ cos(cr) dr`.
    pub fn cos_moment(&self, c: f64) -> f64 {
        let c = c.abs();
        let r = self.radius;
        let x = c * r;
        if x < 1.0 {
            return Self::moment_series(self.spec.lambda, c, r, true);
        }
        match self.exponent {
            Exponent::Zero => x.sin() / c,
            Exponent::One => r * x.sin() / c + (x.cos() - 1.0) / (c * c),
            Exponent::General => match &self.table {
                Some(t) if c <= t.c_max => Self::hermite_neg(&t.cos0, &t.sin1, t.step, c),
                _ => self.moment_direct(self.spec.lambda, c, true),
            },
        }
    }

    /// Hermite interpolation where the stored slope array holds the negated
    /// derivative (`C' = −S`).
    fn hermite_neg(values: &[f64], neg_slopes: &[f64], step: f64, c: f64) -> f64 {
        let pos = c / step;
        let i = (pos.floor() as usize).min(values.len() - 2);
        let t = pos - i as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * values[i] - h10 * step * neg_slopes[i] + h01 * values[i + 1] - h11 * step * neg_slopes[i + 1]
    }

    /// Sine moment `∫₀^R r^{λ+1} sin(cr) dr`.
    pub fn sin_moment(&self, c: f64) -> f64 {
        let sign = c.signum();
        let c = c.abs();
        let r = self.radius;
        let x = c * r;
        let value = if x < 1.0 {
            Self::moment_series(self.spec.lambda + 1.0, c, r, false)
        } else {
            match self.exponent {
                Exponent::Zero => (x.sin() - x * x.cos()) / (c * c),
                Exponent::One => {
                    -r * r * x.cos() / c + 2.0 * r * x.sin() / (c * c) + 2.0 * (x.cos() - 1.0) / (c * c * c)
                }
                Exponent::General => match &self.table {
                    Some(t) if c <= t.c_max => Self::hermite(&t.sin1, &t.cos2, t.step, c),
                    _ => self.moment_direct(self.spec.lambda + 1.0, c, false),
                },
            }
        };
        if sign < 0.0 {
            -value
        } else {
            value
        }
    }

    /// `J(c) = ∫₀^R r^{λ+2} sinc(cr) dr`.
    pub fn radial_j(&self, c: f64) -> f64 {
        let c = c.abs();
        let r = self.radius;
        let p = self.spec.lambda + 2.0;
        if c == 0.0 {
            return r.powf(p + 1.0) / (p + 1.0);
        }
        if c * r < 1.0 {
            // sinc series: Σ (−1)^n (cr)^{2n}/(2n+1)!
            let x2 = (c * r) * (c * r);
            let mut term = 1.0;
            let mut sum = 0.0;
            for n in 0..30 {
                let contrib = term / (p + 2.0 * n as f64 + 1.0);
                sum += contrib;
                if contrib.abs() < 1e-18 * sum.abs() {
                    break;
                }
                let k = 2.0 * n as f64 + 2.0;
                term *= -x2 / (k * (k + 1.0));
            }
            return sum * r.powf(p + 1.0);
        }
        self.sin_moment(c) / c
    }

    /// `I(a, b) = ∫₀^R r^{λ+2} sinc(ar) sinc(br) dr`.
    pub fn radial_i(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.abs(), b.abs());
        if a == 0.0 {
            return self.radial_j(b);
        }
        if b == 0.0 {
            return self.radial_j(a);
        }
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo * self.radius < CANCELLATION_GUARD {
            return self.radial_i_quadrature(lo, hi);
        }
        (self.cos_moment(hi - lo) - self.cos_moment(hi + lo)) / (2.0 * lo * hi)
    }

    /// Direct Gauss–Legendre evaluation of `I(a, b)`, independent of the
    /// moment identity.
    pub fn radial_i_quadrature(&self, a: f64, b: f64) -> f64 {
        let r = self.radius;
        let freq = a.abs() + b.abs();
        let panels = ((freq * r).ceil() as usize).max(1);
        let width = r / panels as f64;
        let (x, w) = gauss_legendre(16);
        let p = self.spec.lambda + 2.0;
        let mut total = 0.0;
        for k in 0..panels {
            let mid = (k as f64 + 0.5) * width;
            let mut s = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                let rr = mid + 0.5 * width * xi;
                s += wi * rr.powf(p) * sinc(a * rr) * sinc(b * rr);
            }
            total += 0.5 * width * s;
        }
        total
    }

    /// `Ĝ(ξ, ζ) = 16π² C_λ ∫₀^R r^{λ+2} [sinc(rβ|ζ|/2) sinc(r|ξ − βζ/2|) − sinc(r|ξ|)] dr`.
    pub fn eval_g_hat(&self, xi: [f64; 3], zeta: [f64; 3]) -> f64 {
        let rz = norm3(zeta);
        if rz == 0.0 {
            return 0.0;
        }
        let beta = self.spec.beta;
        let a = 0.5 * beta * rz;
        let b = norm3([
            xi[0] - 0.5 * beta * zeta[0],
            xi[1] - 0.5 * beta * zeta[1],
            xi[2] - 0.5 * beta * zeta[2],
        ]);
        self.g_hat_radial(a, b, norm3(xi))
    }

    /// `Ĝ` from its three radial arguments `(β|ζ|/2, |ξ − βζ/2|, |ξ|)`.
    #[inline]
    pub fn g_hat_radial(&self, a: f64, b: f64, c: f64) -> f64 {
        16.0 * PI * PI * self.spec.c_lambda * (self.radial_i(a, b) - self.radial_j(c))
    }
}
