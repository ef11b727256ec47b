//! Bilinear spectral collision operator
//! `Q̂(ζ_k) = (2π)^{-3/2} h_ζ³ Σ_ξ f̂(ζ_k − ξ) ĝ(ξ) Ĝ(ξ, ζ_k)`.
//!
//! Modes are read on the symmetric index set `−(N/2−1)..=(N/2−1)` per axis;
//! the unpaired lattice planes at `ζ = −L_ζ` are ignored on input and left
//! zero on output, and terms with `ζ_k − ξ` outside the set are dropped.
//!
//! `Ĝ` is isotropic, so it is tabulated only for `ζ` in the fundamental wedge
//! `0 ≤ k_x ≤ k_y ≤ k_z` of the 48-element cube group; any other output mode
//! `k = S k₀` is obtained by permuting the inputs with `S`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{FourierField, SpectralGrid, VelocityField, VelocityGrid};
use crate::kernel::{eval_g, KernelCache, KernelSpec};
use crate::quad::gauss_legendre;
use crate::transform::{fft3, from_fourier, to_fourier};

/// Signed permutation `(S j)_i = sign_i · j_{perm_i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Symmetry {
    perm: [usize; 3],
    sign: [i64; 3],
}

impl Symmetry {
    fn all() -> Vec<Symmetry> {
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(48);
        for perm in PERMS {
            for bits in 0..8 {
                let sign = [
                    if bits & 1 == 0 { 1 } else { -1 },
                    if bits & 2 == 0 { 1 } else { -1 },
                    if bits & 4 == 0 { 1 } else { -1 },
                ];
                out.push(Symmetry { perm, sign });
            }
        }
        out
    }

    #[inline]
    fn apply(&self, j: [i64; 3]) -> [i64; 3] {
        [
            self.sign[0] * j[self.perm[0]],
            self.sign[1] * j[self.perm[1]],
            self.sign[2] * j[self.perm[2]],
        ]
    }

    fn id(&self) -> usize {
        let p = match self.perm {
            [0, 1, 2] => 0,
            [0, 2, 1] => 1,
            [1, 0, 2] => 2,
            [1, 2, 0] => 3,
            [2, 0, 1] => 4,
            _ => 5,
        };
        let s = (self.sign[0] < 0) as usize | ((self.sign[1] < 0) as usize) << 1 | ((self.sign[2] < 0) as usize) << 2;
        p * 8 + s
    }

    /// Symmetry mapping the sorted absolute values of `k` back onto `k`.
    fn canonical(k: [i64; 3]) -> ([i64; 3], Symmetry) {
        let abs = [k[0].abs(), k[1].abs(), k[2].abs()];
        let mut order = [0usize, 1, 2];
        order.sort_by_key(|&i| abs[i]);
        let k0 = [abs[order[0]], abs[order[1]], abs[order[2]]];
        let mut perm = [0usize; 3];
        for (pos, &axis) in order.iter().enumerate() {
            perm[axis] = pos;
        }
        let sign = [
            if k[0] < 0 { -1 } else { 1 },
            if k[1] < 0 { -1 } else { 1 },
            if k[2] < 0 { -1 } else { 1 },
        ];
        (k0, Symmetry { perm, sign })
    }
}

/// Inputs permuted by one symmetry, split into real and imaginary parts.
struct Permuted {
    /// `f̂(−S j)`
    rev_re: Vec<f64>,
    rev_im: Vec<f64>,
    /// `ĝ(S j)`
    g_re: Vec<f64>,
    g_im: Vec<f64>,
}

pub struct CollisionOperator {
    grid: SpectralGrid,
    spec: KernelSpec,
    radius: f64,
    /// `N/2 − 1`
    half: i64,
    /// `N − 1`
    side: usize,
    reps: Vec<[i64; 3]>,
    table: Vec<f64>,
}

impl CollisionOperator {
    pub fn new(cache: &KernelCache, grid: &VelocityGrid) -> Self {
        let sgrid = grid.dual();
        let n = sgrid.n;
        let half = (n / 2 - 1) as i64;
        let side = n - 1;
        let mut reps = Vec::new();
        for a in 0..=half {
            for b in a..=half {
                for c in b..=half {
                    reps.push([a, b, c]);
                }
            }
        }
        let h = sgrid.h_zeta;
        let beta = cache.spec().beta();
        // J(|ξ|) depends on |m|² only
        let max_r2 = (3 * half * half) as usize;
        let j_of_r2: Vec<f64> = (0..=max_r2).map(|r2| cache.radial_j(h * (r2 as f64).sqrt())).collect();
        let pref = 16.0 * PI * PI * cache.spec().c_lambda();
        let cube = side * side * side;
        let rows: Vec<Vec<f64>> = reps
            .par_iter()
            .map(|&k0| {
                let mut row = vec![0.0; cube];
                if k0 == [0, 0, 0] {
                    return row;
                }
                let zeta = [k0[0] as f64 * h, k0[1] as f64 * h, k0[2] as f64 * h];
                let a = 0.5 * beta * (zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]).sqrt();
                let mut idx = 0;
                for mx in -half..=half {
                    for my in -half..=half {
                        for mz in -half..=half {
                            let d = [
                                mx as f64 * h - 0.5 * beta * zeta[0],
                                my as f64 * h - 0.5 * beta * zeta[1],
                                mz as f64 * h - 0.5 * beta * zeta[2],
                            ];
                            let b = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                            let r2 = (mx * mx + my * my + mz * mz) as usize;
                            row[idx] = pref * (cache.radial_i(a, b) - j_of_r2[r2]);
                            idx += 1;
                        }
                    }
                }
                row
            })
            .collect();
        let mut table = Vec::with_capacity(rows.len() * cube);
        for r in rows {
            table.extend_from_slice(&r);
        }
        Self {
            grid: sgrid,
            spec: *cache.spec(),
            radius: cache.radius(),
            half,
            side,
            reps,
            table,
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Bytes held by the wedge tables.
    pub fn table_bytes(&self) -> usize {
        self.table.len() * std::mem::size_of::<f64>()
    }

    /// Tabulated `Ĝ(ξ_m, ζ_k)` for centered integer coordinates.
    pub fn g_hat_at(&self, m: [i64; 3], k: [i64; 3]) -> f64 {
        let (k0, s) = Symmetry::canonical(k);
        // Ĝ(ξ_m, S ζ₀) = Ĝ(S⁻¹ ξ_m, ζ₀); find m' with S m' = m
        let mut mp = [0i64; 3];
        for i in 0..3 {
            mp[s.perm[i]] = s.sign[i] * m[i];
        }
        let row = self.row_of(k0);
        self.table[row * self.side.pow(3) + self.compact(mp)]
    }

    fn row_of(&self, k0: [i64; 3]) -> usize {
        self.reps.binary_search(&k0).expect("wedge representative")
    }

    #[inline]
    fn compact(&self, j: [i64; 3]) -> usize {
        let s = self.side as i64;
        (((j[0] + self.half) * s + (j[1] + self.half)) * s + (j[2] + self.half)) as usize
    }

    #[inline]
    fn lattice(&self, j: [i64; 3]) -> usize {
        let n = self.grid.n as i64;
        let c = n / 2;
        (((j[0] + c) * n + (j[1] + c)) * n + (j[2] + c)) as usize
    }

    fn check_grid(&self, other: &SpectralGrid) -> Result<()> {
        if other.n != self.grid.n || (other.h_zeta - self.grid.h_zeta).abs() > 1e-14 * self.grid.h_zeta {
            return Err(Error::GridMismatch(format!(
                "operator built for N={}, h_ζ={}, got N={}, h_ζ={}",
                self.grid.n, self.grid.h_zeta, other.n, other.h_zeta
            )));
        }
        Ok(())
    }

    fn permute(&self, fh: &FourierField, gh: &FourierField, s: &Symmetry) -> Permuted {
        let cube = self.side.pow(3);
        let mut p = Permuted {
            rev_re: Vec::with_capacity(cube),
            rev_im: Vec::with_capacity(cube),
            g_re: Vec::with_capacity(cube),
            g_im: Vec::with_capacity(cube),
        };
        let h = self.half;
        for x in -h..=h {
            for y in -h..=h {
                for z in -h..=h {
                    let sj = s.apply([x, y, z]);
                    let f = fh.values[self.lattice([-sj[0], -sj[1], -sj[2]])];
                    let g = gh.values[self.lattice(sj)];
                    p.rev_re.push(f.re);
                    p.rev_im.push(f.im);
                    p.g_re.push(g.re);
                    p.g_im.push(g.im);
                }
            }
        }
        p
    }

    /// `Σ_{m'} f̂(S(k₀ − m')) ĝ(S m') Ĝ(ξ_{m'}, ζ_{k₀})` over the admissible box.
    fn mode(&self, row: &[f64], p: &Permuted, k0: [i64; 3]) -> Complex64 {
        let h = self.half;
        let s = self.side;
        let lo = [(-h).max(k0[0] - h), (-h).max(k0[1] - h), (-h).max(k0[2] - h)];
        let hi = [h.min(k0[0] + h), h.min(k0[1] + h), h.min(k0[2] + h)];
        let len = (hi[2] - lo[2] + 1) as usize;
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for mx in lo[0]..=hi[0] {
            for my in lo[1]..=hi[1] {
                let g_off = (((mx + h) as usize * s) + (my + h) as usize) * s + (lo[2] + h) as usize;
                let r_off = (((mx - k0[0] + h) as usize * s) + (my - k0[1] + h) as usize) * s + (lo[2] - k0[2] + h) as usize;
                let t = &row[g_off..g_off + len];
                let gr = &p.g_re[g_off..g_off + len];
                let gi = &p.g_im[g_off..g_off + len];
                let rr = &p.rev_re[r_off..r_off + len];
                let ri = &p.rev_im[r_off..r_off + len];
                let mut sr = 0.0;
                let mut si = 0.0;
                for i in 0..len {
                    let wr = gr[i] * t[i];
                    let wi = gi[i] * t[i];
                    sr += rr[i] * wr - ri[i] * wi;
                    si += rr[i] * wi + ri[i] * wr;
                }
                acc_re += sr;
                acc_im += si;
            }
        }
        Complex64::new(acc_re, acc_im)
    }

    /// General complex inputs.
    pub fn collide_fourier(&self, fh: &FourierField, gh: &FourierField) -> Result<FourierField> {
        self.evaluate(fh, gh, false)
    }

    /// Inputs that are transforms of real fields; only half of the modes are
    /// computed and the rest follow by conjugation, so the output is exactly
    /// Hermitian.
    pub fn collide_fourier_real(&self, fh: &FourierField, gh: &FourierField) -> Result<FourierField> {
        self.evaluate(fh, gh, true)
    }

    fn evaluate(&self, fh: &FourierField, gh: &FourierField, hermitian: bool) -> Result<FourierField> {
        self.check_grid(&fh.grid)?;
        self.check_grid(&gh.grid)?;
        let syms = Symmetry::all();
        let perms: Vec<Permuted> = syms.iter().map(|s| self.permute(fh, gh, s)).collect();
        let cube = self.side.pow(3);
        let keep = |k: [i64; 3]| -> bool {
            if !hermitian {
                return true;
            }
            for c in k {
                if c != 0 {
                    return c > 0;
                }
            }
            true
        };
        let results: Vec<Vec<(usize, Complex64)>> = self
            .reps
            .par_iter()
            .enumerate()
            .map(|(r, &k0)| {
                let mut out = Vec::new();
                if k0 == [0, 0, 0] {
                    return out;
                }
                let row = &self.table[r * cube..(r + 1) * cube];
                let mut seen: Vec<[i64; 3]> = Vec::with_capacity(48);
                for s in &syms {
                    let k = s.apply(k0);
                    if seen.contains(&k) || !keep(k) {
                        continue;
                    }
                    seen.push(k);
                    let value = self.mode(row, &perms[s.id()], k0);
                    out.push((self.lattice(k), value));
                }
                out
            })
            .collect();
        let scale = self.grid.h_zeta.powi(3) / (2.0 * PI).powf(1.5);
        let mut q = self.grid.zeros();
        for list in results {
            for (idx, v) in list {
                q.values[idx] = v * scale;
            }
        }
        if hermitian {
            let h = self.half;
            for x in -h..=h {
                for y in -h..=h {
                    for z in -h..=h {
                        let k = [x, y, z];
                        if !keep(k) {
                            let mirror = q.values[self.lattice([-x, -y, -z])];
                            q.values[self.lattice(k)] = mirror.conj();
                        }
                    }
                }
            }
            let zero = self.lattice([0, 0, 0]);
            q.values[zero] = Complex64::new(q.values[zero].re, 0.0);
        }
        Ok(q)
    }

    /// `Q(f, g)` on the velocity grid. Returns the field and the imaginary
    /// residue discarded by the inverse transform.
    pub fn collide(&self, f: &VelocityField, g: &VelocityField) -> Result<(VelocityField, f64)> {
        let q = self.collide_fourier_real(&to_fourier(f), &to_fourier(g))?;
        from_fourier(&q)
    }
}

/// Largest grid the direct-sum oracle accepts.
pub const ORACLE_MAX_N: usize = 12;

/// Direct evaluation of `Q̂(ζ) = (2π)^{-3/2} h_ζ³ ∫_{|u|<R} G(u, ζ) D_u(ζ) du`
/// where `D_u(ζ_k) = Σ_m f̂(ζ_k − ξ_m) ĝ(ξ_m) e^{−iξ_m·u}` is the discrete
/// transform of the pair product `f(v) g(v − u)`.
///
/// The pair product is formed in velocity space on a grid refined by two
/// (trigonometric interpolation of `f` and of `g` shifted by `u`), where it
/// is resolved without wrap-around, and transformed back. The `u` integral
/// uses Gauss–Legendre in `|u|` and `cos θ` and the trapezoid rule in `φ`.
/// One pass serves several kernels since `D_u` does not depend on them.
pub fn collide_direct_oracle_multi(
    f: &VelocityField,
    g: &VelocityField,
    specs: &[KernelSpec],
    radius: f64,
) -> Result<Vec<VelocityField>> {
    let grid = f.grid;
    let n = grid.n;
    if n > ORACLE_MAX_N {
        return Err(Error::Precondition(format!(
            "direct oracle is limited to N <= {ORACLE_MAX_N}, got {n}"
        )));
    }
    if g.grid != grid {
        return Err(Error::GridMismatch("oracle inputs on different grids".into()));
    }
    let sgrid = grid.dual();
    let h = sgrid.h_zeta;
    let half = (n / 2 - 1) as i64;
    let fine = 2 * n;
    let fh = to_fourier(f);
    let gh = to_fourier(g);
    let lat = |j: [i64; 3]| -> usize {
        let c = (n / 2) as i64;
        let nn = n as i64;
        (((j[0] + c) * nn + (j[1] + c)) * nn + (j[2] + c)) as usize
    };
    let fine_idx = |j: [i64; 3]| -> usize {
        let m = fine as i64;
        let w = |x: i64| x.rem_euclid(m);
        ((w(j[0]) * m + w(j[1])) * m + w(j[2])) as usize
    };
    let parity = |j: [i64; 3]| if (j[0] + j[1] + j[2]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let mut modes: Vec<[i64; 3]> = Vec::new();
    for x in -half..=half {
        for y in -half..=half {
            for z in -half..=half {
                modes.push([x, y, z]);
            }
        }
    }

    // trigonometric interpolant of f on the refined grid
    let mut f_fine = vec![Complex64::new(0.0, 0.0); fine.pow(3)];
    for &j in &modes {
        f_fine[fine_idx(j)] = fh.values[lat(j)] * parity(j);
    }
    fft3(&mut f_fine, fine, true);

    // quadrature in u
    let xi_max = 3f64.sqrt() * half as f64 * h;
    let beta_max = specs.iter().fold(0.0f64, |m, s| m.max(s.beta()));
    let phase = radius * (xi_max + beta_max * xi_max);
    let n_r = (phase / 2.0).ceil() as usize + 14;
    let n_t = n_r;
    let n_p = phase.ceil() as usize + 20;
    let (xr, wr) = gauss_legendre(n_r);
    let (xt, wt) = gauss_legendre(n_t);
    let mut dirs = Vec::with_capacity(n_t * n_p);
    for (ct, w) in xt.iter().zip(&wt) {
        let st = (1.0 - ct * ct).sqrt();
        for k in 0..n_p {
            let phi = 2.0 * PI * (k as f64 + 0.5) / n_p as f64;
            dirs.push(([st * phi.cos(), st * phi.sin(), *ct], w * 2.0 * PI / n_p as f64));
        }
    }
    let zetas: Vec<[f64; 3]> = modes
        .iter()
        .map(|k| [k[0] as f64 * h, k[1] as f64 * h, k[2] as f64 * h])
        .collect();

    let per_radius: Vec<Vec<Vec<Complex64>>> = xr
        .par_iter()
        .zip(wr.par_iter())
        .map(|(&xrr, &wrr)| {
            let r = 0.5 * radius * (xrr + 1.0);
            let wr_scaled = 0.5 * radius * wrr * r * r;
            let mut acc = vec![vec![Complex64::new(0.0, 0.0); modes.len()]; specs.len()];
            let mut buf = vec![Complex64::new(0.0, 0.0); fine.pow(3)];
            for (dir, wd) in &dirs {
                let u = [r * dir[0], r * dir[1], r * dir[2]];
                buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for &m in &modes {
                    let ph = -(m[0] as f64 * u[0] + m[1] as f64 * u[1] + m[2] as f64 * u[2]) * h;
                    buf[fine_idx(m)] = gh.values[lat(m)] * parity(m) * Complex64::from_polar(1.0, ph);
                }
                fft3(&mut buf, fine, true);
                for (b, fv) in buf.iter_mut().zip(&f_fine) {
                    *b *= fv;
                }
                fft3(&mut buf, fine, false);
                let norm = 1.0 / (fine.pow(3) as f64);
                for (i, &k) in modes.iter().enumerate() {
                    let d = buf[fine_idx(k)] * parity(k) * norm;
                    for (s, spec) in specs.iter().enumerate() {
                        acc[s][i] += eval_g(spec, u, zetas[i]) * d * (wr_scaled * wd);
                    }
                }
            }
            acc
        })
        .collect();

    let scale = h.powi(3) / (2.0 * PI).powf(1.5);
    let mut out = Vec::with_capacity(specs.len());
    for s in 0..specs.len() {
        let mut q = sgrid.zeros();
        for (i, &k) in modes.iter().enumerate() {
            let mut total = Complex64::new(0.0, 0.0);
            for part in &per_radius {
                total += part[s][i];
            }
            q.values[lat(k)] = total * scale;
        }
        let zero = lat([0, 0, 0]);
        q.values[zero] = Complex64::new(0.0, 0.0);
        out.push(from_fourier(&q)?.0);
    }
    Ok(out)
}

/// Single-kernel form of [`collide_direct_oracle_multi`].
pub fn collide_direct_oracle(
    f: &VelocityField,
    g: &VelocityField,
    spec: &KernelSpec,
    radius: f64,
) -> Result<VelocityField> {
    Ok(collide_direct_oracle_multi(f, g, std::slice::from_ref(spec), radius)?.remove(0))
}
