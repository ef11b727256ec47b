//! Lagrange-multiplier projection `f = f̃ + Cᵀ(CCᵀ)⁻¹(a − C f̃)` onto the
//! affine set of distributions with prescribed discrete moments.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{VelocityField, VelocityGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConserveMode {
    /// mass, momentum, energy
    Elastic,
    /// mass, momentum
    Inelastic,
    /// mass
    Linear,
    None,
}

impl ConserveMode {
    pub fn constraint_count(&self) -> usize {
        match self {
            ConserveMode::Elastic => 5,
            ConserveMode::Inelastic => 4,
            ConserveMode::Linear => 1,
            ConserveMode::None => 0,
        }
    }
}

impl FromStr for ConserveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elastic" => Ok(ConserveMode::Elastic),
            "inelastic" => Ok(ConserveMode::Inelastic),
            "linear" => Ok(ConserveMode::Linear),
            "none" => Ok(ConserveMode::None),
            other => Err(Error::config(
                "conserve.mode",
                format!("expected elastic, inelastic, linear or none, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for ConserveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConserveMode::Elastic => "elastic",
            ConserveMode::Inelastic => "inelastic",
            ConserveMode::Linear => "linear",
            ConserveMode::None => "none",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    mode: ConserveMode,
    rows: Vec<Vec<f64>>,
    targets: Vec<f64>,
    factor: Option<Cholesky<f64, Dyn>>,
}

/// Rows `ω`, `v_x ω`, `v_y ω`, `v_z ω`, `|v|² ω` truncated to the mode.
pub fn constraint_rows(grid: &VelocityGrid, weights: &[f64], mode: ConserveMode) -> Vec<Vec<f64>> {
    let nc = mode.constraint_count();
    let mut rows = vec![Vec::with_capacity(weights.len()); nc];
    for (idx, &w) in weights.iter().enumerate() {
        let v = grid.point(idx);
        let all = [w, v[0] * w, v[1] * w, v[2] * w, (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * w];
        let pick: &[usize] = match mode {
            ConserveMode::Elastic => &[0, 1, 2, 3, 4],
            ConserveMode::Inelastic => &[0, 1, 2, 3],
            ConserveMode::Linear => &[0],
            ConserveMode::None => &[],
        };
        for (r, &p) in pick.iter().enumerate() {
            rows[r].push(all[p]);
        }
    }
    rows
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ConstraintSystem {
    pub fn build(grid: &VelocityGrid, weights: &[f64], mode: ConserveMode, targets: Vec<f64>) -> Result<Self> {
        Self::from_rows(mode, constraint_rows(grid, weights, mode), targets)
    }

    /// Targets taken from the discrete moments of `f`.
    pub fn from_initial(f: &VelocityField, weights: &[f64], mode: ConserveMode) -> Result<Self> {
        let rows = constraint_rows(&f.grid, weights, mode);
        let targets = rows.iter().map(|r| dot(r, &f.values)).collect();
        Self::from_rows(mode, rows, targets)
    }

    pub fn from_rows(mode: ConserveMode, rows: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        let nc = rows.len();
        if targets.len() != nc {
            return Err(Error::SingularConstraints(format!(
                "{nc} constraint rows but {} targets",
                targets.len()
            )));
        }
        let factor = if nc == 0 {
            None
        } else {
            let gram = DMatrix::from_fn(nc, nc, |i, j| dot(&rows[i], &rows[j]));
            Some(Cholesky::new(gram).ok_or_else(|| {
                Error::SingularConstraints("C Cᵀ is not positive definite".into())
            })?)
        };
        Ok(Self {
            mode,
            rows,
            targets,
            factor,
        })
    }

    pub fn mode(&self) -> ConserveMode {
        self.mode
    }

    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `C x`
    pub fn apply_c(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| dot(r, x)).collect()
    }

    /// `x + Cᵀ (CCᵀ)⁻¹ rhs`
    fn add_correction(&self, x: &mut [f64], rhs: Vec<f64>) {
        if let Some(factor) = &self.factor {
            let mult = factor.solve(&DVector::from_vec(rhs));
            for (r, m) in self.rows.iter().zip(mult.iter()) {
                for (xi, ri) in x.iter_mut().zip(r) {
                    *xi += m * ri;
                }
            }
        }
    }

    /// Projected field and the correction ∞-norm `‖f − f̃‖∞`.
    pub fn project(&self, f: &VelocityField) -> (VelocityField, f64) {
        let mut out = f.values.clone();
        if self.factor.is_some() {
            let scale = 1.0 + self.targets.iter().fold(0.0f64, |m, a| m.max(a.abs()));
            for _ in 0..3 {
                let c = self.apply_c(&out);
                let rhs: Vec<f64> = self.targets.iter().zip(&c).map(|(a, c)| a - c).collect();
                if rhs.iter().all(|r| r.abs() <= 1e-14 * scale) {
                    break;
                }
                self.add_correction(&mut out, rhs);
            }
        }
        let corr = out
            .iter()
            .zip(&f.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        (
            VelocityField {
                grid: f.grid,
                values: out,
            },
            corr,
        )
    }

    /// `Λ x = x − Cᵀ(CCᵀ)⁻¹ C x`
    pub fn apply_lambda(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        let cx: Vec<f64> = self.apply_c(x).iter().map(|v| -v).collect();
        self.add_correction(&mut out, cx);
        out
    }

    /// `‖C f − a‖∞`
    pub fn residual(&self, f: &VelocityField) -> f64 {
        self.apply_c(&f.values)
            .iter()
            .zip(&self.targets)
            .fold(0.0f64, |m, (c, a)| m.max((c - a).abs()))
    }
}

#[derive(Clone, Debug)]
pub struct ProjectionReport {
    /// max ‖Λ(Λx) − Λx‖∞ / ‖x‖∞
    pub idempotence: f64,
    /// max ‖C Λx‖∞ / (‖C‖ ‖x‖∞)
    pub annihilation: f64,
    /// max |⟨Λx, y⟩ − ⟨x, Λy⟩| / (‖x‖₂ ‖y‖₂)
    pub symmetry: f64,
    pub tolerance: f64,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.idempotence <= self.tolerance && self.annihilation <= self.tolerance && self.symmetry <= self.tolerance
    }
}

/// Applies `Λ` to random vectors without forming the `N³ × N³` matrix.
pub fn projection_operator_checks(sys: &ConstraintSystem, samples: usize, seed: u64) -> ProjectionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = sys.rows.first().map(|r| r.len()).unwrap_or(0);
    let row_norm = sys.rows.iter().fold(0.0f64, |m, r| m.max(r.iter().map(|v| v.abs()).sum()));
    let mut report = ProjectionReport {
        idempotence: 0.0,
        annihilation: 0.0,
        symmetry: 0.0,
        tolerance: 1e-12,
    };
    for _ in 0..samples {
        let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let lx = sys.apply_lambda(&x);
        let llx = sys.apply_lambda(&lx);
        let idem = llx.iter().zip(&lx).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / xn;
        let cl = sys.apply_c(&lx).iter().fold(0.0f64, |m, v| m.max(v.abs())) / (row_norm * xn).max(f64::MIN_POSITIVE);
        let ly = sys.apply_lambda(&y);
        let n2 = dot(&x, &x).sqrt() * dot(&y, &y).sqrt();
        let sym = (dot(&lx, &y) - dot(&x, &ly)).abs() / n2;
        report.idempotence = report.idempotence.max(idem);
        report.annihilation = report.annihilation.max(cl);
        report.symmetry = report.symmetry.max(sym);
    }
    report
}
