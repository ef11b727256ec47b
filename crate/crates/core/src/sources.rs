//! Heating sources added to the collision operator: the diffusion bath
//! `μΔf` and the linear thermostat `Θ Q(f, M_𝒯)`.
//!
//! Only equal masses are supported. A mass ratio `𝐦` would enter through
//! `β_eff = 2𝐦/(𝐦+1)` in the same kernel.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::collision::CollisionOperator;
use crate::error::{Error, Result};
use crate::grid::{FourierField, SpectralGrid, VelocityField};
use crate::reference::maxwellian;
use crate::transform::{from_fourier, to_fourier};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThermostatSchedule {
    Constant { temperature: f64 },
    /// `ζ₀ e^{−αt}`
    Decaying { zeta0: f64, alpha: f64 },
}

impl ThermostatSchedule {
    pub fn constant(temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::config(
                "source.thermostat_T",
                format!("thermostat temperature must be >= 0, got {temperature}"),
            ));
        }
        Ok(ThermostatSchedule::Constant { temperature })
    }

    pub fn decaying(zeta0: f64, alpha: f64) -> Result<Self> {
        if !(zeta0 >= 0.0) || !zeta0.is_finite() {
            return Err(Error::config(
                "source.thermostat_T",
                format!("thermostat prefactor must be >= 0, got {zeta0}"),
            ));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::config(
                "source.thermostat_alpha",
                format!("decay rate must be positive, got {alpha}"),
            ));
        }
        Ok(ThermostatSchedule::Decaying { zeta0, alpha })
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ThermostatSchedule::Constant { temperature } => temperature,
            ThermostatSchedule::Decaying { zeta0, alpha } => zeta0 * (-alpha * t).exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SourceKind {
    None,
    Diffusion { mu: f64 },
    Thermostat { theta: f64, schedule: ThermostatSchedule },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    /// `ζ` multiplying `Q(f, f)`.
    pub zeta: f64,
}

impl Default for SourceSpec {
    fn default() -> Self {
        Self {
            kind: SourceKind::None,
            zeta: 1.0,
        }
    }
}

impl SourceSpec {
    pub fn new(kind: SourceKind, zeta: f64) -> Result<Self> {
        if !(zeta >= 0.0) || !zeta.is_finite() {
            return Err(Error::config("source.zeta_prefactor", format!("must be >= 0, got {zeta}")));
        }
        match kind {
            SourceKind::Diffusion { mu } if !(mu > 0.0) || !mu.is_finite() => {
                return Err(Error::config("source.mu_diff", format!("must be positive, got {mu}")))
            }
            SourceKind::Thermostat { theta, .. } if !(theta > 0.0) || !theta.is_finite() => {
                return Err(Error::config("source.theta", format!("must be positive, got {theta}")))
            }
            _ => {}
        }
        Ok(Self { kind, zeta })
    }
}

/// `−μ |ζ|² f̂` mode by mode.
pub fn apply_diffusion(fh: &FourierField, mu: f64) -> FourierField {
    let grid = fh.grid;
    FourierField {
        grid,
        values: fh
            .values
            .iter()
            .enumerate()
            .map(|(idx, &z)| {
                let k = grid.point(idx);
                z * (-mu * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]))
            })
            .collect(),
    }
}

/// Transform of `M_𝒯` on the lattice. Temperatures below `h_v²` are not
/// resolved by the velocity grid and use the analytic transform.
pub fn thermostat_maxwellian_hat(grid: &SpectralGrid, temperature: f64) -> Result<FourierField> {
    if !(temperature >= 0.0) {
        return Err(Error::Precondition(format!(
            "thermostat temperature must be >= 0, got {temperature}"
        )));
    }
    let vel = grid.velocity();
    if temperature >= vel.h_v * vel.h_v {
        let m = vel.sample(|v| maxwellian(v[0] * v[0] + v[1] * v[1] + v[2] * v[2], temperature))?;
        Ok(to_fourier(&m))
    } else {
        let c = (2.0 * PI).powf(-1.5);
        Ok(FourierField {
            grid: *grid,
            values: (0..grid.len())
                .map(|idx| {
                    let k = grid.point(idx);
                    Complex64::new(c * (-0.5 * temperature * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2])).exp(), 0.0)
                })
                .collect(),
        })
    }
}

/// `Q(f, M_{𝒯(t)})`: the elastic bilinear operator with its second argument
/// frozen at the thermostat Maxwellian.
pub fn thermostat_operator(
    f: &VelocityField,
    schedule: &ThermostatSchedule,
    t: f64,
    linear: &CollisionOperator,
) -> Result<VelocityField> {
    let mh = thermostat_maxwellian_hat(linear.grid(), schedule.value(t))?;
    let q = linear.collide_fourier_real(&to_fourier(f), &mh)?;
    Ok(from_fourier(&q)?.0)
}

/// Right-hand side `ζ Q(f, f) + 𝒢(f)` assembled in Fourier space and
/// inverted once.
pub struct Rhs<'a> {
    pub op: &'a CollisionOperator,
    /// Linear thermostat kernel when it differs from `op`.
    pub linear: Option<&'a CollisionOperator>,
    pub source: SourceSpec,
}

impl<'a> Rhs<'a> {
    pub fn new(op: &'a CollisionOperator, source: SourceSpec) -> Self {
        Self {
            op,
            linear: None,
            source,
        }
    }

    pub fn with_linear(mut self, linear: &'a CollisionOperator) -> Self {
        self.linear = Some(linear);
        self
    }

    pub fn eval_fourier(&self, fh: &FourierField, t: f64) -> Result<FourierField> {
        let zeta = self.source.zeta;
        match self.source.kind {
            SourceKind::None => Ok(self.op.collide_fourier_real(fh, fh)?.scaled(zeta)),
            SourceKind::Diffusion { mu } => {
                let mut q = self.op.collide_fourier_real(fh, fh)?.scaled(zeta);
                q.add_assign_scaled(1.0, &apply_diffusion(fh, mu));
                Ok(q)
            }
            SourceKind::Thermostat { theta, schedule } => {
                let mh = thermostat_maxwellian_hat(&fh.grid, schedule.value(t))?;
                match self.linear {
                    None => {
                        // Q(f, ζf + ΘM) = ζQ(f, f) + ΘQ(f, M) by bilinearity
                        let mut g = fh.scaled(zeta);
                        g.add_assign_scaled(theta, &mh);
                        self.op.collide_fourier_real(fh, &g)
                    }
                    Some(lin) => {
                        let mut q = self.op.collide_fourier_real(fh, fh)?.scaled(zeta);
                        q.add_assign_scaled(theta, &lin.collide_fourier_real(fh, &mh)?);
                        Ok(q)
                    }
                }
            }
        }
    }

    pub fn eval(&self, f: &VelocityField, t: f64) -> Result<VelocityField> {
        let q = self.eval_fourier(&to_fourier(f), t)?;
        Ok(from_fourier(&q)?.0)
    }
}
