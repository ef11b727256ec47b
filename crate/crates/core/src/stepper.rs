//! Forward Euler and midpoint RK2 with the conservation projection applied
//! after every stage, and the scenario driver.

use crate::collision::CollisionOperator;
use crate::config::{Integrator, Scenario, ScenarioConfig};
use crate::conserve::ConstraintSystem;
use crate::error::{Error, Result};
use crate::grid::{VelocityField, VelocityGrid};
use crate::kernel::{KernelCache, KernelSpec};
use crate::observables::{compute_moments, rescaled_moment, MomentSet, MU_ONE};
use crate::reference::{bkw_exact, maxwellian};
use crate::sources::{Rhs, SourceKind};

/// Exponents of the rescaled moments recorded on thermostat runs.
pub const MQ_EXPONENTS: [f64; 7] = [1.0, 1.3, 1.45, 1.5, 1.55, 1.7, 2.0];

#[derive(Clone, Debug)]
pub struct StepResult {
    pub f: VelocityField,
    /// `‖f^{n+1} − f̃^{n+1}‖∞` of the final-stage projection.
    pub corr_norm: f64,
}

fn finite_or_abort(f: &VelocityField, t: f64) -> Result<()> {
    f.check_finite().map_err(|e| Error::NumericalAbort {
        t,
        message: e.to_string(),
    })
}

/// `f^{n+1} = project(f^n + dt·k₁)` with `k₁ = rhs(f^n, t)` supplied.
pub fn step_euler_with(f: &VelocityField, k1: &VelocityField, t: f64, dt: f64, sys: &ConstraintSystem) -> Result<StepResult> {
    let (next, corr) = sys.project(&f.axpy(dt, k1));
    finite_or_abort(&next, t + dt)?;
    Ok(StepResult { f: next, corr_norm: corr })
}

pub fn step_euler<R>(f: &VelocityField, t: f64, dt: f64, rhs: R, sys: &ConstraintSystem) -> Result<StepResult>
where
    R: Fn(&VelocityField, f64) -> Result<VelocityField>,
{
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
    }
    let k1 = rhs(f, t)?;
    step_euler_with(f, &k1, t, dt, sys)
}

/// Midpoint RK2: `f̃ = project(f^n + dt/2·k₁)`,
/// `f^{n+1} = project(f^n + dt·rhs(f̃, t + dt/2))`.
pub fn step_rk2_with<R>(f: &VelocityField, k1: &VelocityField, t: f64, dt: f64, rhs: R, sys: &ConstraintSystem) -> Result<StepResult>
where
    R: Fn(&VelocityField, f64) -> Result<VelocityField>,
{
    let (mid, _) = sys.project(&f.axpy(0.5 * dt, k1));
    finite_or_abort(&mid, t + 0.5 * dt)?;
    let k2 = rhs(&mid, t + 0.5 * dt)?;
    let (next, corr) = sys.project(&f.axpy(dt, &k2));
    finite_or_abort(&next, t + dt)?;
    Ok(StepResult { f: next, corr_norm: corr })
}

pub fn step_rk2<R>(f: &VelocityField, t: f64, dt: f64, rhs: R, sys: &ConstraintSystem) -> Result<StepResult>
where
    R: Fn(&VelocityField, f64) -> Result<VelocityField>,
{
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
    }
    let k1 = rhs(f, t)?;
    step_rk2_with(f, &k1, t, dt, rhs, sys)
}

/// Bimodal datum `γ M_T(v − V₁) + (1−γ) M_T(v − V₂)` with `γ = 1/2`,
/// `V₁ = (−2, 2, 0)`, `V₂ = (2, 0, 0)`.
pub fn bimodal_datum(grid: &VelocityGrid, temperature: f64) -> Result<VelocityField> {
    let v1 = [-2.0, 2.0, 0.0];
    let v2 = [2.0, 0.0, 0.0];
    grid.sample(|v| {
        let d1: f64 = (0..3).map(|i| (v[i] - v1[i]).powi(2)).sum();
        let d2: f64 = (0..3).map(|i| (v[i] - v2[i]).powi(2)).sum();
        0.5 * maxwellian(d1, temperature) + 0.5 * maxwellian(d2, temperature)
    })
}

/// Zero-mean pair of Maxwellians `½ M_{T/2}(v ∓ c e_x)` with `c² = 3T/2`,
/// so that the temperature of the mixture is `T`.
pub fn symmetric_pair_datum(grid: &VelocityGrid, temperature: f64) -> Result<VelocityField> {
    let c = (1.5 * temperature).sqrt();
    let tau = 0.5 * temperature;
    grid.sample(|v| {
        let r2 = v[1] * v[1] + v[2] * v[2];
        0.5 * maxwellian((v[0] - c).powi(2) + r2, tau) + 0.5 * maxwellian((v[0] + c).powi(2) + r2, tau)
    })
}

pub fn initial_datum(config: &ScenarioConfig, grid: &VelocityGrid) -> Result<VelocityField> {
    match config.scenario {
        Scenario::MaxwellElastic | Scenario::HardSphereElastic | Scenario::Inelastic => {
            bimodal_datum(grid, config.init_temperature)
        }
        Scenario::Bkw => {
            let eta = config.init_temperature.sqrt();
            bkw_exact([0.0; 3], config.t_start, eta)?;
            grid.sample(|v| bkw_exact(v, config.t_start, eta).unwrap_or(f64::NAN))
        }
        Scenario::InelasticDiffusion | Scenario::SlowdownConstT | Scenario::SlowdownDecayingT => {
            symmetric_pair_datum(grid, config.init_temperature)
        }
    }
}

/// `0.1/ν̂` with `ν̂ = ρ₀ C_λ 4π c^λ` and `c` the rms speed of the datum.
pub fn default_dt(spec: &KernelSpec, f0: &VelocityField, weights: &[f64]) -> f64 {
    let grid = f0.grid;
    let (mut rho, mut s2) = (0.0, 0.0);
    for (idx, (&f, &w)) in f0.values.iter().zip(weights).enumerate() {
        let v = grid.point(idx);
        rho += w * f;
        s2 += w * f * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    let speed = (s2 / rho).sqrt();
    let nu = rho * spec.c_lambda() * 4.0 * std::f64::consts::PI * speed.powf(spec.lambda());
    0.1 / nu
}

#[derive(Debug)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub dt: f64,
    pub steps: usize,
    pub records: Vec<MomentSet>,
    /// Fields at the step times nearest to the requested snapshot times.
    pub snapshots: Vec<(f64, VelocityField)>,
    /// `(t, m_q for q in MQ_EXPONENTS)` on thermostat runs.
    pub mq: Vec<(f64, Vec<f64>)>,
    pub final_state: VelocityField,
    pub final_time: f64,
    /// Error that stopped the run early; the outputs above hold everything
    /// recorded up to the last valid state.
    pub aborted: Option<Error>,
}

/// Runs a validated scenario. Builds the kernel tables, the constraint
/// system from the discrete moments of the datum, and advances to `t_final`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput> {
    run_scenario_with(config, |_, _| {})
}

/// As [`run_scenario`], calling `progress(step, t)` after every step.
pub fn run_scenario_with<P: FnMut(usize, f64)>(config: &ScenarioConfig, mut progress: P) -> Result<RunOutput> {
    let grid = VelocityGrid::new(config.n, config.l)?;
    let weights = grid.quadrature_weights();
    let spec = config.kernel();
    let f0 = initial_datum(config, &grid)?;
    let cache = KernelCache::new(spec, &grid, config.radius_factor, config.table_resolution)?;
    let op = CollisionOperator::new(&cache, &grid);
    let linear_spec = KernelSpec::new(0.0, 1.0, spec.c_lambda())?;
    let linear_op = match config.source.kind {
        SourceKind::Thermostat { .. } if linear_spec != spec => {
            let lc = KernelCache::new(linear_spec, &grid, config.radius_factor, config.table_resolution)?;
            Some(CollisionOperator::new(&lc, &grid))
        }
        _ => None,
    };
    let mut rhs_ctx = Rhs::new(&op, config.source);
    if let Some(lin) = &linear_op {
        rhs_ctx = rhs_ctx.with_linear(lin);
    }
    let rhs = |f: &VelocityField, t: f64| rhs_ctx.eval(f, t);
    let sys = ConstraintSystem::from_initial(&f0, &weights, config.conserve)?;

    let span = config.t_final - config.t_start;
    let dt_target = config.dt.unwrap_or_else(|| default_dt(&spec, &f0, &weights));
    let steps = if span > 0.0 { ((span / dt_target).round() as usize).max(1) } else { 0 };
    let dt = if steps > 0 { span / steps as f64 } else { dt_target };
    let mut snapshot_steps: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|&s| (((s - config.t_start) / dt).round().max(0.0) as usize).min(steps))
        .collect();
    snapshot_steps.dedup();
    let track_mq = matches!(config.source.kind, SourceKind::Thermostat { .. });

    let mut out = RunOutput {
        config: config.clone(),
        dt,
        steps,
        records: Vec::new(),
        snapshots: Vec::new(),
        mq: Vec::new(),
        final_state: f0.clone(),
        final_time: config.t_start,
        aborted: None,
    };
    let mut f = f0;
    let mut corr = 0.0;
    for n in 0..=steps {
        let t = config.t_start + n as f64 * dt;
        let k1 = match rhs(&f, t) {
            Ok(k) => k,
            Err(e) => {
                out.aborted = Some(e);
                break;
            }
        };
        let stationarity = sys.apply_lambda(&k1.values).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if n % config.record_stride == 0 || n == steps {
            match compute_moments(&f, &weights, t) {
                Ok(mut m) => {
                    m.corr_norm = corr;
                    m.stationarity_norm = stationarity;
                    out.records.push(m);
                }
                Err(e) => {
                    out.aborted = Some(e);
                    break;
                }
            }
            if track_mq {
                let row = MQ_EXPONENTS.iter().map(|&q| rescaled_moment(&f, &weights, q, t, MU_ONE)).collect();
                out.mq.push((t, row));
            }
        }
        if snapshot_steps.contains(&n) {
            out.snapshots.push((t, f.clone()));
        }
        if n == steps {
            break;
        }
        let step = match config.integrator {
            Integrator::Euler => step_euler_with(&f, &k1, t, dt, &sys),
            Integrator::Rk2 => step_rk2_with(&f, &k1, t, dt, rhs, &sys),
        };
        match step {
            Ok(s) => {
                f = s.f;
                corr = s.corr_norm;
                out.final_state = f.clone();
                out.final_time = t + dt;
            }
            Err(e) => {
                out.aborted = Some(e);
                break;
            }
        }
        progress(n + 1, t + dt);
    }
    Ok(out)
}
