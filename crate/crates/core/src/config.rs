//! Scenario configuration: flat `key = value` text with `#` comments.
//!
//! Every scenario name implies defaults for the kernel, sources, conservation
//! mode, grid and time stepping; explicit keys override them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::conserve::ConserveMode;
use crate::error::{Error, Result};
use crate::grid::build_grids;
use crate::kernel::{KernelSpec, C_LAMBDA_DEFAULT, DEFAULT_TABLE_RESOLUTION};
use crate::reference::bkw_t0;
use crate::sources::{SourceKind, SourceSpec, ThermostatSchedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    MaxwellElastic,
    Bkw,
    HardSphereElastic,
    Inelastic,
    InelasticDiffusion,
    SlowdownConstT,
    SlowdownDecayingT,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::MaxwellElastic,
        Scenario::Bkw,
        Scenario::HardSphereElastic,
        Scenario::Inelastic,
        Scenario::InelasticDiffusion,
        Scenario::SlowdownConstT,
        Scenario::SlowdownDecayingT,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::MaxwellElastic => "maxwell-elastic",
            Scenario::Bkw => "bkw",
            Scenario::HardSphereElastic => "hard-sphere-elastic",
            Scenario::Inelastic => "inelastic",
            Scenario::InelasticDiffusion => "inelastic-diffusion",
            Scenario::SlowdownConstT => "slowdown-const-T",
            Scenario::SlowdownDecayingT => "slowdown-decaying-T",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Scenario::ALL.iter().map(|c| c.name()).collect();
                Error::config("scenario", format!("unknown scenario `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrator {
    Euler,
    Rk2,
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Integrator::Euler),
            "rk2" => Ok(Integrator::Rk2),
            other => Err(Error::config("time.integrator", format!("expected euler or rk2, got `{other}`"))),
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Integrator::Euler => "euler",
            Integrator::Rk2 => "rk2",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub l: f64,
    pub lambda: f64,
    pub e: f64,
    pub c_lambda: f64,
    pub radius_factor: f64,
    pub table_resolution: usize,
    pub source: SourceSpec,
    pub conserve: ConserveMode,
    /// Temperature scale of the initial datum.
    pub init_temperature: f64,
    pub t_start: f64,
    pub t_final: f64,
    /// `None` selects `0.1/ν̂` from the collision-frequency scale.
    pub dt: Option<f64>,
    pub integrator: Integrator,
    pub out_dir: PathBuf,
    pub record_stride: usize,
    pub snapshot_times: Vec<f64>,
}

pub const KEYS: [&str; 23] = [
    "scenario",
    "grid.N",
    "grid.L",
    "kernel.lambda",
    "kernel.e",
    "kernel.C_lambda",
    "kernel.radius_factor",
    "kernel.table_resolution",
    "source.kind",
    "source.mu_diff",
    "source.theta",
    "source.thermostat_T",
    "source.thermostat_alpha",
    "source.zeta_prefactor",
    "conserve.mode",
    "init.temperature",
    "time.t_start",
    "time.t_final",
    "time.dt",
    "time.integrator",
    "output.dir",
    "output.record_stride",
    "output.snapshot_times",
];

/// Raw `key = value` pairs in file order; later duplicates win.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`"))
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::config(format!("line {}", lineno + 1), "empty key"));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses `key=value` override flags.
pub fn parse_override(flag: &str) -> Result<(String, String)> {
    let (k, v) = flag
        .split_once('=')
        .ok_or_else(|| Error::config(flag, "override must have the form key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}` as a number")))
}

fn float(key: &str, value: &str) -> Result<f64> {
    let x: f64 = num(key, value)?;
    if !x.is_finite() {
        return Err(Error::config(key, format!("value must be finite, got `{value}`")));
    }
    Ok(x)
}

/// Grid half-width, final time and initial temperature defaults per scenario.
/// `l: None` means `SLOWDOWN_L_PER_ROOT_T · √T_init`; `init_temperature: None`
/// means `𝒯(0) + 1`.
struct Defaults {
    l: Option<f64>,
    lambda: f64,
    e: f64,
    conserve: ConserveMode,
    source: &'static str,
    init_temperature: Option<f64>,
    t_start: f64,
    t_final: f64,
    dt: Option<f64>,
    snapshots: Vec<f64>,
}

/// Diffusion coefficient that puts the heated equilibrium at `T = 1` for
/// `e = 0.5`, `C₀ = 1/(4π)`, `ζ = 1`.
pub const DEFAULT_MU_DIFF: f64 = 0.09375;
pub const DEFAULT_THETA: f64 = 4.0 / 3.0;
pub const DEFAULT_DECAY_ZETA0: f64 = 0.25;
pub const DEFAULT_DECAY_ALPHA: f64 = 2.0 / 3.0;
/// Half-width per unit thermal speed of the datum in the thermostat runs.
pub const SLOWDOWN_L_PER_ROOT_T: f64 = 4.25;

fn defaults(s: Scenario) -> Defaults {
    let base = |l: Option<f64>, lambda: f64, e: f64, conserve, source, init_temperature, t_final: f64, snapshots| Defaults {
        l,
        lambda,
        e,
        conserve,
        source,
        init_temperature,
        t_start: 0.0,
        t_final,
        dt: None,
        snapshots,
    };
    match s {
        Scenario::MaxwellElastic => base(
            Some(10.0),
            0.0,
            1.0,
            ConserveMode::Elastic,
            "none",
            Some(1.0),
            5.0,
            vec![0.0, 1.0, 2.0, 5.0],
        ),
        Scenario::Bkw => {
            let t0 = bkw_t0();
            Defaults {
                t_start: t0,
                dt: Some(0.01),
                ..base(
                    Some(6.0),
                    0.0,
                    1.0,
                    ConserveMode::Elastic,
                    "none",
                    Some(1.0),
                    t0 + 2.0,
                    vec![t0, t0 + 1.0, t0 + 2.0],
                )
            }
        }
        Scenario::HardSphereElastic => base(
            Some(10.0),
            1.0,
            1.0,
            ConserveMode::Elastic,
            "none",
            Some(1.0),
            5.0,
            vec![0.0, 1.0, 2.0, 5.0],
        ),
        Scenario::Inelastic => base(
            Some(7.75),
            0.0,
            0.5,
            ConserveMode::Inelastic,
            "none",
            Some(1.0),
            8.0,
            vec![0.0, 2.0, 4.0, 8.0],
        ),
        Scenario::InelasticDiffusion => base(
            Some(6.5),
            0.0,
            0.5,
            ConserveMode::Inelastic,
            "diffusion",
            Some(2.0),
            40.0,
            vec![0.0, 10.0, 40.0],
        ),
        Scenario::SlowdownConstT => base(
            None,
            0.0,
            1.0,
            ConserveMode::Linear,
            "thermostat",
            None,
            14.0,
            (0..=14).map(f64::from).collect(),
        ),
        Scenario::SlowdownDecayingT => base(
            None,
            0.0,
            1.0,
            ConserveMode::Linear,
            "thermostat",
            None,
            3.0,
            vec![0.0, 1.0, 2.0, 3.0],
        ),
    }
}

impl ScenarioConfig {
    /// Scenario defaults with `overrides` applied in order. Unknown keys and
    /// inconsistent combinations are rejected before anything is allocated.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::config(k.as_str(), "unknown key"));
            }
            map.insert(k.as_str(), v.as_str());
        }
        let scenario: Scenario = map
            .get("scenario")
            .ok_or_else(|| Error::config("scenario", "missing required key"))?
            .parse()?;
        let d = defaults(scenario);
        let get = |k: &str| map.get(k).copied();

        let n: usize = match get("grid.N") {
            Some(v) => num("grid.N", v)?,
            None => 16,
        };

        let lambda = get("kernel.lambda").map(|v| float("kernel.lambda", v)).transpose()?.unwrap_or(d.lambda);
        let e = get("kernel.e").map(|v| float("kernel.e", v)).transpose()?.unwrap_or(d.e);
        let c_lambda = get("kernel.C_lambda")
            .map(|v| float("kernel.C_lambda", v))
            .transpose()?
            .unwrap_or(C_LAMBDA_DEFAULT);
        KernelSpec::new(lambda, e, c_lambda).map_err(|err| Error::config("kernel", err.to_string()))?;
        let radius_factor = get("kernel.radius_factor")
            .map(|v| float("kernel.radius_factor", v))
            .transpose()?
            .unwrap_or(1.0);
        if !(radius_factor > 0.0) {
            return Err(Error::config("kernel.radius_factor", "must be positive"));
        }
        let table_resolution: usize = match get("kernel.table_resolution") {
            Some(v) => num("kernel.table_resolution", v)?,
            None => DEFAULT_TABLE_RESOLUTION,
        };
        if table_resolution < 64 {
            return Err(Error::config("kernel.table_resolution", "must be at least 64"));
        }


        let source_kind = get("source.kind").unwrap_or(d.source);
        let zeta = get("source.zeta_prefactor")
            .map(|v| float("source.zeta_prefactor", v))
            .transpose()?
            .unwrap_or(1.0);
        let kind = match source_kind {
            "none" => SourceKind::None,
            "diffusion" => SourceKind::Diffusion {
                mu: get("source.mu_diff")
                    .map(|v| float("source.mu_diff", v))
                    .transpose()?
                    .unwrap_or(DEFAULT_MU_DIFF),
            },
            "thermostat" => {
                let theta = get("source.theta")
                    .map(|v| float("source.theta", v))
                    .transpose()?
                    .unwrap_or(DEFAULT_THETA);
                let decaying = scenario == Scenario::SlowdownDecayingT || get("source.thermostat_alpha").is_some();
                let schedule = if decaying {
                    ThermostatSchedule::decaying(
                        get("source.thermostat_T")
                            .map(|v| float("source.thermostat_T", v))
                            .transpose()?
                            .unwrap_or(DEFAULT_DECAY_ZETA0),
                        get("source.thermostat_alpha")
                            .map(|v| float("source.thermostat_alpha", v))
                            .transpose()?
                            .unwrap_or(DEFAULT_DECAY_ALPHA),
                    )?
                } else {
                    ThermostatSchedule::constant(
                        get("source.thermostat_T")
                            .map(|v| float("source.thermostat_T", v))
                            .transpose()?
                            .unwrap_or(1.0),
                    )?
                };
                SourceKind::Thermostat { theta, schedule }
            }
            other => {
                return Err(Error::config(
                    "source.kind",
                    format!("expected none, diffusion or thermostat, got `{other}`"),
                ))
            }
        };
        let source = SourceSpec::new(kind, zeta)?;

        let init_temperature = get("init.temperature")
            .map(|v| float("init.temperature", v))
            .transpose()?
            .unwrap_or_else(|| {
                d.init_temperature.unwrap_or_else(|| match kind {
                    SourceKind::Thermostat { schedule, .. } => schedule.value(0.0) + 1.0,
                    _ => 1.0,
                })
            });
        if !(init_temperature > 0.0) {
            return Err(Error::config("init.temperature", "must be positive"));
        }
        let l = match get("grid.L") {
            Some(v) => float("grid.L", v)?,
            None => d.l.unwrap_or(SLOWDOWN_L_PER_ROOT_T * init_temperature.sqrt()),
        };
        build_grids(n, l).map_err(|e| Error::config(if n < 4 || n % 2 != 0 { "grid.N" } else { "grid.L" }, e.to_string()))?;

        let conserve: ConserveMode = match get("conserve.mode") {
            Some(v) => v.parse()?,
            None => d.conserve,
        };
        if conserve == ConserveMode::Elastic && e < 1.0 {
            return Err(Error::config(
                "conserve.mode",
                format!("energy is not a collision invariant for e = {e} < 1; use `inelastic` (mass and momentum)"),
            ));
        }
        if conserve == ConserveMode::Elastic && !matches!(source.kind, SourceKind::None) {
            return Err(Error::config(
                "conserve.mode",
                "heating sources change the energy; use `inelastic` or `linear`",
            ));
        }
        if conserve == ConserveMode::Inelastic && matches!(source.kind, SourceKind::Thermostat { .. }) {
            return Err(Error::config(
                "conserve.mode",
                "the linear thermostat conserves only mass; use `linear`",
            ));
        }
        if matches!(source.kind, SourceKind::Thermostat { .. }) && lambda != 0.0 {
            return Err(Error::config("kernel.lambda", "the thermostat benchmark requires Maxwell molecules (lambda = 0)"));
        }

        let t_start = get("time.t_start")
            .map(|v| float("time.t_start", v))
            .transpose()?
            .unwrap_or(d.t_start);
        if scenario == Scenario::Bkw && t_start < bkw_t0() * (1.0 - 1e-14) {
            return Err(Error::config("time.t_start", format!("BKW starts at t >= {}", bkw_t0())));
        }
        let t_final = match get("time.t_final") {
            Some(v) => float("time.t_final", v)?,
            None if scenario == Scenario::Bkw => t_start + (d.t_final - d.t_start),
            None => d.t_final,
        };
        if t_final < t_start {
            return Err(Error::config("time.t_final", format!("must be >= t_start = {t_start}")));
        }
        let dt = match get("time.dt") {
            Some(v) => Some(float("time.dt", v)?),
            None => d.dt,
        };
        if let Some(dt) = dt {
            if !(dt > 0.0) {
                return Err(Error::config("time.dt", "must be positive"));
            }
        }
        let integrator: Integrator = match get("time.integrator") {
            Some(v) => v.parse()?,
            None => Integrator::Rk2,
        };
        let out_dir = PathBuf::from(get("output.dir").unwrap_or("out"));
        let record_stride: usize = match get("output.record_stride") {
            Some(v) => num("output.record_stride", v)?,
            None => 1,
        };
        if record_stride == 0 {
            return Err(Error::config("output.record_stride", "must be at least 1"));
        }
        let snapshot_times = match get("output.snapshot_times") {
            Some(v) if v.trim().is_empty() => Vec::new(),
            Some(v) => v
                .split(',')
                .map(|s| float("output.snapshot_times", s.trim()))
                .collect::<Result<Vec<f64>>>()?,
            None if scenario == Scenario::Bkw && t_start != d.t_start => vec![t_start, t_final],
            None => d.snapshots.into_iter().filter(|&s| s <= t_final).collect(),
        };

        Ok(Self {
            scenario,
            n,
            l,
            lambda,
            e,
            c_lambda,
            radius_factor,
            table_resolution,
            source,
            conserve,
            init_temperature,
            t_start,
            t_final,
            dt,
            integrator,
            out_dir,
            record_stride,
            snapshot_times,
        })
    }

    pub fn parse_str(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut pairs = parse_pairs(text)?;
        pairs.extend(overrides.iter().cloned());
        Self::from_pairs(&pairs)
    }

    pub fn from_file(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text, overrides)
    }

    /// Minimal config for `scenario` at resolution `n`.
    pub fn for_scenario(scenario: Scenario, n: usize) -> Result<Self> {
        Self::from_pairs(&[
            ("scenario".into(), scenario.name().into()),
            ("grid.N".into(), n.to_string()),
        ])
    }

    pub fn kernel(&self) -> KernelSpec {
        KernelSpec::new(self.lambda, self.e, self.c_lambda).expect("validated at parse time")
    }

    /// Canonical `key = value` rendering, parseable by [`ScenarioConfig::parse_str`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        line("scenario", self.scenario.name().into());
        line("grid.N", self.n.to_string());
        line("grid.L", self.l.to_string());
        line("kernel.lambda", self.lambda.to_string());
        line("kernel.e", self.e.to_string());
        line("kernel.C_lambda", self.c_lambda.to_string());
        line("kernel.radius_factor", self.radius_factor.to_string());
        line("kernel.table_resolution", self.table_resolution.to_string());
        match self.source.kind {
            SourceKind::None => line("source.kind", "none".into()),
            SourceKind::Diffusion { mu } => {
                line("source.kind", "diffusion".into());
                line("source.mu_diff", mu.to_string());
            }
            SourceKind::Thermostat { theta, schedule } => {
                line("source.kind", "thermostat".into());
                line("source.theta", theta.to_string());
                match schedule {
                    ThermostatSchedule::Constant { temperature } => line("source.thermostat_T", temperature.to_string()),
                    ThermostatSchedule::Decaying { zeta0, alpha } => {
                        line("source.thermostat_T", zeta0.to_string());
                        line("source.thermostat_alpha", alpha.to_string());
                    }
                }
            }
        }
        line("source.zeta_prefactor", self.source.zeta.to_string());
        line("conserve.mode", self.conserve.to_string());
        line("init.temperature", self.init_temperature.to_string());
        line("time.t_start", self.t_start.to_string());
        line("time.t_final", self.t_final.to_string());
        if let Some(dt) = self.dt {
            line("time.dt", dt.to_string());
        }
        line("time.integrator", self.integrator.to_string());
        line("output.dir", self.out_dir.display().to_string());
        line("output.record_stride", self.record_stride.to_string());
        line(
            "output.snapshot_times",
            self.snapshot_times.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
        );
        s
    }
}
