//! Benchmark catalogue: one entry per scenario binding a config to its
//! reference and tolerance, evaluated through [`crate::cli::compare_tables`].

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::cli::{compare_tables, moment_benchmark, slice_reference, slice_tables, write_artifacts, CompareReport, Scale};
use crate::config::{Scenario, ScenarioConfig};
use crate::error::{Error, Result};
use crate::stepper::{run_scenario, RunOutput, MQ_EXPONENTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    /// Minutes on one core.
    Smoke,
    /// Acceptance resolutions.
    Full,
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Tier::Smoke),
            "full" => Ok(Tier::Full),
            other => Err(Error::config("tier", format!("expected smoke or full, got `{other}`"))),
        }
    }
}

/// How a run is judged against its reference.
#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    /// Recorded moment series against the closed form at every record.
    MomentSeries,
    /// Last recorded moment against the closed form.
    TerminalMoment,
    /// Terminal x-slice against the reference on `f_exact ≥ 10⁻³ max`.
    TerminalSlice,
    /// Temperature stays at its initial discrete value.
    TemperatureConservation,
    /// Final/initial rescaled-moment ratios: `≤ factor` for `bounded`,
    /// `≥ factor` for `growing`.
    MomentRatios {
        bounded: Vec<f64>,
        growing: Vec<f64>,
        factor: f64,
    },
}

#[derive(Clone, Debug)]
pub struct BenchEntry {
    pub name: &'static str,
    pub scenario: Scenario,
    /// Name of the reference operation in [`crate::reference`].
    pub reference: &'static str,
    pub binding: Binding,
    pub smoke: (usize, f64),
    /// `(N, tolerance)` per tier.
    pub full: (usize, f64),
    pub overrides: Vec<(String, String)>,
}

impl BenchEntry {
    pub fn resolution(&self, tier: Tier) -> (usize, f64) {
        match tier {
            Tier::Smoke => self.smoke,
            Tier::Full => self.full,
        }
    }

    pub fn config(&self, tier: Tier) -> Result<ScenarioConfig> {
        let mut pairs = vec![
            ("scenario".to_string(), self.scenario.name().to_string()),
            ("grid.N".to_string(), self.resolution(tier).0.to_string()),
        ];
        pairs.extend(self.overrides.iter().cloned());
        ScenarioConfig::from_pairs(&pairs)
    }
}

pub fn catalogue() -> Vec<BenchEntry> {
    let entry = |name, scenario, reference, binding, smoke, full| BenchEntry {
        name,
        scenario,
        reference,
        binding,
        smoke,
        full,
        overrides: Vec::new(),
    };
    vec![
        entry(
            "maxwell-elastic",
            Scenario::MaxwellElastic,
            "maxwell_second_moment_exact",
            Binding::MomentSeries,
            (16, 0.10),
            (24, 0.05),
        ),
        entry("bkw", Scenario::Bkw, "bkw_exact", Binding::TerminalSlice, (16, 0.05), (32, 0.02)),
        entry(
            "hard-sphere-elastic",
            Scenario::HardSphereElastic,
            "temperature conservation",
            Binding::TemperatureConservation,
            (16, 1e-8),
            (24, 1e-8),
        ),
        entry(
            "inelastic",
            Scenario::Inelastic,
            "inelastic_energy_exact",
            Binding::MomentSeries,
            (16, 0.02),
            (16, 0.02),
        ),
        entry(
            "inelastic-diffusion",
            Scenario::InelasticDiffusion,
            "diffusion_temperature_exact",
            Binding::TerminalMoment,
            (16, 0.03),
            (16, 0.03),
        ),
        entry(
            "slowdown-const-T",
            Scenario::SlowdownConstT,
            "self_similar_f",
            Binding::TerminalSlice,
            (16, 0.05),
            (24, 0.05),
        ),
        entry(
            "slowdown-decaying-T",
            Scenario::SlowdownDecayingT,
            "rescaled moments",
            Binding::MomentRatios {
                bounded: vec![1.0, 1.3, 1.45],
                growing: vec![1.7, 2.0],
                factor: 3.0,
            },
            (22, 3.0),
            (26, 3.0),
        ),
    ]
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub name: String,
    pub n: usize,
    pub passed: bool,
    pub detail: String,
    pub compare: Option<CompareReport>,
}

impl fmt::Display for BenchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (N={}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.n,
            self.detail
        )
    }
}

/// Judges a finished run. Aborted runs fail.
pub fn evaluate(entry: &BenchEntry, tier: Tier, output: &RunOutput) -> Result<BenchOutcome> {
    let (n, tol) = entry.resolution(tier);
    let mut outcome = BenchOutcome {
        name: entry.name.to_string(),
        n,
        passed: false,
        detail: String::new(),
        compare: None,
    };
    if let Some(e) = &output.aborted {
        outcome.detail = format!("run aborted: {e}");
        return Ok(outcome);
    }
    match &entry.binding {
        Binding::MomentSeries | Binding::TerminalMoment => {
            let b = moment_benchmark(output)?
                .ok_or_else(|| Error::Compare(format!("{} has no closed-form moment reference", entry.name)))?;
            let (mut computed, mut reference) = (b.computed, b.reference);
            if entry.binding == Binding::TerminalMoment {
                computed.rows = computed.rows.split_off(computed.rows.len() - 1);
                reference.rows = reference.rows.split_off(reference.rows.len() - 1);
            }
            let rep = compare_tables(&computed, &reference, tol, b.scale)?;
            outcome.passed = rep.passed();
            outcome.detail = format!("max rel error {:.3e} (tol {tol})", rep.max_rel());
            outcome.compare = Some(rep);
        }
        Binding::TerminalSlice => {
            let exact = slice_reference(&output.config)
                .ok_or_else(|| Error::Compare(format!("{} has no slice reference", entry.name)))?;
            let (t, f) = (output.final_time, &output.final_state);
            let (computed, reference) = slice_tables(f, t, exact.as_ref(), true)?;
            let rep = compare_tables(&computed, &reference, tol, |_| Scale::ColumnMax)?;
            outcome.passed = rep.passed();
            outcome.detail = format!("sup-norm rel error {:.3e} at t = {t} (tol {tol})", rep.max_rel());
            outcome.compare = Some(rep);
        }
        Binding::TemperatureConservation => {
            let t0 = output.records[0].temperature;
            let drift = output.records.iter().fold(0.0f64, |m, r| m.max((r.temperature - t0).abs()));
            outcome.passed = drift <= tol;
            outcome.detail = format!("max |T(t) − T(0)| = {drift:.3e} (tol {tol})");
        }
        Binding::MomentRatios {
            bounded,
            growing,
            factor,
        } => {
            let (first, last) = match (output.mq.first(), output.mq.last()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::Compare("no rescaled moments recorded".into())),
            };
            let positive = output.mq.iter().all(|(_, row)| row.iter().all(|&m| m > 0.0));
            let mut ok = positive;
            let mut parts = Vec::new();
            for (j, q) in MQ_EXPONENTS.iter().enumerate() {
                let ratio = last.1[j] / first.1[j];
                if bounded.contains(q) {
                    ok &= ratio <= *factor;
                } else if growing.contains(q) {
                    ok &= ratio >= *factor;
                } else {
                    continue;
                }
                parts.push(format!("q={q}: {ratio:.3}"));
            }
            outcome.passed = ok;
            outcome.detail = format!(
                "ratios at t = {}: {}; positive {positive}",
                last.0,
                parts.join(", ")
            );
        }
    }
    Ok(outcome)
}

/// Runs one entry, writing artifacts under `out_root/<name>` when given.
pub fn run_entry(entry: &BenchEntry, tier: Tier, out_root: Option<&Path>) -> Result<BenchOutcome> {
    let config = entry.config(tier)?;
    let output = run_scenario(&config)?;
    if let Some(root) = out_root {
        write_artifacts(&output, &root.join(entry.name))?;
    }
    evaluate(entry, tier, &output)
}

/// `bench run [--tier smoke|full] [--only name]`.
pub fn bench_run(tier: Tier, only: Option<&str>, out_root: Option<&Path>) -> Result<Vec<BenchOutcome>> {
    let entries: Vec<BenchEntry> = catalogue().into_iter().filter(|e| only.map_or(true, |n| e.name == n)).collect();
    if entries.is_empty() {
        return Err(Error::config("only", format!("no benchmark named `{}`", only.unwrap_or_default())));
    }
    entries.iter().map(|e| run_entry(e, tier, out_root)).collect()
}
