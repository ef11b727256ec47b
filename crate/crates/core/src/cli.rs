//! Run artifacts on disk and the CSV comparison used by the benchmark
//! harness and the `compare` subcommand.
//!
//! Every numeric cell is written with the shortest representation that parses
//! back to the same `f64`, so identical runs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{Error, Result};
use crate::kernel::C_LAMBDA_DEFAULT;
use crate::observables::{axis_slice, Axis, MomentSet, MOMENT_COLUMNS};
use crate::reference::{
    bkw_exact, diffusion_temperature_exact, inelastic_energy_exact, maxwell_second_moment_exact, self_similar_f,
};
use crate::sources::{SourceKind, ThermostatSchedule};
use crate::stepper::{run_scenario, RunOutput, MQ_EXPONENTS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_ABORT: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

/// Slice points where the reference is below this fraction of its maximum
/// are left out of slice comparisons.
pub const SLICE_CUTOFF: f64 = 1e-3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonFinite { .. }
        | Error::ImaginaryResidue { .. }
        | Error::SingularConstraints(_)
        | Error::InvalidState(_)
        | Error::NumericalAbort { .. } => EXIT_ABORT,
        _ => EXIT_VALIDATION,
    }
}

/// Shortest round-trip rendering of `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Header plus rows of numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| fmt_f64(x))).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Compare(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Compare(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string()?)?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
        let mut table = Table::new(columns);
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|cell| {
                    cell.parse::<f64>()
                        .map_err(|_| Error::Compare(format!("row {}: `{cell}` is not a number", i + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Compare(e.to_string())
}

/// Normalization of the error in one compared column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scale {
    /// Divide by the largest `|reference|` in the column.
    ColumnMax,
    /// Divide by `|reference|` row by row.
    Pointwise,
    /// Divide by a fixed number.
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnReport {
    pub name: String,
    pub max_abs: f64,
    pub max_rel: f64,
    /// Rows whose relative error exceeds the tolerance.
    pub failed_rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub key: String,
    pub rows: usize,
    pub tol: f64,
    pub columns: Vec<ColumnReport>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.columns.iter().all(|c| c.failed_rows.is_empty())
    }

    pub fn max_rel(&self) -> f64 {
        self.columns.iter().fold(0.0, |m, c| m.max(c.max_rel))
    }

    /// One `column,max_abs,max_rel,failed_rows,status` line per column and a
    /// final overall line.
    pub fn summary(&self) -> String {
        let mut s = String::from("column,max_abs,max_rel,failed_rows,status\n");
        for c in &self.columns {
            let status = if c.failed_rows.is_empty() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                s,
                "{},{:e},{:e},{},{}",
                c.name,
                c.max_abs,
                c.max_rel,
                c.failed_rows.len(),
                status
            );
        }
        let _ = writeln!(
            s,
            "overall: {} ({} rows keyed by {}, tol {}, max rel {:e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.rows,
            self.key,
            self.tol,
            self.max_rel()
        );
        s
    }
}

/// Compares every column present in both tables, rows matched by position.
/// The first column of `reference` is the row key and must agree in both.
pub fn compare_tables<S: Fn(&str) -> Scale>(
    computed: &Table,
    reference: &Table,
    tol: f64,
    scale: S,
) -> Result<CompareReport> {
    if !(tol >= 0.0) {
        return Err(Error::Compare(format!("tolerance must be >= 0, got {tol}")));
    }
    if computed.rows.is_empty() || reference.rows.is_empty() {
        return Err(Error::Compare("empty series".into()));
    }
    if computed.rows.len() != reference.rows.len() {
        return Err(Error::Compare(format!(
            "series lengths differ: {} computed rows vs {} reference rows",
            computed.rows.len(),
            reference.rows.len()
        )));
    }
    let key = reference.columns.first().cloned().unwrap_or_default();
    let ck = computed
        .column_index(&key)
        .ok_or_else(|| Error::Compare(format!("computed table lacks key column `{key}`")))?;
    for (i, (a, b)) in computed.rows.iter().zip(&reference.rows).enumerate() {
        if (a[ck] - b[0]).abs() > 1e-9 * (1.0 + b[0].abs()) {
            return Err(Error::Compare(format!(
                "row {} keys differ: {key} = {} vs {}",
                i + 1,
                a[ck],
                b[0]
            )));
        }
    }
    let mut columns = Vec::new();
    for (rj, name) in reference.columns.iter().enumerate().skip(1) {
        let Some(cj) = computed.column_index(name) else { continue };
        let col_max = reference.rows.iter().fold(0.0f64, |m, r| m.max(r[rj].abs()));
        let mut rep = ColumnReport {
            name: name.clone(),
            max_abs: 0.0,
            max_rel: 0.0,
            failed_rows: Vec::new(),
        };
        for (i, (a, b)) in computed.rows.iter().zip(&reference.rows).enumerate() {
            let abs = (a[cj] - b[rj]).abs();
            let denom = match scale(name) {
                Scale::ColumnMax => col_max,
                Scale::Pointwise => b[rj].abs(),
                Scale::Fixed(s) => s,
            };
            let rel = if abs == 0.0 { 0.0 } else { abs / denom };
            rep.max_abs = rep.max_abs.max(abs);
            rep.max_rel = rep.max_rel.max(rel);
            if !(rel <= tol) {
                rep.failed_rows.push(i);
            }
        }
        columns.push(rep);
    }
    if columns.is_empty() {
        return Err(Error::Compare("no value columns in common".into()));
    }
    Ok(CompareReport {
        key,
        rows: reference.rows.len(),
        tol,
        columns,
    })
}

/// `compare <computed.csv> <reference.csv> --tol r` with column-max scaling.
pub fn compare_files(computed: &Path, reference: &Path, tol: f64) -> Result<CompareReport> {
    compare_tables(&Table::read(computed)?, &Table::read(reference)?, tol, |_| Scale::ColumnMax)
}

pub fn moments_table(records: &[MomentSet]) -> Table {
    let mut t = Table::new(MOMENT_COLUMNS);
    for m in records {
        t.push(m.csv_row());
    }
    t
}

/// Closed-form or quadrature reference along a slice, when the scenario has one.
pub fn slice_reference(config: &ScenarioConfig) -> Option<Box<dyn Fn(f64, [f64; 3]) -> Result<f64>>> {
    match (config.scenario, config.source.kind) {
        (Scenario::Bkw, _) => {
            let eta = config.init_temperature.sqrt();
            Some(Box::new(move |t, v| bkw_exact(v, t, eta)))
        }
        (
            Scenario::SlowdownConstT,
            SourceKind::Thermostat {
                schedule: ThermostatSchedule::Constant { temperature },
                ..
            },
        ) if config.init_temperature > temperature => {
            let a = config.init_temperature - temperature;
            Some(Box::new(move |t, v| {
                self_similar_f((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt(), temperature, a, t)
            }))
        }
        _ => None,
    }
}

/// Computed moment series and its reference with identical headers, plus
/// the error normalization per column.
pub struct MomentBenchmark {
    pub computed: Table,
    pub reference: Table,
    pub scale: fn(&str) -> Scale,
}

fn maxwell_scale(name: &str) -> Scale {
    // equilibrium scales of the bimodal datum: M_yy(∞) = 11/3, r_y(∞) = 43/6
    if name.starts_with('r') {
        Scale::Fixed(43.0 / 6.0)
    } else {
        Scale::Fixed(11.0 / 3.0)
    }
}

fn pointwise(_: &str) -> Scale {
    Scale::Pointwise
}

pub fn moment_benchmark(output: &RunOutput) -> Result<Option<MomentBenchmark>> {
    let c = &output.config;
    let recs = &output.records;
    if recs.is_empty() {
        return Ok(None);
    }
    match c.scenario {
        Scenario::MaxwellElastic
            if c.lambda == 0.0 && c.init_temperature == 1.0 && c.c_lambda == C_LAMBDA_DEFAULT =>
        {
            let cols = ["t", "M11", "M12", "M22", "M33", "r1", "r2"];
            let mut computed = Table::new(cols);
            let mut reference = Table::new(cols);
            for m in recs {
                let f = &m.momentum_flow;
                computed.push(vec![m.t, f[0][0], f[0][1], f[1][1], f[2][2], m.energy_flow[0], m.energy_flow[1]]);
                let (me, re) = maxwell_second_moment_exact(m.t);
                reference.push(vec![m.t, me[0][0], me[0][1], me[1][1], me[2][2], re[0], re[1]]);
            }
            Ok(Some(MomentBenchmark {
                computed,
                reference,
                scale: maxwell_scale,
            }))
        }
        Scenario::Inelastic => {
            let spec = c.kernel();
            if spec.lambda() != 0.0 || c.c_lambda != C_LAMBDA_DEFAULT {
                return Ok(None);
            }
            let kinetic = |m: &MomentSet| m.trace() / (2.0 * m.rho);
            let k0 = kinetic(&recs[0]);
            let bulk = recs[0].bulk_velocity;
            let mut computed = Table::new(["t", "K"]);
            let mut reference = Table::new(["t", "K"]);
            for m in recs {
                computed.push(vec![m.t, kinetic(m)]);
                reference.push(vec![m.t, inelastic_energy_exact(m.t, spec.beta(), k0, bulk)]);
            }
            Ok(Some(MomentBenchmark {
                computed,
                reference,
                scale: pointwise,
            }))
        }
        Scenario::InelasticDiffusion => {
            let SourceKind::Diffusion { mu } = c.source.kind else { return Ok(None) };
            if c.lambda != 0.0 {
                return Ok(None);
            }
            let t0 = recs[0].temperature;
            let mut computed = Table::new(["t", "T"]);
            let mut reference = Table::new(["t", "T"]);
            for m in recs {
                computed.push(vec![m.t, m.temperature]);
                let exact =
                    diffusion_temperature_exact(m.t - c.t_start, mu, c.source.zeta, c.c_lambda, c.e, t0)?;
                reference.push(vec![m.t, exact]);
            }
            Ok(Some(MomentBenchmark {
                computed,
                reference,
                scale: pointwise,
            }))
        }
        _ => Ok(None),
    }
}

/// `(v, f)` and `(v, f_exact)` along the x axis, restricted to nodes where
/// `f_exact ≥ SLICE_CUTOFF · max f_exact` when `restrict` is set.
pub fn slice_tables(
    f: &crate::grid::VelocityField,
    t: f64,
    exact: &dyn Fn(f64, [f64; 3]) -> Result<f64>,
    restrict: bool,
) -> Result<(Table, Table)> {
    let slice = axis_slice(f, Axis::X);
    let ex = slice
        .iter()
        .map(|&(v, _)| exact(t, [v, 0.0, 0.0]))
        .collect::<Result<Vec<f64>>>()?;
    let peak = ex.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut computed = Table::new(["v", "f"]);
    let mut reference = Table::new(["v", "f"]);
    for (&(v, fv), &e) in slice.iter().zip(&ex) {
        if restrict && e < SLICE_CUTOFF * peak {
            continue;
        }
        computed.push(vec![v, fv]);
        reference.push(vec![v, e]);
    }
    Ok((computed, reference))
}

/// File-name form of a time: shortest round-trip digits.
pub fn time_label(t: f64) -> String {
    fmt_f64(t)
}

/// Writes every artifact of a finished or aborted run into `dir`:
/// `config.txt`, `moments.csv`, `slices/<t>.csv`, and where available
/// `report.csv`, `series.csv` + `reference.csv`, `mq.csv`.
pub fn write_artifacts(output: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir.join("slices"))?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, text)?;
        written.push(p);
        Ok(())
    };
    put("config.txt", output.config.to_text())?;
    put("moments.csv", moments_table(&output.records).to_csv_string()?)?;

    let exact = slice_reference(&output.config);
    let mut report = Table::new(["t", "v", "f_computed", "f_exact", "abs_err", "rel_err"]);
    for (t, f) in &output.snapshots {
        let mut slice = Table::new(if exact.is_some() { vec!["v", "f", "f_exact"] } else { vec!["v", "f"] });
        match &exact {
            Some(ex) => {
                let (comp, refr) = slice_tables(f, *t, ex.as_ref(), false)?;
                let peak = refr.rows.iter().fold(0.0f64, |m, r| m.max(r[1].abs()));
                for (a, b) in comp.rows.iter().zip(&refr.rows) {
                    slice.push(vec![a[0], a[1], b[1]]);
                    let abs = (a[1] - b[1]).abs();
                    report.push(vec![*t, a[0], a[1], b[1], abs, abs / peak]);
                }
            }
            None => {
                for (v, fv) in axis_slice(f, Axis::X) {
                    slice.push(vec![v, fv]);
                }
            }
        }
        put(&format!("slices/{}.csv", time_label(*t)), slice.to_csv_string()?)?;
    }
    if exact.is_some() {
        put("report.csv", report.to_csv_string()?)?;
    }

    if let Some(b) = moment_benchmark(output)? {
        let mut report = String::from("t,quantity,computed,exact,abs_err,rel_err\n");
        for (a, r) in b.computed.rows.iter().zip(&b.reference.rows) {
            for (j, name) in b.reference.columns.iter().enumerate().skip(1) {
                let abs = (a[j] - r[j]).abs();
                let denom = match (b.scale)(name) {
                    Scale::Fixed(s) => s,
                    _ => r[j].abs(),
                };
                let _ = writeln!(
                    report,
                    "{},{name},{},{},{},{}",
                    fmt_f64(a[0]),
                    fmt_f64(a[j]),
                    fmt_f64(r[j]),
                    fmt_f64(abs),
                    fmt_f64(abs / denom)
                );
            }
        }
        put("report.csv", report)?;
        put("series.csv", b.computed.to_csv_string()?)?;
        put("reference.csv", b.reference.to_csv_string()?)?;
    }

    if !output.mq.is_empty() {
        let mut cols = vec!["t".to_string()];
        cols.extend(MQ_EXPONENTS.iter().map(|q| format!("q={}", fmt_f64(*q))));
        let mut mq = Table::new(cols);
        for (t, row) in &output.mq {
            let mut r = vec![*t];
            r.extend(row);
            mq.push(r);
        }
        put("mq.csv", mq.to_csv_string()?)?;
    }
    Ok(written)
}

/// Runs `config` and writes its artifacts to `config.out_dir`. An aborted
/// run still writes everything recorded and is reported through
/// `RunOutput::aborted`.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    let output = run_scenario(config)?;
    write_artifacts(&output, &config.out_dir)?;
    Ok(output)
}
