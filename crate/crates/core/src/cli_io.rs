//! Configuration loading, result serialization and the `rda` command line.
//!
//! Configs are TOML with five tables (`scenario`, `grid`, `integrator`,
//! `diagnostics`, `output`); see the README for every key. Validation walks
//! the whole document and reports every problem with its key path.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use toml::{Table, Value};

use crate::diagnostics::{fit_decay_rate, linear_exponent_suite, ExponentRow, FitWindow};
use crate::error::{Error, Result};
use crate::integrator::{run_simulation, IntegratorConfig, RunRecord, Status};
use crate::nonlinearity::{classify_system, Category, Classification, ViolationKind};
use crate::scenarios::{
    gaussian_initial_data, linear_gaussian_exact, scan_parameter, InitialData, RunSetup, ScanResult, Scenario,
    ScenarioParams, SCENARIO_NAMES,
};
use crate::spectral::Grid;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_AMPLITUDE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 1024, length: 200.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsConfig {
    pub fit_window: FitWindow,
    /// Include envelope maxima in the summary.
    pub envelope: bool,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            fit_window: FitWindow::default(),
            envelope: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub csv: bool,
    pub json: bool,
    /// Write full physical fields per snapshot.
    pub fields: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            csv: true,
            json: true,
            fields: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid: GridConfig,
    pub integrator: IntegratorConfig,
    pub diagnostics: DiagnosticsConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn setup(&self) -> RunSetup {
        RunSetup {
            n: self.grid.n,
            length: self.grid.length,
            integrator: self.integrator.clone(),
            fit_window: self.diagnostics.fit_window,
        }
    }
}

/// Accumulates violations while walking the document.
struct Walker {
    errors: Vec<String>,
}

impl Walker {
    fn push(&mut self, path: &str, msg: impl std::fmt::Display) {
        self.errors.push(format!("`{path}`: {msg}"));
    }

    fn number(&mut self, path: &str, v: &Value) -> Option<f64> {
        match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.push(path, format!("expected a number, got {}", v.type_str()));
                None
            }
        }
    }

    fn integer(&mut self, path: &str, v: &Value) -> Option<i64> {
        match v {
            Value::Integer(i) => Some(*i),
            _ => {
                self.push(path, format!("expected an integer, got {}", v.type_str()));
                None
            }
        }
    }

    fn boolean(&mut self, path: &str, v: &Value) -> Option<bool> {
        match v {
            Value::Boolean(b) => Some(*b),
            _ => {
                self.push(path, format!("expected a boolean, got {}", v.type_str()));
                None
            }
        }
    }

    fn string<'a>(&mut self, path: &str, v: &'a Value) -> Option<&'a str> {
        match v {
            Value::String(s) => Some(s),
            _ => {
                self.push(path, format!("expected a string, got {}", v.type_str()));
                None
            }
        }
    }

    fn numbers(&mut self, path: &str, v: &Value) -> Option<Vec<f64>> {
        let Value::Array(items) = v else {
            self.push(path, format!("expected an array of numbers, got {}", v.type_str()));
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            out.push(self.number(&format!("{path}[{i}]"), item)?);
        }
        Some(out)
    }

    fn table<'a>(&mut self, path: &str, v: &'a Value) -> Option<&'a Table> {
        match v {
            Value::Table(t) => Some(t),
            _ => {
                self.push(path, format!("expected a table, got {}", v.type_str()));
                None
            }
        }
    }
}

/// Read and validate a run configuration.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Validate a configuration document held in memory.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(vec![format!("malformed TOML: {}", e.message())]))?;
    let mut w = Walker { errors: Vec::new() };

    for key in doc.keys() {
        if !["scenario", "grid", "integrator", "diagnostics", "output"].contains(&key.as_str()) {
            w.push(key, "unknown key");
        }
    }

    let scenario = match doc.get("scenario").and_then(|v| w.table("scenario", v)) {
        Some(t) => read_scenario(&mut w, t),
        None => {
            if !doc.contains_key("scenario") {
                w.push("scenario", "missing table");
            }
            None
        }
    };

    let mut grid = GridConfig::default();
    if let Some(t) = doc.get("grid").and_then(|v| w.table("grid", v)) {
        for (key, v) in t {
            let path = format!("grid.{key}");
            match key.as_str() {
                "N" => {
                    if let Some(n) = w.integer(&path, v) {
                        match usize::try_from(n) {
                            Ok(n) => grid.n = n,
                            Err(_) => w.push(&path, format!("must be positive, got {n}")),
                        }
                    }
                }
                "L" => {
                    if let Some(l) = w.number(&path, v) {
                        grid.length = l;
                    }
                }
                _ => w.push(&path, "unknown key"),
            }
        }
    }
    let built_grid = match Grid::new(grid.n, grid.length) {
        Ok(g) => Some(g),
        Err(e) => {
            let key = if grid.n < 16 || !grid.n.is_power_of_two() { "grid.N" } else { "grid.L" };
            w.push(key, e);
            None
        }
    };

    let mut integrator = IntegratorConfig::default();
    if let Some(t) = doc.get("integrator").and_then(|v| w.table("integrator", v)) {
        for (key, v) in t {
            let path = format!("integrator.{key}");
            let slot = match key.as_str() {
                "dt" => &mut integrator.dt,
                "t_end" => &mut integrator.t_end,
                "output_every" => &mut integrator.output_every,
                "blowup_factor" => &mut integrator.blowup_factor,
                "boundary_threshold" => &mut integrator.boundary_threshold,
                "margin_fraction" => &mut integrator.margin_fraction,
                "resolution_threshold" => &mut integrator.resolution_threshold,
                "pad_ratio" => {
                    integrator.pad_ratio = w.number(&path, v);
                    continue;
                }
                "keep_fields" => {
                    integrator.keep_fields = w.boolean(&path, v).unwrap_or(false);
                    continue;
                }
                _ => {
                    w.push(&path, "unknown key");
                    continue;
                }
            };
            if let Some(x) = w.number(&path, v) {
                *slot = x;
            }
        }
    }
    for (key, msg) in integrator.violations() {
        w.push(&format!("integrator.{key}"), msg);
    }

    let mut diagnostics = DiagnosticsConfig::default();
    if let Some(t) = doc.get("diagnostics").and_then(|v| w.table("diagnostics", v)) {
        for (key, v) in t {
            let path = format!("diagnostics.{key}");
            match key.as_str() {
                "fit_window" => match w.numbers(&path, v).as_deref() {
                    Some(&[a, b]) if (0.0..1.0).contains(&a) && a < b && b <= 1.0 => {
                        diagnostics.fit_window = FitWindow { start: a, end: b };
                    }
                    Some(_) => w.push(&path, "expected [start, end] fractions with 0 <= start < end <= 1"),
                    None => {}
                },
                "envelope" => {
                    if let Some(b) = w.boolean(&path, v) {
                        diagnostics.envelope = b;
                    }
                }
                _ => w.push(&path, "unknown key"),
            }
        }
    }

    let mut output = OutputConfig::default();
    if let Some(t) = doc.get("output").and_then(|v| w.table("output", v)) {
        for (key, v) in t {
            let path = format!("output.{key}");
            match key.as_str() {
                "directory" => {
                    if let Some(s) = w.string(&path, v) {
                        output.directory = PathBuf::from(s);
                    }
                }
                "formats" => {
                    let Value::Array(items) = v else {
                        w.push(&path, "expected an array of strings");
                        continue;
                    };
                    output.csv = false;
                    output.json = false;
                    for (i, item) in items.iter().enumerate() {
                        match w.string(&format!("{path}[{i}]"), item) {
                            Some("csv") => output.csv = true,
                            Some("json") => output.json = true,
                            Some(other) => w.push(&format!("{path}[{i}]"), format!("unknown format `{other}`")),
                            None => {}
                        }
                    }
                }
                "fields" => {
                    if let Some(b) = w.boolean(&path, v) {
                        output.fields = b;
                    }
                }
                _ => w.push(&path, "unknown key"),
            }
        }
    }
    if output.fields {
        integrator.keep_fields = true;
    }

    if let (Some(s), Some(g)) = (&scenario, &built_grid) {
        if let Err(e) = s.init.sample(g) {
            match e {
                Error::InvalidParameter { name, reason } => w.push(&format!("scenario.{name}"), reason),
                other => w.push("scenario", other),
            }
        }
    }

    match scenario {
        Some(scenario) if w.errors.is_empty() => Ok(RunConfig {
            scenario,
            grid,
            integrator,
            diagnostics,
            output,
        }),
        _ => Err(Error::Config(w.errors)),
    }
}

fn read_scenario(w: &mut Walker, t: &Table) -> Option<Scenario> {
    let name = match t.get("name") {
        Some(v) => w.string("scenario.name", v)?,
        None => {
            w.push("scenario.name", "missing");
            return None;
        }
    };
    let Some(mut params) = ScenarioParams::defaults(name) else {
        w.push(
            "scenario.name",
            format!("unknown scenario `{name}`; expected one of {}", SCENARIO_NAMES.join(", ")),
        );
        return None;
    };

    // Whole-vector keys first: they fix the component count.
    let n = match (&mut params, t.get("d"), t.get("c")) {
        (ScenarioParams::Linear { d, c } | ScenarioParams::Custom { d, c, .. }, dv, cv) => {
            if let Some(v) = dv.and_then(|v| w.numbers("scenario.d", v)) {
                *d = v;
            }
            match cv.and_then(|v| w.numbers("scenario.c", v)) {
                Some(v) => *c = v,
                None if c.len() != d.len() => *c = vec![0.0; d.len()],
                None => {}
            }
            if c.len() != d.len() {
                w.push("scenario.c", format!("expected {} velocities, got {}", d.len(), c.len()));
            }
            d.len()
        }
        (p, dv, cv) => {
            if dv.is_some() {
                w.push("scenario.d", format!("not an argument of `{}`", p.name()));
            }
            if cv.is_some() {
                w.push("scenario.c", format!("not an argument of `{}`", p.name()));
            }
            p.n()
        }
    };
    if let ScenarioParams::Custom { f, .. } = &mut params {
        *f = vec![String::new(); n];
        match t.get("f") {
            Some(Value::Array(items)) if items.len() == n => {
                for (i, item) in items.iter().enumerate() {
                    if let Some(s) = w.string(&format!("scenario.f[{i}]"), item) {
                        f[i] = s.to_string();
                    }
                }
            }
            Some(_) => w.push("scenario.f", format!("expected an array of {n} strings")),
            None => {}
        }
    } else if t.contains_key("f") {
        w.push("scenario.f", format!("not an argument of `{name}`"));
    }

    let mut scenario = Scenario {
        params,
        init: InitialData::uniform(n, DEFAULT_AMPLITUDE),
    };
    for (key, v) in t {
        let path = format!("scenario.{key}");
        match key.as_str() {
            "name" | "d" | "c" | "f" => {}
            "amplitude" | "width" | "center" if matches!(v, Value::Array(_)) => {
                if let Some(values) = w.numbers(&path, v) {
                    if values.len() != n {
                        w.push(&path, format!("expected {n} values, got {}", values.len()));
                        continue;
                    }
                    for (i, x) in values.into_iter().enumerate() {
                        // cannot fail: the key and index are in range
                        let _ = scenario.set(&format!("{key}{}", i + 1), x);
                    }
                }
            }
            _ => {
                let Some(x) = w.number(&path, v) else { continue };
                match scenario.set(key, x) {
                    Ok(()) => {}
                    Err(Error::UnknownParameter(_)) => w.push(&path, format!("unknown key for scenario `{name}`")),
                    Err(e) => w.push(&path, e),
                }
            }
        }
    }

    if let Err(e) = scenario.params.build() {
        match e {
            Error::InvalidParameter { name, reason } => w.push(&format!("scenario.{name}"), reason),
            other => w.push("scenario", other),
        }
        return None;
    }
    Some(scenario)
}

/// Column names of the time-series CSV for `n` components.
pub fn timeseries_header(n: usize) -> Vec<String> {
    const PER_COMPONENT: [&str; 9] = [
        "sup_u", "sup_du", "n00", "n10", "n01", "n11", "n10_2", "envelope_u", "envelope_du",
    ];
    let mut cols = vec!["t".to_string()];
    for i in 1..=n {
        cols.extend(PER_COMPONENT.iter().map(|c| format!("{c}_{i}")));
    }
    cols.push("eta".to_string());
    cols
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per snapshot, 17 significant digits, LF line endings.
pub fn write_timeseries(record: &RunRecord, path: &Path) -> Result<()> {
    let n = record.spec.n();
    let mut out = timeseries_header(n).join(",");
    out.push('\n');
    for s in &record.snapshots {
        let mut row = vec![fmt_num(s.t)];
        for i in 0..n {
            let nm = &s.norms[i];
            for x in [
                s.sup_u[i],
                s.sup_du[i],
                nm.n00,
                nm.n10,
                nm.n01,
                nm.n11,
                nm.n10_2,
                s.envelope_u[i],
                s.envelope_du[i],
            ] {
                row.push(fmt_num(x));
            }
        }
        row.push(fmt_num(s.eta));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parse a CSV written by [`write_timeseries`] back into header and rows.
pub fn read_timeseries(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .map(|l| l.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Config(vec![format!("row {}: {e}", i + 1)]))?;
        if row.len() != header.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} columns", header.len()),
                found: format!("{} in row {}", row.len(), i + 1),
            });
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// One `x,u1..un` CSV per kept snapshot plus an `index.csv` of times.
pub fn write_fields(record: &RunRecord, grid: &Grid, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut index = String::from("index,t\n");
    for (j, (t, u)) in record.fields.iter().enumerate() {
        let _ = writeln!(index, "{j},{}", fmt_num(*t));
        let mut out = String::from("x");
        for i in 1..=u.len() {
            let _ = write!(out, ",u{i}");
        }
        out.push('\n');
        for (p, x) in grid.x().iter().enumerate() {
            out.push_str(&fmt_num(*x));
            for row in u {
                out.push(',');
                out.push_str(&fmt_num(row[p]));
            }
            out.push('\n');
        }
        fs::write(dir.join(format!("fields_{j:05}.csv")), out)?;
    }
    fs::write(dir.join("index.csv"), index)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct TermRow {
    pub component: usize,
    pub term: String,
    pub p: u32,
    pub category: Category,
    pub mixed: bool,
    pub burgers: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ViolationRow {
    pub kind: ViolationKind,
    pub component: usize,
    pub detail: String,
}

fn term_table(c: &Classification) -> (Vec<TermRow>, Vec<ViolationRow>) {
    let terms = c
        .terms
        .iter()
        .map(|t| TermRow {
            component: t.component,
            term: t.term.clone(),
            p: t.class.p,
            category: t.class.category,
            mixed: t.class.is_mixed,
            burgers: t.class.is_burgers,
        })
        .collect();
    let violations = c
        .violations
        .iter()
        .map(|v| ViolationRow {
            kind: v.kind,
            component: v.component,
            detail: v.detail.clone(),
        })
        .collect();
    (terms, violations)
}

/// Terminal status as written to summaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusSummary {
    Completed,
    BlowupAt(f64),
    BoundaryContaminatedAt(f64),
}

impl From<Status> for StatusSummary {
    fn from(s: Status) -> Self {
        match s {
            Status::Completed => StatusSummary::Completed,
            Status::BlowUp { t_star } => StatusSummary::BlowupAt(t_star),
            Status::BoundaryContaminated { t_c } => StatusSummary::BoundaryContaminatedAt(t_c),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifySummary {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: ScenarioParams,
    pub terms: Vec<TermRow>,
    pub violations: Vec<ViolationRow>,
    pub verdict: &'static str,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvelopeMax {
    pub envelope_u: f64,
    pub envelope_du: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: Scenario,
    pub grid: GridConfig,
    pub integrator: IntegratorConfig,
    pub terms: Vec<TermRow>,
    pub violations: Vec<ViolationRow>,
    pub verdict: &'static str,
    pub status: StatusSummary,
    pub t_final: f64,
    pub fit_window: (f64, f64),
    /// Slopes are `null` when the run did not complete or the window holds
    /// too few samples.
    pub sup_u_slope: Option<f64>,
    pub sup_u_stderr: Option<f64>,
    pub sup_du_slope: Option<f64>,
    pub sup_du_stderr: Option<f64>,
    pub eta_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_max: Option<EnvelopeMax>,
}

pub fn classify_summary(params: &ScenarioParams) -> Result<ClassifySummary> {
    let c = classify_system(&params.build()?);
    let (terms, violations) = term_table(&c);
    Ok(ClassifySummary {
        tool: "rda",
        version: VERSION,
        scenario: params.clone(),
        terms,
        violations,
        verdict: c.verdict(),
    })
}

pub fn run_summary(config: &RunConfig, record: &RunRecord) -> RunSummary {
    let (terms, violations) = term_table(&record.classification);
    let t_final = record.last_time();
    let window = config.diagnostics.fit_window.resolve(config.integrator.t_end);
    let fit = |series: Vec<(f64, f64)>| match record.status {
        Status::Completed => fit_decay_rate(&series, window).ok(),
        _ => None,
    };
    let fu = fit(record.sup_u_series());
    let fdu = fit(record.sup_du_series());
    let envelope_max = config.diagnostics.envelope.then(|| {
        let max = |f: fn(&crate::diagnostics::DiagnosticsRecord) -> f64| {
            record.snapshots.iter().map(f).fold(0.0, f64::max)
        };
        EnvelopeMax {
            envelope_u: max(|s| s.envelope_u.iter().copied().fold(0.0, f64::max)),
            envelope_du: max(|s| s.envelope_du.iter().copied().fold(0.0, f64::max)),
        }
    });
    RunSummary {
        tool: "rda",
        version: VERSION,
        scenario: config.scenario.clone(),
        grid: config.grid,
        integrator: config.integrator.clone(),
        terms,
        violations,
        verdict: record.classification.verdict(),
        status: record.status.into(),
        t_final,
        fit_window: window,
        sup_u_slope: fu.map(|f| f.slope),
        sup_u_stderr: fu.map(|f| f.stderr),
        sup_du_slope: fdu.map(|f| f.slope),
        sup_du_stderr: fdu.map(|f| f.stderr),
        eta_max: record.eta_max(),
        envelope_max,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub scan: &'a ScanResult,
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Summary JSON of a run.
pub fn write_summary(config: &RunConfig, record: &RunRecord, path: &Path) -> Result<()> {
    write_json(&run_summary(config, record), path)
}

/// Summary JSON of a scan.
pub fn write_scan_summary(scan: &ScanResult, path: &Path) -> Result<()> {
    write_json(
        &ScanSummary {
            tool: "rda",
            version: VERSION,
            scan,
        },
        path,
    )
}

/// One row per scanned value.
pub fn write_scan_csv(scan: &ScanResult, path: &Path) -> Result<()> {
    let opt = |x: Option<f64>| x.map_or_else(String::new, fmt_num);
    let mut out = format!("{},status,verdict,sup_u_slope,blowup_time,eta_max\n", scan.parameter);
    for r in &scan.rows {
        let status = match r.status {
            Status::Completed => "completed",
            Status::BlowUp { .. } => "blowup",
            Status::BoundaryContaminated { .. } => "boundary_contaminated",
        };
        let _ = writeln!(
            out,
            "{},{status},{},{},{},{}",
            fmt_num(r.value),
            r.verdict,
            opt(r.sup_u_slope),
            opt(r.blowup_time),
            fmt_num(r.eta_max)
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Run one configured simulation and write its artifacts.
pub fn execute_run(config: &RunConfig) -> Result<RunRecord> {
    let grid = Grid::new(config.grid.n, config.grid.length)?;
    let spec = config.scenario.params.build()?;
    let init = config.scenario.init.sample(&grid)?;
    let record = run_simulation(&spec, &init, &grid, &config.integrator)?;
    let dir = &config.output.directory;
    fs::create_dir_all(dir)?;
    if config.output.csv {
        write_timeseries(&record, &dir.join("timeseries.csv"))?;
    }
    if config.output.json {
        write_summary(config, &record, &dir.join("summary.json"))?;
    }
    if config.output.fields {
        write_fields(&record, &grid, &dir.join("fields"))?;
    }
    Ok(record)
}

/// Max pointwise error of the linear solver against the drifting Gaussian,
/// for `d = 1` and `c ∈ {-1, 1}`, sampled every `output_every`.
pub fn linear_exactness_error(n: usize, length: f64, t_end: f64, dt: f64) -> Result<f64> {
    let grid = Grid::new(n, length)?;
    let spec = crate::scenarios::build_linear(vec![1.0, 1.0], vec![-1.0, 1.0])?;
    let init = gaussian_initial_data(&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0], &grid)?;
    let config = IntegratorConfig {
        dt,
        t_end,
        output_every: (t_end / 20.0).max(dt),
        keep_fields: true,
        ..IntegratorConfig::default()
    };
    let record = run_simulation(&spec, &init, &grid, &config)?;
    if record.status != Status::Completed {
        return Err(Error::Fit(format!("linear run ended with {:?}", record.status)));
    }
    let mut err = 0.0_f64;
    for (t, u) in &record.fields {
        for (i, &c) in spec.c().iter().enumerate() {
            for (x, v) in grid.x().iter().zip(&u[i]) {
                err = err.max((v - linear_gaussian_exact(1.0, c, *x, *t)?).abs());
            }
        }
    }
    Ok(err)
}

/// Exponent suite on the drifting-Gaussian family, `d = (1, 1)`,
/// `c = (1, -1)`, unit Gaussians.
pub fn linear_suite(n: usize, length: f64, t_end: f64, dt: f64) -> Result<Vec<ExponentRow>> {
    let grid = Grid::new(n, length)?;
    let init = gaussian_initial_data(&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0], &grid)?;
    let config = IntegratorConfig {
        dt,
        t_end,
        output_every: (t_end / 400.0).max(dt),
        ..IntegratorConfig::default()
    };
    linear_exponent_suite(&[1.0, 1.0], &[1.0, -1.0], &init, &grid, &config)
}

#[derive(Parser, Debug)]
#[command(name = "rda", version, about = "Reaction-diffusion-advection simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the nonlinearity of a named system and print the verdict.
    Classify(ClassifyArgs),
    /// Run one simulation from a config file.
    Run(RunArgs),
    /// Run a config once per value of one scenario parameter.
    Scan(ScanArgs),
    /// Check the linear solver against exact Gaussians and the linear decay exponents.
    VerifyLinear(VerifyLinearArgs),
    /// Run a decay scenario and check fitted sup-norm slopes.
    VerifyDecay(VerifyDecayArgs),
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    system: String,
    /// Builder arguments as `--name value` pairs, e.g. `--r 2 --c1 1`;
    /// `--f1 EXPR` sets custom nonlinearities.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "ARGS")]
    rest: Vec<String>,
    /// Also write the classification summary JSON here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    parameter: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    values: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyLinearArgs {
    #[arg(long = "N", default_value_t = 1024)]
    n: usize,
    #[arg(long = "L", default_value_t = 200.0)]
    length: f64,
    #[arg(long, default_value_t = 10.0)]
    t_end: f64,
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    /// Grid and horizon of the exponent suite.
    #[arg(long = "suite-N", default_value_t = 4096)]
    suite_n: usize,
    #[arg(long = "suite-L", default_value_t = 800.0)]
    suite_length: f64,
    #[arg(long, default_value_t = 200.0)]
    suite_t_end: f64,
    /// Allowed distance between fitted and predicted exponents.
    #[arg(long, default_value_t = 0.1)]
    slope_tolerance: f64,
}

#[derive(Args, Debug)]
struct VerifyDecayArgs {
    /// Named acceptance scenario: `toy` or `cas3`.
    #[arg(long, conflicts_with = "config")]
    scenario: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Accepted `lo,hi` range of the ‖u‖∞ slope.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    sup_u: Option<Vec<f64>>,
    /// Accepted `lo,hi` range of the ‖∂x u‖∞ slope.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    sup_du: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Config of a named decay scenario with its default slope windows.
pub fn decay_preset(name: &str) -> Option<(RunConfig, (f64, f64), Option<(f64, f64)>)> {
    let base = |params: ScenarioParams| RunConfig {
        scenario: Scenario {
            init: InitialData::uniform(params.n(), 0.05),
            params,
        },
        grid: GridConfig { n: 4096, length: 800.0 },
        integrator: IntegratorConfig {
            dt: 0.05,
            t_end: 200.0,
            output_every: 0.5,
            ..IntegratorConfig::default()
        },
        diagnostics: DiagnosticsConfig::default(),
        output: OutputConfig {
            directory: PathBuf::from(format!("out/{name}")),
            ..OutputConfig::default()
        },
    };
    match name {
        "toy" => Some((base(ScenarioParams::defaults("toy")?), (-0.6, -0.4), Some((-1.2, -0.8)))),
        "cas3" => Some((base(ScenarioParams::defaults("cas3")?), (-0.6, -0.4), None)),
        _ => None,
    }
}

fn parse_pairs(rest: &[String]) -> std::result::Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut it = rest.iter();
    while let Some(flag) = it.next() {
        let Some(name) = flag.strip_prefix("--") else {
            return Err(format!("expected `--name value`, got `{flag}`"));
        };
        let value = it.next().ok_or_else(|| format!("missing value for `{flag}`"))?;
        out.push((name.to_string(), value.clone()));
    }
    Ok(out)
}

fn classify_params(system: &str, rest: &[String]) -> std::result::Result<ScenarioParams, String> {
    let mut params = ScenarioParams::defaults(system)
        .ok_or_else(|| format!("unknown system `{system}`; expected one of {}", SCENARIO_NAMES.join(", ")))?;
    let pairs = parse_pairs(rest)?;
    if let Some((_, v)) = pairs.iter().find(|(k, _)| k == "n") {
        let n: usize = v.parse().map_err(|_| format!("invalid value `{v}` for `--n`"))?;
        match &mut params {
            ScenarioParams::Linear { d, c } => {
                *d = vec![1.0; n];
                *c = (0..n).map(|i| i as f64).collect();
            }
            ScenarioParams::Custom { d, c, f } => {
                *d = vec![1.0; n];
                *c = (0..n).map(|i| i as f64).collect();
                *f = vec![String::new(); n];
            }
            _ => return Err(format!("`--n` is not an argument of `{system}`")),
        }
    }
    for (key, value) in &pairs {
        if key == "n" {
            continue;
        }
        if let (ScenarioParams::Custom { f, .. }, Some(i)) =
            (&mut params, key.strip_prefix('f').and_then(|s| s.parse::<usize>().ok()))
        {
            let slot = i.checked_sub(1).and_then(|i| f.get_mut(i));
            *slot.ok_or_else(|| format!("no component for `--{key}`"))? = value.clone();
            continue;
        }
        let x: f64 = value.parse().map_err(|_| format!("invalid value `{value}` for `--{key}`"))?;
        params.set(key, x).map_err(|e| e.to_string())?;
    }
    Ok(params)
}

fn print_classification(s: &ClassifySummary) {
    println!("{:<4} {:<28} {:>3} {:<11} {:<6} {:<7}", "eq", "term", "p", "category", "mixed", "burgers");
    for t in &s.terms {
        println!(
            "{:<4} {:<28} {:>3} {:<11} {:<6} {:<7}",
            format!("f{}", t.component),
            t.term,
            t.p,
            t.category.to_string(),
            t.mixed,
            t.burgers
        );
    }
    for v in &s.violations {
        println!("violation: {} (f{}: {})", v.kind, v.component, v.detail);
    }
    println!("verdict: {}", s.verdict);
}

fn load_or_usage(path: &Path) -> std::result::Result<RunConfig, i32> {
    load_config(path).map_err(|e| {
        eprintln!("error: {e}");
        2
    })
}

fn report_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    match e {
        Error::Io(_) | Error::Json(_) | Error::Fit(_) => 1,
        _ => 2,
    }
}

fn check_window(label: &str, slope: Option<f64>, window: (f64, f64)) -> bool {
    match slope {
        Some(s) if s >= window.0 && s <= window.1 => {
            println!("PASS {label} slope {s:.4} in [{}, {}]", window.0, window.1);
            true
        }
        Some(s) => {
            println!("FAIL {label} slope {s:.4} outside [{}, {}]", window.0, window.1);
            false
        }
        None => {
            println!("FAIL {label} slope unavailable");
            false
        }
    }
}

/// Entry point of the `rda` binary. Returns the process exit code:
/// 0 success, 1 verification failure, 2 usage error.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Classify(a) => {
            let params = match classify_params(&a.system, &a.rest) {
                Ok(p) => p,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return 2;
                }
            };
            let summary = match classify_summary(&params) {
                Ok(s) => s,
                Err(e) => return report_error(&e),
            };
            print_classification(&summary);
            if let Some(path) = a.summary {
                if let Err(e) = write_json(&summary, &path) {
                    return report_error(&e);
                }
            }
            0
        }
        Command::Run(a) => {
            let mut config = match load_or_usage(&a.config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(out) = a.out {
                config.output.directory = out;
            }
            match execute_run(&config) {
                Ok(record) => {
                    let summary = run_summary(&config, &record);
                    println!("verdict: {}", summary.verdict);
                    println!("status: {}", serde_json::to_string(&summary.status).unwrap_or_default());
                    if let Some(s) = summary.sup_u_slope {
                        println!("sup_u slope: {s:.4}");
                    }
                    println!("eta max: {:.6e}", summary.eta_max);
                    0
                }
                Err(e) => report_error(&e),
            }
        }
        Command::Scan(a) => {
            let config = match load_or_usage(&a.config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let dir = a.out.unwrap_or_else(|| config.output.directory.clone());
            let scan = match scan_parameter(&config.scenario, &a.parameter, &a.values, &config.setup()) {
                Ok(s) => s,
                Err(e) => return report_error(&e),
            };
            let written = fs::create_dir_all(&dir)
                .map_err(Error::from)
                .and_then(|_| write_scan_csv(&scan, &dir.join("scan.csv")))
                .and_then(|_| write_scan_summary(&scan, &dir.join("scan.json")));
            if let Err(e) = written {
                return report_error(&e);
            }
            for r in &scan.rows {
                println!("{} = {}: {:?}", scan.parameter, r.value, r.status);
            }
            0
        }
        Command::VerifyLinear(a) => {
            let err = match linear_exactness_error(a.n, a.length, a.t_end, a.dt) {
                Ok(e) => e,
                Err(e) => return report_error(&e),
            };
            let mut ok = err < a.tolerance;
            println!(
                "{} exact Gaussian: max error {err:.3e} (tolerance {:.1e})",
                if ok { "PASS" } else { "FAIL" },
                a.tolerance
            );
            match linear_suite(a.suite_n, a.suite_length, a.suite_t_end, a.dt) {
                Ok(rows) => {
                    for r in rows {
                        let pass = (r.slope - r.predicted).abs() <= a.slope_tolerance;
                        ok &= pass;
                        println!(
                            "{} ||k^{} dk^{} w||_1: slope {:.4} predicted {:.1}",
                            if pass { "PASS" } else { "FAIL" },
                            r.j,
                            r.m,
                            r.slope,
                            r.predicted
                        );
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ok = false;
                }
            }
            if ok {
                0
            } else {
                1
            }
        }
        Command::VerifyDecay(a) => {
            let (mut config, mut u_window, mut du_window) = match (&a.scenario, &a.config) {
                (Some(name), None) => match decay_preset(name) {
                    Some(p) => p,
                    None => {
                        eprintln!("error: unknown decay scenario `{name}`; expected toy or cas3");
                        return 2;
                    }
                },
                (None, Some(path)) => match load_or_usage(path) {
                    Ok(c) => (c, (-0.6, -0.4), None),
                    Err(code) => return code,
                },
                _ => {
                    eprintln!("error: give exactly one of --scenario or --config");
                    return 2;
                }
            };
            if let Some(v) = a.sup_u {
                u_window = (v[0], v[1]);
            }
            if let Some(v) = a.sup_du {
                du_window = Some((v[0], v[1]));
            }
            if let Some(out) = a.out {
                config.output.directory = out;
            }
            let record = match execute_run(&config) {
                Ok(r) => r,
                Err(e) => return report_error(&e),
            };
            let summary = run_summary(&config, &record);
            let mut ok = record.status == Status::Completed;
            println!(
                "{} status {}",
                if ok { "PASS" } else { "FAIL" },
                serde_json::to_string(&summary.status).unwrap_or_default()
            );
            ok &= check_window("sup_u", summary.sup_u_slope, u_window);
            if let Some(w) = du_window {
                ok &= check_window("sup_du", summary.sup_du_slope, w);
            }
            if ok {
                0
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("[scenario]\nname = \"linear\"\n").unwrap();
        assert_eq!(c.integrator.dt, 0.01);
        assert_eq!(c.grid.n, 1024);
        assert_eq!(c.grid.length, 200.0);
        assert_eq!(c.diagnostics.fit_window, FitWindow::default());
        assert!(c.output.csv && c.output.json && !c.output.fields);
    }

    #[test]
    fn negative_diffusion_names_key() {
        let err = parse_config("[scenario]\nname = \"toy\"\nd1 = -1\n").unwrap_err();
        let Error::Config(list) = err else { panic!() };
        assert!(list.iter().any(|m| m.contains("`scenario.d1`")), "{list:?}");
    }

    #[test]
    fn unknown_keys_are_listed() {
        let text = "[scenario]\nname = \"toy\"\nbogus = 1\n[grid]\nN = 1024\nwidth = 3\n[extra]\n";
        let Error::Config(list) = parse_config(text).unwrap_err() else { panic!() };
        for key in ["`scenario.bogus`", "`grid.width`", "`extra`"] {
            assert!(list.iter().any(|m| m.contains(key)), "{key} missing from {list:?}");
        }
    }

    #[test]
    fn every_violation_is_reported() {
        let text = "[scenario]\nname = \"cas3\"\nd2 = 0\n[grid]\nN = 1000\n[integrator]\ndt = -1\n";
        let Error::Config(list) = parse_config(text).unwrap_err() else { panic!() };
        for key in ["`scenario.d2`", "`grid.N`", "`integrator.dt`"] {
            assert!(list.iter().any(|m| m.contains(key)), "{key} missing from {list:?}");
        }
    }

    #[test]
    fn full_config_round() {
        let text = r#"
[scenario]
name = "custom"
d = [1.0, 2.0]
c = [1.0, -1.0]
f = ["u1^2*u2", "dx(u1^2)"]
amplitude = [0.1, 0.2]
center2 = 5.0

[grid]
N = 256
L = 100

[integrator]
dt = 0.02
t_end = 1
output_every = 0.1
pad_ratio = 2

[diagnostics]
fit_window = [0.5, 1.0]
envelope = false

[output]
directory = "results"
formats = ["csv"]
fields = true
"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.scenario.init.amplitude, vec![0.1, 0.2]);
        assert_eq!(c.scenario.init.center, vec![0.0, 5.0]);
        assert_eq!(c.integrator.pad_ratio, Some(2.0));
        assert!(c.integrator.keep_fields);
        assert!(!c.output.json && c.output.csv);
        assert_eq!(c.diagnostics.fit_window, FitWindow { start: 0.5, end: 1.0 });
        let spec = c.scenario.params.build().unwrap();
        assert_eq!(spec.f().to_strings().len(), 2);
    }

    #[test]
    fn classify_arguments() {
        let rest: Vec<String> = ["--r", "2", "--q", "4", "--c1", "1", "--c2", "-1"].map(String::from).to_vec();
        let p = classify_params("toy", &rest).unwrap();
        let s = classify_summary(&p).unwrap();
        assert_eq!(s.terms.len(), 4);
        assert_eq!(s.verdict, "admissible");
        assert!(classify_params("toy", &["--r".to_string()]).is_err());
        assert!(classify_params("nope", &[]).is_err());
        let rest: Vec<String> = ["--f1", "u1^3", "--f2", "0"].map(String::from).to_vec();
        let s = classify_summary(&classify_params("custom", &rest).unwrap()).unwrap();
        assert_eq!(s.verdict, "not admissible");
    }

    #[test]
    fn status_serialization() {
        let j = serde_json::to_string(&StatusSummary::from(Status::BlowUp { t_star: 0.5 })).unwrap();
        assert_eq!(j, r#"{"blowup_at":0.5}"#);
        let j = serde_json::to_string(&StatusSummary::from(Status::Completed)).unwrap();
        assert_eq!(j, r#""completed""#);
    }
}
