//! Run configuration, per-check report records and their serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::DomainModel;
use crate::error::{Error, Result};
use crate::estimates::Sweep;
use crate::quadrature::GridSpec;
use crate::schur::SpaceParams;
use crate::toeplitz::{ExhaustionSpec, SpectrumReport, SymbolSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Marginal exponent: reported, never fails a run.
    Critical,
}

impl Status {
    pub fn from_pass(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Critical => "critical",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config(format!(
                "unknown output format '{other}' (json, csv)"
            ))),
        }
    }
}

/// One verification result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub check: String,
    pub inputs: BTreeMap<String, Value>,
    pub values: BTreeMap<String, Value>,
    pub status: Status,
    pub tolerances: BTreeMap<String, f64>,
    pub grid: GridSpec,
    /// Seconds.
    pub wall_time: f64,
}

impl ReportRecord {
    pub fn new(check: impl Into<String>, grid: GridSpec) -> Self {
        Self {
            check: check.into(),
            inputs: BTreeMap::new(),
            values: BTreeMap::new(),
            status: Status::Pass,
            tolerances: BTreeMap::new(),
            grid,
            wall_time: 0.0,
        }
    }

    pub fn input(mut self, key: &str, v: impl Serialize) -> Self {
        self.inputs.insert(key.into(), to_value(v));
        self
    }

    pub fn value(mut self, key: &str, v: impl Serialize) -> Self {
        self.values.insert(key.into(), to_value(v));
        self
    }

    pub fn tolerance(mut self, key: &str, t: f64) -> Self {
        self.tolerances.insert(key.into(), t);
        self
    }

    pub fn status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    /// Pass when `ok`; otherwise critical for marginal cases and fail for the rest. The
    /// `critical` flag is recorded either way.
    pub fn judged(self, ok: bool, critical: bool) -> Self {
        let status = match (ok, critical) {
            (true, _) => Status::Pass,
            (false, true) => Status::Critical,
            (false, false) => Status::Fail,
        };
        self.value("critical", critical).status(status)
    }
}

// Non-finite floats become strings so that records survive a JSON round trip.
fn to_value(v: impl Serialize) -> Value {
    fix_nonfinite(serde_json::to_value(v).unwrap_or(Value::Null))
}

fn fix_nonfinite(v: Value) -> Value {
    match v {
        Value::Array(a) => Value::Array(a.into_iter().map(fix_nonfinite).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, x)| (k, fix_nonfinite(x))).collect())
        }
        other => other,
    }
}

/// Float for a record value; infinities are spelled out.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

/// A plot-ready table written as CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    pub fn write_csv(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|x| format!("{x:e}")))?;
        }
        w.flush()?;
        Ok(path)
    }
}

/// Everything a command produces.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub records: Vec<ReportRecord>,
    pub tables: Vec<Table>,
    pub spectra: Vec<SpectrumReport>,
}

impl RunOutput {
    pub fn extend(&mut self, other: RunOutput) {
        self.records.extend(other.records);
        self.tables.extend(other.tables);
        self.spectra.extend(other.spectra);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn records_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.records)?)
    }

    /// Records as CSV rows: check, status, wall_time, then inputs and values as JSON.
    pub fn records_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "check",
            "status",
            "n_r",
            "n_theta",
            "kappa",
            "wall_time",
            "inputs",
            "values",
        ])?;
        for r in &self.records {
            w.write_record([
                r.check.clone(),
                r.status.to_string(),
                r.grid.n_r.to_string(),
                r.grid.n_theta.to_string(),
                r.grid.kappa.to_string(),
                format!("{:.3}", r.wall_time),
                serde_json::to_string(&r.inputs)?,
                serde_json::to_string(&r.values)?,
            ])?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Write the report to `dir`: report.json and spectrum files for JSON, records.csv and
    /// the sweep tables for CSV.
    pub fn emit(&self, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        match format {
            OutputFormat::Json => {
                let p = dir.join("report.json");
                fs::write(&p, self.records_json()?)?;
                written.push(p);
                for s in &self.spectra {
                    let p = dir.join(format!("spectrum_{}.json", s.domain));
                    fs::write(&p, serde_json::to_string_pretty(s)?)?;
                    written.push(p);
                }
            }
            OutputFormat::Csv => {
                let p = dir.join("records.csv");
                fs::write(&p, self.records_csv()?)?;
                written.push(p);
                for t in &self.tables {
                    written.push(t.write_csv(dir)?);
                }
            }
        }
        Ok(written)
    }
}

/// Parse report.json back into records.
pub fn read_records(path: &Path) -> Result<Vec<ReportRecord>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Settings of a verification run. Defaults are desk scale.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub domain: DomainModel,
    pub p: f64,
    pub q: f64,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Schatten exponent.
    pub s: f64,
    pub grid: GridSpec,
    pub sweep: Sweep,
    pub exhaustion: ExhaustionSpec,
    pub output: OutputFormat,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            domain: DomainModel::disc(),
            p: 2.0,
            q: 2.0,
            a: 0.0,
            alpha: 0.0,
            beta: 1.0,
            s: 2.0,
            grid: GridSpec::default(),
            sweep: Sweep::default(),
            exhaustion: ExhaustionSpec::default(),
            output: OutputFormat::Json,
            out_dir: None,
            seed: 0,
        }
    }
}

/// Keys accepted by [`RunConfig::set`], matching the long CLI flags.
pub const CONFIG_KEYS: &[&str] = &[
    "domain",
    "p",
    "q",
    "a",
    "alpha",
    "beta",
    "s",
    "grid-radial",
    "grid-angular",
    "grading",
    "eps-min",
    "sweep",
    "exhaustion",
    "output",
    "out-dir",
    "seed",
];

pub fn parse_domain(s: &str) -> Result<DomainModel> {
    match s.trim() {
        "disc" => Ok(DomainModel::disc()),
        "ball2" => DomainModel::ball(2),
        "ball3" => DomainModel::ball(3),
        other => Err(Error::Config(format!(
            "unknown domain '{other}' (disc, ball2, ball3)"
        ))),
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {key} = '{v}'")))
}

impl RunConfig {
    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "domain" => self.domain = parse_domain(v)?,
            "p" => self.p = parse(key, v)?,
            "q" => self.q = parse(key, v)?,
            "a" => self.a = parse(key, v)?,
            "alpha" => self.alpha = parse(key, v)?,
            "beta" => self.beta = parse(key, v)?,
            "s" => self.s = parse(key, v)?,
            "grid-radial" => self.grid.n_r = parse(key, v)?,
            "grid-angular" => self.grid.n_theta = parse(key, v)?,
            "grading" => self.grid.kappa = parse(key, v)?,
            "eps-min" => self.grid.eps_min = parse(key, v)?,
            "sweep" => self.sweep = parse_sweep(v)?,
            "exhaustion" => self.exhaustion = v.parse()?,
            "output" => self.output = v.parse()?,
            "out-dir" => self.out_dir = Some(PathBuf::from(v.trim())),
            "seed" => self.seed = parse(key, v)?,
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Apply a key=value file; blank lines and lines starting with '#' are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    i + 1
                ))
            })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Generic checks shared by all commands; each command gates its own windows.
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.sweep.validate()?;
        self.space()?;
        self.symbol()?;
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::Config(format!(
                "Schatten exponent s = {} must be positive",
                self.s
            )));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<SpaceParams> {
        SpaceParams::new(self.p, self.q, self.a)
    }

    pub fn symbol(&self) -> Result<SymbolSpec> {
        SymbolSpec::radial(self.alpha, self.beta)
    }

    /// Echo of every setting, for the report.
    pub fn echo(&self) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        m.insert("domain".into(), Value::from(self.domain.name()));
        for (k, v) in [
            ("p", self.p),
            ("q", self.q),
            ("a", self.a),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("s", self.s),
        ] {
            m.insert(k.into(), num(v));
        }
        m.insert("grid".into(), to_value(self.grid));
        m.insert("sweep".into(), to_value(&self.sweep.distances));
        m.insert(
            "exhaustion".into(),
            Value::from(self.exhaustion.to_string()),
        );
        m.insert("seed".into(), Value::from(self.seed));
        m
    }
}

/// "start:end" halving sweep, or a comma list of distances.
fn parse_sweep(v: &str) -> Result<Sweep> {
    let v = v.trim();
    let sweep = if let Some((a, b)) = v.split_once(':') {
        Sweep::halving(parse("sweep", a)?, parse("sweep", b)?)
    } else {
        Sweep {
            distances: v
                .split(',')
                .map(|t| parse("sweep", t))
                .collect::<Result<_>>()?,
        }
    };
    sweep.validate()?;
    Ok(sweep)
}
