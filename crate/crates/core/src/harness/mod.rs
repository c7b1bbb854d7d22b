//! Seeded sweeps: configuration, row scheduling, and CSV / JSON / SVG / JSONL
//! persistence.
//!
//! Rows are computed in parallel and collected in job order, so a fixed
//! config and seed produce byte-identical CSV. Job `i` draws randomness from
//! `ChaCha8` stream `(i << 16) + j`, which is what makes `--replay i`
//! reproduce a single row without running the rest.

pub mod config;
mod experiments;
pub mod svg;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

pub use config::{Experiment, ExperimentConfig, EXHAUSTIVE_CAP, SPECTRAL_CAP};
pub use experiments::{structured_set, variant_set};

use crate::error::{Error, Result};

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Bool(v) => write!(f, "{v}"),
            Cell::Text(v) => f.write_str(v),
            Cell::Empty => Ok(()),
        }
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Float(v) => Some(v),
            _ => None,
        }
    }
}

macro_rules! cell_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
cell_from_int!(u32, u64, usize, i64);

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// A computed row: values in the experiment's column order, the conjunction
/// of its hard checks, and an optional JSON payload for the JSONL sidecar.
#[derive(Clone, Debug)]
pub struct Row {
    pub status: String,
    pub values: Vec<Cell>,
    pub hard_pass: bool,
    pub detail: Option<Value>,
}

impl Row {
    pub fn ok(values: Vec<Cell>, hard_pass: bool) -> Self {
        Row { status: "ok".into(), values, hard_pass, detail: None }
    }

    /// A row whose job ended in an error. Guard-path aborts that the
    /// experiment expects are not hard failures.
    fn failed(status: String, width: usize, hard_pass: bool) -> Self {
        Row { status, values: vec![Cell::Empty; width], hard_pass, detail: None }
    }

    pub fn get(&self, columns: &[&str], name: &str) -> Option<&Cell> {
        columns.iter().position(|c| *c == name).map(|i| &self.values[i])
    }
}

/// Everything a sweep produces.
#[derive(Clone, Debug)]
pub struct Report {
    pub name: String,
    pub kind: &'static str,
    pub seed: u64,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub columns: Vec<&'static str>,
    /// `(job index, row)`, in job order.
    pub rows: Vec<(usize, Row)>,
    pub summary: BTreeMap<String, Value>,
    pub plot: Option<svg::Plot>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

#[derive(Serialize)]
struct Meta<'a> {
    name: &'a str,
    kind: &'a str,
    seed: u64,
    config_hash: &'a str,
    version: &'a str,
    started_unix: u64,
    finished_unix: u64,
    rows: usize,
    hard_failures: Vec<usize>,
    summary: &'a BTreeMap<String, Value>,
    config: &'a ExperimentConfig,
}

/// Paths written by [`Report::write`].
#[derive(Clone, Debug, Default)]
pub struct Written {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub svg: Option<PathBuf>,
    pub jsonl: Option<PathBuf>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|(_, r)| r.hard_pass)
    }

    pub fn hard_failures(&self) -> Vec<usize> {
        self.rows.iter().filter(|(_, r)| !r.hard_pass).map(|(i, _)| *i).collect()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Header: `row,config_hash,status,<columns>,hard_pass`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["row", "config_hash", "status"];
        header.extend(self.columns.iter().copied());
        header.push("hard_pass");
        out.write_record(&header)?;
        for (i, row) in &self.rows {
            let mut rec = vec![i.to_string(), self.config_hash.clone(), row.status.clone()];
            rec.extend(row.values.iter().map(Cell::to_string));
            rec.push(row.hard_pass.to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn meta_json(&self) -> String {
        let meta = Meta {
            name: &self.name,
            kind: self.kind,
            seed: self.seed,
            config_hash: &self.config_hash,
            version: env!("CARGO_PKG_VERSION"),
            started_unix: self.started_unix,
            finished_unix: self.finished_unix,
            rows: self.rows.len(),
            hard_failures: self.hard_failures(),
            summary: &self.summary,
            config: &self.config,
        };
        serde_json::to_string_pretty(&meta).expect("plain data")
    }

    /// One JSON object per row carrying a payload.
    pub fn jsonl(&self) -> Option<String> {
        let lines: Vec<String> = self
            .rows
            .iter()
            .filter_map(|(i, r)| {
                r.detail
                    .as_ref()
                    .map(|d| serde_json::json!({"row": i, "config_hash": self.config_hash, "result": d}).to_string())
            })
            .collect();
        (!lines.is_empty()).then(|| lines.join("\n") + "\n")
    }

    /// Writes `<name>.csv`, `<name>.meta.json` and, when present,
    /// `<name>.svg` and `<name>.jsonl` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<Written> {
        fs::create_dir_all(dir)?;
        let base = dir.join(&self.name);
        let with = |ext: &str| base.with_file_name(format!("{}.{ext}", self.name));
        let mut written = Written { csv: with("csv"), meta: with("meta.json"), ..Default::default() };
        self.write_csv(fs::File::create(&written.csv)?)?;
        fs::write(&written.meta, self.meta_json())?;
        if let Some(plot) = &self.plot {
            let p = with("svg");
            fs::write(&p, plot.render())?;
            written.svg = Some(p);
        }
        if let Some(lines) = self.jsonl() {
            let p = with("jsonl");
            fs::write(&p, lines)?;
            written.jsonl = Some(p);
        }
        Ok(written)
    }
}

/// The per-experiment contract used by the driver.
pub(crate) trait Sweep: Sync {
    type Job: Send + Sync;

    fn columns(&self) -> Vec<&'static str>;

    fn jobs(&self, seed: u64) -> Result<Vec<Self::Job>>;

    fn run(&self, index: usize, job: &Self::Job, seed: u64) -> Result<Row>;

    /// Whether an error from `run` is an expected guard-path abort.
    fn tolerated(&self, _err: &Error) -> bool {
        false
    }

    fn summarize(&self, _columns: &[&'static str], _rows: &[(usize, Row)]) -> BTreeMap<String, Value> {
        BTreeMap::new()
    }

    fn plot(&self, _columns: &[&'static str], _rows: &[(usize, Row)]) -> Option<svg::Plot> {
        None
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn drive<S: Sweep>(sweep: &S, config: &ExperimentConfig, replay: Option<usize>) -> Result<Report> {
    let started_unix = now();
    let seed = config.seed;
    let columns = sweep.columns();
    let jobs = sweep.jobs(seed)?;
    let selected: Vec<usize> = match replay {
        Some(i) if i >= jobs.len() => {
            return Err(Error::Parameter(format!("row {i} out of range; the sweep has {} rows", jobs.len())))
        }
        Some(i) => vec![i],
        None => (0..jobs.len()).collect(),
    };
    let rows: Vec<(usize, Row)> = selected
        .par_iter()
        .map(|&i| {
            let row = match sweep.run(i, &jobs[i], seed) {
                Ok(r) => r,
                Err(e) => {
                    let tolerated = sweep.tolerated(&e);
                    let tag = if tolerated { "aborted" } else { "error" };
                    Row::failed(format!("{tag}: {e}"), columns.len(), tolerated)
                }
            };
            debug_assert_eq!(row.values.len(), columns.len());
            (i, row)
        })
        .collect();
    let summary = sweep.summarize(&columns, &rows);
    let plot = sweep.plot(&columns, &rows);
    Ok(Report {
        name: config.name(),
        kind: config.experiment.kind(),
        seed,
        config_hash: config.hash(),
        config: config.clone(),
        columns,
        rows,
        summary,
        plot,
        started_unix,
        finished_unix: now(),
    })
}

/// Runs every row, or only row `replay`.
pub fn run(config: &ExperimentConfig, replay: Option<usize>) -> Result<Report> {
    config.validate()?;
    match &config.experiment {
        Experiment::ThresholdScan(e) => drive(e, config, replay),
        Experiment::DecaySurvey(e) => drive(e, config, replay),
        Experiment::EquidistSurvey(e) => drive(e, config, replay),
        Experiment::WrapDemo(e) => drive(e, config, replay),
        Experiment::CharsumBatch(e) => drive(e, config, replay),
        Experiment::ExtremalGallery(e) => drive(e, config, replay),
    }
}

/// Stream for draw `j` of job `i`.
pub fn stream(i: usize, j: u64) -> u64 {
    ((i as u64) << 16) + j
}
