//! JSON input formats for spaces, maps, triangle functions and contraction
//! kinds, plus the CSV table for traces and bound reports.

use std::fs;
use std::path::Path;

use contraction_core::contraction::IntervalMap;
use contraction_core::solver::{BoundReport, IterationTrace};
use contraction_core::space::SpaceError;
use contraction_core::{
    ContractionKind, FiniteMap, FiniteSpace, IntervalSpace, Space, TriangleFunction,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpaceFile {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpaceFile {
    pub lo: f64,
    pub hi: f64,
    /// Distance expression in `x` and `y`.
    pub dist: String,
}

/// `{"labels": [...], "dist": [[...]]}` or `{"lo": 0, "hi": 1, "dist": "abs(x-y)"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceFile {
    Finite(FiniteSpaceFile),
    Interval(IntervalSpaceFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteMapFile {
    pub images: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalMapFile {
    /// Image expression in `x`.
    pub expr: String,
}

/// `{"images": [...]}` or `{"expr": "x/2"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapFile {
    Finite(FiniteMapFile),
    Interval(IntervalMapFile),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSpace {
    Finite(FiniteSpace),
    Interval(IntervalSpace),
}

impl SpaceFile {
    pub fn build(&self) -> Result<LoadedSpace, SpaceError> {
        Ok(match self {
            SpaceFile::Finite(f) => {
                LoadedSpace::Finite(FiniteSpace::new(f.labels.clone(), f.dist.clone())?)
            }
            SpaceFile::Interval(i) => {
                LoadedSpace::Interval(IntervalSpace::new(i.lo, i.hi, &i.dist)?)
            }
        })
    }
}

fn read(path: &Path) -> Result<String, LabError> {
    fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(what: &'static str, text: &str) -> Result<T, LabError> {
    serde_json::from_str(text).map_err(|e| LabError::Json {
        what,
        message: e.to_string(),
    })
}

/// Inline JSON when the argument starts with `{`, a file path otherwise.
fn inline_or_file(arg: &str) -> Result<String, LabError> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        read(Path::new(arg))
    }
}

pub fn load_space(path: &Path) -> Result<SpaceFile, LabError> {
    let text = read(path)?;
    // Untagged errors only say "no variant matched"; name the accepted shapes.
    parse::<SpaceFile>("space", &text).map_err(|_| {
        let detail = match serde_json::from_str::<Value>(&text) {
            Err(e) => e.to_string(),
            Ok(_) => "expected {\"labels\", \"dist\"} or {\"lo\", \"hi\", \"dist\"}".into(),
        };
        LabError::Json {
            what: "space",
            message: detail,
        }
    })
}

pub fn load_map(arg: &str) -> Result<MapFile, LabError> {
    let text = inline_or_file(arg)?;
    parse::<MapFile>("map", &text).map_err(|_| {
        let detail = match serde_json::from_str::<Value>(&text) {
            Err(e) => e.to_string(),
            Ok(_) => "expected {\"images\"} or {\"expr\"}".into(),
        };
        LabError::Json {
            what: "map",
            message: detail,
        }
    })
}

pub fn parse_phi(arg: &str) -> Result<TriangleFunction, LabError> {
    parse("phi", arg)
}

pub fn parse_kind(arg: &str) -> Result<ContractionKind, LabError> {
    parse("kind", arg)
}

pub fn finite_map(file: &MapFile, space: &FiniteSpace) -> Result<FiniteMap, LabError> {
    match file {
        MapFile::Finite(m) => Ok(FiniteMap::new(m.images.clone(), space)?),
        MapFile::Interval(_) => Err(LabError::Usage(
            "an expression map needs an interval space".into(),
        )),
    }
}

pub fn interval_map(file: &MapFile, space: &IntervalSpace) -> Result<IntervalMap, LabError> {
    match file {
        MapFile::Interval(m) => {
            let map = IntervalMap::parse(&m.expr)?;
            map.check_domain(space)?;
            Ok(map)
        }
        MapFile::Finite(_) => Err(LabError::Usage(
            "an index-table map needs a finite space".into(),
        )),
    }
}

/// Point IO for the two space types.
pub trait PointIo: Space {
    fn point_json(&self, p: Self::Point) -> Value;
    fn parse_point(&self, text: &str) -> Result<Self::Point, LabError>;
}

impl PointIo for FiniteSpace {
    fn point_json(&self, p: usize) -> Value {
        Value::String(self.labels()[p].clone())
    }

    /// A label, or failing that a 0-based index.
    fn parse_point(&self, text: &str) -> Result<usize, LabError> {
        if let Ok(i) = self.index_of(text) {
            return Ok(i);
        }
        match text.parse::<usize>() {
            Ok(i) if i < self.len() => Ok(i),
            _ => Err(LabError::Space(SpaceError::UnknownPoint(text.into()))),
        }
    }
}

impl PointIo for IntervalSpace {
    fn point_json(&self, p: f64) -> Value {
        serde_json::json!(p)
    }

    fn parse_point(&self, text: &str) -> Result<f64, LabError> {
        match text.parse::<f64>() {
            Ok(x) if self.contains(x) => Ok(x),
            Ok(x) => Err(LabError::Usage(format!(
                "--x0 = {} lies outside [{}, {}]",
                x,
                self.lo(),
                self.hi()
            ))),
            Err(_) => Err(LabError::Usage(format!(
                "--x0 must be a real number, got {:?}",
                text
            ))),
        }
    }
}

/// Trace as JSON with points rendered by the space.
pub fn trace_json<S: PointIo>(space: &S, trace: &IterationTrace<S::Point>) -> Value {
    serde_json::json!({
        "start": space.point_json(trace.start),
        "orbit": trace.orbit.iter().map(|&p| space.point_json(p)).collect::<Vec<_>>(),
        "step_dists": trace.step_dists,
        "iterations": trace.step_dists.len(),
        "stop_reason": trace.stop_reason,
        "rate_estimate": trace.rate_estimate,
        "rate_geometric_mean": trace.rate_geometric_mean,
    })
}

pub const CSV_HEADER: [&str; 6] = ["n", "x_n", "step_dist", "bound", "observed", "slack"];

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, LabError> {
    let bytes = w
        .into_inner()
        .map_err(|e| LabError::Csv(e.error().to_string()))?;
    String::from_utf8(bytes).map_err(|e| LabError::Csv(e.to_string()))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Trace rows; the bound columns stay empty.
pub fn trace_csv<S: Space>(
    space: &S,
    trace: &IterationTrace<S::Point>,
) -> Result<String, LabError> {
    let mut w = csv_writer();
    let csv_err = |e: csv::Error| LabError::Csv(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for (n, &x) in trace.orbit.iter().enumerate() {
        let step = cell(trace.step_dists.get(n).copied());
        w.write_record([
            n.to_string(),
            space.describe(x),
            step,
            String::new(),
            String::new(),
            String::new(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

pub fn bound_csv(report: Option<&BoundReport>) -> Result<String, LabError> {
    let mut w = csv_writer();
    let csv_err = |e: csv::Error| LabError::Csv(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in report.map(|r| r.rows.as_slice()).unwrap_or_default() {
        w.write_record([
            r.n.to_string(),
            r.x_n.clone(),
            cell(r.step_dist),
            r.bound.to_string(),
            r.observed.to_string(),
            r.slack.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}
