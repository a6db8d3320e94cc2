//! Argument parsing and the five commands.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use contraction_core::contraction::{
    estimate_min_constants, theorem_applicable, verify, KindTag, Verification,
};
use contraction_core::instances::fit_kind;
use contraction_core::solver::{
    brute_force_fixed_points, picard_iterate, verify_bound, BoundReport, IterationOptions,
    SolverError,
};
use contraction_core::space::{
    check_generalized_triangle, continuity_harness, minimal_b_constant, validate_semimetric,
    Battery, TriangleCheck,
};
use contraction_core::trifun::Grid;
use contraction_core::{
    counterexample_search, ContractionKind, SearchConfig, SelfMap, StepFactor, TriangleFunction,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::formats::{
    bound_csv, finite_map, interval_map, load_map, load_space, parse_kind, parse_phi, trace_csv,
    trace_json, LoadedSpace, PointIo,
};
use crate::{CommandResult, LabError, Status, SEED_ENV};

const DEFAULT_PHI: &str = r#"{"kind":"additive"}"#;
/// Triangle violations listed in a validate report; the rest are counted.
const LISTED_VIOLATIONS: usize = 16;

#[derive(Debug, Parser)]
#[command(
    name = "contraction-lab",
    version,
    about = "Semimetric spaces, contraction classes and certified Picard iteration"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the semimetric axioms and d(x,y) <= Φ(d(x,z), d(z,y)).
    Validate(ValidateArgs),
    /// Verify a map against the contraction classes and the matching theorems.
    Classify(ClassifyArgs),
    /// Run Picard iteration from --x0.
    Iterate(IterateArgs),
    /// Compare a Picard orbit against the a-priori error bound.
    Bounds(BoundsArgs),
    /// Look for contractions outside the hypotheses of their theorem.
    Search(SearchArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Classify(_) => "classify",
            Command::Iterate(_) => "iterate",
            Command::Bounds(_) => "bounds",
            Command::Search(_) => "search",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Space JSON file.
    #[arg(long, value_name = "FILE")]
    pub space: PathBuf,
    /// Triangle function JSON.
    #[arg(long, value_name = "JSON", default_value = DEFAULT_PHI)]
    pub phi: String,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_name = "FILE")]
    pub space: PathBuf,
    /// Map JSON, inline or as a file path.
    #[arg(long, value_name = "JSON|FILE")]
    pub map: String,
    #[arg(long, value_name = "JSON", default_value = DEFAULT_PHI)]
    pub phi: String,
    /// Contraction kind JSON; without it every class is fitted.
    #[arg(long, value_name = "JSON")]
    pub kind: Option<String>,
}

#[derive(Debug, Args)]
pub struct IterationArgs {
    /// Start point: a label or index (finite), a number (interval).
    #[arg(long, value_name = "VALUE")]
    pub x0: String,
    #[arg(long, value_name = "N", default_value_t = IterationOptions::default().max_iter)]
    pub max_iter: usize,
    #[arg(long, value_name = "T", default_value_t = IterationOptions::default().tol)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl IterationArgs {
    fn options(&self) -> IterationOptions {
        IterationOptions {
            max_iter: self.max_iter,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(long, value_name = "FILE")]
    pub space: PathBuf,
    #[arg(long, value_name = "JSON|FILE")]
    pub map: String,
    #[command(flatten)]
    pub iteration: IterationArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_name = "FILE")]
    pub space: PathBuf,
    #[arg(long, value_name = "JSON|FILE")]
    pub map: String,
    #[arg(long, value_name = "JSON", default_value = DEFAULT_PHI)]
    pub phi: String,
    /// Contraction kind JSON; its step factor is the rate of the bound.
    #[arg(long, value_name = "JSON")]
    pub kind: String,
    #[command(flatten)]
    pub iteration: IterationArgs,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_name = "JSON")]
    pub phi: String,
    #[arg(long, value_name = "JSON")]
    pub kind: String,
    #[arg(long, value_name = "N", default_value_t = 1000)]
    pub budget: usize,
    /// Overridden by the CONTRACTION_LAB_SEED environment variable.
    #[arg(long, value_name = "S", default_value_t = 0)]
    pub seed: u64,
}

/// Help and version requests are not results; callers print them as text.
pub fn is_informational(err: &clap::Error) -> bool {
    matches!(
        err.kind(),
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
    )
}

/// Parses `argv` (program name first) and runs the command, reading the seed
/// override from the environment. Usage errors become `error` results.
pub fn run_command<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    match Cli::try_parse_from(&argv) {
        Ok(cli) => execute(&cli, std::env::var(SEED_ENV).ok().as_deref()),
        Err(e) => usage_error(&argv, &e),
    }
}

pub fn usage_error(argv: &[std::ffi::OsString], err: &clap::Error) -> CommandResult {
    let command = argv
        .get(1)
        .and_then(|a| a.to_str())
        .filter(|a| ["validate", "classify", "iterate", "bounds", "search"].contains(a))
        .unwrap_or("");
    let message = err.render().to_string();
    CommandResult::error(command, &LabError::Usage(message.trim_end().to_string()))
}

/// Runs a parsed command. `env_seed` overrides `--seed` when present.
pub fn execute(cli: &Cli, env_seed: Option<&str>) -> CommandResult {
    let name = cli.command.name();
    let outcome = match &cli.command {
        Command::Validate(a) => validate(a),
        Command::Classify(a) => classify(a),
        Command::Iterate(a) => iterate(a),
        Command::Bounds(a) => bounds(a),
        Command::Search(a) => search(a, env_seed),
    };
    match outcome {
        Ok(o) => CommandResult {
            command: name.to_string(),
            status: o.status,
            payload: o.payload,
            csv: o.csv,
        },
        Err(e) => CommandResult::error(name, &e),
    }
}

struct Outcome {
    status: Status,
    payload: Value,
    csv: Option<String>,
}

impl Outcome {
    fn json(status: Status, payload: Value) -> Self {
        Outcome {
            status,
            payload,
            csv: None,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize to JSON")
}

fn triangle_json(check: &TriangleCheck) -> Value {
    json!({
        "scope": check.scope,
        "triples_checked": check.triples_checked,
        "holds": check.holds(),
        "violation_count": check.violations.len(),
        "violations": to_json(&check.violations.iter().take(LISTED_VIOLATIONS).collect::<Vec<_>>()),
    })
}

fn validate(a: &ValidateArgs) -> Result<Outcome, LabError> {
    let file = load_space(&a.space)?;
    let phi = parse_phi(&a.phi)?;
    let axioms = phi.check_axioms(&Grid::default())?;
    let (semimetric, triangle, b_constant, continuity) = match file.build()? {
        LoadedSpace::Finite(s) => (
            validate_semimetric(&s),
            check_generalized_triangle(&s, &phi)?,
            minimal_b_constant(&s).ok(),
            None,
        ),
        LoadedSpace::Interval(s) => (
            validate_semimetric(&s),
            check_generalized_triangle(&s, &phi)?,
            None,
            Some(continuity_harness(&s, &phi, &Battery::standard(&s))?),
        ),
    };
    let continuity_failed = continuity
        .as_ref()
        .is_some_and(|c| c.refused.is_none() && !c.passed());
    let ok = axioms.passed() && semimetric.is_valid() && triangle.holds() && !continuity_failed;
    let payload = json!({
        "space": to_json(&file),
        "phi": to_json(&phi),
        "phi_axioms": { "passed": axioms.passed(), "report": to_json(&axioms) },
        "semimetric": { "valid": semimetric.is_valid(), "report": to_json(&semimetric) },
        "triangle": triangle_json(&triangle),
        "b_constant": b_constant,
        "continuity": continuity.map(|c| json!({ "passed": c.passed(), "report": to_json(&c) })),
    });
    Ok(Outcome::json(
        if ok { Status::Ok } else { Status::Violation },
        payload,
    ))
}

fn classify(a: &ClassifyArgs) -> Result<Outcome, LabError> {
    let file = load_space(&a.space)?;
    let map_file = load_map(&a.map)?;
    let phi = parse_phi(&a.phi)?;
    let kind = a.kind.as_deref().map(parse_kind).transpose()?;
    let (classes, fixed_points) = match file.build()? {
        LoadedSpace::Finite(s) => {
            let m = finite_map(&map_file, &s)?;
            let fixed: Vec<Value> = brute_force_fixed_points(&s, &m)?
                .into_iter()
                .map(|p| s.point_json(p))
                .collect();
            (classes_in(&s, &m, &phi, kind.as_ref())?, Some(fixed))
        }
        LoadedSpace::Interval(s) => {
            let m = interval_map(&map_file, &s)?;
            (classes_in(&s, &m, &phi, kind.as_ref())?, None)
        }
    };
    let in_class = |c: &ClassEntry| c.verification.as_ref().is_some_and(Verification::passed);
    let status = if classes
        .iter()
        .any(|c| in_class(c) && c.applicability.as_ref().is_some_and(|a| a.applicable))
    {
        Status::Ok
    } else if classes.iter().any(in_class) {
        Status::NotApplicable
    } else {
        Status::Violation
    };
    let payload = json!({
        "space": to_json(&file),
        "map": to_json(&map_file),
        "phi": to_json(&phi),
        "classes": to_json(&classes),
        "fixed_points": fixed_points,
    });
    Ok(Outcome::json(status, payload))
}

#[derive(Serialize)]
struct ClassEntry {
    tag: KindTag,
    estimate: contraction_core::contraction::MinConstants,
    /// The given kind, or the tightest fitted one.
    kind: Option<ContractionKind>,
    verification: Option<Verification>,
    applicability: Option<contraction_core::Applicability>,
}

fn classes_in<S: PointIo, M: SelfMap<S>>(
    space: &S,
    map: &M,
    phi: &TriangleFunction,
    given: Option<&ContractionKind>,
) -> Result<Vec<ClassEntry>, LabError> {
    let tags = match given {
        Some(k) => vec![k.tag()],
        None => KindTag::ALL.to_vec(),
    };
    let mut out = Vec::with_capacity(tags.len());
    for tag in tags {
        let estimate = estimate_min_constants(space, map, tag)?;
        let kind = match given {
            Some(k) => Some(k.clone()),
            None => fit_kind(space, map, tag)?,
        };
        let (verification, applicability) = match &kind {
            Some(k) => (
                Some(verify(space, map, k)?),
                Some(theorem_applicable(k, phi)?),
            ),
            None => (None, None),
        };
        out.push(ClassEntry {
            tag,
            estimate,
            kind,
            verification,
            applicability,
        });
    }
    Ok(out)
}

fn iterate(a: &IterateArgs) -> Result<Outcome, LabError> {
    let file = load_space(&a.space)?;
    let map_file = load_map(&a.map)?;
    let opts = a.iteration.options();
    let (trace, fixed, csv) = match file.build()? {
        LoadedSpace::Finite(s) => {
            let m = finite_map(&map_file, &s)?;
            let x0 = s.parse_point(&a.iteration.x0)?;
            let t = picard_iterate(&s, &m, x0, &opts)?;
            let fixed: Vec<Value> = brute_force_fixed_points(&s, &m)?
                .into_iter()
                .map(|p| s.point_json(p))
                .collect();
            let csv = (a.iteration.format == Format::Csv)
                .then(|| trace_csv(&s, &t))
                .transpose()?;
            ((trace_json(&s, &t), t.converged()), Some(fixed), csv)
        }
        LoadedSpace::Interval(s) => {
            let m = interval_map(&map_file, &s)?;
            let x0 = s.parse_point(&a.iteration.x0)?;
            let t = picard_iterate(&s, &m, x0, &opts)?;
            let csv = (a.iteration.format == Format::Csv)
                .then(|| trace_csv(&s, &t))
                .transpose()?;
            ((trace_json(&s, &t), t.converged()), None, csv)
        }
    };
    let (trace, converged) = trace;
    Ok(Outcome {
        status: if converged {
            Status::Ok
        } else {
            Status::Violation
        },
        payload: json!({
            "space": to_json(&file),
            "map": to_json(&map_file),
            "options": to_json(&opts),
            "trace": trace,
            "fixed_points": fixed,
        }),
        csv,
    })
}

struct BoundRun {
    status: Status,
    payload: Value,
    report: Option<BoundReport>,
}

fn bounds(a: &BoundsArgs) -> Result<Outcome, LabError> {
    let file = load_space(&a.space)?;
    let map_file = load_map(&a.map)?;
    let phi = parse_phi(&a.phi)?;
    let kind = parse_kind(&a.kind)?;
    let opts = a.iteration.options();
    let run = match file.build()? {
        LoadedSpace::Finite(s) => {
            let m = finite_map(&map_file, &s)?;
            let x0 = s.parse_point(&a.iteration.x0)?;
            let oracle = brute_force_fixed_points(&s, &m)?;
            bounds_in(&s, &m, &phi, &kind, x0, &opts, Some(oracle))?
        }
        LoadedSpace::Interval(s) => {
            let m = interval_map(&map_file, &s)?;
            let x0 = s.parse_point(&a.iteration.x0)?;
            bounds_in(&s, &m, &phi, &kind, x0, &opts, None)?
        }
    };
    let csv = (a.iteration.format == Format::Csv)
        .then(|| bound_csv(run.report.as_ref()))
        .transpose()?;
    let mut payload = run.payload;
    payload["space"] = to_json(&file);
    payload["map"] = to_json(&map_file);
    Ok(Outcome {
        status: run.status,
        payload,
        csv,
    })
}

/// The limit is the oracle's fixed point when it is unique, the last
/// iterate otherwise.
fn bounds_in<S: PointIo, M: SelfMap<S>>(
    space: &S,
    map: &M,
    phi: &TriangleFunction,
    kind: &ContractionKind,
    x0: S::Point,
    opts: &IterationOptions,
    oracle: Option<Vec<S::Point>>,
) -> Result<BoundRun, LabError> {
    let app = theorem_applicable(kind, phi)?;
    let verification = verify(space, map, kind)?;
    let trace = picard_iterate(space, map, x0, opts)?;
    let (fixed, source) = match oracle.as_deref() {
        Some(&[p]) => (p, "oracle"),
        _ => (trace.last(), "last_iterate"),
    };
    let (report, unavailable) = match &app.rate {
        StepFactor::NotDerivable { reason } => (None, Some(reason.clone())),
        StepFactor::Derived { factor, .. } => {
            match verify_bound(space, &trace, phi, *factor, fixed) {
                Ok(r) => (Some(r), None),
                Err(e @ SolverError::BoundUnavailable { .. }) => (None, Some(e.to_string())),
                Err(e) => return Err(e.into()),
            }
        }
    };
    let status = match &report {
        _ if !verification.passed() => Status::Violation,
        None => Status::NotApplicable,
        Some(_) if !app.applicable => Status::NotApplicable,
        Some(r) if !r.bound_holds => Status::Violation,
        Some(_) => Status::Ok,
    };
    let payload = json!({
        "phi": to_json(phi),
        "kind": to_json(kind),
        "applicability": to_json(&app),
        "verification": to_json(&verification),
        "trace": trace_json(space, &trace),
        "fixed_point": space.point_json(fixed),
        "fixed_point_source": source,
        "report": to_json(&report),
        "unavailable": unavailable,
    });
    Ok(BoundRun {
        status,
        payload,
        report,
    })
}

fn search(a: &SearchArgs, env_seed: Option<&str>) -> Result<Outcome, LabError> {
    let seed = match env_seed {
        Some(s) => s.trim().parse::<u64>().map_err(|_| {
            LabError::Usage(format!(
                "{} must be an unsigned integer, got {:?}",
                SEED_ENV, s
            ))
        })?,
        None => a.seed,
    };
    let cfg = SearchConfig {
        phi: parse_phi(&a.phi)?,
        kind: parse_kind(&a.kind)?,
        budget: a.budget,
        seed,
    };
    let report = counterexample_search(&cfg)?;
    Ok(Outcome::json(Status::Ok, to_json(&report)))
}
