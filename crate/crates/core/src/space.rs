//! Finite and interval semimetric spaces.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{Expr, ExprError, Var};
use crate::sequence::{Decay, Sequence, TailWindow};
use crate::tolerance::{approx_eq, exceeds, ABS_TOL, LIMIT_TOL};
use crate::trifun::{PhiError, TriangleFunction};

#[cfg(feature = "serde")]
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("malformed distance matrix: {0}")]
    Structure(String),
    #[error("invalid interval: {0}")]
    Interval(String),
    #[error("distance expression: {0}")]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
}

/// Whether a check covered every pair/triple or a seeded sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Scope {
    AllPairs,
    Sampled,
}

/// Number of random pairs/triples drawn for interval spaces.
pub const INTERVAL_SAMPLES: usize = 10_000;
/// Seed of the interval sampler.
pub const SAMPLE_SEED: u64 = 0x5EED_1A7E;

/// Remembers the points of an orbit for recurrence detection.
pub trait OrbitMemory<P> {
    /// `next` recurs: it repeats an earlier point (exactly for discrete
    /// points, within `1e-12` for reals) while not being a settling step from `last`.
    fn recurs(&self, next: P, last: P) -> bool;
    fn remember(&mut self, p: P);
}

pub trait OrbitPoint: Copy + PartialEq + Debug {
    type Memory: OrbitMemory<Self> + Default;
}

impl OrbitPoint for usize {
    type Memory = BTreeSet<usize>;
}

impl OrbitMemory<usize> for BTreeSet<usize> {
    fn recurs(&self, next: usize, _last: usize) -> bool {
        self.contains(&next)
    }

    fn remember(&mut self, p: usize) {
        self.insert(p);
    }
}

/// Real orbit points keyed by their order-preserving bit pattern.
#[derive(Debug, Default)]
pub struct RealOrbit(BTreeMap<i64, f64>);

/// Coordinate proximity counted as recurrence on the real line.
pub const RECURRENCE_EPS: f64 = 1e-12;

fn ordered_key(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    bits ^ (((bits >> 63) as u64) >> 1) as i64
}

impl OrbitMemory<f64> for RealOrbit {
    fn recurs(&self, next: f64, last: f64) -> bool {
        // A convergent orbit keeps landing near earlier points; only flag a
        // return that jumps further than the recurrence radius.
        if (next - last).abs() <= 2.0 * RECURRENCE_EPS {
            return false;
        }
        let lo = ordered_key(next - RECURRENCE_EPS);
        let hi = ordered_key(next + RECURRENCE_EPS);
        self.0.range(lo..=hi).next().is_some()
    }

    fn remember(&mut self, p: f64) {
        self.0.insert(ordered_key(p), p);
    }
}

impl OrbitPoint for f64 {
    type Memory = RealOrbit;
}

/// A set with a semimetric.
pub trait Space {
    type Point: OrbitPoint;

    fn distance(&self, a: Self::Point, b: Self::Point) -> f64;

    /// Human-readable point name used in reports.
    fn describe(&self, p: Self::Point) -> String;

    /// Pairs to check: all ordered pairs, or a seeded sample.
    fn pairs(&self) -> (Vec<(Self::Point, Self::Point)>, Scope);

    /// Triples to check: all ordered triples, or a seeded sample.
    fn triples(&self) -> (Vec<(Self::Point, Self::Point, Self::Point)>, Scope);
}

/// A finite point set with a distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
}

impl FiniteSpace {
    /// Checks structure only: a non-empty square matrix of finite entries with
    /// one distinct label per row. Axioms are checked by [`validate_semimetric`].
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let n = rows.len();
        if n == 0 {
            return Err(SpaceError::Structure("space has no points".into()));
        }
        if labels.len() != n {
            return Err(SpaceError::Structure(format!(
                "{} labels for a {}-row matrix",
                labels.len(),
                n
            )));
        }
        let unique: BTreeSet<&String> = labels.iter().collect();
        if unique.len() != n {
            return Err(SpaceError::Structure("labels must be distinct".into()));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(SpaceError::Structure(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    n
                )));
            }
            if let Some(j) = row.iter().position(|d| !d.is_finite()) {
                return Err(SpaceError::Structure(format!(
                    "entry ({}, {}) is not finite",
                    i, j
                )));
            }
            dist.extend(row);
        }
        Ok(FiniteSpace { labels, dist })
    }

    /// Points labelled `p0, p1, …` with distances `f(i, j)`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self, SpaceError> {
        let labels = (0..n).map(|i| format!("p{}", i)).collect();
        let rows = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(labels, rows)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize, SpaceError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SpaceError::UnknownPoint(label.to_string()))
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }
}

impl Space for FiniteSpace {
    type Point = usize;

    fn distance(&self, a: usize, b: usize) -> f64 {
        self.d(a, b)
    }

    fn describe(&self, p: usize) -> String {
        self.labels[p].clone()
    }

    fn pairs(&self) -> (Vec<(usize, usize)>, Scope) {
        let n = self.len();
        let pairs = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        (pairs, Scope::AllPairs)
    }

    fn triples(&self) -> (Vec<(usize, usize, usize)>, Scope) {
        let n = self.len();
        let mut out = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    out.push((x, y, z));
                }
            }
        }
        (out, Scope::AllPairs)
    }
}

/// A closed interval `[lo, hi]` with a distance given as an expression in `x`, `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSpace {
    lo: f64,
    hi: f64,
    dist: Expr,
}

impl IntervalSpace {
    pub fn new(lo: f64, hi: f64, dist: &str) -> Result<Self, SpaceError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(SpaceError::Interval(format!(
                "need finite lo < hi, got [{}, {}]",
                lo, hi
            )));
        }
        Ok(IntervalSpace {
            lo,
            hi,
            dist: Expr::parse_with(dist, &[Var::X, Var::Y])?,
        })
    }

    /// `[lo, hi]` with `d(x, y) = |x - y|`.
    pub fn euclidean(lo: f64, hi: f64) -> Result<Self, SpaceError> {
        Self::new(lo, hi, "abs(x-y)")
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn dist_expr(&self) -> &Expr {
        &self.dist
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    fn landmarks(&self) -> [f64; 3] {
        [self.lo, 0.5 * (self.lo + self.hi), self.hi]
    }

    fn sampler(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(SAMPLE_SEED)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.lo + (self.hi - self.lo) * rng.random::<f64>()
    }

    /// Landmarks plus seeded points, for per-point checks.
    pub fn sample_points(&self) -> Vec<f64> {
        let mut rng = self.sampler();
        let mut pts = self.landmarks().to_vec();
        pts.extend((0..INTERVAL_SAMPLES).map(|_| self.draw(&mut rng)));
        pts
    }
}

impl Space for IntervalSpace {
    type Point = f64;

    fn distance(&self, a: f64, b: f64) -> f64 {
        self.dist.eval_xy(a, b)
    }

    fn describe(&self, p: f64) -> String {
        format!("{}", p)
    }

    fn pairs(&self) -> (Vec<(f64, f64)>, Scope) {
        let marks = self.landmarks();
        let mut out: Vec<(f64, f64)> = marks
            .iter()
            .flat_map(|&a| marks.iter().map(move |&b| (a, b)))
            .collect();
        let mut rng = self.sampler();
        out.extend((0..INTERVAL_SAMPLES).map(|_| (self.draw(&mut rng), self.draw(&mut rng))));
        (out, Scope::Sampled)
    }

    fn triples(&self) -> (Vec<(f64, f64, f64)>, Scope) {
        let marks = self.landmarks();
        let mut out = Vec::new();
        for &a in &marks {
            for &b in &marks {
                for &c in &marks {
                    out.push((a, b, c));
                }
            }
        }
        let mut rng = self.sampler();
        out.extend((0..INTERVAL_SAMPLES).map(|_| {
            (
                self.draw(&mut rng),
                self.draw(&mut rng),
                self.draw(&mut rng),
            )
        }));
        (out, Scope::Sampled)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "axiom", rename_all = "snake_case"))]
pub enum AxiomViolation {
    /// `d(x, x) != 0`
    Identity {
        point: String,
        value: f64,
    },
    /// `d(x, y) = 0` for `x != y`
    Indiscernible {
        a: String,
        b: String,
    },
    Symmetry {
        a: String,
        b: String,
        forward: f64,
        backward: f64,
    },
    Negative {
        a: String,
        b: String,
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct SemimetricReport {
    pub scope: Scope,
    /// First violation of `d(x, y) = 0 ⇔ x = y`.
    pub identity: Option<AxiomViolation>,
    pub symmetry: Option<AxiomViolation>,
    pub nonnegative: Option<AxiomViolation>,
}

impl SemimetricReport {
    pub fn is_valid(&self) -> bool {
        self.identity.is_none() && self.symmetry.is_none() && self.nonnegative.is_none()
    }
}

/// Checks identity of indiscernibles, symmetry and non-negativity.
pub fn validate_semimetric<S: Space>(space: &S) -> SemimetricReport {
    let (pairs, scope) = space.pairs();
    let mut report = SemimetricReport {
        scope,
        identity: None,
        symmetry: None,
        nonnegative: None,
    };
    for &(a, b) in &pairs {
        let d = space.distance(a, b);
        if report.nonnegative.is_none() && !(d >= 0.0) {
            report.nonnegative = Some(AxiomViolation::Negative {
                a: space.describe(a),
                b: space.describe(b),
                value: d,
            });
        }
        if report.identity.is_none() {
            if a == b && d != 0.0 && !(d.abs() <= ABS_TOL && scope == Scope::Sampled) {
                report.identity = Some(AxiomViolation::Identity {
                    point: space.describe(a),
                    value: d,
                });
            } else if a != b && d == 0.0 {
                report.identity = Some(AxiomViolation::Indiscernible {
                    a: space.describe(a),
                    b: space.describe(b),
                });
            }
        }
        if report.symmetry.is_none() {
            let back = space.distance(b, a);
            if !approx_eq(d, back) {
                report.symmetry = Some(AxiomViolation::Symmetry {
                    a: space.describe(a),
                    b: space.describe(b),
                    forward: d,
                    backward: back,
                });
            }
        }
    }
    // Sampled pairs are almost never diagonal; probe d(x, x) explicitly.
    if scope == Scope::Sampled && report.identity.is_none() {
        let (pairs, _) = space.pairs();
        for &(a, _) in &pairs {
            let d = space.distance(a, a);
            if !(d.abs() <= ABS_TOL) {
                report.identity = Some(AxiomViolation::Identity {
                    point: space.describe(a),
                    value: d,
                });
                break;
            }
        }
    }
    report
}

/// A triple with `d(x, y) > Φ(d(x, z), d(z, y))`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct TriangleViolation {
    pub x: String,
    pub y: String,
    pub z: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct TriangleCheck {
    pub scope: Scope,
    pub triples_checked: usize,
    pub violations: Vec<TriangleViolation>,
}

impl TriangleCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `d(x, y) <= Φ(d(x, z), d(z, y))`, degenerate triples included.
pub fn check_generalized_triangle<S: Space>(
    space: &S,
    phi: &TriangleFunction,
) -> Result<TriangleCheck, PhiError> {
    let (triples, scope) = space.triples();
    let mut violations = Vec::new();
    for &(x, y, z) in &triples {
        let lhs = space.distance(x, y);
        let rhs = phi.evaluate(space.distance(x, z), space.distance(z, y))?;
        if exceeds(lhs, rhs) {
            violations.push(TriangleViolation {
                x: space.describe(x),
                y: space.describe(y),
                z: space.describe(z),
                lhs,
                rhs,
            });
        }
    }
    Ok(TriangleCheck {
        scope,
        triples_checked: triples.len(),
        violations,
    })
}

/// Smallest `K` with `d(x, y) <= K (d(x, z) + d(z, y))`: the maximum ratio
/// over all triples with `x != y` (degenerate `z` included, so the result is
/// at least 1 and equals 1 exactly for metric spaces).
pub fn minimal_b_constant(space: &FiniteSpace) -> Result<f64, SpaceError> {
    let n = space.len();
    if n < 2 {
        return Err(SpaceError::Structure("need at least 2 points".into()));
    }
    let mut best: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            for z in 0..n {
                let denom = space.d(x, z) + space.d(z, y);
                if denom <= 0.0 {
                    return Err(SpaceError::Structure(format!(
                        "zero detour between distinct points {} and {}",
                        space.labels[x], space.labels[y]
                    )));
                }
                best = best.max(space.d(x, y) / denom);
            }
        }
    }
    Ok(best)
}

/// `x_n -> x`, `y_n -> y`; checks `d(x_n, y_n) -> d(x, y)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct SequencePair {
    pub x: Sequence,
    pub y: Sequence,
}

/// Sequences `a_n, b_n -> 0`, an arbitrary `c_n >= 0` and `l > 0` for the
/// squeeze `l <= Φ(b_n, Φ(a_n, c_n))`, `c_n <= Φ(a_n, Φ(l, b_n))`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct SqueezeEntry {
    pub a: Sequence,
    pub b: Sequence,
    pub c: Sequence,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Battery {
    pub pairs: Vec<SequencePair>,
    pub squeezes: Vec<SqueezeEntry>,
}

impl Battery {
    /// Converging sequence pairs inside `[lo, hi]` plus two squeeze entries.
    pub fn standard(space: &IntervalSpace) -> Battery {
        let (lo, hi) = (space.lo(), space.hi());
        let w = hi - lo;
        let mid = lo + 0.5 * w;
        let pairs = Vec::from([
            SequencePair {
                x: Sequence::new(lo, w, Decay::Harmonic),
                y: Sequence::new(hi, -w, Decay::Harmonic),
            },
            SequencePair {
                x: Sequence::new(mid, 0.25 * w, Decay::InverseSqrt),
                y: Sequence::new(mid, -0.25 * w, Decay::Oscillating),
            },
            SequencePair {
                x: Sequence::new(lo + 0.25 * w, 0.25 * w, Decay::Geometric),
                y: Sequence::new(
                    hi - 0.25 * w,
                    0.1 * w,
                    Decay::RandomHarmonic { seed: SAMPLE_SEED },
                ),
            },
            SequencePair {
                x: Sequence::new(mid, 0.5 * w, Decay::InverseSquare),
                y: Sequence::constant(mid),
            },
        ]);
        let squeezes = Vec::from([
            SqueezeEntry {
                a: Sequence::new(0.0, 1.0, Decay::Harmonic),
                b: Sequence::new(0.0, 1.0, Decay::Harmonic),
                c: Sequence::new(1.0, 2.0, Decay::Harmonic),
                l: 1.0,
            },
            SqueezeEntry {
                a: Sequence::new(0.0, 1.0, Decay::InverseSquare),
                b: Sequence::new(0.0, 0.5, Decay::Harmonic),
                c: Sequence::new(2.0, 0.5, Decay::InverseSquare),
                l: 2.0,
            },
        ]);
        Battery { pairs, squeezes }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct LimitOutcome {
    pub accepted: bool,
    pub diagnostic: Option<String>,
    pub limit: f64,
    pub max_tail_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct ContinuityReport {
    /// Why the harness refused to run, if it did.
    pub refused: Option<String>,
    /// Set when `d` violates the inequality for `Φ` but is a metric, so its
    /// continuity follows from `u + v` instead.
    pub note: Option<String>,
    pub pairs: Vec<LimitOutcome>,
    pub squeezes: Vec<LimitOutcome>,
}

impl ContinuityReport {
    /// Ran, and every accepted entry converged.
    pub fn passed(&self) -> bool {
        self.refused.is_none()
            && self
                .pairs
                .iter()
                .chain(&self.squeezes)
                .all(|o| !o.accepted || o.passed)
    }
}

fn rejected(limit: f64, why: String) -> LimitOutcome {
    LimitOutcome {
        accepted: false,
        diagnostic: Some(why),
        limit,
        max_tail_deviation: f64::NAN,
        passed: false,
    }
}

/// Sequential continuity of `d` on an interval space, and the squeeze
/// argument behind it, checked on a sequence battery.
///
/// Refuses to run unless `phi` passes the `(x_n, y_n)` battery and the space
/// satisfies the generalized triangle inequality for `phi` (or, failing
/// that, is a metric space). Entries whose hypotheses fail are rejected with a
/// diagnostic, not counted as failures.
pub fn continuity_harness(
    space: &IntervalSpace,
    phi: &TriangleFunction,
    battery: &Battery,
) -> Result<ContinuityReport, PhiError> {
    let q3 = phi.check_q3(1, LIMIT_TOL)?;
    if !q3.passed {
        return Ok(ContinuityReport {
            refused: Some(format!(
                "triangle function fails |Φ(x_n, y_n) - y_n| -> 0 (tail deviation {})",
                q3.max_tail_deviation
            )),
            note: None,
            pairs: Vec::new(),
            squeezes: Vec::new(),
        });
    }
    let tri = check_generalized_triangle(space, phi)?;
    let mut note = None;
    if let Some(v) = tri.violations.first() {
        if check_generalized_triangle(space, &TriangleFunction::Additive)?.holds() {
            note = Some(format!(
                "d violates the inequality for Φ at ({}, {}, {}) but is a metric; continuity taken from u + v",
                v.x, v.y, v.z
            ));
        }
    }
    if let (Some(v), None) = (tri.violations.first(), &note) {
        return Ok(ContinuityReport {
            refused: Some(format!(
                "d violates the generalized triangle inequality at (x, y, z) = ({}, {}, {}): {} > {}",
                v.x, v.y, v.z, v.lhs, v.rhs
            )),
            note: None,
            pairs: Vec::new(),
            squeezes: Vec::new(),
        });
    }

    let window = TailWindow::default();
    let indices = window.indices();
    let pairs = battery
        .pairs
        .iter()
        .map(|entry| {
            let (Some(x), Some(y)) = (entry.x.converges_to(), entry.y.converges_to()) else {
                return rejected(f64::NAN, "sequence does not converge".into());
            };
            if !(space.contains(x) && space.contains(y)) {
                return rejected(
                    f64::NAN,
                    format!("limits ({}, {}) lie outside the interval", x, y),
                );
            }
            if let Some(&n) = indices
                .iter()
                .find(|&&n| !(space.contains(entry.x.at(n)) && space.contains(entry.y.at(n))))
            {
                return rejected(
                    f64::NAN,
                    format!("sequence leaves the interval at n = {}", n),
                );
            }
            let limit = space.distance(x, y);
            let (dev, _) =
                window.tail_deviation(|n| space.distance(entry.x.at(n), entry.y.at(n)), limit);
            LimitOutcome {
                accepted: true,
                diagnostic: None,
                limit,
                max_tail_deviation: dev,
                passed: dev < LIMIT_TOL,
            }
        })
        .collect();

    let mut squeezes = Vec::new();
    for e in &battery.squeezes {
        squeezes.push(squeeze_outcome(phi, e, &window, &indices)?);
    }
    Ok(ContinuityReport {
        refused: None,
        note,
        pairs,
        squeezes,
    })
}

fn squeeze_outcome(
    phi: &TriangleFunction,
    e: &SqueezeEntry,
    window: &TailWindow,
    indices: &[f64],
) -> Result<LimitOutcome, PhiError> {
    if !(e.l > 0.0) {
        return Ok(rejected(e.l, format!("l must be positive, got {}", e.l)));
    }
    if e.a.converges_to() != Some(0.0) || e.b.converges_to() != Some(0.0) {
        return Ok(rejected(e.l, "a_n and b_n must tend to 0".into()));
    }
    for &n in indices {
        let (a, b, c) = (e.a.at(n), e.b.at(n), e.c.at(n));
        if !(a >= 0.0 && b >= 0.0 && c >= 0.0) {
            return Ok(rejected(e.l, format!("negative term at n = {}", n)));
        }
        let lower = phi.evaluate(b, phi.evaluate(a, c)?)?;
        if exceeds(e.l, lower) {
            return Ok(rejected(
                e.l,
                format!(
                    "l <= Φ(b_n, Φ(a_n, c_n)) fails at n = {}: {} > {}",
                    n, e.l, lower
                ),
            ));
        }
        let upper = phi.evaluate(a, phi.evaluate(e.l, b)?)?;
        if exceeds(c, upper) {
            return Ok(rejected(
                e.l,
                format!(
                    "c_n <= Φ(a_n, Φ(l, b_n)) fails at n = {}: {} > {}",
                    n, c, upper
                ),
            ));
        }
    }
    let (dev, _) = window.tail_deviation(|n| e.c.at(n), e.l);
    Ok(LimitOutcome {
        accepted: true,
        diagnostic: None,
        limit: e.l,
        max_tail_deviation: dev,
        passed: dev < LIMIT_TOL,
    })
}
