//! Triangle functions `Φ` and the conditions imposed on them.
//!
//! A triangle function is symmetric, non-decreasing in both arguments and
//! vanishes at the origin. The fixed-point theorems additionally ask for
//! homogeneity `Φ(ku, kv) = kΦ(u, v)`, a uniform bound `C(α)` on the nested
//! chains `Φ(1, Φ(α, Φ(α², …, Φ(α^{p-1}, α^p))))`, and, for continuity of the
//! semimetric, `|Φ(x_n, y_n) - y_n| -> 0` whenever `x_n -> 0`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::expr::{Expr, ExprError, Var};
use crate::sequence::{bounded_battery, null_battery, Sequence, TailWindow};
use crate::tolerance::{approx_eq, ABS_TOL, LIMIT_TOL, REL_TOL};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhiError {
    #[error("Φ is only defined for non-negative arguments, got ({u}, {v})")]
    NegativeArgument { u: f64, v: f64 },
    #[error("Φ({u}, {v}) evaluated to {value}, which is not a non-negative real")]
    InvalidValue { u: f64, v: f64, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid sampling grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A user-supplied triangle function in the variables `u` and `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomPhi {
    expr: Expr,
}

impl CustomPhi {
    pub fn parse(text: &str) -> Result<Self, PhiError> {
        Ok(CustomPhi {
            expr: Expr::parse_with(text, &[Var::U, Var::V])?,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

/// The triangle function families.
///
/// Construct through [`TriangleFunction::b_scaled`], [`TriangleFunction::power`]
/// and [`TriangleFunction::custom`] to get parameter validation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "PhiRepr", into = "PhiRepr"))]
pub enum TriangleFunction {
    /// `u + v`: metric spaces.
    Additive,
    /// `max{u, v}`: ultrametric spaces.
    Max,
    /// `K(u + v)` with `K >= 1`: b-metric spaces.
    BScaled {
        k: f64,
    },
    /// `(u^q + v^q)^(1/q)` with `q > 0`.
    Power {
        q: f64,
    },
    Custom(CustomPhi),
}

#[cfg(feature = "serde")]
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PhiRepr {
    // Struct variants so that stray fields are rejected.
    Additive {},
    Max {},
    Bscaled {
        #[serde(rename = "K")]
        k: f64,
    },
    Power {
        q: f64,
    },
    Custom {
        expr: String,
    },
}

#[cfg(feature = "serde")]
impl TryFrom<PhiRepr> for TriangleFunction {
    type Error = PhiError;

    fn try_from(r: PhiRepr) -> Result<Self, PhiError> {
        match r {
            PhiRepr::Additive {} => Ok(TriangleFunction::Additive),
            PhiRepr::Max {} => Ok(TriangleFunction::Max),
            PhiRepr::Bscaled { k } => TriangleFunction::b_scaled(k),
            PhiRepr::Power { q } => TriangleFunction::power(q),
            PhiRepr::Custom { expr } => TriangleFunction::custom(&expr),
        }
    }
}

#[cfg(feature = "serde")]
impl From<TriangleFunction> for PhiRepr {
    fn from(phi: TriangleFunction) -> Self {
        use alloc::string::ToString;
        match phi {
            TriangleFunction::Additive => PhiRepr::Additive {},
            TriangleFunction::Max => PhiRepr::Max {},
            TriangleFunction::BScaled { k } => PhiRepr::Bscaled { k },
            TriangleFunction::Power { q } => PhiRepr::Power { q },
            TriangleFunction::Custom(c) => PhiRepr::Custom {
                expr: c.expr.source().to_string(),
            },
        }
    }
}

impl core::fmt::Display for TriangleFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TriangleFunction::Additive => f.write_str("u + v"),
            TriangleFunction::Max => f.write_str("max(u, v)"),
            TriangleFunction::BScaled { k } => write!(f, "{}(u + v)", k),
            TriangleFunction::Power { q } => write!(f, "(u^{q} + v^{q})^(1/{q})", q = q),
            TriangleFunction::Custom(c) => f.write_str(c.expr.source()),
        }
    }
}

/// How firmly a property is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    /// Follows from a closed form.
    Holds,
    /// No counterexample on a finite sample; not a proof.
    HoldsSampled,
    Fails,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self != Verdict::Fails
    }

    pub fn sampled(ok: bool) -> Verdict {
        if ok {
            Verdict::HoldsSampled
        } else {
            Verdict::Fails
        }
    }

    pub fn exact(ok: bool) -> Verdict {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

/// Square sampling grid `{0, h, 2h, …, max}²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub max: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            max: 10.0,
            points: 41,
        }
    }
}

impl Grid {
    fn values(&self) -> Result<Vec<f64>, PhiError> {
        if self.points < 2 {
            return Err(PhiError::InvalidGrid(format!(
                "need at least 2 points per axis, got {}",
                self.points
            )));
        }
        if !(self.max.is_finite() && self.max > 0.0) {
            return Err(PhiError::InvalidGrid(format!(
                "upper end must be a positive real, got {}",
                self.max
            )));
        }
        let h = self.max / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| i as f64 * h).collect())
    }
}

/// A point where an axiom fails. `against` holds the comparison point for
/// symmetry and monotonicity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct AxiomWitness {
    pub at: (f64, f64),
    pub value: f64,
    pub against: Option<((f64, f64), f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct AxiomReport {
    pub symmetry: Option<AxiomWitness>,
    pub monotone_first: Option<AxiomWitness>,
    pub monotone_second: Option<AxiomWitness>,
    pub zero_at_origin: Option<AxiomWitness>,
    pub nonnegative: Option<AxiomWitness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.symmetry.is_none()
            && self.monotone_first.is_none()
            && self.monotone_second.is_none()
            && self.zero_at_origin.is_none()
            && self.nonnegative.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct HomogeneityWitness {
    pub k: f64,
    pub u: f64,
    pub v: f64,
    /// `Φ(ku, kv)`
    pub scaled: f64,
    /// `kΦ(u, v)`
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct HomogeneityReport {
    pub passed: bool,
    pub samples: usize,
    pub witness: Option<HomogeneityWitness>,
}

/// Value of `C(α)`; `value` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct CAlpha {
    #[cfg_attr(
        feature = "serde",
        serde(serialize_with = "crate::serde_ext::extended")
    )]
    pub value: f64,
    /// `false` when the value comes from a finite chain prefix.
    pub certified: bool,
}

impl CAlpha {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct ChainBoundReport {
    pub alpha: f64,
    /// `values[p - 1]` is the chain value at depth `p`.
    pub values: Vec<f64>,
    #[cfg_attr(
        feature = "serde",
        serde(serialize_with = "crate::serde_ext::extended")
    )]
    pub c_alpha: f64,
    pub certified: bool,
    /// Two successive chain values differ by less than the cutoff.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Q3Witness {
    pub x_sequence: Sequence,
    pub y_sequence: Sequence,
    pub n: f64,
    pub x: f64,
    pub y: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Q3Report {
    pub passed: bool,
    pub tol: f64,
    pub max_tail_deviation: f64,
    /// First failing pair in battery order.
    pub witness: Option<Q3Witness>,
    /// `Φ(a_n, b_n) -> 0` for every pair of null sequences.
    pub continuous_at_origin: bool,
    pub origin_tail_value: f64,
}

/// Chain depth limit for custom triangle functions.
pub const CHAIN_DEPTH: usize = 64;
/// Successive chain values closer than this count as converged.
pub const CHAIN_CUTOFF: f64 = 1e-12;
/// Fixed seed of the `(x_n, y_n)` battery.
pub const Q3_SEED: u64 = 0x0C0F_FEE5;

impl TriangleFunction {
    pub fn b_scaled(k: f64) -> Result<Self, PhiError> {
        if !(k.is_finite() && k >= 1.0) {
            return Err(PhiError::InvalidParameter(format!(
                "K must be >= 1, got {}",
                k
            )));
        }
        Ok(TriangleFunction::BScaled { k })
    }

    pub fn power(q: f64) -> Result<Self, PhiError> {
        if !(q.is_finite() && q > 0.0) {
            return Err(PhiError::InvalidParameter(format!(
                "q must be > 0, got {}",
                q
            )));
        }
        Ok(TriangleFunction::Power { q })
    }

    pub fn custom(expr: &str) -> Result<Self, PhiError> {
        Ok(TriangleFunction::Custom(CustomPhi::parse(expr)?))
    }

    pub fn is_custom(&self) -> bool {
        matches!(self, TriangleFunction::Custom(_))
    }

    /// Closed form without argument or range checks.
    pub fn raw(&self, u: f64, v: f64) -> f64 {
        match self {
            TriangleFunction::Additive => u + v,
            TriangleFunction::Max => u.max(v),
            TriangleFunction::BScaled { k } => k * (u + v),
            TriangleFunction::Power { q } => power_mean(u, v, *q),
            TriangleFunction::Custom(c) => c.expr.eval_uv(u, v),
        }
    }

    pub fn evaluate(&self, u: f64, v: f64) -> Result<f64, PhiError> {
        if !(u >= 0.0 && v >= 0.0) {
            return Err(PhiError::NegativeArgument { u, v });
        }
        let value = self.raw(u, v);
        if !(value >= 0.0)
            || value.is_nan()
            || (value.is_infinite() && u.is_finite() && v.is_finite())
        {
            return Err(PhiError::InvalidValue { u, v, value });
        }
        Ok(value)
    }

    /// `Ψ(t) = Φ(t, 1)`.
    pub fn psi(&self, t: f64) -> Result<f64, PhiError> {
        self.evaluate(t, 1.0)
    }

    /// Symmetry, monotonicity in each slot, `Φ(0,0) = 0` and non-negativity on a grid.
    pub fn check_axioms(&self, grid: &Grid) -> Result<AxiomReport, PhiError> {
        let g = grid.values()?;
        let n = g.len();
        let mut table = Vec::with_capacity(n * n);
        for &u in &g {
            for &v in &g {
                let value = self.raw(u, v);
                if !value.is_finite() {
                    return Err(PhiError::InvalidValue { u, v, value });
                }
                table.push(value);
            }
        }
        let at = |i: usize, j: usize| table[i * n + j];
        let mut report = AxiomReport::default();

        let origin = at(0, 0);
        if origin.abs() > ABS_TOL {
            report.zero_at_origin = Some(AxiomWitness {
                at: (0.0, 0.0),
                value: origin,
                against: None,
            });
        }
        'outer: for i in 0..n {
            for j in 0..n {
                if at(i, j) < -ABS_TOL {
                    report.nonnegative = Some(AxiomWitness {
                        at: (g[i], g[j]),
                        value: at(i, j),
                        against: None,
                    });
                    break 'outer;
                }
            }
        }
        'outer: for i in 0..n {
            for j in (i + 1)..n {
                if !approx_eq(at(i, j), at(j, i)) {
                    report.symmetry = Some(AxiomWitness {
                        at: (g[i], g[j]),
                        value: at(i, j),
                        against: Some(((g[j], g[i]), at(j, i))),
                    });
                    break 'outer;
                }
            }
        }
        let decreases = |lo: f64, hi: f64| lo > hi + REL_TOL * hi.abs().max(lo.abs()) + ABS_TOL;
        'outer: for j in 0..n {
            for i in 0..n - 1 {
                if decreases(at(i, j), at(i + 1, j)) {
                    report.monotone_first = Some(AxiomWitness {
                        at: (g[i], g[j]),
                        value: at(i, j),
                        against: Some(((g[i + 1], g[j]), at(i + 1, j))),
                    });
                    break 'outer;
                }
            }
        }
        'outer: for i in 0..n {
            for j in 0..n - 1 {
                if decreases(at(i, j), at(i, j + 1)) {
                    report.monotone_second = Some(AxiomWitness {
                        at: (g[i], g[j]),
                        value: at(i, j),
                        against: Some(((g[i], g[j + 1]), at(i, j + 1))),
                    });
                    break 'outer;
                }
            }
        }
        Ok(report)
    }

    /// `|Φ(ku, kv) - kΦ(u, v)| <= tol · max(1, kΦ(u, v))` on every `(k, u, v)`.
    pub fn check_homogeneity(
        &self,
        samples: &[(f64, f64, f64)],
    ) -> Result<HomogeneityReport, PhiError> {
        for &(k, u, v) in samples {
            if !(k >= 0.0 && u >= 0.0 && v >= 0.0) {
                return Err(PhiError::InvalidParameter(format!(
                    "homogeneity samples must be non-negative, got ({}, {}, {})",
                    k, u, v
                )));
            }
        }
        for &(k, u, v) in samples {
            let scaled = self.evaluate(k * u, k * v)?;
            let expected = k * self.evaluate(u, v)?;
            if (scaled - expected).abs() > REL_TOL * expected.max(1.0) {
                return Ok(HomogeneityReport {
                    passed: false,
                    samples: samples.len(),
                    witness: Some(HomogeneityWitness {
                        k,
                        u,
                        v,
                        scaled,
                        expected,
                    }),
                });
            }
        }
        Ok(HomogeneityReport {
            passed: true,
            samples: samples.len(),
            witness: None,
        })
    }

    /// `Φ(1, Φ(α, Φ(α², …, Φ(α^{p-1}, α^p))))`, built from the innermost pair outward.
    pub fn chain_value(&self, alpha: f64, p: usize) -> Result<f64, PhiError> {
        check_alpha(alpha)?;
        if p == 0 {
            return Err(PhiError::InvalidParameter(
                "chain depth p must be >= 1".into(),
            ));
        }
        let powers = alpha_powers(alpha, p);
        let mut acc = self.evaluate(powers[p - 1], powers[p])?;
        for i in (0..p - 1).rev() {
            acc = self.evaluate(powers[i], acc)?;
        }
        Ok(acc)
    }

    /// The chain values for `p = 1..=depth`.
    pub fn chain_report(&self, alpha: f64, depth: usize) -> Result<ChainBoundReport, PhiError> {
        check_alpha(alpha)?;
        if depth == 0 {
            return Err(PhiError::InvalidParameter(
                "chain depth must be >= 1".into(),
            ));
        }
        let values = (1..=depth)
            .map(|p| self.chain_value(alpha, p))
            .collect::<Result<Vec<_>, _>>()?;
        let converged = values
            .windows(2)
            .any(|w| (w[1] - w[0]).abs() < CHAIN_CUTOFF);
        let c = match self.closed_c_alpha(alpha) {
            Some(value) => CAlpha {
                value,
                certified: true,
            },
            None => prefix_c_alpha(&values),
        };
        Ok(ChainBoundReport {
            alpha,
            values,
            c_alpha: c.value,
            certified: c.certified,
            converged,
        })
    }

    fn closed_c_alpha(&self, alpha: f64) -> Option<f64> {
        match self {
            TriangleFunction::Additive => Some(1.0 / (1.0 - alpha)),
            TriangleFunction::Max => Some(1.0),
            TriangleFunction::Power { q } => {
                Some(1.0 / libm::pow(1.0 - libm::pow(alpha, *q), 1.0 / q))
            }
            TriangleFunction::BScaled { k } => Some(if alpha * k < 1.0 {
                k / (1.0 - alpha * k)
            } else {
                f64::INFINITY
            }),
            TriangleFunction::Custom(_) => None,
        }
    }

    /// The uniform chain bound `C(α)`.
    ///
    /// Closed forms for the named families. For custom functions the supremum
    /// of the first [`CHAIN_DEPTH`] chain values once the chain has settled;
    /// otherwise the last value plus a geometric tail fitted to the final
    /// increments, or `+∞` when those increments do not shrink. Custom results
    /// are never certified.
    pub fn c_alpha(&self, alpha: f64) -> Result<CAlpha, PhiError> {
        check_alpha(alpha)?;
        if let Some(value) = self.closed_c_alpha(alpha) {
            return Ok(CAlpha {
                value,
                certified: true,
            });
        }
        let mut values = Vec::with_capacity(CHAIN_DEPTH);
        for p in 1..=CHAIN_DEPTH {
            values.push(self.chain_value(alpha, p)?);
        }
        Ok(prefix_c_alpha(&values))
    }

    /// Falsification battery for `|Φ(x_n, y_n) - y_n| -> 0` whenever `x_n -> 0`.
    ///
    /// `trials` independent reseedings of the random members of the 8 × 8
    /// battery are run; the deviation is measured on the last decade of the
    /// default [`TailWindow`].
    pub fn check_q3(&self, trials: usize, tol: f64) -> Result<Q3Report, PhiError> {
        if trials == 0 {
            return Err(PhiError::InvalidParameter("trials must be >= 1".into()));
        }
        if !(tol > 0.0) {
            return Err(PhiError::InvalidParameter("tol must be > 0".into()));
        }
        let window = TailWindow::default();
        let tail = window.tail();
        let mut max_dev: f64 = 0.0;
        let mut witness = None;
        let mut origin_value: f64 = 0.0;
        for trial in 0..trials as u64 {
            let seed = Q3_SEED.wrapping_add(trial.wrapping_mul(0x1000));
            let xs = null_battery(seed);
            let ys = bounded_battery(seed);
            for xs_ in &xs {
                for ys_ in &ys {
                    for &n in &tail {
                        let (x, y) = (xs_.at(n), ys_.at(n));
                        let deviation = (self.evaluate(x, y)? - y).abs();
                        if deviation > max_dev || deviation.is_nan() {
                            max_dev = deviation;
                        }
                        if witness.is_none() && !(deviation < tol) {
                            witness = Some(Q3Witness {
                                x_sequence: *xs_,
                                y_sequence: *ys_,
                                n,
                                x,
                                y,
                                deviation,
                            });
                        }
                    }
                }
                for other in &xs {
                    for &n in &tail {
                        origin_value = origin_value.max(self.evaluate(xs_.at(n), other.at(n))?);
                    }
                }
            }
        }
        Ok(Q3Report {
            passed: witness.is_none(),
            tol,
            max_tail_deviation: max_dev,
            witness,
            continuous_at_origin: origin_value < tol,
            origin_tail_value: origin_value,
        })
    }

    /// Generalized inverse `Ψ⁻¹(τ) = inf { t >= 0 : Φ(t, 1) >= τ }`, `+∞` if the set is empty.
    pub fn psi_inverse(&self, tau: f64) -> Result<f64, PhiError> {
        if !(tau >= 0.0) {
            return Err(PhiError::InvalidParameter(format!(
                "τ must be >= 0, got {}",
                tau
            )));
        }
        if tau == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        Ok(match self {
            TriangleFunction::Additive => (tau - 1.0).max(0.0),
            TriangleFunction::Max => {
                if tau <= 1.0 {
                    0.0
                } else {
                    tau
                }
            }
            TriangleFunction::BScaled { k } => (tau / k - 1.0).max(0.0),
            TriangleFunction::Power { q } => {
                if tau >= 1.0 {
                    libm::pow(libm::pow(tau, *q) - 1.0, 1.0 / q)
                } else {
                    0.0
                }
            }
            TriangleFunction::Custom(_) => self.psi_inverse_bisect(tau)?,
        })
    }

    /// Doubling bracket from `[0, 1]` up to `1e18`, then 200 bisection steps.
    fn psi_inverse_bisect(&self, tau: f64) -> Result<f64, PhiError> {
        if self.psi(0.0)? >= tau {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.psi(hi)? < tau {
            lo = hi;
            hi *= 2.0;
            if hi > 1e18 {
                return Ok(f64::INFINITY);
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.psi(mid)? >= tau {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Homogeneity: exact for the named families, sampled for custom ones.
    pub fn homogeneity_verdict(&self) -> Result<Verdict, PhiError> {
        if !self.is_custom() {
            return Ok(Verdict::Holds);
        }
        Ok(Verdict::sampled(
            self.check_homogeneity(&homogeneity_battery())?.passed,
        ))
    }

    /// `Φ(u, v) -> 0` as `(u, v) -> (0, 0)`.
    pub fn origin_continuity_verdict(&self) -> Result<Verdict, PhiError> {
        if !self.is_custom() {
            return Ok(Verdict::Holds);
        }
        Ok(Verdict::sampled(
            self.check_q3(1, LIMIT_TOL)?.continuous_at_origin,
        ))
    }

    /// Joint continuity on `[0, 10]²`, probed with steps of `1e-12`.
    pub fn continuity_verdict(&self) -> Result<Verdict, PhiError> {
        if !self.is_custom() {
            return Ok(Verdict::Holds);
        }
        const H: f64 = 1e-12;
        for &u in &Grid::default().values()? {
            for &v in &Grid::default().values()? {
                let base = self.evaluate(u, v)?;
                for (du, dv) in [(H, 0.0), (0.0, H), (H, H)] {
                    let near = self.raw(u + du, v + dv);
                    if !near.is_finite() || (near - base).abs() > 1e-4 * base.max(1.0) {
                        return Ok(Verdict::Fails);
                    }
                }
            }
        }
        Ok(Verdict::HoldsSampled)
    }

    /// `Φ(0, v) < 1` for every `0 <= v < 1`.
    pub fn origin_slice_verdict(&self) -> Result<Verdict, PhiError> {
        match self {
            TriangleFunction::Additive | TriangleFunction::Max | TriangleFunction::Power { .. } => {
                Ok(Verdict::Holds)
            }
            TriangleFunction::BScaled { k } => Ok(Verdict::exact(*k <= 1.0)),
            TriangleFunction::Custom(_) => {
                let mut vs: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
                vs.extend([1.0 - 1e-6, 1.0 - 1e-9, 1.0 - 1e-12]);
                for v in vs {
                    if self.evaluate(0.0, v)? >= 1.0 {
                        return Ok(Verdict::Fails);
                    }
                }
                Ok(Verdict::HoldsSampled)
            }
        }
    }

    /// `Φ(a, b) <= a + b` for all `a, b >= 0`.
    pub fn sum_dominated_verdict(&self) -> Result<Verdict, PhiError> {
        match self {
            TriangleFunction::Additive | TriangleFunction::Max => Ok(Verdict::Holds),
            TriangleFunction::Power { q } => Ok(Verdict::exact(*q >= 1.0)),
            TriangleFunction::BScaled { k } => Ok(Verdict::exact(*k <= 1.0)),
            TriangleFunction::Custom(_) => {
                let g = Grid::default().values()?;
                for &a in &g {
                    for &b in &g {
                        if crate::tolerance::exceeds(self.evaluate(a, b)?, a + b) {
                            return Ok(Verdict::Fails);
                        }
                    }
                }
                Ok(Verdict::HoldsSampled)
            }
        }
    }

    /// Continuity of every semimetric with this triangle function, through
    /// `|Φ(x_n, y_n) - y_n| -> 0`.
    pub fn distance_continuity_verdict(&self) -> Result<Verdict, PhiError> {
        match self {
            TriangleFunction::Additive | TriangleFunction::Max | TriangleFunction::Power { .. } => {
                Ok(Verdict::Holds)
            }
            // |K(x_n + 1) - 1| -> K - 1 along y_n = 1.
            TriangleFunction::BScaled { k } => Ok(Verdict::exact(*k <= 1.0)),
            TriangleFunction::Custom(_) => {
                Ok(Verdict::sampled(self.check_q3(1, LIMIT_TOL)?.passed))
            }
        }
    }
}

fn power_mean(u: f64, v: f64, q: f64) -> f64 {
    let m = u.max(v);
    if m == 0.0 || m.is_infinite() {
        return m;
    }
    // Factor out the larger argument so u^q does not under- or overflow.
    let (a, b) = (u / m, v / m);
    m * libm::pow(libm::pow(a, q) + libm::pow(b, q), 1.0 / q)
}

fn check_alpha(alpha: f64) -> Result<(), PhiError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(PhiError::InvalidParameter(format!(
            "α must lie in [0, 1), got {}",
            alpha
        )));
    }
    Ok(())
}

fn alpha_powers(alpha: f64, p: usize) -> Vec<f64> {
    (0..=p).map(|i| libm::pow(alpha, i as f64)).collect()
}

fn prefix_c_alpha(values: &[f64]) -> CAlpha {
    let converged = values
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() < CHAIN_CUTOFF);
    let sup = values.iter().copied().fold(0.0, f64::max);
    let value = if converged {
        sup
    } else {
        geometric_tail(values).map_or(f64::INFINITY, |t| sup.max(t))
    };
    CAlpha {
        value,
        certified: false,
    }
}

/// Increments inspected when extrapolating an unsettled chain.
const TAIL_INCREMENTS: usize = 8;

/// `v_p + Δ_p r/(1 - r)` with `r` the largest ratio of the last increments.
fn geometric_tail(values: &[f64]) -> Option<f64> {
    if values.len() < TAIL_INCREMENTS + 2 {
        return None;
    }
    let inc: Vec<f64> = values[values.len() - TAIL_INCREMENTS - 1..]
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    if inc.iter().any(|&d| !(d > 0.0)) {
        return None;
    }
    let r = inc.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    if !(r < 1.0) {
        return None;
    }
    let last = values[values.len() - 1];
    Some(last + inc[inc.len() - 1] * r / (1.0 - r))
}

/// Deterministic `(k, u, v)` samples used for homogeneity verdicts.
pub fn homogeneity_battery() -> Vec<(f64, f64, f64)> {
    let ks = [0.0, 0.25, 0.5, 2.0, 3.7, 10.0];
    let uv = [0.0, 0.3, 1.0, 2.5, 7.0];
    let mut out = Vec::new();
    for &k in &ks {
        for &u in &uv {
            for &v in &uv {
                out.push((k, u, v));
            }
        }
    }
    out
}
