//! The six contraction classes: verification, minimal constants, theorem
//! applicability and the per-step rate each class induces on a Picard orbit.
//!
//! | class                | `d(Tx, Ty) <=`                        |
//! |----------------------|---------------------------------------|
//! | partial              | `α d(x, y) + β d(x, Tx)`              |
//! | partial (dual)       | `α d(x, y) + β d(y, Ty)`              |
//! | weak                 | `α d(x, y) + δ d(x, Ty)`              |
//! | weak (dual)          | `α d(x, y) + δ d(y, Tx)`              |
//! | Bianchini            | `β max{d(x, Tx), d(y, Ty)}`           |
//! | Chatterjea–Bianchini | `β max{d(x, Ty), d(y, Tx)}`           |

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::expr::{Expr, ExprError, Var};
use crate::space::{FiniteSpace, IntervalSpace, Scope, Space};
use crate::tolerance::exceeds;
use crate::trifun::{PhiError, TriangleFunction, Verdict};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("image {image} of point {point} is not a point index (space has {len} points)")]
    IndexOutOfRange {
        point: usize,
        image: usize,
        len: usize,
    },
    #[error("map has {found} images for a space of {expected} points")]
    LengthMismatch { expected: usize, found: usize },
    #[error("iterate escaped the domain: T({point}) = {image}")]
    DomainEscape { point: String, image: f64 },
    #[error("map expression: {0}")]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error("invalid constants: {0}")]
    InvalidConstants(String),
}

/// A self-map `T: X -> X` of a space `S`.
pub trait SelfMap<S: Space> {
    fn apply(&self, space: &S, x: S::Point) -> Result<S::Point, MapError>;
}

/// A self-map of a finite space given by its image indices.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FiniteMap {
    pub images: Vec<usize>,
}

impl FiniteMap {
    pub fn new(images: Vec<usize>, space: &FiniteSpace) -> Result<Self, MapError> {
        let map = FiniteMap { images };
        map.validate(space)?;
        Ok(map)
    }

    pub fn identity(n: usize) -> Self {
        FiniteMap {
            images: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, target: usize) -> Self {
        FiniteMap {
            images: alloc::vec![target; n],
        }
    }

    pub fn validate(&self, space: &FiniteSpace) -> Result<(), MapError> {
        let len = space.len();
        if self.images.len() != len {
            return Err(MapError::LengthMismatch {
                expected: len,
                found: self.images.len(),
            });
        }
        match self.images.iter().enumerate().find(|(_, &j)| j >= len) {
            Some((point, &image)) => Err(MapError::IndexOutOfRange { point, image, len }),
            None => Ok(()),
        }
    }
}

impl SelfMap<FiniteSpace> for FiniteMap {
    fn apply(&self, space: &FiniteSpace, x: usize) -> Result<usize, MapError> {
        let len = space.len();
        match self.images.get(x) {
            Some(&image) if image < len => Ok(image),
            Some(&image) => Err(MapError::IndexOutOfRange {
                point: x,
                image,
                len,
            }),
            None => Err(MapError::LengthMismatch {
                expected: len,
                found: self.images.len(),
            }),
        }
    }
}

/// A self-map of an interval given as an expression in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMap {
    expr: Expr,
}

impl IntervalMap {
    pub fn parse(text: &str) -> Result<Self, MapError> {
        Ok(IntervalMap {
            expr: Expr::parse_with(text, &[Var::X])?,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Checks that every sampled image stays inside the interval.
    pub fn check_domain(&self, space: &IntervalSpace) -> Result<(), MapError> {
        for x in space.sample_points() {
            self.apply(space, x)?;
        }
        Ok(())
    }
}

impl SelfMap<IntervalSpace> for IntervalMap {
    fn apply(&self, space: &IntervalSpace, x: f64) -> Result<f64, MapError> {
        let image = self.expr.eval_x(x);
        if image.is_finite() && space.contains(image) {
            Ok(image)
        } else {
            Err(MapError::DomainEscape {
                point: format!("{}", x),
                image,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KindTag {
    Partial,
    PartialDual,
    Weak,
    WeakDual,
    Bianchini,
    ChatterjeaBianchini,
}

impl KindTag {
    pub const ALL: [KindTag; 6] = [
        KindTag::Partial,
        KindTag::PartialDual,
        KindTag::Weak,
        KindTag::WeakDual,
        KindTag::Bianchini,
        KindTag::ChatterjeaBianchini,
    ];

    /// Bianchini-type classes have a single constant `β`.
    pub fn is_single_constant(self) -> bool {
        matches!(self, KindTag::Bianchini | KindTag::ChatterjeaBianchini)
    }

    pub fn name(self) -> &'static str {
        match self {
            KindTag::Partial => "partial",
            KindTag::PartialDual => "partial_dual",
            KindTag::Weak => "weak",
            KindTag::WeakDual => "weak_dual",
            KindTag::Bianchini => "bianchini",
            KindTag::ChatterjeaBianchini => "chatterjea_bianchini",
        }
    }

    /// Name of the second constant of a two-constant class.
    fn second_constant(self) -> &'static str {
        match self {
            KindTag::Partial | KindTag::PartialDual => "beta",
            _ => "delta",
        }
    }
}

/// A contraction class together with its constants.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "KindRepr", into = "KindRepr"))]
pub enum ContractionKind {
    Partial { alpha: f64, beta: f64 },
    PartialDual { alpha: f64, beta: f64 },
    Weak { alpha: f64, delta: f64 },
    WeakDual { alpha: f64, delta: f64 },
    Bianchini { beta: f64 },
    ChatterjeaBianchini { beta: f64 },
}

#[cfg(feature = "serde")]
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KindRepr {
    tag: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<KindRepr> for ContractionKind {
    type Error = MapError;

    fn try_from(r: KindRepr) -> Result<Self, MapError> {
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| {
                MapError::InvalidConstants(format!("`{}` needs `{}`", r.tag.name(), name))
            })
        };
        let forbid = |name: &str, v: Option<f64>| match v {
            Some(_) => Err(MapError::InvalidConstants(format!(
                "`{}` does not take `{}`",
                r.tag.name(),
                name
            ))),
            None => Ok(()),
        };
        if r.tag.is_single_constant() {
            forbid("alpha", r.alpha)?;
            forbid("delta", r.delta)?;
            return ContractionKind::single(r.tag, need("beta", r.beta)?);
        }
        let second = match r.tag.second_constant() {
            "beta" => {
                forbid("delta", r.delta)?;
                need("beta", r.beta)?
            }
            _ => {
                forbid("beta", r.beta)?;
                need("delta", r.delta)?
            }
        };
        ContractionKind::pair(r.tag, need("alpha", r.alpha)?, second)
    }
}

#[cfg(feature = "serde")]
impl From<ContractionKind> for KindRepr {
    fn from(k: ContractionKind) -> Self {
        let (alpha, second) = k.constants();
        let tag = k.tag();
        let (beta, delta) = match tag {
            KindTag::Weak | KindTag::WeakDual => (None, Some(second)),
            _ => (Some(second), None),
        };
        KindRepr {
            tag,
            alpha: (!tag.is_single_constant()).then_some(alpha),
            beta,
            delta,
        }
    }
}

fn check_constant(name: &str, v: f64) -> Result<f64, MapError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(MapError::InvalidConstants(format!(
            "{} must be a finite non-negative real, got {}",
            name, v
        )))
    }
}

impl ContractionKind {
    /// A two-constant class: `alpha` and the class's second constant (`β` or `δ`).
    pub fn pair(tag: KindTag, alpha: f64, second: f64) -> Result<Self, MapError> {
        let alpha = check_constant("alpha", alpha)?;
        let s = check_constant(tag.second_constant(), second)?;
        Ok(match tag {
            KindTag::Partial => ContractionKind::Partial { alpha, beta: s },
            KindTag::PartialDual => ContractionKind::PartialDual { alpha, beta: s },
            KindTag::Weak => ContractionKind::Weak { alpha, delta: s },
            KindTag::WeakDual => ContractionKind::WeakDual { alpha, delta: s },
            KindTag::Bianchini | KindTag::ChatterjeaBianchini => {
                return Err(MapError::InvalidConstants(format!(
                    "`{}` takes a single constant",
                    tag.name()
                )))
            }
        })
    }

    /// A single-constant class with constant `β`.
    pub fn single(tag: KindTag, beta: f64) -> Result<Self, MapError> {
        let beta = check_constant("beta", beta)?;
        match tag {
            KindTag::Bianchini => Ok(ContractionKind::Bianchini { beta }),
            KindTag::ChatterjeaBianchini => Ok(ContractionKind::ChatterjeaBianchini { beta }),
            _ => Err(MapError::InvalidConstants(format!(
                "`{}` takes two constants",
                tag.name()
            ))),
        }
    }

    pub fn tag(&self) -> KindTag {
        match self {
            ContractionKind::Partial { .. } => KindTag::Partial,
            ContractionKind::PartialDual { .. } => KindTag::PartialDual,
            ContractionKind::Weak { .. } => KindTag::Weak,
            ContractionKind::WeakDual { .. } => KindTag::WeakDual,
            ContractionKind::Bianchini { .. } => KindTag::Bianchini,
            ContractionKind::ChatterjeaBianchini { .. } => KindTag::ChatterjeaBianchini,
        }
    }

    /// `(α, second)` for two-constant classes, `(0, β)` for single-constant ones.
    pub fn constants(&self) -> (f64, f64) {
        match *self {
            ContractionKind::Partial { alpha, beta }
            | ContractionKind::PartialDual { alpha, beta } => (alpha, beta),
            ContractionKind::Weak { alpha, delta } | ContractionKind::WeakDual { alpha, delta } => {
                (alpha, delta)
            }
            ContractionKind::Bianchini { beta } | ContractionKind::ChatterjeaBianchini { beta } => {
                (0.0, beta)
            }
        }
    }

    /// Same class, constants replaced.
    pub fn with_constants(&self, alpha: f64, second: f64) -> Result<Self, MapError> {
        let tag = self.tag();
        if tag.is_single_constant() {
            Self::single(tag, second)
        } else {
            Self::pair(tag, alpha, second)
        }
    }

    /// Right-hand side of the defining inequality from the distances
    /// `d(x, y)`, `d(x, Tx)`, `d(y, Ty)`, `d(x, Ty)`, `d(y, Tx)`.
    pub fn rhs_from(&self, k: &Kernels) -> f64 {
        match *self {
            ContractionKind::Partial { alpha, beta } => alpha * k.xy + beta * k.x_tx,
            ContractionKind::PartialDual { alpha, beta } => alpha * k.xy + beta * k.y_ty,
            ContractionKind::Weak { alpha, delta } => alpha * k.xy + delta * k.x_ty,
            ContractionKind::WeakDual { alpha, delta } => alpha * k.xy + delta * k.y_tx,
            ContractionKind::Bianchini { beta } => beta * k.x_tx.max(k.y_ty),
            ContractionKind::ChatterjeaBianchini { beta } => beta * k.x_ty.max(k.y_tx),
        }
    }
}

/// The distances that appear in the defining inequalities, at one pair `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels {
    /// `d(Tx, Ty)`
    pub lhs: f64,
    pub xy: f64,
    pub x_tx: f64,
    pub y_ty: f64,
    pub x_ty: f64,
    pub y_tx: f64,
}

impl Kernels {
    pub fn at<S: Space, M: SelfMap<S>>(
        space: &S,
        map: &M,
        x: S::Point,
        y: S::Point,
    ) -> Result<Self, MapError> {
        let tx = map.apply(space, x)?;
        let ty = map.apply(space, y)?;
        Ok(Kernels {
            lhs: space.distance(tx, ty),
            xy: space.distance(x, y),
            x_tx: space.distance(x, tx),
            y_ty: space.distance(y, ty),
            x_ty: space.distance(x, ty),
            y_tx: space.distance(y, tx),
        })
    }

    /// The term multiplied by the class's last constant.
    fn second(&self, tag: KindTag) -> f64 {
        match tag {
            KindTag::Partial => self.x_tx,
            KindTag::PartialDual => self.y_ty,
            KindTag::Weak => self.x_ty,
            KindTag::WeakDual => self.y_tx,
            KindTag::Bianchini => self.x_tx.max(self.y_ty),
            KindTag::ChatterjeaBianchini => self.x_ty.max(self.y_tx),
        }
    }
}

/// Right-hand side of the class's defining inequality at `(x, y)`.
pub fn defining_rhs<S: Space, M: SelfMap<S>>(
    kind: &ContractionKind,
    space: &S,
    map: &M,
    x: S::Point,
    y: S::Point,
) -> Result<f64, MapError> {
    Ok(kind.rhs_from(&Kernels::at(space, map, x, y)?))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct PairWitness {
    pub x: String,
    pub y: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct ContractionCertificate {
    pub kind: ContractionKind,
    pub scope: Scope,
    pub pairs_checked: usize,
    /// `min (rhs - lhs)` over the checked pairs.
    pub margin: f64,
    /// The pair attaining the margin.
    pub witness: Option<PairWitness>,
}

/// Violations kept in a [`Verification::Violated`] report.
pub const MAX_REPORTED_VIOLATIONS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "snake_case"))]
pub enum Verification {
    Certified(ContractionCertificate),
    Violated {
        kind: ContractionKind,
        scope: Scope,
        pairs_checked: usize,
        /// The first violations, in pair order.
        violations: Vec<PairWitness>,
        count: usize,
    },
}

impl Verification {
    pub fn passed(&self) -> bool {
        matches!(self, Verification::Certified(_))
    }
}

/// Checks the defining inequality on every ordered pair (finite spaces) or on
/// the seeded sample of pairs (interval spaces).
pub fn verify<S: Space, M: SelfMap<S>>(
    space: &S,
    map: &M,
    kind: &ContractionKind,
) -> Result<Verification, MapError> {
    let (pairs, scope) = space.pairs();
    let mut margin = f64::INFINITY;
    let mut witness = None;
    let mut violations = Vec::new();
    let mut count = 0;
    for &(x, y) in &pairs {
        let k = Kernels::at(space, map, x, y)?;
        let rhs = kind.rhs_from(&k);
        let pair = || PairWitness {
            x: space.describe(x),
            y: space.describe(y),
            lhs: k.lhs,
            rhs,
        };
        if exceeds(k.lhs, rhs) {
            count += 1;
            if violations.len() < MAX_REPORTED_VIOLATIONS {
                violations.push(pair());
            }
        }
        let slack = rhs - k.lhs;
        if slack < margin {
            margin = slack;
            witness = Some(pair());
        }
    }
    Ok(if count == 0 {
        Verification::Certified(ContractionCertificate {
            kind: *kind,
            scope,
            pairs_checked: pairs.len(),
            margin,
            witness,
        })
    } else {
        Verification::Violated {
            kind: *kind,
            scope,
            pairs_checked: pairs.len(),
            violations,
            count,
        }
    })
}

/// Minimal `α` for one value of the second constant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct FrontierPoint {
    /// `β` for the partial classes, `δ` for the weak ones.
    pub second: f64,
    /// `None` when no finite `α` works.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "form", rename_all = "snake_case"))]
pub enum MinConstantsOutcome {
    /// Smallest `β`, or `None` when some pair has a vanishing kernel and a
    /// positive left-hand side.
    Single {
        beta: Option<f64>,
        unbounded_at: Option<PairWitness>,
    },
    Frontier {
        points: Vec<FrontierPoint>,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct MinConstants {
    pub tag: KindTag,
    pub scope: Scope,
    /// Exhaustive over all pairs. Sampled estimates are only lower bounds.
    pub certified: bool,
    pub outcome: MinConstantsOutcome,
}

/// Points of the second-constant grid: `i / 101` for `i = 0..=100`.
pub const FRONTIER_POINTS: usize = 101;

pub fn frontier_grid() -> Vec<f64> {
    (0..FRONTIER_POINTS)
        .map(|i| i as f64 / FRONTIER_POINTS as f64)
        .collect()
}

/// Inverts the defining inequality over the pairs of the space.
///
/// Single-constant classes give `β* = max lhs/kernel` over pairs with a
/// positive kernel; `0/0` pairs are skipped and `x/0` with `x > 0` makes the
/// class unreachable. Two-constant classes give, for each grid value `s` of
/// the second constant, the smallest `α >= 0` with `lhs <= α d(x, y) + s·kernel`.
pub fn estimate_min_constants<S: Space, M: SelfMap<S>>(
    space: &S,
    map: &M,
    tag: KindTag,
) -> Result<MinConstants, MapError> {
    let (pairs, scope) = space.pairs();
    let mut kernels = Vec::with_capacity(pairs.len());
    for &(x, y) in &pairs {
        kernels.push((x, y, Kernels::at(space, map, x, y)?));
    }
    let outcome = if tag.is_single_constant() {
        let mut beta: f64 = 0.0;
        let mut unbounded_at = None;
        for (x, y, k) in &kernels {
            let kernel = k.second(tag);
            if kernel > 0.0 {
                beta = beta.max(k.lhs / kernel);
            } else if k.lhs > 0.0 {
                unbounded_at = Some(PairWitness {
                    x: space.describe(*x),
                    y: space.describe(*y),
                    lhs: k.lhs,
                    rhs: 0.0,
                });
                break;
            }
        }
        MinConstantsOutcome::Single {
            beta: unbounded_at.is_none().then_some(beta),
            unbounded_at,
        }
    } else {
        let points = frontier_grid()
            .into_iter()
            .map(|s| FrontierPoint {
                second: s,
                alpha: min_alpha(&kernels, tag, s),
            })
            .collect();
        MinConstantsOutcome::Frontier { points }
    };
    Ok(MinConstants {
        tag,
        scope,
        certified: scope == Scope::AllPairs,
        outcome,
    })
}

fn min_alpha<P>(kernels: &[(P, P, Kernels)], tag: KindTag, s: f64) -> Option<f64> {
    let mut alpha: f64 = 0.0;
    for (_, _, k) in kernels {
        let excess = k.lhs - s * k.second(tag);
        if k.xy > 0.0 {
            alpha = alpha.max(excess / k.xy);
        } else if excess > 0.0 {
            return None;
        }
    }
    Some(alpha)
}

/// The fixed-point theorem matching a contraction class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Theorem {
    /// Partial contraction with `α + β < 1`.
    PartialContraction,
    /// Dual partial contraction; additionally needs `Φ(0, v) < 1`.
    DualPartialContraction,
    /// Weak contraction with `α + 2δ < 1`; needs `Φ(a, b) <= a + b` and a continuous `Φ`.
    WeakContraction,
    /// Dual weak contraction with `α < 1`; unique fixed point when `δ = 0`.
    DualWeakContraction,
    /// Bianchini contraction with `β < 1`; needs `Φ(0, v) < 1` and a continuous `Φ`.
    Bianchini,
    /// Chatterjea–Bianchini contraction; needs `Φ(0, β) < 1`, `Ψ⁻¹(1/β) > 1`
    /// and continuity of both `Φ` and `d`.
    ChatterjeaBianchini,
}

impl Theorem {
    pub fn for_tag(tag: KindTag) -> Self {
        match tag {
            KindTag::Partial => Theorem::PartialContraction,
            KindTag::PartialDual => Theorem::DualPartialContraction,
            KindTag::Weak => Theorem::WeakContraction,
            KindTag::WeakDual => Theorem::DualWeakContraction,
            KindTag::Bianchini => Theorem::Bianchini,
            KindTag::ChatterjeaBianchini => Theorem::ChatterjeaBianchini,
        }
    }
}

/// One hypothesis of a theorem and whether `Φ` and the constants meet it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Hypothesis {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "snake_case"))]
pub enum StepFactor {
    /// `d(x_n, x_{n+1}) <= factor · d(x_{n-1}, x_n)` along every orbit.
    /// `condition` names extra hypotheses the derivation relies on.
    Derived {
        factor: f64,
        condition: Option<String>,
    },
    NotDerivable {
        reason: String,
    },
}

impl StepFactor {
    pub fn factor(&self) -> Option<f64> {
        match self {
            StepFactor::Derived { factor, .. } => Some(*factor),
            StepFactor::NotDerivable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Applicability {
    pub kind: ContractionKind,
    pub phi: TriangleFunction,
    pub theorem: Theorem,
    /// Which family of spaces the decision is about, e.g. "b-metric, K = 2".
    pub setting: String,
    pub applicable: bool,
    /// Every hypothesis holds by a closed form, not only on samples.
    pub certified: bool,
    /// The theorem also guarantees uniqueness of the fixed point.
    pub unique: bool,
    pub rate: StepFactor,
    pub checklist: Vec<Hypothesis>,
}

fn hyp(name: &str, verdict: Verdict, detail: String) -> Hypothesis {
    Hypothesis {
        name: name.to_string(),
        verdict,
        detail,
    }
}

fn setting(phi: &TriangleFunction) -> String {
    match phi {
        TriangleFunction::Additive => "metric".into(),
        TriangleFunction::Max => "ultrametric".into(),
        TriangleFunction::BScaled { k } => format!("b-metric, K = {}", k),
        TriangleFunction::Power { q } => format!("power triangle function, q = {}", q),
        TriangleFunction::Custom(c) => format!("custom triangle function {}", c.expr().source()),
    }
}

/// Per-step contraction factor the class induces on Picard orbits.
///
/// Not derivable when the formula's own precondition fails or the factor
/// would be `>= 1`.
pub fn step_contraction_factor(
    kind: &ContractionKind,
    phi: &TriangleFunction,
) -> Result<StepFactor, PhiError> {
    let not = |reason: String| Ok(StepFactor::NotDerivable { reason });
    let (factor, condition) = match *kind {
        ContractionKind::Partial { alpha, beta } => (alpha + beta, None),
        ContractionKind::PartialDual { alpha, beta } => {
            if beta >= 1.0 {
                return not(format!("α/(1 - β) needs β < 1, got β = {}", beta));
            }
            (alpha / (1.0 - beta), None)
        }
        ContractionKind::WeakDual { alpha, .. } => (alpha, None),
        ContractionKind::Weak { alpha, delta } => {
            if delta >= 1.0 {
                return not(format!("(α + δ)/(1 - δ) needs δ < 1, got δ = {}", delta));
            }
            (
                (alpha + delta) / (1.0 - delta),
                Some("Φ(a, b) <= a + b for all a, b >= 0".to_string()),
            )
        }
        ContractionKind::Bianchini { beta } => (beta, None),
        ContractionKind::ChatterjeaBianchini { beta } => {
            if beta == 0.0 {
                (0.0, None)
            } else {
                let inv = phi.psi_inverse(1.0 / beta)?;
                if !(inv > 0.0) {
                    return not(format!("Ψ⁻¹(1/β) = {} is not positive", inv));
                }
                (1.0 / inv, None)
            }
        }
    };
    if !(factor < 1.0) {
        return not(format!("factor {} is not below 1", factor));
    }
    Ok(StepFactor::Derived { factor, condition })
}

/// Decides whether the class's fixed-point theorem applies for `phi`, with
/// one checklist entry per hypothesis.
pub fn theorem_applicable(
    kind: &ContractionKind,
    phi: &TriangleFunction,
) -> Result<Applicability, PhiError> {
    let tag = kind.tag();
    let (_, second) = kind.constants();
    let rate = step_contraction_factor(kind, phi)?;
    let mut list = Vec::new();

    list.push(hyp(
        "homogeneity",
        phi.homogeneity_verdict()?,
        "Φ(ku, kv) = kΦ(u, v)".into(),
    ));

    // Constants inequality of the class.
    let constants = match *kind {
        ContractionKind::Partial { alpha, beta } => hyp(
            "constants",
            Verdict::exact(alpha + beta < 1.0),
            format!("α + β = {} < 1", alpha + beta),
        ),
        ContractionKind::PartialDual { alpha, beta } => hyp(
            "constants",
            Verdict::exact(beta < 1.0 && alpha / (1.0 - beta) < 1.0),
            format!("α/(1 - β) = {} < 1", alpha / (1.0 - beta)),
        ),
        ContractionKind::Weak { alpha, delta } => hyp(
            "constants",
            Verdict::exact(alpha + 2.0 * delta < 1.0),
            format!("α + 2δ = {} < 1", alpha + 2.0 * delta),
        ),
        ContractionKind::WeakDual { alpha, .. } => hyp(
            "constants",
            Verdict::exact(alpha < 1.0),
            format!("α = {} < 1", alpha),
        ),
        ContractionKind::Bianchini { beta } => hyp(
            "constants",
            Verdict::exact(beta < 1.0),
            format!("β = {} < 1", beta),
        ),
        ContractionKind::ChatterjeaBianchini { beta } => {
            let at = phi.evaluate(0.0, beta)?;
            hyp(
                "constants",
                if phi.is_custom() {
                    Verdict::sampled(at < 1.0)
                } else {
                    Verdict::exact(at < 1.0)
                },
                format!("Φ(0, β) = {} < 1", at),
            )
        }
    };
    list.push(constants);

    if let ContractionKind::ChatterjeaBianchini { beta } = *kind {
        if beta > 0.0 {
            let inv = phi.psi_inverse(1.0 / beta)?;
            let ok = inv > 1.0;
            list.push(hyp(
                "inverse",
                if phi.is_custom() {
                    Verdict::sampled(ok)
                } else {
                    Verdict::exact(ok)
                },
                format!("Ψ⁻¹(1/β) = {} > 1", inv),
            ));
        }
    }

    // Chain bound at the orbit rate.
    let chain = match rate.factor() {
        Some(r) => {
            let c = phi.c_alpha(r)?;
            let detail = match phi {
                TriangleFunction::BScaled { k } => {
                    format!("rate·K = {} < 1, C({}) = {}", r * k, r, c.value)
                }
                _ => format!("C({}) = {}", r, c.value),
            };
            let verdict = if c.certified {
                Verdict::exact(c.is_finite())
            } else {
                Verdict::sampled(c.is_finite())
            };
            hyp("chain_bound", verdict, detail)
        }
        None => hyp(
            "chain_bound",
            Verdict::Fails,
            "no per-step rate below 1, C(α) is not evaluated".into(),
        ),
    };
    list.push(chain);

    match tag {
        KindTag::Partial | KindTag::PartialDual | KindTag::WeakDual => list.push(hyp(
            "continuity_at_origin",
            phi.origin_continuity_verdict()?,
            "Φ(u, v) -> 0 as (u, v) -> (0, 0)".into(),
        )),
        _ => list.push(hyp(
            "continuity",
            phi.continuity_verdict()?,
            "Φ is continuous".into(),
        )),
    }

    match tag {
        KindTag::PartialDual | KindTag::Bianchini => list.push(hyp(
            "origin_slice",
            phi.origin_slice_verdict()?,
            "Φ(0, v) < 1 for 0 <= v < 1".into(),
        )),
        KindTag::Weak => list.push(hyp(
            "sum_dominated",
            phi.sum_dominated_verdict()?,
            "Φ(a, b) <= a + b for a, b >= 0".into(),
        )),
        KindTag::ChatterjeaBianchini => list.push(hyp(
            "distance_continuity",
            phi.distance_continuity_verdict()?,
            "every semimetric with this Φ is continuous".into(),
        )),
        _ => {}
    }

    let applicable = list.iter().all(|h| h.verdict.holds());
    let certified = applicable && list.iter().all(|h| h.verdict == Verdict::Holds);
    let unique = applicable
        && match tag {
            KindTag::Weak | KindTag::WeakDual => second == 0.0,
            KindTag::ChatterjeaBianchini => second < 1.0,
            _ => true,
        };
    Ok(Applicability {
        kind: *kind,
        phi: phi.clone(),
        theorem: Theorem::for_tag(tag),
        setting: setting(phi),
        applicable,
        certified,
        unique,
        rate,
        checklist: list,
    })
}
