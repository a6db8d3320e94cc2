//! Picard iteration, a-priori error bounds and the brute-force fixed-point oracle.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::contraction::{FiniteMap, MapError, SelfMap};
use crate::space::{FiniteSpace, OrbitMemory, OrbitPoint, Space};
use crate::tolerance::{BOUND_TOL, LIMIT_TOL};
use crate::trifun::{PhiError, TriangleFunction};

#[cfg(feature = "serde")]
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid iteration options: {0}")]
    InvalidOptions(String),
    #[error("iterate {iterate}: {source}")]
    Map { iterate: usize, source: MapError },
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error("a-priori bound unavailable at α = {alpha}: {reason}")]
    BoundUnavailable { alpha: f64, reason: String },
    #[error("invalid bound request: {0}")]
    InvalidBound(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct IterationOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions {
            max_iter: 100_000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StopReason {
    Converged,
    MaxIter,
    CycleDetected,
}

/// Steps used for the rate estimate.
pub const RATE_WINDOW: usize = 10;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct IterationTrace<P> {
    pub start: P,
    /// `x_0, x_1, …`
    pub orbit: Vec<P>,
    /// `d(x_n, x_{n+1})`, one shorter than the orbit.
    pub step_dists: Vec<f64>,
    pub stop_reason: StopReason,
    /// Largest ratio of consecutive step distances over the last steps.
    pub rate_estimate: Option<f64>,
    /// Geometric mean of the same ratios.
    pub rate_geometric_mean: Option<f64>,
}

impl<P: Copy> IterationTrace<P> {
    pub fn last(&self) -> P {
        *self.orbit.last().unwrap_or(&self.start)
    }

    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::Converged
    }
}

/// `x_{n+1} = T x_n` from `x0` until the step distance drops below `tol`,
/// `max_iter` steps were taken, or the orbit returns to an earlier point.
pub fn picard_iterate<S: Space, M: SelfMap<S>>(
    space: &S,
    map: &M,
    x0: S::Point,
    opts: &IterationOptions,
) -> Result<IterationTrace<S::Point>, SolverError> {
    if opts.max_iter == 0 {
        return Err(SolverError::InvalidOptions("max_iter must be >= 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(SolverError::InvalidOptions(format!(
            "tol must be > 0, got {}",
            opts.tol
        )));
    }
    let mut memory = <S::Point as OrbitPoint>::Memory::default();
    memory.remember(x0);
    let mut orbit = Vec::from([x0]);
    let mut step_dists = Vec::new();
    let mut stop_reason = StopReason::MaxIter;
    let mut cur = x0;
    for n in 0..opts.max_iter {
        let next = map
            .apply(space, cur)
            .map_err(|source| SolverError::Map { iterate: n, source })?;
        let dist = space.distance(cur, next);
        orbit.push(next);
        step_dists.push(dist);
        if dist < opts.tol {
            stop_reason = StopReason::Converged;
            break;
        }
        if memory.recurs(next, cur) {
            stop_reason = StopReason::CycleDetected;
            break;
        }
        memory.remember(next);
        cur = next;
    }
    let (rate_estimate, rate_geometric_mean) = rate_estimates(&step_dists);
    Ok(IterationTrace {
        start: x0,
        orbit,
        step_dists,
        stop_reason,
        rate_estimate,
        rate_geometric_mean,
    })
}

fn rate_estimates(steps: &[f64]) -> (Option<f64>, Option<f64>) {
    let from = steps.len().saturating_sub(RATE_WINDOW + 1);
    let ratios: Vec<f64> = steps[from..]
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    if ratios.is_empty() {
        return (None, None);
    }
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let geo = if ratios.iter().any(|&r| r == 0.0) {
        0.0
    } else {
        libm::exp(ratios.iter().map(|&r| libm::log(r)).sum::<f64>() / ratios.len() as f64)
    };
    (Some(max), Some(geo))
}

/// `α^n · C(α) · d01`.
pub fn a_priori_bound(
    phi: &TriangleFunction,
    alpha: f64,
    n: usize,
    d01: f64,
) -> Result<f64, SolverError> {
    if !(d01 >= 0.0 && d01.is_finite()) {
        return Err(SolverError::InvalidBound(format!(
            "d(x0, x1) must be finite and >= 0, got {}",
            d01
        )));
    }
    let c = phi.c_alpha(alpha)?;
    if !c.is_finite() {
        return Err(SolverError::BoundUnavailable {
            alpha,
            reason: match phi {
                TriangleFunction::BScaled { k } => {
                    format!("αK = {} >= 1, C(α) is infinite", alpha * k)
                }
                _ => "C(α) is infinite".into(),
            },
        });
    }
    Ok(libm::pow(alpha, n as f64) * c.value * d01)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct BoundRow {
    pub n: usize,
    pub x_n: String,
    /// `d(x_n, x_{n+1})`; absent for the last orbit point.
    pub step_dist: Option<f64>,
    /// `α^n d(x_0, x_1)`
    pub step_bound: Option<f64>,
    /// `α^n C(α) d(x_0, x_1)`
    pub bound: f64,
    /// `d(x_n, x*)`
    pub observed: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct BoundReport {
    pub alpha: f64,
    pub c_alpha: f64,
    pub d01: f64,
    pub fixed_point: String,
    pub rows: Vec<BoundRow>,
    /// Every slack is at least `-BOUND_TOL`.
    pub bound_holds: bool,
    /// `d(x_n, x_{n+1}) <= α^n d(x_0, x_1)` on every step, up to `BOUND_TOL`.
    pub step_holds: bool,
    pub min_slack: f64,
    /// The distance-to-limit bound rests on continuity of `d`, which is only
    /// established when `Φ` passes the `|Φ(x_n, y_n) - y_n| -> 0` battery.
    pub certified: bool,
    pub note: Option<String>,
}

/// Compares the orbit against the a-priori bound with limit `fixed_point`.
pub fn verify_bound<S: Space>(
    space: &S,
    trace: &IterationTrace<S::Point>,
    phi: &TriangleFunction,
    alpha: f64,
    fixed_point: S::Point,
) -> Result<BoundReport, SolverError> {
    if trace.orbit.len() < 2 {
        return Err(SolverError::InvalidBound("trace has no step".into()));
    }
    let d01 = trace.step_dists[0];
    let c = phi.c_alpha(alpha)?;
    // Surfaces BoundUnavailable for infinite C(α).
    a_priori_bound(phi, alpha, 0, d01)?;
    let mut rows = Vec::with_capacity(trace.orbit.len());
    for (n, &x) in trace.orbit.iter().enumerate() {
        let bound = a_priori_bound(phi, alpha, n, d01)?;
        let observed = space.distance(x, fixed_point);
        rows.push(BoundRow {
            n,
            x_n: space.describe(x),
            step_dist: trace.step_dists.get(n).copied(),
            step_bound: trace
                .step_dists
                .get(n)
                .map(|_| libm::pow(alpha, n as f64) * d01),
            bound,
            observed,
            slack: bound - observed,
        });
    }
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let step_holds = rows.iter().all(|r| match (r.step_dist, r.step_bound) {
        (Some(s), Some(b)) => s <= b + BOUND_TOL,
        _ => true,
    });
    let q3 = phi.check_q3(1, LIMIT_TOL)?;
    let mut notes = Vec::new();
    if !q3.passed {
        notes.push(
            "bound not certified: Φ fails |Φ(x_n, y_n) - y_n| -> 0, so d need not be continuous",
        );
    }
    if !c.certified {
        notes.push("C(α) is a numerical estimate");
    }
    Ok(BoundReport {
        alpha,
        c_alpha: c.value,
        d01,
        fixed_point: space.describe(fixed_point),
        bound_holds: min_slack >= -BOUND_TOL,
        step_holds,
        min_slack,
        rows,
        certified: q3.passed && c.certified,
        note: (!notes.is_empty()).then(|| notes.join("; ")),
    })
}

/// Every `x` with `Tx = x`, by exhaustive scan.
pub fn brute_force_fixed_points(
    space: &FiniteSpace,
    map: &FiniteMap,
) -> Result<Vec<usize>, MapError> {
    map.validate(space)?;
    Ok((0..space.len()).filter(|&i| map.images[i] == i).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::IntervalMap;
    use crate::space::IntervalSpace;
    use alloc::vec;

    fn unit() -> IntervalSpace {
        IntervalSpace::euclidean(0.0, 1.0).unwrap()
    }

    fn three() -> FiniteSpace {
        FiniteSpace::from_fn(3, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap()
    }

    #[test]
    fn halving_orbit() {
        let t = IntervalMap::parse("x/2").unwrap();
        let opts = IterationOptions {
            max_iter: 1000,
            tol: 1e-9,
        };
        let tr = picard_iterate(&unit(), &t, 1.0, &opts).unwrap();
        assert_eq!(tr.stop_reason, StopReason::Converged);
        assert_eq!(&tr.step_dists[..3], &[0.5, 0.25, 0.125]);
        assert_eq!(tr.step_dists.len() + 1, tr.orbit.len());
        assert!(*tr.step_dists.last().unwrap() < 1e-9);
        assert_eq!(tr.rate_estimate, Some(0.5));
        assert_eq!(tr.rate_geometric_mean, Some(0.5));
    }

    #[test]
    fn constant_map_converges_in_two_steps() {
        let tr = picard_iterate(
            &three(),
            &FiniteMap::constant(3, 2),
            0,
            &IterationOptions::default(),
        )
        .unwrap();
        assert!(tr.converged());
        assert_eq!(tr.orbit, vec![0, 2, 2]);
        assert_eq!(tr.step_dists.len(), 2);
    }

    #[test]
    fn swap_is_a_cycle() {
        let s = FiniteSpace::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let tr = picard_iterate(
            &s,
            &FiniteMap { images: vec![1, 0] },
            0,
            &IterationOptions::default(),
        )
        .unwrap();
        assert_eq!(tr.stop_reason, StopReason::CycleDetected);
        assert_eq!(tr.orbit, vec![0, 1, 0]);
    }

    #[test]
    fn interval_rotation_is_a_cycle_but_settling_is_not() {
        let t = IntervalMap::parse("1-x").unwrap();
        let tr = picard_iterate(&unit(), &t, 0.25, &IterationOptions::default()).unwrap();
        assert_eq!(tr.stop_reason, StopReason::CycleDetected);
        assert_eq!(tr.orbit, vec![0.25, 0.75, 0.25]);
    }

    #[test]
    fn max_iter_and_domain_escape() {
        let t = IntervalMap::parse("x/2").unwrap();
        let tr = picard_iterate(
            &unit(),
            &t,
            1.0,
            &IterationOptions {
                max_iter: 3,
                tol: 1e-10,
            },
        )
        .unwrap();
        assert_eq!(tr.stop_reason, StopReason::MaxIter);
        assert_eq!(tr.orbit.len(), 4);
        let esc = IntervalMap::parse("x+0.4").unwrap();
        match picard_iterate(&unit(), &esc, 0.5, &IterationOptions::default()) {
            Err(SolverError::Map {
                iterate: 1,
                source: MapError::DomainEscape { .. },
            }) => {}
            other => panic!("{:?}", other),
        }
        assert!(picard_iterate(
            &unit(),
            &t,
            1.0,
            &IterationOptions {
                max_iter: 0,
                tol: 1.0
            }
        )
        .is_err());
        assert!(picard_iterate(
            &unit(),
            &t,
            1.0,
            &IterationOptions {
                max_iter: 1,
                tol: 0.0
            }
        )
        .is_err());
    }

    #[test]
    fn a_priori_examples() {
        let b = a_priori_bound(&TriangleFunction::Additive, 0.5, 3, 1.0).unwrap();
        assert!((b - 0.25).abs() < 1e-15);
        assert_eq!(
            a_priori_bound(&TriangleFunction::Max, 0.5, 3, 1.0).unwrap(),
            0.125
        );
        assert!(matches!(
            a_priori_bound(&TriangleFunction::BScaled { k: 2.0 }, 0.6, 3, 1.0),
            Err(SolverError::BoundUnavailable { .. })
        ));
    }

    #[test]
    fn oracle_examples() {
        let s = three();
        assert_eq!(
            brute_force_fixed_points(&s, &FiniteMap::identity(3)).unwrap(),
            vec![0, 1, 2]
        );
        assert_eq!(
            brute_force_fixed_points(
                &s,
                &FiniteMap {
                    images: vec![1, 0, 0]
                }
            )
            .unwrap(),
            vec![]
        );
        assert_eq!(
            brute_force_fixed_points(&s, &FiniteMap::constant(3, 1)).unwrap(),
            vec![1]
        );
    }

    #[test]
    fn halving_bound_has_nonnegative_slack() {
        let t = IntervalMap::parse("x/2").unwrap();
        let tr = picard_iterate(
            &unit(),
            &t,
            1.0,
            &IterationOptions {
                max_iter: 60,
                tol: 1e-300,
            },
        )
        .unwrap();
        let r = verify_bound(&unit(), &tr, &TriangleFunction::Additive, 0.5, 0.0).unwrap();
        assert!(r.bound_holds && r.step_holds && r.certified);
        for row in &r.rows {
            // d(x_n, 0) = 2^-n against 2^-n · 2 · 1/2.
            assert_eq!(row.observed, libm::pow(0.5, row.n as f64));
            assert_eq!(row.bound, 2.0 * row.observed * 0.5);
        }
    }

    #[test]
    fn constant_map_bounds_vanish() {
        let s = three();
        let tr = picard_iterate(
            &s,
            &FiniteMap::constant(3, 1),
            0,
            &IterationOptions::default(),
        )
        .unwrap();
        let r = verify_bound(&s, &tr, &TriangleFunction::Additive, 0.0, 1).unwrap();
        assert!(r.bound_holds);
        for row in &r.rows[1..] {
            assert_eq!((row.bound, row.observed), (0.0, 0.0));
        }
    }

    #[test]
    fn b_metric_bound_is_flagged() {
        let t = IntervalMap::parse("x/2").unwrap();
        let tr = picard_iterate(&unit(), &t, 1.0, &IterationOptions::default()).unwrap();
        let r = verify_bound(
            &unit(),
            &tr,
            &TriangleFunction::BScaled { k: 1.5 },
            0.5,
            0.0,
        )
        .unwrap();
        assert!(!r.certified);
        assert!(r.note.unwrap().contains("not certified"));
    }
}
