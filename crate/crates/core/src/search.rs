//! Randomized search for instances that satisfy a contraction inequality while
//! the matching fixed-point theorem does not apply.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::contraction::{
    theorem_applicable, verify, Applicability, ContractionKind, FiniteMap, MapError, Verification,
};
use crate::instances::{conforming_space, random_map};
use crate::solver::{
    brute_force_fixed_points, picard_iterate, verify_bound, IterationOptions, SolverError,
};
use crate::space::FiniteSpace;
use crate::trifun::{PhiError, TriangleFunction};

#[cfg(feature = "serde")]
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("budget must be >= 1")]
    ZeroBudget,
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct SearchConfig {
    pub phi: TriangleFunction,
    pub kind: ContractionKind,
    /// Number of random instances to generate.
    pub budget: usize,
    pub seed: u64,
}

/// Smallest and largest number of points of a generated space.
pub const MIN_POINTS: usize = 3;
pub const MAX_POINTS: usize = 8;
/// Attempts at drawing a space that conforms to a custom `Φ`.
const CONFORM_ATTEMPTS: usize = 16;

/// An instance satisfying the contraction inequality outside the theorem's hypotheses.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Finding {
    /// Position in the generation order.
    pub index: usize,
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    pub images: Vec<usize>,
    pub margin: f64,
    /// Names of the hypotheses that fail.
    pub failed_hypotheses: Vec<String>,
    pub fixed_points: Vec<usize>,
    /// Picard iteration converged from every start point.
    pub converged: bool,
    /// The a-priori bound held on every converged orbit; `None` when no
    /// bound is available (no rate below 1, or `C(α)` infinite).
    pub bound_held: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct SearchReport {
    pub config: SearchConfig,
    pub applicability: Applicability,
    pub instances_generated: usize,
    pub instances_in_class: usize,
    /// Ordered by instance index.
    pub findings: Vec<Finding>,
}

/// Generates `budget` seeded instances (3–8 points, spaces conforming to
/// `Φ`, maps biased toward contractions) and keeps the ones whose map
/// satisfies the configured contraction inequality while some hypothesis of
/// the theorem fails.
///
/// The hypotheses depend only on `Φ` and the constants, so either every
/// in-class instance is a finding or none is.
pub fn counterexample_search(cfg: &SearchConfig) -> Result<SearchReport, SearchError> {
    if cfg.budget == 0 {
        return Err(SearchError::ZeroBudget);
    }
    let app = theorem_applicable(&cfg.kind, &cfg.phi)?;
    let failed: Vec<String> = app
        .checklist
        .iter()
        .filter(|h| !h.verdict.holds())
        .map(|h| h.name.clone())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut in_class = 0;
    let mut findings = Vec::new();
    for index in 0..cfg.budget {
        let n = rng.random_range(MIN_POINTS..=MAX_POINTS);
        let Some(space) =
            (0..CONFORM_ATTEMPTS).find_map(|_| conforming_space(&mut rng, n, &cfg.phi))
        else {
            continue;
        };
        let map = random_map(&mut rng, n);
        let Verification::Certified(cert) = verify(&space, &map, &cfg.kind)? else {
            continue;
        };
        in_class += 1;
        if app.applicable {
            continue;
        }
        let (converged, bound_held) = probe(&space, &map, &cfg.phi, &app)?;
        findings.push(Finding {
            index,
            labels: space.labels().to_vec(),
            dist: space.rows(),
            images: map.images.clone(),
            margin: cert.margin,
            failed_hypotheses: failed.clone(),
            fixed_points: brute_force_fixed_points(&space, &map)?,
            converged,
            bound_held,
        });
    }
    Ok(SearchReport {
        config: cfg.clone(),
        applicability: app,
        instances_generated: cfg.budget,
        instances_in_class: in_class,
        findings,
    })
}

fn probe(
    space: &FiniteSpace,
    map: &FiniteMap,
    phi: &TriangleFunction,
    app: &Applicability,
) -> Result<(bool, Option<bool>), SearchError> {
    let opts = IterationOptions::default();
    let mut converged = true;
    let mut bound_held = Some(true);
    for x0 in 0..space.len() {
        let trace = picard_iterate(space, map, x0, &opts)?;
        if !trace.converged() {
            converged = false;
            continue;
        }
        let Some(rate) = app.rate.factor() else {
            bound_held = None;
            continue;
        };
        if trace.orbit.len() < 2 {
            continue;
        }
        match verify_bound(space, &trace, phi, rate, trace.last()) {
            Ok(r) => {
                if let Some(b) = bound_held.as_mut() {
                    *b &= r.bound_holds;
                }
            }
            Err(SolverError::BoundUnavailable { .. }) => bound_held = None,
            Err(e) => return Err(e.into()),
        }
    }
    Ok((converged, bound_held))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::KindTag;

    fn cfg(phi: TriangleFunction, kind: ContractionKind, budget: usize) -> SearchConfig {
        SearchConfig {
            phi,
            kind,
            budget,
            seed: 7,
        }
    }

    #[test]
    fn zero_budget_is_rejected() {
        let c = cfg(
            TriangleFunction::Additive,
            ContractionKind::Bianchini { beta: 0.5 },
            0,
        );
        assert_eq!(counterexample_search(&c), Err(SearchError::ZeroBudget));
    }

    #[test]
    fn b_metric_partial_contractions_beyond_the_threshold() {
        let kind = ContractionKind::pair(KindTag::Partial, 0.3, 0.3).unwrap();
        let r =
            counterexample_search(&cfg(TriangleFunction::BScaled { k: 2.0 }, kind, 1000)).unwrap();
        assert!(!r.applicability.applicable);
        assert!(!r.findings.is_empty());
        assert_eq!(r.findings.len(), r.instances_in_class);
        for f in &r.findings {
            assert!(f.failed_hypotheses.iter().any(|h| h == "chain_bound"));
            assert_eq!(f.bound_held, None);
        }
        assert!(r.findings.windows(2).all(|w| w[0].index < w[1].index));
    }

    #[test]
    fn ultrametric_chatterjea_bianchini_has_no_findings() {
        for beta in [0.1, 0.5, 0.9, 0.99] {
            let kind = ContractionKind::ChatterjeaBianchini { beta };
            let r = counterexample_search(&cfg(TriangleFunction::Max, kind, 200)).unwrap();
            assert!(r.applicability.applicable);
            assert!(r.findings.is_empty());
            assert!(r.instances_in_class > 0);
        }
    }

    #[test]
    fn search_is_reproducible() {
        let kind = ContractionKind::ChatterjeaBianchini { beta: 0.6 };
        let c = cfg(TriangleFunction::Power { q: 1.0 }, kind, 300);
        let a = counterexample_search(&c).unwrap();
        assert_eq!(a, counterexample_search(&c).unwrap());
        assert!(!a.applicability.applicable);
    }
}
