//! Seeded random finite instances: semimetric spaces, spaces conforming to a
//! triangle function, and self-maps biased toward contractions.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::contraction::{
    estimate_min_constants, theorem_applicable, verify, ContractionKind, FiniteMap, KindTag,
    MapError, MinConstantsOutcome, SelfMap,
};
use crate::space::{check_generalized_triangle, validate_semimetric, FiniteSpace, Space};
use crate::trifun::{PhiError, TriangleFunction};

/// Symmetric distances uniform in `(0, 1]` off the diagonal, rescaled so the
/// largest distance is 1. Redrawn until identity of indiscernibles holds.
pub fn random_semimetric<R: Rng>(rng: &mut R, n: usize) -> FiniteSpace {
    loop {
        let mut m = alloc::vec![alloc::vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = 1.0 - rng.random::<f64>();
                m[i][j] = d;
                m[j][i] = d;
            }
        }
        let top = m.iter().flatten().copied().fold(0.0, f64::max);
        if top > 0.0 {
            m.iter_mut().flatten().for_each(|d| *d /= top);
        }
        if let Ok(s) = FiniteSpace::from_fn(n, |i, j| m[i][j]) {
            if validate_semimetric(&s).is_valid() {
                return s;
            }
        }
    }
}

/// `d(i, j) <- min(d(i, j), Φ(d(i, k), d(k, j)))` until nothing changes.
/// For an associative `Φ` one pass over `k` suffices.
fn relax(m: &mut [Vec<f64>], phi: &TriangleFunction, passes: usize) -> bool {
    let n = m.len();
    for _ in 0..passes {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let via = phi.raw(m[i][k], m[k][j]);
                    if via < m[i][j] {
                        m[i][j] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return true;
        }
    }
    false
}

/// A random space satisfying `d(x, y) <= Φ(d(x, z), d(z, y))`.
///
/// Additive, max and power functions use the path closure under `Φ`. For
/// `K(u + v)` a random metric is raised to the power `1 + log2 K`, which turns
/// the triangle inequality into `d(x, y) <= K (d(x, z) + d(z, y))`. Custom
/// functions are relaxed repeatedly and checked; `None` if that fails.
pub fn conforming_space<R: Rng>(
    rng: &mut R,
    n: usize,
    phi: &TriangleFunction,
) -> Option<FiniteSpace> {
    let base = random_semimetric(rng, n);
    let mut m = base.rows();
    match phi {
        TriangleFunction::Additive | TriangleFunction::Max | TriangleFunction::Power { .. } => {
            relax(&mut m, phi, 1);
        }
        TriangleFunction::BScaled { k } => {
            relax(&mut m, &TriangleFunction::Additive, 1);
            let s = 1.0 + libm::log2(*k);
            m.iter_mut().flatten().for_each(|d| *d = libm::pow(*d, s));
        }
        TriangleFunction::Custom(_) => {
            if !relax(&mut m, phi, 64) {
                return None;
            }
        }
    }
    let space = FiniteSpace::new(base.labels().to_vec(), m).ok()?;
    let ok = validate_semimetric(&space).is_valid()
        && check_generalized_triangle(&space, phi).ok()?.holds();
    ok.then_some(space)
}

/// A random ultrametric space.
pub fn random_ultrametric<R: Rng>(rng: &mut R, n: usize) -> FiniteSpace {
    loop {
        if let Some(s) = conforming_space(rng, n, &TriangleFunction::Max) {
            return s;
        }
    }
}

/// A self-map biased toward contractions: constant maps, maps collapsing
/// onto a fixed sink, and unrestricted maps.
pub fn random_map<R: Rng>(rng: &mut R, n: usize) -> FiniteMap {
    let sink = rng.random_range(0..n);
    let images = match rng.random_range(0..4u8) {
        0 => alloc::vec![sink; n],
        1 | 2 => {
            let p = if rng.random_bool(0.5) { 0.9 } else { 0.6 };
            (0..n)
                .map(|i| {
                    if i == sink || rng.random_bool(p) {
                        sink
                    } else {
                        rng.random_range(0..n)
                    }
                })
                .collect()
        }
        _ => (0..n).map(|_| rng.random_range(0..n)).collect(),
    };
    FiniteMap { images }
}

/// An ultrametric chain `p_0 <- p_1 <- … <- p_{n-1}` with
/// `d(p_i, p_j) = max(s_i, s_j)`, `s_0 = 0` and `s_{i-1} <= β s_i`; the map
/// `p_i -> p_{i-1}` (with `p_0` fixed) is a Bianchini contraction with
/// constant `β`. Point order is shuffled.
pub fn bianchini_chain<R: Rng>(rng: &mut R, n: usize, beta: f64) -> (FiniteSpace, FiniteMap) {
    let mut s = alloc::vec![0.0; n];
    if n > 1 {
        s[n - 1] = 1.0;
        for i in (1..n - 1).rev() {
            let ratio = 0.05 + (beta - 0.05).max(0.0) * rng.random::<f64>();
            s[i] = s[i + 1] * ratio.min(beta);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    // order[k] is the chain position of point k.
    let mut at = alloc::vec![0; n];
    for (k, &pos) in order.iter().enumerate() {
        at[pos] = k;
    }
    let space = FiniteSpace::from_fn(n, |a, b| {
        if a == b {
            0.0
        } else {
            s[order[a]].max(s[order[b]])
        }
    })
    .expect("chain distances are finite");
    let images = (0..n).map(|k| at[order[k].saturating_sub(1)]).collect();
    (space, FiniteMap { images })
}

/// Relative inflation applied to estimated constants so that rounding in the
/// right-hand side cannot turn the tight pair into a violation.
pub const FIT_INFLATION: f64 = 1e-9;

fn step_rate(tag: KindTag, alpha: f64, s: f64) -> f64 {
    match tag {
        KindTag::Partial => alpha + s,
        KindTag::PartialDual => alpha / (1.0 - s),
        KindTag::Weak => (alpha + s) / (1.0 - s),
        KindTag::WeakDual => alpha,
        KindTag::Bianchini | KindTag::ChatterjeaBianchini => s,
    }
}

/// The tightest constants of class `tag` the map satisfies: `β*` for the
/// single-constant classes, and the frontier point with the smallest per-step
/// rate for the others (ties go to the smaller second constant). `None` when
/// the map is in no member of the class.
pub fn fit_kind<S: Space, M: SelfMap<S>>(
    space: &S,
    map: &M,
    tag: KindTag,
) -> Result<Option<ContractionKind>, MapError> {
    let up = |c: f64| c * (1.0 + FIT_INFLATION);
    Ok(match estimate_min_constants(space, map, tag)?.outcome {
        MinConstantsOutcome::Single { beta, .. } => match beta {
            Some(b) => Some(ContractionKind::single(tag, up(b))?),
            None => None,
        },
        MinConstantsOutcome::Frontier { points } => {
            let best = points
                .iter()
                .filter_map(|p| p.alpha.map(|a| (up(a), p.second)))
                .min_by(|a, b| step_rate(tag, a.0, a.1).total_cmp(&step_rate(tag, b.0, b.1)));
            match best {
                Some((alpha, s)) => Some(ContractionKind::pair(tag, alpha, s)?),
                None => None,
            }
        }
    })
}

/// A finite instance together with the contraction class it was verified in.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub phi: TriangleFunction,
    pub space: FiniteSpace,
    pub map: FiniteMap,
    pub kind: ContractionKind,
}

/// Draws instances until one passes verification in class `tag` with fitted
/// constants and the class's theorem applies. `phis` are cycled through;
/// spaces have 3–8 points. Gives up after `attempts` draws.
pub fn applicable_instance<R: Rng>(
    rng: &mut R,
    tag: KindTag,
    phis: &[TriangleFunction],
    attempts: usize,
) -> Result<Option<Instance>, PhiError> {
    for i in 0..attempts {
        let phi = &phis[i % phis.len()];
        let n = rng.random_range(3..=8);
        let Some(space) = conforming_space(rng, n, phi) else {
            continue;
        };
        let map = random_map(rng, n);
        let Ok(Some(kind)) = fit_kind(&space, &map, tag) else {
            continue;
        };
        if !matches!(verify(&space, &map, &kind), Ok(v) if v.passed()) {
            continue;
        }
        if theorem_applicable(&kind, phi)?.applicable {
            return Ok(Some(Instance {
                phi: phi.clone(),
                space,
                map,
                kind,
            }));
        }
    }
    Ok(None)
}
