//! Fixed-point machinery for semimetric spaces equipped with a triangle function.
//!
//! A semimetric `d` only has to satisfy identity of indiscernibles and symmetry.
//! Instead of the ordinary triangle inequality it is controlled by a *triangle
//! function* `Φ`: `d(x, y) <= Φ(d(x, z), d(z, y))`. Metrics (`Φ = u + v`),
//! ultrametrics (`Φ = max`), b-metrics (`Φ = K(u + v)`) and power distance
//! spaces (`Φ = (u^q + v^q)^(1/q)`) are all special cases.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! * [`expr`] parses and evaluates the small arithmetic language used for
//!   custom triangle functions, interval distances and interval maps.
//! * [`trifun`] evaluates triangle functions and checks the conditions the
//!   fixed-point theorems impose on them (homogeneity, chain bound `C(α)`,
//!   continuity, the generalized inverse `Ψ⁻¹`).
//! * [`space`] holds finite and interval semimetric spaces, axiom validation,
//!   the generalized triangle inequality and the sequential continuity harness.
//! * [`contraction`] defines the six contraction classes, verifies maps against
//!   them and decides which fixed-point theorem applies.
//! * [`solver`] runs Picard iteration and certifies a-priori error bounds
//!   against a brute-force fixed-point oracle.
//! * [`instances`] and [`search`] generate seeded random finite instances and
//!   look for instances sitting outside a theorem's hypotheses.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod contraction;
pub mod expr;
pub mod instances;
pub mod search;
pub mod sequence;
pub mod solver;
pub mod space;
pub mod tolerance;
pub mod trifun;

#[cfg(feature = "serde")]
mod serde_ext;

pub use contraction::{
    Applicability, ContractionCertificate, ContractionKind, FiniteMap, IntervalMap, KindTag,
    MapError, MinConstants, SelfMap, StepFactor, Theorem, Verification,
};
pub use expr::{Expr, ExprError, Var};
pub use search::{counterexample_search, SearchConfig, SearchError, SearchReport};
pub use solver::{BoundReport, IterationOptions, IterationTrace, SolverError, StopReason};
pub use space::{FiniteSpace, IntervalSpace, Scope, Space, SpaceError};
pub use trifun::{PhiError, TriangleFunction, Verdict};
