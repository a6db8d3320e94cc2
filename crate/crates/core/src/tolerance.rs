//! Numerical tolerances shared by every check in the crate.
//!
//! The theory is stated over exact reals; these constants are the only place
//! where double-precision slack is decided.

/// Relative tolerance for equality checks (symmetry, homogeneity, closed forms).
pub const REL_TOL: f64 = 1e-9;

/// Absolute tolerance used near zero.
pub const ABS_TOL: f64 = 1e-12;

/// Relative slack before an inequality `lhs <= rhs` counts as violated.
pub const VIOLATION_REL: f64 = 1e-12;

/// Absolute slack before an inequality `lhs <= rhs` counts as violated.
pub const VIOLATION_ABS: f64 = 1e-12;

/// Limit checks pass when the tail deviation stays below this value.
pub const LIMIT_TOL: f64 = 1e-6;

/// Smallest admissible slack of an a-priori bound.
pub const BOUND_TOL: f64 = 1e-9;

/// `a == b` up to [`REL_TOL`] relative and [`ABS_TOL`] absolute error.
pub fn approx_eq(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()) + ABS_TOL
}

/// `lhs <= rhs` fails beyond rounding noise.
pub fn exceeds(lhs: f64, rhs: f64) -> bool {
    lhs > rhs * (1.0 + VIOLATION_REL) + VIOLATION_ABS
}
