//! Serialization helpers.

use serde::Serializer;

/// Extended reals: finite values as numbers, `±∞` as the strings `"inf"` / `"-inf"`.
pub fn extended<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        s.serialize_f64(*value)
    } else if value.is_nan() {
        s.serialize_str("nan")
    } else if *value > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}
