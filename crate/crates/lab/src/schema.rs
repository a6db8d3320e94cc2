//! Published JSON schemas of the command results, one per command plus one
//! for error results. The files live in `schemas/`.

pub const VALIDATE: &str = include_str!("../schemas/validate.schema.json");
pub const CLASSIFY: &str = include_str!("../schemas/classify.schema.json");
pub const ITERATE: &str = include_str!("../schemas/iterate.schema.json");
pub const BOUNDS: &str = include_str!("../schemas/bounds.schema.json");
pub const SEARCH: &str = include_str!("../schemas/search.schema.json");
pub const ERROR: &str = include_str!("../schemas/error.schema.json");

/// Schema a result with this command and status must satisfy.
pub fn for_result(command: &str, status: crate::Status) -> Option<&'static str> {
    if status == crate::Status::Error {
        return Some(ERROR);
    }
    match command {
        "validate" => Some(VALIDATE),
        "classify" => Some(CLASSIFY),
        "iterate" => Some(ITERATE),
        "bounds" => Some(BOUNDS),
        "search" => Some(SEARCH),
        _ => None,
    }
}
