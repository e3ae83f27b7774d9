use serde_json::json;
use warpgeo::Error;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_NUMERICAL
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::KindMismatch { .. } => "kind_mismatch",
        Error::CutLocus => "cut_locus",
        Error::Unsupported(_) => "unsupported",
        Error::BoundaryEscape { .. } => "boundary_escape",
        Error::BoundaryProximity { .. } => "boundary_proximity",
        Error::NonConvergence { .. } => "non_convergence",
        Error::Divergence { .. } => "divergence",
        Error::NonFinite(_) => "non_finite",
    }
}

/// One-line JSON record on stderr.
pub fn error(e: &Error) {
    eprintln!("{}", json!({"error": kind(e), "message": e.to_string(), "exit_code": exit_code(e)}));
}

pub fn argument_error(message: &str) {
    eprintln!("{}", json!({"error": "argument", "message": message, "exit_code": EXIT_INPUT}));
}

pub fn warning(message: &str) {
    eprintln!("{}", json!({"warning": message}));
}
