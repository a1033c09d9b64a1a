//! Standard-IO companion to `cyccon-core`: file formats, machine-readable
//! run reports, and the command implementations behind the `cyccon` binary.
//!
//! Every command writes one deterministic JSON report to standard output and
//! a one-line summary to standard error; the decision is mirrored in the
//! process exit code so scripts can branch without parsing JSON.

pub mod commands;
pub mod error;
pub mod formats;
pub mod render;
pub mod report;

/// Success; for decision commands, "noncontextual" or "not certified".
pub const EXIT_OK: i32 = 0;
/// Unreadable, unparsable, or invalid input; also a failed verification.
pub const EXIT_INPUT_ERROR: i32 = 1;
/// Valid input for which the requested operation is not defined.
pub const EXIT_PRECONDITION: i32 = 2;
/// Contextual: criterion violated, coupling infeasible, or interval
/// certified above the bound.
pub const EXIT_CONTEXTUAL: i32 = 3;
/// The independent oracle and the closed-form criterion disagree; this
/// indicates a bug and the output cannot be trusted.
pub const EXIT_DISAGREEMENT: i32 = 4;
