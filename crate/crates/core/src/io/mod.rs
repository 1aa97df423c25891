//! Problem files, the expression grammar, canonical rendering, reports and
//! the command implementations shared by the CLI and the C API.

pub mod commands;
mod parse;
mod problem;
mod render;
pub mod report;

pub use parse::{parse_poly, parse_scalar, ParseError};
pub use problem::{load_problem, parse_problem, ProblemError, ProblemSpec, StratumJob};
pub use render::{render_poly, render_scalar};
pub use report::Report;
