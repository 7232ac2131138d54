//! The `.site` specification language: parsing, elaboration into library
//! values, and a command runner producing deterministic JSON reports.

pub mod ast;
pub mod diag;
pub mod elaborate;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod run;

pub use diag::{Diagnostic, Span};
pub use elaborate::{elaborate, Site};
pub use parser::{parse, parse_command, parse_formula};
pub use printer::print_spec;
pub use run::{render_human, run, run_all, summarize, to_json_string, CommandReport, Options};

/// Parses and elaborates a spec.
pub fn load(text: &str) -> Result<Site, Diagnostic> {
    elaborate(&parse(text)?)
}
