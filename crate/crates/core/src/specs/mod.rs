//! Specification wffs: terms, relations, parsing, rendering,
//! classification, DEF rewrites and axiom/theorem matching.

mod defs;
mod matching;
mod parse;
mod term;
mod wff;

pub use defs::{all_paths, apply_def, def_applications, def_table, DefDirection, DefId, DefRule, WffPath};
pub use matching::{apply_binding, match_axiom, match_spec, InputBinding};
pub use parse::parse_spec;
pub use term::{seq_name, seq_rank, term_from_name, Term, BOUND_LETTERS, INPUT_LETTERS, OUTPUT_LETTERS};
pub use wff::{Atom, Relation, SpecKind, Wff};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{relation} takes {expected} arguments, got {got}")]
    Arity {
        relation: String,
        expected: usize,
        got: usize,
    },
    #[error("unbound quantified variable {name}")]
    UnboundVar { name: String },
    #[error("quantifier shadows variable {name} already in scope")]
    ShadowedVar { name: String },
    #[error("cannot classify {spec}: {reason}")]
    Unclassifiable { spec: String, reason: String },
    #[error("DEF {def} does not match at the given position")]
    DefNoMatch { def: String },
    #[error("path {path:?} is out of bounds")]
    PathOutOfBounds { path: Vec<usize> },
}

/// Renders a wff in spec notation. `parse_spec` inverts this.
pub fn render_spec(w: &Wff) -> String {
    w.to_string()
}
