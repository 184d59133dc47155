//! The target-language side: program ASTs, canonical printing, the
//! transformations the rules of inference are built from (input
//! substitution, rank shifting, echo splicing), a parser for the
//! language subset, and the CR1 simplifier.

mod ast;
mod parse;
mod render;
mod simplify;
mod transform;

pub use ast::{Cmd, Expr, HoleMark, PhpVar, Program};
pub use parse::parse_program;
pub use render::{render, same_text, text_key};
pub use simplify::simplify_cr1;
pub use transform::{
    map_echoes, shift_ranks, shift_ranks_banded, splice, subst_inputs, ExprBinding, RankOffset,
    Template,
};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("program has no echo command to splice into")]
    NoEcho,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
