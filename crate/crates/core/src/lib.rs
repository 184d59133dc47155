//! Deductive program synthesis for number theory, targeting a small
//! imperative subset of PHP.
//!
//! A specification is a predicate-calculus wff over eight fixed relations
//! (`EQ`, `LT`, `BETW`, `MUL`, `FAC`, `REM`, `PFAC`, `PRIME`) whose free
//! variables are tagged as inputs (`I`, `J`, `K`, ...) or outputs (`x`,
//! `y`, `z`, ...). A spec with no outputs asks for a program that decides
//! membership; a spec with an output asks for a program that lists the
//! satisfying values.
//!
//! Synthesis works backwards from the goal wff: the searcher repeatedly
//! replaces the first remaining specification entry with an equivalent
//! spec (a DEF rewrite), an axiom reference (plus substitution), an
//! inverse rule application with subgoals, or a previously proven
//! theorem. The resulting postfix entry list is a [`calculus::Derivation`]
//! that replays forward on an execution stack, producing a
//! [`calculus::Judgment`]: a program paired with the spec it meets.
//!
//! Every synthesized program can be checked against a brute-force oracle
//! with the [`runtime`] module, which interprets the target language
//! directly and evaluates spec semantics by enumeration.

pub mod calculus;
pub mod cli;
pub mod programs;
pub mod runtime;
pub mod search;
pub mod specs;

pub use calculus::{Derivation, DerivationEntry, Judgment};
pub use programs::{Cmd, Expr, Program};
pub use search::{SearchConfig, TheoremStore};
pub use specs::{Atom, Relation, SpecKind, Term, Wff};
