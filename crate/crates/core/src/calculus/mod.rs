//! The proof calculus: seven axioms pairing a primitive program with the
//! spec it meets, seven rules of inference that combine judgments, and
//! postfix derivations that replay on an execution stack.

mod derivation;
mod rules;

pub use derivation::{
    eval_derivation, replay_check, replay_trace, Derivation, DerivationEntry, NoTheorems,
    ReplayReport, TheoremLookup, TraceLine,
};
pub use rules::{rule_and, rule_do, rule_if, rule_not, rule_quit, rule_sub, rule_union};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::programs::{parse_program, Program, ProgramError};
use crate::specs::{parse_spec, SpecError, Wff};

/// The assertion `PROG # SPEC`: program `program` meets specification
/// `spec`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub program: Program,
    pub spec: Wff,
}

impl Judgment {
    pub fn new(program: Program, spec: Wff) -> Judgment {
        Judgment { program, spec }
    }
}

/// One of the seven axioms: an immutable (program, spec) pair.
#[derive(Debug, Clone)]
pub struct Axiom {
    pub id: u8,
    pub judgment: Judgment,
}

const AXIOM_SOURCES: [(&str, &str); 7] = [
    ("echo $i ;", "EQ(I,x)"),
    ("echo $i==$j ;", "EQ(I,J)"),
    ("echo $i < $j ;", "LT(I,J)"),
    ("echo $i*$j ;", "MUL(I,J,x)"),
    ("echo $i%$j ;", "REM(I,J,x)"),
    ("for ($a=1 ; $a<$i ; ++$a) echo $a ;", "LT(x,I)"),
    ("for ($a=1 ; !($i<$a) ; ++$a) echo $a ;", "~LT(I,x)"),
];

/// Returns the fixed (program, spec) pair for an axiom id in `1..=7`.
pub fn axiom_lookup(id: u8) -> Result<Judgment, CalcError> {
    let Some((program, spec)) = AXIOM_SOURCES.get((id as usize).wrapping_sub(1)) else {
        return Err(CalcError::UnknownAxiom { id });
    };
    Ok(Judgment {
        program: parse_program(program).expect("axiom programs parse"),
        spec: parse_spec(spec).expect("axiom specs parse"),
    })
}

pub fn axioms() -> Vec<Axiom> {
    (1..=7)
        .map(|id| Axiom {
            id,
            judgment: axiom_lookup(id).unwrap(),
        })
        .collect()
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CalcError {
    #[error("unknown axiom {id}")]
    UnknownAxiom { id: u8 },
    #[error("unknown theorem '{name}'")]
    UnknownTheorem { name: String },
    #[error("rule {rule} requires a decide spec, got {spec}")]
    NotDecide { rule: &'static str, spec: String },
    #[error("rule {rule} requires a list spec, got {spec}")]
    NotLister { rule: &'static str, spec: String },
    #[error("rule {rule} requires a single output variable in {spec}")]
    MultipleOutputs { rule: &'static str, spec: String },
    #[error("SUB binds {name}, which is not an input of the spec")]
    BindingTargetMissing { name: String },
    #[error("DO target {name} is not an input of the decider's spec")]
    TargetNotInput { name: String },
    #[error("derivation stack underflow at entry {index}")]
    StackUnderflow { index: usize },
    #[error("derivation left {len} judgments on the stack (expected 1)")]
    StackNotSingleton { len: usize },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Program(#[from] ProgramError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::same_text;

    #[test]
    fn axiom_lookup_returns_the_fixed_pairs() {
        let j = axiom_lookup(3).unwrap();
        assert!(same_text(&j.program.to_string(), "echo $i < $j ;"));
        assert_eq!(j.spec.to_string(), "LT(I,J)");

        let j = axiom_lookup(7).unwrap();
        assert!(same_text(
            &j.program.to_string(),
            "for ($a=1 ; !($i<$a) ; ++$a) echo $a ;"
        ));
        assert_eq!(j.spec.to_string(), "~LT(I,x)");

        let j = axiom_lookup(1).unwrap();
        assert!(same_text(&j.program.to_string(), "echo $i ;"));
        assert_eq!(j.spec.to_string(), "EQ(I,x)");
    }

    #[test]
    fn out_of_range_ids_error() {
        assert!(axiom_lookup(0).is_err());
        assert!(axiom_lookup(8).is_err());
    }

    #[test]
    fn axioms_agree_with_their_spec_oracles() {
        use crate::runtime::{check_judgment, full_ranges, CompareMode};
        for axiom in axioms() {
            let mode = CompareMode::Multiset;
            let report = check_judgment(
                &axiom.judgment,
                &full_ranges(&axiom.judgment, 25),
                mode,
                64,
                1_000_000,
            );
            assert!(
                report.ok(),
                "axiom {} disagrees: {:?}",
                axiom.id,
                report.first_failure()
            );
        }
    }
}
