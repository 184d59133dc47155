use std::fmt;

use serde::{Deserialize, Serialize};

use crate::specs::{
    apply_def, seq_name, DefDirection, DefId, InputBinding, Wff, WffPath, INPUT_LETTERS,
    OUTPUT_LETTERS,
};

use super::{
    axiom_lookup, rule_and, rule_do, rule_if, rule_not, rule_quit, rule_sub, rule_union,
    CalcError, Judgment,
};

/// One postfix entry of a derivation. Axiom and theorem references push a
/// judgment; `Sub`, `Not`, `Quit` and `Def` act on the top of the stack;
/// the binary rules consume the top two (the deeper judgment is the
/// rule's M operand).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DerivationEntry {
    Axiom(u8),
    Theorem(String),
    Sub(InputBinding),
    Not,
    And,
    Do { target: u32 },
    If,
    Union,
    Quit,
    Def {
        def: DefId,
        path: WffPath,
        dir: DefDirection,
    },
}

impl fmt::Display for DerivationEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivationEntry::Axiom(id) => write!(f, "AX{}", id),
            DerivationEntry::Theorem(name) => write!(f, "THM:{}", name),
            DerivationEntry::Sub(binding) => {
                write!(f, "SUB:")?;
                for (i, (rank, term)) in binding.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}={}", seq_name(INPUT_LETTERS, *rank), term)?;
                }
                Ok(())
            }
            DerivationEntry::Not => write!(f, "NOT"),
            DerivationEntry::And => write!(f, "AND"),
            DerivationEntry::Do { target } => {
                write!(
                    f,
                    "DO:{}={}",
                    seq_name(INPUT_LETTERS, *target),
                    seq_name(OUTPUT_LETTERS, 1)
                )
            }
            DerivationEntry::If => write!(f, "IF"),
            DerivationEntry::Union => write!(f, "UNION"),
            DerivationEntry::Quit => write!(f, "QUIT"),
            DerivationEntry::Def { def, path, .. } => {
                write!(f, "DEF-{}", def.name())?;
                if !path.is_empty() {
                    write!(
                        f,
                        " @{}",
                        path.iter()
                            .map(|i| i.to_string())
                            .collect::<Vec<_>>()
                            .join(".")
                    )?;
                }
                Ok(())
            }
        }
    }
}

/// A derivation: the goal spec and the postfix entry list that proves a
/// program meets it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derivation {
    pub goal: Wff,
    pub entries: Vec<DerivationEntry>,
}

/// Resolves theorem references during replay.
pub trait TheoremLookup {
    fn theorem(&self, name: &str) -> Option<Judgment>;
}

/// An empty store, for derivations that reference no theorems.
pub struct NoTheorems;

impl TheoremLookup for NoTheorems {
    fn theorem(&self, _name: &str) -> Option<Judgment> {
        None
    }
}

fn apply_entry(
    entry: &DerivationEntry,
    stack: &mut Vec<Judgment>,
    lookup: &dyn TheoremLookup,
    index: usize,
) -> Result<(), CalcError> {
    let pop = |stack: &mut Vec<Judgment>| {
        stack.pop().ok_or(CalcError::StackUnderflow { index })
    };
    match entry {
        DerivationEntry::Axiom(id) => {
            stack.push(axiom_lookup(*id)?);
        }
        DerivationEntry::Theorem(name) => {
            let j = lookup
                .theorem(name)
                .ok_or_else(|| CalcError::UnknownTheorem { name: name.clone() })?;
            stack.push(j);
        }
        DerivationEntry::Sub(binding) => {
            let j = pop(stack)?;
            stack.push(rule_sub(&j, binding)?);
        }
        DerivationEntry::Not => {
            let j = pop(stack)?;
            stack.push(rule_not(&j)?);
        }
        DerivationEntry::And => {
            let n = pop(stack)?;
            let m = pop(stack)?;
            stack.push(rule_and(&m, &n)?);
        }
        DerivationEntry::Do { target } => {
            let n = pop(stack)?;
            let m = pop(stack)?;
            stack.push(rule_do(&m, &n, *target)?);
        }
        DerivationEntry::If => {
            let n = pop(stack)?;
            let m = pop(stack)?;
            stack.push(rule_if(&m, &n)?);
        }
        DerivationEntry::Union => {
            let n = pop(stack)?;
            let m = pop(stack)?;
            stack.push(rule_union(&m, &n)?);
        }
        DerivationEntry::Quit => {
            let j = pop(stack)?;
            stack.push(rule_quit(&j)?);
        }
        DerivationEntry::Def { def, path, dir } => {
            let j = pop(stack)?;
            let spec = apply_def(*def, &j.spec, path, *dir)?;
            stack.push(Judgment {
                program: j.program,
                spec,
            });
        }
    }
    Ok(())
}

/// Evaluates a derivation on an execution stack, left to right, and
/// returns the single remaining judgment.
pub fn eval_derivation(
    d: &Derivation,
    lookup: &dyn TheoremLookup,
) -> Result<Judgment, CalcError> {
    let mut stack: Vec<Judgment> = Vec::new();
    for (index, entry) in d.entries.iter().enumerate() {
        apply_entry(entry, &mut stack, lookup, index)?;
    }
    if stack.len() != 1 {
        return Err(CalcError::StackNotSingleton { len: stack.len() });
    }
    Ok(stack.pop().unwrap())
}

/// Result of a forward replay check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayReport {
    pub ok: bool,
    pub reason: Option<String>,
    pub judgment: Option<Judgment>,
}

/// Forward soundness certificate for a backward-found proof: evaluates
/// the derivation and demands the resulting spec equal the goal (up to
/// the choice of bound-variable ranks).
pub fn replay_check(d: &Derivation, lookup: &dyn TheoremLookup) -> ReplayReport {
    match eval_derivation(d, lookup) {
        Err(e) => ReplayReport {
            ok: false,
            reason: Some(e.to_string()),
            judgment: None,
        },
        Ok(j) => {
            if j.spec.alpha_eq(&d.goal) {
                ReplayReport {
                    ok: true,
                    reason: None,
                    judgment: Some(j),
                }
            } else {
                ReplayReport {
                    ok: false,
                    reason: Some(format!(
                        "derivation proves {} but the goal is {}",
                        j.spec, d.goal
                    )),
                    judgment: Some(j),
                }
            }
        }
    }
}

/// One line of the forward construction trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceLine {
    pub index: usize,
    pub entry: String,
    pub program: String,
    pub spec: String,
}

/// Replays the derivation, recording the judgment after every entry in
/// the numbered style of the worked listings.
pub fn replay_trace(
    d: &Derivation,
    lookup: &dyn TheoremLookup,
) -> Result<Vec<TraceLine>, CalcError> {
    let mut stack: Vec<Judgment> = Vec::new();
    let mut lines = Vec::new();
    for (index, entry) in d.entries.iter().enumerate() {
        apply_entry(entry, &mut stack, lookup, index)?;
        let top = stack.last().expect("entry pushed a judgment");
        lines.push(TraceLine {
            index: index + 1,
            entry: entry.to_string(),
            program: top.program.to_string(),
            spec: top.spec.to_string(),
        });
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::same_text;
    use crate::specs::{parse_spec, Term};

    fn binding(pairs: &[(u32, Term)]) -> InputBinding {
        pairs.iter().cloned().collect()
    }

    fn between_derivation() -> Derivation {
        Derivation {
            goal: parse_spec("BETW(I,J,K)").unwrap(),
            entries: vec![
                DerivationEntry::Axiom(3),
                DerivationEntry::Axiom(3),
                DerivationEntry::Sub(binding(&[(1, Term::Input(2)), (2, Term::Input(3))])),
                DerivationEntry::And,
                DerivationEntry::Def {
                    def: DefId::Betw,
                    path: vec![],
                    dir: DefDirection::Backward,
                },
            ],
        }
    }

    #[test]
    fn replays_the_between_construction() {
        let j = eval_derivation(&between_derivation(), &NoTheorems).unwrap();
        assert!(same_text(&j.program.to_string(), "echo ($i<$j)&&($j<$k) ;"));
        assert_eq!(j.spec.to_string(), "BETW(I,J,K)");
        assert!(replay_check(&between_derivation(), &NoTheorems).ok);
    }

    #[test]
    fn replays_the_between_lister() {
        let d = Derivation {
            goal: parse_spec("LT(x,J)^LT(I,x)").unwrap(),
            entries: vec![
                DerivationEntry::Axiom(6),
                DerivationEntry::Sub(binding(&[(1, Term::Input(2))])),
                DerivationEntry::Axiom(3),
                DerivationEntry::Sub(binding(&[(2, Term::Input(3))])),
                DerivationEntry::Do { target: 3 },
            ],
        };
        let j = eval_derivation(&d, &NoTheorems).unwrap();
        assert!(same_text(
            &j.program.to_string(),
            "for ($a=1;$a<$j;++$a) { if ($i<$a) echo $a; } ;"
        ));
        assert!(replay_check(&d, &NoTheorems).ok);
    }

    #[test]
    fn single_axiom_derivation() {
        let d = Derivation {
            goal: parse_spec("EQ(I,x)").unwrap(),
            entries: vec![DerivationEntry::Axiom(1)],
        };
        let j = eval_derivation(&d, &NoTheorems).unwrap();
        assert!(same_text(&j.program.to_string(), "echo $i ;"));
    }

    #[test]
    fn wrong_goal_fails_replay() {
        let mut d = between_derivation();
        d.goal = parse_spec("BETW(I,K,J)").unwrap();
        let report = replay_check(&d, &NoTheorems);
        assert!(!report.ok);
        assert!(report.reason.is_some());
    }

    #[test]
    fn truncated_derivation_fails_replay() {
        let mut d = between_derivation();
        d.entries.truncate(2); // two judgments left on the stack
        assert!(!replay_check(&d, &NoTheorems).ok);
    }

    #[test]
    fn underflow_is_reported() {
        let d = Derivation {
            goal: parse_spec("LT(I,J)").unwrap(),
            entries: vec![DerivationEntry::Not],
        };
        assert!(matches!(
            eval_derivation(&d, &NoTheorems),
            Err(CalcError::StackUnderflow { .. })
        ));
    }

    #[test]
    fn trace_numbers_every_entry() {
        let lines = replay_trace(&between_derivation(), &NoTheorems).unwrap();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0].index, 1);
        assert!(lines[4].spec.contains("BETW"));
    }
}
