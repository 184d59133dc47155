use crate::programs::{
    map_echoes, shift_ranks_banded, subst_inputs, Cmd, Expr, ExprBinding, HoleMark, PhpVar,
    Program, Template,
};
use crate::specs::{
    apply_binding, seq_name, InputBinding, SpecKind, Term, Wff, INPUT_LETTERS,
};

use super::{CalcError, Judgment};

fn binding_to_exprs(binding: &InputBinding) -> ExprBinding {
    binding
        .iter()
        .map(|(rank, term)| {
            let e = match term {
                Term::Input(r) => Expr::Var(PhpVar::Input(*r)),
                Term::Lit(v) => Expr::Int(*v),
                Term::Output(_) | Term::Bound(_) => {
                    unreachable!("SUB bindings carry inputs and literals only")
                }
            };
            (*rank, e)
        })
        .collect()
}

fn require_decide(rule: &'static str, j: &Judgment) -> Result<(), CalcError> {
    if j.spec.classify()? != SpecKind::Decide {
        return Err(CalcError::NotDecide {
            rule,
            spec: j.spec.to_string(),
        });
    }
    Ok(())
}

fn single_output(rule: &'static str, j: &Judgment) -> Result<u32, CalcError> {
    let kind = j.spec.classify()?;
    if !matches!(kind, SpecKind::List | SpecKind::ConditionalList) {
        return Err(CalcError::NotLister {
            rule,
            spec: j.spec.to_string(),
        });
    }
    let outputs = j.spec.output_ranks();
    if outputs.len() != 1 {
        return Err(CalcError::MultipleOutputs {
            rule,
            spec: j.spec.to_string(),
        });
    }
    Ok(*outputs.iter().next().unwrap())
}

/// Shift `n`'s assignable variables above everything `m` assigns, so the
/// two programs never alias.
fn shifted_above(m: &Program, n: &Program) -> Program {
    shift_ranks_banded(n, crate::programs::RankOffset::above(m))
}

// Two-stage splice for the binary templates: first every echo of `n`
// fills the `[N]` holes, then every echo of `m` fills the remaining
// `[M]` holes.
fn two_stage(m: &Program, n: &Program, tpl: &Template) -> Result<Program, CalcError> {
    if n.echo_count() == 0 || m.echo_count() == 0 {
        return Err(CalcError::Program(crate::programs::ProgramError::NoEcho));
    }
    let inner = map_echoes(n, &mut |e| tpl.fill(HoleMark::N, e).commands);
    let inner_tpl = Template::new(inner.commands);
    Ok(map_echoes(m, &mut |e| {
        inner_tpl.fill(HoleMark::M, e).commands
    }))
}

/// SUB: `M # P(I) => M:I=J # P(J)`. Substitutes input variables (or
/// literals) simultaneously, in the program and the spec.
pub fn rule_sub(j: &Judgment, binding: &InputBinding) -> Result<Judgment, CalcError> {
    let inputs = j.spec.input_ranks();
    for rank in binding.keys() {
        if !inputs.contains(rank) {
            return Err(CalcError::BindingTargetMissing {
                name: seq_name(INPUT_LETTERS, *rank),
            });
        }
    }
    Ok(Judgment {
        program: subst_inputs(&j.program, &binding_to_exprs(binding)),
        spec: apply_binding(&j.spec, binding),
    })
}

/// NOT: `M # P => s(M, "echo !([M]);") # ~P`. A double negation in the
/// spec collapses.
pub fn rule_not(j: &Judgment) -> Result<Judgment, CalcError> {
    require_decide("NOT", j)?;
    let tpl = Template::new(vec![Cmd::Echo(Expr::not(Expr::Hole(HoleMark::M)))]);
    let program = crate::programs::splice(&j.program, &tpl)?;
    let spec = match &j.spec {
        Wff::Not(inner) => inner.as_ref().clone(),
        other => Wff::not(other.clone()),
    };
    Ok(Judgment { program, spec })
}

/// AND: `M # P, N # Q => s(M, s(N, "echo ([M])&&([N]);")) # P ^ Q`.
pub fn rule_and(m: &Judgment, n: &Judgment) -> Result<Judgment, CalcError> {
    require_decide("AND", m)?;
    require_decide("AND", n)?;
    let n_shifted = shifted_above(&m.program, &n.program);
    let tpl = Template::new(vec![Cmd::Echo(Expr::and(
        Expr::Hole(HoleMark::M),
        Expr::Hole(HoleMark::N),
    ))]);
    let program = two_stage(&m.program, &n_shifted, &tpl)?;
    Ok(Judgment {
        program,
        spec: Wff::and(m.spec.clone(), n.spec.clone()),
    })
}

/// DO: combines a lister `M # P(x)` with a decider `N # Q(..I..)`,
/// feeding each value `M` is about to output into input `target` of `N`
/// and echoing the value only if `N` would output TRUE:
/// `s(M, s(N:I=[M], "{ if ([N:I=[M]]) echo [M] ; } ;"))  #  P(x) ^ Q(x)`.
pub fn rule_do(m: &Judgment, n: &Judgment, target: u32) -> Result<Judgment, CalcError> {
    let out_rank = single_output("DO", m)?;
    require_decide("DO", n)?;
    if !n.spec.input_ranks().contains(&target) {
        return Err(CalcError::TargetNotInput {
            name: seq_name(INPUT_LETTERS, target),
        });
    }
    if m.program.echo_count() == 0 || n.program.echo_count() == 0 {
        return Err(CalcError::Program(crate::programs::ProgramError::NoEcho));
    }
    let n_shifted = shifted_above(&m.program, &n.program);
    let program = map_echoes(&m.program, &mut |value| {
        let mut binding = ExprBinding::new();
        binding.insert(target, value.clone());
        let fed = subst_inputs(&n_shifted, &binding);
        map_echoes(&fed, &mut |verdict| {
            vec![Cmd::Block(vec![Cmd::If(
                verdict.clone(),
                Box::new(Cmd::Echo(value.clone())),
            )])]
        })
        .commands
    });
    let spec_n = n.spec.map_terms(&mut |t| match t {
        Term::Input(r) if *r == target => Term::Output(out_rank),
        other => *other,
    });
    Ok(Judgment {
        program,
        spec: Wff::and(m.spec.clone(), spec_n),
    })
}

/// IF: `M # P, N # Q(x) => s(M, s(N, "{ if ([M]) echo [N] ; } ;")) # P ^ Q(x)`.
/// N runs at M's echo site with each output guarded by M's value.
pub fn rule_if(m: &Judgment, n: &Judgment) -> Result<Judgment, CalcError> {
    require_decide("IF", m)?;
    single_output("IF", n)?;
    let n_shifted = shifted_above(&m.program, &n.program);
    let tpl = Template::new(vec![Cmd::Block(vec![Cmd::If(
        Expr::Hole(HoleMark::M),
        Box::new(Cmd::Echo(Expr::Hole(HoleMark::N))),
    )])]);
    let program = two_stage(&m.program, &n_shifted, &tpl)?;
    Ok(Judgment {
        program,
        spec: Wff::and(m.spec.clone(), n.spec.clone()),
    })
}

/// UNION: `M # P(x), N # Q(x) => M . N # P(x) v Q(x)`. N is rank-shifted
/// before concatenation so the halves cannot alias. Duplicates in the
/// combined output are permitted.
pub fn rule_union(m: &Judgment, n: &Judgment) -> Result<Judgment, CalcError> {
    let rm = single_output("UNION", m)?;
    let rn = single_output("UNION", n)?;
    if rm != rn {
        return Err(CalcError::MultipleOutputs {
            rule: "UNION",
            spec: format!("{} v {}", m.spec, n.spec),
        });
    }
    let n_shifted = shifted_above(&m.program, &n.program);
    let mut commands = m.program.commands.clone();
    commands.extend(n_shifted.commands);
    Ok(Judgment {
        program: Program::new(commands),
        spec: Wff::or(m.spec.clone(), n.spec.clone()),
    })
}

/// QUIT: `M # P(x) => $A=FALSE; s(M,"$A=TRUE;") echo $A; # (exists A)P(A)`.
/// A fresh flag records whether any value was about to be output.
pub fn rule_quit(m: &Judgment) -> Result<Judgment, CalcError> {
    let out_rank = single_output("QUIT", m)?;
    if m.program.echo_count() == 0 {
        return Err(CalcError::Program(crate::programs::ProgramError::NoEcho));
    }
    let flag = PhpVar::Flag(m.program.max_flag_rank() + 1);
    let body = map_echoes(&m.program, &mut |_| {
        vec![Cmd::Assign(flag, Expr::Bool(true))]
    });
    let mut commands = vec![Cmd::Assign(flag, Expr::Bool(false))];
    commands.extend(body.commands);
    commands.push(Cmd::Echo(Expr::Var(flag)));
    let bound = m.spec.max_bound_rank() + 1;
    let spec = Wff::exists(bound, m.spec.subst_output(out_rank, Term::Bound(bound)));
    Ok(Judgment {
        program: Program::new(commands),
        spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::axiom_lookup;
    use crate::programs::{parse_program, same_text};
    use crate::specs::parse_spec;

    fn binding(pairs: &[(u32, Term)]) -> InputBinding {
        pairs.iter().cloned().collect()
    }

    fn judgment(program: &str, spec: &str) -> Judgment {
        Judgment {
            program: parse_program(program).unwrap(),
            spec: parse_spec(spec).unwrap(),
        }
    }

    #[test]
    fn sub_renames_program_and_spec() {
        let j = axiom_lookup(3).unwrap();
        let got = rule_sub(&j, &binding(&[(1, Term::Input(2)), (2, Term::Input(3))])).unwrap();
        assert!(same_text(&got.program.to_string(), "echo $j < $k ;"));
        assert_eq!(got.spec.to_string(), "LT(J,K)");

        let j = axiom_lookup(6).unwrap();
        let got = rule_sub(&j, &binding(&[(1, Term::Input(2))])).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "for ($a=1 ; $a<$j ; ++$a) echo $a ;"
        ));
        assert_eq!(got.spec.to_string(), "LT(x,J)");
    }

    #[test]
    fn sub_identity_and_missing_target() {
        let j = axiom_lookup(3).unwrap();
        assert_eq!(rule_sub(&j, &binding(&[])).unwrap(), j);
        assert!(rule_sub(&j, &binding(&[(3, Term::Lit(1))])).is_err());
    }

    #[test]
    fn not_negates_the_echo() {
        let j = axiom_lookup(3).unwrap();
        let got = rule_not(&j).unwrap();
        assert!(same_text(&got.program.to_string(), "echo !($i<$j) ;"));
        assert_eq!(got.spec.to_string(), "~LT(I,J)");

        let twice = rule_not(&got).unwrap();
        assert!(same_text(&twice.program.to_string(), "echo !(!($i<$j)) ;"));
        assert_eq!(twice.spec.to_string(), "LT(I,J)");
    }

    #[test]
    fn not_rejects_listers() {
        assert!(rule_not(&axiom_lookup(6).unwrap()).is_err());
    }

    #[test]
    fn and_builds_the_between_decider() {
        let m = axiom_lookup(3).unwrap();
        let n = rule_sub(&m, &binding(&[(1, Term::Input(2)), (2, Term::Input(3))])).unwrap();
        let got = rule_and(&m, &n).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "echo ($i<$j)&&($j<$k) ;"
        ));
        assert_eq!(got.spec.to_string(), "LT(I,J)^LT(J,K)");
    }

    #[test]
    fn and_duplicates_idempotent_operands() {
        let m = axiom_lookup(3).unwrap();
        let got = rule_and(&m, &m).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "echo ($i<$j)&&($i<$j) ;"
        ));
    }

    #[test]
    fn do_builds_the_between_lister() {
        // M: LT(x,J) via axiom 6 + SUB, N: LT(I,K) via axiom 3 + SUB.
        let m = rule_sub(&axiom_lookup(6).unwrap(), &binding(&[(1, Term::Input(2))])).unwrap();
        let n = rule_sub(&axiom_lookup(3).unwrap(), &binding(&[(2, Term::Input(3))])).unwrap();
        let got = rule_do(&m, &n, 3).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "for ($a=1;$a<$j;++$a) { if ($i<$a) echo $a; } ;"
        ));
        assert_eq!(got.spec.to_string(), "LT(x,J)^LT(I,x)");
    }

    #[test]
    fn do_feeds_the_echo_argument_into_the_decider() {
        // The remainder route: M echoes $j % $i, N decides EQ(K,"0").
        let m = judgment("echo $j % $i ;", "REM(J,I,x)");
        let n = judgment("echo $k==0 ;", "EQ(K,\"0\")");
        let got = rule_do(&m, &n, 3).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "{ if (($j % $i) == 0) echo $j % $i ; } ;"
        ));
        assert_eq!(got.spec.to_string(), "REM(J,I,x)^EQ(x,\"0\")");
    }

    #[test]
    fn do_rejects_a_target_that_is_not_an_input() {
        let m = rule_sub(&axiom_lookup(6).unwrap(), &binding(&[(1, Term::Input(2))])).unwrap();
        let n = axiom_lookup(3).unwrap();
        assert!(rule_do(&m, &n, 5).is_err());
    }

    #[test]
    fn if_guards_the_lister() {
        let m = axiom_lookup(3).unwrap();
        let n = axiom_lookup(1).unwrap();
        let got = rule_if(&m, &n).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "{ if ($i<$j) echo $i ; } ;"
        ));
        assert_eq!(got.spec.to_string(), "LT(I,J)^EQ(I,x)");

        let m_not = rule_not(&axiom_lookup(3).unwrap()).unwrap();
        let n_j = rule_sub(&axiom_lookup(1).unwrap(), &binding(&[(1, Term::Input(2))])).unwrap();
        let got = rule_if(&m_not, &n_j).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "{ if (!($i<$j)) echo $j ; } ;"
        ));
    }

    #[test]
    fn union_concatenates() {
        let m = rule_if(&axiom_lookup(3).unwrap(), &axiom_lookup(1).unwrap()).unwrap();
        let n = rule_if(
            &rule_not(&axiom_lookup(3).unwrap()).unwrap(),
            &rule_sub(&axiom_lookup(1).unwrap(), &binding(&[(1, Term::Input(2))])).unwrap(),
        )
        .unwrap();
        let got = rule_union(&m, &n).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "{if ($i<$j) echo $i;} ; {if (!($i<$j)) echo $j;} ;"
        ));
    }

    #[test]
    fn quit_wraps_a_single_echo_lister() {
        let m = judgment(
            "{ if (($j % $i) == 0) echo $j % $i ; } ;",
            "REM(J,I,x)^EQ(x,\"0\")",
        );
        let got = rule_quit(&m).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "$A=FALSE ; { if (($j % $i) == 0) $A=TRUE ; } ; echo $A ;"
        ));
        assert_eq!(got.spec.to_string(), "(exists A)(REM(J,I,A)^EQ(A,\"0\"))");
    }

    #[test]
    fn quit_allocates_a_fresh_flag() {
        let m = judgment(
            "$A=FALSE ; if ($i<2) $A=TRUE ; if ($A) echo $i ;",
            "EQ(I,x)",
        );
        let got = rule_quit(&m).unwrap();
        assert!(same_text(
            &got.program.to_string(),
            "$B=FALSE ; $A=FALSE ; if ($i<2) $A=TRUE ; if ($A) $B=TRUE ; echo $B ;"
        ));
    }

    #[test]
    fn quit_on_an_empty_set_lister_echoes_false() {
        use crate::runtime::{run, Env, Value};
        let m = judgment("{ if ($i<$i) echo $i ; } ;", "LT(I,I)^EQ(I,x)");
        let got = rule_quit(&m).unwrap();
        let out = run(&got.program, &Env::from_pairs(&[(1, 4)]).unwrap(), 10_000).unwrap();
        assert_eq!(out.outputs, vec![Value::Bool(false)]);
    }
}
