use std::collections::BTreeMap;

use super::term::Term;
use super::wff::Wff;

/// Substitution from input ranks to terms (input variables or literals).
pub type InputBinding = BTreeMap<u32, Term>;

/// Matches `goal` against `pattern`, treating the pattern's input
/// variables as unification variables. Output and bound variables must
/// match positionally; structure and literals must match exactly. On
/// success the returned binding, applied to the pattern, yields the goal.
///
/// Axiom specs are single atoms (or a negated atom); theorem specs can be
/// any wff, which is why this works on whole trees.
pub fn match_spec(goal: &Wff, pattern: &Wff) -> Option<InputBinding> {
    let mut binding = InputBinding::new();
    if walk(goal, pattern, &mut binding) {
        Some(binding)
    } else {
        None
    }
}

fn walk(goal: &Wff, pattern: &Wff, binding: &mut InputBinding) -> bool {
    match (pattern, goal) {
        (Wff::Atom(p), Wff::Atom(g)) => {
            if p.rel != g.rel {
                return false;
            }
            p.args.iter().zip(&g.args).all(|(pt, gt)| match pt {
                Term::Input(r) => {
                    if !matches!(gt, Term::Input(_) | Term::Lit(_)) {
                        return false;
                    }
                    match binding.get(r) {
                        Some(prev) => prev == gt,
                        None => {
                            binding.insert(*r, *gt);
                            true
                        }
                    }
                }
                other => other == gt,
            })
        }
        (Wff::Not(p), Wff::Not(g)) => walk(g, p, binding),
        (Wff::And(p1, p2), Wff::And(g1, g2)) => {
            walk(g1, p1, binding) && walk(g2, p2, binding)
        }
        (Wff::Or(p1, p2), Wff::Or(g1, g2)) => walk(g1, p1, binding) && walk(g2, p2, binding),
        (Wff::Exists(pr, p), Wff::Exists(gr, g)) | (Wff::Forall(pr, p), Wff::Forall(gr, g)) => {
            pr == gr && walk(g, p, binding)
        }
        _ => false,
    }
}

/// Specialization of [`match_spec`] for axiom lookup: finds the
/// substitution that maps an axiom's spec onto the goal, if any.
pub fn match_axiom(goal: &Wff, axiom_spec: &Wff) -> Option<InputBinding> {
    match_spec(goal, axiom_spec)
}

/// Applies an input binding to a wff.
pub fn apply_binding(w: &Wff, binding: &InputBinding) -> Wff {
    w.subst_inputs(binding)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specs::parse_spec;

    fn p(s: &str) -> Wff {
        parse_spec(s).unwrap()
    }

    #[test]
    fn renaming_binding_is_found() {
        let binding = match_axiom(&p("LT(J,K)"), &p("LT(I,J)")).unwrap();
        assert_eq!(binding.get(&1), Some(&Term::Input(2)));
        assert_eq!(binding.get(&2), Some(&Term::Input(3)));
    }

    #[test]
    fn literal_binding_is_found() {
        let binding = match_axiom(&p("LT(I,\"2\")"), &p("LT(I,J)")).unwrap();
        assert_eq!(binding.get(&1), Some(&Term::Input(1)));
        assert_eq!(binding.get(&2), Some(&Term::Lit(2)));
    }

    #[test]
    fn output_position_mismatch_fails() {
        assert!(match_axiom(&p("LT(x,I)"), &p("LT(I,J)")).is_none());
    }

    #[test]
    fn binding_applied_to_pattern_yields_goal() {
        let cases = [
            ("LT(J,K)", "LT(I,J)"),
            ("LT(I,\"2\")", "LT(I,J)"),
            ("BETW(\"1\",x,I)", "BETW(I,x,J)"),
            ("PRIME(x)^BETW(\"1\",x,\"100\")", "PRIME(x)^BETW(I,x,J)"),
            ("~LT(J,x)", "~LT(I,x)"),
        ];
        for (goal, pattern) in cases {
            let (g, pat) = (p(goal), p(pattern));
            let binding = match_spec(&g, &pat).unwrap();
            assert_eq!(apply_binding(&pat, &binding), g, "{} vs {}", goal, pattern);
        }
    }

    #[test]
    fn inconsistent_binding_fails() {
        // I would have to be both J and K.
        assert!(match_spec(&p("EQ(J,K)^EQ(I,I)"), &p("EQ(I,I)^EQ(J,J)")).is_none());
    }
}
