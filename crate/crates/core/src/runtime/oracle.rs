use crate::specs::{Relation, SpecKind, Term, Wff};

use super::Env;

/// Default enumeration bound for existential witnesses and listed values.
/// Existential witnesses never exceed `max(bound, largest input or
/// literal)`: factors, multiplicands and in-between values are bounded by
/// the value they relate to. Listed values can be as large as a product
/// of two inputs (the MUL axiom lists `I*J`), so list enumeration squares
/// that base.
pub const DEFAULT_ORACLE_BOUND: u64 = 128;

fn max_literal(w: &Wff) -> u64 {
    let mut max = 0;
    w.for_each_term(&mut |t| {
        if let Term::Lit(v) = t {
            max = max.max(*v);
        }
    });
    max
}

fn term_value(t: &Term, env: &Env) -> u64 {
    match t {
        Term::Input(r) => env
            .get(*r)
            .unwrap_or_else(|| panic!("oracle: input rank {} unbound", r)),
        Term::Lit(v) => *v,
        Term::Output(_) => panic!("oracle_decide: unsubstituted output variable"),
        Term::Bound(_) => panic!("oracle_decide: unsubstituted bound variable"),
    }
}

fn relation_holds(rel: Relation, args: &[u64]) -> bool {
    match rel {
        Relation::Eq => args[0] == args[1],
        Relation::Lt => args[0] < args[1],
        Relation::Betw => args[0] < args[1] && args[1] < args[2],
        Relation::Mul => args[0].checked_mul(args[1]) == Some(args[2]),
        Relation::Fac => args[0] != 0 && args[1] % args[0] == 0,
        Relation::Rem => args[1] != 0 && args[0] % args[1] == args[2],
        Relation::Pfac => {
            let (a, b) = (args[0], args[1]);
            a != 0 && b % a == 0 && 1 < a && a < b
        }
        Relation::Prime => {
            let a = args[0];
            a >= 2 && (2..a).all(|d| a % d != 0)
        }
    }
}

/// Decides a closed, output-free wff by structural recursion: the eight
/// relations by arithmetic, the connectives classically, and existentials
/// by enumerating `[1..B]` with `B = max(bound, largest input)`.
pub fn oracle_decide(w: &Wff, env: &Env, bound: u64) -> bool {
    let b = bound.max(env.max_value()).max(max_literal(w));
    decide(w, env, b)
}

fn decide(w: &Wff, env: &Env, b: u64) -> bool {
    match w {
        Wff::Atom(atom) => {
            let args: Vec<u64> = atom.args.iter().map(|t| term_value(t, env)).collect();
            relation_holds(atom.rel, &args)
        }
        Wff::Not(a) => !decide(a, env, b),
        Wff::And(x, y) => decide(x, env, b) && decide(y, env, b),
        Wff::Or(x, y) => decide(x, env, b) || decide(y, env, b),
        // Witnesses start at 0: the only relation satisfiable there is a
        // zero remainder, which is exactly the case DEF-REM introduces.
        Wff::Exists(r, body) => (0..=b).any(|v| decide(&body.subst_bound(*r, Term::Lit(v)), env, b)),
        Wff::Forall(r, body) => {
            (0..=b).all(|v| decide(&body.subst_bound(*r, Term::Lit(v)), env, b))
        }
    }
}

/// Lists the set a single-output wff denotes: every value in `[1..B]`
/// whose substitution makes the wff true. Spec semantics are sets, so
/// each element appears once, in increasing order.
pub fn oracle_list(w: &Wff, env: &Env, bound: u64) -> Vec<u64> {
    let kind = w.classify().expect("oracle_list: classifiable spec");
    assert!(
        matches!(kind, SpecKind::List | SpecKind::ConditionalList),
        "oracle_list: list spec expected"
    );
    let outputs = w.output_ranks();
    assert_eq!(outputs.len(), 1, "oracle_list: single output variable");
    let rank = *outputs.iter().next().unwrap();
    let base = env.max_value().max(max_literal(w));
    let witness_bound = bound.max(base);
    let list_bound = if output_can_be_product(w, rank) {
        bound.max(base.saturating_mul(base))
    } else {
        witness_bound
    };
    (1..=list_bound)
        .filter(|v| decide(&w.subst_output(rank, Term::Lit(*v)), env, witness_bound))
        .collect()
}

// Listed values are bounded by the largest input or literal, except when
// the output stands for a product or a dividend: the MUL axiom lists
// `I*J`, which exceeds both inputs.
fn output_can_be_product(w: &Wff, rank: u32) -> bool {
    let mut found = false;
    fn walk(w: &Wff, rank: u32, found: &mut bool) {
        match w {
            Wff::Atom(a) => {
                let unbounded_slot = match a.rel {
                    Relation::Mul => Some(2),
                    Relation::Rem => Some(0),
                    _ => None,
                };
                if let Some(slot) = unbounded_slot {
                    if a.args.get(slot) == Some(&Term::Output(rank)) {
                        *found = true;
                    }
                }
            }
            Wff::Not(x) | Wff::Exists(_, x) | Wff::Forall(_, x) => walk(x, rank, found),
            Wff::And(x, y) | Wff::Or(x, y) => {
                walk(x, rank, found);
                walk(y, rank, found);
            }
        }
    }
    walk(w, rank, &mut found);
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specs::parse_spec;

    fn env(pairs: &[(u32, u64)]) -> Env {
        Env::from_pairs(pairs).unwrap()
    }

    /// Sieve of Eratosthenes, the independent reference for PRIME facts.
    fn sieve(limit: usize) -> Vec<bool> {
        let mut is_prime = vec![true; limit + 1];
        is_prime[0] = false;
        if limit >= 1 {
            is_prime[1] = false;
        }
        let mut d = 2;
        while d * d <= limit {
            if is_prime[d] {
                let mut m = d * d;
                while m <= limit {
                    is_prime[m] = false;
                    m += d;
                }
            }
            d += 1;
        }
        is_prime
    }

    #[test]
    fn relation_arithmetic() {
        let w = parse_spec("FAC(I,J)").unwrap();
        assert!(oracle_decide(&w, &env(&[(1, 3), (2, 12)]), 64));
        assert!(!oracle_decide(&w, &env(&[(1, 5), (2, 12)]), 64));

        let w = parse_spec("BETW(I,J,K)").unwrap();
        assert!(!oracle_decide(&w, &env(&[(1, 5), (2, 5), (3, 9)]), 64));
    }

    #[test]
    fn prime_relation_agrees_with_sieve() {
        let is_prime = sieve(100);
        let w = parse_spec("PRIME(I)").unwrap();
        for n in 1..=100u64 {
            assert_eq!(
                oracle_decide(&w, &env(&[(1, n)]), 128),
                is_prime[n as usize],
                "n = {}",
                n
            );
        }
    }

    #[test]
    fn exists_uses_the_input_as_bound() {
        // (exists A)MUL(A,I,J): is I a factor of J?
        let w = parse_spec("(exists A)MUL(A,I,J)").unwrap();
        assert!(oracle_decide(&w, &env(&[(1, 25), (2, 200)]), 4));
        assert!(!oracle_decide(&w, &env(&[(1, 25), (2, 201)]), 4));
    }

    #[test]
    fn forall_via_de_morgan() {
        // (all A)~PFAC(A,I): I has no proper factor, i.e. 1 or prime.
        let w = parse_spec("(all A)~PFAC(A,I)").unwrap();
        assert!(oracle_decide(&w, &env(&[(1, 13)]), 64));
        assert!(!oracle_decide(&w, &env(&[(1, 12)]), 64));
    }

    #[test]
    fn listing_between() {
        let w = parse_spec("BETW(I,x,J)").unwrap();
        assert_eq!(
            oracle_list(&w, &env(&[(1, 3), (2, 9)]), 64),
            vec![4, 5, 6, 7, 8]
        );
    }

    #[test]
    fn listing_prime_factors() {
        let w = parse_spec("FAC(x,I)^PRIME(x)").unwrap();
        assert_eq!(oracle_list(&w, &env(&[(1, 12)]), 64), vec![2, 3]);
    }

    #[test]
    fn listing_primes_to_one_hundred() {
        let w = parse_spec("PRIME(x)^BETW(\"1\",x,\"100\")").unwrap();
        let got = oracle_list(&w, &Env::new(), DEFAULT_ORACLE_BOUND);
        let is_prime = sieve(100);
        let expected: Vec<u64> = (2..100u64).filter(|n| is_prime[*n as usize]).collect();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 25);
    }
}
