use serde::{Deserialize, Serialize};

use super::term::Term;
use super::wff::{Atom, Relation, Wff};
use super::SpecError;

/// Position of a subtree: child indices from the root. For DEF-EQ applied
/// forward the path carries one extra component, the argument index inside
/// the addressed atom.
pub type WffPath = Vec<usize>;

/// Identifier of a definitional rewrite. The first nine are the DEF table;
/// `ScopeL`/`ScopeR` are derived quantifier-scope rewrites
/// (`(exists A)(P^Q) = ((exists A)P)^Q` when `A` is not in `Q`, and the
/// mirror image) used to move an output-free conjunct out of an
/// existential so the conjunction rules can reach it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefId {
    Betw,
    Fac,
    Pfac,
    Prime,
    Rem,
    MulComm,
    Mult,
    AndComm,
    Eq,
    ScopeL,
    ScopeR,
}

impl DefId {
    pub fn name(&self) -> &'static str {
        match self {
            DefId::Betw => "BETW",
            DefId::Fac => "FAC",
            DefId::Pfac => "PFAC",
            DefId::Prime => "PRIME",
            DefId::Rem => "REM",
            DefId::MulComm => "MUL",
            DefId::Mult => "MULT",
            DefId::AndComm => "^",
            DefId::Eq => "EQ",
            DefId::ScopeL => "SCOPE-L",
            DefId::ScopeR => "SCOPE-R",
        }
    }
}

/// `Forward` reads a definition left to right as tabled (e.g.
/// `BETW(a,b,c)` to `LT(a,b)^LT(b,c)`); `Backward` is the inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefDirection {
    Forward,
    Backward,
}

impl DefDirection {
    pub fn flip(self) -> DefDirection {
        match self {
            DefDirection::Forward => DefDirection::Backward,
            DefDirection::Backward => DefDirection::Forward,
        }
    }
}

/// A pattern term: a component variable (`a`, `b`, `c`), the pattern's
/// quantified variable, or a fixed literal.
#[derive(Debug, Clone, PartialEq, Eq)]
enum PatTerm {
    Comp(usize),
    Bound,
    Lit(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Pat {
    Atom(Relation, Vec<PatTerm>),
    Not(Box<Pat>),
    And(Box<Pat>, Box<Pat>),
    Exists(Box<Pat>),
}

/// One entry of the DEF table. The two schema entries (`^` commutativity
/// and the EQ expansion) have no first-order pattern; their matching is
/// structural.
#[derive(Debug, Clone)]
pub struct DefRule {
    pub id: DefId,
    /// The defining equation with component variables, as tabled.
    pub equation: &'static str,
    pat: Option<(Pat, Pat)>,
}

fn a() -> PatTerm {
    PatTerm::Comp(0)
}
fn b() -> PatTerm {
    PatTerm::Comp(1)
}
fn c() -> PatTerm {
    PatTerm::Comp(2)
}

fn relation_defs() -> Vec<DefRule> {
    use Pat::*;
    vec![
        DefRule {
            id: DefId::Betw,
            equation: "BETW(a,b,c) = LT(a,b)^LT(b,c)",
            pat: Some((
                Atom(Relation::Betw, vec![a(), b(), c()]),
                And(
                    Box::new(Atom(Relation::Lt, vec![a(), b()])),
                    Box::new(Atom(Relation::Lt, vec![b(), c()])),
                ),
            )),
        },
        DefRule {
            id: DefId::Fac,
            equation: "FAC(a,b) = (exists A)MUL(A,a,b)",
            pat: Some((
                Atom(Relation::Fac, vec![a(), b()]),
                Exists(Box::new(Atom(
                    Relation::Mul,
                    vec![PatTerm::Bound, a(), b()],
                ))),
            )),
        },
        DefRule {
            id: DefId::Pfac,
            equation: "PFAC(a,b) = FAC(a,b)^BETW(\"1\",a,b)",
            pat: Some((
                Atom(Relation::Pfac, vec![a(), b()]),
                And(
                    Box::new(Atom(Relation::Fac, vec![a(), b()])),
                    Box::new(Atom(Relation::Betw, vec![PatTerm::Lit(1), a(), b()])),
                ),
            )),
        },
        DefRule {
            id: DefId::Prime,
            equation: "PRIME(a) = ~(exists A)PFAC(A,a)^~LT(a,\"2\")",
            pat: Some((
                Atom(Relation::Prime, vec![a()]),
                And(
                    Box::new(Not(Box::new(Exists(Box::new(Atom(
                        Relation::Pfac,
                        vec![PatTerm::Bound, a()],
                    )))))),
                    Box::new(Not(Box::new(Atom(
                        Relation::Lt,
                        vec![a(), PatTerm::Lit(2)],
                    )))),
                ),
            )),
        },
        DefRule {
            id: DefId::Rem,
            equation: "FAC(a,b) = REM(b,a,\"0\")",
            pat: Some((
                Atom(Relation::Fac, vec![a(), b()]),
                Atom(Relation::Rem, vec![b(), a(), PatTerm::Lit(0)]),
            )),
        },
        DefRule {
            id: DefId::MulComm,
            equation: "MUL(a,b,c) = MUL(b,a,c)",
            pat: Some((
                Atom(Relation::Mul, vec![a(), b(), c()]),
                Atom(Relation::Mul, vec![b(), a(), c()]),
            )),
        },
        DefRule {
            id: DefId::Mult,
            equation: "MUL(a,b,c) = MUL(a,b,c)^~LT(c,a)",
            pat: Some((
                Atom(Relation::Mul, vec![a(), b(), c()]),
                And(
                    Box::new(Atom(Relation::Mul, vec![a(), b(), c()])),
                    Box::new(Not(Box::new(Atom(Relation::Lt, vec![c(), a()])))),
                ),
            )),
        },
    ]
}

/// The nine DEF entries in table order.
pub fn def_table() -> Vec<DefRule> {
    let mut table = relation_defs();
    table.push(DefRule {
        id: DefId::AndComm,
        equation: "P^Q = Q^P",
        pat: None,
    });
    table.push(DefRule {
        id: DefId::Eq,
        equation: "P(a) = (exists A)P(A)^EQ(A,a)",
        pat: None,
    });
    table
}

fn subtree_at<'w>(w: &'w Wff, path: &[usize]) -> Option<&'w Wff> {
    let mut cur = w;
    for &i in path {
        cur = *cur.children().get(i)?;
    }
    Some(cur)
}

fn replace_at(w: &Wff, path: &[usize], new: Wff) -> Option<Wff> {
    if path.is_empty() {
        return Some(new);
    }
    let (i, rest) = (path[0], &path[1..]);
    Some(match w {
        Wff::Atom(_) => return None,
        Wff::Not(x) if i == 0 => Wff::not(replace_at(x, rest, new)?),
        Wff::Exists(r, x) if i == 0 => Wff::exists(*r, replace_at(x, rest, new)?),
        Wff::Forall(r, x) if i == 0 => Wff::forall(*r, replace_at(x, rest, new)?),
        Wff::And(x, y) if i == 0 => Wff::and(replace_at(x, rest, new)?, y.as_ref().clone()),
        Wff::And(x, y) if i == 1 => Wff::and(x.as_ref().clone(), replace_at(y, rest, new)?),
        Wff::Or(x, y) if i == 0 => Wff::or(replace_at(x, rest, new)?, y.as_ref().clone()),
        Wff::Or(x, y) if i == 1 => Wff::or(x.as_ref().clone(), replace_at(y, rest, new)?),
        _ => return None,
    })
}

fn match_pat(
    pat: &Pat,
    w: &Wff,
    binds: &mut [Option<Term>; 3],
    bound: &mut Option<u32>,
) -> bool {
    match (pat, w) {
        (Pat::Atom(rel, pargs), Wff::Atom(Atom { rel: wrel, args })) => {
            if rel != wrel || pargs.len() != args.len() {
                return false;
            }
            for (p, t) in pargs.iter().zip(args) {
                match p {
                    PatTerm::Comp(i) => match &binds[*i] {
                        Some(prev) => {
                            if prev != t {
                                return false;
                            }
                        }
                        None => binds[*i] = Some(*t),
                    },
                    PatTerm::Bound => match (&*bound, t) {
                        (Some(r), Term::Bound(q)) if r == q => {}
                        _ => return false,
                    },
                    PatTerm::Lit(v) => {
                        if *t != Term::Lit(*v) {
                            return false;
                        }
                    }
                }
            }
            true
        }
        (Pat::Not(p), Wff::Not(x)) => match_pat(p, x, binds, bound),
        (Pat::And(p, q), Wff::And(x, y)) => {
            match_pat(p, x, binds, bound) && match_pat(q, y, binds, bound)
        }
        (Pat::Exists(p), Wff::Exists(r, x)) => {
            *bound = Some(*r);
            match_pat(p, x, binds, bound)
        }
        _ => false,
    }
}

fn instantiate(pat: &Pat, binds: &[Option<Term>; 3], fresh_bound: u32) -> Wff {
    match pat {
        Pat::Atom(rel, pargs) => Wff::Atom(Atom {
            rel: *rel,
            args: pargs
                .iter()
                .map(|p| match p {
                    PatTerm::Comp(i) => binds[*i].expect("component bound by match"),
                    PatTerm::Bound => Term::Bound(fresh_bound),
                    PatTerm::Lit(v) => Term::Lit(*v),
                })
                .collect(),
        }),
        Pat::Not(p) => Wff::not(instantiate(p, binds, fresh_bound)),
        Pat::And(p, q) => Wff::and(
            instantiate(p, binds, fresh_bound),
            instantiate(q, binds, fresh_bound),
        ),
        Pat::Exists(p) => Wff::exists(fresh_bound, instantiate(p, binds, fresh_bound)),
    }
}

fn no_match(def: DefId) -> SpecError {
    SpecError::DefNoMatch {
        def: def.name().to_string(),
    }
}

/// Applies a DEF at `path`, replacing the addressed subtree by the
/// instantiated other side of the definition. Component variables unify
/// with any term.
pub fn apply_def(
    def: DefId,
    w: &Wff,
    path: &[usize],
    dir: DefDirection,
) -> Result<Wff, SpecError> {
    match def {
        DefId::AndComm => {
            let sub = subtree_at(w, path).ok_or(SpecError::PathOutOfBounds {
                path: path.to_vec(),
            })?;
            let Wff::And(x, y) = sub else {
                return Err(no_match(def));
            };
            let swapped = Wff::and(y.as_ref().clone(), x.as_ref().clone());
            replace_at(w, path, swapped).ok_or(SpecError::PathOutOfBounds {
                path: path.to_vec(),
            })
        }
        DefId::Eq => apply_def_eq(w, path, dir),
        DefId::ScopeL | DefId::ScopeR => apply_scope(def, w, path, dir),
        _ => {
            let sub = subtree_at(w, path).ok_or(SpecError::PathOutOfBounds {
                path: path.to_vec(),
            })?;
            let rule = relation_defs()
                .into_iter()
                .find(|r| r.id == def)
                .expect("relation def");
            let (lhs, rhs) = rule.pat.as_ref().expect("relation defs carry patterns");
            let (from, to) = match dir {
                DefDirection::Forward => (lhs, rhs),
                DefDirection::Backward => (rhs, lhs),
            };
            let mut binds = [None, None, None];
            let mut bound = None;
            if !match_pat(from, sub, &mut binds, &mut bound) {
                return Err(no_match(def));
            }
            // Contracting an existential must not leave its variable behind.
            if let Some(r) = bound {
                if binds.iter().flatten().any(|t| *t == Term::Bound(r)) {
                    return Err(no_match(def));
                }
            }
            let fresh = w.max_bound_rank() + 1;
            let new = instantiate(to, &binds, fresh);
            replace_at(w, path, new).ok_or(SpecError::PathOutOfBounds {
                path: path.to_vec(),
            })
        }
    }
}

// DEF 9: P(a) = (exists A)P(A)^EQ(A,a). Applied forward, the path names an
// atom plus the argument position standing for `a`; applied backward it
// names the existential subtree.
fn apply_def_eq(w: &Wff, path: &[usize], dir: DefDirection) -> Result<Wff, SpecError> {
    match dir {
        DefDirection::Forward => {
            let Some((&arg_idx, atom_path)) = path.split_last() else {
                return Err(no_match(DefId::Eq));
            };
            let sub = subtree_at(w, atom_path).ok_or(SpecError::PathOutOfBounds {
                path: path.to_vec(),
            })?;
            let Wff::Atom(atom) = sub else {
                return Err(no_match(DefId::Eq));
            };
            let Some(&target) = atom.args.get(arg_idx) else {
                return Err(SpecError::PathOutOfBounds {
                    path: path.to_vec(),
                });
            };
            let fresh = w.max_bound_rank() + 1;
            let mut generalized = atom.clone();
            generalized.args[arg_idx] = Term::Bound(fresh);
            let eq_atom = Wff::Atom(Atom {
                rel: Relation::Eq,
                args: vec![Term::Bound(fresh), target],
            });
            let new = Wff::exists(fresh, Wff::and(Wff::Atom(generalized), eq_atom));
            replace_at(w, atom_path, new).ok_or(SpecError::PathOutOfBounds {
                path: path.to_vec(),
            })
        }
        DefDirection::Backward => {
            let sub = subtree_at(w, path).ok_or(SpecError::PathOutOfBounds {
                path: path.to_vec(),
            })?;
            let Wff::Exists(r, body) = sub else {
                return Err(no_match(DefId::Eq));
            };
            let Wff::And(p, q) = body.as_ref() else {
                return Err(no_match(DefId::Eq));
            };
            let (Wff::Atom(p_atom), Wff::Atom(q_atom)) = (p.as_ref(), q.as_ref()) else {
                return Err(no_match(DefId::Eq));
            };
            if q_atom.rel != Relation::Eq || q_atom.args[0] != Term::Bound(*r) {
                return Err(no_match(DefId::Eq));
            }
            let target = q_atom.args[1];
            if target == Term::Bound(*r) || !p_atom.args.contains(&Term::Bound(*r)) {
                return Err(no_match(DefId::Eq));
            }
            let mut contracted = p_atom.clone();
            for t in contracted.args.iter_mut() {
                if *t == Term::Bound(*r) {
                    *t = target;
                }
            }
            replace_at(w, path, Wff::Atom(contracted)).ok_or(SpecError::PathOutOfBounds {
                path: path.to_vec(),
            })
        }
    }
}

fn apply_scope(def: DefId, w: &Wff, path: &[usize], dir: DefDirection) -> Result<Wff, SpecError> {
    let sub = subtree_at(w, path).ok_or(SpecError::PathOutOfBounds {
        path: path.to_vec(),
    })?;
    let new = match (def, dir) {
        (DefId::ScopeL, DefDirection::Forward) => {
            let Wff::Exists(r, body) = sub else {
                return Err(no_match(def));
            };
            let Wff::And(p, q) = body.as_ref() else {
                return Err(no_match(def));
            };
            if q.mentions_bound(*r) {
                return Err(no_match(def));
            }
            Wff::and(Wff::exists(*r, p.as_ref().clone()), q.as_ref().clone())
        }
        (DefId::ScopeR, DefDirection::Forward) => {
            let Wff::Exists(r, body) = sub else {
                return Err(no_match(def));
            };
            let Wff::And(p, q) = body.as_ref() else {
                return Err(no_match(def));
            };
            if p.mentions_bound(*r) {
                return Err(no_match(def));
            }
            Wff::and(p.as_ref().clone(), Wff::exists(*r, q.as_ref().clone()))
        }
        (DefId::ScopeL, DefDirection::Backward) => {
            let Wff::And(p, q) = sub else {
                return Err(no_match(def));
            };
            let Wff::Exists(r, inner) = p.as_ref() else {
                return Err(no_match(def));
            };
            let (rank, inner) = rebind_if_clashing(*r, inner, q, w);
            Wff::exists(rank, Wff::and(inner, q.as_ref().clone()))
        }
        (DefId::ScopeR, DefDirection::Backward) => {
            let Wff::And(p, q) = sub else {
                return Err(no_match(def));
            };
            let Wff::Exists(r, inner) = q.as_ref() else {
                return Err(no_match(def));
            };
            let (rank, inner) = rebind_if_clashing(*r, inner, p, w);
            Wff::exists(rank, Wff::and(p.as_ref().clone(), inner))
        }
        _ => unreachable!(),
    };
    replace_at(w, path, new).ok_or(SpecError::PathOutOfBounds {
        path: path.to_vec(),
    })
}

// Widening a quantifier over a sibling that already mentions the rank
// somewhere in its own scopes would shadow; rename to a fresh rank first.
fn rebind_if_clashing(rank: u32, body: &Wff, sibling: &Wff, whole: &Wff) -> (u32, Wff) {
    if sibling.mentions_bound(rank) {
        let fresh = whole.max_bound_rank() + 1;
        (fresh, body.subst_bound(rank, Term::Bound(fresh)))
    } else {
        (rank, body.clone())
    }
}

/// All subtree paths of `w` in pre-order.
pub fn all_paths(w: &Wff) -> Vec<WffPath> {
    let mut out = Vec::new();
    fn walk(w: &Wff, prefix: &mut WffPath, out: &mut Vec<WffPath>) {
        out.push(prefix.clone());
        for (i, c) in w.children().into_iter().enumerate() {
            prefix.push(i);
            walk(c, prefix, out);
            prefix.pop();
        }
    }
    walk(w, &mut Vec::new(), &mut out);
    out
}

/// Enumerates every DEF application on `w` in deterministic order:
/// table order, then pre-order path, then forward before backward. The
/// EQ expansion is restricted to literal arguments unless
/// `unrestricted_eq` is set; the derived scope rewrites come last.
pub fn def_applications(
    w: &Wff,
    unrestricted_eq: bool,
) -> Vec<(DefId, WffPath, DefDirection, Wff)> {
    let mut out = Vec::new();
    let paths = all_paths(w);
    let ids = [
        DefId::Betw,
        DefId::Fac,
        DefId::Pfac,
        DefId::Prime,
        DefId::Rem,
        DefId::MulComm,
        DefId::Mult,
        DefId::AndComm,
        DefId::Eq,
        DefId::ScopeL,
        DefId::ScopeR,
    ];
    for id in ids {
        for path in &paths {
            for dir in [DefDirection::Forward, DefDirection::Backward] {
                if id == DefId::Eq && dir == DefDirection::Forward {
                    // Expansion sites are atom arguments, addressed by an
                    // extended path.
                    let Some(Wff::Atom(atom)) = subtree_at(w, path) else {
                        continue;
                    };
                    for (i, arg) in atom.args.iter().enumerate() {
                        let allowed = unrestricted_eq || matches!(arg, Term::Lit(_));
                        if !allowed {
                            continue;
                        }
                        let mut p = path.clone();
                        p.push(i);
                        if let Ok(new) = apply_def(id, w, &p, dir) {
                            out.push((id, p, dir, new));
                        }
                    }
                    continue;
                }
                if id == DefId::AndComm && dir == DefDirection::Backward {
                    continue; // symmetric; forward covers it
                }
                if let Ok(new) = apply_def(id, w, path, dir) {
                    out.push((id, path.clone(), dir, new));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specs::parse_spec;

    fn p(s: &str) -> Wff {
        parse_spec(s).unwrap()
    }

    #[test]
    fn betw_forward_at_root() {
        let w = p("BETW(I,J,K)");
        let got = apply_def(DefId::Betw, &w, &[], DefDirection::Forward).unwrap();
        assert_eq!(got, p("LT(I,J)^LT(J,K)"));
    }

    #[test]
    fn betw_applies_to_output_positions_too() {
        let w = p("BETW(I,x,J)");
        let got = apply_def(DefId::Betw, &w, &[], DefDirection::Forward).unwrap();
        assert_eq!(got, p("LT(I,x)^LT(x,J)"));
    }

    #[test]
    fn and_comm_swaps_and_is_an_involution() {
        let w = p("LT(I,x)^LT(x,J)");
        let once = apply_def(DefId::AndComm, &w, &[], DefDirection::Forward).unwrap();
        assert_eq!(once, p("LT(x,J)^LT(I,x)"));
        let twice = apply_def(DefId::AndComm, &once, &[], DefDirection::Forward).unwrap();
        assert_eq!(twice, w);
    }

    #[test]
    fn rem_forward_rewrites_fac() {
        let w = p("FAC(I,J)");
        let got = apply_def(DefId::Rem, &w, &[], DefDirection::Forward).unwrap();
        assert_eq!(got, p("REM(J,I,\"0\")"));
    }

    #[test]
    fn all_nine_defs_invert_on_corpus_wffs() {
        // Applying forward then backward at the same path restores the wff.
        let cases = [
            (DefId::Betw, "BETW(I,J,K)"),
            (DefId::Fac, "FAC(x,I)"),
            (DefId::Pfac, "PFAC(x,I)"),
            (DefId::Prime, "PRIME(I)"),
            (DefId::Rem, "FAC(I,J)"),
            (DefId::MulComm, "MUL(I,J,x)"),
            (DefId::Mult, "MUL(I,J,x)"),
            (DefId::AndComm, "LT(I,J)^LT(J,K)"),
        ];
        for (def, text) in cases {
            let w = p(text);
            let fwd = apply_def(def, &w, &[], DefDirection::Forward).unwrap();
            let dir_back = if def == DefId::AndComm {
                DefDirection::Forward
            } else {
                DefDirection::Backward
            };
            let back = apply_def(def, &fwd, &[], dir_back).unwrap();
            assert_eq!(back, w, "{:?} round trip", def);
        }
        // DEF-EQ: expand the literal argument of REM(J,I,"0") and contract.
        let w = p("REM(J,I,\"0\")");
        let fwd = apply_def(DefId::Eq, &w, &[2], DefDirection::Forward).unwrap();
        assert!(matches!(fwd, Wff::Exists(_, _)));
        let back = apply_def(DefId::Eq, &fwd, &[], DefDirection::Backward).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn prime_forward_expands_fully() {
        let w = p("PRIME(I)");
        let got = apply_def(DefId::Prime, &w, &[], DefDirection::Forward).unwrap();
        assert_eq!(got, p("~(exists A)PFAC(A,I) ^ ~LT(I,\"2\")"));
    }

    #[test]
    fn def_at_nested_path() {
        let w = p("PRIME(x)^BETW(\"1\",x,\"100\")");
        let got = apply_def(DefId::Betw, &w, &[1], DefDirection::Forward).unwrap();
        assert_eq!(got, p("PRIME(x)^(LT(\"1\",x)^LT(x,\"100\"))"));
    }

    #[test]
    fn no_match_and_bad_path_are_errors() {
        let w = p("LT(I,J)");
        assert!(matches!(
            apply_def(DefId::Betw, &w, &[], DefDirection::Forward),
            Err(SpecError::DefNoMatch { .. })
        ));
        assert!(matches!(
            apply_def(DefId::Betw, &w, &[3], DefDirection::Forward),
            Err(SpecError::PathOutOfBounds { .. })
        ));
    }

    #[test]
    fn scope_extrusion_and_absorption() {
        let w = p("(exists A)(MUL(A,x,I)^~LT(I,x))");
        let got = apply_def(DefId::ScopeL, &w, &[], DefDirection::Forward).unwrap();
        assert_eq!(got, p("(exists A)MUL(A,x,I)^~LT(I,x)"));
        let back = apply_def(DefId::ScopeL, &got, &[], DefDirection::Backward).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn contraction_refuses_to_capture() {
        // (exists A)MUL(A,A,I) must not contract to FAC(A,I).
        let w = Wff::exists(
            1,
            Wff::atom(
                Relation::Mul,
                vec![Term::Bound(1), Term::Bound(1), Term::Input(1)],
            )
            .unwrap(),
        );
        assert!(apply_def(DefId::Fac, &w, &[], DefDirection::Backward).is_err());
    }

    #[test]
    fn def_table_has_nine_entries() {
        assert_eq!(def_table().len(), 9);
    }
}
