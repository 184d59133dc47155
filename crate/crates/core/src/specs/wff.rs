use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::term::{seq_name, Term, BOUND_LETTERS};
use super::SpecError;

/// The eight fixed relations of the specification language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    Eq,
    Lt,
    Betw,
    Mul,
    Fac,
    Rem,
    Pfac,
    Prime,
}

impl Relation {
    pub fn arity(&self) -> usize {
        match self {
            Relation::Eq | Relation::Lt | Relation::Fac | Relation::Pfac => 2,
            Relation::Betw | Relation::Mul | Relation::Rem => 3,
            Relation::Prime => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Relation::Eq => "EQ",
            Relation::Lt => "LT",
            Relation::Betw => "BETW",
            Relation::Mul => "MUL",
            Relation::Fac => "FAC",
            Relation::Rem => "REM",
            Relation::Pfac => "PFAC",
            Relation::Prime => "PRIME",
        }
    }

    pub fn from_name(name: &str) -> Option<Relation> {
        Some(match name {
            "EQ" => Relation::Eq,
            "LT" => Relation::Lt,
            "BETW" => Relation::Betw,
            "MUL" => Relation::Mul,
            "FAC" => Relation::Fac,
            "REM" => Relation::Rem,
            "PFAC" => Relation::Pfac,
            "PRIME" => Relation::Prime,
            _ => return None,
        })
    }
}

/// A relation applied to terms. Construction checks the arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub rel: Relation,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(rel: Relation, args: Vec<Term>) -> Result<Atom, SpecError> {
        if args.len() != rel.arity() {
            return Err(SpecError::Arity {
                relation: rel.name().to_string(),
                expected: rel.arity(),
                got: args.len(),
            });
        }
        Ok(Atom { rel, args })
    }
}

/// A specification wff.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Wff {
    Atom(Atom),
    Not(Box<Wff>),
    And(Box<Wff>, Box<Wff>),
    Or(Box<Wff>, Box<Wff>),
    Exists(u32, Box<Wff>),
    Forall(u32, Box<Wff>),
}

/// How a specification asks to be met: decide membership, list the
/// satisfying values, or list conditionally (a decide conjunct guarding a
/// list conjunct, the shape the IF rule produces).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecKind {
    Decide,
    List,
    ConditionalList,
}

impl Wff {
    pub fn atom(rel: Relation, args: Vec<Term>) -> Result<Wff, SpecError> {
        Ok(Wff::Atom(Atom::new(rel, args)?))
    }

    pub fn not(w: Wff) -> Wff {
        Wff::Not(Box::new(w))
    }

    pub fn and(a: Wff, b: Wff) -> Wff {
        Wff::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Wff, b: Wff) -> Wff {
        Wff::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(rank: u32, body: Wff) -> Wff {
        Wff::Exists(rank, Box::new(body))
    }

    pub fn forall(rank: u32, body: Wff) -> Wff {
        Wff::Forall(rank, Box::new(body))
    }

    pub fn children(&self) -> Vec<&Wff> {
        match self {
            Wff::Atom(_) => vec![],
            Wff::Not(a) | Wff::Exists(_, a) | Wff::Forall(_, a) => vec![a],
            Wff::And(a, b) | Wff::Or(a, b) => vec![a, b],
        }
    }

    /// Applies `f` to every term in the wff, rebuilding the tree.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Wff {
        match self {
            Wff::Atom(a) => Wff::Atom(Atom {
                rel: a.rel,
                args: a.args.iter().map(|t| f(t)).collect(),
            }),
            Wff::Not(a) => Wff::not(a.map_terms(f)),
            Wff::And(a, b) => Wff::and(a.map_terms(f), b.map_terms(f)),
            Wff::Or(a, b) => Wff::or(a.map_terms(f), b.map_terms(f)),
            Wff::Exists(r, a) => Wff::exists(*r, a.map_terms(f)),
            Wff::Forall(r, a) => Wff::forall(*r, a.map_terms(f)),
        }
    }

    pub fn for_each_term(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Wff::Atom(a) => a.args.iter().for_each(|t| f(t)),
            Wff::Not(a) | Wff::Exists(_, a) | Wff::Forall(_, a) => a.for_each_term(f),
            Wff::And(a, b) | Wff::Or(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    pub fn input_ranks(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.for_each_term(&mut |t| {
            if let Term::Input(r) = t {
                out.insert(*r);
            }
        });
        out
    }

    pub fn output_ranks(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.for_each_term(&mut |t| {
            if let Term::Output(r) = t {
                out.insert(*r);
            }
        });
        out
    }

    pub fn has_output(&self) -> bool {
        !self.output_ranks().is_empty()
    }

    /// Maximum bound rank mentioned anywhere (quantifiers or term
    /// occurrences), 0 if none. Used to pick fresh quantifier ranks.
    pub fn max_bound_rank(&self) -> u32 {
        let mut max = 0;
        fn walk(w: &Wff, max: &mut u32) {
            match w {
                Wff::Atom(a) => {
                    for t in &a.args {
                        if let Term::Bound(r) = t {
                            *max = (*max).max(*r);
                        }
                    }
                }
                Wff::Not(a) => walk(a, max),
                Wff::And(a, b) | Wff::Or(a, b) => {
                    walk(a, max);
                    walk(b, max);
                }
                Wff::Exists(r, a) | Wff::Forall(r, a) => {
                    *max = (*max).max(*r);
                    walk(a, max);
                }
            }
        }
        walk(self, &mut max);
        max
    }

    /// Substitutes input variables simultaneously according to `binding`.
    pub fn subst_inputs(&self, binding: &BTreeMap<u32, Term>) -> Wff {
        self.map_terms(&mut |t| match t {
            Term::Input(r) => binding.get(r).copied().unwrap_or(*t),
            other => *other,
        })
    }

    /// Replaces every occurrence of output rank `rank` by `to`.
    pub fn subst_output(&self, rank: u32, to: Term) -> Wff {
        self.map_terms(&mut |t| match t {
            Term::Output(r) if *r == rank => to,
            other => *other,
        })
    }

    /// Replaces every free occurrence of bound rank `rank` by `to`.
    /// Occurrences under a quantifier that rebinds the rank are left alone.
    pub fn subst_bound(&self, rank: u32, to: Term) -> Wff {
        match self {
            Wff::Atom(a) => Wff::Atom(Atom {
                rel: a.rel,
                args: a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Bound(r) if *r == rank => to,
                        other => *other,
                    })
                    .collect(),
            }),
            Wff::Not(a) => Wff::not(a.subst_bound(rank, to)),
            Wff::And(a, b) => Wff::and(a.subst_bound(rank, to), b.subst_bound(rank, to)),
            Wff::Or(a, b) => Wff::or(a.subst_bound(rank, to), b.subst_bound(rank, to)),
            Wff::Exists(r, a) if *r == rank => Wff::exists(*r, a.as_ref().clone()),
            Wff::Forall(r, a) if *r == rank => Wff::forall(*r, a.as_ref().clone()),
            Wff::Exists(r, a) => Wff::exists(*r, a.subst_bound(rank, to)),
            Wff::Forall(r, a) => Wff::forall(*r, a.subst_bound(rank, to)),
        }
    }

    /// True if bound rank `rank` occurs anywhere (free or rebound).
    pub fn mentions_bound(&self, rank: u32) -> bool {
        let mut found = false;
        fn walk(w: &Wff, rank: u32, found: &mut bool) {
            match w {
                Wff::Atom(a) => {
                    if a.args.iter().any(|t| *t == Term::Bound(rank)) {
                        *found = true;
                    }
                }
                Wff::Not(a) => walk(a, rank, found),
                Wff::And(a, b) | Wff::Or(a, b) => {
                    walk(a, rank, found);
                    walk(b, rank, found);
                }
                Wff::Exists(r, a) | Wff::Forall(r, a) => {
                    if *r == rank {
                        *found = true;
                    }
                    walk(a, rank, found);
                }
            }
        }
        walk(self, rank, &mut found);
        found
    }

    /// Checks that every bound variable occurrence is inside a quantifier
    /// for its rank and that no quantifier shadows a rank already in scope.
    pub fn check_closed(&self) -> Result<(), SpecError> {
        fn walk(w: &Wff, scope: &mut Vec<u32>) -> Result<(), SpecError> {
            match w {
                Wff::Atom(a) => {
                    for t in &a.args {
                        if let Term::Bound(r) = t {
                            if !scope.contains(r) {
                                return Err(SpecError::UnboundVar {
                                    name: seq_name(BOUND_LETTERS, *r),
                                });
                            }
                        }
                    }
                    Ok(())
                }
                Wff::Not(a) => walk(a, scope),
                Wff::And(a, b) | Wff::Or(a, b) => {
                    walk(a, scope)?;
                    walk(b, scope)
                }
                Wff::Exists(r, a) | Wff::Forall(r, a) => {
                    if scope.contains(r) {
                        return Err(SpecError::ShadowedVar {
                            name: seq_name(BOUND_LETTERS, *r),
                        });
                    }
                    scope.push(*r);
                    let res = walk(a, scope);
                    scope.pop();
                    res
                }
            }
        }
        walk(self, &mut Vec::new())
    }

    /// Rewrites every `Forall` as `~(exists A)~P`, collapsing a double
    /// negation when the body is already negated.
    pub fn rewrite_foralls(&self) -> Wff {
        match self {
            Wff::Atom(_) => self.clone(),
            Wff::Not(a) => Wff::not(a.rewrite_foralls()),
            Wff::And(a, b) => Wff::and(a.rewrite_foralls(), b.rewrite_foralls()),
            Wff::Or(a, b) => Wff::or(a.rewrite_foralls(), b.rewrite_foralls()),
            Wff::Exists(r, a) => Wff::exists(*r, a.rewrite_foralls()),
            Wff::Forall(r, a) => {
                let body = a.rewrite_foralls();
                let negated = match body {
                    Wff::Not(inner) => *inner,
                    other => Wff::not(other),
                };
                Wff::not(Wff::exists(*r, negated))
            }
        }
    }

    /// Structural equality modulo a consistent renaming of bound ranks.
    pub fn alpha_eq(&self, other: &Wff) -> bool {
        fn walk(a: &Wff, b: &Wff, map: &mut Vec<(u32, u32)>) -> bool {
            match (a, b) {
                (Wff::Atom(x), Wff::Atom(y)) => {
                    x.rel == y.rel
                        && x.args.len() == y.args.len()
                        && x.args.iter().zip(&y.args).all(|(s, t)| match (s, t) {
                            (Term::Bound(r), Term::Bound(q)) => map
                                .iter()
                                .rev()
                                .find(|(from, _)| from == r)
                                .map(|(_, to)| to == q)
                                .unwrap_or(false),
                            _ => s == t,
                        })
                }
                (Wff::Not(x), Wff::Not(y)) => walk(x, y, map),
                (Wff::And(x1, x2), Wff::And(y1, y2)) | (Wff::Or(x1, x2), Wff::Or(y1, y2)) => {
                    walk(x1, y1, map) && walk(x2, y2, map)
                }
                (Wff::Exists(r, x), Wff::Exists(q, y)) | (Wff::Forall(r, x), Wff::Forall(q, y)) => {
                    map.push((*r, *q));
                    let res = walk(x, y, map);
                    map.pop();
                    res
                }
                _ => false,
            }
        }
        walk(self, other, &mut Vec::new())
    }

    /// Classifies the wff as a decide, list or conditional-list spec.
    pub fn classify(&self) -> Result<SpecKind, SpecError> {
        if !self.has_output() {
            return Ok(SpecKind::Decide);
        }
        match self {
            Wff::Atom(_) => Ok(SpecKind::List),
            // The ~LT(I,x) shape of axiom 7: a negation read as a set to list.
            Wff::Not(_) => Ok(SpecKind::List),
            Wff::And(a, b) => match (a.has_output(), b.has_output()) {
                (true, true) => Ok(SpecKind::List),
                (true, false) | (false, true) => Ok(SpecKind::ConditionalList),
                (false, false) => unreachable!("outputs present"),
            },
            Wff::Or(a, b) => {
                if a.has_output() && b.has_output() {
                    Ok(SpecKind::List)
                } else {
                    Err(SpecError::Unclassifiable {
                        spec: self.to_string(),
                        reason: "disjunction with an output-free branch".to_string(),
                    })
                }
            }
            Wff::Exists(_, _) => Ok(SpecKind::List),
            Wff::Forall(_, _) => Err(SpecError::Unclassifiable {
                spec: self.to_string(),
                reason: "output variable under a universal quantifier".to_string(),
            }),
        }
    }
}

// Rendering follows the precedence ~ > ^ > v with both binary operators
// left-associative. A quantifier body extends to the next conjunct
// boundary, so bodies whose top node is ^ or v are parenthesized.
impl fmt::Display for Wff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn unary(w: &Wff, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match w {
                Wff::And(_, _) | Wff::Or(_, _) => write!(f, "({})", w),
                _ => write!(f, "{}", w),
            }
        }
        match self {
            Wff::Atom(a) => {
                write!(f, "{}(", a.rel.name())?;
                for (i, t) in a.args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", t)?;
                }
                write!(f, ")")
            }
            Wff::Not(a) => {
                write!(f, "~")?;
                unary(a, f)
            }
            Wff::And(a, b) => {
                match a.as_ref() {
                    Wff::Or(_, _) => write!(f, "({})", a)?,
                    _ => write!(f, "{}", a)?,
                }
                write!(f, "^")?;
                match b.as_ref() {
                    Wff::And(_, _) | Wff::Or(_, _) => write!(f, "({})", b),
                    _ => write!(f, "{}", b),
                }
            }
            Wff::Or(a, b) => {
                write!(f, "{} v ", a)?;
                match b.as_ref() {
                    Wff::Or(_, _) => write!(f, "({})", b),
                    _ => write!(f, "{}", b),
                }
            }
            Wff::Exists(r, a) => {
                write!(f, "(exists {})", seq_name(BOUND_LETTERS, *r))?;
                unary(a, f)
            }
            Wff::Forall(r, a) => {
                write!(f, "(all {})", seq_name(BOUND_LETTERS, *r))?;
                unary(a, f)
            }
        }
    }
}
