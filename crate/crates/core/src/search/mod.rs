//! Backward proof search: transforms a goal wff into a derivation by
//! repeatedly replacing the first open specification in a goal list with
//! a stored theorem, an axiom (plus substitution), an inverse rule
//! application with subgoals, or an equivalent spec under a DEF rewrite.

mod corpus;
mod store;

pub use corpus::{bootstrap_theorems, corpus_run, CorpusReport, CorpusRow, EXTRA_SPECS};
pub use store::{StoreError, Theorem, TheoremStore};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{
    axioms, eval_derivation, CalcError, Derivation, DerivationEntry, Judgment,
};
use crate::specs::{
    def_applications, match_axiom, match_spec, DefDirection, DefId, InputBinding, SpecError,
    SpecKind, Term, Wff,
};

/// Search limits and policy knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Maximum number of goal-list entries (and so derivation length).
    pub max_depth: usize,
    /// Maximum consecutive DEF rewrites along one goal's lineage.
    pub max_def_chain: u32,
    /// Allow the EQ expansion on variable arguments as well as literals.
    /// Off by default: expanding every `P(a)` explodes the search; the
    /// literal form is all the corpus needs.
    pub unrestricted_def_eq: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            max_depth: 24,
            max_def_chain: 6,
            unrestricted_def_eq: false,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum SearchError {
    #[error("unsupported specification {spec}: {reason}")]
    Unsupported { spec: String, reason: String },
    #[error("search exhausted for {goal} (dead ends: {frontier:?})")]
    Exhausted { goal: String, frontier: Vec<String> },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

/// An open specification still to be met, with the cycle bookkeeping for
/// its DEF lineage.
#[derive(Debug, Clone)]
pub struct OpenGoal {
    pub wff: Wff,
    def_chain: u32,
    seen: BTreeSet<String>,
}

impl OpenGoal {
    fn root(wff: Wff) -> OpenGoal {
        OpenGoal {
            wff,
            def_chain: 0,
            seen: BTreeSet::new(),
        }
    }

    fn subgoal(wff: Wff) -> OpenGoal {
        OpenGoal::root(wff)
    }

    fn rewritten(&self, wff: Wff) -> OpenGoal {
        let mut seen = self.seen.clone();
        seen.insert(self.wff.to_string());
        OpenGoal {
            wff,
            def_chain: self.def_chain + 1,
            seen,
        }
    }
}

/// A goal-list entry: either a specification to meet or a resolved
/// derivation entry.
#[derive(Debug, Clone)]
pub enum Entry {
    Open(OpenGoal),
    Done(DerivationEntry),
}

impl Entry {
    fn describe(&self) -> String {
        match self {
            Entry::Open(g) => g.wff.to_string(),
            Entry::Done(e) => e.to_string(),
        }
    }
}

/// One way to replace an open goal, in priority order.
#[derive(Debug, Clone)]
pub struct Alternative {
    pub action: String,
    pub replacement: Vec<Entry>,
    next_fresh: u32,
}

/// One accepted replacement in the backward proof.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackwardStep {
    pub step: usize,
    pub action: String,
    /// The full goal list after the replacement.
    pub entries: Vec<String>,
    /// Index range of the entries the step created.
    pub created: (usize, usize),
}

/// A successful synthesis: the derivation, the judgment it evaluates to,
/// and the backward proof steps that found it.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub derivation: Derivation,
    pub judgment: Judgment,
    pub backward_steps: Vec<BackwardStep>,
}

fn drop_identity_pairs(binding: InputBinding) -> InputBinding {
    binding
        .into_iter()
        .filter(|(rank, term)| *term != Term::Input(*rank))
        .collect()
}

fn reference_entries(head: DerivationEntry, binding: InputBinding) -> Vec<Entry> {
    let binding = drop_identity_pairs(binding);
    let mut out = vec![Entry::Done(head)];
    if !binding.is_empty() {
        out.push(Entry::Done(DerivationEntry::Sub(binding)));
    }
    out
}

fn and_comm_fixup() -> Entry {
    Entry::Done(DerivationEntry::Def {
        def: DefId::AndComm,
        path: vec![],
        dir: DefDirection::Forward,
    })
}

// Preference for which conjunct should feed the DO rule as the lister:
// one a stored theorem already lists (earliest first), then one an axiom
// lists, then anything.
fn lister_score(w: &Wff, store: &TheoremStore) -> (u8, usize) {
    for (i, thm) in store.iter().enumerate() {
        if match_spec(w, &thm.judgment.spec).is_some() {
            return (0, i);
        }
    }
    for axiom in axioms() {
        if match_axiom(w, &axiom.judgment.spec).is_some() {
            return (1, axiom.id as usize);
        }
    }
    (2, 0)
}

fn is_decide(w: &Wff) -> bool {
    matches!(w.classify(), Ok(SpecKind::Decide))
}

fn is_lister(w: &Wff) -> bool {
    matches!(
        w.classify(),
        Ok(SpecKind::List) | Ok(SpecKind::ConditionalList)
    )
}

/// Returns the ordered alternatives for one open goal: theorem matches,
/// axiom matches, inverse-rule decompositions fitted to the goal's top
/// connective and kind, then DEF rewrites at any path.
pub fn expand(
    goal: &OpenGoal,
    store: &TheoremStore,
    cfg: &SearchConfig,
    fresh: u32,
) -> Vec<Alternative> {
    let w = &goal.wff;
    let mut out = Vec::new();

    // 1. Stored theorems, insertion order.
    for thm in store.iter() {
        if let Some(binding) = match_spec(w, &thm.judgment.spec) {
            out.push(Alternative {
                action: format!("Use theorem {} for {}", thm.name, w),
                replacement: reference_entries(
                    DerivationEntry::Theorem(thm.name.clone()),
                    binding,
                ),
                next_fresh: fresh,
            });
        }
    }

    // 2. Axioms, id order.
    for axiom in axioms() {
        if let Some(binding) = match_axiom(w, &axiom.judgment.spec) {
            out.push(Alternative {
                action: format!("Use Axiom {} for {}", axiom.id, w),
                replacement: reference_entries(DerivationEntry::Axiom(axiom.id), binding),
                next_fresh: fresh,
            });
        }
    }

    // 3. Inverse rules on the top connective.
    match w {
        Wff::Not(inner) if !w.has_output() && !matches!(inner.as_ref(), Wff::Not(_)) => {
            out.push(Alternative {
                action: format!("Apply inverse of NOT rule to {}", w),
                replacement: vec![
                    Entry::Open(OpenGoal::subgoal(inner.as_ref().clone())),
                    Entry::Done(DerivationEntry::Not),
                ],
                next_fresh: fresh,
            });
        }
        Wff::And(p, q) => {
            let (p, q) = (p.as_ref(), q.as_ref());
            match (p.has_output(), q.has_output()) {
                (false, false) => {
                    out.push(Alternative {
                        action: format!("Apply inverse of AND rule to {}", w),
                        replacement: vec![
                            Entry::Open(OpenGoal::subgoal(p.clone())),
                            Entry::Open(OpenGoal::subgoal(q.clone())),
                            Entry::Done(DerivationEntry::And),
                        ],
                        next_fresh: fresh,
                    });
                    out.push(Alternative {
                        action: format!("Apply inverse of AND rule (commuted) to {}", w),
                        replacement: vec![
                            Entry::Open(OpenGoal::subgoal(q.clone())),
                            Entry::Open(OpenGoal::subgoal(p.clone())),
                            Entry::Done(DerivationEntry::And),
                            and_comm_fixup(),
                        ],
                        next_fresh: fresh,
                    });
                }
                (true, true) => {
                    out.extend(inverse_do(goal, p, q, store, fresh));
                }
                (true, false) => {
                    // Lister first: commute so the decider is M.
                    if is_decide(q) && is_lister(p) {
                        out.push(Alternative {
                            action: format!("Apply inverse of IF rule (commuted) to {}", w),
                            replacement: vec![
                                Entry::Open(OpenGoal::subgoal(q.clone())),
                                Entry::Open(OpenGoal::subgoal(p.clone())),
                                Entry::Done(DerivationEntry::If),
                                and_comm_fixup(),
                            ],
                            next_fresh: fresh,
                        });
                    }
                }
                (false, true) => {
                    if is_decide(p) && is_lister(q) {
                        out.push(Alternative {
                            action: format!("Apply inverse of IF rule to {}", w),
                            replacement: vec![
                                Entry::Open(OpenGoal::subgoal(p.clone())),
                                Entry::Open(OpenGoal::subgoal(q.clone())),
                                Entry::Done(DerivationEntry::If),
                            ],
                            next_fresh: fresh,
                        });
                    }
                }
            }
        }
        Wff::Or(p, q) => {
            if is_lister(p) && is_lister(q) {
                out.push(Alternative {
                    action: format!("Apply inverse of UNION rule to {}", w),
                    replacement: vec![
                        Entry::Open(OpenGoal::subgoal(p.as_ref().clone())),
                        Entry::Open(OpenGoal::subgoal(q.as_ref().clone())),
                        Entry::Done(DerivationEntry::Union),
                    ],
                    next_fresh: fresh,
                });
            }
        }
        Wff::Exists(rank, body) => {
            if !body.has_output() {
                let sub = body.subst_bound(*rank, Term::Output(1));
                if is_lister(&sub) {
                    out.push(Alternative {
                        action: format!("Apply inverse of QUIT rule to {}", w),
                        replacement: vec![
                            Entry::Open(OpenGoal::subgoal(sub)),
                            Entry::Done(DerivationEntry::Quit),
                        ],
                        next_fresh: fresh,
                    });
                }
            }
        }
        _ => {}
    }

    // 4. DEF rewrites anywhere in the tree, cycle- and chain-limited.
    if goal.def_chain < cfg.max_def_chain {
        let here = w.to_string();
        for (def, path, dir, rewritten) in def_applications(w, cfg.unrestricted_def_eq) {
            let key = rewritten.to_string();
            if key == here || goal.seen.contains(&key) {
                continue;
            }
            out.push(Alternative {
                action: format!("Apply DEF {} giving {}", def.name(), rewritten),
                replacement: vec![
                    Entry::Open(goal.rewritten(rewritten)),
                    Entry::Done(DerivationEntry::Def {
                        def,
                        path,
                        dir: dir.flip(),
                    }),
                ],
                next_fresh: fresh,
            });
        }
    }

    out
}

// Inverse DO for a conjunction where both sides mention the output:
// one side stays the lister, the other becomes a decider with the output
// replaced by a fresh input variable. Orientations are tried lister-match
// first; a commuted orientation records the ^-DEF needed for replay.
fn inverse_do(
    goal: &OpenGoal,
    p: &Wff,
    q: &Wff,
    store: &TheoremStore,
    fresh: u32,
) -> Vec<Alternative> {
    let out_ranks = goal.wff.output_ranks();
    if out_ranks.len() != 1 {
        return Vec::new();
    }
    let out_rank = *out_ranks.iter().next().unwrap();
    let target = fresh + 1;

    let mut orientations: Vec<(bool, &Wff, &Wff)> = vec![(false, p, q), (true, q, p)];
    orientations.sort_by_key(|(flipped, lister, _)| (lister_score(lister, store), *flipped));

    let mut out = Vec::new();
    for (flipped, lister, decider) in orientations {
        if !is_lister(lister) {
            continue;
        }
        let decider_goal = decider.subst_output(out_rank, Term::Input(target));
        if !is_decide(&decider_goal) {
            continue;
        }
        let mut replacement = vec![
            Entry::Open(OpenGoal::subgoal(lister.clone())),
            Entry::Open(OpenGoal::subgoal(decider_goal)),
            Entry::Done(DerivationEntry::Do { target }),
        ];
        if flipped {
            replacement.push(and_comm_fixup());
        }
        out.push(Alternative {
            action: format!(
                "Apply inverse of DO rule to {}{}",
                goal.wff,
                if flipped { " (commuted)" } else { "" }
            ),
            replacement,
            next_fresh: target,
        });
    }
    out
}

struct Searcher<'a> {
    cfg: &'a SearchConfig,
    store: &'a TheoremStore,
    frontier: BTreeSet<String>,
    visited: u64,
}

const VISIT_LIMIT: u64 = 2_000_000;

impl<'a> Searcher<'a> {
    fn solve(
        &mut self,
        entries: Vec<Entry>,
        fresh: u32,
        log: &mut Vec<BackwardStep>,
    ) -> Option<Vec<Entry>> {
        if entries.len() > self.cfg.max_depth {
            return None;
        }
        let Some(index) = entries.iter().position(|e| matches!(e, Entry::Open(_))) else {
            return Some(entries);
        };
        self.visited += 1;
        if self.visited > VISIT_LIMIT {
            return None;
        }
        let Entry::Open(goal) = &entries[index] else {
            unreachable!();
        };
        let alternatives = expand(goal, self.store, self.cfg, fresh);
        let goal_text = goal.wff.to_string();
        if alternatives.is_empty() {
            self.note_dead_end(goal_text);
            return None;
        }
        for alt in alternatives {
            let mut next = Vec::with_capacity(entries.len() + alt.replacement.len());
            next.extend_from_slice(&entries[..index]);
            let created = (index, index + alt.replacement.len());
            next.extend(alt.replacement.iter().cloned());
            next.extend_from_slice(&entries[index + 1..]);
            if next.len() > self.cfg.max_depth {
                continue;
            }
            log.push(BackwardStep {
                step: log.len() + 1,
                action: alt.action.clone(),
                entries: next.iter().map(Entry::describe).collect(),
                created,
            });
            if let Some(done) = self.solve(next, alt.next_fresh, log) {
                return Some(done);
            }
            log.pop();
        }
        self.note_dead_end(goal_text);
        None
    }

    fn note_dead_end(&mut self, text: String) {
        if self.frontier.len() < 20 {
            self.frontier.insert(text);
        }
    }
}

fn validate_goal(w: &Wff) -> Result<(), SearchError> {
    w.check_closed()?;
    // A repeated output inside one atom has no discharging rule.
    let mut repeated = false;
    fn walk(w: &Wff, repeated: &mut bool) {
        match w {
            Wff::Atom(a) => {
                for (i, t) in a.args.iter().enumerate() {
                    if matches!(t, Term::Output(_)) && a.args[i + 1..].contains(t) {
                        *repeated = true;
                    }
                }
            }
            Wff::Not(x) | Wff::Exists(_, x) | Wff::Forall(_, x) => walk(x, repeated),
            Wff::And(x, y) | Wff::Or(x, y) => {
                walk(x, repeated);
                walk(y, repeated);
            }
        }
    }
    walk(w, &mut repeated);
    if repeated {
        return Err(SearchError::Unsupported {
            spec: w.to_string(),
            reason: "repeated output variable".to_string(),
        });
    }
    if w.output_ranks().len() > 1 {
        return Err(SearchError::Unsupported {
            spec: w.to_string(),
            reason: "multiple output variables".to_string(),
        });
    }
    w.classify()?;
    Ok(())
}

/// Synthesizes a program for `goal`: returns a derivation that passes
/// `replay_check` together with the judgment it evaluates to. Universal
/// quantifiers are rewritten to `~ exists ~` first. Deterministic for a
/// given config and store.
pub fn synthesize(
    goal: &Wff,
    cfg: &SearchConfig,
    store: &TheoremStore,
) -> Result<Synthesis, SearchError> {
    let rewritten = goal.rewrite_foralls();
    validate_goal(&rewritten)?;
    let fresh_base = rewritten.input_ranks().into_iter().max().unwrap_or(0);
    let mut searcher = Searcher {
        cfg,
        store,
        frontier: BTreeSet::new(),
        visited: 0,
    };
    let mut log = Vec::new();
    let start = vec![Entry::Open(OpenGoal::root(rewritten.clone()))];
    let Some(terminal) = searcher.solve(start, fresh_base, &mut log) else {
        return Err(SearchError::Exhausted {
            goal: rewritten.to_string(),
            frontier: searcher.frontier.into_iter().collect(),
        });
    };
    let entries: Vec<DerivationEntry> = terminal
        .into_iter()
        .map(|e| match e {
            Entry::Done(d) => d,
            Entry::Open(_) => unreachable!("terminal list has no open goals"),
        })
        .collect();
    let derivation = Derivation {
        goal: rewritten,
        entries,
    };
    let judgment = eval_derivation(&derivation, store)?;
    debug_assert!(judgment.spec.alpha_eq(&derivation.goal));
    Ok(Synthesis {
        derivation,
        judgment,
        backward_steps: log,
    })
}

/// Synthesizes and stores the result under `name`.
pub fn synthesize_and_store(
    goal: &Wff,
    cfg: &SearchConfig,
    store: &mut TheoremStore,
    name: &str,
) -> Result<Synthesis, SearchError> {
    let synthesis = synthesize(goal, cfg, store)?;
    if store.get(name).is_none() {
        store
            .insert(Theorem {
                name: name.to_string(),
                judgment: synthesis.judgment.clone(),
                derivation: synthesis.derivation.clone(),
            })
            .expect("fresh synthesis replays");
    }
    Ok(synthesis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::same_text;
    use crate::specs::parse_spec;

    fn p(s: &str) -> Wff {
        parse_spec(s).unwrap()
    }

    fn synth(goal: &str) -> Synthesis {
        let store = TheoremStore::new();
        synthesize(&p(goal), &SearchConfig::default(), &store).unwrap()
    }

    #[test]
    fn expand_offers_inverse_and_for_decide_conjunction() {
        let goal = OpenGoal::root(p("LT(I,J)^LT(J,K)"));
        let alts = expand(&goal, &TheoremStore::new(), &SearchConfig::default(), 3);
        assert!(alts
            .iter()
            .any(|a| a.action.starts_with("Apply inverse of AND")));
    }

    #[test]
    fn expand_offers_inverse_quit_for_existentials() {
        let goal = OpenGoal::root(p("(exists A)PFAC(A,I)"));
        let alts = expand(&goal, &TheoremStore::new(), &SearchConfig::default(), 1);
        let quit = alts
            .iter()
            .find(|a| a.action.starts_with("Apply inverse of QUIT"))
            .expect("quit alternative");
        match &quit.replacement[0] {
            Entry::Open(g) => assert_eq!(g.wff, p("PFAC(x,I)")),
            other => panic!("expected open subgoal, got {:?}", other),
        }
    }

    #[test]
    fn expand_offers_axiom_two_for_equality() {
        let goal = OpenGoal::root(p("EQ(I,J)"));
        let alts = expand(&goal, &TheoremStore::new(), &SearchConfig::default(), 2);
        assert!(alts.iter().any(|a| a.action.starts_with("Use Axiom 2")));
    }

    #[test]
    fn synthesizes_the_between_decider() {
        let s = synth("BETW(I,J,K)");
        assert!(same_text(
            &s.judgment.program.to_string(),
            "echo ($i<$j)&&($j<$k);"
        ));
        assert_eq!(s.derivation.entries.len(), 5);
    }

    #[test]
    fn synthesizes_the_between_lister() {
        let s = synth("BETW(I,x,J)");
        assert!(same_text(
            &s.judgment.program.to_string(),
            "for ($a=1;$a<$j;++$a) { if ($i<$a) echo $a; } ;"
        ));
    }

    #[test]
    fn synthesizes_minimum_of_two() {
        let s = synth("(LT(I,J)^EQ(I,x)) v (~LT(I,J)^EQ(J,x))");
        assert!(same_text(
            &s.judgment.program.to_string(),
            "{if ($i<$j) echo $i;} ; {if (!($i<$j)) echo $j;} ;"
        ));
        assert_eq!(s.derivation.entries.len(), 9);
    }

    #[test]
    fn repeated_output_variable_is_unsupported() {
        let store = TheoremStore::new();
        let err = synthesize(&p("MUL(x,x,I)"), &SearchConfig::default(), &store).unwrap_err();
        match err {
            SearchError::Unsupported { reason, .. } => {
                assert!(reason.contains("repeated output variable"))
            }
            other => panic!("expected unsupported, got {}", other),
        }
    }
}
