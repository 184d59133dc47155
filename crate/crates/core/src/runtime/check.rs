use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::Judgment;
use crate::specs::SpecKind;

use super::oracle::{oracle_decide, oracle_list};
use super::{run, Env, Value};

/// How list outputs are compared. `Set` deduplicates the program's
/// outputs first, which is required after UNION since unions may list
/// duplicates; `Multiset` additionally demands each value appear exactly
/// once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompareMode {
    Set,
    Multiset,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Disagreement {
    pub env: String,
    pub expected: String,
    pub actual: String,
}

/// Outcome of a grid check: every environment in the cross-product of the
/// ranges, program output against oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub spec: String,
    pub program: String,
    pub envs_checked: usize,
    pub total_steps: u64,
    pub disagreements: Vec<Disagreement>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.disagreements.is_empty()
    }

    pub fn first_failure(&self) -> Option<&Disagreement> {
        self.disagreements.first()
    }
}

fn envs_for(ranges: &BTreeMap<u32, (u64, u64)>) -> Vec<Env> {
    let mut envs = vec![Env::new()];
    for (&rank, &(lo, hi)) in ranges {
        let mut next = Vec::with_capacity(envs.len() * (hi - lo + 1) as usize);
        for env in &envs {
            for v in lo..=hi {
                let mut e = env.clone();
                e.bind(rank, v).expect("grid values are positive");
                next.push(e);
            }
        }
        envs = next;
    }
    envs
}

/// Checks a judgment over every environment in the grid cross-product.
/// Decide specs compare the single boolean output; list specs compare the
/// output values per `mode`. Interpreter errors count as failures
/// attributed to their environment.
pub fn check_judgment(
    j: &Judgment,
    ranges: &BTreeMap<u32, (u64, u64)>,
    mode: CompareMode,
    oracle_bound: u64,
    step_limit: u64,
) -> Report {
    let kind = j
        .spec
        .classify()
        .expect("check_judgment: classifiable spec");
    for rank in j.spec.input_ranks() {
        assert!(
            ranges.contains_key(&rank),
            "grid must cover input rank {}",
            rank
        );
    }
    let mut report = Report {
        spec: j.spec.to_string(),
        program: j.program.to_string(),
        envs_checked: 0,
        total_steps: 0,
        disagreements: Vec::new(),
    };
    for env in envs_for(ranges) {
        report.envs_checked += 1;
        let result = match run(&j.program, &env, step_limit) {
            Ok(r) => r,
            Err(e) => {
                report.disagreements.push(Disagreement {
                    env: env.to_string(),
                    expected: "successful run".to_string(),
                    actual: format!("error: {}", e),
                });
                continue;
            }
        };
        report.total_steps += result.steps;
        match kind {
            SpecKind::Decide => {
                let expected = oracle_decide(&j.spec, &env, oracle_bound);
                let actual = match result.outputs.as_slice() {
                    [Value::Bool(b)] => Some(*b),
                    _ => None,
                };
                if actual != Some(expected) {
                    report.disagreements.push(Disagreement {
                        env: env.to_string(),
                        expected: Value::Bool(expected).to_string(),
                        actual: format!(
                            "[{}]",
                            result
                                .outputs
                                .iter()
                                .map(|v| v.to_string())
                                .collect::<Vec<_>>()
                                .join(", ")
                        ),
                    });
                }
            }
            SpecKind::List | SpecKind::ConditionalList => {
                let expected = oracle_list(&j.spec, &env, oracle_bound);
                let mut ints = Vec::with_capacity(result.outputs.len());
                let mut bad_value = false;
                for v in &result.outputs {
                    match v {
                        // Zero is not in the universal set; a remainder
                        // lister may echo it without listing it.
                        Value::Int(0) => {}
                        Value::Int(n) => ints.push(*n),
                        Value::Bool(_) => bad_value = true,
                    }
                }
                ints.sort_unstable();
                if mode == CompareMode::Set {
                    ints.dedup();
                }
                if bad_value || ints != expected {
                    report.disagreements.push(Disagreement {
                        env: env.to_string(),
                        expected: format!("{:?}", expected),
                        actual: format!("{:?} (sorted)", ints),
                    });
                }
            }
        }
    }
    report
}

/// Grid `[1..=max]` for every input of the judgment's spec.
pub fn full_ranges(j: &Judgment, max: u64) -> BTreeMap<u32, (u64, u64)> {
    j.spec.input_ranks().into_iter().map(|r| (r, (1, max))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::parse_program;
    use crate::specs::parse_spec;

    fn judgment(program: &str, spec: &str) -> Judgment {
        Judgment {
            program: parse_program(program).unwrap(),
            spec: parse_spec(spec).unwrap(),
        }
    }

    #[test]
    fn between_judgment_has_no_disagreements() {
        let j = judgment("echo ($i<$j)&&($j<$k) ;", "BETW(I,J,K)");
        let report = check_judgment(&j, &full_ranges(&j, 6), CompareMode::Multiset, 64, 100_000);
        assert_eq!(report.envs_checked, 216);
        assert!(report.ok());
    }

    #[test]
    fn broken_program_is_caught() {
        let j = judgment("echo $i<$i ;", "LT(I,J)");
        let report = check_judgment(&j, &full_ranges(&j, 5), CompareMode::Multiset, 64, 100_000);
        // Disagrees exactly where i < j.
        assert_eq!(report.disagreements.len(), 10);
    }

    #[test]
    fn list_judgment_compares_multisets() {
        let j = judgment(
            "for ($a=1;$a<$j;++$a) { if ($i<$a) echo $a; } ;",
            "BETW(I,x,J)",
        );
        let report = check_judgment(&j, &full_ranges(&j, 8), CompareMode::Multiset, 64, 100_000);
        assert!(report.ok(), "{:?}", report.first_failure());
    }

    #[test]
    fn duplicate_outputs_pass_only_in_set_mode() {
        let j = judgment("echo $i ; echo $i ;", "EQ(I,x)");
        let set = check_judgment(&j, &full_ranges(&j, 4), CompareMode::Set, 64, 1000);
        assert!(set.ok());
        let multi = check_judgment(&j, &full_ranges(&j, 4), CompareMode::Multiset, 64, 1000);
        assert!(!multi.ok());
    }

    #[test]
    fn conditional_list_is_empty_when_guard_fails() {
        let j = judgment("{ if ($i<$j) echo $i ; } ;", "LT(I,J)^EQ(I,x)");
        let report = check_judgment(&j, &full_ranges(&j, 6), CompareMode::Multiset, 64, 100_000);
        assert!(report.ok(), "{:?}", report.first_failure());
    }
}
