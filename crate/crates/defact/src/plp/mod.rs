//! Evaluation of prioritized logic programs: defeat, the preference
//! partition, reduct enumeration and answer sets.
//!
//! A reduct is reached by repeatedly eliminating a nonempty set of rules
//! such that (a) some strictly more preferred rule exists for the whole
//! set and the set is defeated by the remaining program, and (b) no
//! eliminable alternative reaching strictly less preferred rules exists.
//! Elimination works bottom-up over the preference partition: candidates
//! that reach deeper into the less-preferred end of the order take
//! precedence, which resolves ties between same-class conflicts in favour
//! of whichever elimination also disposes of less-preferred rules.
//! Several incomparable candidates fork the search, so a program can have
//! more than one reduct.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use thiserror::Error;

use crate::asp::{answer_sets, AnswerSet};
use crate::logic::{Literal, Plp, Program, Rule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlpError {
    #[error("program has no answer set")]
    NoAnswerSet,
}

/// Whether `rule` is defeated by `program`: the program has an answer set
/// and every answer set contains some literal from the rule's naf body.
pub fn is_defeated(rule: &Rule, program: &Program) -> bool {
    let sets = answer_sets(program);
    if sets.is_empty() {
        return false;
    }
    sets.iter()
        .all(|s| rule.naf.iter().any(|l| s.contains(l)))
}

/// Preference partition: disjoint strata covering the program, each rule
/// preceded only by rules in strictly earlier strata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub strata: Vec<BTreeSet<String>>,
}

/// Partition the program along the preference order: stratum one holds the
/// rules without a more preferred rule, and every later stratum holds the
/// rules whose more preferred rules all sit in earlier strata.
pub fn partition(plp: &Plp) -> Partition {
    let names: Vec<String> = plp.program.iter().map(|r| r.name.clone()).collect();
    let preds: BTreeMap<&str, BTreeSet<&str>> = names
        .iter()
        .map(|n| {
            let p = plp
                .order
                .iter()
                .filter(|(_, b)| b == n)
                .map(|(a, _)| a.as_str())
                .collect();
            (n.as_str(), p)
        })
        .collect();

    let mut placed: BTreeSet<String> = BTreeSet::new();
    let mut strata = Vec::new();
    while placed.len() < names.len() {
        let stratum: BTreeSet<String> = names
            .iter()
            .filter(|n| !placed.contains(n.as_str()))
            .filter(|n| preds[n.as_str()].iter().all(|p| placed.contains(*p)))
            .cloned()
            .collect();
        assert!(!stratum.is_empty(), "strict partial order always stratifies");
        placed.extend(stratum.iter().cloned());
        strata.push(stratum);
    }
    Partition { strata }
}

/// A reduct: the order-free program left after eliminating defeated rules,
/// together with the eliminated sets in elimination order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduct {
    pub rules: Program,
    pub trace: Vec<BTreeSet<String>>,
}

/// All reducts of a ground PLP, in canonical order.
pub fn reducts(plp: &Plp) -> Vec<Reduct> {
    Engine::new(plp).run()
}

/// Answer sets of a ground PLP: the union of the answer sets of its
/// reducts, deduplicated and canonically ordered.
pub fn plp_answer_sets(plp: &Plp) -> Vec<AnswerSet> {
    let mut out: BTreeSet<AnswerSet> = BTreeSet::new();
    for reduct in reducts(plp) {
        out.extend(answer_sets(&reduct.rules));
    }
    out.into_iter().collect()
}

/// Whether the literal belongs to every answer set of the PLP.
pub fn plp_entails(plp: &Plp, literal: &Literal) -> Result<bool, PlpError> {
    let sets = plp_answer_sets(plp);
    if sets.is_empty() {
        return Err(PlpError::NoAnswerSet);
    }
    Ok(sets.iter().all(|s| s.contains(literal)))
}

/// `{"reducts":[{"rules":[...],"eliminated":[[...],...]}],"answer_sets":[...]}`.
pub fn report_json(plp: &Plp) -> serde_json::Value {
    let rs = reducts(plp);
    let mut sets: BTreeSet<AnswerSet> = BTreeSet::new();
    let reducts_json: Vec<serde_json::Value> = rs
        .iter()
        .map(|r| {
            sets.extend(answer_sets(&r.rules));
            serde_json::json!({
                "rules": r.rules.iter().map(|rule| rule.name.clone()).collect::<Vec<_>>(),
                "eliminated": r.trace.iter()
                    .map(|set| set.iter().cloned().collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    let sets: Vec<AnswerSet> = sets.into_iter().collect();
    serde_json::json!({
        "reducts": reducts_json,
        "answer_sets": sets.iter()
            .map(|s| s.literals.iter().map(|l| l.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

/// Rule sets are handled as sorted id vectors; answer sets of subprograms
/// are cached because defeat checks solve many overlapping remainders.
struct Engine<'a> {
    rules: Vec<&'a Rule>,
    /// ids of strictly more preferred rules, per rule
    preds: Vec<BTreeSet<usize>>,
    /// rules that may be eliminated at all: named in the order as the less
    /// preferred side, nonempty naf body, not a constraint
    eligible: Vec<bool>,
    solve_cache: RefCell<BTreeMap<Vec<usize>, Rc<Vec<AnswerSet>>>>,
}

const EXHAUSTIVE_LIMIT: usize = 10;

type RuleSet = BTreeSet<usize>;

impl<'a> Engine<'a> {
    fn new(plp: &'a Plp) -> Engine<'a> {
        let rules: Vec<&Rule> = plp.program.iter().collect();
        let id: BTreeMap<&str, usize> = rules
            .iter()
            .enumerate()
            .map(|(i, r)| (r.name.as_str(), i))
            .collect();
        let mut preds = vec![BTreeSet::new(); rules.len()];
        for (a, b) in &plp.order {
            if let (Some(&ia), Some(&ib)) = (id.get(a.as_str()), id.get(b.as_str())) {
                preds[ib].insert(ia);
            }
        }
        let eligible = rules
            .iter()
            .enumerate()
            .map(|(i, r)| !preds[i].is_empty() && !r.naf.is_empty() && !r.is_constraint())
            .collect();
        Engine {
            rules,
            preds,
            eligible,
            solve_cache: RefCell::new(BTreeMap::new()),
        }
    }

    fn run(&self) -> Vec<Reduct> {
        let all: RuleSet = (0..self.rules.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut fixpoints: BTreeMap<Vec<usize>, Vec<BTreeSet<String>>> = BTreeMap::new();
        let mut stack = vec![(all, Vec::new())];
        while let Some((cur, trace)) = stack.pop() {
            let key: Vec<usize> = cur.iter().copied().collect();
            if !seen.insert(key.clone()) {
                continue;
            }
            let candidates = self.admissible_eliminations(&cur);
            if candidates.is_empty() {
                fixpoints.entry(key).or_insert(trace);
                continue;
            }
            for set in candidates {
                let next: RuleSet = cur.difference(&set).copied().collect();
                let mut next_trace = trace.clone();
                next_trace.push(set.iter().map(|&i| self.rules[i].name.clone()).collect());
                stack.push((next, next_trace));
            }
        }
        fixpoints
            .into_iter()
            .map(|(ids, trace)| Reduct {
                rules: Program::new(ids.iter().map(|&i| self.rules[i].clone())).unwrap(),
                trace,
            })
            .collect()
    }

    fn solve(&self, set: &RuleSet) -> Rc<Vec<AnswerSet>> {
        let key: Vec<usize> = set.iter().copied().collect();
        if let Some(hit) = self.solve_cache.borrow().get(&key) {
            return Rc::clone(hit);
        }
        let program = Program::new(key.iter().map(|&i| self.rules[i].clone())).unwrap();
        let sets = Rc::new(answer_sets(&program));
        self.solve_cache
            .borrow_mut()
            .insert(key, Rc::clone(&sets));
        sets
    }

    /// Every rule in `set` is defeated by `cur` minus `set`.
    fn jointly_defeated(&self, set: &RuleSet, cur: &RuleSet) -> bool {
        let remainder: RuleSet = cur.difference(set).copied().collect();
        let answers = self.solve(&remainder);
        if answers.is_empty() {
            return false;
        }
        set.iter().all(|&i| {
            answers
                .iter()
                .all(|s| self.rules[i].naf.iter().any(|l| s.contains(l)))
        })
    }

    /// A witness more preferred than every member, still present after the
    /// elimination.
    fn has_common_witness(&self, set: &RuleSet, cur: &RuleSet) -> bool {
        let mut iter = set.iter();
        let Some(&first) = iter.next() else {
            return false;
        };
        let mut common: RuleSet = self.preds[first].clone();
        for &i in iter {
            common = common.intersection(&self.preds[i]).copied().collect();
            if common.is_empty() {
                return false;
            }
        }
        common.iter().any(|w| cur.contains(w) && !set.contains(w))
    }

    fn admissible_eliminations(&self, cur: &RuleSet) -> Vec<RuleSet> {
        let family = self.candidate_family(cur);
        // Condition (b): an elimination is blocked while an alternative
        // one reaches rules strictly less preferred than its own members.
        let survivors: Vec<&RuleSet> = family
            .iter()
            .filter(|set| {
                !family.iter().any(|other| {
                    *other != **set
                        && other.iter().any(|&o| {
                            !set.contains(&o)
                                && set.iter().any(|&e| self.preds[o].contains(&e))
                        })
                })
            })
            .collect();
        // branch only on inclusion-maximal survivors
        survivors
            .iter()
            .filter(|set| {
                !survivors
                    .iter()
                    .any(|other| **set != **other && set.is_subset(other))
            })
            .map(|s| (*s).clone())
            .collect()
    }

    /// Eliminable sets discovered from the current program: exhaustively
    /// for small programs, otherwise by growing each defeated seed rule
    /// into a maximal jointly defeated set.
    fn candidate_family(&self, cur: &RuleSet) -> Vec<RuleSet> {
        let eligible: Vec<usize> = cur
            .iter()
            .copied()
            .filter(|&i| self.eligible[i] && self.preds[i].iter().any(|p| cur.contains(p)))
            .collect();
        if eligible.is_empty() {
            return Vec::new();
        }

        let mut family: BTreeSet<RuleSet> = BTreeSet::new();
        if eligible.len() <= EXHAUSTIVE_LIMIT {
            for mask in 1u32..(1 << eligible.len()) {
                let set: RuleSet = eligible
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask & (1 << bit) != 0)
                    .map(|(_, &i)| i)
                    .collect();
                if self.has_common_witness(&set, cur) && self.jointly_defeated(&set, cur) {
                    family.insert(set);
                }
            }
        } else {
            for &seed in &eligible {
                let seed_set: RuleSet = [seed].into();
                if !self.has_common_witness(&seed_set, cur)
                    || !self.jointly_defeated(&seed_set, cur)
                {
                    continue;
                }
                family.insert(seed_set.clone());
                let mut grown = seed_set;
                loop {
                    let mut extended = false;
                    for &next in &eligible {
                        if grown.contains(&next) {
                            continue;
                        }
                        let mut attempt = grown.clone();
                        attempt.insert(next);
                        if self.has_common_witness(&attempt, cur)
                            && self.jointly_defeated(&attempt, cur)
                        {
                            grown = attempt;
                            extended = true;
                        }
                    }
                    if !extended {
                        break;
                    }
                }
                family.insert(grown);
            }
        }
        family.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_program;

    const P1: &str = "\
N1: Fly(Tweety) <- Bird(Tweety), not -Fly(Tweety).
N2: -Fly(Tweety) <- Penguin(Tweety), not Fly(Tweety).
N3: Bird(Tweety).
N4: Penguin(Tweety).
order { N2 < N1. }
";

    const P2: &str = "\
N1: A.
N2: B <- not C.
N3: D.
N4: C <- not B.
order { N1 < N2. N3 < N4. }
";

    const P3: &str = "\
N1: A <- not B, not C.
N2: B <- not -C.
N3: C <- not A, not -C.
N4: -C <- not C.
order { N1 < N2. N2 < N4. N3 < N4. }
";

    fn plp(text: &str) -> Plp {
        parse_program(text).unwrap()
    }

    fn lit(name: &str) -> Literal {
        Literal::pos(name, vec![])
    }

    fn set_names(sets: &[AnswerSet]) -> Vec<BTreeSet<String>> {
        sets.iter()
            .map(|s| s.literals.iter().map(|l| l.to_string()).collect())
            .collect()
    }

    #[test]
    fn defeat_of_tweety_default() {
        let p = plp(P1);
        let n1 = p.program.get("N1").unwrap().clone();
        let remainder = Program::new(
            p.program.iter().filter(|r| r.name != "N1").cloned().collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(is_defeated(&n1, &remainder));
    }

    #[test]
    fn empty_naf_body_is_never_defeated() {
        let p = plp("N1: A.\nN2: B.\n");
        let fact = p.program.get("N1").unwrap().clone();
        assert!(!is_defeated(&fact, &p.program));
    }

    #[test]
    fn no_answer_set_means_no_defeat() {
        let odd = plp("N1: A <- not A.\n").program;
        let rule = parse_program("R: B <- not A.\n")
            .unwrap()
            .program
            .get("R")
            .unwrap()
            .clone();
        assert!(!is_defeated(&rule, &odd));
    }

    #[test]
    fn p3_partition_matches_construction() {
        let part = partition(&plp(P3));
        let as_names: Vec<Vec<&str>> = part
            .strata
            .iter()
            .map(|s| s.iter().map(|n| n.as_str()).collect())
            .collect();
        assert_eq!(as_names, vec![vec!["N1", "N3"], vec!["N2"], vec!["N4"]]);
    }

    #[test]
    fn p2_partition_has_two_strata() {
        let part = partition(&plp(P2));
        let as_names: Vec<Vec<&str>> = part
            .strata
            .iter()
            .map(|s| s.iter().map(|n| n.as_str()).collect())
            .collect();
        assert_eq!(as_names, vec![vec!["N1", "N3"], vec!["N2", "N4"]]);
    }

    #[test]
    fn empty_order_gives_single_stratum() {
        let part = partition(&plp("N1: A.\nN2: B <- not A.\n"));
        assert_eq!(part.strata.len(), 1);
    }

    #[test]
    fn partition_satisfies_both_conditions() {
        for text in [P1, P2, P3] {
            let p = plp(text);
            let part = partition(&p);
            let stratum_of = |name: &str| {
                part.strata
                    .iter()
                    .position(|s| s.contains(name))
                    .expect("partition covers the program")
            };
            for (a, b) in &p.order {
                assert!(stratum_of(a) < stratum_of(b));
            }
            for (j, stratum) in part.strata.iter().enumerate().skip(1) {
                for name in stratum {
                    assert!(p.order.iter().any(|(a, b)| {
                        b == name && stratum_of(a) < j
                    }));
                }
            }
        }
    }

    #[test]
    fn p1_has_unique_reduct_without_n1() {
        let rs = reducts(&plp(P1));
        assert_eq!(rs.len(), 1);
        let names = rs[0].rules.names();
        assert_eq!(
            names.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            vec!["N2", "N3", "N4"]
        );
        assert_eq!(rs[0].trace, vec![["N1".to_string()].into()]);
    }

    #[test]
    fn p2_has_two_reducts() {
        let rs = reducts(&plp(P2));
        let name_sets: Vec<Vec<&str>> = rs
            .iter()
            .map(|r| r.rules.iter().map(|rule| rule.name.as_str()).collect())
            .collect();
        assert_eq!(
            name_sets,
            vec![vec!["N1", "N2", "N3"], vec!["N1", "N3", "N4"]]
        );
    }

    #[test]
    fn order_free_plp_reduces_to_itself() {
        let p = plp("N1: A <- not B.\nN2: B <- not A.\n");
        let rs = reducts(&p);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].rules, p.program);
        assert!(rs[0].trace.is_empty());
    }

    // Adding N3 < N2 to the Tweety program must not let the bird fly: the
    // less preferred eliminable rule N1 goes first.
    #[test]
    fn less_preferred_elimination_takes_precedence() {
        let text = "\
N1: Fly(Tweety) <- Bird(Tweety), not -Fly(Tweety).
N2: -Fly(Tweety) <- Penguin(Tweety), not Fly(Tweety).
N3: Bird(Tweety).
N4: Penguin(Tweety).
order { N2 < N1. N3 < N2. }
";
        let rs = reducts(&plp(text));
        assert_eq!(rs.len(), 1);
        assert!(rs[0].rules.get("N2").is_some());
        assert!(rs[0].rules.get("N1").is_none());
        let sets = plp_answer_sets(&plp(text));
        assert!(sets[0].contains(&Literal::neg("Fly", vec![crate::logic::Term::object("Tweety")])));
    }

    #[test]
    fn p1_answer_set_is_example_set() {
        let sets = plp_answer_sets(&plp(P1));
        assert_eq!(
            set_names(&sets),
            vec![["Bird(Tweety)", "Penguin(Tweety)", "-Fly(Tweety)"]
                .iter()
                .map(|s| s.to_string())
                .collect::<BTreeSet<_>>()]
        );
    }

    #[test]
    fn p2_answer_sets_match_example() {
        let sets = plp_answer_sets(&plp(P2));
        assert_eq!(
            set_names(&sets),
            vec![
                ["A", "B", "D"].iter().map(|s| s.to_string()).collect::<BTreeSet<_>>(),
                ["A", "C", "D"].iter().map(|s| s.to_string()).collect::<BTreeSet<_>>(),
            ]
        );
    }

    #[test]
    fn p3_answer_set_is_unique() {
        let sets = plp_answer_sets(&plp(P3));
        assert_eq!(
            set_names(&sets),
            vec![["B", "C"].iter().map(|s| s.to_string()).collect::<BTreeSet<_>>()]
        );
    }

    #[test]
    fn entailment_on_p2() {
        let p = plp(P2);
        assert!(plp_entails(&p, &lit("A")).unwrap());
        assert!(!plp_entails(&p, &lit("B")).unwrap());
        assert!(plp_entails(&plp(P3), &lit("C")).unwrap());
    }

    #[test]
    fn entailment_without_answer_sets_errors() {
        let p = plp("N1: A <- not A.\n");
        assert_eq!(plp_entails(&p, &lit("A")), Err(PlpError::NoAnswerSet));
    }

    #[test]
    fn empty_order_answer_sets_match_plain_solver() {
        let p = plp("N1: A <- not B.\nN2: B <- not A.\nN3: C.\n");
        assert_eq!(plp_answer_sets(&p), answer_sets(&p.program));
    }

    #[test]
    fn traces_replay_defeat_conditions() {
        for text in [P1, P2, P3] {
            let p = plp(text);
            for reduct in reducts(&p) {
                let mut cur: BTreeSet<String> = p.program.names();
                for step in &reduct.trace {
                    let remainder: Vec<Rule> = p
                        .program
                        .iter()
                        .filter(|r| cur.contains(&r.name) && !step.contains(&r.name))
                        .cloned()
                        .collect();
                    let remainder = Program::new(remainder).unwrap();
                    for name in step {
                        let rule = p.program.get(name).unwrap();
                        assert!(is_defeated(rule, &remainder), "{name} in {text}");
                        assert!(p.order.iter().any(|(a, b)| b == name && cur.contains(a)));
                    }
                    for name in step {
                        cur.remove(name);
                    }
                }
                assert_eq!(cur, reduct.rules.names());
            }
        }
    }
}
