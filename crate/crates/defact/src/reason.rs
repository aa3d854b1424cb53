//! Transition-system semantics over the translated program.
//!
//! A state is a consistent set of fluent expressions; fluents absent from
//! a state are unknown. The transition function projects the answer sets
//! of the depth-bounded ground translation: a successor of state `S` under
//! action `A` is the projection at `Result(A,S')` of any answer set whose
//! projection at `S'` equals `S`. Models are prefix-closed assignments of
//! states to action strings that follow the transition function; a query
//! `L after A1..Al` is entailed when `L` holds in every model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::asp::AnswerSet;
use crate::at::{DomainDescription, FluentExpression, ValueQuery};
use crate::logic::{ground_instantiate, Literal, Plp, Sign, SortedConstants, Term, HOLDS};
use crate::plp::plp_answer_sets;
use crate::translate::{translate_domain, TranslateError, TranslationResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReasonError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("transition function is undefined: the translation has no answer set or an inconsistent one")]
    Undefined,
    #[error("domain has no model")]
    NoModel,
    #[error("no truth-value change of `{fluent}` across `{action}`")]
    NoChangeDetected { fluent: String, action: String },
}

/// A consistent collection of fluent expressions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct State(BTreeSet<FluentExpression>);

impl State {
    pub fn new(exprs: impl IntoIterator<Item = FluentExpression>) -> Option<State> {
        let set: BTreeSet<FluentExpression> = exprs.into_iter().collect();
        let consistent = set.iter().all(|e| !set.contains(&e.complement()));
        consistent.then_some(State(set))
    }

    pub fn contains(&self, e: &FluentExpression) -> bool {
        self.0.contains(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FluentExpression> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A prefix-closed partial map from action strings to states.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Structure {
    pub map: BTreeMap<Vec<String>, State>,
    pub depth: usize,
}

impl Structure {
    pub fn state(&self, actions: &[String]) -> Option<&State> {
        self.map.get(actions)
    }
}

/// A domain grounded at a fixed situation depth, with its answer sets.
pub struct Reasoner {
    pub domain: DomainDescription,
    pub depth: usize,
    pub translation: TranslationResult,
    pub ground: Plp,
    answer_sets: Vec<AnswerSet>,
}

/// Smallest depth that keeps every observation of the domain inside the
/// situation universe.
pub fn min_depth(d: &DomainDescription) -> usize {
    d.propositions
        .iter()
        .filter_map(|p| match &p.kind {
            crate::at::PropositionKind::Observation { after, .. } => Some(after.len()),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

impl Reasoner {
    pub fn new(domain: &DomainDescription, depth: usize) -> Result<Reasoner, ReasonError> {
        let translation = translate_domain(domain)?;
        let constants = SortedConstants {
            fluents: domain.fluents.clone(),
            actions: domain.actions.clone(),
            objects: Vec::new(),
        };
        let ground = ground_instantiate(&translation.plp, &constants, depth)
            .map_err(TranslateError::Logic)?;
        let answer_sets = plp_answer_sets(&ground);
        Ok(Reasoner {
            domain: domain.clone(),
            depth,
            translation,
            ground,
            answer_sets,
        })
    }

    pub fn answer_sets(&self) -> &[AnswerSet] {
        &self.answer_sets
    }

    fn check_defined(&self) -> Result<(), ReasonError> {
        if self.answer_sets.is_empty() || self.answer_sets.iter().any(|s| s.inconsistent) {
            return Err(ReasonError::Undefined);
        }
        Ok(())
    }

    /// The fluent expressions an answer set assigns to one situation term.
    fn project(&self, ans: &AnswerSet, situation: &Term) -> State {
        let mut out = BTreeSet::new();
        for lit in &ans.literals {
            if lit.predicate != HOLDS || lit.args.len() != 2 {
                continue;
            }
            if &lit.args[1] != situation {
                continue;
            }
            if let Term::Const(fluent, _) = &lit.args[0] {
                out.insert(FluentExpression {
                    fluent: fluent.clone(),
                    negated: lit.sign == Sign::Neg,
                });
            }
        }
        State(out)
    }

    fn situations_to(&self, depth: usize) -> Vec<Term> {
        crate::logic::situation_universe(&self.domain.actions, depth)
    }

    /// Initial states: the projection of each answer set at `S0`.
    pub fn initial_states(&self) -> Result<BTreeSet<State>, ReasonError> {
        self.check_defined()?;
        Ok(self
            .answer_sets
            .iter()
            .map(|ans| self.project(ans, &Term::s0()))
            .collect())
    }

    /// Successor states of `state` under `action`: projections one step
    /// past every situation whose projection matches `state`.
    pub fn transition(
        &self,
        action: &str,
        state: &State,
    ) -> Result<BTreeSet<State>, ReasonError> {
        self.check_defined()?;
        let mut out = BTreeSet::new();
        if self.depth == 0 {
            return Ok(out);
        }
        for ans in &self.answer_sets {
            for base in self.situations_to(self.depth - 1) {
                if &self.project(ans, &base) != state {
                    continue;
                }
                let next = Term::result(Term::action(action), base);
                out.insert(self.project(ans, &next));
            }
        }
        Ok(out)
    }

    /// All models up to the grounded depth. Branches where the transition
    /// offers no successor stay undefined.
    pub fn models(&self) -> Result<Vec<Structure>, ReasonError> {
        self.check_defined()?;
        #[derive(Clone)]
        struct Partial {
            map: BTreeMap<Vec<String>, State>,
            undefined: BTreeSet<Vec<String>>,
        }
        let mut done: BTreeSet<Structure> = BTreeSet::new();
        for initial in self.initial_states()? {
            let mut pending = vec![Partial {
                map: BTreeMap::from([(Vec::new(), initial)]),
                undefined: BTreeSet::new(),
            }];
            while let Some(partial) = pending.pop() {
                let frontier = partial.map.iter().find_map(|(prefix, _)| {
                    if prefix.len() >= self.depth {
                        return None;
                    }
                    self.domain
                        .actions
                        .iter()
                        .map(|a| (prefix.clone(), a.clone()))
                        .find(|(p, a)| {
                            let key = extended(p, a);
                            !partial.map.contains_key(&key) && !partial.undefined.contains(&key)
                        })
                });
                let Some((prefix, action)) = frontier else {
                    done.insert(Structure {
                        map: partial.map,
                        depth: self.depth,
                    });
                    continue;
                };
                let key = extended(&prefix, &action);
                let succs = self.transition(&action, &partial.map[&prefix])?;
                if succs.is_empty() {
                    let mut next = partial.clone();
                    next.undefined.insert(key);
                    pending.push(next);
                } else {
                    for succ in succs {
                        let mut next = partial.clone();
                        next.map.insert(key.clone(), succ);
                        pending.push(next);
                    }
                }
            }
        }
        if done.is_empty() {
            return Err(ReasonError::NoModel);
        }
        Ok(done.into_iter().collect())
    }

    /// Whether the query holds in every model.
    pub fn entails(&self, query: &ValueQuery) -> Result<bool, ReasonError> {
        let models = self.models()?;
        Ok(models.iter().all(|m| {
            m.state(&query.after)
                .map(|s| s.contains(&query.what))
                .unwrap_or(false)
        }))
    }

    /// Entailed cause atoms for a truth-value change of `fluent` across
    /// the last action of `path`.
    pub fn explain_change(
        &self,
        fluent: &str,
        path: &[String],
    ) -> Result<CauseReport, ReasonError> {
        let (prefix, action) = match path.split_last() {
            Some((a, p)) => (p, a),
            None => {
                return Err(ReasonError::NoChangeDetected {
                    fluent: fluent.to_string(),
                    action: String::new(),
                })
            }
        };
        let pos = FluentExpression::pos(fluent);
        let neg = FluentExpression::neg(fluent);
        let holds_now = |what: &FluentExpression| {
            self.entails(&ValueQuery {
                what: what.clone(),
                after: path.to_vec(),
            })
        };
        let held_before = |what: &FluentExpression| {
            self.entails(&ValueQuery {
                what: what.clone(),
                after: prefix.to_vec(),
            })
        };

        let became = if holds_now(&pos)? && !held_before(&pos)? {
            Sign::Pos
        } else if holds_now(&neg)? && !held_before(&neg)? {
            Sign::Neg
        } else {
            return Err(ReasonError::NoChangeDetected {
                fluent: fluent.to_string(),
                action: action.clone(),
            });
        };

        let base = prefix.iter().fold(Term::s0(), |sit, a| {
            Term::result(Term::action(a), sit)
        });
        let situation = Term::result(Term::action(action), base);
        let preds = match became {
            Sign::Pos => [
                crate::logic::EFFECT_P,
                crate::logic::CAUSED_P,
                crate::logic::ABEFFECT_P,
            ],
            Sign::Neg => [
                crate::logic::EFFECT_N,
                crate::logic::CAUSED_N,
                crate::logic::ABEFFECT_N,
            ],
        };
        let mut causes = Vec::new();
        for pred in preds {
            let atom = Literal::pos(pred, vec![Term::fluent(fluent), situation.clone()]);
            if self.answer_sets.iter().all(|s| s.contains(&atom)) {
                causes.push(atom.to_string());
            }
        }
        Ok(CauseReport {
            fluent: fluent.to_string(),
            action: action.clone(),
            became,
            causes,
        })
    }
}

fn extended(prefix: &[String], action: &str) -> Vec<String> {
    let mut out = prefix.to_vec();
    out.push(action.to_string());
    out
}

/// Which entailed cause atoms account for a fluent's change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauseReport {
    pub fluent: String,
    pub action: String,
    pub became: Sign,
    pub causes: Vec<String>,
}

impl fmt::Display for CauseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.became {
            Sign::Pos => "true",
            Sign::Neg => "false",
        };
        write!(
            f,
            "{} became {} across {}: {}",
            self.fluent,
            dir,
            self.action,
            if self.causes.is_empty() {
                "no cause atom entailed".to_string()
            } else {
                self.causes.join(", ")
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::at::parse_domain;

    const SWITCH_POWER: &str = "\
domain Switch-Power : AT0.
fluents On, Power, Switch.
actions Cut-Power.
initially On.
initially Power.
initially Switch.
On is caused if Switch with absence -On.
-On is caused if -Power.
Cut-Power causes -Power.
";

    const FIG1: &str = "\
domain Fig1 : AT0.
fluents F1, F2.
actions A1, A2.
initially F1.
F2 is caused if -F1 with absence -F2.
-F2 is caused if -F1 with absence F2.
A1 causes -F1.
A2 causes -F2 if -F1, F2.
";

    const SHOOTING_1: &str = "\
domain Shooting-1 : AT1.
fluents Alive, Loaded.
actions Shoot, Wait.
initially Alive is observed.
initially -Loaded is observed with absence Loaded.
-Alive is observed after Shoot, Wait.
Shoot causes -Alive if Loaded.
";

    fn state(exprs: &[&str]) -> State {
        State::new(exprs.iter().map(|e| match e.strip_prefix('-') {
            Some(f) => FluentExpression::neg(f),
            None => FluentExpression::pos(e),
        }))
        .unwrap()
    }

    fn reasoner(text: &str, depth: usize) -> Reasoner {
        Reasoner::new(&parse_domain(text).unwrap(), depth).unwrap()
    }

    fn query(d: &DomainDescription, text: &str) -> ValueQuery {
        crate::at::parse_query(text, d).unwrap()
    }

    #[test]
    fn switch_power_initial_state_is_unique() {
        let r = reasoner(SWITCH_POWER, 1);
        let init = r.initial_states().unwrap();
        assert_eq!(init, [state(&["On", "Power", "Switch"])].into());
    }

    #[test]
    fn switch_power_transition_matches_example() {
        let r = reasoner(SWITCH_POWER, 1);
        let succ = r
            .transition("Cut-Power", &state(&["On", "Power", "Switch"]))
            .unwrap();
        assert_eq!(succ, [state(&["-On", "-Power", "Switch"])].into());
    }

    #[test]
    fn switch_power_entailments() {
        let r = reasoner(SWITCH_POWER, 1);
        let d = &r.domain.clone();
        for q in ["-Power after Cut-Power", "-On after Cut-Power", "Switch after Cut-Power"] {
            assert!(r.entails(&query(d, q)).unwrap(), "{q}");
        }
        assert!(!r.entails(&query(d, "On after Cut-Power")).unwrap());
    }

    #[test]
    fn fig1_branches_on_the_conflicting_constraints() {
        let r = reasoner(FIG1, 1);
        let succ = r.transition("A1", &state(&["F1"])).unwrap();
        assert_eq!(
            succ,
            [state(&["-F1", "F2"]), state(&["-F1", "-F2"])].into()
        );
        let unchanged = r.transition("A2", &state(&["F1"])).unwrap();
        assert_eq!(unchanged, [state(&["F1"])].into());
        let models = r.models().unwrap();
        assert_eq!(models.len(), 2);
    }

    #[test]
    fn empty_domain_has_single_empty_state() {
        let r = reasoner("domain Empty : AT0.\n", 0);
        assert_eq!(r.initial_states().unwrap(), [State::default()].into());
    }

    #[test]
    fn contradictory_facts_are_undefined() {
        let r = reasoner("domain Bad : AT0.\nfluents F.\ninitially F.\ninitially -F.\n", 0);
        assert_eq!(r.initial_states(), Err(ReasonError::Undefined));
        assert_eq!(r.models(), Err(ReasonError::Undefined));
    }

    #[test]
    fn shooting1_postdiction() {
        let r = reasoner(SHOOTING_1, 2);
        let d = &r.domain.clone();
        assert!(r.entails(&query(d, "-Alive after Shoot")).unwrap());
        assert!(r.entails(&query(d, "initially Loaded")).unwrap());
        assert_eq!(
            r.initial_states().unwrap(),
            [state(&["Alive", "Loaded"])].into()
        );
    }

    #[test]
    fn explain_change_on_switch_power() {
        let r = reasoner(SWITCH_POWER, 1);
        let on = r
            .explain_change("On", &["Cut-Power".to_string()])
            .unwrap();
        assert_eq!(on.became, Sign::Neg);
        assert_eq!(on.causes, vec!["Caused-(On,Result(Cut-Power,S0))".to_string()]);
        let power = r
            .explain_change("Power", &["Cut-Power".to_string()])
            .unwrap();
        assert_eq!(power.causes, vec!["Effect-(Power,Result(Cut-Power,S0))".to_string()]);
        let unchanged = r.explain_change("Switch", &["Cut-Power".to_string()]);
        assert!(matches!(unchanged, Err(ReasonError::NoChangeDetected { .. })));
    }

    #[test]
    fn deeper_horizon_keeps_shallow_answers() {
        for depth in [1, 2] {
            let r = reasoner(SWITCH_POWER, depth);
            let d = &r.domain.clone();
            assert!(r.entails(&query(d, "-On after Cut-Power")).unwrap());
            assert!(r.entails(&query(d, "initially Power")).unwrap());
        }
    }
}
