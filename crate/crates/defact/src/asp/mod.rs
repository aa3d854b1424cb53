//! Answer-set semantics for ground extended logic programs.
//!
//! `answer_sets` enumerates the stable sets of a finite ground program by
//! branching on the literals that occur under negation as failure, with
//! lower/upper-bound propagation so that near-stratified programs solve
//! without search. The inconsistent answer set (the full literal base) is
//! reported with a flag rather than dropped.

mod strat;

pub use strat::{is_locally_stratified, positive_form, PositiveFormMap, Stratification};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::logic::{Literal, Program, Rule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AspError {
    #[error("program contains negation as failure")]
    NotNafFree,
    #[error("program is not ground")]
    NotGround,
    #[error("constraint `{0}` violated")]
    ConstraintViolated(String),
}

/// A set of ground literals stable under the Gelfond-Lifschitz transform.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AnswerSet {
    pub literals: BTreeSet<Literal>,
    /// True when the set is the whole literal base of the program language.
    pub inconsistent: bool,
}

impl AnswerSet {
    pub fn consistent(literals: BTreeSet<Literal>) -> AnswerSet {
        AnswerSet {
            literals,
            inconsistent: false,
        }
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.inconsistent || self.literals.contains(lit)
    }
}

/// Render solver output as `{"answer_sets":[["lit",...]],"inconsistent":bool}`.
pub fn answer_sets_json(sets: &[AnswerSet]) -> serde_json::Value {
    let rendered: Vec<Vec<String>> = sets
        .iter()
        .map(|s| s.literals.iter().map(|l| l.to_string()).collect())
        .collect();
    serde_json::json!({
        "answer_sets": rendered,
        "inconsistent": sets.iter().any(|s| s.inconsistent),
    })
}

/// The literal base: every literal of the program language and its
/// complement.
pub fn literal_base(program: &Program) -> BTreeSet<Literal> {
    let mut base = BTreeSet::new();
    for rule in program.iter() {
        for lit in rule.literals() {
            base.insert(lit.clone());
            base.insert(lit.complement());
        }
    }
    base
}

/// Least model of a ground naf-free program (clause (ii): a complementary
/// pair collapses the model to the whole literal base).
pub fn least_model(program: &Program) -> Result<AnswerSet, AspError> {
    if !program.is_ground() {
        return Err(AspError::NotGround);
    }
    if program.iter().any(|r| !r.naf.is_empty()) {
        return Err(AspError::NotNafFree);
    }
    let (model, inconsistent) = closure(program.iter().filter(|r| !r.is_constraint()));
    let literals = if inconsistent {
        literal_base(program)
    } else {
        model
    };
    for rule in program.iter().filter(|r| r.is_constraint()) {
        let violated = inconsistent || rule.pos.iter().all(|l| literals.contains(l));
        if violated {
            return Err(AspError::ConstraintViolated(rule.name.clone()));
        }
    }
    Ok(AnswerSet {
        literals,
        inconsistent,
    })
}

/// Forward chaining over naf-free non-constraint rules.
fn closure<'a>(rules: impl Iterator<Item = &'a Rule>) -> (BTreeSet<Literal>, bool) {
    let rules: Vec<&Rule> = rules.collect();
    let mut model = BTreeSet::new();
    loop {
        let mut changed = false;
        for rule in &rules {
            let Some(head) = &rule.head else { continue };
            if model.contains(head) {
                continue;
            }
            if rule.pos.iter().all(|l| model.contains(l)) {
                if model.contains(&head.complement()) {
                    model.insert(head.clone());
                    return (model, true);
                }
                model.insert(head.clone());
                changed = true;
            }
        }
        if !changed {
            return (model, false);
        }
    }
}

/// Gelfond-Lifschitz transform of a ground program with respect to `s`:
/// delete every rule with a naf literal in `s`, strip naf from the rest.
pub fn gl_transform(program: &Program, s: &BTreeSet<Literal>) -> Program {
    let rules = program
        .iter()
        .filter(|r| r.naf.iter().all(|l| !s.contains(l)))
        .map(|r| Rule {
            name: r.name.clone(),
            head: r.head.clone(),
            pos: r.pos.clone(),
            naf: BTreeSet::new(),
        });
    Program::new(rules).expect("names stay unique under rule deletion")
}

/// All answer sets of a finite ground program, in canonical order.
///
/// Candidates are explored by deciding membership of the naf-occurring
/// literals; each leaf is verified against the stability equation
/// `S = least_model(gl_transform(program, S))`. When the program carries a
/// constraint the inconsistent answer set is rejected outright.
pub fn answer_sets(program: &Program) -> Vec<AnswerSet> {
    assert!(program.is_ground(), "answer_sets needs a ground program");
    let naf_lits: Vec<Literal> = {
        let mut set = BTreeSet::new();
        for rule in program.iter() {
            set.extend(rule.naf.iter().cloned());
        }
        set.into_iter().collect()
    };

    let mut found: BTreeSet<AnswerSet> = BTreeSet::new();

    let has_constraint = program.iter().any(|r| r.is_constraint());
    if !has_constraint {
        // The Lit candidate: the transform deletes every rule with a
        // nonempty naf body.
        let core = Program::new(
            program
                .iter()
                .filter(|r| r.naf.is_empty())
                .cloned()
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let (_, inconsistent) = closure(core.iter().filter(|r| !r.is_constraint()));
        if inconsistent {
            found.insert(AnswerSet {
                literals: literal_base(program),
                inconsistent: true,
            });
        }
    }

    let mut state = Assignment {
        decided_in: BTreeSet::new(),
        decided_out: BTreeSet::new(),
    };
    search(program, &naf_lits, &mut state, &mut found);
    found.into_iter().collect()
}

struct Assignment {
    decided_in: BTreeSet<Literal>,
    decided_out: BTreeSet<Literal>,
}

fn search(
    program: &Program,
    naf_lits: &[Literal],
    state: &mut Assignment,
    found: &mut BTreeSet<AnswerSet>,
) {
    if !propagate(program, naf_lits, state) {
        return;
    }
    let undecided = naf_lits
        .iter()
        .find(|l| !state.decided_in.contains(l) && !state.decided_out.contains(l));
    match undecided {
        None => {
            if let Some(set) = verify_leaf(program, naf_lits, state) {
                found.insert(set);
            }
        }
        Some(lit) => {
            let lit = lit.clone();
            let saved_in = state.decided_in.clone();
            let saved_out = state.decided_out.clone();

            state.decided_out.insert(lit.clone());
            search(program, naf_lits, state, found);
            state.decided_in = saved_in.clone();
            state.decided_out = saved_out.clone();

            state.decided_in.insert(lit);
            search(program, naf_lits, state, found);
            state.decided_in = saved_in;
            state.decided_out = saved_out;
        }
    }
}

/// Close the assignment under two sound deductions: literals derivable from
/// rules whose naf body is fully decided out must be in, and naf literals
/// outside the optimistic upper bound must be out. Returns false on
/// conflict.
fn propagate(program: &Program, naf_lits: &[Literal], state: &mut Assignment) -> bool {
    loop {
        // Lower bound: rules that fire no matter how the rest is decided.
        let lower_rules: Vec<&Rule> = program
            .iter()
            .filter(|r| !r.is_constraint())
            .filter(|r| r.naf.iter().all(|l| state.decided_out.contains(l)))
            .collect();
        let (lower, lower_inconsistent) = closure(lower_rules.into_iter());
        if lower_inconsistent {
            // Any compatible stable set would be inconsistent; the Lit
            // candidate is handled separately.
            return false;
        }
        // Upper bound: everything derivable if every undecided naf test
        // succeeds.
        let upper_rules: Vec<&Rule> = program
            .iter()
            .filter(|r| !r.is_constraint())
            .filter(|r| r.naf.iter().all(|l| !state.decided_in.contains(l)))
            .collect();
        let (upper, upper_inconsistent) = closure(upper_rules.into_iter());

        let mut changed = false;
        for lit in naf_lits {
            let decided =
                state.decided_in.contains(lit) || state.decided_out.contains(lit);
            if decided {
                continue;
            }
            if lower.contains(lit) {
                state.decided_in.insert(lit.clone());
                changed = true;
            } else if !upper_inconsistent && !upper.contains(lit) {
                state.decided_out.insert(lit.clone());
                changed = true;
            }
        }
        for lit in &state.decided_in {
            if state.decided_out.contains(lit) {
                return false;
            }
            if !upper_inconsistent && !upper.contains(lit) {
                return false;
            }
        }
        if state.decided_out.iter().any(|l| lower.contains(l)) {
            return false;
        }
        if !changed {
            return true;
        }
    }
}

fn verify_leaf(
    program: &Program,
    naf_lits: &[Literal],
    state: &Assignment,
) -> Option<AnswerSet> {
    let kept: Vec<&Rule> = program
        .iter()
        .filter(|r| r.naf.iter().all(|l| !state.decided_in.contains(l)))
        .collect();
    let (model, inconsistent) = closure(kept.iter().copied().filter(|r| !r.is_constraint()));
    if inconsistent {
        // An inconsistent stable set must be the whole literal base, which
        // is handled once as the Lit candidate.
        return None;
    }
    for lit in naf_lits {
        let in_model = model.contains(lit);
        let assumed_in = state.decided_in.contains(lit);
        if in_model != assumed_in {
            return None;
        }
    }
    for rule in kept.iter().filter(|r| r.is_constraint()) {
        if rule.pos.iter().all(|l| model.contains(l)) {
            return None;
        }
    }
    Some(AnswerSet::consistent(model))
}
