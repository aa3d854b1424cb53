//! Depth-bounded ground instantiation.
//!
//! Situation terms are generated as `Result(A, S)` chains from `S0` up to
//! the requested nesting depth. Instances that mention a deeper situation
//! term are dropped, which keeps every ground program finite.

use std::collections::BTreeMap;

use super::{
    check_well_formed, is_instance_of, LogicError, Order, Plp, Program, Rule, Sort, Term,
    WellFormed,
};

/// Per-sort constant universes used when instantiating variables.
#[derive(Clone, Debug, Default)]
pub struct SortedConstants {
    pub fluents: Vec<String>,
    pub actions: Vec<String>,
    pub objects: Vec<String>,
}

impl SortedConstants {
    /// Collect constants occurring in the program, bucketed by sort.
    pub fn from_program(program: &Program) -> SortedConstants {
        let mut out = SortedConstants::default();
        for rule in program.iter() {
            for lit in rule.literals() {
                for term in &lit.args {
                    collect(term, &mut out);
                }
            }
        }
        out.fluents.sort();
        out.fluents.dedup();
        out.actions.sort();
        out.actions.dedup();
        out.objects.sort();
        out.objects.dedup();
        out
    }
}

fn collect(term: &Term, out: &mut SortedConstants) {
    match term {
        Term::Const(name, sort) => match sort {
            Sort::Fluent => out.fluents.push(name.clone()),
            Sort::Action => out.actions.push(name.clone()),
            Sort::Object => out.objects.push(name.clone()),
            Sort::Situation => {}
        },
        Term::Var(..) => {}
        Term::App(_, args) => {
            for a in args {
                collect(a, out);
            }
        }
    }
}

/// All situation terms of nesting depth at most `depth`.
pub fn situation_universe(actions: &[String], depth: usize) -> Vec<Term> {
    let mut all = vec![Term::s0()];
    let mut frontier = vec![Term::s0()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for s in &frontier {
            for a in actions {
                next.push(Term::result(Term::action(a), s.clone()));
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

fn max_situation_depth(rule: &Rule) -> usize {
    rule.literals()
        .flat_map(|l| l.args.iter())
        .map(term_situation_depth)
        .max()
        .unwrap_or(0)
}

fn term_situation_depth(term: &Term) -> usize {
    match term {
        Term::App(f, args) if f == super::RESULT => {
            args.iter().map(term_situation_depth).max().unwrap_or(0) + 1
        }
        Term::App(_, args) => args.iter().map(term_situation_depth).max().unwrap_or(0),
        _ => term.situation_depth(),
    }
}

/// Ground instantiation of a PLP over the given universes.
///
/// Every non-ground rule is replaced by all its instances; the order is
/// lifted so that a ground pair is present exactly when some original
/// ordered pair subsumes it. Fails when the input is not well formed.
pub fn ground_instantiate(
    plp: &Plp,
    constants: &SortedConstants,
    situation_depth: usize,
) -> Result<Plp, LogicError> {
    if let WellFormed::Violation {
        more_preferred,
        less_preferred,
        shared_instance,
    } = check_well_formed(plp)
    {
        return Err(LogicError::NotWellFormed {
            more: more_preferred,
            less: less_preferred,
            instance: shared_instance.to_string(),
        });
    }

    let situations = situation_universe(&constants.actions, situation_depth);
    let mut ground_rules: Vec<Rule> = Vec::new();
    // ground rule index -> original rule name
    let mut origin: Vec<String> = Vec::new();

    for rule in plp.program.iter() {
        if rule.is_ground() {
            if max_situation_depth(rule) <= situation_depth {
                ground_rules.push(rule.clone());
                origin.push(rule.name.clone());
            }
            continue;
        }
        let vars: Vec<(String, Sort)> = rule.variables().into_iter().collect();
        let mut assignments: Vec<BTreeMap<String, Term>> = vec![BTreeMap::new()];
        for (var, sort) in &vars {
            let universe: Vec<Term> = match sort {
                Sort::Situation => situations.clone(),
                Sort::Action => constants.actions.iter().map(|a| Term::action(a)).collect(),
                Sort::Fluent => constants.fluents.iter().map(|f| Term::fluent(f)).collect(),
                Sort::Object => constants.objects.iter().map(|o| Term::object(o)).collect(),
            };
            let mut next = Vec::new();
            for base in &assignments {
                for value in &universe {
                    let mut ext = base.clone();
                    ext.insert(var.clone(), value.clone());
                    next.push(ext);
                }
            }
            assignments = next;
        }
        for subst in assignments {
            let name = instance_name(&rule.name, &subst);
            let inst = rule.apply(name, &subst);
            if max_situation_depth(&inst) <= situation_depth {
                ground_rules.push(inst);
                origin.push(rule.name.clone());
            }
        }
    }

    // Which original rules does each ground rule instantiate? Needed for
    // order lifting: a ground pair exists iff some original ordered pair
    // subsumes it.
    let originals: Vec<&Rule> = plp.program.iter().collect();
    let mut instantiates: Vec<Vec<&str>> = Vec::with_capacity(ground_rules.len());
    for (idx, g) in ground_rules.iter().enumerate() {
        let mut of = Vec::new();
        for orig in &originals {
            if orig.name == origin[idx] || is_instance_of(g, orig) {
                of.push(orig.name.as_str());
            }
        }
        instantiates.push(of);
    }

    let mut lifted = Order::new();
    for (i, gi) in ground_rules.iter().enumerate() {
        for (j, gj) in ground_rules.iter().enumerate() {
            if i == j {
                continue;
            }
            let ordered = instantiates[i].iter().any(|a| {
                instantiates[j]
                    .iter()
                    .any(|b| plp.order.contains(&(a.to_string(), b.to_string())))
            });
            if ordered {
                lifted.insert((gi.name.clone(), gj.name.clone()));
            }
        }
    }

    let program = Program::new(ground_rules)?;
    Plp::new(program, lifted)
}

fn instance_name(base: &str, subst: &BTreeMap<String, Term>) -> String {
    let parts: Vec<String> = subst.iter().map(|(v, t)| format!("{v}={t}")).collect();
    format!("{base}[{}]", parts.join(","))
}
