//! Syntax and ground instantiation for extended logic programs and
//! prioritized logic programs (PLPs).
//!
//! A PLP is an extended logic program together with an injective naming
//! function and a strict partial order on rule names. The order is kept
//! transitively closed; `close_order` rejects cycles. `ground_instantiate`
//! replaces every non-ground rule by its instances over per-sort constant
//! universes, with situation terms generated as `Result` chains from `S0`
//! up to a caller-supplied nesting depth so that all downstream fixpoints
//! stay finite.

mod ground;
mod text;

pub use ground::{ground_instantiate, situation_universe, SortedConstants};
pub use text::{
    parse_program, parse_rule, render_program, TextError, AB, ABEFFECT_N, ABEFFECT_P,
    CAUSED_N, CAUSED_P, EFFECT_N, EFFECT_P, HOLDS,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Reserved situation constant.
pub const S0: &str = "S0";
/// The only function symbol allowed in translated programs.
pub const RESULT: &str = "Result";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Sort {
    Situation,
    Action,
    Fluent,
    Object,
}

impl Sort {
    /// Variable sorts follow the f/a/s naming convention; anything else is
    /// an object variable.
    pub fn of_variable(name: &str) -> Sort {
        match name.chars().next() {
            Some('s') => Sort::Situation,
            Some('a') => Sort::Action,
            Some('f') => Sort::Fluent,
            _ => Sort::Object,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String, Sort),
    Var(String, Sort),
    App(String, Vec<Term>),
}

impl Term {
    pub fn situation_const(name: &str) -> Term {
        Term::Const(name.to_string(), Sort::Situation)
    }

    pub fn action(name: &str) -> Term {
        Term::Const(name.to_string(), Sort::Action)
    }

    pub fn fluent(name: &str) -> Term {
        Term::Const(name.to_string(), Sort::Fluent)
    }

    pub fn object(name: &str) -> Term {
        Term::Const(name.to_string(), Sort::Object)
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string(), Sort::of_variable(name))
    }

    /// `Result(action, situation)`.
    pub fn result(action: Term, situation: Term) -> Term {
        Term::App(RESULT.to_string(), vec![action, situation])
    }

    pub fn s0() -> Term {
        Term::situation_const(S0)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Const(..) => true,
            Term::Var(..) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Const(_, s) | Term::Var(_, s) => *s,
            Term::App(f, _) if f == RESULT => Sort::Situation,
            Term::App(..) => Sort::Object,
        }
    }

    /// Nesting depth of `Result` applications.
    pub fn situation_depth(&self) -> usize {
        match self {
            Term::App(f, args) if f == RESULT && args.len() == 2 => {
                1 + args[1].situation_depth()
            }
            _ => 0,
        }
    }

    fn apply(&self, subst: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Const(..) => self.clone(),
            Term::Var(v, _) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|t| t.apply(subst)).collect())
            }
        }
    }

    fn variables(&self, out: &mut BTreeSet<(String, Sort)>) {
        match self {
            Term::Const(..) => {}
            Term::Var(v, s) => {
                out.insert((v.clone(), *s));
            }
            Term::App(_, args) => {
                for a in args {
                    a.variables(out);
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(n, _) | Term::Var(n, _) => write!(f, "{n}"),
            Term::App(fun, args) => {
                write!(f, "{fun}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

/// A literal: an atom or a classically negated atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub sign: Sign,
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn pos(predicate: &str, args: Vec<Term>) -> Literal {
        Literal {
            sign: Sign::Pos,
            predicate: predicate.to_string(),
            args,
        }
    }

    pub fn neg(predicate: &str, args: Vec<Term>) -> Literal {
        Literal {
            sign: Sign::Neg,
            predicate: predicate.to_string(),
            args,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            sign: match self.sign {
                Sign::Pos => Sign::Neg,
                Sign::Neg => Sign::Pos,
            },
            predicate: self.predicate.clone(),
            args: self.args.clone(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    fn apply(&self, subst: &BTreeMap<String, Term>) -> Literal {
        Literal {
            sign: self.sign,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| t.apply(subst)).collect(),
        }
    }

    fn variables(&self, out: &mut BTreeSet<(String, Sort)>) {
        for a in &self.args {
            a.variables(out);
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Neg {
            write!(f, "-")?;
        }
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A rule `head <- pos, not naf`. An absent head makes the rule a
/// constraint. Constraints are representable but never produced by the
/// action-language translators, and they take no part in defeat or
/// reduct formation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub name: String,
    pub head: Option<Literal>,
    pub pos: BTreeSet<Literal>,
    pub naf: BTreeSet<Literal>,
}

impl Rule {
    pub fn fact(name: &str, head: Literal) -> Rule {
        Rule {
            name: name.to_string(),
            head: Some(head),
            pos: BTreeSet::new(),
            naf: BTreeSet::new(),
        }
    }

    pub fn new(
        name: &str,
        head: Option<Literal>,
        pos: impl IntoIterator<Item = Literal>,
        naf: impl IntoIterator<Item = Literal>,
    ) -> Rule {
        Rule {
            name: name.to_string(),
            head,
            pos: pos.into_iter().collect(),
            naf: naf.into_iter().collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.head.iter().all(Literal::is_ground)
            && self.pos.iter().all(Literal::is_ground)
            && self.naf.iter().all(Literal::is_ground)
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.head.iter().chain(self.pos.iter()).chain(self.naf.iter())
    }

    pub fn variables(&self) -> BTreeSet<(String, Sort)> {
        let mut out = BTreeSet::new();
        for lit in self.literals() {
            lit.variables(&mut out);
        }
        out
    }

    pub fn apply(&self, name: String, subst: &BTreeMap<String, Term>) -> Rule {
        Rule {
            name,
            head: self.head.as_ref().map(|h| h.apply(subst)),
            pos: self.pos.iter().map(|l| l.apply(subst)).collect(),
            naf: self.naf.iter().map(|l| l.apply(subst)).collect(),
        }
    }

    /// Structural equality ignoring the rule name.
    pub fn same_shape(&self, other: &Rule) -> bool {
        self.head == other.head && self.pos == other.pos && self.naf == other.naf
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.name)?;
        if let Some(h) = &self.head {
            write!(f, "{h}")?;
        }
        let mut parts: Vec<String> = self.pos.iter().map(|l| l.to_string()).collect();
        parts.extend(self.naf.iter().map(|l| format!("not {l}")));
        if !parts.is_empty() {
            if self.head.is_some() {
                write!(f, " ")?;
            }
            write!(f, "<- {}", parts.join(", "))?;
        }
        write!(f, ".")
    }
}

/// An extended logic program: an ordered list of rules with injective names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Result<Program, LogicError> {
        let rules: Vec<Rule> = rules.into_iter().collect();
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.name.clone()) {
                return Err(LogicError::DuplicateName(r.name.clone()));
            }
        }
        Ok(Program { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter()
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(Rule::is_ground)
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.rules.iter().map(|r| r.name.clone()).collect()
    }
}

/// Strict partial order on rule names, stored transitively closed.
pub type Order = BTreeSet<(String, String)>;

/// Transitive closure of a set of name pairs; fails if the closure is not
/// irreflexive.
pub fn close_order(pairs: &Order) -> Result<Order, LogicError> {
    let mut closed: Order = pairs.clone();
    loop {
        let mut added = Vec::new();
        for (a, b) in &closed {
            for (c, d) in &closed {
                if b == c && !closed.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        closed.extend(added);
    }
    for (a, b) in &closed {
        if a == b {
            let path = cycle_witness(pairs, a);
            return Err(LogicError::CycleInOrder(path));
        }
    }
    Ok(closed)
}

fn cycle_witness(pairs: &Order, start: &str) -> Vec<String> {
    // depth-first walk from `start` back to itself over the base pairs
    let mut stack = vec![vec![start.to_string()]];
    while let Some(path) = stack.pop() {
        let last = path.last().unwrap().clone();
        for (a, b) in pairs {
            if *a == last {
                if *b == start {
                    let mut full = path.clone();
                    full.push(b.clone());
                    return full;
                }
                if !path.contains(b) {
                    let mut next = path.clone();
                    next.push(b.clone());
                    stack.push(next);
                }
            }
        }
    }
    vec![start.to_string(), start.to_string()]
}

/// A prioritized logic program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plp {
    pub program: Program,
    /// Transitively closed strict partial order on rule names.
    pub order: Order,
}

impl Plp {
    pub fn new(program: Program, pairs: Order) -> Result<Plp, LogicError> {
        let names = program.names();
        for (a, b) in &pairs {
            for n in [a, b] {
                if !names.contains(n) {
                    return Err(LogicError::UnknownName(n.clone()));
                }
            }
        }
        let order = close_order(&pairs)?;
        Ok(Plp { program, order })
    }

    pub fn unordered(program: Program) -> Plp {
        Plp {
            program,
            order: Order::new(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.program.is_ground()
    }

    /// `a` is strictly more preferred than `b`.
    pub fn preferred(&self, a: &str, b: &str) -> bool {
        self.order.contains(&(a.to_string(), b.to_string()))
    }
}

/// Outcome of `check_well_formed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WellFormed {
    Ok,
    /// Two differently named rules with an ordered pair share an instance.
    Violation {
        more_preferred: String,
        less_preferred: String,
        shared_instance: Rule,
    },
}

/// A PLP is well formed when no rule is an instance of two different rules
/// related by the order. Checked by unifying every ordered rule pair.
pub fn check_well_formed(plp: &Plp) -> WellFormed {
    for (a, b) in &plp.order {
        let (Some(ra), Some(rb)) = (plp.program.get(a), plp.program.get(b)) else {
            continue;
        };
        if let Some(shared) = common_instance(ra, rb) {
            return WellFormed::Violation {
                more_preferred: a.clone(),
                less_preferred: b.clone(),
                shared_instance: shared,
            };
        }
    }
    WellFormed::Ok
}

/// Most general common instance of two rules, if the rules unify after
/// renaming apart. Bodies are matched as sorted sequences, which is enough
/// for the schema-overlap shapes that arise here.
fn common_instance(ra: &Rule, rb: &Rule) -> Option<Rule> {
    let ra = rename_apart(ra, "L");
    let rb = rename_apart(rb, "R");
    if ra.pos.len() != rb.pos.len() || ra.naf.len() != rb.naf.len() {
        return None;
    }
    let mut subst = BTreeMap::new();
    match (&ra.head, &rb.head) {
        (Some(ha), Some(hb)) => unify_literal(ha, hb, &mut subst)?,
        (None, None) => {}
        _ => return None,
    }
    let pa: Vec<&Literal> = ra.pos.iter().collect();
    let pb: Vec<&Literal> = rb.pos.iter().collect();
    for (la, lb) in pa.iter().zip(pb.iter()) {
        unify_literal(la, lb, &mut subst)?;
    }
    let na: Vec<&Literal> = ra.naf.iter().collect();
    let nb: Vec<&Literal> = rb.naf.iter().collect();
    for (la, lb) in na.iter().zip(nb.iter()) {
        unify_literal(la, lb, &mut subst)?;
    }
    let resolved = resolve(&subst);
    Some(ra.apply(format!("{}&{}", ra.name, rb.name), &resolved))
}

fn rename_apart(r: &Rule, tag: &str) -> Rule {
    let mut subst = BTreeMap::new();
    for (v, s) in r.variables() {
        subst.insert(v.clone(), Term::Var(format!("{v}%{tag}"), s));
    }
    r.apply(r.name.clone(), &subst)
}

fn unify_literal(
    a: &Literal,
    b: &Literal,
    subst: &mut BTreeMap<String, Term>,
) -> Option<()> {
    if a.sign != b.sign || a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    for (ta, tb) in a.args.iter().zip(b.args.iter()) {
        unify_term(ta, tb, subst)?;
    }
    Some(())
}

fn unify_term(a: &Term, b: &Term, subst: &mut BTreeMap<String, Term>) -> Option<()> {
    let a = walk(a, subst);
    let b = walk(b, subst);
    match (&a, &b) {
        (Term::Var(va, _), Term::Var(vb, _)) if va == vb => Some(()),
        (Term::Var(v, _), t) | (t, Term::Var(v, _)) => {
            if occurs(v, t, subst) {
                None
            } else {
                subst.insert(v.clone(), t.clone());
                Some(())
            }
        }
        (Term::Const(na, sa), Term::Const(nb, sb)) => {
            (na == nb && sa == sb).then_some(())
        }
        (Term::App(fa, aa), Term::App(fb, ab)) => {
            if fa != fb || aa.len() != ab.len() {
                return None;
            }
            for (ta, tb) in aa.iter().zip(ab.iter()) {
                unify_term(ta, tb, subst)?;
            }
            Some(())
        }
        _ => None,
    }
}

fn walk(t: &Term, subst: &BTreeMap<String, Term>) -> Term {
    let mut cur = t.clone();
    while let Term::Var(v, _) = &cur {
        match subst.get(v) {
            Some(next) => cur = next.clone(),
            None => break,
        }
    }
    cur
}

fn occurs(v: &str, t: &Term, subst: &BTreeMap<String, Term>) -> bool {
    match walk(t, subst) {
        Term::Var(w, _) => w == v,
        Term::Const(..) => false,
        Term::App(_, args) => args.iter().any(|a| occurs(v, a, subst)),
    }
}

fn resolve(subst: &BTreeMap<String, Term>) -> BTreeMap<String, Term> {
    subst
        .keys()
        .map(|v| (v.clone(), deep_walk(&Term::Var(v.clone(), Sort::Object), subst)))
        .collect()
}

fn deep_walk(t: &Term, subst: &BTreeMap<String, Term>) -> Term {
    match walk(t, subst) {
        Term::App(f, args) => {
            Term::App(f, args.iter().map(|a| deep_walk(a, subst)).collect())
        }
        other => other,
    }
}

/// Whether `ground` is an instance of `rule`.
pub fn is_instance_of(ground: &Rule, rule: &Rule) -> bool {
    if ground.pos.len() != rule.pos.len() || ground.naf.len() != rule.naf.len() {
        return false;
    }
    let mut subst = BTreeMap::new();
    let matched_head = match (&rule.head, &ground.head) {
        (Some(hr), Some(hg)) => match_literal(hr, hg, &mut subst),
        (None, None) => Some(()),
        _ => None,
    };
    if matched_head.is_none() {
        return false;
    }
    let rp: Vec<&Literal> = rule.pos.iter().collect();
    let gp: Vec<&Literal> = ground.pos.iter().collect();
    for (lr, lg) in rp.iter().zip(gp.iter()) {
        if match_literal(lr, lg, &mut subst).is_none() {
            return false;
        }
    }
    let rn: Vec<&Literal> = rule.naf.iter().collect();
    let gn: Vec<&Literal> = ground.naf.iter().collect();
    for (lr, lg) in rn.iter().zip(gn.iter()) {
        if match_literal(lr, lg, &mut subst).is_none() {
            return false;
        }
    }
    true
}

fn match_literal(
    pattern: &Literal,
    ground: &Literal,
    subst: &mut BTreeMap<String, Term>,
) -> Option<()> {
    if pattern.sign != ground.sign
        || pattern.predicate != ground.predicate
        || pattern.args.len() != ground.args.len()
    {
        return None;
    }
    for (tp, tg) in pattern.args.iter().zip(ground.args.iter()) {
        match_term(tp, tg, subst)?;
    }
    Some(())
}

fn match_term(pattern: &Term, ground: &Term, subst: &mut BTreeMap<String, Term>) -> Option<()> {
    match pattern {
        Term::Var(v, _) => match subst.get(v) {
            Some(bound) => (bound == ground).then_some(()),
            None => {
                subst.insert(v.clone(), ground.clone());
                Some(())
            }
        },
        Term::Const(..) => (pattern == ground).then_some(()),
        Term::App(f, args) => match ground {
            Term::App(g, gargs) if f == g && args.len() == gargs.len() => {
                for (tp, tg) in args.iter().zip(gargs.iter()) {
                    match_term(tp, tg, subst)?;
                }
                Some(())
            }
            _ => None,
        },
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("duplicate rule name `{0}`")]
    DuplicateName(String),
    #[error("order refers to unknown rule name `{0}`")]
    UnknownName(String),
    #[error("cycle in order through {}", .0.join(" < "))]
    CycleInOrder(Vec<String>),
    #[error("PLP is not well formed: {more} < {less} share instance `{instance}`")]
    NotWellFormed {
        more: String,
        less: String,
        instance: String,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> Literal {
        parse_rule(&format!("t: {s}.")).unwrap().head.unwrap()
    }

    #[test]
    fn order_closure_is_transitive() {
        let pairs: Order = [("N1", "N2"), ("N2", "N3")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let closed = close_order(&pairs).unwrap();
        assert!(closed.contains(&("N1".to_string(), "N3".to_string())));
        assert_eq!(closed.len(), 3);
    }

    #[test]
    fn order_cycle_is_rejected() {
        let pairs: Order = [("N1", "N2"), ("N2", "N1")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        match close_order(&pairs) {
            Err(LogicError::CycleInOrder(path)) => {
                assert_eq!(path.first(), path.last());
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn empty_order_closes_to_empty() {
        assert_eq!(close_order(&Order::new()).unwrap(), Order::new());
    }

    #[test]
    fn complement_roundtrip() {
        let l = lit("-Holds(On,S0)");
        assert_eq!(l.complement().complement(), l);
    }

    #[test]
    fn overlapping_schema_instances_are_detected() {
        // N1: P(f(x)) <- not P(x)   N2: P(f(f(x))) <- not P(f(x))   N2 < N1
        let fx = Term::App("f".into(), vec![Term::var("x")]);
        let ffx = Term::App("f".into(), vec![fx.clone()]);
        let n1 = Rule::new(
            "N1",
            Some(Literal::pos("P", vec![fx.clone()])),
            [],
            [Literal::pos("P", vec![Term::var("x")])],
        );
        let n2 = Rule::new(
            "N2",
            Some(Literal::pos("P", vec![ffx])),
            [],
            [Literal::pos("P", vec![fx])],
        );
        let program = Program::new([n1, n2]).unwrap();
        let pairs: Order = [("N2".to_string(), "N1".to_string())].into_iter().collect();
        let plp = Plp::new(program, pairs).unwrap();
        match check_well_formed(&plp) {
            WellFormed::Violation {
                shared_instance, ..
            } => {
                // shared instance has shape P(f(f(_))) <- not P(f(_))
                let head = shared_instance.head.unwrap();
                assert_eq!(head.predicate, "P");
                match &head.args[0] {
                    Term::App(f, args) => {
                        assert_eq!(f, "f");
                        assert!(matches!(&args[0], Term::App(g, _) if g == "f"));
                    }
                    other => panic!("unexpected head arg {other:?}"),
                }
            }
            WellFormed::Ok => panic!("expected violation"),
        }
    }

    #[test]
    fn tweety_program_is_well_formed() {
        let plp = text::parse_program(TWEETY).unwrap();
        assert_eq!(check_well_formed(&plp), WellFormed::Ok);
    }

    #[test]
    fn empty_order_is_vacuously_well_formed() {
        let program = Program::new([
            Rule::fact("N1", lit("P(f(x))")),
            Rule::fact("N2", lit("P(f(f(x)))")),
        ])
        .unwrap();
        let plp = Plp::unordered(program);
        assert_eq!(check_well_formed(&plp), WellFormed::Ok);
    }

    pub(crate) const TWEETY: &str = "\
N1: Fly(x) <- Bird(x), not -Fly(x).
N2: -Fly(x) <- Penguin(x), not Fly(x).
N3: Bird(Tweety).
N4: Penguin(Tweety).
order { N2 < N1. }
";
}
