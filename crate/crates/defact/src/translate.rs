//! Compilation of domain descriptions into prioritized logic programs.
//!
//! Each proposition becomes one or more named rules over the `Holds`,
//! `Caused±`, `Effect±`, `AbEffect±` and `Ab` predicates; a fixed set of
//! domain-independent schema rules ties those predicates together, and a
//! preference chain resolves conflicts between rule classes:
//!
//! * `AT0` — causal rules are preferred over inertia rules.
//! * `AT1` — action explanation rules < causal rules < inertia rules <
//!   observation rules, where `<` means "more preferred". Backward inertia
//!   rules let observed values flow toward earlier situations, and per
//!   effect proposition an identification rule plus one rule per
//!   precondition reconstruct why an action must have fired.
//! * `AT2` — effect rules carry a `not Ab(A,s)` guard so an abnormally
//!   executed action loses its normal effect; abnormal effects fire only
//!   under a derived `Ab`. Effect rules join the chain as most preferred.
//!
//! Domain preference propositions add rule-level pairs between the rules
//! generated for the referenced causal or observation propositions.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::at::{DomainDescription, FluentExpression, Level, PropositionKind};
use crate::logic::{
    Literal, LogicError, Order, Plp, Program, Rule, Term, AB, ABEFFECT_N, ABEFFECT_P,
    CAUSED_N, CAUSED_P, EFFECT_N, EFFECT_P, HOLDS,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("domain `{domain}` is {actual}, expected {expected}")]
    LevelMismatch {
        domain: String,
        expected: Level,
        actual: Level,
    },
    #[error("domain `{domain}` is invalid: {first}")]
    InvalidDomain { domain: String, first: String },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A translated domain: the program, the pre-closure preference pairs,
/// and the map from proposition labels to generated rule names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationResult {
    pub plp: Plp,
    /// Preference pairs as generated, before transitive closure.
    pub base_order: Order,
    pub schema_map: BTreeMap<String, Vec<String>>,
    pub independent_rules: Vec<String>,
}

impl TranslationResult {
    pub fn schema_map_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema_map": self.schema_map,
            "independent_rules": self.independent_rules,
        })
    }
}

// Domain-independent rule names.
pub const IND_C_POS: &str = "ind_c_pos";
pub const IND_C_NEG: &str = "ind_c_neg";
pub const IND_EFF_POS: &str = "ind_eff_pos";
pub const IND_EFF_NEG: &str = "ind_eff_neg";
pub const IND_I_POS: &str = "ind_i_pos";
pub const IND_I_NEG: &str = "ind_i_neg";
pub const IND_I_BACK_POS: &str = "ind_i_back_pos";
pub const IND_I_BACK_NEG: &str = "ind_i_back_neg";
pub const IND_AB_DEFAULT: &str = "ind_ab_default";
pub const IND_ABEFF_POS: &str = "ind_abeff_pos";
pub const IND_ABEFF_NEG: &str = "ind_abeff_neg";
pub const IND_I_AB_POS: &str = "ind_i_ab_pos";
pub const IND_I_AB_NEG: &str = "ind_i_ab_neg";

fn holds(fe: &FluentExpression, sit: Term) -> Literal {
    let args = vec![Term::fluent(&fe.fluent), sit];
    if fe.negated {
        Literal::neg(HOLDS, args)
    } else {
        Literal::pos(HOLDS, args)
    }
}

/// Atom over one of the signed cause predicates, selected by the effect's
/// sign.
fn signed(pos_pred: &str, neg_pred: &str, fe: &FluentExpression, sit: Term) -> Literal {
    let pred = if fe.negated { neg_pred } else { pos_pred };
    Literal::pos(pred, vec![Term::fluent(&fe.fluent), sit])
}

fn situation_of(actions: &[String]) -> Term {
    actions.iter().fold(Term::s0(), |sit, action| {
        Term::result(Term::action(action), sit)
    })
}

fn var_f() -> Term {
    Term::var("f")
}
fn var_a() -> Term {
    Term::var("a")
}
fn var_s() -> Term {
    Term::var("s")
}
fn fs(sit: Term) -> Vec<Term> {
    vec![var_f(), sit]
}

/// `Holds(f,s) <- Caused+(f,s)` and the other predicate bridges.
fn bridge(name: &str, head_neg: bool, body_pred: &str) -> Rule {
    let head = if head_neg {
        Literal::neg(HOLDS, fs(var_s()))
    } else {
        Literal::pos(HOLDS, fs(var_s()))
    };
    Rule::new(name, Some(head), [Literal::pos(body_pred, fs(var_s()))], [])
}

fn forward_inertia(name: &str, negated: bool) -> Rule {
    let next = Term::result(var_a(), var_s());
    let (head, body, blocker) = if negated {
        (
            Literal::neg(HOLDS, fs(next.clone())),
            Literal::neg(HOLDS, fs(var_s())),
            Literal::pos(HOLDS, fs(next)),
        )
    } else {
        (
            Literal::pos(HOLDS, fs(next.clone())),
            Literal::pos(HOLDS, fs(var_s())),
            Literal::neg(HOLDS, fs(next)),
        )
    };
    Rule::new(name, Some(head), [body], [blocker])
}

/// Backward inertia: current values persist into the previous situation
/// unless something there explains them away.
fn backward_inertia(name: &str, negated: bool, with_abeffect: bool) -> Rule {
    let next = Term::result(var_a(), var_s());
    let (head, body, blocker, caused, effect, abeffect) = if negated {
        (
            Literal::neg(HOLDS, fs(var_s())),
            Literal::neg(HOLDS, fs(next.clone())),
            Literal::pos(HOLDS, fs(var_s())),
            Literal::pos(CAUSED_N, fs(next.clone())),
            Literal::pos(EFFECT_N, fs(next.clone())),
            Literal::pos(ABEFFECT_N, fs(next)),
        )
    } else {
        (
            Literal::pos(HOLDS, fs(var_s())),
            Literal::pos(HOLDS, fs(next.clone())),
            Literal::neg(HOLDS, fs(var_s())),
            Literal::pos(CAUSED_P, fs(next.clone())),
            Literal::pos(EFFECT_P, fs(next.clone())),
            Literal::pos(ABEFFECT_P, fs(next)),
        )
    };
    let mut naf = vec![blocker, caused, effect];
    if with_abeffect {
        naf.push(abeffect);
    }
    Rule::new(name, Some(head), [body], naf)
}

fn ab_default() -> Rule {
    let args = vec![var_a(), var_s()];
    Rule::new(
        IND_AB_DEFAULT,
        Some(Literal::neg(AB, args.clone())),
        [],
        [Literal::pos(AB, args)],
    )
}

struct Builder {
    rules: Vec<Rule>,
    schema_map: BTreeMap<String, Vec<String>>,
    independent: Vec<String>,
    explanation: Vec<String>,
    causal: Vec<String>,
    effect: Vec<String>,
    inertia: Vec<String>,
    observation: Vec<String>,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            rules: Vec::new(),
            schema_map: BTreeMap::new(),
            independent: Vec::new(),
            explanation: Vec::new(),
            causal: Vec::new(),
            effect: Vec::new(),
            inertia: Vec::new(),
            observation: Vec::new(),
        }
    }

    fn domain_rule(&mut self, label: &str, rule: Rule) {
        self.schema_map
            .entry(label.to_string())
            .or_default()
            .push(rule.name.clone());
        self.rules.push(rule);
    }

    fn independent_rule(&mut self, rule: Rule) {
        self.independent.push(rule.name.clone());
        self.rules.push(rule);
    }

    fn finish(self) -> Result<TranslationResult, TranslateError> {
        let mut base = Order::new();
        let chain = [
            (&self.explanation, &self.causal),
            (&self.effect, &self.causal),
            (&self.causal, &self.inertia),
            (&self.inertia, &self.observation),
        ];
        for (more, less) in chain {
            for m in more {
                for l in less {
                    base.insert((m.clone(), l.clone()));
                }
            }
        }
        let program = Program::new(self.rules).map_err(TranslateError::Logic)?;
        let plp = Plp::new(program, base.clone())?;
        Ok(TranslationResult {
            plp,
            base_order: base,
            schema_map: self.schema_map,
            independent_rules: self.independent,
        })
    }
}

fn require_level(d: &DomainDescription, expected: Level) -> Result<(), TranslateError> {
    if d.level != expected {
        return Err(TranslateError::LevelMismatch {
            domain: d.name.clone(),
            expected,
            actual: d.level,
        });
    }
    if let Some(first) = crate::at::validate_domain(d).first() {
        return Err(TranslateError::InvalidDomain {
            domain: d.name.clone(),
            first: first.to_string(),
        });
    }
    Ok(())
}

fn causal_rule(label: &str, effect: &FluentExpression, pre: &[FluentExpression], absent: &[FluentExpression]) -> Rule {
    Rule::new(
        label,
        Some(signed(CAUSED_P, CAUSED_N, effect, var_s())),
        pre.iter().map(|l| holds(l, var_s())),
        absent.iter().map(|l| holds(l, var_s())),
    )
}

fn effect_rule(
    label: &str,
    action: &str,
    effect: &FluentExpression,
    pre: &[FluentExpression],
    ab_guard: bool,
) -> Rule {
    let next = Term::result(Term::action(action), var_s());
    let naf: Vec<Literal> = if ab_guard {
        vec![Literal::pos(AB, vec![Term::action(action), var_s()])]
    } else {
        Vec::new()
    };
    Rule::new(
        label,
        Some(signed(EFFECT_P, EFFECT_N, effect, next)),
        pre.iter().map(|l| holds(l, var_s())),
        naf,
    )
}

/// Identification rule: a changed value with no other account must be a
/// direct effect of the action.
fn explanation_rules(
    label: &str,
    action: &str,
    effect: &FluentExpression,
    pre: &[FluentExpression],
    blockers: &[FluentExpression],
    ab_guard: bool,
) -> Vec<Rule> {
    let next = Term::result(Term::action(action), var_s());
    let effect_atom = signed(EFFECT_P, EFFECT_N, effect, next.clone());
    let mut naf = vec![
        holds(&effect.complement(), var_s()).complement(),
        signed(CAUSED_P, CAUSED_N, effect, next),
    ];
    if ab_guard {
        naf.push(Literal::pos(AB, vec![Term::action(action), var_s()]));
    }
    let mut out = vec![Rule::new(
        &format!("{label}_expl"),
        Some(effect_atom.clone()),
        [holds(effect, Term::result(Term::action(action), var_s()))],
        naf,
    )];
    for (i, cond) in pre.iter().enumerate() {
        let head = holds(cond, var_s());
        let mut naf: BTreeSet<Literal> = [head.complement()].into();
        naf.extend(blockers.iter().map(|b| holds(b, var_s())));
        out.push(Rule::new(
            &format!("{label}_pre{}", i + 1),
            Some(head),
            [effect_atom.clone()],
            naf,
        ));
    }
    out
}

/// Preconditions appearing in other effect propositions of the same action
/// with the same effect; these block the minimal-precondition rules.
fn cross_blockers<'a>(
    props: impl Iterator<Item = (&'a str, &'a str, &'a FluentExpression, &'a [FluentExpression])>,
    label: &str,
    action: &str,
    effect: &FluentExpression,
) -> Vec<FluentExpression> {
    let mut out: BTreeSet<FluentExpression> = BTreeSet::new();
    for (other_label, other_action, other_effect, other_pre) in props {
        if other_label == label || other_action != action || other_effect != effect {
            continue;
        }
        out.extend(other_pre.iter().cloned());
    }
    out.into_iter().collect()
}

/// Translation of an `AT0` domain: initial facts, causal rules, action
/// effect rules, the predicate bridges and forward inertia, with every
/// causal rule preferred over every inertia rule.
pub fn translate_at0(d: &DomainDescription) -> Result<TranslationResult, TranslateError> {
    require_level(d, Level::At0)?;
    let mut b = Builder::new();
    for prop in &d.propositions {
        match &prop.kind {
            PropositionKind::Initial { what } => {
                b.domain_rule(&prop.label, Rule::fact(&prop.label, holds(what, Term::s0())));
            }
            PropositionKind::Causal {
                effect,
                preconditions,
                absent,
            } => {
                let rule = causal_rule(&prop.label, effect, preconditions, absent);
                b.causal.push(rule.name.clone());
                b.domain_rule(&prop.label, rule);
            }
            PropositionKind::Effect {
                action,
                effect,
                preconditions,
            } => {
                let rule = effect_rule(&prop.label, action, effect, preconditions, false);
                b.domain_rule(&prop.label, rule);
            }
            PropositionKind::Preference { .. } => {
                b.schema_map.entry(prop.label.clone()).or_default();
            }
            _ => unreachable!("validated AT0 domain"),
        }
    }
    for rule in [
        bridge(IND_C_POS, false, CAUSED_P),
        bridge(IND_C_NEG, true, CAUSED_N),
    ] {
        b.causal.push(rule.name.clone());
        b.independent_rule(rule);
    }
    for rule in [
        bridge(IND_EFF_POS, false, EFFECT_P),
        bridge(IND_EFF_NEG, true, EFFECT_N),
    ] {
        b.independent_rule(rule);
    }
    for rule in [
        forward_inertia(IND_I_POS, false),
        forward_inertia(IND_I_NEG, true),
    ] {
        b.inertia.push(rule.name.clone());
        b.independent_rule(rule);
    }
    b.finish()
}

/// Translation of an `AT1` domain: observations at their concrete
/// situations, explanation rules for postdiction, and backward inertia,
/// ordered explanation < causal < inertia < observation.
pub fn translate_at1(d: &DomainDescription) -> Result<TranslationResult, TranslateError> {
    require_level(d, Level::At1)?;
    let mut b = Builder::new();
    let effect_props: Vec<(&str, &str, &FluentExpression, &[FluentExpression])> = d
        .propositions
        .iter()
        .filter_map(|p| match &p.kind {
            PropositionKind::Effect {
                action,
                effect,
                preconditions,
            } => Some((
                p.label.as_str(),
                action.as_str(),
                effect,
                preconditions.as_slice(),
            )),
            _ => None,
        })
        .collect();

    for prop in &d.propositions {
        match &prop.kind {
            PropositionKind::Observation {
                what,
                conditions,
                absent,
                after,
            } => {
                let sit = situation_of(after);
                let rule = Rule::new(
                    &prop.label,
                    Some(holds(what, sit.clone())),
                    conditions.iter().map(|l| holds(l, sit.clone())),
                    absent.iter().map(|l| holds(l, sit.clone())),
                );
                b.observation.push(rule.name.clone());
                b.domain_rule(&prop.label, rule);
            }
            PropositionKind::Causal {
                effect,
                preconditions,
                absent,
            } => {
                let rule = causal_rule(&prop.label, effect, preconditions, absent);
                b.causal.push(rule.name.clone());
                b.domain_rule(&prop.label, rule);
            }
            PropositionKind::Effect {
                action,
                effect,
                preconditions,
            } => {
                let rule = effect_rule(&prop.label, action, effect, preconditions, false);
                b.domain_rule(&prop.label, rule);
                let blockers = cross_blockers(
                    effect_props.iter().map(|t| (t.0, t.1, t.2, t.3)),
                    &prop.label,
                    action,
                    effect,
                );
                for rule in explanation_rules(
                    &prop.label,
                    action,
                    effect,
                    preconditions,
                    &blockers,
                    false,
                ) {
                    b.explanation.push(rule.name.clone());
                    b.domain_rule(&prop.label, rule);
                }
            }
            PropositionKind::Preference { .. } => {
                b.schema_map.entry(prop.label.clone()).or_default();
            }
            _ => unreachable!("validated AT1 domain"),
        }
    }
    for rule in [
        bridge(IND_C_POS, false, CAUSED_P),
        bridge(IND_C_NEG, true, CAUSED_N),
    ] {
        b.causal.push(rule.name.clone());
        b.independent_rule(rule);
    }
    for rule in [
        bridge(IND_EFF_POS, false, EFFECT_P),
        bridge(IND_EFF_NEG, true, EFFECT_N),
    ] {
        b.independent_rule(rule);
    }
    for rule in [
        forward_inertia(IND_I_POS, false),
        forward_inertia(IND_I_NEG, true),
        backward_inertia(IND_I_BACK_POS, false, false),
        backward_inertia(IND_I_BACK_NEG, true, false),
    ] {
        b.inertia.push(rule.name.clone());
        b.independent_rule(rule);
    }
    b.finish()
}

/// Translation of an `AT2` domain: defeasible effect rules guarded by
/// `not Ab`, abnormal effect rules fired by `Ab`, and the abnormality
/// default, ordered by both preference chains.
pub fn translate_at2(d: &DomainDescription) -> Result<TranslationResult, TranslateError> {
    require_level(d, Level::At2)?;
    let mut b = Builder::new();
    let effect_props: Vec<(&str, &str, &FluentExpression, &[FluentExpression])> = d
        .propositions
        .iter()
        .filter_map(|p| match &p.kind {
            PropositionKind::NormalEffect {
                action,
                effect,
                preconditions,
            } => Some((
                p.label.as_str(),
                action.as_str(),
                effect,
                preconditions.as_slice(),
            )),
            _ => None,
        })
        .collect();

    for prop in &d.propositions {
        match &prop.kind {
            PropositionKind::Observation {
                what,
                conditions,
                absent,
                after,
            } => {
                let sit = situation_of(after);
                let rule = Rule::new(
                    &prop.label,
                    Some(holds(what, sit.clone())),
                    conditions.iter().map(|l| holds(l, sit.clone())),
                    absent.iter().map(|l| holds(l, sit.clone())),
                );
                b.observation.push(rule.name.clone());
                b.domain_rule(&prop.label, rule);
            }
            PropositionKind::Causal {
                effect,
                preconditions,
                absent,
            } => {
                let rule = causal_rule(&prop.label, effect, preconditions, absent);
                b.causal.push(rule.name.clone());
                b.domain_rule(&prop.label, rule);
            }
            PropositionKind::NormalEffect {
                action,
                effect,
                preconditions,
            } => {
                let rule = effect_rule(&prop.label, action, effect, preconditions, true);
                b.effect.push(rule.name.clone());
                b.domain_rule(&prop.label, rule);
                let blockers = cross_blockers(
                    effect_props.iter().map(|t| (t.0, t.1, t.2, t.3)),
                    &prop.label,
                    action,
                    effect,
                );
                for rule in explanation_rules(
                    &prop.label,
                    action,
                    effect,
                    preconditions,
                    &blockers,
                    true,
                ) {
                    b.explanation.push(rule.name.clone());
                    b.domain_rule(&prop.label, rule);
                }
            }
            PropositionKind::AbnormalEffect {
                action,
                effect,
                preconditions,
            } => {
                let next = Term::result(Term::action(action), var_s());
                let mut pos: Vec<Literal> =
                    preconditions.iter().map(|l| holds(l, var_s())).collect();
                pos.push(Literal::pos(AB, vec![Term::action(action), var_s()]));
                let rule = Rule::new(
                    &prop.label,
                    Some(signed(ABEFFECT_P, ABEFFECT_N, effect, next)),
                    pos,
                    [],
                );
                b.domain_rule(&prop.label, rule);
            }
            PropositionKind::AbnormalCondition {
                action,
                before,
                after,
            } => {
                let next = Term::result(Term::action(action), var_s());
                let mut pos: Vec<Literal> =
                    before.iter().map(|l| holds(l, var_s())).collect();
                pos.extend(after.iter().map(|l| holds(l, next.clone())));
                let rule = Rule::new(
                    &prop.label,
                    Some(Literal::pos(AB, vec![Term::action(action), var_s()])),
                    pos,
                    [],
                );
                b.domain_rule(&prop.label, rule);
            }
            PropositionKind::Preference { .. } => {
                b.schema_map.entry(prop.label.clone()).or_default();
            }
            _ => unreachable!("validated AT2 domain"),
        }
    }
    for rule in [
        bridge(IND_C_POS, false, CAUSED_P),
        bridge(IND_C_NEG, true, CAUSED_N),
    ] {
        b.causal.push(rule.name.clone());
        b.independent_rule(rule);
    }
    for rule in [
        bridge(IND_EFF_POS, false, EFFECT_P),
        bridge(IND_EFF_NEG, true, EFFECT_N),
        ab_default(),
    ] {
        b.effect.push(rule.name.clone());
        b.independent_rule(rule);
    }
    for rule in [
        bridge(IND_ABEFF_POS, false, ABEFFECT_P),
        bridge(IND_ABEFF_NEG, true, ABEFFECT_N),
    ] {
        b.independent_rule(rule);
    }
    for rule in [
        forward_inertia(IND_I_POS, false),
        forward_inertia(IND_I_NEG, true),
        backward_inertia(IND_I_AB_POS, false, true),
        backward_inertia(IND_I_AB_NEG, true, true),
    ] {
        b.inertia.push(rule.name.clone());
        b.independent_rule(rule);
    }
    b.finish()
}

/// Add rule-level preference pairs for the given label pairs and re-close
/// the order.
pub fn apply_preferences(
    t: &TranslationResult,
    prefs: &[(String, String)],
) -> Result<TranslationResult, TranslateError> {
    if prefs.is_empty() {
        return Ok(t.clone());
    }
    let mut base = t.base_order.clone();
    for (more, less) in prefs {
        let more_rules = t.schema_map.get(more).cloned().unwrap_or_default();
        let less_rules = t.schema_map.get(less).cloned().unwrap_or_default();
        for m in &more_rules {
            for l in &less_rules {
                base.insert((m.clone(), l.clone()));
            }
        }
    }
    let plp = Plp::new(t.plp.program.clone(), base.clone())?;
    Ok(TranslationResult {
        plp,
        base_order: base,
        schema_map: t.schema_map.clone(),
        independent_rules: t.independent_rules.clone(),
    })
}

/// Translate at the domain's declared level and apply its preference
/// propositions.
pub fn translate_domain(d: &DomainDescription) -> Result<TranslationResult, TranslateError> {
    let t = match d.level {
        Level::At0 => translate_at0(d)?,
        Level::At1 => translate_at1(d)?,
        Level::At2 => translate_at2(d)?,
    };
    let prefs: Vec<(String, String)> = d
        .preferences()
        .map(|(m, l)| (m.to_string(), l.to_string()))
        .collect();
    apply_preferences(&t, &prefs)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::at::parse_domain;
    use crate::logic::parse_rule;

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

    const SHOOTING_1: &str = "\
domain Shooting-1 : AT1.
fluents Alive, Loaded.
actions Shoot, Wait.
initially Alive is observed.
initially -Loaded is observed with absence Loaded.
-Alive is observed after Shoot, Wait.
Shoot causes -Alive if Loaded.
";

    const SHOOTING_2: &str = "\
domain Shooting-2 : AT2.
fluents Alive, Loaded.
actions Shoot.
initially Loaded is observed.
initially Alive is observed.
Shoot normally causes -Alive if Loaded.
Shoot is abnormal if before Loaded after Alive.
";

    const SHOOTING_3: &str = "\
domain Shooting-3 : AT0.
fluents Fly, Wounded.
actions Shoot.
initially -Wounded.
Fly is caused if with absence -Fly.
-Fly is caused if Wounded with absence Fly.
Shoot causes Wounded.
";

    fn rule(text: &str) -> Rule {
        parse_rule(text).unwrap()
    }

    #[test]
    fn switch_power_rules_match_the_expected_shapes() {
        let d = parse_domain(SWITCH_POWER).unwrap();
        let t = translate_at0(&d).unwrap();
        let p = &t.plp.program;
        assert_eq!(p.get("p1").unwrap(), &rule("p1: Holds(On,S0)."));
        assert_eq!(p.get("p2").unwrap(), &rule("p2: Holds(Power,S0)."));
        assert_eq!(p.get("p3").unwrap(), &rule("p3: Holds(Switch,S0)."));
        assert_eq!(
            p.get("p4").unwrap(),
            &rule("p4: Caused+(On,s) <- Holds(Switch,s), not -Holds(On,s).")
        );
        assert_eq!(
            p.get("p5").unwrap(),
            &rule("p5: Caused-(On,s) <- -Holds(Power,s).")
        );
        assert_eq!(
            p.get("p6").unwrap(),
            &rule("p6: Effect-(Power,Result(Cut-Power,s)).")
        );
        assert_eq!(
            p.get(IND_I_POS).unwrap(),
            &rule("ind_i_pos: Holds(f,Result(a,s)) <- Holds(f,s), not -Holds(f,Result(a,s)).")
        );
        assert_eq!(
            p.get(IND_I_NEG).unwrap(),
            &rule("ind_i_neg: -Holds(f,Result(a,s)) <- -Holds(f,s), not Holds(f,Result(a,s)).")
        );

        // causal rules (including the two bridges) precede inertia rules
        let expected: Order = ["p4", "p5", IND_C_POS, IND_C_NEG]
            .iter()
            .flat_map(|c| {
                [IND_I_POS, IND_I_NEG]
                    .iter()
                    .map(move |i| (c.to_string(), i.to_string()))
            })
            .collect();
        assert_eq!(t.base_order, expected);
        assert_eq!(
            t.independent_rules,
            vec![
                IND_C_POS,
                IND_C_NEG,
                IND_EFF_POS,
                IND_EFF_NEG,
                IND_I_POS,
                IND_I_NEG
            ]
        );
    }

    #[test]
    fn no_causal_propositions_still_orders_bridges() {
        let d = parse_domain(
            "domain D : AT0.\nfluents F.\nactions A.\ninitially F.\nA causes -F.\n",
        )
        .unwrap();
        let t = translate_at0(&d).unwrap();
        // only the two causal bridges remain on the preferred side
        assert!(t
            .base_order
            .iter()
            .all(|(a, _)| a == IND_C_POS || a == IND_C_NEG));
    }

    #[test]
    fn shooting3_matches_example_rules() {
        let d = parse_domain(SHOOTING_3).unwrap();
        let t = translate_at0(&d).unwrap();
        let p = &t.plp.program;
        assert_eq!(p.get("p1").unwrap(), &rule("p1: -Holds(Wounded,S0)."));
        assert_eq!(
            p.get("p2").unwrap(),
            &rule("p2: Caused+(Fly,s) <- not -Holds(Fly,s).")
        );
        assert_eq!(
            p.get("p3").unwrap(),
            &rule("p3: Caused-(Fly,s) <- Holds(Wounded,s), not Holds(Fly,s).")
        );
        assert_eq!(
            p.get("p4").unwrap(),
            &rule("p4: Effect+(Wounded,Result(Shoot,s)).")
        );
    }

    #[test]
    fn shooting1_matches_example_six() {
        let d = parse_domain(SHOOTING_1).unwrap();
        let t = translate_at1(&d).unwrap();
        let p = &t.plp.program;
        assert_eq!(p.get("p1").unwrap(), &rule("p1: Holds(Alive,S0)."));
        assert_eq!(
            p.get("p2").unwrap(),
            &rule("p2: -Holds(Loaded,S0) <- not Holds(Loaded,S0).")
        );
        assert_eq!(
            p.get("p3").unwrap(),
            &rule("p3: -Holds(Alive,Result(Wait,Result(Shoot,S0))).")
        );
        assert_eq!(
            p.get("p4").unwrap(),
            &rule("p4: Effect-(Alive,Result(Shoot,s)) <- Holds(Loaded,s).")
        );
        assert_eq!(
            p.get("p4_expl").unwrap(),
            &rule(
                "p4_expl: Effect-(Alive,Result(Shoot,s)) <- -Holds(Alive,Result(Shoot,s)), \
                 not -Holds(Alive,s), not Caused-(Alive,Result(Shoot,s))."
            )
        );
        assert_eq!(
            p.get("p4_pre1").unwrap(),
            &rule(
                "p4_pre1: Holds(Loaded,s) <- Effect-(Alive,Result(Shoot,s)), \
                 not -Holds(Loaded,s)."
            )
        );
        // the closed order realizes explanation < inertia < observation
        for ex in ["p4_expl", "p4_pre1"] {
            for i in [IND_I_POS, IND_I_NEG, IND_I_BACK_POS, IND_I_BACK_NEG] {
                assert!(t.plp.preferred(ex, i), "{ex} < {i}");
                for o in ["p1", "p2", "p3"] {
                    assert!(t.plp.preferred(i, o), "{i} < {o}");
                }
            }
        }
    }

    #[test]
    fn door_effects_block_each_other() {
        let text = "\
domain Door : AT1.
fluents DoorOpened, HasCard, HasKey.
actions OpenDoor.
initially -HasKey is observed.
DoorOpened is observed after OpenDoor.
e1: OpenDoor causes DoorOpened if HasCard.
e2: OpenDoor causes DoorOpened if HasKey.
";
        let d = parse_domain(text).unwrap();
        let t = translate_at1(&d).unwrap();
        let p = &t.plp.program;
        assert_eq!(
            p.get("e1_pre1").unwrap(),
            &rule(
                "e1_pre1: Holds(HasCard,s) <- Effect+(DoorOpened,Result(OpenDoor,s)), \
                 not -Holds(HasCard,s), not Holds(HasKey,s)."
            )
        );
        assert_eq!(
            p.get("e2_pre1").unwrap(),
            &rule(
                "e2_pre1: Holds(HasKey,s) <- Effect+(DoorOpened,Result(OpenDoor,s)), \
                 not -Holds(HasKey,s), not Holds(HasCard,s)."
            )
        );
    }

    #[test]
    fn single_effect_proposition_has_no_cross_blockers() {
        let d = parse_domain(SHOOTING_1).unwrap();
        let t = translate_at1(&d).unwrap();
        let pre = t.plp.program.get("p4_pre1").unwrap();
        assert_eq!(pre.naf.len(), 1);
    }

    #[test]
    fn shooting2_matches_example_nine() {
        let d = parse_domain(SHOOTING_2).unwrap();
        let t = translate_at2(&d).unwrap();
        let p = &t.plp.program;
        assert_eq!(p.get("p1").unwrap(), &rule("p1: Holds(Loaded,S0)."));
        assert_eq!(p.get("p2").unwrap(), &rule("p2: Holds(Alive,S0)."));
        assert_eq!(
            p.get("p3").unwrap(),
            &rule(
                "p3: Effect-(Alive,Result(Shoot,s)) <- Holds(Loaded,s), not Ab(Shoot,s)."
            )
        );
        assert_eq!(
            p.get("p3_expl").unwrap(),
            &rule(
                "p3_expl: Effect-(Alive,Result(Shoot,s)) <- -Holds(Alive,Result(Shoot,s)), \
                 not -Holds(Alive,s), not Caused-(Alive,Result(Shoot,s)), not Ab(Shoot,s)."
            )
        );
        assert_eq!(
            p.get("p4").unwrap(),
            &rule("p4: Ab(Shoot,s) <- Holds(Loaded,s), Holds(Alive,Result(Shoot,s)).")
        );
        assert_eq!(
            p.get(IND_AB_DEFAULT).unwrap(),
            &rule("ind_ab_default: -Ab(a,s) <- not Ab(a,s).")
        );
        assert_eq!(
            p.get(IND_I_AB_NEG).unwrap(),
            &rule(
                "ind_i_ab_neg: -Holds(f,s) <- -Holds(f,Result(a,s)), not Holds(f,s), \
                 not Caused-(f,Result(a,s)), not Effect-(f,Result(a,s)), \
                 not AbEffect-(f,Result(a,s))."
            )
        );
        // effect rules head the chain alongside explanation rules
        assert!(t.plp.preferred("p3", IND_I_POS));
        assert!(t.plp.preferred("p3_expl", IND_I_POS));
        assert!(t.plp.preferred(IND_I_POS, "p1"));
        // the two chains share only the tail: no pair between them
        assert!(!t.plp.preferred("p3", "p3_expl"));
        assert!(!t.plp.preferred("p3_expl", "p3"));
    }

    #[test]
    fn abnormal_effect_rule_requires_ab() {
        let text = "\
domain D : AT2.
fluents Alive, Dead.
actions Shoot.
Shoot abnormally causes Dead if Alive.
";
        let d = parse_domain(text).unwrap();
        let t = translate_at2(&d).unwrap();
        assert_eq!(
            t.plp.program.get("p1").unwrap(),
            &rule(
                "p1: AbEffect+(Dead,Result(Shoot,s)) <- Holds(Alive,s), Ab(Shoot,s)."
            )
        );
    }

    #[test]
    fn translation_is_deterministic() {
        let d = parse_domain(SHOOTING_2).unwrap();
        assert_eq!(translate_at2(&d).unwrap(), translate_at2(&d).unwrap());
    }

    #[test]
    fn schema_map_is_bijective_on_domain_rules() {
        type Translate = fn(&DomainDescription) -> Result<TranslationResult, TranslateError>;
        let cases: [(&str, Translate); 3] = [
            (SWITCH_POWER, translate_at0),
            (SHOOTING_1, translate_at1),
            (SHOOTING_2, translate_at2),
        ];
        for (text, f) in cases {
            let d = parse_domain(text).unwrap();
            let t = f(&d).unwrap();
            for prop in &d.propositions {
                assert!(t.schema_map.contains_key(&prop.label));
            }
            let mut seen = BTreeSet::new();
            for names in t.schema_map.values() {
                for n in names {
                    assert!(seen.insert(n.clone()), "rule {n} mapped twice");
                    assert!(!t.independent_rules.contains(n));
                }
            }
            let mapped: usize = t.schema_map.values().map(|v| v.len()).sum();
            assert_eq!(
                mapped + t.independent_rules.len(),
                t.plp.program.len(),
                "every rule is either domain-specific or independent"
            );
        }
    }

    #[test]
    fn preferences_extend_and_reclose_the_order() {
        let d = parse_domain(SHOOTING_3).unwrap();
        let t = translate_at0(&d).unwrap();
        let with = apply_preferences(&t, &[("p3".to_string(), "p2".to_string())]).unwrap();
        assert!(with.plp.preferred("p3", "p2"));
        // transitively: p3 < p2 < inertia already gave p3 < inertia; the
        // new pair must not disturb the rest
        assert!(with.plp.preferred("p2", IND_I_POS));
        assert_eq!(apply_preferences(&t, &[]).unwrap(), t);
    }

    #[test]
    fn preference_cycles_are_rejected() {
        let d = parse_domain(SHOOTING_3).unwrap();
        let t = translate_at0(&d).unwrap();
        let bad = apply_preferences(
            &t,
            &[
                ("p3".to_string(), "p2".to_string()),
                ("p2".to_string(), "p3".to_string()),
            ],
        );
        assert!(matches!(
            bad,
            Err(TranslateError::Logic(LogicError::CycleInOrder(_)))
        ));
    }

}
