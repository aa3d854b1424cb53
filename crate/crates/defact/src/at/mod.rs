//! Domain descriptions for the three action languages.
//!
//! `AT0` admits initial, causal and effect propositions and supports
//! temporal prediction. `AT1` swaps initial facts for defeasible
//! observations (possibly after an action string), enabling postdiction.
//! `AT2` additionally distinguishes normal from abnormal action effects
//! and lets observations identify abnormal executions. Preference
//! propositions between causal or observation propositions are accepted
//! at every level.

mod parse;
mod validate;

pub use parse::{parse_domain, parse_query, render_domain, AtParseError};
pub use validate::{validate_domain, Diagnostic};

use std::fmt;

/// A fluent name, possibly negated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FluentExpression {
    pub fluent: String,
    pub negated: bool,
}

impl FluentExpression {
    pub fn pos(fluent: &str) -> FluentExpression {
        FluentExpression {
            fluent: fluent.to_string(),
            negated: false,
        }
    }

    pub fn neg(fluent: &str) -> FluentExpression {
        FluentExpression {
            fluent: fluent.to_string(),
            negated: true,
        }
    }

    pub fn complement(&self) -> FluentExpression {
        FluentExpression {
            fluent: self.fluent.clone(),
            negated: !self.negated,
        }
    }
}

impl fmt::Display for FluentExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-")?;
        }
        write!(f, "{}", self.fluent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub enum Level {
    At0,
    At1,
    At2,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::At0 => write!(f, "AT0"),
            Level::At1 => write!(f, "AT1"),
            Level::At2 => write!(f, "AT2"),
        }
    }
}

/// Payload of one labeled proposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropositionKind {
    /// `initially L.`
    Initial { what: FluentExpression },
    /// `L is caused if L1,...,Lm with absence Lm+1,...,Ln.`
    Causal {
        effect: FluentExpression,
        preconditions: Vec<FluentExpression>,
        absent: Vec<FluentExpression>,
    },
    /// `A causes L if L1,...,Lk.`
    Effect {
        action: String,
        effect: FluentExpression,
        preconditions: Vec<FluentExpression>,
    },
    /// `A normally causes L if L1,...,Lk.`
    NormalEffect {
        action: String,
        effect: FluentExpression,
        preconditions: Vec<FluentExpression>,
    },
    /// `A abnormally causes L if L1,...,Lk.`
    AbnormalEffect {
        action: String,
        effect: FluentExpression,
        preconditions: Vec<FluentExpression>,
    },
    /// `L is observed if L1,... with absence ... after A1,...,Al.`
    /// An empty action string places the observation initially.
    Observation {
        what: FluentExpression,
        conditions: Vec<FluentExpression>,
        absent: Vec<FluentExpression>,
        after: Vec<String>,
    },
    /// `A is abnormal if before L1,...,Lh after Lh+1,...,Lp.`
    AbnormalCondition {
        action: String,
        before: Vec<FluentExpression>,
        after: Vec<FluentExpression>,
    },
    /// `l1 is more preferred than l2.`
    Preference { more: String, less: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proposition {
    pub label: String,
    pub kind: PropositionKind,
    /// 1-based source line, zero for synthesized propositions.
    pub line: usize,
}

impl Proposition {
    /// Effect of a causal, effect or observation proposition.
    pub fn effect(&self) -> Option<&FluentExpression> {
        match &self.kind {
            PropositionKind::Initial { what } | PropositionKind::Observation { what, .. } => {
                Some(what)
            }
            PropositionKind::Causal { effect, .. }
            | PropositionKind::Effect { effect, .. }
            | PropositionKind::NormalEffect { effect, .. }
            | PropositionKind::AbnormalEffect { effect, .. } => Some(effect),
            _ => None,
        }
    }

    pub fn preconditions(&self) -> &[FluentExpression] {
        match &self.kind {
            PropositionKind::Causal { preconditions, .. }
            | PropositionKind::Effect { preconditions, .. }
            | PropositionKind::NormalEffect { preconditions, .. }
            | PropositionKind::AbnormalEffect { preconditions, .. } => preconditions,
            PropositionKind::Observation { conditions, .. } => conditions,
            _ => &[],
        }
    }

    pub fn absent(&self) -> &[FluentExpression] {
        match &self.kind {
            PropositionKind::Causal { absent, .. }
            | PropositionKind::Observation { absent, .. } => absent,
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainDescription {
    pub name: String,
    pub level: Level,
    pub fluents: Vec<String>,
    pub actions: Vec<String>,
    pub propositions: Vec<Proposition>,
}

impl DomainDescription {
    pub fn proposition(&self, label: &str) -> Option<&Proposition> {
        self.propositions.iter().find(|p| p.label == label)
    }

    pub fn preferences(&self) -> impl Iterator<Item = (&str, &str)> {
        self.propositions.iter().filter_map(|p| match &p.kind {
            PropositionKind::Preference { more, less } => {
                Some((more.as_str(), less.as_str()))
            }
            _ => None,
        })
    }
}

/// `L after A1,...,Al`, or `initially L` when the action string is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueQuery {
    pub what: FluentExpression,
    pub after: Vec<String>,
}

impl fmt::Display for ValueQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.after.is_empty() {
            write!(f, "initially {}", self.what)
        } else {
            write!(f, "{} after {}", self.what, self.after.join(", "))
        }
    }
}
