//! Level rules for domain descriptions.
//!
//! Each language level admits only its own proposition kinds, and a
//! preference may only rank causal or observation propositions.

use super::{DomainDescription, Level, PropositionKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub label: String,
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (line {}): {}", self.label, self.line, self.message)
    }
}

/// Empty result means the domain is valid for its level.
pub fn validate_domain(d: &DomainDescription) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for prop in &d.propositions {
        let complaint = match (&prop.kind, d.level) {
            (PropositionKind::Initial { .. }, Level::At0) => None,
            (PropositionKind::Initial { .. }, _) => {
                Some("initial propositions are AT0-only; use an initial observation")
            }
            (PropositionKind::Causal { .. }, _) => None,
            (PropositionKind::Effect { .. }, Level::At0 | Level::At1) => None,
            (PropositionKind::Effect { .. }, Level::At2) => {
                Some("AT2 effects must be `normally causes` or `abnormally causes`")
            }
            (PropositionKind::NormalEffect { .. }, Level::At2) => None,
            (PropositionKind::NormalEffect { .. }, _) => {
                Some("`normally causes` requires level AT2")
            }
            (PropositionKind::AbnormalEffect { .. }, Level::At2) => None,
            (PropositionKind::AbnormalEffect { .. }, _) => {
                Some("`abnormally causes` requires level AT2")
            }
            (PropositionKind::Observation { .. }, Level::At1 | Level::At2) => None,
            (PropositionKind::Observation { .. }, Level::At0) => {
                Some("observations require level AT1 or AT2")
            }
            (PropositionKind::AbnormalCondition { .. }, Level::At2) => None,
            (PropositionKind::AbnormalCondition { .. }, _) => {
                Some("abnormal conditions require level AT2")
            }
            (PropositionKind::Preference { .. }, _) => None,
        };
        if let Some(message) = complaint {
            out.push(Diagnostic {
                label: prop.label.clone(),
                line: prop.line,
                message: message.to_string(),
            });
        }

        if let PropositionKind::Preference { more, less } = &prop.kind {
            for target in [more, less] {
                match d.proposition(target) {
                    None => out.push(Diagnostic {
                        label: prop.label.clone(),
                        line: prop.line,
                        message: format!("preference references unknown label `{target}`"),
                    }),
                    Some(referenced) => {
                        let ok = matches!(
                            referenced.kind,
                            PropositionKind::Causal { .. }
                                | PropositionKind::Observation { .. }
                        );
                        if !ok {
                            out.push(Diagnostic {
                                label: prop.label.clone(),
                                line: prop.line,
                                message: format!(
                                    "preference must reference a causal or observation proposition, `{target}` is not one"
                                ),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_domain;
    use super::*;

    #[test]
    fn at0_rejects_observations() {
        let text = "domain D : AT0.\nfluents F.\nactions A.\nF is observed after A.\n";
        let d = parse_domain(text).unwrap();
        let diags = validate_domain(&d);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("observations"));
    }

    #[test]
    fn shooting2_is_valid_at2() {
        let text = "\
domain Shooting-2 : AT2.
fluents Alive, Loaded.
actions Shoot.
initially Loaded is observed.
initially Alive is observed.
Shoot normally causes -Alive if Loaded.
Shoot is abnormal if before Loaded after Alive.
";
        let d = parse_domain(text).unwrap();
        assert!(validate_domain(&d).is_empty());
    }

    #[test]
    fn preference_must_target_causal_or_observation() {
        let text = "\
domain D : AT0.
fluents F.
actions A.
e1: A causes F.
pr: e1 is more preferred than e1.
";
        let d = parse_domain(text).unwrap();
        let diags = validate_domain(&d);
        assert_eq!(diags.len(), 2);
        assert!(diags[0].message.contains("causal or observation"));
    }

    #[test]
    fn preference_to_unknown_label() {
        let text = "\
domain D : AT0.
fluents F.
c1: F is caused if with absence -F.
pr: c1 is more preferred than nosuch.
";
        let d = parse_domain(text).unwrap();
        let diags = validate_domain(&d);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("unknown label"));
    }
}
