//! Concrete syntax for `.atd` domain files.
//!
//! A file opens with a header and declarations, then one proposition per
//! statement, each ending with `.`:
//!
//! ```text
//! domain Switch-Power : AT0.
//! fluents On, Power, Switch.
//! actions Cut-Power.
//!
//! initially On.
//! c1: On is caused if Switch with absence -On.
//! c2: -On is caused if -Power.
//! Cut-Power causes -Power.
//! ```
//!
//! Labels are optional; unlabeled propositions get `p1..pn` by position.
//! Negation is a leading `-`; a `-` inside a word stays part of the name,
//! so `Cut-Power` is one action and `-Power` negates `Power`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{DomainDescription, FluentExpression, Level, Proposition, PropositionKind, ValueQuery};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: undeclared {what} `{name}`")]
    Undeclared {
        line: usize,
        what: &'static str,
        name: String,
    },
    #[error("line {line}: duplicate label `{label}`")]
    DuplicateLabel { line: usize, label: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Neg,
    Comma,
    Colon,
    Dot,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(input: &str) -> Result<Vec<Token>, AtParseError> {
    let mut out = Vec::new();
    for (li, raw) in input.lines().enumerate() {
        let line = li + 1;
        let text = match raw.find('%') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let mut chars = text.char_indices().peekable();
        while let Some(&(ci, c)) = chars.peek() {
            let column = ci + 1;
            match c {
                ' ' | '\t' | '\r' => {
                    chars.next();
                }
                ',' => {
                    chars.next();
                    out.push(Token { tok: Tok::Comma, line, column });
                }
                ':' => {
                    chars.next();
                    out.push(Token { tok: Tok::Colon, line, column });
                }
                '.' => {
                    chars.next();
                    out.push(Token { tok: Tok::Dot, line, column });
                }
                '-' => {
                    chars.next();
                    out.push(Token { tok: Tok::Neg, line, column });
                }
                c if c.is_alphanumeric() || c == '_' => {
                    let mut word = String::new();
                    while let Some(&(_, c)) = chars.peek() {
                        if c.is_alphanumeric() || c == '_' || c == '-' {
                            word.push(c);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push(Token { tok: Tok::Word(word), line, column });
                }
                other => {
                    return Err(AtParseError::Syntax {
                        line,
                        column,
                        message: format!("unexpected character `{other}`"),
                    });
                }
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Word(w)) => Some(w.as_str()),
            _ => None,
        }
    }

    fn word_at(&self, offset: usize) -> Option<&str> {
        match self.tokens.get(self.at + offset).map(|t| &t.tok) {
            Some(Tok::Word(w)) => Some(w.as_str()),
            _ => None,
        }
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.column),
            None => self
                .tokens
                .last()
                .map(|t| (t.line, t.column + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, AtParseError> {
        let (line, column) = self.here();
        Err(AtParseError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn expect_word(&mut self, kw: &str) -> Result<(), AtParseError> {
        match self.next().map(|t| t.tok) {
            Some(Tok::Word(w)) if w == kw => Ok(()),
            _ => {
                self.at = self.at.saturating_sub(1);
                self.fail(format!("expected `{kw}`"))
            }
        }
    }

    fn expect_tok(&mut self, tok: Tok, what: &str) -> Result<(), AtParseError> {
        match self.next() {
            Some(t) if t.tok == tok => Ok(()),
            _ => {
                self.at = self.at.saturating_sub(1);
                self.fail(format!("expected {what}"))
            }
        }
    }

    fn any_word(&mut self, what: &str) -> Result<(String, usize), AtParseError> {
        match self.next() {
            Some(Token {
                tok: Tok::Word(w),
                line,
                ..
            }) => Ok((w, line)),
            _ => {
                self.at = self.at.saturating_sub(1);
                self.fail(format!("expected {what}"))
            }
        }
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        if self.peek_word() == Some(kw) {
            self.at += 1;
            true
        } else {
            false
        }
    }
}

const KEYWORDS: &[&str] = &[
    "initially", "is", "caused", "if", "with", "absence", "causes", "normally",
    "abnormally", "observed", "after", "abnormal", "before", "more", "preferred",
    "than",
];

fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Parse a `.atd` document.
pub fn parse_domain(input: &str) -> Result<DomainDescription, AtParseError> {
    let tokens = lex(input)?;
    let mut p = Parser { tokens, at: 0 };

    p.expect_word("domain")?;
    let (name, _) = p.any_word("domain name")?;
    p.expect_tok(Tok::Colon, "`:` before the language level")?;
    let (level_word, _) = p.any_word("language level")?;
    let level = match level_word.as_str() {
        "AT0" => Level::At0,
        "AT1" => Level::At1,
        "AT2" => Level::At2,
        other => return p.fail(format!("unknown language level `{other}`")),
    };
    p.expect_tok(Tok::Dot, "`.`")?;

    let mut fluents = Vec::new();
    let mut actions = Vec::new();
    loop {
        match p.peek_word() {
            Some("fluents") => {
                p.next();
                fluents.extend(name_list(&mut p)?);
            }
            Some("actions") => {
                p.next();
                actions.extend(name_list(&mut p)?);
            }
            _ => break,
        }
    }

    let mut propositions = Vec::new();
    while p.peek().is_some() {
        propositions.push(statement(&mut p, &fluents, &actions)?);
    }

    // assign positional labels, then check uniqueness
    let mut labeled = Vec::new();
    for (i, (label, kind, line)) in propositions.into_iter().enumerate() {
        let label = label.unwrap_or_else(|| format!("p{}", i + 1));
        labeled.push(Proposition { label, kind, line });
    }
    let mut seen = std::collections::BTreeSet::new();
    for prop in &labeled {
        if !seen.insert(prop.label.clone()) {
            return Err(AtParseError::DuplicateLabel {
                line: prop.line,
                label: prop.label.clone(),
            });
        }
    }

    Ok(DomainDescription {
        name,
        level,
        fluents,
        actions,
        propositions: labeled,
    })
}

fn name_list(p: &mut Parser) -> Result<Vec<String>, AtParseError> {
    let mut out = Vec::new();
    loop {
        let (w, _) = p.any_word("name")?;
        out.push(w);
        match p.next().map(|t| t.tok) {
            Some(Tok::Comma) => continue,
            Some(Tok::Dot) => break,
            _ => {
                p.at = p.at.saturating_sub(1);
                return p.fail("expected `,` or `.`");
            }
        }
    }
    Ok(out)
}

type Parsed = (Option<String>, PropositionKind, usize);

fn statement(
    p: &mut Parser,
    fluents: &[String],
    actions: &[String],
) -> Result<Parsed, AtParseError> {
    let line = p.here().0;
    // optional `label:` prefix
    let label = if matches!(p.tokens.get(p.at + 1).map(|t| &t.tok), Some(Tok::Colon)) {
        let (w, _) = p.any_word("label")?;
        p.next(); // colon
        Some(w)
    } else {
        None
    };

    let kind = proposition(p, fluents, actions)?;
    p.expect_tok(Tok::Dot, "`.` at end of proposition")?;
    Ok((label, kind, line))
}

fn proposition(
    p: &mut Parser,
    fluents: &[String],
    actions: &[String],
) -> Result<PropositionKind, AtParseError> {
    if p.eat_word("initially") {
        let what = fluent_expr(p, fluents)?;
        if p.peek_word() == Some("is") && p.word_at(1) == Some("observed") {
            p.next();
            p.next();
            let (conditions, absent) = obs_body(p, fluents)?;
            return Ok(PropositionKind::Observation {
                what,
                conditions,
                absent,
                after: Vec::new(),
            });
        }
        return Ok(PropositionKind::Initial { what });
    }

    // an action-led proposition: `A causes ...`, `A normally causes ...`,
    // `A abnormally causes ...`, `A is abnormal if before ...`
    if let Some(word) = p.peek_word() {
        if !is_keyword(word) {
            match p.word_at(1) {
                Some("causes") => {
                    let (action, line) = p.any_word("action")?;
                    check_declared(&action, actions, "action", line)?;
                    p.next();
                    return effect_tail(p, fluents, action, EffectFlavor::Plain);
                }
                Some("normally") | Some("abnormally") if p.word_at(2) == Some("causes") => {
                    let (action, line) = p.any_word("action")?;
                    check_declared(&action, actions, "action", line)?;
                    let flavor = if p.peek_word() == Some("normally") {
                        EffectFlavor::Normal
                    } else {
                        EffectFlavor::Abnormal
                    };
                    p.next();
                    p.next();
                    return effect_tail(p, fluents, action, flavor);
                }
                Some("is") if p.word_at(2) == Some("abnormal") => {
                    let (action, line) = p.any_word("action")?;
                    check_declared(&action, actions, "action", line)?;
                    p.next(); // is
                    p.next(); // abnormal
                    p.expect_word("if")?;
                    p.expect_word("before")?;
                    let before = fluent_list_until(p, fluents, &["after"])?;
                    p.expect_word("after")?;
                    let after = fluent_list_until(p, fluents, &[])?;
                    return Ok(PropositionKind::AbnormalCondition {
                        action,
                        before,
                        after,
                    });
                }
                Some("is") if p.word_at(2) == Some("more") => {
                    let (more, _) = p.any_word("label")?;
                    p.next(); // is
                    p.next(); // more
                    p.expect_word("preferred")?;
                    p.expect_word("than")?;
                    let (less, _) = p.any_word("label")?;
                    return Ok(PropositionKind::Preference { more, less });
                }
                _ => {}
            }
        }
    }

    // fluent-led proposition: `L is caused if ...` or `L is observed ...`
    let subject = fluent_expr(p, fluents)?;
    p.expect_word("is")?;
    match p.peek_word() {
        Some("caused") => {
            p.next();
            p.expect_word("if")?;
            let preconditions = fluent_list_until(p, fluents, &["with"])?;
            let absent = if p.eat_word("with") {
                p.expect_word("absence")?;
                fluent_list_until(p, fluents, &[])?
            } else {
                Vec::new()
            };
            Ok(PropositionKind::Causal {
                effect: subject,
                preconditions,
                absent,
            })
        }
        Some("observed") => {
            p.next();
            let (conditions, absent) = obs_body(p, fluents)?;
            let after = if p.eat_word("after") {
                action_list(p, actions)?
            } else {
                Vec::new()
            };
            Ok(PropositionKind::Observation {
                what: subject,
                conditions,
                absent,
                after,
            })
        }
        _ => p.fail("expected `caused` or `observed`"),
    }
}

enum EffectFlavor {
    Plain,
    Normal,
    Abnormal,
}

fn effect_tail(
    p: &mut Parser,
    fluents: &[String],
    action: String,
    flavor: EffectFlavor,
) -> Result<PropositionKind, AtParseError> {
    let effect = fluent_expr(p, fluents)?;
    let preconditions = if p.eat_word("if") {
        fluent_list_until(p, fluents, &[])?
    } else {
        Vec::new()
    };
    Ok(match flavor {
        EffectFlavor::Plain => PropositionKind::Effect {
            action,
            effect,
            preconditions,
        },
        EffectFlavor::Normal => PropositionKind::NormalEffect {
            action,
            effect,
            preconditions,
        },
        EffectFlavor::Abnormal => PropositionKind::AbnormalEffect {
            action,
            effect,
            preconditions,
        },
    })
}

fn obs_body(
    p: &mut Parser,
    fluents: &[String],
) -> Result<(Vec<FluentExpression>, Vec<FluentExpression>), AtParseError> {
    let conditions = if p.eat_word("if") {
        fluent_list_until(p, fluents, &["with", "after"])?
    } else {
        Vec::new()
    };
    let absent = if p.peek_word() == Some("with") {
        p.next();
        p.expect_word("absence")?;
        fluent_list_until(p, fluents, &["after"])?
    } else {
        Vec::new()
    };
    Ok((conditions, absent))
}

fn fluent_expr(
    p: &mut Parser,
    fluents: &[String],
) -> Result<FluentExpression, AtParseError> {
    let negated = matches!(p.peek().map(|t| &t.tok), Some(Tok::Neg));
    if negated {
        p.next();
    }
    let (name, line) = p.any_word("fluent name")?;
    check_declared(&name, fluents, "fluent", line)?;
    Ok(FluentExpression {
        fluent: name,
        negated,
    })
}

/// Comma-separated fluent expressions, stopping before `.`, any stop word,
/// or an empty list.
fn fluent_list_until(
    p: &mut Parser,
    fluents: &[String],
    stops: &[&str],
) -> Result<Vec<FluentExpression>, AtParseError> {
    let mut out = Vec::new();
    loop {
        match p.peek().map(|t| &t.tok) {
            Some(Tok::Dot) | None => break,
            Some(Tok::Word(w)) if stops.contains(&w.as_str()) && out.is_empty() => break,
            _ => {}
        }
        out.push(fluent_expr(p, fluents)?);
        match p.peek().map(|t| &t.tok) {
            Some(Tok::Comma) => {
                p.next();
            }
            _ => break,
        }
    }
    Ok(out)
}

fn action_list(p: &mut Parser, actions: &[String]) -> Result<Vec<String>, AtParseError> {
    let mut out = Vec::new();
    loop {
        let (name, line) = p.any_word("action name")?;
        check_declared(&name, actions, "action", line)?;
        out.push(name);
        match p.peek().map(|t| &t.tok) {
            Some(Tok::Comma) => {
                p.next();
            }
            _ => break,
        }
    }
    Ok(out)
}

fn check_declared(
    name: &str,
    declared: &[String],
    what: &'static str,
    line: usize,
) -> Result<(), AtParseError> {
    if declared.iter().any(|d| d == name) {
        Ok(())
    } else {
        Err(AtParseError::Undeclared {
            line,
            what,
            name: name.to_string(),
        })
    }
}

/// Parse a query: `initially L` or `L after A1, ..., Al`.
pub fn parse_query(
    input: &str,
    domain: &DomainDescription,
) -> Result<ValueQuery, AtParseError> {
    let tokens = lex(input)?;
    let mut p = Parser { tokens, at: 0 };
    if p.eat_word("initially") {
        let what = fluent_expr(&mut p, &domain.fluents)?;
        if p.peek().is_some() {
            return p.fail("trailing input after query");
        }
        return Ok(ValueQuery {
            what,
            after: Vec::new(),
        });
    }
    let what = fluent_expr(&mut p, &domain.fluents)?;
    let after = if p.eat_word("after") {
        action_list(&mut p, &domain.actions)?
    } else {
        Vec::new()
    };
    if p.peek().is_some() {
        return p.fail("trailing input after query");
    }
    Ok(ValueQuery { what, after })
}

/// Canonical text of a domain; `parse_domain` inverts it up to label
/// assignment.
pub fn render_domain(d: &DomainDescription) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {} : {}.", d.name, d.level);
    if !d.fluents.is_empty() {
        let _ = writeln!(out, "fluents {}.", d.fluents.join(", "));
    }
    if !d.actions.is_empty() {
        let _ = writeln!(out, "actions {}.", d.actions.join(", "));
    }
    for prop in &d.propositions {
        let _ = writeln!(out, "{}: {}.", prop.label, render_kind(&prop.kind));
    }
    out
}

fn render_fexprs(list: &[FluentExpression]) -> String {
    list.iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_kind(kind: &PropositionKind) -> String {
    match kind {
        PropositionKind::Initial { what } => format!("initially {what}"),
        PropositionKind::Causal {
            effect,
            preconditions,
            absent,
        } => {
            let mut s = format!("{effect} is caused if");
            if !preconditions.is_empty() {
                s.push(' ');
                s.push_str(&render_fexprs(preconditions));
            }
            if !absent.is_empty() {
                s.push_str(" with absence ");
                s.push_str(&render_fexprs(absent));
            }
            s
        }
        PropositionKind::Effect {
            action,
            effect,
            preconditions,
        } => render_effect(action, "causes", effect, preconditions),
        PropositionKind::NormalEffect {
            action,
            effect,
            preconditions,
        } => render_effect(action, "normally causes", effect, preconditions),
        PropositionKind::AbnormalEffect {
            action,
            effect,
            preconditions,
        } => render_effect(action, "abnormally causes", effect, preconditions),
        PropositionKind::Observation {
            what,
            conditions,
            absent,
            after,
        } => {
            let mut s = if after.is_empty() {
                format!("initially {what} is observed")
            } else {
                format!("{what} is observed")
            };
            if !conditions.is_empty() {
                s.push_str(" if ");
                s.push_str(&render_fexprs(conditions));
            }
            if !absent.is_empty() {
                s.push_str(" with absence ");
                s.push_str(&render_fexprs(absent));
            }
            if !after.is_empty() {
                s.push_str(" after ");
                s.push_str(&after.join(", "));
            }
            s
        }
        PropositionKind::AbnormalCondition {
            action,
            before,
            after,
        } => format!(
            "{action} is abnormal if before {} after {}",
            render_fexprs(before),
            render_fexprs(after)
        ),
        PropositionKind::Preference { more, less } => {
            format!("{more} is more preferred than {less}")
        }
    }
}

fn render_effect(
    action: &str,
    verb: &str,
    effect: &FluentExpression,
    preconditions: &[FluentExpression],
) -> String {
    let mut s = format!("{action} {verb} {effect}");
    if !preconditions.is_empty() {
        s.push_str(" if ");
        s.push_str(&render_fexprs(preconditions));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const SWITCH_POWER: &str = "\
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

    pub const SHOOTING_1: &str = "\
domain Shooting-1 : AT1.
fluents Alive, Loaded.
actions Shoot, Wait.

initially Alive is observed.
initially -Loaded is observed with absence Loaded.
-Alive is observed after Shoot, Wait.
Shoot causes -Alive if Loaded.
";

    pub const SHOOTING_2: &str = "\
domain Shooting-2 : AT2.
fluents Alive, Loaded.
actions Shoot.

initially Loaded is observed.
initially Alive is observed.
Shoot normally causes -Alive if Loaded.
Shoot is abnormal if before Loaded after Alive.
";

    #[test]
    fn switch_power_parses_to_six_propositions() {
        let d = parse_domain(SWITCH_POWER).unwrap();
        assert_eq!(d.name, "Switch-Power");
        assert_eq!(d.level, Level::At0);
        assert_eq!(d.propositions.len(), 6);
        assert_eq!(d.propositions[0].label, "p1");
        let causal = &d.propositions[3];
        match &causal.kind {
            PropositionKind::Causal {
                effect,
                preconditions,
                absent,
            } => {
                assert_eq!(effect, &FluentExpression::pos("On"));
                assert_eq!(preconditions, &[FluentExpression::pos("Switch")]);
                assert_eq!(absent, &[FluentExpression::neg("On")]);
            }
            other => panic!("expected causal proposition, got {other:?}"),
        }
    }

    #[test]
    fn shooting1_parses_observations() {
        let d = parse_domain(SHOOTING_1).unwrap();
        assert_eq!(d.level, Level::At1);
        let obs: Vec<_> = d
            .propositions
            .iter()
            .filter(|p| matches!(p.kind, PropositionKind::Observation { .. }))
            .collect();
        assert_eq!(obs.len(), 3);
        match &obs[2].kind {
            PropositionKind::Observation { what, after, .. } => {
                assert_eq!(what, &FluentExpression::neg("Alive"));
                assert_eq!(after, &["Shoot".to_string(), "Wait".to_string()]);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn shooting2_parses_abnormal_condition() {
        let d = parse_domain(SHOOTING_2).unwrap();
        assert_eq!(d.level, Level::At2);
        match &d.propositions[3].kind {
            PropositionKind::AbnormalCondition {
                action,
                before,
                after,
            } => {
                assert_eq!(action, "Shoot");
                assert_eq!(before, &[FluentExpression::pos("Loaded")]);
                assert_eq!(after, &[FluentExpression::pos("Alive")]);
            }
            other => panic!("expected abnormal condition, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_symbol_is_an_error() {
        let text = "domain D : AT0.\nfluents F.\nactions X.\nX causes F if G.\n";
        match parse_domain(text) {
            Err(AtParseError::Undeclared { what, name, .. }) => {
                assert_eq!(what, "fluent");
                assert_eq!(name, "G");
            }
            other => panic!("expected undeclared error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_carries_location() {
        let text = "domain D : AT0.\nfluents F.\ninitially F\n";
        match parse_domain(text) {
            Err(AtParseError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_label_is_an_error() {
        let text = "domain D : AT0.\nfluents F.\nl: initially F.\nl: initially -F.\n";
        assert!(matches!(
            parse_domain(text),
            Err(AtParseError::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn empty_precondition_causal_parses() {
        let text = "domain D : AT0.\nfluents Fly.\nFly is caused if with absence -Fly.\n";
        let d = parse_domain(text).unwrap();
        match &d.propositions[0].kind {
            PropositionKind::Causal {
                preconditions,
                absent,
                ..
            } => {
                assert!(preconditions.is_empty());
                assert_eq!(absent, &[FluentExpression::neg("Fly")]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn render_parse_roundtrip() {
        for text in [SWITCH_POWER, SHOOTING_1, SHOOTING_2] {
            let d = parse_domain(text).unwrap();
            let rendered = render_domain(&d);
            let d2 = parse_domain(&rendered).unwrap();
            assert_eq!(d, d2);
        }
    }

    #[test]
    fn query_forms() {
        let d = parse_domain(SWITCH_POWER).unwrap();
        let q = parse_query("-On after Cut-Power", &d).unwrap();
        assert_eq!(q.what, FluentExpression::neg("On"));
        assert_eq!(q.after, vec!["Cut-Power".to_string()]);
        let q = parse_query("initially Power", &d).unwrap();
        assert!(q.after.is_empty());
        assert!(parse_query("On after Fly", &d).is_err());
    }

    #[test]
    fn preference_parses() {
        let text = "\
domain D : AT0.
fluents F, G.
c1: F is caused if with absence -F.
c2: -F is caused if G with absence F.
c2 is more preferred than c1.
";
        let d = parse_domain(text).unwrap();
        let prefs: Vec<_> = d.preferences().collect();
        assert_eq!(prefs, vec![("c2", "c1")]);
    }
}
