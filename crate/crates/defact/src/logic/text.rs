//! Line-oriented text form for programs: one rule per line,
//! `name: head <- pos1, ..., not nafk.` with classical negation written
//! `-P(...)`, followed by an optional `order { a < b. }` block.
//!
//! Lowercase-initial identifiers are variables (sorted by the f/a/s
//! convention), uppercase-initial identifiers are constants. Constant
//! sorts are recovered from argument positions of the fixed action-domain
//! predicates; everything else is object-sorted.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Literal, LogicError, Order, Plp, Program, Rule, Sign, Sort, Term, RESULT, S0};

pub const HOLDS: &str = "Holds";
pub const CAUSED_P: &str = "Caused+";
pub const CAUSED_N: &str = "Caused-";
pub const EFFECT_P: &str = "Effect+";
pub const EFFECT_N: &str = "Effect-";
pub const ABEFFECT_P: &str = "AbEffect+";
pub const ABEFFECT_N: &str = "AbEffect-";
pub const AB: &str = "Ab";

fn positional_sorts(symbol: &str) -> Option<&'static [Sort]> {
    match symbol {
        HOLDS | CAUSED_P | CAUSED_N | EFFECT_P | EFFECT_N | ABEFFECT_P | ABEFFECT_N => {
            Some(&[Sort::Fluent, Sort::Situation])
        }
        AB => Some(&[Sort::Action, Sort::Situation]),
        RESULT => Some(&[Sort::Action, Sort::Situation]),
        _ => None,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

fn err(line: usize, message: impl Into<String>) -> TextError {
    TextError::Parse {
        line,
        message: message.into(),
    }
}

/// Render a PLP in canonical text form. `parse_program` inverts this
/// byte-for-byte.
pub fn render_program(plp: &Plp) -> String {
    let mut out = String::new();
    for rule in plp.program.iter() {
        let _ = writeln!(out, "{rule}");
    }
    if !plp.order.is_empty() {
        let _ = writeln!(out, "order {{");
        for (a, b) in &plp.order {
            let _ = writeln!(out, "  {a} < {b}.");
        }
        let _ = writeln!(out, "}}");
    }
    out
}

/// Parse the text form of a PLP.
pub fn parse_program(input: &str) -> Result<Plp, TextError> {
    let mut rules = Vec::new();
    let mut order = Order::new();
    let mut in_order = false;
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        if in_order {
            if line == "}" {
                in_order = false;
                continue;
            }
            let entry = line
                .strip_suffix('.')
                .ok_or_else(|| err(line_no, "order entry must end with '.'"))?;
            let (a, b) = entry
                .split_once('<')
                .ok_or_else(|| err(line_no, "order entry must be `name < name.`"))?;
            order.insert((a.trim().to_string(), b.trim().to_string()));
            continue;
        }
        if let Some(rest) = line.strip_prefix("order") {
            let rest = rest.trim();
            if let Some(inner) = rest.strip_prefix('{') {
                in_order = true;
                // allow the single-line form `order { a < b. }`
                let inner = inner.trim();
                let inner = match inner.strip_suffix('}') {
                    Some(i) => {
                        in_order = false;
                        i.trim()
                    }
                    None => inner,
                };
                for entry in inner.split('.') {
                    let entry = entry.trim();
                    if entry.is_empty() {
                        continue;
                    }
                    let (a, b) = entry
                        .split_once('<')
                        .ok_or_else(|| err(line_no, "order entry must be `name < name.`"))?;
                    order.insert((a.trim().to_string(), b.trim().to_string()));
                }
                continue;
            }
        }
        rules.push(parse_rule_line(line, line_no)?);
    }
    let program = Program::new(rules).map_err(TextError::Logic)?;
    Plp::new(program, order).map_err(TextError::Logic)
}

/// Parse a single `name: ...` rule line.
pub fn parse_rule(line: &str) -> Result<Rule, TextError> {
    parse_rule_line(line.trim(), 1)
}

fn parse_rule_line(line: &str, line_no: usize) -> Result<Rule, TextError> {
    let (name, rest) = line
        .split_once(':')
        .ok_or_else(|| err(line_no, "rule must start with `name:`"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(err(line_no, "empty rule name"));
    }
    let body_text = rest
        .trim()
        .strip_suffix('.')
        .ok_or_else(|| err(line_no, "rule must end with '.'"))?
        .trim();

    let (head_text, tail) = match body_text.split_once("<-") {
        Some((h, t)) => (h.trim(), Some(t.trim())),
        None => (body_text, None),
    };

    let head = if head_text.is_empty() {
        None
    } else {
        Some(parse_literal(head_text, line_no)?)
    };

    let mut pos = Vec::new();
    let mut naf = Vec::new();
    if let Some(tail) = tail {
        for part in split_top_level(tail) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            if let Some(negated) = part.strip_prefix("not ") {
                naf.push(parse_literal(negated.trim(), line_no)?);
            } else {
                pos.push(parse_literal(part, line_no)?);
            }
        }
    }
    if head.is_none() && pos.is_empty() && naf.is_empty() {
        return Err(err(line_no, "rule has neither head nor body"));
    }
    Ok(Rule::new(name, head, pos, naf))
}

/// Split on commas that are not nested inside parentheses.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

fn parse_literal(text: &str, line_no: usize) -> Result<Literal, TextError> {
    let (sign, rest) = match text.strip_prefix('-') {
        Some(r) => (Sign::Neg, r.trim()),
        None => (Sign::Pos, text),
    };
    let (predicate, args_text) = match rest.find('(') {
        Some(open) => {
            let close = rest
                .rfind(')')
                .ok_or_else(|| err(line_no, format!("unbalanced parens in `{text}`")))?;
            (&rest[..open], Some(&rest[open + 1..close]))
        }
        None => (rest, None),
    };
    let predicate = predicate.trim();
    if predicate.is_empty() {
        return Err(err(line_no, format!("missing predicate in `{text}`")));
    }
    let mut args = Vec::new();
    if let Some(args_text) = args_text {
        let expected = positional_sorts(predicate);
        for (i, part) in split_top_level(args_text).into_iter().enumerate() {
            let sort = expected
                .and_then(|s| s.get(i).copied())
                .unwrap_or(Sort::Object);
            args.push(parse_term(part.trim(), sort, line_no)?);
        }
    }
    Ok(Literal {
        sign,
        predicate: predicate.to_string(),
        args,
    })
}

fn parse_term(text: &str, expected: Sort, line_no: usize) -> Result<Term, TextError> {
    if let Some(open) = text.find('(') {
        let close = text
            .rfind(')')
            .ok_or_else(|| err(line_no, format!("unbalanced parens in `{text}`")))?;
        let fun = text[..open].trim().to_string();
        let inner = &text[open + 1..close];
        let expected_args = positional_sorts(&fun);
        let mut args = Vec::new();
        for (i, part) in split_top_level(inner).into_iter().enumerate() {
            let sort = expected_args
                .and_then(|s| s.get(i).copied())
                .unwrap_or(Sort::Object);
            args.push(parse_term(part.trim(), sort, line_no)?);
        }
        return Ok(Term::App(fun, args));
    }
    let name = text.trim();
    if name.is_empty() {
        return Err(err(line_no, "empty term"));
    }
    let first = name.chars().next().unwrap();
    if first.is_lowercase() {
        Ok(Term::var(name))
    } else if name == S0 {
        Ok(Term::situation_const(S0))
    } else {
        Ok(Term::Const(name.to_string(), expected))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_program;
    use super::*;

    #[test]
    fn parses_facts_rules_and_constraints() {
        let plp = parse_program(
            "N1: A.\nN2: B <- A, not C.\nN3: <- B, not D.\norder { N1 < N2. }\n",
        )
        .unwrap();
        assert_eq!(plp.program.len(), 3);
        assert!(plp.program.get("N3").unwrap().is_constraint());
        assert!(plp.preferred("N1", "N2"));
    }

    #[test]
    fn render_parse_roundtrip_is_identity() {
        let text = "\
N1: Fly(x) <- Bird(x), not -Fly(x).
N2: -Fly(x) <- Penguin(x), not Fly(x).
N3: Bird(Tweety).
N4: Penguin(Tweety).
order {
  N2 < N1.
}
";
        let plp = parse_program(text).unwrap();
        let rendered = render_program(&plp);
        assert_eq!(rendered, text);
        assert_eq!(parse_program(&rendered).unwrap(), plp);
    }

    #[test]
    fn situation_terms_get_sorts_back() {
        let plp = parse_program(
            "E: Effect-(Power,Result(Cut-Power,s)).\nH: Holds(f,s) <- Caused+(f,s).\n",
        )
        .unwrap();
        let e = plp.program.get("E").unwrap();
        let head = e.head.as_ref().unwrap();
        assert_eq!(head.args[0].sort(), Sort::Fluent);
        assert_eq!(head.args[1].sort(), Sort::Situation);
        match &head.args[1] {
            Term::App(f, args) => {
                assert_eq!(f, RESULT);
                assert_eq!(args[0], Term::action("Cut-Power"));
            }
            other => panic!("expected Result term, got {other:?}"),
        }
        let rendered = render_program(&plp);
        assert_eq!(parse_program(&rendered).unwrap(), plp);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_program("N1 A.\n").is_err());
        assert!(parse_program("N1: A\n").is_err());
        assert!(parse_program("N1: .\n").is_err());
    }
}
