//! Canonical pretty-printer.
//!
//! Output re-parses to a structurally equal knowledge base, and formatting is
//! idempotent. Parentheses are emitted only where precedence (`not` > `and` >
//! `or`, binary operators left-associative) would otherwise change the tree.

use std::fmt::Write;

use crate::lexer::quote;
use crate::model::{Action, Condition, KnowledgeBase, Literal, Parameter, Section};

pub fn format_kb(kb: &KnowledgeBase) -> String {
    let mut blocks = Vec::new();
    if kb.has_title() {
        blocks.push(format!("title {}\n", quote(kb.title())));
    }
    blocks.extend(kb.parameters().iter().map(format_parameter));
    blocks.extend(kb.sections().iter().map(format_section));
    blocks.join("\n")
}

fn format_parameter(p: &Parameter) -> String {
    let mut out = format!("parameter {}: {}\n", p.name(), p.ptype());
    if let Some(q) = p.question() {
        let _ = writeln!(out, "  question {}", quote(q));
    }
    if p.values().len() > 0 {
        let _ = writeln!(out, "  values {}", p.values().collect::<Vec<_>>().join(", "));
    }
    out
}

fn format_section(s: &Section) -> String {
    if s.rules().is_empty() {
        return format!("section {} {{}}\n", s.name());
    }
    let mut out = format!("section {} {{\n", s.name());
    for rule in s.rules() {
        out.push_str("  ");
        match rule.condition() {
            Condition::True => out.push_str("always"),
            c => {
                out.push_str("if ");
                out.push_str(&format_condition(c));
            }
        }
        out.push_str(" do ");
        let actions: Vec<String> = rule.actions().iter().map(format_action).collect();
        out.push_str(&actions.join(", "));
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

pub fn format_action(a: &Action) -> String {
    match a {
        Action::Advice(text) => format!("advice {}", quote(text)),
        Action::Goto(target) => format!("goto {}", target.value),
        Action::Set { param, value } => format!("set {} := {}", param.value, format_literal(&value.value)),
        Action::Stop => "stop".to_owned(),
    }
}

pub fn format_literal(l: &Literal) -> String {
    match l {
        Literal::Text(s) => quote(s),
        // `Display` for f64 is the shortest round-tripping decimal, never exponent form.
        Literal::Number(n) => n.to_string(),
        Literal::Ident(s) => s.clone(),
        Literal::Bool(b) => b.to_string(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Or,
    And,
    Atom,
}

pub fn format_condition(c: &Condition) -> String {
    let mut out = String::new();
    write_condition(&mut out, c);
    out
}

fn prec(c: &Condition) -> Prec {
    match c {
        Condition::Or(..) => Prec::Or,
        Condition::And(..) => Prec::And,
        // `not x` is only ever followed by an atom, so it never needs wrapping
        // itself except as the operand of another `not`.
        _ => Prec::Atom,
    }
}

fn write_condition(out: &mut String, c: &Condition) {
    match c {
        Condition::True => out.push_str("true"),
        Condition::False => out.push_str("false"),
        Condition::Param(p) => out.push_str(&p.value),
        Condition::Compare { param, op, literal } => {
            let _ = write!(out, "{} {} {}", param.value, op, format_literal(&literal.value));
        }
        Condition::Not(inner) => {
            out.push_str("not ");
            let bare = prec(inner) == Prec::Atom && !matches!(**inner, Condition::Not(_));
            write_operand(out, inner, !bare);
        }
        Condition::And(l, r) => {
            write_operand(out, l, prec(l) < Prec::And);
            out.push_str(" and ");
            write_operand(out, r, prec(r) <= Prec::And);
        }
        Condition::Or(l, r) => {
            write_operand(out, l, false);
            out.push_str(" or ");
            write_operand(out, r, prec(r) <= Prec::Or);
        }
    }
}

fn write_operand(out: &mut String, c: &Condition, parens: bool) {
    if parens {
        out.push('(');
        write_condition(out, c);
        out.push(')');
    } else {
        write_condition(out, c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_condition, parse_kb};

    fn fmt(src: &str) -> String {
        format_condition(&parse_condition(src).unwrap())
    }

    #[test]
    fn empty_kb() {
        assert_eq!(format_kb(&KnowledgeBase::default()), "");
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(fmt("(a and b) or c"), "a and b or c");
        assert_eq!(fmt("a and (b or c)"), "a and (b or c)");
        assert_eq!(fmt("a or (b or c)"), "a or (b or c)");
        assert_eq!(fmt("(a or b) or c"), "a or b or c");
        assert_eq!(fmt("a and (b and c)"), "a and (b and c)");
        assert_eq!(fmt("not (not a)"), "not (not a)");
        assert_eq!(fmt("not (a = 1)"), "not a = 1");
        assert_eq!(fmt("((not a)) and not (b or c)"), "not a and not (b or c)");
    }

    #[test]
    fn canonical_layout() {
        let src = "section s{if a do advice \"x\",stop always   do goto t}\n\
                   parameter a:boolean\ntitle \"T\" section t {}";
        let expected = "title \"T\"\n\nparameter a: boolean\n\nsection s {\n  if a do advice \"x\", stop\n  always do goto t\n}\n\nsection t {}\n";
        assert_eq!(format_kb(&parse_kb(src).kb), expected);
    }

    #[test]
    fn literal_forms() {
        assert_eq!(format_literal(&Literal::Number(0.1)), "0.1");
        assert_eq!(format_literal(&Literal::Number(-3.0)), "-3");
        assert_eq!(format_literal(&Literal::Number(1e21)), "1000000000000000000000");
        assert_eq!(format_literal(&Literal::Text("a\"b".into())), "\"a\\\"b\"");
    }
}
