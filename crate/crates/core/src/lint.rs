//! Static checks over a parsed knowledge base.
//!
//! | code | severity | meaning                                              |
//! |------|----------|------------------------------------------------------|
//! | E100 | error    | no `start` section                                   |
//! | E101 | error    | `goto` names an undefined section                    |
//! | E102 | error    | condition or `set` names an undefined parameter      |
//! | E103 | error    | type mismatch                                        |
//! | E104 | error    | category literal is not a declared value             |
//! | W200 | warning  | section unreachable from `start`                     |
//! | W201 | warning  | parameter never referenced                           |
//! | W202 | warning  | section has no rules                                 |
//!
//! Reachability is syntactic: every `goto` counts as an edge whether or not
//! its rule's condition can ever hold.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::diagnostic::{Code, Diagnostic, Severity};
use crate::model::{Action, CmpOp, Condition, KnowledgeBase, Literal, ParamType, Span, Spanned};

pub const START_SECTION: &str = "start";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    #[serde(flatten)]
    pub diagnostic: Diagnostic,
    /// Parameter or section the finding is about.
    pub subject: Option<String>,
}

impl Finding {
    fn new(code: Code, message: String, span: Span, subject: Option<&str>) -> Self {
        Finding {
            diagnostic: Diagnostic::new(code, message, span),
            subject: subject.map(str::to_owned),
        }
    }

    pub fn code(&self) -> Code {
        self.diagnostic.code
    }

    pub fn span(&self) -> Span {
        self.diagnostic.span
    }

    pub fn is_error(&self) -> bool {
        self.diagnostic.severity == Severity::Error
    }

    pub fn render(&self, file: &str) -> String {
        self.diagnostic.render(file)
    }
}

/// Runs every check. Findings are ordered by span, then code.
pub fn lint(kb: &KnowledgeBase) -> Vec<Finding> {
    let mut findings = Vec::new();

    if kb.lookup_section(START_SECTION).is_none() {
        findings.push(Finding::new(
            Code::E100,
            "missing start section".into(),
            Span::START,
            None,
        ));
    }

    let mut referenced: HashSet<&str> = HashSet::new();
    for section in kb.sections() {
        for rule in section.rules() {
            check_condition(kb, rule.condition(), &mut referenced, &mut findings);
            for action in rule.actions() {
                match action {
                    Action::Goto(target) => {
                        if kb.lookup_section(&target.value).is_none() {
                            findings.push(Finding::new(
                                Code::E101,
                                format!("goto targets undefined section `{}`", target.value),
                                target.span,
                                Some(&target.value),
                            ));
                        }
                    }
                    Action::Set { param, value } => {
                        referenced.insert(&param.value);
                        check_literal(kb, param, CmpOp::Eq, value, &mut findings);
                    }
                    Action::Advice(_) | Action::Stop => {}
                }
            }
        }
    }

    let reachable = reachable_sections(kb);
    for section in kb.sections() {
        let name = section.name();
        if name != START_SECTION && !reachable.contains(name) {
            findings.push(Finding::new(
                Code::W200,
                format!("section `{name}` is unreachable"),
                section.name_span(),
                Some(name),
            ));
        }
        if section.rules().is_empty() {
            findings.push(Finding::new(
                Code::W202,
                format!("section `{name}` has no rules"),
                section.name_span(),
                Some(name),
            ));
        }
    }

    for param in kb.parameters() {
        if !referenced.contains(param.name()) {
            findings.push(Finding::new(
                Code::W201,
                format!("parameter `{}` is never referenced", param.name()),
                param.name_span(),
                Some(param.name()),
            ));
        }
    }

    findings.sort_by_key(|f| (f.span(), f.code()));
    findings
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(Finding::is_error)
}

fn check_condition<'a>(
    kb: &KnowledgeBase,
    cond: &'a Condition,
    referenced: &mut HashSet<&'a str>,
    findings: &mut Vec<Finding>,
) {
    match cond {
        Condition::True | Condition::False => {}
        Condition::Param(name) => {
            referenced.insert(&name.value);
            match kb.lookup_parameter(&name.value) {
                None => findings.push(undefined_parameter(name)),
                Some(p) if p.ptype() != ParamType::Boolean => findings.push(Finding::new(
                    Code::E103,
                    format!(
                        "`{}` is a {} parameter and cannot be used as a condition on its own",
                        name.value,
                        p.ptype()
                    ),
                    name.span,
                    Some(&name.value),
                )),
                Some(_) => {}
            }
        }
        Condition::Compare { param, op, literal } => {
            referenced.insert(&param.value);
            check_literal(kb, param, *op, literal, findings);
        }
        Condition::Not(inner) => check_condition(kb, inner, referenced, findings),
        Condition::And(l, r) | Condition::Or(l, r) => {
            check_condition(kb, l, referenced, findings);
            check_condition(kb, r, referenced, findings);
        }
    }
}

fn undefined_parameter(name: &Spanned<String>) -> Finding {
    Finding::new(
        Code::E102,
        format!("undefined parameter `{}`", name.value),
        name.span,
        Some(&name.value),
    )
}

/// Checks `param op literal`; assignments are checked as `=`.
fn check_literal(
    kb: &KnowledgeBase,
    param: &Spanned<String>,
    op: CmpOp,
    literal: &Spanned<Literal>,
    findings: &mut Vec<Finding>,
) {
    let Some(p) = kb.lookup_parameter(&param.value) else {
        findings.push(undefined_parameter(param));
        return;
    };
    let subject = Some(param.value.as_str());
    if op.is_ordering() && p.ptype() != ParamType::Number {
        findings.push(Finding::new(
            Code::E103,
            format!(
                "`{op}` needs a number parameter, `{}` is {}",
                param.value,
                p.ptype()
            ),
            param.span,
            subject,
        ));
    }
    if literal.value.ptype() != p.ptype() {
        findings.push(Finding::new(
            Code::E103,
            format!(
                "`{}` is a {} parameter but the value is a {} literal",
                param.value,
                p.ptype(),
                literal.value.ptype()
            ),
            literal.span,
            subject,
        ));
        return;
    }
    if let Literal::Ident(value) = &literal.value {
        if !p.has_value(value) {
            findings.push(Finding::new(
                Code::E104,
                format!("`{value}` is not a declared value of `{}`", param.value),
                literal.span,
                subject,
            ));
        }
    }
}

/// Sections reachable from `start` over `goto` edges. Empty without `start`.
pub fn reachable_sections(kb: &KnowledgeBase) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let Some(start) = kb.lookup_section(START_SECTION) else {
        return seen;
    };
    let mut stack = vec![start];
    seen.insert(start.name().to_owned());
    while let Some(section) = stack.pop() {
        let targets = section
            .rules()
            .iter()
            .flat_map(|r| r.actions())
            .filter_map(|a| match a {
                Action::Goto(t) => Some(t.value.as_str()),
                _ => None,
            });
        for target in targets {
            if let Some(next) = kb.lookup_section(target) {
                if seen.insert(target.to_owned()) {
                    stack.push(next);
                }
            }
        }
    }
    seen
}
