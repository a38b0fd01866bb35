//! In-memory representation of a knowledge base.
//!
//! A [`KnowledgeBase`] is a title, an ordered set of typed [`Parameter`]s and
//! an ordered set of [`Section`]s, each holding if-do [`Rule`]s. Names are
//! case-sensitive ASCII identifiers. Everything here is immutable once built;
//! the only way in is [`KbBuilder`] (or [`KnowledgeBase::new`]), which refuses
//! duplicate names.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagnostic::{Code, Diagnostic};

/// 1-based source position of a token.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub const START: Span = Span { line: 1, column: 1 };

    pub fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A value tagged with the position it was read from.
///
/// Spans are source metadata: two `Spanned` values compare equal when their
/// payloads do, wherever they came from. This is what makes a reformatted
/// knowledge base structurally equal to the original.
#[derive(Clone, Debug)]
pub struct Spanned<T> {
    pub value: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(value: T, span: Span) -> Self {
        Spanned { value, span }
    }
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T: Eq> Eq for Spanned<T> {}

impl Spanned<String> {
    pub fn as_str(&self) -> &str {
        &self.value
    }
}

/// Returns true for `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamType {
    Boolean,
    Text,
    Number,
    Category,
}

impl ParamType {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamType::Boolean => "boolean",
            ParamType::Text => "text",
            ParamType::Number => "number",
            ParamType::Category => "category",
        }
    }
}

impl fmt::Display for ParamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed variable whose value is asked from the user on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameter {
    name: Spanned<String>,
    ptype: ParamType,
    question: Option<String>,
    values: Vec<Spanned<String>>,
}

impl Parameter {
    /// Builds a parameter, checking that `values` is non-empty and duplicate
    /// free exactly when `ptype` is category.
    pub fn new(
        name: Spanned<String>,
        ptype: ParamType,
        question: Option<String>,
        values: Vec<Spanned<String>>,
    ) -> Result<Self, Diagnostic> {
        if ptype == ParamType::Category {
            if values.is_empty() {
                return Err(Diagnostic::error(
                    Code::E001,
                    format!("category parameter `{}` needs a `values` list", name.value),
                    name.span,
                ));
            }
            for (i, v) in values.iter().enumerate() {
                if values[..i].iter().any(|w| w.value == v.value) {
                    return Err(Diagnostic::error(
                        Code::E002,
                        format!("duplicate value `{}` in parameter `{}`", v.value, name.value),
                        v.span,
                    ));
                }
            }
        } else if let Some(first) = values.first() {
            return Err(Diagnostic::error(
                Code::E001,
                format!(
                    "only category parameters take `values`; `{}` is {ptype}",
                    name.value
                ),
                first.span,
            ));
        }
        Ok(Parameter {
            name,
            ptype,
            question,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name.value
    }

    pub fn name_span(&self) -> Span {
        self.name.span
    }

    pub fn ptype(&self) -> ParamType {
        self.ptype
    }

    pub fn question(&self) -> Option<&str> {
        self.question.as_deref()
    }

    /// Declared category values, in declaration order. Empty for other types.
    pub fn values(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.values.iter().map(|v| v.value.as_str())
    }

    pub fn has_value(&self, value: &str) -> bool {
        self.values.iter().any(|v| v.value == value)
    }

    /// The prompt shown when asking for this parameter.
    pub fn prompt(&self) -> String {
        match &self.question {
            Some(q) => q.clone(),
            None => format!("Value of {}?", self.name.value),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    name: Spanned<String>,
    rules: Vec<Rule>,
}

impl Section {
    pub fn new(name: Spanned<String>, rules: Vec<Rule>) -> Self {
        Section { name, rules }
    }

    pub fn name(&self) -> &str {
        &self.name.value
    }

    pub fn name_span(&self) -> Span {
        self.name.span
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }
}

/// An if-do pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    condition: Condition,
    actions: Vec<Action>,
}

impl Rule {
    /// Returns `None` when `actions` is empty.
    pub fn new(condition: Condition, actions: Vec<Action>) -> Option<Self> {
        if actions.is_empty() {
            None
        } else {
            Some(Rule { condition, actions })
        }
    }

    pub fn condition(&self) -> &Condition {
        &self.condition
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    Advice(String),
    Goto(Spanned<String>),
    Set {
        param: Spanned<String>,
        value: Spanned<Literal>,
    },
    Stop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Boolean expression over parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Condition {
    True,
    False,
    /// Bare reference to a boolean parameter.
    Param(Spanned<String>),
    Compare {
        param: Spanned<String>,
        op: CmpOp,
        literal: Spanned<Literal>,
    },
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Condition) -> Self {
        Condition::Not(Box::new(c))
    }

    pub fn and(l: Condition, r: Condition) -> Self {
        Condition::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Condition, r: Condition) -> Self {
        Condition::Or(Box::new(l), Box::new(r))
    }

    /// Reference to a parameter with a dummy span; handy for building ASTs by hand.
    pub fn param(name: &str) -> Self {
        Condition::Param(Spanned::new(name.to_owned(), Span::START))
    }

    pub fn compare(name: &str, op: CmpOp, literal: Literal) -> Self {
        Condition::Compare {
            param: Spanned::new(name.to_owned(), Span::START),
            op,
            literal: Spanned::new(literal, Span::START),
        }
    }

    /// Every parameter reference in evaluation order, with its span.
    pub fn param_refs(&self) -> Vec<&Spanned<String>> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a Spanned<String>>) {
        match self {
            Condition::True | Condition::False => {}
            Condition::Param(p) | Condition::Compare { param: p, .. } => out.push(p),
            Condition::Not(c) => c.collect_refs(out),
            Condition::And(l, r) | Condition::Or(l, r) => {
                l.collect_refs(out);
                r.collect_refs(out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Text(String),
    /// Always finite.
    Number(f64),
    /// A category value.
    Ident(String),
    Bool(bool),
}

impl Literal {
    /// The parameter type this literal can be compared with or assigned to.
    pub fn ptype(&self) -> ParamType {
        match self {
            Literal::Text(_) => ParamType::Text,
            Literal::Number(_) => ParamType::Number,
            Literal::Ident(_) => ParamType::Category,
            Literal::Bool(_) => ParamType::Boolean,
        }
    }
}

/// Raised when a name is added twice, or is already used by the other kind of item.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("duplicate name `{name}` at {span}")]
pub struct DuplicateName {
    pub name: String,
    pub span: Span,
}

impl From<DuplicateName> for Diagnostic {
    fn from(d: DuplicateName) -> Self {
        Diagnostic::error(Code::E002, format!("duplicate name `{}`", d.name), d.span)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Item {
    Parameter(usize),
    Section(usize),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KnowledgeBase {
    title: Option<String>,
    parameters: Vec<Parameter>,
    sections: Vec<Section>,
    names: HashMap<String, Item>,
}

impl KnowledgeBase {
    pub fn new(
        title: Option<String>,
        parameters: impl IntoIterator<Item = Parameter>,
        sections: impl IntoIterator<Item = Section>,
    ) -> Result<Self, DuplicateName> {
        let mut b = KbBuilder::default();
        if let Some(t) = title {
            b.set_title(t);
        }
        for p in parameters {
            b.add_parameter(p)?;
        }
        for s in sections {
            b.add_section(s)?;
        }
        Ok(b.finish())
    }

    /// Display name; empty when the source has no `title`.
    pub fn title(&self) -> &str {
        self.title.as_deref().unwrap_or("")
    }

    pub fn has_title(&self) -> bool {
        self.title.is_some()
    }

    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn lookup_parameter(&self, name: &str) -> Option<&Parameter> {
        match self.names.get(name)? {
            Item::Parameter(i) => Some(&self.parameters[*i]),
            Item::Section(_) => None,
        }
    }

    pub fn lookup_section(&self, name: &str) -> Option<&Section> {
        match self.names.get(name)? {
            Item::Section(i) => Some(&self.sections[*i]),
            Item::Parameter(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.title.is_none() && self.parameters.is_empty() && self.sections.is_empty()
    }
}

/// Incremental, duplicate-checking constructor used by the parser.
#[derive(Debug, Default)]
pub struct KbBuilder {
    kb: KnowledgeBase,
}

impl KbBuilder {
    pub fn has_title(&self) -> bool {
        self.kb.title.is_some()
    }

    pub fn set_title(&mut self, title: String) {
        self.kb.title = Some(title);
    }

    fn claim(&mut self, name: &Spanned<String>, item: Item) -> Result<(), DuplicateName> {
        if self.kb.names.contains_key(&name.value) {
            return Err(DuplicateName {
                name: name.value.clone(),
                span: name.span,
            });
        }
        self.kb.names.insert(name.value.clone(), item);
        Ok(())
    }

    pub fn add_parameter(&mut self, p: Parameter) -> Result<(), DuplicateName> {
        self.claim(&p.name, Item::Parameter(self.kb.parameters.len()))?;
        self.kb.parameters.push(p);
        Ok(())
    }

    pub fn add_section(&mut self, s: Section) -> Result<(), DuplicateName> {
        self.claim(&s.name, Item::Section(self.kb.sections.len()))?;
        self.kb.sections.push(s);
        Ok(())
    }

    pub fn finish(self) -> KnowledgeBase {
        self.kb
    }
}
