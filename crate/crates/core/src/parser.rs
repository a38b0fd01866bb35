//! Recursive-descent parser for the `.kb` language.
//!
//! ```text
//! kb        = { item } ;
//! item      = "title" string
//!           | "parameter" ident ":" ptype [ "question" string ] [ "values" ident { "," ident } ]
//!           | "section" ident "{" { rule } "}" ;
//! ptype     = "boolean" | "text" | "number" | "category" ;
//! rule      = ( "if" condition | "always" ) "do" action { "," action } ;
//! action    = "advice" string | "goto" ident | "set" ident ":=" literal | "stop" ;
//! condition = conj { "or" conj } ;
//! conj      = neg { "and" neg } ;
//! neg       = [ "not" ] atom ;
//! atom      = "true" | "false" | ident [ cmpop literal ] | "(" condition ")" ;
//! cmpop     = "=" | "<>" | "<" | "<=" | ">" | ">=" ;
//! literal   = string | number | ident | "true" | "false" ;
//! ```
//!
//! On a syntax error the parser records a diagnostic, skips ahead to the next
//! `title`, `parameter` or `section` keyword and carries on, so one run can
//! report many problems. Items that failed to parse are left out of the result.

use crate::diagnostic::{Code, Diagnostic};
use crate::lexer::{lex, Keyword, Punct, Token, TokenKind};
use crate::model::{
    Action, CmpOp, Condition, KbBuilder, KnowledgeBase, Literal, ParamType, Parameter, Rule, Section, Span,
    Spanned,
};

/// Maximum parenthesis nesting inside one condition.
pub const MAX_NESTING: usize = 64;

#[derive(Clone, Debug, Default)]
pub struct ParseResult {
    pub kb: KnowledgeBase,
    /// Sorted by position.
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseResult {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

pub fn parse_kb(source: &str) -> ParseResult {
    let (tokens, mut diagnostics) = lex(source);
    let mut parser = Parser::new(tokens, source);
    let mut builder = KbBuilder::default();
    while !parser.at_end() {
        let start = parser.pos;
        if let Err(d) = parser.item(&mut builder) {
            diagnostics.push(d);
            parser.synchronize(start);
        }
    }
    diagnostics.extend(parser.diagnostics);
    diagnostics.sort_by_key(|d| d.span);
    ParseResult {
        kb: builder.finish(),
        diagnostics,
    }
}

/// Parses a standalone condition; the whole input must be consumed.
pub fn parse_condition(source: &str) -> Result<Condition, Diagnostic> {
    let (tokens, mut lex_errors) = lex(source);
    if !lex_errors.is_empty() {
        return Err(lex_errors.swap_remove(0));
    }
    let mut parser = Parser::new(tokens, source);
    let cond = parser.condition()?;
    match parser.peek() {
        None => Ok(cond),
        Some(t) => Err(Diagnostic::error(Code::E001, format!("unexpected {t}"), t.span)),
    }
}

fn end_span(source: &str) -> Span {
    let line = 1 + source.matches('\n').count() as u32;
    let last = source.rsplit('\n').next().unwrap_or("");
    Span::new(line, 1 + last.chars().count() as u32)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: Span,
    depth: usize,
    /// Non-fatal problems found while parsing otherwise valid items.
    diagnostics: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn new(tokens: Vec<Token>, source: &str) -> Self {
        Parser {
            tokens,
            pos: 0,
            eof: end_span(source),
            depth: 0,
            diagnostics: Vec::new(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> Span {
        self.peek().map_or(self.eof, |t| t.span)
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_owned(),
        };
        Diagnostic::error(
            Code::E001,
            format!("expected {expected}, found {found}"),
            self.here(),
        )
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Keyword(kw), .. }) if *kw == k)
    }

    fn at_punct(&self, p: Punct) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Punct(q), .. }) if *q == p)
    }

    fn eat_keyword(&mut self, k: Keyword) -> bool {
        let hit = self.at_keyword(k);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_keyword(&mut self, k: Keyword) -> PResult<()> {
        if self.eat_keyword(k) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", k.as_str())))
        }
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", p.as_str())))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Spanned<String>> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident,
                ..
            }) => {
                let t = self.next().expect("peeked");
                Ok(Spanned::new(t.lexeme, t.span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn string(&mut self, what: &str) -> PResult<Spanned<String>> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Str(_),
                ..
            }) => {
                let t = self.next().expect("peeked");
                let TokenKind::Str(s) = t.kind else { unreachable!() };
                Ok(Spanned::new(s, t.span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// Skips to the next token that can start an item, always making progress.
    fn synchronize(&mut self, item_start: usize) {
        if self.pos == item_start {
            self.pos += 1;
        }
        while let Some(t) = self.peek() {
            if matches!(t.kind, TokenKind::Keyword(k) if k.starts_item()) {
                break;
            }
            self.pos += 1;
        }
    }

    fn item(&mut self, builder: &mut KbBuilder) -> PResult<()> {
        let Some(token) = self.peek() else { return Ok(()) };
        let span = token.span;
        match token.kind {
            TokenKind::Keyword(Keyword::Title) => {
                self.pos += 1;
                let title = self.string("title string")?;
                if builder.has_title() {
                    self.diagnostics
                        .push(Diagnostic::error(Code::E002, "duplicate title", span));
                } else {
                    builder.set_title(title.value);
                }
                Ok(())
            }
            TokenKind::Keyword(Keyword::Parameter) => {
                self.pos += 1;
                let param = self.parameter()?;
                if let Err(dup) = builder.add_parameter(param) {
                    self.diagnostics.push(dup.into());
                }
                Ok(())
            }
            TokenKind::Keyword(Keyword::Section) => {
                self.pos += 1;
                let section = self.section()?;
                if let Err(dup) = builder.add_section(section) {
                    self.diagnostics.push(dup.into());
                }
                Ok(())
            }
            _ => Err(self.unexpected("`title`, `parameter` or `section`")),
        }
    }

    fn parameter(&mut self) -> PResult<Parameter> {
        let name = self.ident("parameter name")?;
        self.expect_punct(Punct::Colon)?;
        let ptype = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Keyword(Keyword::Boolean)) => ParamType::Boolean,
            Some(TokenKind::Keyword(Keyword::Text)) => ParamType::Text,
            Some(TokenKind::Keyword(Keyword::Number)) => ParamType::Number,
            Some(TokenKind::Keyword(Keyword::Category)) => ParamType::Category,
            _ => return Err(self.unexpected("parameter type")),
        };
        self.pos += 1;
        let question = if self.eat_keyword(Keyword::Question) {
            Some(self.string("question string")?.value)
        } else {
            None
        };
        let mut values = Vec::new();
        if self.eat_keyword(Keyword::Values) {
            values.push(self.ident("category value")?);
            while self.eat_punct(Punct::Comma) {
                values.push(self.ident("category value")?);
            }
        }
        Parameter::new(name, ptype, question, values)
    }

    fn section(&mut self) -> PResult<Section> {
        let name = self.ident("section name")?;
        self.expect_punct(Punct::LBrace)?;
        let mut rules = Vec::new();
        while !self.eat_punct(Punct::RBrace) {
            rules.push(self.rule()?);
        }
        Ok(Section::new(name, rules))
    }

    fn rule(&mut self) -> PResult<Rule> {
        let condition = if self.eat_keyword(Keyword::If) {
            self.condition()?
        } else if self.eat_keyword(Keyword::Always) {
            Condition::True
        } else {
            return Err(self.unexpected("`if`, `always` or `}`"));
        };
        self.expect_keyword(Keyword::Do)?;
        let mut actions = vec![self.action()?];
        while self.eat_punct(Punct::Comma) {
            actions.push(self.action()?);
        }
        Ok(Rule::new(condition, actions).expect("at least one action"))
    }

    fn action(&mut self) -> PResult<Action> {
        if self.eat_keyword(Keyword::Advice) {
            let text = self.string("advice string")?;
            if text.value.is_empty() {
                return Err(Diagnostic::error(
                    Code::E001,
                    "advice text must not be empty",
                    text.span,
                ));
            }
            Ok(Action::Advice(text.value))
        } else if self.eat_keyword(Keyword::Goto) {
            Ok(Action::Goto(self.ident("section name")?))
        } else if self.eat_keyword(Keyword::Set) {
            let param = self.ident("parameter name")?;
            self.expect_punct(Punct::Assign)?;
            let value = self.literal()?;
            Ok(Action::Set { param, value })
        } else if self.eat_keyword(Keyword::Stop) {
            Ok(Action::Stop)
        } else {
            Err(self.unexpected("`advice`, `goto`, `set` or `stop`"))
        }
    }

    fn literal(&mut self) -> PResult<Spanned<Literal>> {
        let Some(t) = self.peek() else {
            return Err(self.unexpected("literal"));
        };
        let span = t.span;
        let lit = match &t.kind {
            TokenKind::Str(s) => Literal::Text(s.clone()),
            TokenKind::Number(n) if n.is_finite() => Literal::Number(*n),
            TokenKind::Number(_) => {
                return Err(Diagnostic::error(Code::E001, "number out of range", span));
            }
            TokenKind::Ident => Literal::Ident(t.lexeme.clone()),
            TokenKind::Keyword(Keyword::True) => Literal::Bool(true),
            TokenKind::Keyword(Keyword::False) => Literal::Bool(false),
            _ => return Err(self.unexpected("literal")),
        };
        self.pos += 1;
        Ok(Spanned::new(lit, span))
    }

    fn condition(&mut self) -> PResult<Condition> {
        let mut lhs = self.conjunction()?;
        while self.eat_keyword(Keyword::Or) {
            let rhs = self.conjunction()?;
            lhs = Condition::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Condition> {
        let mut lhs = self.negation()?;
        while self.eat_keyword(Keyword::And) {
            let rhs = self.negation()?;
            lhs = Condition::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> PResult<Condition> {
        if self.eat_keyword(Keyword::Not) {
            Ok(Condition::not(self.atom()?))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> PResult<Condition> {
        if self.eat_keyword(Keyword::True) {
            return Ok(Condition::True);
        }
        if self.eat_keyword(Keyword::False) {
            return Ok(Condition::False);
        }
        if self.at_punct(Punct::LParen) {
            if self.depth >= MAX_NESTING {
                return Err(Diagnostic::error(
                    Code::E001,
                    "condition nested too deeply",
                    self.here(),
                ));
            }
            self.pos += 1;
            self.depth += 1;
            let inner = self.condition();
            self.depth -= 1;
            let inner = inner?;
            self.expect_punct(Punct::RParen)?;
            return Ok(inner);
        }
        let param = self.ident("condition")?;
        let op = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Punct(Punct::Eq)) => CmpOp::Eq,
            Some(TokenKind::Punct(Punct::Ne)) => CmpOp::Ne,
            Some(TokenKind::Punct(Punct::Lt)) => CmpOp::Lt,
            Some(TokenKind::Punct(Punct::Le)) => CmpOp::Le,
            Some(TokenKind::Punct(Punct::Gt)) => CmpOp::Gt,
            Some(TokenKind::Punct(Punct::Ge)) => CmpOp::Ge,
            _ => return Ok(Condition::Param(param)),
        };
        self.pos += 1;
        let literal = self.literal()?;
        Ok(Condition::Compare { param, op, literal })
    }
}
