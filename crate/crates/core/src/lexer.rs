//! Tokenizer for `.kb` sources.

use std::fmt;

use crate::diagnostic::{Code, Diagnostic};
use crate::model::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Title,
    Parameter,
    Question,
    Values,
    Section,
    If,
    Always,
    Do,
    Advice,
    Goto,
    Set,
    Stop,
    And,
    Or,
    Not,
    True,
    False,
    Boolean,
    Text,
    Number,
    Category,
}

impl Keyword {
    pub const ALL: [Keyword; 21] = [
        Keyword::Title,
        Keyword::Parameter,
        Keyword::Question,
        Keyword::Values,
        Keyword::Section,
        Keyword::If,
        Keyword::Always,
        Keyword::Do,
        Keyword::Advice,
        Keyword::Goto,
        Keyword::Set,
        Keyword::Stop,
        Keyword::And,
        Keyword::Or,
        Keyword::Not,
        Keyword::True,
        Keyword::False,
        Keyword::Boolean,
        Keyword::Text,
        Keyword::Number,
        Keyword::Category,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Title => "title",
            Keyword::Parameter => "parameter",
            Keyword::Question => "question",
            Keyword::Values => "values",
            Keyword::Section => "section",
            Keyword::If => "if",
            Keyword::Always => "always",
            Keyword::Do => "do",
            Keyword::Advice => "advice",
            Keyword::Goto => "goto",
            Keyword::Set => "set",
            Keyword::Stop => "stop",
            Keyword::And => "and",
            Keyword::Or => "or",
            Keyword::Not => "not",
            Keyword::True => "true",
            Keyword::False => "false",
            Keyword::Boolean => "boolean",
            Keyword::Text => "text",
            Keyword::Number => "number",
            Keyword::Category => "category",
        }
    }

    pub fn from_ident(s: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Keywords that may start a top-level item; the parser resynchronizes on these.
    pub fn starts_item(self) -> bool {
        matches!(self, Keyword::Title | Keyword::Parameter | Keyword::Section)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Punct {
    Colon,
    Assign,
    Comma,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::Colon => ":",
            Punct::Assign => ":=",
            Punct::Comma => ",",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::Eq => "=",
            Punct::Ne => "<>",
            Punct::Lt => "<",
            Punct::Le => "<=",
            Punct::Gt => ">",
            Punct::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    /// String literal with escapes already decoded.
    Str(String),
    /// May be infinite when the literal overflows; the parser rejects those.
    Number(f64),
    Punct(Punct),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Keyword(_) => write!(f, "keyword `{}`", self.lexeme),
            TokenKind::Ident => write!(f, "identifier `{}`", self.lexeme),
            TokenKind::Str(_) => f.write_str("string"),
            TokenKind::Number(_) => write!(f, "number `{}`", self.lexeme),
            TokenKind::Punct(_) => write!(f, "`{}`", self.lexeme),
        }
    }
}

/// Tokenizes `source`, failing on the first lexical error.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let (tokens, mut diagnostics) = lex(source);
    if diagnostics.is_empty() {
        Ok(tokens)
    } else {
        Err(diagnostics.swap_remove(0))
    }
}

/// Tokenizes `source`, recovering from lexical errors.
///
/// An unterminated string still yields a string token holding what was read,
/// and an illegal character is skipped, so the parser sees as much of the
/// input as possible.
pub fn lex(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let lexer = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    lexer.run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.column)
    }

    fn run(mut self) -> (Vec<Token>, Vec<Diagnostic>) {
        let mut tokens = Vec::new();
        let mut diagnostics = Vec::new();
        if self.peek() == Some('\u{feff}') {
            self.pos += 1;
        }
        while let Some(c) = self.peek() {
            let span = self.span();
            let start = self.pos;
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                '"' => {
                    let token = self.string(span, &mut diagnostics);
                    tokens.push(token);
                }
                c if c.is_ascii_alphabetic() => {
                    while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                        self.bump();
                    }
                    let lexeme: String = self.chars[start..self.pos].iter().collect();
                    let kind = match Keyword::from_ident(&lexeme) {
                        Some(k) => TokenKind::Keyword(k),
                        None => TokenKind::Ident,
                    };
                    tokens.push(Token { kind, lexeme, span });
                }
                c if c.is_ascii_digit()
                    || (c == '-' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) =>
                {
                    tokens.push(self.number(span));
                }
                _ => match self.punct() {
                    Some(p) => tokens.push(Token {
                        kind: TokenKind::Punct(p),
                        lexeme: p.as_str().to_owned(),
                        span,
                    }),
                    None => {
                        self.bump();
                        diagnostics.push(Diagnostic::error(
                            Code::E011,
                            format!("illegal character {c:?}"),
                            span,
                        ));
                    }
                },
            }
        }
        (tokens, diagnostics)
    }

    fn punct(&mut self) -> Option<Punct> {
        let c = self.peek()?;
        let next = self.peek_at(1);
        let (p, len) = match (c, next) {
            (':', Some('=')) => (Punct::Assign, 2),
            (':', _) => (Punct::Colon, 1),
            (',', _) => (Punct::Comma, 1),
            ('{', _) => (Punct::LBrace, 1),
            ('}', _) => (Punct::RBrace, 1),
            ('(', _) => (Punct::LParen, 1),
            (')', _) => (Punct::RParen, 1),
            ('=', _) => (Punct::Eq, 1),
            ('<', Some('>')) => (Punct::Ne, 2),
            ('<', Some('=')) => (Punct::Le, 2),
            ('<', _) => (Punct::Lt, 1),
            ('>', Some('=')) => (Punct::Ge, 2),
            ('>', _) => (Punct::Gt, 1),
            _ => return None,
        };
        for _ in 0..len {
            self.bump();
        }
        Some(p)
    }

    fn number(&mut self, span: Span) -> Token {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
        }
        let lexeme: String = self.chars[start..self.pos].iter().collect();
        // The accepted shape is always valid float syntax.
        let value = lexeme.parse::<f64>().unwrap_or(f64::INFINITY);
        Token {
            kind: TokenKind::Number(value),
            lexeme,
            span,
        }
    }

    fn string(&mut self, span: Span, diagnostics: &mut Vec<Diagnostic>) -> Token {
        let start = self.pos;
        self.bump();
        let mut value = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    diagnostics.push(Diagnostic::error(Code::E010, "unterminated string", span));
                    break;
                }
                Some('"') => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    let escape_span = self.span();
                    match self.peek_at(1) {
                        Some('"') => value.push('"'),
                        Some('\\') => value.push('\\'),
                        Some('n') => value.push('\n'),
                        None | Some('\n') => {
                            self.bump();
                            continue;
                        }
                        Some(other) => {
                            diagnostics.push(Diagnostic::error(
                                Code::E011,
                                format!("illegal escape sequence `\\{other}`"),
                                escape_span,
                            ));
                            value.push(other);
                        }
                    }
                    self.bump();
                    self.bump();
                }
                Some(c) => {
                    value.push(c);
                    self.bump();
                }
            }
        }
        let lexeme: String = self.chars[start..self.pos].iter().collect();
        Token {
            kind: TokenKind::Str(value),
            lexeme,
            span,
        }
    }
}

/// Quotes `s` as a string literal using the escapes the lexer understands.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
