//! Expert-system shell: a small knowledge-base language, its linter, and a
//! backward-chaining consultation engine.
//!
//! ```
//! use std::sync::Arc;
//! use kbshell_core::{parse_kb, run_scripted};
//!
//! let parsed = parse_kb(r#"
//!     parameter fever: boolean
//!     section start { if fever do advice "Rest and drink fluids." }
//! "#);
//! assert!(parsed.diagnostics.is_empty());
//! let transcript = run_scripted(Arc::new(parsed.kb), &["yes"]).unwrap();
//! assert_eq!(transcript.advice().collect::<Vec<_>>(), ["Rest and drink fluids."]);
//! ```

pub mod diagnostic;
pub mod format;
pub mod inference;
pub mod lexer;
pub mod lint;
pub mod model;
pub mod parser;
pub mod sanjeevani;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use format::{format_condition, format_kb};
pub use inference::{
    evaluate_condition, explain, run_scripted, start_session, submit_answer, Bindings, EngineError, Event,
    Explanation, FinishReason, Question, Session, Status, Transcript, TriState, Value,
};
pub use lexer::{tokenize, Token, TokenKind};
pub use lint::{lint, reachable_sections, Finding};
pub use model::{
    Action, CmpOp, Condition, DuplicateName, KbBuilder, KnowledgeBase, Literal, ParamType, Parameter, Rule,
    Section, Span, Spanned,
};
pub use parser::{parse_condition, parse_kb, ParseResult};
pub use sanjeevani::builtin_kb;
