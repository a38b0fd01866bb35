//! Backward-chaining consultation engine.

mod eval;
mod session;
mod transcript;

pub use eval::{compare, evaluate_condition, Bindings, TriState, Value};
pub use session::{
    parse_answer, parse_number, run_scripted, EngineError, Explanation, Frame, Question, Session, Status,
    MAX_DEPTH,
};
pub use transcript::{Event, FinishReason, Transcript};

use std::sync::Arc;

use crate::model::KnowledgeBase;

pub fn start_session(kb: Arc<KnowledgeBase>) -> Result<Session, EngineError> {
    Session::start(kb)
}

pub fn submit_answer(session: &mut Session, raw: &str) -> Result<(), EngineError> {
    session.submit_answer(raw)
}

pub fn explain(session: &Session) -> &[Explanation] {
    session.explain()
}
