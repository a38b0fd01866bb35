//! Backward-chaining consultation sessions.
//!
//! Execution starts in `start` and walks each section's rules in order. A
//! rule's condition is evaluated against the current bindings; when it needs
//! a parameter nobody has supplied yet, the session suspends with a
//! [`Question`] and resumes by re-evaluating that same condition once the
//! answer arrives. Every rule whose condition holds fires. `goto` is a call:
//! the target section runs to the end and control comes back to the action
//! after the `goto`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::eval::{evaluate_condition, Bindings, TriState, Value};
use super::transcript::{Event, FinishReason, Transcript};
use crate::lint::{self, Finding, START_SECTION};
use crate::model::{Action, Condition, KnowledgeBase, ParamType, Parameter};

/// Maximum number of nested sections (including `start`).
pub const MAX_DEPTH: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("knowledge base has {} lint error(s)", .0.iter().filter(|f| f.is_error()).count())]
    LintGateFailed(Vec<Finding>),
    #[error("invalid answer for `{param}`: {reason}")]
    InvalidAnswer {
        param: String,
        reason: String,
        allowed: Vec<String>,
    },
    #[error("session already finished")]
    SessionFinished,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub param: String,
    pub prompt: String,
    pub ptype: ParamType,
    /// Declared values for category questions, in declaration order.
    pub values: Vec<String>,
}

impl Question {
    fn for_parameter(p: &Parameter) -> Self {
        Question {
            param: p.name().to_owned(),
            prompt: p.prompt(),
            ptype: p.ptype(),
            values: p.values().map(str::to_owned).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    AwaitingAnswer(Question),
    Finished(FinishReason),
}

/// One entry of the control stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub section: String,
    pub rule: usize,
    /// Next action to run; `None` while the rule's condition is undecided.
    pub action: Option<usize>,
}

impl Frame {
    fn enter(section: &str) -> Self {
        Frame {
            section: section.to_owned(),
            rule: 0,
            action: None,
        }
    }
}

/// A rule whose condition was fully decided.
#[derive(Clone, Debug, PartialEq)]
pub struct Explanation {
    pub section: String,
    pub rule: usize,
    pub condition: Condition,
    pub outcome: bool,
}

#[derive(Clone, Debug)]
pub struct Session {
    kb: Arc<KnowledgeBase>,
    bindings: Bindings,
    asked: BTreeSet<String>,
    stack: Vec<Frame>,
    status: Status,
    transcript: Transcript,
    explanations: Vec<Explanation>,
    steps: u64,
    step_budget: u64,
}

impl Session {
    /// Starts a consultation and runs it up to the first question or the end.
    ///
    /// Refuses knowledge bases with error-level lint findings.
    pub fn start(kb: Arc<KnowledgeBase>) -> Result<Self, EngineError> {
        let findings = lint::lint(&kb);
        if lint::has_errors(&findings) {
            return Err(EngineError::LintGateFailed(findings));
        }
        let total_rules: usize = kb.sections().iter().map(|s| s.rules().len()).sum();
        let max_actions = kb
            .sections()
            .iter()
            .flat_map(|s| s.rules())
            .map(|r| r.actions().len())
            .max()
            .unwrap_or(1);
        // A step is one condition evaluation or one action.
        let step_budget = (MAX_DEPTH * total_rules.max(1) * (max_actions + 1)) as u64;
        let mut session = Session {
            kb,
            bindings: Bindings::new(),
            asked: BTreeSet::new(),
            stack: vec![Frame::enter(START_SECTION)],
            status: Status::Finished(FinishReason::Completed),
            transcript: Transcript::default(),
            explanations: Vec::new(),
            steps: 0,
            step_budget,
        };
        session.transcript.push(Event::Enter {
            section: START_SECTION.to_owned(),
        });
        session.run();
        Ok(session)
    }

    pub fn kb(&self) -> &Arc<KnowledgeBase> {
        &self.kb
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn pending_question(&self) -> Option<&Question> {
        match &self.status {
            Status::AwaitingAnswer(q) => Some(q),
            Status::Finished(_) => None,
        }
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.status, Status::Finished(_))
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    pub fn stack(&self) -> &[Frame] {
        &self.stack
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    /// Advice texts emitted so far, in order.
    pub fn advice(&self) -> Vec<&str> {
        self.transcript.advice().collect()
    }

    /// Rules whose conditions were decided, in evaluation order.
    pub fn explain(&self) -> &[Explanation] {
        &self.explanations
    }

    /// Answers the pending question and runs until the next one or the end.
    ///
    /// A rejected answer leaves the session untouched.
    pub fn submit_answer(&mut self, raw: &str) -> Result<(), EngineError> {
        let question = match &self.status {
            Status::AwaitingAnswer(q) => q,
            Status::Finished(_) => return Err(EngineError::SessionFinished),
        };
        let value = parse_answer(question, raw)?;
        let param = question.param.clone();
        self.transcript.push(Event::Answer {
            param: param.clone(),
            value: value.to_string(),
        });
        self.bindings.bind(param, value);
        self.run();
        Ok(())
    }

    /// Ends the session with an error, e.g. when a scripted answer was rejected.
    pub(crate) fn abort(&mut self, detail: String) {
        if !self.is_finished() {
            self.finish(FinishReason::Error { detail });
        }
    }

    fn finish(&mut self, reason: FinishReason) {
        self.transcript.push(Event::Finished(reason.clone()));
        self.status = Status::Finished(reason);
    }

    fn run(&mut self) {
        loop {
            let kb = Arc::clone(&self.kb);
            let Some(frame) = self.stack.last_mut() else {
                self.finish(FinishReason::Completed);
                return;
            };
            let Some(section) = kb.lookup_section(&frame.section) else {
                let detail = format!("undefined section `{}`", frame.section);
                self.finish(FinishReason::error(detail));
                return;
            };
            let Some(rule) = section.rules().get(frame.rule) else {
                let name = section.name().to_owned();
                self.stack.pop();
                self.transcript.push(Event::Exit { section: name });
                continue;
            };

            if frame.action.is_none_or(|i| i < rule.actions().len()) {
                self.steps += 1;
                if self.steps > self.step_budget {
                    self.finish(FinishReason::error("step limit exceeded"));
                    return;
                }
            }
            let frame = self.stack.last_mut().expect("checked above");

            let Some(index) = frame.action else {
                match evaluate_condition(rule.condition(), &self.bindings) {
                    TriState::Unknown(param) => {
                        self.ask(&param);
                        return;
                    }
                    known => {
                        let outcome = known == TriState::KnownTrue;
                        self.explanations.push(Explanation {
                            section: section.name().to_owned(),
                            rule: frame.rule,
                            condition: rule.condition().clone(),
                            outcome,
                        });
                        if outcome {
                            frame.action = Some(0);
                        } else {
                            frame.rule += 1;
                        }
                    }
                }
                continue;
            };

            let Some(action) = rule.actions().get(index) else {
                frame.rule += 1;
                frame.action = None;
                continue;
            };
            frame.action = Some(index + 1);
            let rule_index = frame.rule;
            match action {
                Action::Advice(text) => self.transcript.push(Event::Advice {
                    section: section.name().to_owned(),
                    rule: rule_index,
                    text: text.clone(),
                }),
                Action::Set { param, value } => {
                    self.bindings.bind(param.value.clone(), Value::from(&value.value));
                }
                Action::Goto(target) => {
                    if self.stack.len() >= MAX_DEPTH {
                        self.finish(FinishReason::error(format!(
                            "section nesting deeper than {MAX_DEPTH} at goto {}",
                            target.value
                        )));
                        return;
                    }
                    self.stack.push(Frame::enter(&target.value));
                    self.transcript.push(Event::Enter {
                        section: target.value.clone(),
                    });
                }
                Action::Stop => {
                    self.finish(FinishReason::Stopped);
                    return;
                }
            }
        }
    }

    fn ask(&mut self, param: &str) {
        let Some(p) = self.kb.lookup_parameter(param) else {
            self.finish(FinishReason::error(format!("undefined parameter `{param}`")));
            return;
        };
        if !self.asked.insert(param.to_owned()) {
            // Unreachable while bindings only grow: an asked parameter is bound.
            self.finish(FinishReason::error(format!("parameter `{param}` asked twice")));
            return;
        }
        let question = Question::for_parameter(p);
        self.transcript.push(Event::Question {
            param: question.param.clone(),
            prompt: question.prompt.clone(),
        });
        self.status = Status::AwaitingAnswer(question);
    }
}

/// Parses a raw answer according to the question's type.
pub fn parse_answer(question: &Question, raw: &str) -> Result<Value, EngineError> {
    let invalid = |reason: String| EngineError::InvalidAnswer {
        param: question.param.clone(),
        reason,
        allowed: question.values.clone(),
    };
    match question.ptype {
        ParamType::Boolean => match raw.trim().to_ascii_lowercase().as_str() {
            "true" | "yes" => Ok(Value::Bool(true)),
            "false" | "no" => Ok(Value::Bool(false)),
            _ => Err(invalid(format!("expected yes/no or true/false, got {raw:?}"))),
        },
        ParamType::Number => parse_number(raw.trim())
            .map(Value::Number)
            .ok_or_else(|| invalid(format!("expected a number, got {raw:?}"))),
        ParamType::Category => {
            let answer = raw.trim();
            if question.values.iter().any(|v| v == answer) {
                Ok(Value::Category(answer.to_owned()))
            } else {
                Err(invalid(format!(
                    "expected one of {}, got {raw:?}",
                    question.values.join(", ")
                )))
            }
        }
        ParamType::Text => Ok(Value::Text(raw.to_owned())),
    }
}

/// Accepts the same numbers as the `.kb` grammar: `-?digits(.digits)?`.
pub fn parse_number(s: &str) -> Option<f64> {
    let body = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |d: &str| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || frac.is_some_and(|f| !digits(f)) {
        return None;
    }
    s.parse::<f64>().ok().filter(|n| n.is_finite())
}

/// Replays `answers` against a fresh session and returns the transcript.
///
/// Running out of answers, or an answer being rejected, ends the run with an
/// error event. Leftover answers are reported with a warning.
pub fn run_scripted<S: AsRef<str>>(kb: Arc<KnowledgeBase>, answers: &[S]) -> Result<Transcript, EngineError> {
    let mut session = Session::start(kb)?;
    let mut answers = answers.iter();
    while !session.is_finished() {
        let Some(raw) = answers.next() else {
            session.abort("answers exhausted".to_owned());
            break;
        };
        if let Err(e) = session.submit_answer(raw.as_ref()) {
            session.abort(e.to_string());
        }
    }
    let mut transcript = session.transcript;
    let unused = answers.count();
    if unused > 0 {
        transcript.insert_before_last(Event::Warning {
            message: format!("{unused} unused answer(s) ignored"),
        });
    }
    Ok(transcript)
}
