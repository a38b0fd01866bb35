//! Consultation transcripts and their canonical text form.
//!
//! One event per line, fields separated by tabs, every line ending in `\n`:
//!
//! ```text
//! ENTER     <section>
//! EXIT      <section>
//! QUESTION  <param>    <prompt>
//! ANSWER    <param>    <value>
//! ADVICE    <section>  <rule index>  <text>
//! WARNING   <message>
//! FINISHED  completed | stopped | error  [<detail>]
//! ```
//!
//! Inside a field, `\` is written `\\`, and tab, newline and carriage return
//! are written `\t`, `\n` and `\r`.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum FinishReason {
    Completed,
    Stopped,
    Error { detail: String },
}

impl FinishReason {
    pub fn error(detail: impl Into<String>) -> Self {
        FinishReason::Error {
            detail: detail.into(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FinishReason::Completed => "completed",
            FinishReason::Stopped => "stopped",
            FinishReason::Error { .. } => "error",
        }
    }
}

impl fmt::Display for FinishReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinishReason::Error { detail } => write!(f, "error: {detail}"),
            other => f.write_str(other.as_str()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Enter {
        section: String,
    },
    Exit {
        section: String,
    },
    Question {
        param: String,
        prompt: String,
    },
    Answer {
        param: String,
        value: String,
    },
    Advice {
        section: String,
        rule: usize,
        text: String,
    },
    Warning {
        message: String,
    },
    Finished(FinishReason),
}

impl Event {
    /// The event's fields as they appear on its canonical line.
    pub fn fields(&self) -> Vec<String> {
        match self {
            Event::Enter { section } => vec!["ENTER".into(), section.clone()],
            Event::Exit { section } => vec!["EXIT".into(), section.clone()],
            Event::Question { param, prompt } => vec!["QUESTION".into(), param.clone(), prompt.clone()],
            Event::Answer { param, value } => vec!["ANSWER".into(), param.clone(), value.clone()],
            Event::Advice { section, rule, text } => {
                vec!["ADVICE".into(), section.clone(), rule.to_string(), text.clone()]
            }
            Event::Warning { message } => vec!["WARNING".into(), message.clone()],
            Event::Finished(reason) => {
                let mut f = vec!["FINISHED".into(), reason.as_str().into()];
                if let FinishReason::Error { detail } = reason {
                    f.push(detail.clone());
                }
                f
            }
        }
    }

    pub fn to_line(&self) -> String {
        let fields: Vec<String> = self.fields().iter().map(|f| escape_field(f)).collect();
        fields.join("\t")
    }
}

fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub(crate) fn push(&mut self, event: Event) {
        self.events.push(event);
    }

    pub(crate) fn insert_before_last(&mut self, event: Event) {
        let at = self.events.len().saturating_sub(1);
        self.events.insert(at, event);
    }

    pub fn advice(&self) -> impl Iterator<Item = &str> {
        self.events.iter().filter_map(|e| match e {
            Event::Advice { text, .. } => Some(text.as_str()),
            _ => None,
        })
    }

    pub fn finish_reason(&self) -> Option<&FinishReason> {
        match self.events.last() {
            Some(Event::Finished(r)) => Some(r),
            _ => None,
        }
    }

    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.to_line());
            out.push('\n');
        }
        out
    }
}

impl From<Vec<Event>> for Transcript {
    fn from(events: Vec<Event>) -> Self {
        Transcript { events }
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_lines() {
        let t = Transcript::from(vec![
            Event::Enter {
                section: "start".into(),
            },
            Event::Question {
                param: "p".into(),
                prompt: "Why?\tNow".into(),
            },
            Event::Answer {
                param: "p".into(),
                value: "a\\b".into(),
            },
            Event::Advice {
                section: "start".into(),
                rule: 2,
                text: "line1\nline2".into(),
            },
            Event::Exit {
                section: "start".into(),
            },
            Event::Finished(FinishReason::error("depth")),
        ]);
        assert_eq!(
            t.to_canonical(),
            "ENTER\tstart\nQUESTION\tp\tWhy?\\tNow\nANSWER\tp\ta\\\\b\n\
             ADVICE\tstart\t2\tline1\\nline2\nEXIT\tstart\nFINISHED\terror\tdepth\n"
        );
        assert_eq!(Transcript::default().to_canonical(), "");
    }

    #[test]
    fn json_shape() {
        let e = Event::Advice {
            section: "s".into(),
            rule: 0,
            text: "x".into(),
        };
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"event":"advice","section":"s","rule":0,"text":"x"}"#
        );
        let f = Event::Finished(FinishReason::error("boom"));
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"event":"finished","reason":"error","detail":"boom"}"#);
        assert_eq!(serde_json::from_str::<Event>(&json).unwrap(), f);
        let done = Event::Finished(FinishReason::Completed);
        let json = serde_json::to_string(&done).unwrap();
        assert_eq!(serde_json::from_str::<Event>(&json).unwrap(), done);
    }
}
