//! In-memory consultation sessions behind the HTTP API.
//!
//! The service owns no rule logic: every state change is a single call into
//! [`kbshell_core::Session`]. Each session sits behind its own mutex, so
//! concurrent answers to one session are applied one after the other.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use kbshell_core::{lint, parse_kb, EngineError, KnowledgeBase, Question, Session, Status, Transcript};
use rand::Rng;
use serde::Serialize;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ServiceError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{message}")]
    InvalidAnswer { message: String, allowed: Vec<String> },
    #[error("{0}")]
    Internal(String),
}

impl From<EngineError> for ServiceError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::InvalidAnswer { ref allowed, .. } => ServiceError::InvalidAnswer {
                allowed: allowed.clone(),
                message: e.to_string(),
            },
            EngineError::SessionFinished => ServiceError::Conflict(e.to_string()),
            EngineError::LintGateFailed(_) => ServiceError::Internal(e.to_string()),
        }
    }
}

/// Wire projection of a session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SessionStateView {
    pub id: String,
    pub status: &'static str,
    pub question: Option<Question>,
    pub advice: Vec<String>,
    pub finished_reason: Option<String>,
}

impl SessionStateView {
    pub fn new(id: &str, session: &Session) -> Self {
        let (status, question, finished_reason) = match session.status() {
            Status::AwaitingAnswer(q) => ("awaiting_answer", Some(q.clone()), None),
            Status::Finished(reason) => ("finished", None, Some(reason.to_string())),
        };
        SessionStateView {
            id: id.to_owned(),
            status,
            question,
            advice: session.advice().into_iter().map(str::to_owned).collect(),
            finished_reason,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KbInfo {
    pub name: String,
    pub title: String,
}

/// Knowledge bases available for consultation. Only lint-clean KBs get in.
#[derive(Clone, Debug, Default)]
pub struct KbRegistry {
    kbs: BTreeMap<String, Arc<KnowledgeBase>>,
}

impl KbRegistry {
    /// A registry holding just the bundled Sanjeevani KB.
    pub fn builtin() -> Self {
        let mut r = KbRegistry::default();
        r.kbs.insert(
            kbshell_core::sanjeevani::NAME.to_owned(),
            Arc::new(kbshell_core::builtin_kb()),
        );
        r
    }

    /// Adds a KB unless it has parse or lint errors; returns the rejection reason otherwise.
    pub fn insert_source(&mut self, name: &str, source: &str) -> Result<(), String> {
        let parsed = parse_kb(source);
        if let Some(d) = parsed.diagnostics.iter().find(|d| d.is_error()) {
            return Err(d.to_string());
        }
        if let Some(f) = lint(&parsed.kb).into_iter().find(|f| f.is_error()) {
            return Err(f.diagnostic.to_string());
        }
        self.kbs.insert(name.to_owned(), Arc::new(parsed.kb));
        Ok(())
    }

    /// Loads every `*.kb` file directly inside `dir`, keyed by file stem.
    /// Rejected files are returned with the reason.
    pub fn load_dir(&mut self, dir: &Path) -> std::io::Result<Vec<(String, String)>> {
        let mut rejected = Vec::new();
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "kb") && p.is_file())
            .collect();
        paths.sort();
        for path in paths {
            let Some(name) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            let source = String::from_utf8_lossy(&std::fs::read(&path)?).into_owned();
            if let Err(reason) = self.insert_source(name, &source) {
                rejected.push((path.display().to_string(), reason));
            }
        }
        Ok(rejected)
    }

    pub fn get(&self, name: &str) -> Option<&Arc<KnowledgeBase>> {
        self.kbs.get(name)
    }

    pub fn list(&self) -> Vec<KbInfo> {
        self.kbs
            .iter()
            .map(|(name, kb)| KbInfo {
                name: name.clone(),
                title: kb.title().to_owned(),
            })
            .collect()
    }
}

struct Entry {
    session: Session,
    last_access: Instant,
}

pub struct SessionService {
    registry: KbRegistry,
    sessions: Mutex<HashMap<String, Arc<Mutex<Entry>>>>,
    idle_timeout: Duration,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// 16 random bytes, hex encoded.
fn new_session_id() -> String {
    let bytes: [u8; 16] = rand::rng().random();
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl SessionService {
    pub fn new(registry: KbRegistry) -> Self {
        Self::with_idle_timeout(registry, DEFAULT_IDLE_TIMEOUT)
    }

    pub fn with_idle_timeout(registry: KbRegistry, idle_timeout: Duration) -> Self {
        SessionService {
            registry,
            sessions: Mutex::new(HashMap::new()),
            idle_timeout,
        }
    }

    pub fn list_kbs(&self) -> Vec<KbInfo> {
        self.registry.list()
    }

    pub fn create_session(&self, kb_name: &str) -> Result<SessionStateView, ServiceError> {
        let kb = self
            .registry
            .get(kb_name)
            .ok_or_else(|| ServiceError::NotFound(format!("unknown knowledge base `{kb_name}`")))?;
        let session = Session::start(Arc::clone(kb))?;
        let mut sessions = lock(&self.sessions);
        let id = loop {
            let id = new_session_id();
            if !sessions.contains_key(&id) {
                break id;
            }
        };
        let view = SessionStateView::new(&id, &session);
        sessions.insert(
            id,
            Arc::new(Mutex::new(Entry {
                session,
                last_access: Instant::now(),
            })),
        );
        Ok(view)
    }

    fn entry(&self, id: &str) -> Result<Arc<Mutex<Entry>>, ServiceError> {
        let mut sessions = lock(&self.sessions);
        let not_found = || ServiceError::NotFound(format!("unknown session `{id}`"));
        let entry = sessions.get(id).cloned().ok_or_else(not_found)?;
        let expired = lock(&entry).last_access.elapsed() > self.idle_timeout;
        if expired {
            sessions.remove(id);
            return Err(not_found());
        }
        Ok(entry)
    }

    pub fn get(&self, id: &str) -> Result<SessionStateView, ServiceError> {
        let entry = self.entry(id)?;
        let mut entry = lock(&entry);
        entry.last_access = Instant::now();
        Ok(SessionStateView::new(id, &entry.session))
    }

    pub fn answer(&self, id: &str, value: &str) -> Result<SessionStateView, ServiceError> {
        let entry = self.entry(id)?;
        let mut entry = lock(&entry);
        entry.last_access = Instant::now();
        entry.session.submit_answer(value)?;
        Ok(SessionStateView::new(id, &entry.session))
    }

    pub fn transcript(&self, id: &str) -> Result<Transcript, ServiceError> {
        let entry = self.entry(id)?;
        let mut entry = lock(&entry);
        entry.last_access = Instant::now();
        Ok(entry.session.transcript().clone())
    }

    /// Drops sessions idle for longer than the timeout; returns how many went.
    pub fn sweep_expired(&self) -> usize {
        let mut sessions = lock(&self.sessions);
        let before = sessions.len();
        sessions.retain(|_, e| lock(e).last_access.elapsed() <= self.idle_timeout);
        before - sessions.len()
    }

    pub fn session_count(&self) -> usize {
        lock(&self.sessions).len()
    }
}
