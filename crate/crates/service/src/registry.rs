//! Live sessions. The registry lock is held only to look up, insert or
//! remove handles; stepping locks the session itself.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use tw_core::env::Env;

use crate::error::ServiceError;
use crate::protocol::{ServerMessage, SessionSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServiceConfig {
    /// Sessions untouched for this long are dropped.
    pub idle_ttl: Duration,
    pub max_sessions: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            idle_ttl: Duration::from_secs(30 * 60),
            max_sessions: 256,
        }
    }
}

pub struct SessionHandle {
    pub id: String,
    pub created_at: u64,
    pub level: Option<u32>,
    pub seed: Option<u64>,
    last_active: Mutex<Instant>,
    /// Fair lock: waiting requests run in arrival order.
    pub env: tokio::sync::Mutex<Env>,
    /// Push events for every play channel open on this session.
    pub events: tokio::sync::broadcast::Sender<ServerMessage>,
}

impl SessionHandle {
    pub fn touch(&self) {
        *self.last_active.lock().expect("clock lock") = Instant::now();
    }

    pub fn idle(&self) -> Duration {
        self.last_active.lock().expect("clock lock").elapsed()
    }

    pub async fn summary(&self) -> SessionSummary {
        let env = self.env.lock().await;
        let s = env.session();
        SessionSummary {
            session_id: self.id.clone(),
            created_at: self.created_at,
            idle_secs: self.idle().as_secs(),
            mode: env.config().mode,
            level: self.level,
            seed: self.seed,
            moves: s.moves(),
            score: s.score(),
            outcome: s.outcome(),
        }
    }
}

#[derive(Default)]
pub struct Registry {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, Arc<SessionHandle>>>,
}

impl Registry {
    pub fn new(config: ServiceConfig) -> Self {
        Registry {
            config,
            sessions: Mutex::default(),
        }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn insert(
        &self,
        env: Env,
        level: Option<u32>,
        seed: Option<u64>,
    ) -> Result<Arc<SessionHandle>, ServiceError> {
        self.expire();
        let mut sessions = self.sessions.lock().expect("registry lock");
        if sessions.len() >= self.config.max_sessions {
            return Err(ServiceError::QuotaExceeded(self.config.max_sessions));
        }
        let handle = Arc::new(SessionHandle {
            id: uuid::Uuid::new_v4().simple().to_string(),
            created_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            level,
            seed,
            last_active: Mutex::new(Instant::now()),
            env: tokio::sync::Mutex::new(env),
            events: tokio::sync::broadcast::channel(16).0,
        });
        sessions.insert(handle.id.clone(), handle.clone());
        Ok(handle)
    }

    /// Looks up a live session and marks it active.
    pub fn get(&self, id: &str) -> Result<Arc<SessionHandle>, ServiceError> {
        let mut sessions = self.sessions.lock().expect("registry lock");
        match sessions.get(id) {
            Some(h) if h.idle() <= self.config.idle_ttl => {
                h.touch();
                Ok(h.clone())
            }
            Some(_) => {
                sessions.remove(id);
                Err(ServiceError::UnknownSession(id.to_string()))
            }
            None => Err(ServiceError::UnknownSession(id.to_string())),
        }
    }

    pub fn remove(&self, id: &str) -> Result<(), ServiceError> {
        self.expire();
        self.sessions
            .lock()
            .expect("registry lock")
            .remove(id)
            .map(|_| ())
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn handles(&self) -> Vec<Arc<SessionHandle>> {
        self.expire();
        let mut all: Vec<_> = self
            .sessions
            .lock()
            .expect("registry lock")
            .values()
            .cloned()
            .collect();
        all.sort_by_key(|h| (h.created_at, h.id.clone()));
        all
    }

    /// Drops idle sessions; returns how many went.
    pub fn expire(&self) -> usize {
        let ttl = self.config.idle_ttl;
        let mut sessions = self.sessions.lock().expect("registry lock");
        let before = sessions.len();
        sessions.retain(|_, h| h.idle() <= ttl);
        before - sessions.len()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("registry lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
