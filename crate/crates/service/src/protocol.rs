//! Wire types. Every payload is JSON with snake_case fields and carries
//! `protocol_version`.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tw_core::engine::{Observation, Outcome};
use tw_core::env::{EnvConfig, Mode};
use tw_core::text::Theme;

use crate::map::MapSnapshot;

pub const PROTOCOL_VERSION: u32 = 1;

/// `POST /sessions`. Either `level` (with `seed`) or `game` is set.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    #[serde(default)]
    pub protocol_version: Option<u32>,
    /// Treasure Hunter level, 1 to 30.
    #[serde(default)]
    pub level: Option<u32>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub theme: Option<Theme>,
    /// A game file, either as a JSON object or as its text.
    #[serde(default)]
    pub game: Option<Value>,
    #[serde(default)]
    pub config: EnvConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateResponse {
    pub protocol_version: u32,
    pub session_id: String,
    pub observation: Observation,
    /// Numbered commands, in choice mode only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choices: Option<Vec<String>>,
    pub config: EnvConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub idle_secs: u64,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub moves: u32,
    pub score: i32,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionList {
    pub protocol_version: u32,
    pub sessions: Vec<SessionSummary>,
}

/// Command text in parser mode, index in choice mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Input {
    Command(String),
    Choice(usize),
}

/// `POST /sessions/{id}/step`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRequest {
    #[serde(default)]
    pub protocol_version: Option<u32>,
    pub input: Input,
}

/// Messages a client sends on the play channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClientMessage {
    Step {
        #[serde(default)]
        id: Option<Value>,
        input: Input,
    },
    State {
        #[serde(default)]
        id: Option<Value>,
    },
    Map {
        #[serde(default)]
        id: Option<Value>,
    },
}

/// Messages the service sends. `id` echoes the request's correlation id.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ServerMessage {
    Result {
        protocol_version: u32,
        #[serde(default)]
        id: Option<Value>,
        observation: Observation,
        reward: i32,
        done: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        choices: Option<Vec<String>>,
    },
    State {
        protocol_version: u32,
        #[serde(default)]
        id: Option<Value>,
        observation: Observation,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        choices: Option<Vec<String>>,
    },
    Map {
        protocol_version: u32,
        #[serde(default)]
        id: Option<Value>,
        map: MapSnapshot,
    },
    Event {
        protocol_version: u32,
        session_id: String,
        event: EventKind,
        outcome: Outcome,
        score: i32,
        moves: u32,
    },
    Error {
        protocol_version: u32,
        #[serde(default)]
        id: Option<Value>,
        error: ErrorBody,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    GameOver,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

/// HTTP error payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub protocol_version: u32,
    pub error: ErrorBody,
}
