//! The agent-facing environment: parser and choice modes over a session.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    EngineError, Observability, Observation, Session, SessionConfig, StepResult, DEFAULT_MAX_STEPS,
};
use crate::game::{GameDefinition, GameFileError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Parser,
    Choice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub mode: Mode,
    pub observability: Observability,
    pub max_steps: u32,
    pub seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            mode: Mode::Parser,
            observability: Observability::default(),
            max_steps: DEFAULT_MAX_STEPS,
            seed: 0,
        }
    }
}

impl EnvConfig {
    pub fn choice() -> Self {
        EnvConfig {
            mode: Mode::Choice,
            ..EnvConfig::default()
        }
    }

    /// The session settings; choice mode always lists admissible commands.
    pub fn session_config(&self) -> SessionConfig {
        let mut observability = self.observability;
        if self.mode == Mode::Choice {
            observability.admissible_commands = true;
        }
        SessionConfig {
            observability,
            max_steps: self.max_steps,
            seed: self.seed,
            ..SessionConfig::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid game: {}", .0.join("; "))]
    InvalidGame(Vec<String>),
    #[error("unsupported game format `{0}`: only native .twg.json games run here, Z-machine and Glulx story files are not interpreted")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Load(GameFileError),
    #[error("the session is finished")]
    SessionFinished,
    #[error("choice {index} out of range ({len} choices)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("this operation needs {0:?} mode")]
    WrongMode(Mode),
}

impl From<EngineError> for EnvError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::InvalidGame(d) => EnvError::InvalidGame(d),
            EngineError::SessionFinished => EnvError::SessionFinished,
        }
    }
}

impl From<GameFileError> for EnvError {
    fn from(e: GameFileError) -> Self {
        match e {
            GameFileError::UnsupportedFormat(ext) => EnvError::UnsupportedFormat(ext),
            other => EnvError::Load(other),
        }
    }
}

pub enum GameSource {
    Path(PathBuf),
    Definition(Arc<GameDefinition>),
}

impl From<GameDefinition> for GameSource {
    fn from(g: GameDefinition) -> Self {
        GameSource::Definition(Arc::new(g))
    }
}

impl From<Arc<GameDefinition>> for GameSource {
    fn from(g: Arc<GameDefinition>) -> Self {
        GameSource::Definition(g)
    }
}

pub struct Env {
    game: Arc<GameDefinition>,
    config: EnvConfig,
    session: Session,
    last: Observation,
}

impl Env {
    pub fn start(source: impl Into<GameSource>, config: EnvConfig) -> Result<Env, EnvError> {
        let game = match source.into() {
            GameSource::Definition(g) => g,
            GameSource::Path(p) => Arc::new(GameDefinition::load(&p)?),
        };
        let (session, obs) = Session::reset(game.clone(), config.session_config())?;
        let mut env = Env {
            game,
            config,
            session,
            last: obs,
        };
        env.last = env.shape(env.last.clone());
        Ok(env)
    }

    /// Back to the initial state.
    pub fn reset(&mut self) -> Observation {
        let (session, obs) = Session::reset(self.game.clone(), self.config.session_config())
            .expect("game validated at start");
        self.session = session;
        self.last = self.shape(obs);
        self.last.clone()
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn game(&self) -> &Arc<GameDefinition> {
        &self.game
    }

    pub fn observation(&self) -> &Observation {
        &self.last
    }

    /// Commands selectable by index: admissible actions in canonical order.
    pub fn choices(&self) -> Vec<String> {
        if self.session.is_done() {
            return Vec::new();
        }
        self.session
            .admissible_actions()
            .iter()
            .map(|a| self.session.render(a))
            .collect()
    }

    fn shape(&self, mut obs: Observation) -> Observation {
        if self.config.mode == Mode::Choice {
            if let Some(list) = obs.admissible_commands.as_mut() {
                list.retain(|c| !c.informational);
            }
        }
        obs
    }

    fn run(&mut self, command: &str) -> Result<StepResult, EnvError> {
        let mut result = self.session.step(command)?;
        result.observation = self.shape(result.observation);
        self.last = result.observation.clone();
        Ok(result)
    }

    pub fn step(&mut self, command: &str) -> Result<StepResult, EnvError> {
        if self.config.mode != Mode::Parser {
            return Err(EnvError::WrongMode(Mode::Parser));
        }
        self.run(command)
    }

    pub fn step_choice(&mut self, index: usize) -> Result<StepResult, EnvError> {
        if self.config.mode != Mode::Choice {
            return Err(EnvError::WrongMode(Mode::Choice));
        }
        if self.session.is_done() {
            return Err(EnvError::SessionFinished);
        }
        let choices = self.choices();
        let command = choices
            .get(index)
            .ok_or(EnvError::IndexOutOfRange {
                index,
                len: choices.len(),
            })?
            .clone();
        self.run(&command)
    }
}
