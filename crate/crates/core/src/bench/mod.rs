//! The Treasure Hunter benchmark, baseline agents and evaluation.

pub mod agents;
pub mod eval;
pub mod treasure;

pub use agents::{random_choice_agent, simple_agent, Agent, AgentKind, Move, SIMPLE_COMMANDS};
pub use eval::{evaluate, EvalConfig, EvalResult, GameRecord, REPORT_SCHEMA_VERSION};
pub use treasure::{
    can_reach, difficulty, make_treasure_hunter, make_treasure_hunter_with, suite, suite_seeds,
    BenchError, DifficultySpec, Mode,
};
