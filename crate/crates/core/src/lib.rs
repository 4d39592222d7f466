//! Text game sandbox: linear-logic state and rules, world, quest and text
//! generation, a command parser, the game engine and environment API, and
//! the Treasure Hunter benchmark.

pub mod bench;
pub mod engine;
pub mod env;
pub mod fixtures;
pub mod game;
pub mod kb;
pub mod logic;
pub mod make;
pub mod par;
pub mod parser;
pub mod quest;
pub mod rng;
pub mod text;
pub mod world;

pub use logic::{Atom, EntityId, GroundAction, LogicError, RuleSchema, State, TypeTag};
