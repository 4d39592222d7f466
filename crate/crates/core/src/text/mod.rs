//! Surface text: names, room descriptions, quest instructions and feedback,
//! all rendered from themed grammars.

pub mod describe;
pub mod feedback;
pub mod grammar;
pub mod instructions;
pub mod names;

use serde::{Deserialize, Serialize};

pub use describe::{article, describe_room, inventory_text, with_article};
pub use feedback::{feedback_for, Event};
pub use grammar::{Grammar, GrammarError, Theme};
pub use instructions::{generate_instructions, render_instructions, Instructions};
pub use names::{assign_names, assign_names_with, Name, NameError, NameTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Granularity {
    EveryAction,
    FinalActionOnly,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextOptions {
    pub use_adjectives: bool,
    pub use_coreference: bool,
    pub group_similar: bool,
    pub refer_by_attributes: bool,
    pub instruction_granularity: Granularity,
    pub combine_instructions: bool,
}

impl Default for TextOptions {
    fn default() -> Self {
        TextOptions {
            use_adjectives: true,
            use_coreference: true,
            group_similar: false,
            refer_by_attributes: false,
            instruction_granularity: Granularity::EveryAction,
            combine_instructions: false,
        }
    }
}
