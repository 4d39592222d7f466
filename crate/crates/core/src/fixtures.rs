//! The kitchen example: a fridge, a table and an apple.

use crate::game::{GameDefinition, GameParts, Metadata};
use crate::kb::core_rules;
use crate::logic::{Atom, EntityId, State, TypeTag};
use crate::quest::Quest;
use crate::text::{Grammar, Name, NameTable, TextOptions, Theme};

pub fn kitchen() -> EntityId {
    EntityId::new("kitchen", TypeTag::Room)
}

pub fn fridge() -> EntityId {
    EntityId::new("fridge", TypeTag::Container)
}

pub fn table() -> EntityId {
    EntityId::new("table", TypeTag::Supporter)
}

pub fn apple() -> EntityId {
    EntityId::new("apple", TypeTag::Food)
}

fn base(fridge_state: &str) -> State {
    State::from_atoms([
        Atom::new("at", vec![EntityId::player(), kitchen()]),
        Atom::new("at", vec![fridge(), kitchen()]),
        Atom::new("at", vec![table(), kitchen()]),
        Atom::new("in", vec![apple(), fridge()]),
        Atom::new(fridge_state, vec![fridge()]),
    ])
}

/// The apple sits in the open fridge.
pub fn mini_world_state() -> State {
    base("open")
}

/// Same kitchen with the fridge closed; the starting state of the
/// eat-the-apple game.
pub fn mini_world_closed() -> State {
    base("closed")
}

fn mini_world_names() -> NameTable {
    let mut names = NameTable::new();
    names.insert(kitchen(), Name::new(None, "kitchen"));
    names.insert(fridge(), Name::new(None, "fridge"));
    names.insert(table(), Name::new(None, "table"));
    names.insert(apple(), Name::new(None, "apple"));
    names
}

/// The eat-the-apple game: open the fridge, take the apple, eat it.
pub fn mini_world_game() -> GameDefinition {
    mini_world_game_with(Theme::House)
}

pub fn mini_world_game_with(theme: Theme) -> GameDefinition {
    kitchen_game(mini_world_closed(), &["open/c", "take/c", "eat"], theme)
}

/// The kitchen as first shown, fridge already open: take the apple, eat it.
pub fn mini_world_open_game() -> GameDefinition {
    kitchen_game(mini_world_state(), &["take/c", "eat"], Theme::House)
}

fn kitchen_game(initial_state: State, steps: &[&str], theme: Theme) -> GameDefinition {
    let rules = core_rules();
    let binding = |name: &str| match name {
        "open/c" => vec![fridge(), kitchen()],
        "take/c" => vec![apple(), fridge(), kitchen()],
        _ => vec![apple()],
    };
    let actions = steps
        .iter()
        .map(|name| {
            rules
                .rule(name)
                .expect("core rule")
                .instantiate(&binding(name))
                .expect("arity")
        })
        .collect();
    GameParts {
        initial_state,
        rules: rules.clone(),
        quest: Some(Quest::new(actions)),
        names: mini_world_names(),
        coords: [(kitchen(), (0, 0))].into(),
        options: TextOptions::default(),
        text_seed: 0,
        metadata: Metadata {
            generator: "fixture".into(),
            ..Metadata::default()
        },
    }
    .compose(&Grammar::builtin(theme))
}
