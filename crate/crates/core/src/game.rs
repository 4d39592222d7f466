//! Game definitions and the `.twg.json` game file.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{atom_well_typed, RuleSet};
use crate::logic::{split_call, Atom, EntityId, GroundAction, LogicError, State};
use crate::quest::Quest;
use crate::rng::{keyed_seed, stage, stage_rng, RNG_ALGORITHM};
use crate::text::{generate_instructions, Grammar, NameTable, TextOptions, Theme};

pub const GAME_FORMAT: &str = "twg";
pub const GAME_VERSION: &str = "1.0";
const GAME_MAJOR: u32 = 1;

#[derive(Debug, Error)]
pub enum GameFileError {
    #[error("corrupt game file: {0}")]
    CorruptFile(String),
    #[error("game file version {found} is not supported (expected {GAME_VERSION})")]
    VersionMismatch { found: String },
    #[error("unsupported game format `{0}`; only native .twg.json games can be loaded")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Text settings that travel with the game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextConfig {
    pub theme: Theme,
    /// Seed for room descriptions.
    pub seed: u64,
    pub options: TextOptions,
    pub welcome: String,
    pub objective: String,
    /// Full grammar source, so the file is self-contained.
    pub grammar: String,
}

/// Provenance. Everything here is informational.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: String,
    pub seeds: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameDefinition {
    pub initial_state: State,
    pub rules: RuleSet,
    pub quest: Option<Quest>,
    pub names: NameTable,
    /// Grid coordinates of rooms, for map views.
    pub coords: BTreeMap<EntityId, (i32, i32)>,
    pub text: TextConfig,
    pub metadata: Metadata,
}

/// Everything but the rendered text.
#[derive(Debug, Clone)]
pub struct GameParts {
    pub initial_state: State,
    pub rules: RuleSet,
    pub quest: Option<Quest>,
    pub names: NameTable,
    pub coords: BTreeMap<EntityId, (i32, i32)>,
    pub options: TextOptions,
    pub text_seed: u64,
    pub metadata: Metadata,
}

impl GameParts {
    /// Renders the welcome line and objective with `grammar`.
    pub fn compose(self, grammar: &Grammar) -> GameDefinition {
        let mut rng = stage_rng(keyed_seed(self.text_seed, "welcome"), stage::TEXT);
        let welcome = grammar.render("welcome", &[], &mut rng).unwrap_or_default();
        let objective = match &self.quest {
            Some(q) => {
                let mut rng = stage_rng(keyed_seed(self.text_seed, "objective"), stage::TEXT);
                generate_instructions(q, &self.names, &self.options, grammar, &mut rng).text
            }
            None => String::new(),
        };
        GameDefinition {
            initial_state: self.initial_state,
            rules: self.rules,
            quest: self.quest,
            names: self.names,
            coords: self.coords,
            text: TextConfig {
                theme: grammar.theme,
                seed: self.text_seed,
                options: self.options,
                welcome,
                objective,
                grammar: grammar.source().to_string(),
            },
            metadata: self.metadata,
        }
    }
}

impl GameDefinition {
    pub fn grammar(&self) -> Result<Grammar, crate::text::GrammarError> {
        Grammar::parse(&self.text.grammar)
    }

    /// Problems that make the game unplayable; empty when it is fine.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        for atom in self.initial_state.distinct() {
            if !atom_well_typed(atom) {
                out.push(format!("ill-typed atom {atom}"));
            }
        }
        if !self.names.is_unique() {
            out.push("display names are not unique".into());
        }
        if let Err(e) = Grammar::parse(&self.text.grammar) {
            out.push(format!("grammar: {e}"));
        }
        if let Some(q) = &self.quest {
            match q.replay(&self.initial_state) {
                Err(e) => out.push(format!("quest does not replay: {e}")),
                Ok(states) => {
                    if q.winning_conditions.is_empty() {
                        out.push("quest has no winning conditions".into());
                    } else if !q.is_won(states.last().expect("non-empty")) {
                        out.push("quest does not reach its winning conditions".into());
                    }
                    if q.is_won(&self.initial_state) {
                        out.push("initial state already wins".into());
                    }
                }
            }
        }
        out
    }

    pub fn entities(&self) -> BTreeSet<EntityId> {
        let mut out = self.initial_state.entities();
        out.extend(self.names.iter().map(|(e, _)| e.clone()));
        out.extend(self.coords.keys().cloned());
        if let Some(q) = &self.quest {
            for a in &q.actions {
                out.extend(a.binding.iter().cloned());
            }
            for atom in q.winning_conditions.iter().chain(&q.losing_conditions) {
                out.extend(atom.args().iter().cloned());
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(&GameFile::from(self)).expect("game file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<GameDefinition, GameFileError> {
        let probe: serde_json::Value =
            serde_json::from_str(text).map_err(|e| GameFileError::CorruptFile(e.to_string()))?;
        match probe.get("format").and_then(|v| v.as_str()) {
            Some(GAME_FORMAT) => {}
            Some(other) => {
                return Err(GameFileError::CorruptFile(format!(
                    "unknown format `{other}`"
                )))
            }
            None => return Err(GameFileError::CorruptFile("missing `format`".into())),
        }
        let version = probe
            .get("version")
            .and_then(|v| v.as_str())
            .ok_or_else(|| GameFileError::CorruptFile("missing `version`".into()))?;
        let major = version
            .split('.')
            .next()
            .and_then(|m| m.parse::<u32>().ok());
        if major != Some(GAME_MAJOR) {
            return Err(GameFileError::VersionMismatch {
                found: version.to_string(),
            });
        }
        let file: GameFile =
            serde_json::from_value(probe).map_err(|e| GameFileError::CorruptFile(e.to_string()))?;
        file.into_definition()
            .map_err(|e| GameFileError::CorruptFile(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), GameFileError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<GameDefinition, GameFileError> {
        check_extension(path)?;
        let text = std::fs::read_to_string(path)?;
        GameDefinition::from_json(&text)
    }
}

/// Interpreter formats this runtime does not play.
const FOREIGN_EXTENSIONS: [&str; 9] = ["z1", "z2", "z3", "z4", "z5", "z6", "z8", "ulx", "gblorb"];

pub fn check_extension(path: &Path) -> Result<(), GameFileError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    if FOREIGN_EXTENSIONS.contains(&ext.as_str()) || ext == "zblorb" || ext == "ni" {
        return Err(GameFileError::UnsupportedFormat(ext));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    format: String,
    version: String,
    rng: String,
    metadata: Metadata,
    entities: Vec<EntityId>,
    rules: Vec<String>,
    reciprocals: Vec<(String, String)>,
    atoms: Vec<String>,
    names: NameTable,
    coords: BTreeMap<EntityId, (i32, i32)>,
    quest: Option<QuestFile>,
    text: TextConfig,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuestFile {
    actions: Vec<String>,
    winning_conditions: Vec<String>,
    losing_conditions: Vec<String>,
}

fn encode_action(a: &GroundAction) -> String {
    a.to_string()
}

impl From<&GameDefinition> for GameFile {
    fn from(g: &GameDefinition) -> Self {
        let mut atoms = Vec::new();
        for atom in g.initial_state.distinct() {
            for _ in 0..g.initial_state.count(atom) {
                atoms.push(atom.to_string());
            }
        }
        GameFile {
            format: GAME_FORMAT.into(),
            version: GAME_VERSION.into(),
            rng: RNG_ALGORITHM.into(),
            metadata: g.metadata.clone(),
            entities: g.entities().into_iter().collect(),
            rules: g.rules.to_lines(),
            reciprocals: g.rules.reciprocal_pairs(),
            atoms,
            names: g.names.clone(),
            coords: g.coords.clone(),
            quest: g.quest.as_ref().map(|q| QuestFile {
                actions: q.actions.iter().map(encode_action).collect(),
                winning_conditions: q.winning_conditions.iter().map(Atom::to_string).collect(),
                losing_conditions: q.losing_conditions.iter().map(Atom::to_string).collect(),
            }),
            text: g.text.clone(),
        }
    }
}

impl GameFile {
    fn into_definition(self) -> Result<GameDefinition, LogicError> {
        if self.rng != RNG_ALGORITHM {
            return Err(LogicError::Syntax(format!("unknown rng `{}`", self.rng)));
        }
        let mut by_id: BTreeMap<String, EntityId> = BTreeMap::new();
        for e in [EntityId::player(), EntityId::inventory()]
            .into_iter()
            .chain(self.entities)
        {
            if let Some(prev) = by_id.insert(e.id().to_string(), e.clone()) {
                if prev != e {
                    return Err(LogicError::Syntax(format!(
                        "entity id `{}` declared twice",
                        e.id()
                    )));
                }
            }
        }
        let lookup = |id: &str| by_id.get(id).cloned();
        let atom = |t: &String| Atom::parse_with(t, &lookup);
        let initial_state = self.atoms.iter().map(atom).collect::<Result<State, _>>()?;
        let rules = RuleSet::from_lines(&self.rules, &self.reciprocals)?;
        let quest = match self.quest {
            None => None,
            Some(q) => {
                let actions = q
                    .actions
                    .iter()
                    .map(|t| {
                        let (name, args) = split_call(t)?;
                        let rule = rules
                            .rule(name)
                            .ok_or_else(|| LogicError::UnknownRule(name.to_string()))?;
                        let binding = args
                            .iter()
                            .map(|a| {
                                lookup(a).ok_or_else(|| LogicError::UnknownEntity(a.to_string()))
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        rule.instantiate(&binding)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Some(Quest {
                    actions,
                    winning_conditions: q
                        .winning_conditions
                        .iter()
                        .map(atom)
                        .collect::<Result<_, _>>()?,
                    losing_conditions: q
                        .losing_conditions
                        .iter()
                        .map(atom)
                        .collect::<Result<_, _>>()?,
                })
            }
        };
        Ok(GameDefinition {
            initial_state,
            rules,
            quest,
            names: self.names,
            coords: self.coords,
            text: self.text,
            metadata: self.metadata,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::mini_world_game;

    #[test]
    fn round_trip() {
        let g = mini_world_game();
        let text = g.to_json();
        let back = GameDefinition::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let text = mini_world_game().to_json();
        for cut in [0, 1, text.len() / 3, text.len() / 2, text.len() - 3] {
            let err = GameDefinition::from_json(&text[..cut]).unwrap_err();
            assert!(matches!(err, GameFileError::CorruptFile(_)), "{cut}: {err}");
        }
    }

    #[test]
    fn future_version_is_rejected() {
        let text = mini_world_game()
            .to_json()
            .replace("\"version\": \"1.0\"", "\"version\": \"2.0\"");
        assert!(matches!(
            GameDefinition::from_json(&text),
            Err(GameFileError::VersionMismatch { .. })
        ));
        let minor = mini_world_game()
            .to_json()
            .replace("\"version\": \"1.0\"", "\"version\": \"1.3\"");
        assert!(GameDefinition::from_json(&minor).is_ok());
    }

    #[test]
    fn foreign_formats_are_refused() {
        for p in ["zork1.z5", "game.ulx", "x.Z8"] {
            assert!(matches!(
                check_extension(Path::new(p)),
                Err(GameFileError::UnsupportedFormat(_))
            ));
        }
        assert!(check_extension(Path::new("g.twg.json")).is_ok());
    }

    #[test]
    fn diagnostics_catch_broken_quests() {
        let mut g = mini_world_game();
        assert!(g.diagnostics().is_empty(), "{:?}", g.diagnostics());
        g.quest.as_mut().unwrap().actions.remove(0);
        assert!(!g.diagnostics().is_empty());
    }
}
