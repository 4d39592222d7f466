//! Player text to grounded actions.
//!
//! Commands are `verb [noun phrase [marker noun phrase]]`. Determiners are
//! dropped, the first marker word (`from`, `with`, `on`, `in`, `into`,
//! `onto`) splits the two noun phrases, and noun phrases resolve against the
//! entities the player can currently see.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::RuleSet;
use crate::logic::{admissible_actions, Atom, EntityId, GroundAction, State, TypeTag};
use crate::text::NameTable;
use crate::world::{player_room, Direction};

/// Default command length limit, in words.
pub const DEFAULT_MAX_WORDS: usize = 8;

pub const DETERMINERS: [&str; 4] = ["the", "a", "an", "some"];
pub const MARKERS: [&str; 6] = ["from", "with", "on", "onto", "in", "into"];

/// Why an understood command cannot be carried out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "object", rename_all = "snake_case")]
pub enum Refusal {
    Locked(String),
    Closed(String),
    AlreadyOpen(String),
    AlreadyClosed(String),
    NoExit,
    NotHeld(String),
    AlreadyHeld(String),
    NoKey(String),
    Cannot,
    NothingToTake,
}

impl Refusal {
    pub fn code(&self) -> &'static str {
        match self {
            Refusal::Locked(_) => "locked",
            Refusal::Closed(_) => "closed",
            Refusal::AlreadyOpen(_) => "already_open",
            Refusal::AlreadyClosed(_) => "already_closed",
            Refusal::NoExit => "no_exit",
            Refusal::NotHeld(_) => "not_held",
            Refusal::AlreadyHeld(_) => "already_held",
            Refusal::NoKey(_) => "no_key",
            Refusal::Cannot => "cannot",
            Refusal::NothingToTake => "nothing_to_take",
        }
    }

    pub fn object(&self) -> Option<&str> {
        match self {
            Refusal::Locked(o)
            | Refusal::Closed(o)
            | Refusal::AlreadyOpen(o)
            | Refusal::AlreadyClosed(o)
            | Refusal::NotHeld(o)
            | Refusal::AlreadyHeld(o)
            | Refusal::NoKey(o) => Some(o),
            Refusal::NoExit | Refusal::Cannot | Refusal::NothingToTake => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    #[error("unknown verb `{word}`")]
    UnknownVerb { word: String },
    #[error("command longer than {limit} words")]
    TooLong { limit: usize },
    /// An empty `phrase` means the verb needed an object and got none.
    #[error("no `{phrase}` in sight for `{verb}`")]
    UnknownNoun { phrase: String, verb: String },
    #[error("ambiguous: {}", options.join(", "))]
    Ambiguous { options: Vec<String> },
    #[error("not possible: {}", refusal.code())]
    NotAdmissible { refusal: Refusal },
}

impl ParseError {
    /// Machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::EmptyInput => "empty_input",
            ParseError::UnknownVerb { .. } => "unknown_verb",
            ParseError::TooLong { .. } => "too_long",
            ParseError::UnknownNoun { .. } => "unknown_noun",
            ParseError::Ambiguous { .. } => "ambiguous",
            ParseError::NotAdmissible { .. } => "not_admissible",
        }
    }

    fn refuse(refusal: Refusal) -> Self {
        ParseError::NotAdmissible { refusal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VerbKind {
    Rule(&'static str),
    Go,
    Move(Option<Direction>),
    Look,
    Inventory,
}

/// Verb words and the length limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub max_words: usize,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            max_words: DEFAULT_MAX_WORDS,
        }
    }
}

impl Vocabulary {
    pub fn with_max_words(max_words: usize) -> Self {
        Vocabulary { max_words }
    }

    fn verb(&self, word: &str) -> Option<VerbKind> {
        use VerbKind::*;
        Some(match word {
            "take" | "get" | "grab" => Rule("take"),
            "drop" => Rule("drop"),
            "put" | "place" => Rule("put"),
            "insert" => Rule("insert"),
            "open" => Rule("open"),
            "close" | "shut" => Rule("close"),
            "unlock" => Rule("unlock"),
            "lock" => Rule("lock"),
            "eat" => Rule("eat"),
            "go" | "walk" | "run" | "head" => Go,
            "look" | "l" => Look,
            "inventory" | "inv" | "i" => Inventory,
            "up" | "u" | "down" | "d" => Move(None),
            _ => Move(Some(direction_word(word)?)),
        })
    }

    /// All words accepted in verb position.
    pub fn verbs(&self) -> Vec<&'static str> {
        vec![
            "take",
            "get",
            "grab",
            "drop",
            "put",
            "place",
            "insert",
            "open",
            "close",
            "shut",
            "unlock",
            "lock",
            "eat",
            "go",
            "walk",
            "run",
            "head",
            "look",
            "l",
            "inventory",
            "inv",
            "i",
            "north",
            "n",
            "south",
            "s",
            "east",
            "e",
            "west",
            "w",
            "up",
            "u",
            "down",
            "d",
        ]
    }
}

fn direction_word(word: &str) -> Option<Direction> {
    match word {
        "n" => Some(Direction::North),
        "s" => Some(Direction::South),
        "e" => Some(Direction::East),
        "w" => Some(Direction::West),
        _ => Direction::from_word(word),
    }
}

/// A syntactically valid command. `verb` is the canonical verb word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Command {
    pub verb: String,
    pub noun_phrase: Vec<String>,
    pub marker: Option<String>,
    pub adverb_phrase: Vec<String>,
    pub raw: String,
}

/// What a command asks the engine to do.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Intent {
    Act(GroundAction),
    /// Every admissible take, in canonical order.
    TakeAll(Vec<GroundAction>),
    Look,
    Inventory,
}

fn tokenize(input: &str) -> Vec<String> {
    let cleaned: String = input
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '\'' {
                c.to_ascii_lowercase()
            } else {
                ' '
            }
        })
        .collect();
    cleaned.split_whitespace().map(str::to_string).collect()
}

pub fn parse(input: &str, vocab: &Vocabulary) -> Result<Command, ParseError> {
    let words = tokenize(input);
    let Some(first) = words.first() else {
        return Err(ParseError::EmptyInput);
    };
    if words.len() > vocab.max_words {
        return Err(ParseError::TooLong {
            limit: vocab.max_words,
        });
    }
    let kind = vocab.verb(first).ok_or_else(|| ParseError::UnknownVerb {
        word: first.clone(),
    })?;
    let verb = match kind {
        VerbKind::Rule(v) => v.to_string(),
        VerbKind::Go => "go".to_string(),
        VerbKind::Look => "look".to_string(),
        VerbKind::Inventory => "inventory".to_string(),
        VerbKind::Move(_) => "go".to_string(),
    };
    let mut rest: Vec<String> = words[1..]
        .iter()
        .filter(|w| !DETERMINERS.contains(&w.as_str()))
        .cloned()
        .collect();
    if let VerbKind::Move(_) = kind {
        rest.insert(0, first.clone());
    }
    let (noun_phrase, marker, adverb_phrase) =
        match rest.iter().position(|w| MARKERS.contains(&w.as_str())) {
            Some(i) if verb != "go" => {
                let adverb = rest.split_off(i + 1);
                let marker = rest.pop();
                (rest, marker, adverb)
            }
            _ => (rest, None, Vec::new()),
        };
    Ok(Command {
        verb,
        noun_phrase,
        marker,
        adverb_phrase,
        raw: input.to_string(),
    })
}

/// Entities the player can refer to: things in the room, contents of open
/// containers and of supporters there, the inventory, and doors leading out.
pub fn scope(state: &State) -> BTreeSet<EntityId> {
    let mut out = BTreeSet::new();
    let inv = EntityId::inventory();
    out.extend(
        state
            .with_predicate("in")
            .filter(|a| a.arg(1) == &inv)
            .map(|a| a.arg(0).clone()),
    );
    let Some(room) = player_room(state) else {
        return out;
    };
    let player = EntityId::player();
    let here: Vec<EntityId> = state
        .with_predicate("at")
        .filter(|a| a.arg(1) == &room && a.arg(0) != &player)
        .map(|a| a.arg(0).clone())
        .collect();
    for e in &here {
        match e.tag() {
            TypeTag::Container if state.contains(&Atom::new("open", vec![e.clone()])) => {
                out.extend(
                    state
                        .with_predicate("in")
                        .filter(|a| a.arg(1) == e)
                        .map(|a| a.arg(0).clone()),
                );
            }
            TypeTag::Supporter => {
                out.extend(
                    state
                        .with_predicate("on")
                        .filter(|a| a.arg(1) == e)
                        .map(|a| a.arg(0).clone()),
                );
            }
            _ => {}
        }
    }
    out.extend(here);
    out.extend(
        state
            .with_predicate("link")
            .filter(|a| a.arg(0) == &room)
            .map(|a| a.arg(1).clone()),
    );
    out
}

fn resolve_phrase(
    phrase: &[String],
    scope: &BTreeSet<EntityId>,
    names: &NameTable,
    verb: &str,
) -> Result<Vec<EntityId>, ParseError> {
    let unknown = || ParseError::UnknownNoun {
        phrase: phrase.join(" "),
        verb: verb.to_string(),
    };
    if phrase.is_empty() {
        return Err(unknown());
    }
    let hits: Vec<EntityId> = scope
        .iter()
        .filter(|e| names.matches(e, phrase))
        .cloned()
        .collect();
    if hits.is_empty() {
        return Err(unknown());
    }
    let full = phrase.join(" ");
    let exact: Vec<EntityId> = hits
        .iter()
        .filter(|e| names.display(e) == full)
        .cloned()
        .collect();
    Ok(if exact.is_empty() { hits } else { exact })
}

fn marker_compatible(given: &str, rule_marker: Option<&str>) -> bool {
    let norm = |m: &str| {
        match m {
            "into" => "in",
            "onto" => "on",
            other => other,
        }
        .to_string()
    };
    rule_marker.is_some_and(|m| norm(m) == norm(given))
}

fn has(state: &State, pred: &str, args: &[&EntityId]) -> bool {
    state.contains(&Atom::new(
        pred,
        args.iter().map(|e| (*e).clone()).collect(),
    ))
}

fn held(state: &State, e: &EntityId) -> bool {
    has(state, "in", &[e, &EntityId::inventory()])
}

fn diagnose(
    verb: &str,
    target: &EntityId,
    second: Option<&EntityId>,
    state: &State,
    names: &NameTable,
) -> Refusal {
    let name = |e: &EntityId| names.display(e).to_string();
    match verb {
        "open" if has(state, "locked", &[target]) => Refusal::Locked(name(target)),
        "open" if has(state, "open", &[target]) => Refusal::AlreadyOpen(name(target)),
        "close" if has(state, "closed", &[target]) || has(state, "locked", &[target]) => {
            Refusal::AlreadyClosed(name(target))
        }
        "unlock" if has(state, "locked", &[target]) => match second {
            Some(k) if !held(state, k) => Refusal::NotHeld(name(k)),
            _ => Refusal::NoKey(name(target)),
        },
        "lock" if has(state, "closed", &[target]) => match second {
            Some(k) if !held(state, k) => Refusal::NotHeld(name(k)),
            _ => Refusal::NoKey(name(target)),
        },
        "take" if held(state, target) => Refusal::AlreadyHeld(name(target)),
        "drop" | "put" | "insert" | "eat" if !held(state, target) => Refusal::NotHeld(name(target)),
        "insert" => match second {
            Some(c) if has(state, "locked", &[c]) => Refusal::Locked(name(c)),
            Some(c) if has(state, "closed", &[c]) => Refusal::Closed(name(c)),
            _ => Refusal::Cannot,
        },
        _ => Refusal::Cannot,
    }
}

fn go_refusal(dir: Option<Direction>, state: &State, names: &NameTable) -> Refusal {
    let (Some(dir), Some(room)) = (dir, player_room(state)) else {
        return Refusal::NoExit;
    };
    let Some(next) = state
        .with_predicate(dir.predicate())
        .find(|a| a.arg(1) == &room)
        .map(|a| a.arg(0).clone())
    else {
        return Refusal::NoExit;
    };
    match state
        .with_predicate("link")
        .find(|a| a.arg(0) == &room && a.arg(2) == &next)
    {
        Some(link) if has(state, "locked", &[link.arg(1)]) => {
            Refusal::Locked(names.display(link.arg(1)).to_string())
        }
        Some(link) => Refusal::Closed(names.display(link.arg(1)).to_string()),
        None => Refusal::Cannot,
    }
}

fn ambiguous(entities: impl IntoIterator<Item = EntityId>, names: &NameTable) -> ParseError {
    let options: BTreeSet<String> = entities
        .into_iter()
        .map(|e| names.display(&e).to_string())
        .collect();
    ParseError::Ambiguous {
        options: options.into_iter().collect(),
    }
}

/// Turns a parsed command into what the engine should do.
pub fn interpret(
    cmd: &Command,
    state: &State,
    names: &NameTable,
    rules: &RuleSet,
) -> Result<Intent, ParseError> {
    match cmd.verb.as_str() {
        "look" => return Ok(Intent::Look),
        "inventory" => return Ok(Intent::Inventory),
        "take" if cmd.noun_phrase == ["all"] && cmd.marker.is_none() => {
            let takes: Vec<GroundAction> = admissible_actions(state, rules.rules())
                .into_iter()
                .filter(|a| a.verb() == "take")
                .collect();
            if takes.is_empty() {
                return Err(ParseError::refuse(Refusal::NothingToTake));
            }
            return Ok(Intent::TakeAll(takes));
        }
        _ => {}
    }
    resolve(cmd, state, names, rules).map(Intent::Act)
}

/// The unique admissible action the command denotes.
pub fn resolve(
    cmd: &Command,
    state: &State,
    names: &NameTable,
    rules: &RuleSet,
) -> Result<GroundAction, ParseError> {
    let admissible = admissible_actions(state, rules.rules());
    if cmd.verb == "go" {
        let Some(word) = cmd.noun_phrase.first() else {
            return Err(ParseError::UnknownNoun {
                phrase: String::new(),
                verb: "go".into(),
            });
        };
        let dir = match word.as_str() {
            "up" | "u" | "down" | "d" => None,
            w => Some(direction_word(w).ok_or_else(|| ParseError::UnknownNoun {
                phrase: cmd.noun_phrase.join(" "),
                verb: "go".into(),
            })?),
        };
        if cmd.noun_phrase.len() > 1 {
            return Err(ParseError::UnknownNoun {
                phrase: cmd.noun_phrase.join(" "),
                verb: "go".into(),
            });
        }
        if let Some(d) = dir {
            if let Some(a) = admissible.iter().find(|a| a.rule_name() == d.rule_name()) {
                return Ok(a.clone());
            }
        }
        return Err(ParseError::refuse(go_refusal(dir, state, names)));
    }

    let in_scope = scope(state);
    let first = resolve_phrase(&cmd.noun_phrase, &in_scope, names, &cmd.verb)?;
    let second = match &cmd.marker {
        Some(_) => Some(resolve_phrase(
            &cmd.adverb_phrase,
            &in_scope,
            names,
            &cmd.verb,
        )?),
        None => None,
    };
    let verb = match (cmd.verb.as_str(), cmd.marker.as_deref()) {
        ("put", Some("in" | "into")) => "insert",
        (v, _) => v,
    };
    let given = if second.is_some() { 2 } else { 1 };

    let fits = |a: &GroundAction, exact: bool| {
        let Some(rule) = rules.rule(a.rule_name()) else {
            return false;
        };
        if rule.verb() != verb {
            return false;
        }
        let params = rule.command_params();
        let arity_ok = if exact {
            params.len() == given
        } else {
            params.len() > given
        };
        if !arity_ok || !first.contains(&a.binding[params[0]]) {
            return false;
        }
        match (&second, &cmd.marker) {
            (Some(s), Some(m)) => {
                marker_compatible(m, rule.command_marker()) && s.contains(&a.binding[params[1]])
            }
            _ => true,
        }
    };
    let mut matches: Vec<&GroundAction> = admissible.iter().filter(|a| fits(a, true)).collect();
    if matches.is_empty() {
        matches = admissible.iter().filter(|a| fits(a, false)).collect();
    }
    match matches.as_slice() {
        [one] => Ok((*one).clone()),
        [] => {
            if first.len() > 1 {
                return Err(ambiguous(first, names));
            }
            if let Some(s) = second.as_ref().filter(|s| s.len() > 1) {
                return Err(ambiguous(s.clone(), names));
            }
            let second_one = second.as_ref().and_then(|s| s.first());
            Err(ParseError::refuse(diagnose(
                verb, &first[0], second_one, state, names,
            )))
        }
        many => {
            let rule_of = |a: &GroundAction| {
                rules
                    .rule(a.rule_name())
                    .map(|r| r.command_params())
                    .unwrap_or_default()
            };
            let firsts: BTreeSet<EntityId> = many
                .iter()
                .map(|a| a.binding[rule_of(a)[0]].clone())
                .collect();
            if firsts.len() > 1 {
                return Err(ambiguous(firsts, names));
            }
            let seconds: BTreeSet<EntityId> = many
                .iter()
                .filter_map(|a| rule_of(a).get(1).map(|&i| a.binding[i].clone()))
                .collect();
            Err(ambiguous(seconds, names))
        }
    }
}

/// The command text for `action`, filled with display names.
pub fn render_command(action: &GroundAction, names: &NameTable, rules: &RuleSet) -> String {
    let Some(rule) = rules.rule(action.rule_name()) else {
        return action.to_string();
    };
    let mut out = rule.command.clone();
    for (param, entity) in rule.params.iter().zip(&action.binding) {
        out = out.replace(&format!("{{{}}}", param.name), names.display(entity));
    }
    out
}
