//! Entity display names: an optional adjective and a noun, or a prefix and
//! a number in the basic theme.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::grammar::{Grammar, Naming};
use crate::kb::type_def;
use crate::logic::{EntityId, State, TypeTag};

const LANGUAGE_LIMIT: usize = 100_000;
const NUMBER_RANGE: u32 = 100;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NameError {
    #[error("not enough distinct {kind} names: need {needed}, grammar offers {available}")]
    NameExhaustion {
        kind: String,
        needed: usize,
        available: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Name {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjective: Option<String>,
    pub noun: String,
    pub display: String,
}

impl Name {
    pub fn new(adjective: Option<&str>, noun: &str) -> Self {
        let display = match adjective {
            Some(a) => format!("{a} {noun}"),
            None => noun.to_string(),
        };
        Name {
            adjective: adjective.map(str::to_string),
            noun: noun.to_string(),
            display,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameTable {
    names: BTreeMap<EntityId, Name>,
}

impl NameTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: EntityId, name: Name) {
        self.names.insert(e, name);
    }

    pub fn get(&self, e: &EntityId) -> Option<&Name> {
        self.names.get(e)
    }

    /// Display name, or the raw id for unnamed entities.
    pub fn display<'a>(&'a self, e: &'a EntityId) -> &'a str {
        self.names.get(e).map_or(e.id(), |n| n.display.as_str())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntityId, &Name)> {
        self.names.iter()
    }

    pub fn by_display(&self, display: &str) -> Option<&EntityId> {
        self.names
            .iter()
            .find(|(_, n)| n.display == display)
            .map(|(e, _)| e)
    }

    /// Words that can refer to `e`: its name tokens and its type's class
    /// words.
    pub fn words(&self, e: &EntityId) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self
            .display(e)
            .split_whitespace()
            .map(str::to_string)
            .collect();
        out.extend(type_def(e.tag()).class_words.iter().map(|w| w.to_string()));
        out
    }

    /// True when every word of `phrase` refers to `e`.
    pub fn matches(&self, e: &EntityId, phrase: &[String]) -> bool {
        if phrase.is_empty() {
            return false;
        }
        let words = self.words(e);
        phrase.iter().all(|w| words.contains(w))
    }

    /// True when no two entities share a display name.
    pub fn is_unique(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.names.values().all(|n| seen.insert(n.display.as_str()))
    }
}

fn kind(tag: TypeTag) -> Option<&'static str> {
    Some(match tag {
        TypeTag::Room => "room",
        TypeTag::Container => "container",
        TypeTag::Supporter => "supporter",
        TypeTag::Door => "door",
        TypeTag::Object => "object",
        TypeTag::Food => "food",
        TypeTag::Key => "key",
        TypeTag::Thing | TypeTag::Player | TypeTag::Inventory => return None,
    })
}

/// Names every entity of `state` from `grammar`, with adjectives when the
/// grammar has them.
pub fn assign_names<R: Rng + ?Sized>(
    state: &State,
    grammar: &Grammar,
    rng: &mut R,
) -> Result<NameTable, NameError> {
    assign_names_with(state, grammar, true, rng)
}

/// As [`assign_names`]; `use_adjectives = false` names things by noun only.
/// A key is always named after the adjective (or number) of what it opens.
pub fn assign_names_with<R: Rng + ?Sized>(
    state: &State,
    grammar: &Grammar,
    use_adjectives: bool,
    rng: &mut R,
) -> Result<NameTable, NameError> {
    let entities: Vec<EntityId> = state
        .entities()
        .into_iter()
        .filter(|e| kind(e.tag()).is_some())
        .collect();
    let opens: BTreeMap<EntityId, EntityId> = state
        .with_predicate("match")
        .map(|a| (a.arg(0).clone(), a.arg(1).clone()))
        .collect();
    let locks: BTreeSet<&EntityId> = opens.values().collect();
    // locks first so their keys can agree with them, matched keys last
    let mut order: Vec<&EntityId> = entities.iter().filter(|e| locks.contains(e)).collect();
    order.extend(
        entities
            .iter()
            .filter(|e| !locks.contains(e) && !opens.contains_key(e)),
    );
    order.extend(entities.iter().filter(|e| opens.contains_key(e)));

    let mut namer = Namer {
        grammar,
        use_adjectives,
        used: BTreeSet::new(),
        lock_marks: BTreeSet::new(),
        table: NameTable::new(),
    };
    for e in order {
        let name = match opens.get(e) {
            Some(lock) => namer.key_for(lock, rng)?,
            None => namer.pick(e, locks.contains(e), rng)?,
        };
        namer.used.insert(name.display.clone());
        namer.table.insert(e.clone(), name);
    }
    Ok(namer.table)
}

struct Namer<'a> {
    grammar: &'a Grammar,
    use_adjectives: bool,
    used: BTreeSet<String>,
    lock_marks: BTreeSet<String>,
    table: NameTable,
}

impl Namer<'_> {
    fn words(&self, symbol: &str) -> Vec<String> {
        self.grammar
            .language(symbol, LANGUAGE_LIMIT)
            .unwrap_or_default()
    }

    fn candidates(&self, kind: &str) -> Vec<Name> {
        let nouns = self.words(&format!("{kind}_noun"));
        match self.grammar.naming {
            Naming::PrefixNumber => {
                let prefixes = self.words(&format!("{kind}_prefix"));
                prefixes
                    .iter()
                    .flat_map(|p| {
                        (0..NUMBER_RANGE).map(move |n| Name::new(None, &format!("{p}{n}")))
                    })
                    .collect()
            }
            Naming::AdjectiveNoun => {
                let adjs = if self.use_adjectives {
                    self.words(&format!("{kind}_adj"))
                } else {
                    Vec::new()
                };
                if adjs.is_empty() {
                    nouns.iter().map(|n| Name::new(None, n)).collect()
                } else {
                    adjs.iter()
                        .flat_map(|a| nouns.iter().map(move |n| Name::new(Some(a), n)))
                        .collect()
                }
            }
        }
    }

    fn exhausted(&self, kind: &str) -> NameError {
        let available = self.candidates(kind).len();
        let needed = self
            .table
            .iter()
            .filter(|(e, _)| e.tag().symbol() == kind_symbol(kind))
            .count()
            + 1;
        NameError::NameExhaustion {
            kind: kind.to_string(),
            needed: needed.max(available + 1),
            available,
        }
    }

    fn pick<R: Rng + ?Sized>(
        &mut self,
        e: &EntityId,
        is_lock: bool,
        rng: &mut R,
    ) -> Result<Name, NameError> {
        let kind = kind(e.tag()).expect("named kind");
        let free: Vec<Name> = self
            .candidates(kind)
            .into_iter()
            .filter(|n| !self.used.contains(&n.display))
            .collect();
        if free.is_empty() {
            return Err(self.exhausted(kind));
        }
        let pool: Vec<&Name> = if is_lock {
            // locks prefer marks no other lock has, so keys stay distinct
            let fresh: Vec<&Name> = free
                .iter()
                .filter(|n| lock_mark(n).is_some_and(|m| !self.lock_marks.contains(&m)))
                .collect();
            if fresh.is_empty() {
                free.iter().collect()
            } else {
                fresh
            }
        } else {
            free.iter().collect()
        };
        let name = (*pool.choose(rng).expect("non-empty")).clone();
        if let (true, Some(m)) = (is_lock, lock_mark(&name)) {
            self.lock_marks.insert(m);
        }
        Ok(name)
    }

    fn key_for<R: Rng + ?Sized>(
        &mut self,
        lock: &EntityId,
        rng: &mut R,
    ) -> Result<Name, NameError> {
        let lock_name = self.table.get(lock).cloned();
        let candidates = self.candidates("key");
        let free: Vec<Name> = match (self.grammar.naming, lock_name) {
            (Naming::AdjectiveNoun, Some(lock)) if lock.adjective.is_some() => {
                let nouns = self.words("key_noun");
                nouns
                    .iter()
                    .map(|n| Name::new(lock.adjective.as_deref(), n))
                    .filter(|n| !self.used.contains(&n.display))
                    .collect()
            }
            (Naming::PrefixNumber, Some(lock)) => {
                let digits: String = lock.display.chars().filter(char::is_ascii_digit).collect();
                let prefixes = self.words("key_prefix");
                prefixes
                    .iter()
                    .map(|p| Name::new(None, &format!("{p}{digits}")))
                    .filter(|n| !self.used.contains(&n.display))
                    .collect()
            }
            _ => candidates
                .into_iter()
                .filter(|n| !self.used.contains(&n.display))
                .collect(),
        };
        free.choose(rng)
            .cloned()
            .ok_or_else(|| self.exhausted("key"))
    }
}

/// What a key shares with its lock: the adjective, or the number.
fn lock_mark(name: &Name) -> Option<String> {
    match &name.adjective {
        Some(a) => Some(a.clone()),
        None => {
            let digits: String = name.display.chars().filter(char::is_ascii_digit).collect();
            (!digits.is_empty()).then_some(digits)
        }
    }
}

fn kind_symbol(kind: &str) -> &'static str {
    match kind {
        "room" => "r",
        "container" => "c",
        "supporter" => "s",
        "door" => "d",
        "object" => "o",
        "food" => "f",
        _ => "k",
    }
}
