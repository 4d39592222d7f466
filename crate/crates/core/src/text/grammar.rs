//! Themed context-free grammars.
//!
//! File format, one production per line:
//!
//! ```text
//! @version 1
//! @theme house
//! @naming adjective-noun
//! // a comment
//! container_noun -> chest | box | cabinet
//!                 | toolbox {2}
//! thing_here -> There is #a_thing# here. | You see #a_thing#.
//! ```
//!
//! `<name>` references a nonterminal, `#slot#` is filled by the caller after
//! expansion, and a trailing `{w}` weights an alternative (default 1).
//! Lines starting with `|` continue the previous production.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use thiserror::Error;

pub const GRAMMAR_VERSION: u32 = 1;

pub const HOUSE_SOURCE: &str = include_str!("../../grammars/house.twg");
pub const BASIC_SOURCE: &str = include_str!("../../grammars/basic.twg");

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("grammar version {found} is not supported (expected {GRAMMAR_VERSION})")]
    Version { found: u32 },
    #[error("invalid grammar: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unknown nonterminal `{0}`")]
    UnknownSymbol(String),
    #[error("unknown theme `{0}`")]
    UnknownTheme(String),
    #[error("cannot read grammar file: {0}")]
    Io(String),
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Theme {
    House,
    Basic,
}

impl Theme {
    pub fn name(self) -> &'static str {
        match self {
            Theme::House => "house",
            Theme::Basic => "basic",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            Theme::House => HOUSE_SOURCE,
            Theme::Basic => BASIC_SOURCE,
        }
    }
}

impl std::str::FromStr for Theme {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "house" => Ok(Theme::House),
            "basic" => Ok(Theme::Basic),
            other => Err(GrammarError::UnknownTheme(other.to_string())),
        }
    }
}

/// How entity names are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Naming {
    /// Optional adjective plus noun (`dusty box`).
    AdjectiveNoun,
    /// Prototypical prefix plus number (`stand42`).
    PrefixNumber,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Text(String),
    Symbol(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alternative {
    pub pieces: Vec<Piece>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    pub theme: Theme,
    pub naming: Naming,
    pub version: u32,
    pub productions: BTreeMap<String, Vec<Alternative>>,
    source: String,
}

/// Symbols the engine expands, with the slots each may use.
pub const REQUIRED_SYMBOLS: &[(&str, &[&str])] = &[
    ("room_intro", &["room"]),
    ("thing_here", &["a_thing"]),
    ("group_here", &["count", "adjective", "kind", "list"]),
    ("container_open", &["the_thing", "subject"]),
    ("container_closed", &["the_thing", "subject"]),
    ("container_locked", &["the_thing", "subject"]),
    ("contents_in", &["the_thing", "where", "list"]),
    ("contents_on", &["the_thing", "where", "list"]),
    ("nothing", &[]),
    ("floor_item", &["a_thing"]),
    ("exit_free", &["direction"]),
    ("exit_door", &["a_door", "direction", "door_state"]),
    ("instr_take", &["obj"]),
    ("instr_take_from", &["obj", "src"]),
    ("instr_take_from_shut", &["obj", "src", "state"]),
    ("instr_drop", &["obj"]),
    ("instr_put", &["obj", "dst"]),
    ("instr_insert", &["obj", "dst"]),
    ("instr_open", &["obj"]),
    ("instr_close", &["obj"]),
    ("instr_unlock", &["obj", "key"]),
    ("instr_lock", &["obj", "key"]),
    ("instr_eat", &["obj"]),
    ("instr_go", &["direction"]),
    ("instr_go_many", &["directions"]),
    ("instr_then", &[]),
    ("instr_find", &["obj"]),
    ("welcome", &[]),
    ("fb_take", &["the_obj"]),
    ("fb_take_from", &["the_obj", "the_src"]),
    ("fb_drop", &["the_obj"]),
    ("fb_put", &["the_obj", "the_dst"]),
    ("fb_insert", &["the_obj", "the_dst"]),
    ("fb_open", &["the_obj"]),
    ("fb_close", &["the_obj"]),
    ("fb_unlock", &["the_obj", "the_key"]),
    ("fb_lock", &["the_obj", "the_key"]),
    ("fb_eat", &["the_obj"]),
    ("fb_unknown_verb", &["word"]),
    ("fb_unknown_noun", &["phrase"]),
    ("fb_missing_noun", &["verb"]),
    ("fb_ambiguous", &["options"]),
    ("fb_too_long", &["limit"]),
    ("fb_empty", &[]),
    ("fb_locked", &["the_obj"]),
    ("fb_closed", &["the_obj"]),
    ("fb_already_open", &["the_obj"]),
    ("fb_already_closed", &["the_obj"]),
    ("fb_no_exit", &[]),
    ("fb_not_held", &["the_obj"]),
    ("fb_already_held", &["the_obj"]),
    ("fb_no_key", &["the_obj"]),
    ("fb_cannot", &[]),
    ("fb_take_all_none", &[]),
    ("fb_inventory", &["list"]),
    ("fb_inventory_empty", &[]),
    ("fb_won", &[]),
    ("fb_lost", &[]),
];

/// Naming symbols per entity kind: `<kind>_noun` for every kind, plus
/// `<kind>_adj` (adjective-noun naming) or `<kind>_prefix` (prefix-number).
pub const NAME_KINDS: &[&str] = &[
    "room",
    "container",
    "supporter",
    "door",
    "object",
    "food",
    "key",
];

fn syntax(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_alternative(text: &str, line: usize) -> Result<Alternative, GrammarError> {
    let mut text = text.trim();
    let mut weight = 1.0;
    if let Some(open) = text.rfind('{') {
        if text.ends_with('}') {
            let w = &text[open + 1..text.len() - 1];
            weight = w
                .trim()
                .parse::<f64>()
                .map_err(|_| syntax(line, format!("bad weight `{w}`")))?;
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(syntax(line, format!("weight must be positive, got `{w}`")));
            }
            text = text[..open].trim_end();
        }
    }
    let mut pieces = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        let close = rest[open..]
            .find('>')
            .ok_or_else(|| syntax(line, "unterminated `<`"))?;
        if open > 0 {
            pieces.push(Piece::Text(rest[..open].to_string()));
        }
        let name = &rest[open + 1..open + close];
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(line, format!("bad nonterminal name `{name}`")));
        }
        pieces.push(Piece::Symbol(name.to_string()));
        rest = &rest[open + close + 1..];
    }
    if !rest.is_empty() {
        pieces.push(Piece::Text(rest.to_string()));
    }
    Ok(Alternative { pieces, weight })
}

impl Grammar {
    pub fn parse(source: &str) -> Result<Grammar, GrammarError> {
        let grammar = Grammar::parse_raw(source)?;
        let problems = grammar.validate();
        if !problems.is_empty() {
            return Err(GrammarError::Invalid(problems));
        }
        Ok(grammar)
    }

    /// Parses without the completeness checks of [`Grammar::validate`].
    pub fn parse_raw(source: &str) -> Result<Grammar, GrammarError> {
        let mut version = None;
        let mut theme = None;
        let mut naming = Naming::AdjectiveNoun;
        let mut productions: BTreeMap<String, Vec<Alternative>> = BTreeMap::new();
        let mut last: Option<String> = None;
        for (i, raw) in source.lines().enumerate() {
            let line = i + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with("//") {
                continue;
            }
            if let Some(directive) = text.strip_prefix('@') {
                let (key, value) = directive
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| syntax(line, "directive without value"))?;
                let value = value.trim();
                match key {
                    "version" => {
                        let v = value
                            .parse::<u32>()
                            .map_err(|_| syntax(line, format!("bad version `{value}`")))?;
                        if v != GRAMMAR_VERSION {
                            return Err(GrammarError::Version { found: v });
                        }
                        version = Some(v);
                    }
                    "theme" => theme = Some(value.parse::<Theme>()?),
                    "naming" => {
                        naming = match value {
                            "adjective-noun" => Naming::AdjectiveNoun,
                            "prefix-number" => Naming::PrefixNumber,
                            other => return Err(syntax(line, format!("unknown naming `{other}`"))),
                        }
                    }
                    other => return Err(syntax(line, format!("unknown directive `@{other}`"))),
                }
                continue;
            }
            let (name, body) = if let Some(cont) = text.strip_prefix('|') {
                let name = last
                    .clone()
                    .ok_or_else(|| syntax(line, "continuation without production"))?;
                (name, cont)
            } else {
                let (lhs, rhs) = text
                    .split_once("->")
                    .ok_or_else(|| syntax(line, "expected `NAME -> alternatives`"))?;
                let name = lhs.trim().to_string();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(syntax(line, format!("bad nonterminal name `{name}`")));
                }
                if productions.contains_key(&name) {
                    return Err(syntax(line, format!("duplicate production `{name}`")));
                }
                (name, rhs)
            };
            let alts = productions.entry(name.clone()).or_default();
            for alt in body.split('|') {
                alts.push(parse_alternative(alt, line)?);
            }
            last = Some(name);
        }
        let version = version.ok_or(GrammarError::Version { found: 0 })?;
        let theme = theme.ok_or_else(|| syntax(0, "missing `@theme` directive"))?;
        Ok(Grammar {
            theme,
            naming,
            version,
            productions,
            source: source.to_string(),
        })
    }

    pub fn builtin(theme: Theme) -> Grammar {
        Grammar::parse(theme.source()).expect("shipped grammar is valid")
    }

    pub fn load(path: &Path) -> Result<Grammar, GrammarError> {
        let text = std::fs::read_to_string(path).map_err(|e| GrammarError::Io(e.to_string()))?;
        Grammar::parse(&text)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn has(&self, symbol: &str) -> bool {
        self.productions.contains_key(symbol)
    }

    /// Nonterminals used by the engine given this grammar's naming scheme.
    fn roots(&self) -> Vec<String> {
        let mut roots: Vec<String> = REQUIRED_SYMBOLS
            .iter()
            .map(|(s, _)| s.to_string())
            .collect();
        for kind in NAME_KINDS {
            roots.push(format!("{kind}_noun"));
            match self.naming {
                Naming::AdjectiveNoun => {
                    if self.has(&format!("{kind}_adj")) {
                        roots.push(format!("{kind}_adj"));
                    }
                }
                Naming::PrefixNumber => roots.push(format!("{kind}_prefix")),
            }
        }
        roots
    }

    /// Undefined references, missing required symbols, unreachable or
    /// non-terminating nonterminals and slots a symbol may not use.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (name, alts) in &self.productions {
            if alts.is_empty() {
                problems.push(format!("`{name}` has no alternatives"));
            }
            for alt in alts {
                for piece in &alt.pieces {
                    if let Piece::Symbol(s) = piece {
                        if !self.has(s) {
                            problems.push(format!("`{name}` references undefined `{s}`"));
                        }
                    }
                }
            }
        }
        let roots = self.roots();
        for r in &roots {
            if !self.has(r) {
                problems.push(format!("required symbol `{r}` is missing"));
            }
        }
        let mut reachable: BTreeSet<&str> = BTreeSet::new();
        let mut stack: Vec<&str> = roots
            .iter()
            .map(String::as_str)
            .filter(|r| self.has(r))
            .collect();
        while let Some(s) = stack.pop() {
            if !reachable.insert(s) {
                continue;
            }
            for alt in &self.productions[s] {
                for piece in &alt.pieces {
                    if let Piece::Symbol(t) = piece {
                        if self.has(t) {
                            stack.push(t);
                        }
                    }
                }
            }
        }
        for name in self.productions.keys() {
            if !reachable.contains(name.as_str()) {
                problems.push(format!("`{name}` is unreachable"));
            }
        }
        // terminating: least fixpoint of symbols with an all-terminating alternative
        let mut terminating: BTreeSet<&str> = BTreeSet::new();
        loop {
            let before = terminating.len();
            for (name, alts) in &self.productions {
                if terminating.contains(name.as_str()) {
                    continue;
                }
                let ok = alts.iter().any(|alt| {
                    alt.pieces.iter().all(|p| match p {
                        Piece::Text(_) => true,
                        Piece::Symbol(s) => terminating.contains(s.as_str()),
                    })
                });
                if ok {
                    terminating.insert(name);
                }
            }
            if terminating.len() == before {
                break;
            }
        }
        for name in self.productions.keys() {
            if !terminating.contains(name.as_str()) {
                problems.push(format!("`{name}` never terminates"));
            }
        }
        if problems.is_empty() {
            for (sym, allowed) in REQUIRED_SYMBOLS {
                for slot in self.slots_of(sym) {
                    if !allowed.contains(&slot.as_str()) {
                        problems.push(format!("`{sym}` uses slot `#{slot}#` it does not provide"));
                    }
                }
            }
        }
        problems
    }

    /// Slots that can appear in expansions of `symbol`.
    pub fn slots_of(&self, symbol: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![symbol.to_string()];
        while let Some(s) = stack.pop() {
            if !seen.insert(s.clone()) {
                continue;
            }
            let Some(alts) = self.productions.get(&s) else {
                continue;
            };
            for alt in alts {
                for piece in &alt.pieces {
                    match piece {
                        Piece::Symbol(t) => stack.push(t.clone()),
                        Piece::Text(t) => out.extend(slot_names(t)),
                    }
                }
            }
        }
        out
    }

    /// Expands `symbol` into text that may still contain `#slot#` markers.
    pub fn expand<R: Rng + ?Sized>(
        &self,
        symbol: &str,
        rng: &mut R,
    ) -> Result<String, GrammarError> {
        let mut out = String::new();
        self.expand_into(symbol, rng, &mut out, 0)?;
        Ok(out)
    }

    fn expand_into<R: Rng + ?Sized>(
        &self,
        symbol: &str,
        rng: &mut R,
        out: &mut String,
        depth: usize,
    ) -> Result<(), GrammarError> {
        let alts = self
            .productions
            .get(symbol)
            .ok_or_else(|| GrammarError::UnknownSymbol(symbol.to_string()))?;
        // deep recursion falls back to the first terminating alternative
        let alt = if depth > 32 {
            alts.iter()
                .find(|a| a.pieces.iter().all(|p| matches!(p, Piece::Text(_))))
                .unwrap_or(&alts[0])
        } else {
            pick(alts, rng)
        };
        for piece in &alt.pieces {
            match piece {
                Piece::Text(t) => out.push_str(t),
                Piece::Symbol(s) => self.expand_into(s, rng, out, depth + 1)?,
            }
        }
        Ok(())
    }

    /// Expands and fills slots from `slots`; unknown slots are left as is.
    pub fn render<R: Rng + ?Sized>(
        &self,
        symbol: &str,
        slots: &[(&str, &str)],
        rng: &mut R,
    ) -> Result<String, GrammarError> {
        let template = self.expand(symbol, rng)?;
        Ok(fill(&template, slots))
    }

    /// Every string `symbol` can produce, if there are at most `limit`.
    pub fn language(&self, symbol: &str, limit: usize) -> Option<Vec<String>> {
        let mut out = self.language_rec(symbol, limit, 0)?;
        let mut seen = BTreeSet::new();
        out.retain(|s| seen.insert(s.clone()));
        Some(out)
    }

    fn language_rec(&self, symbol: &str, limit: usize, depth: usize) -> Option<Vec<String>> {
        if depth > 16 {
            return None;
        }
        let alts = self.productions.get(symbol)?;
        let mut out = Vec::new();
        for alt in alts {
            let mut partial = vec![String::new()];
            for piece in &alt.pieces {
                match piece {
                    Piece::Text(t) => partial.iter_mut().for_each(|p| p.push_str(t)),
                    Piece::Symbol(s) => {
                        let sub = self.language_rec(s, limit, depth + 1)?;
                        let mut next = Vec::new();
                        for p in &partial {
                            for x in &sub {
                                next.push(format!("{p}{x}"));
                            }
                        }
                        if next.len() > limit {
                            return None;
                        }
                        partial = next;
                    }
                }
            }
            out.extend(partial.into_iter().map(|s| s.trim().to_string()));
            if out.len() > limit {
                return None;
            }
        }
        Some(out)
    }
}

fn pick<'a, R: Rng + ?Sized>(alts: &'a [Alternative], rng: &mut R) -> &'a Alternative {
    if alts.len() == 1 {
        return &alts[0];
    }
    let total: f64 = alts.iter().map(|a| a.weight).sum();
    let mut x = rng.gen::<f64>() * total;
    for a in alts {
        if x < a.weight {
            return a;
        }
        x -= a.weight;
    }
    alts.last().expect("non-empty")
}

fn slot_names(text: &str) -> Vec<String> {
    text.split('#')
        .skip(1)
        .step_by(2)
        .filter(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_alphabetic() || c == '_'))
        .map(|n| n.to_lowercase())
        .collect()
}

/// Replaces `#name#` markers. A marker whose name starts with an uppercase
/// letter (`#The_obj#`) gets its value capitalized.
pub fn fill(template: &str, slots: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (name, value) in slots {
        out = out.replace(&format!("#{name}#"), value);
        let cap = capitalize(name);
        if cap != *name {
            out = out.replace(&format!("#{cap}#"), &capitalize(value));
        }
    }
    tidy(&out)
}

pub fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Collapses runs of spaces and removes spaces before punctuation.
pub fn tidy(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for line in s.split('\n') {
        if !out.is_empty() {
            out.push('\n');
        }
        let words: Vec<&str> = line.split(' ').filter(|w| !w.is_empty()).collect();
        let mut joined = words.join(" ");
        for p in [" .", " ,", " !", " ?", " :"] {
            joined = joined.replace(p, &p[1..]);
        }
        out.push_str(&joined);
    }
    out
}
