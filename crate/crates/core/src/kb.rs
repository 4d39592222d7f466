//! Domain vocabulary: entity types, predicate signatures, and the built-in
//! rewrite rules every generated game runs on.
//!
//! Rules have a one-line textual form, which is also how game files carry
//! them:
//!
//! ```text
//! take/c(o:o, c:c, r:r) :: $at(P, r) & $at(c, r) & $open(c) & in(o, c) -o in(o, I) ; "take {o} from {c}"
//! ```
//!
//! `$` marks a persistent premise. `P` and `I` are the player and inventory
//! constants; every other identifier must be a declared parameter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::logic::{
    apply_action, enumerate_reachable, split_call, Atom, EntityId, LogicError, Param, Pattern,
    Premise, RuleSchema, State, Term, TypeTag,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Portable,
    FixedInPlace,
    Openable,
    Lockable,
    Edible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityTypeDef {
    pub tag: TypeTag,
    pub attributes: BTreeSet<Attribute>,
    pub parent: Option<TypeTag>,
    /// Words a player may use to refer to any entity of this type
    /// ("red edible thing").
    pub class_words: &'static [&'static str],
}

/// The registered type hierarchy.
pub fn entity_types() -> Vec<EntityTypeDef> {
    use Attribute::*;
    let def =
        |tag: TypeTag, attrs: &[Attribute], class_words: &'static [&'static str]| EntityTypeDef {
            tag,
            attributes: attrs.iter().copied().collect(),
            parent: tag.parent(),
            class_words,
        };
    vec![
        def(TypeTag::Room, &[], &["room", "place"]),
        def(TypeTag::Thing, &[], &["thing"]),
        def(
            TypeTag::Container,
            &[FixedInPlace, Openable, Lockable],
            &["container", "thing"],
        ),
        def(
            TypeTag::Supporter,
            &[FixedInPlace],
            &["supporter", "surface", "thing"],
        ),
        def(
            TypeTag::Door,
            &[FixedInPlace, Openable, Lockable],
            &["door", "exit"],
        ),
        def(
            TypeTag::Object,
            &[Portable],
            &["portable", "object", "item", "thing"],
        ),
        def(
            TypeTag::Food,
            &[Portable, Edible],
            &["edible", "food", "portable", "object", "item", "thing"],
        ),
        def(
            TypeTag::Key,
            &[Portable],
            &["key", "portable", "object", "item", "thing"],
        ),
        def(TypeTag::Player, &[], &[]),
        def(TypeTag::Inventory, &[], &[]),
    ]
}

pub fn type_def(tag: TypeTag) -> EntityTypeDef {
    entity_types()
        .into_iter()
        .find(|d| d.tag == tag)
        .expect("every tag is registered")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: &'static str,
    /// Allowed types per position; an argument conforms when its tag
    /// conforms to any listed type.
    pub param_types: Vec<Vec<TypeTag>>,
}

impl Predicate {
    pub fn arity(&self) -> usize {
        self.param_types.len()
    }

    pub fn accepts(&self, pos: usize, tag: TypeTag) -> bool {
        self.param_types
            .get(pos)
            .is_some_and(|allowed| allowed.iter().any(|&t| tag.conforms_to(t)))
    }
}

pub const DIRECTION_PREDICATES: [&str; 4] = ["north_of", "south_of", "east_of", "west_of"];

pub fn predicates() -> &'static [Predicate] {
    static PREDICATES: OnceLock<Vec<Predicate>> = OnceLock::new();
    PREDICATES.get_or_init(|| {
        use TypeTag::*;
        let p = |name, types: Vec<Vec<TypeTag>>| Predicate {
            name,
            param_types: types,
        };
        let mut v = vec![
            p("at", vec![vec![Thing], vec![Room]]),
            p("in", vec![vec![Object], vec![Container, Inventory]]),
            p("on", vec![vec![Object], vec![Supporter]]),
            p("open", vec![vec![Container, Door]]),
            p("closed", vec![vec![Container, Door]]),
            p("locked", vec![vec![Container, Door]]),
            p("eaten", vec![vec![Food]]),
            p("match", vec![vec![Key], vec![Container, Door]]),
            p("free", vec![vec![Room], vec![Room]]),
            p("link", vec![vec![Room], vec![Door], vec![Room]]),
        ];
        for d in DIRECTION_PREDICATES {
            v.push(p(d, vec![vec![Room], vec![Room]]));
        }
        v
    })
}

pub fn predicate(name: &str) -> Option<&'static Predicate> {
    predicates().iter().find(|p| p.name == name)
}

/// Checks an atom against the predicate signatures.
pub fn atom_well_typed(atom: &Atom) -> bool {
    let Some(p) = predicate(atom.predicate()) else {
        return false;
    };
    p.arity() == atom.args().len()
        && atom
            .args()
            .iter()
            .enumerate()
            .all(|(i, a)| p.accepts(i, a.tag()))
}

/// A named rule collection plus its reciprocal pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<RuleSchema>,
    reciprocals: BTreeMap<String, String>,
}

impl RuleSet {
    pub fn new(rules: Vec<RuleSchema>) -> Self {
        RuleSet {
            rules,
            reciprocals: BTreeMap::new(),
        }
    }

    /// Pairs `a` with `b`, dropping any previous partner of either.
    pub fn with_reciprocal(mut self, a: &str, b: &str) -> Self {
        for name in [a, b] {
            if let Some(old) = self.reciprocals.remove(name) {
                if self.reciprocals.get(&old).map(String::as_str) == Some(name) {
                    self.reciprocals.remove(&old);
                }
            }
        }
        self.reciprocals.insert(a.to_string(), b.to_string());
        self.reciprocals.insert(b.to_string(), a.to_string());
        self
    }

    /// Declares a one-way reciprocal entry (used to build deliberately
    /// inconsistent sets in tests and when loading files).
    pub fn with_reciprocal_entry(mut self, from: &str, to: &str) -> Self {
        self.reciprocals.insert(from.to_string(), to.to_string());
        self
    }

    pub fn rules(&self) -> &[RuleSchema] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&RuleSchema> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn reciprocal(&self, name: &str) -> Option<&str> {
        self.reciprocals.get(name).map(String::as_str)
    }

    pub fn reciprocals(&self) -> &BTreeMap<String, String> {
        &self.reciprocals
    }

    /// A new set holding only the named rules (and reciprocal pairs whose
    /// both ends survive).
    pub fn subset(&self, names: &[&str]) -> RuleSet {
        let rules: Vec<RuleSchema> = self
            .rules
            .iter()
            .filter(|r| names.contains(&r.name.as_str()))
            .cloned()
            .collect();
        let keep: BTreeSet<&str> = rules.iter().map(|r| r.name.as_str()).collect();
        let reciprocals = self
            .reciprocals
            .iter()
            .filter(|(a, b)| keep.contains(a.as_str()) && keep.contains(b.as_str()))
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        RuleSet { rules, reciprocals }
    }

    /// Textual listing, one rule per line.
    pub fn to_lines(&self) -> Vec<String> {
        self.rules.iter().map(encode_rule).collect()
    }

    /// Reciprocal pairs, each listed once with the smaller name first.
    pub fn reciprocal_pairs(&self) -> Vec<(String, String)> {
        let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
        for (a, b) in &self.reciprocals {
            if self.reciprocals.get(b) == Some(a) {
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                pairs.insert((x.clone(), y.clone()));
            } else {
                pairs.insert((a.clone(), b.clone()));
            }
        }
        pairs.into_iter().collect()
    }

    pub fn from_lines(
        lines: &[String],
        reciprocal_pairs: &[(String, String)],
    ) -> Result<RuleSet, LogicError> {
        let rules = lines
            .iter()
            .map(|l| parse_rule(l))
            .collect::<Result<Vec<_>, _>>()?;
        let mut rs = RuleSet::new(rules);
        for (a, b) in reciprocal_pairs {
            rs = rs.with_reciprocal(a, b);
        }
        Ok(rs)
    }
}

fn constant(name: &str) -> Option<EntityId> {
    match name {
        "P" => Some(EntityId::player()),
        "I" => Some(EntityId::inventory()),
        _ => None,
    }
}

fn parse_pattern(text: &str, params: &[Param]) -> Result<Pattern, LogicError> {
    let (pred, args) = split_call(text)?;
    let args = args
        .into_iter()
        .map(|a| {
            if let Some(i) = params.iter().position(|p| p.name == a) {
                Ok(Term::Var(i))
            } else if let Some(c) = constant(a) {
                Ok(Term::Const(c))
            } else {
                Err(LogicError::Syntax(format!(
                    "undeclared variable `{a}` in `{text}`"
                )))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Pattern::new(pred, args))
}

/// Parses one rule line.
pub fn parse_rule(line: &str) -> Result<RuleSchema, LogicError> {
    let syntax = |m: &str| LogicError::Syntax(format!("{m} in rule `{line}`"));
    let (head, rest) = line
        .split_once("::")
        .ok_or_else(|| syntax("missing `::`"))?;
    let (body, command) = match rest.rsplit_once(';') {
        Some((b, c)) => {
            let c = c.trim();
            let c = c
                .strip_prefix('"')
                .and_then(|c| c.strip_suffix('"'))
                .ok_or_else(|| syntax("command template must be quoted"))?;
            (b, c.to_string())
        }
        None => return Err(syntax("missing `; \"command\"`")),
    };
    let (name, raw_params) = split_call(head)?;
    let params = raw_params
        .into_iter()
        .map(|p| {
            let (n, t) = p
                .split_once(':')
                .ok_or_else(|| syntax("parameter without type"))?;
            Ok(Param {
                name: n.trim().to_string(),
                tag: t.trim().parse()?,
            })
        })
        .collect::<Result<Vec<_>, LogicError>>()?;
    let (lhs_text, rhs_text) = body
        .split_once("-o")
        .ok_or_else(|| syntax("missing `-o`"))?;
    let mut lhs = Vec::new();
    for part in lhs_text.split('&').map(str::trim).filter(|s| !s.is_empty()) {
        let (persistent, pat) = match part.strip_prefix('$') {
            Some(p) => (true, p),
            None => (false, part),
        };
        lhs.push(Premise {
            pattern: parse_pattern(pat, &params)?,
            persistent,
        });
    }
    let rhs = rhs_text
        .split('&')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| parse_pattern(p, &params))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RuleSchema {
        name: name.to_string(),
        params,
        lhs,
        rhs,
        command,
    })
}

fn encode_pattern(p: &Pattern, params: &[Param]) -> String {
    let args: Vec<String> = p
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => params
                .get(*v)
                .map(|p| p.name.clone())
                .unwrap_or_else(|| format!("?{v}")),
            Term::Const(e) => e.id().to_string(),
        })
        .collect();
    format!("{}({})", p.predicate, args.join(", "))
}

/// Inverse of [`parse_rule`].
pub fn encode_rule(rule: &RuleSchema) -> String {
    let params: Vec<String> = rule
        .params
        .iter()
        .map(|p| format!("{}:{}", p.name, p.tag))
        .collect();
    let lhs: Vec<String> = rule
        .lhs
        .iter()
        .map(|p| {
            let s = encode_pattern(&p.pattern, &rule.params);
            if p.persistent {
                format!("${s}")
            } else {
                s
            }
        })
        .collect();
    let rhs: Vec<String> = rule
        .rhs
        .iter()
        .map(|p| encode_pattern(p, &rule.params))
        .collect();
    format!(
        "{}({}) :: {} -o {} ; \"{}\"",
        rule.name,
        params.join(", "),
        lhs.join(" & "),
        rhs.join(" & "),
        rule.command
    )
}

const CORE_RULES: &str = r#"
open/c(c:c, r:r) :: $at(P, r) & $at(c, r) & closed(c) -o open(c) ; "open {c}"
close/c(c:c, r:r) :: $at(P, r) & $at(c, r) & open(c) -o closed(c) ; "close {c}"
take/c(o:o, c:c, r:r) :: $at(P, r) & $at(c, r) & $open(c) & in(o, c) -o in(o, I) ; "take {o} from {c}"
take/s(o:o, s:s, r:r) :: $at(P, r) & $at(s, r) & on(o, s) -o in(o, I) ; "take {o} from {s}"
insert/c(o:o, c:c, r:r) :: $at(P, r) & $at(c, r) & $open(c) & in(o, I) -o in(o, c) ; "insert {o} into {c}"
put/s(o:o, s:s, r:r) :: $at(P, r) & $at(s, r) & in(o, I) -o on(o, s) ; "put {o} on {s}"
eat(f:f) :: in(f, I) -o eaten(f) ; "eat {f}"
"#;

const EXTENSION_RULES: &str = r#"
take/r(o:o, r:r) :: $at(P, r) & at(o, r) -o in(o, I) ; "take {o}"
drop/r(o:o, r:r) :: $at(P, r) & in(o, I) -o at(o, r) ; "drop {o}"
open/d(d:d, r:r, r2:r) :: $at(P, r) & $link(r, d, r2) & closed(d) -o open(d) & free(r, r2) & free(r2, r) ; "open {d}"
close/d(d:d, r:r, r2:r) :: $at(P, r) & $link(r, d, r2) & open(d) & free(r, r2) & free(r2, r) -o closed(d) ; "close {d}"
unlock/d(d:d, k:k, r:r, r2:r) :: $at(P, r) & $link(r, d, r2) & $in(k, I) & $match(k, d) & locked(d) -o closed(d) ; "unlock {d} with {k}"
lock/d(d:d, k:k, r:r, r2:r) :: $at(P, r) & $link(r, d, r2) & $in(k, I) & $match(k, d) & closed(d) -o locked(d) ; "lock {d} with {k}"
unlock/c(c:c, k:k, r:r) :: $at(P, r) & $at(c, r) & $in(k, I) & $match(k, c) & locked(c) -o closed(c) ; "unlock {c} with {k}"
lock/c(c:c, k:k, r:r) :: $at(P, r) & $at(c, r) & $in(k, I) & $match(k, c) & closed(c) -o locked(c) ; "lock {c} with {k}"
go/north(r:r, r2:r) :: $north_of(r2, r) & $free(r, r2) & at(P, r) -o at(P, r2) ; "go north"
go/south(r:r, r2:r) :: $south_of(r2, r) & $free(r, r2) & at(P, r) -o at(P, r2) ; "go south"
go/east(r:r, r2:r) :: $east_of(r2, r) & $free(r, r2) & at(P, r) -o at(P, r2) ; "go east"
go/west(r:r, r2:r) :: $west_of(r2, r) & $free(r, r2) & at(P, r) -o at(P, r2) ; "go west"
"#;

const CORE_RECIPROCALS: [(&str, &str); 3] = [
    ("open/c", "close/c"),
    ("take/c", "insert/c"),
    ("take/s", "put/s"),
];

const EXTENSION_RECIPROCALS: [(&str, &str); 6] = [
    ("take/r", "drop/r"),
    ("open/d", "close/d"),
    ("lock/d", "unlock/d"),
    ("lock/c", "unlock/c"),
    ("go/north", "go/south"),
    ("go/east", "go/west"),
];

fn parse_listing(text: &str) -> Vec<RuleSchema> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| parse_rule(l).unwrap_or_else(|e| panic!("built-in rule does not parse: {e}")))
        .collect()
}

/// The seven rules of the single-room kitchen example: open/close a
/// container, take from a container or supporter, insert, put, eat.
pub fn core_rules() -> RuleSet {
    let mut rs = RuleSet::new(parse_listing(CORE_RULES));
    for (a, b) in CORE_RECIPROCALS {
        rs = rs.with_reciprocal(a, b);
    }
    rs
}

/// Core rules plus floor take/drop, doors, locks and navigation.
pub fn builtin_rules() -> RuleSet {
    let mut rules = parse_listing(CORE_RULES);
    rules.extend(parse_listing(EXTENSION_RULES));
    let mut rs = RuleSet::new(rules);
    for (a, b) in CORE_RECIPROCALS.into_iter().chain(EXTENSION_RECIPROCALS) {
        rs = rs.with_reciprocal(a, b);
    }
    rs
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub rule: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

fn diag(rule: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        rule: rule.to_string(),
        message: message.into(),
    }
}

/// A small world exercising every built-in predicate: two rooms joined by
/// a closed door, a third through an open passage, a locked chest, a
/// supporter, food, a loose object and a key that fits both locks.
pub fn probe_state() -> State {
    let r = |id: &str| EntityId::new(id, TypeTag::Room);
    let (a, b, c) = (r("probe_a"), r("probe_b"), r("probe_c"));
    let door = EntityId::new("probe_door", TypeTag::Door);
    let chest = EntityId::new("probe_chest", TypeTag::Container);
    let shelf = EntityId::new("probe_shelf", TypeTag::Supporter);
    let food = EntityId::new("probe_food", TypeTag::Food);
    let thing = EntityId::new("probe_thing", TypeTag::Object);
    let key = EntityId::new("probe_key", TypeTag::Key);
    let p = EntityId::player();
    let inv = EntityId::inventory();
    let at = |x: &EntityId, y: &EntityId| Atom::new("at", vec![x.clone(), y.clone()]);
    State::from_atoms([
        at(&p, &a),
        Atom::new("north_of", vec![b.clone(), a.clone()]),
        Atom::new("south_of", vec![a.clone(), b.clone()]),
        Atom::new("link", vec![a.clone(), door.clone(), b.clone()]),
        Atom::new("link", vec![b.clone(), door.clone(), a.clone()]),
        Atom::new("closed", vec![door.clone()]),
        Atom::new("east_of", vec![c.clone(), a.clone()]),
        Atom::new("west_of", vec![a.clone(), c.clone()]),
        Atom::new("free", vec![a.clone(), c.clone()]),
        Atom::new("free", vec![c.clone(), a.clone()]),
        at(&chest, &a),
        Atom::new("locked", vec![chest.clone()]),
        Atom::new("in", vec![thing.clone(), chest.clone()]),
        at(&shelf, &a),
        Atom::new("on", vec![food.clone(), shelf.clone()]),
        Atom::new("in", vec![key.clone(), inv.clone()]),
        Atom::new("match", vec![key.clone(), chest.clone()]),
        Atom::new("match", vec![key, door]),
    ])
}

const PROBE_STATE_LIMIT: usize = 1500;

/// Empty iff every rule is well-typed and fully bound by its left-hand
/// side, names are unique, and every reciprocal pair is mutually inverse on
/// the probe world.
pub fn validate(rs: &RuleSet) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for rule in rs.rules() {
        if !seen.insert(rule.name.as_str()) {
            out.push(diag(&rule.name, "duplicate rule name"));
        }
        validate_rule(rule, &mut out);
    }
    for (a, b) in rs.reciprocals() {
        if rs.rule(a).is_none() {
            out.push(diag(
                a,
                format!("reciprocal declared for unknown rule `{a}`"),
            ));
        }
        if rs.rule(b).is_none() {
            out.push(diag(a, format!("reciprocal `{b}` is not a rule")));
        }
        if rs.reciprocal(b) != Some(a.as_str()) {
            out.push(diag(
                a,
                format!("reciprocal map is not symmetric for `{a}` / `{b}`"),
            ));
        }
    }
    if !out.is_empty() {
        return out;
    }
    let graph = enumerate_reachable(&probe_state(), rs.rules(), PROBE_STATE_LIMIT);
    if graph.states.iter().any(|s| s.max_multiplicity() > 1) {
        out.push(diag(
            "*",
            "rules produce duplicate atoms on the probe world",
        ));
    }
    for (a, b) in rs.reciprocal_pairs() {
        for (i, act, j) in &graph.edges {
            let name = act.rule_name();
            let inverse = if name == a {
                b.as_str()
            } else if name == b {
                a.as_str()
            } else {
                continue;
            };
            let (from, to) = (&graph.states[*i], &graph.states[*j]);
            let restored = crate::logic::admissible_actions(to, rs.rules())
                .into_iter()
                .filter(|x| x.rule_name() == inverse)
                .any(|x| apply_action(to, &x).ok().as_ref() == Some(from));
            if !restored {
                out.push(diag(
                    name,
                    format!("`{inverse}` does not undo `{name}` on a probe state"),
                ));
                break;
            }
        }
    }
    out.sort_by(|x, y| (&x.rule, &x.message).cmp(&(&y.rule, &y.message)));
    out.dedup();
    out
}

fn validate_rule(rule: &RuleSchema, out: &mut Vec<Diagnostic>) {
    let check = |p: &Pattern, out: &mut Vec<Diagnostic>| {
        let Some(sig) = predicate(&p.predicate) else {
            out.push(diag(
                &rule.name,
                format!("unknown predicate `{}`", p.predicate),
            ));
            return;
        };
        if sig.arity() != p.args.len() {
            out.push(diag(
                &rule.name,
                format!("`{}` takes {} arguments", p.predicate, sig.arity()),
            ));
            return;
        }
        for (i, t) in p.args.iter().enumerate() {
            let tag = match t {
                Term::Var(v) => match rule.params.get(*v) {
                    Some(param) => param.tag,
                    None => {
                        out.push(diag(
                            &rule.name,
                            format!("variable #{v} is not a parameter"),
                        ));
                        continue;
                    }
                },
                Term::Const(e) => e.tag(),
            };
            if !sig.accepts(i, tag) {
                out.push(diag(
                    &rule.name,
                    format!(
                        "argument {} of `{}` cannot be of type {tag}",
                        i + 1,
                        p.predicate
                    ),
                ));
            }
        }
    };
    for prem in &rule.lhs {
        check(&prem.pattern, out);
    }
    for p in &rule.rhs {
        check(p, out);
    }
    let bound: BTreeSet<usize> = rule.lhs.iter().flat_map(|p| p.pattern.vars()).collect();
    for p in &rule.rhs {
        for v in p.vars() {
            if !bound.contains(&v) {
                let name = rule.params.get(v).map_or("?", |p| p.name.as_str());
                out.push(diag(
                    &rule.name,
                    format!("variable `{name}` in rhs is not bound by the lhs"),
                ));
            }
        }
    }
    for (i, p) in rule.params.iter().enumerate() {
        let in_rhs = rule.rhs.iter().any(|r| r.vars().any(|v| v == i));
        if !bound.contains(&i) && !in_rhs {
            out.push(diag(
                &rule.name,
                format!("parameter `{}` is never used", p.name),
            ));
        }
    }
    let mut rest = rule.command.as_str();
    while let Some(open) = rest.find('{') {
        let Some(close) = rest[open..].find('}') else {
            out.push(diag(&rule.name, "unterminated placeholder in command"));
            break;
        };
        let name = &rest[open + 1..open + close];
        if rule.param_index(name).is_none() {
            out.push(diag(
                &rule.name,
                format!("command placeholder `{name}` is not a parameter"),
            ));
        }
        rest = &rest[open + close + 1..];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{admissible_actions, ground_rule};

    #[test]
    fn builtin_rules_validate() {
        assert_eq!(validate(&builtin_rules()), vec![]);
        assert_eq!(validate(&core_rules()), vec![]);
    }

    #[test]
    fn open_container_shape() {
        let rs = builtin_rules();
        let open = rs.rule("open/c").unwrap();
        let lhs: Vec<(String, bool)> = open
            .lhs
            .iter()
            .map(|p| (encode_pattern(&p.pattern, &open.params), p.persistent))
            .collect();
        assert_eq!(
            lhs,
            vec![
                ("at(P, r)".to_string(), true),
                ("at(c, r)".to_string(), true),
                ("closed(c)".to_string(), false),
            ]
        );
        let rhs: Vec<String> = open
            .rhs
            .iter()
            .map(|p| encode_pattern(p, &open.params))
            .collect();
        assert_eq!(rhs, vec!["open(c)"]);
    }

    #[test]
    fn reciprocal_of_open_is_close() {
        let rs = builtin_rules();
        assert_eq!(rs.reciprocal("open/c"), Some("close/c"));
        assert_eq!(rs.reciprocal("close/c"), Some("open/c"));
        assert_eq!(rs.reciprocal("go/east"), Some("go/west"));
        assert_eq!(rs.reciprocal("eat"), None);
    }

    #[test]
    fn core_rules_round_trip_through_text() {
        for rule in core_rules().rules() {
            let text = encode_rule(rule);
            let back = parse_rule(&text).unwrap();
            assert_eq!(&back, rule);
            assert_eq!(encode_rule(&back), text);
        }
    }

    #[test]
    fn unlock_chest_needs_matching_key() {
        let rs = builtin_rules();
        let unlock = rs.rule("unlock/c").unwrap();
        let room = EntityId::new("vault", TypeTag::Room);
        let chest = EntityId::new("chest", TypeTag::Container);
        let key = EntityId::new("key", TypeTag::Key);
        let base = vec![
            Atom::new("at", vec![EntityId::player(), room.clone()]),
            Atom::new("at", vec![chest.clone(), room]),
            Atom::new("locked", vec![chest.clone()]),
            Atom::new("in", vec![key.clone(), EntityId::inventory()]),
        ];
        let without = State::from_atoms(base.clone());
        assert!(ground_rule(unlock, &without).is_empty());
        let mut with = base;
        with.push(Atom::new("match", vec![key, chest]));
        let with = State::from_atoms(with);
        assert_eq!(ground_rule(unlock, &with).len(), 1);
        // brute force: every binding of the right types, checked directly
        let ents: Vec<EntityId> = with.entities().into_iter().collect();
        let mut brute = 0;
        for c in &ents {
            for k in &ents {
                for r in &ents {
                    if let Ok(a) = unlock.instantiate(&[c.clone(), k.clone(), r.clone()]) {
                        if c.tag() == TypeTag::Container
                            && k.tag() == TypeTag::Key
                            && r.tag() == TypeTag::Room
                            && a.is_applicable(&with)
                        {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(brute, 1);
    }

    #[test]
    fn unbound_rhs_variable_is_reported() {
        let rule =
            parse_rule("spawn(f:f, c:c) :: open(c) -o open(c) & in(f, c) ; \"spawn {c}\"").unwrap();
        let diags = validate(&RuleSet::new(vec![rule]));
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert!(diags[0].rule == "spawn" && diags[0].message.contains("`f`"));
    }

    #[test]
    fn non_inverse_reciprocal_is_reported() {
        let rs = builtin_rules()
            .with_reciprocal_entry("open/c", "eat")
            .with_reciprocal_entry("eat", "open/c")
            .with_reciprocal_entry("close/c", "eat");
        let diags = validate(&rs);
        assert!(!diags.is_empty());
        let rs = builtin_rules().subset(&[
            "open/c", "close/c", "take/c", "insert/c", "take/s", "put/s", "eat",
        ]);
        assert!(validate(&rs).is_empty());
        let broken = rs.with_reciprocal("take/s", "insert/c");
        let diags = validate(&broken);
        assert!(
            diags.iter().any(|d| d.message.contains("does not undo")),
            "{diags:?}"
        );
    }

    #[test]
    fn undeclared_identifier_is_a_syntax_error() {
        assert!(parse_rule("bad(c:c) :: open(x) -o closed(c) ; \"bad\"").is_err());
        assert!(parse_rule("bad(c:c) :: open(c) closed(c) ; \"bad\"").is_err());
        assert!(parse_rule("bad(c:z) :: open(c) -o closed(c) ; \"bad\"").is_err());
    }

    #[test]
    fn navigation_keeps_one_player_location() {
        let rs = builtin_rules();
        let g = enumerate_reachable(&probe_state(), rs.rules(), 400);
        for s in &g.states {
            let n = s
                .with_predicate("at")
                .filter(|a| a.arg(0) == &EntityId::player())
                .count();
            assert_eq!(n, 1);
        }
    }

    #[test]
    fn reciprocal_pairs_restore_state_on_probe_world() {
        let rs = builtin_rules();
        let g = enumerate_reachable(&probe_state(), rs.rules(), 300);
        let mut checked = 0;
        for (i, act, j) in &g.edges {
            let Some(inv) = rs.reciprocal(act.rule_name()) else {
                continue;
            };
            let back = admissible_actions(&g.states[*j], rs.rules())
                .into_iter()
                .filter(|x| x.rule_name() == inv)
                .any(|x| apply_action(&g.states[*j], &x).unwrap() == g.states[*i]);
            assert!(back, "{act} not undone");
            checked += 1;
        }
        assert!(checked > 50);
    }

    #[test]
    fn every_probe_atom_is_well_typed() {
        assert!(probe_state().iter().all(atom_well_typed));
    }
}
