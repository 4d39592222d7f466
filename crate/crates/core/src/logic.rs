//! Linear-logic state representation and the game's transition function.
//!
//! A [`State`] is a multiset of ground [`Atom`]s. A [`RuleSchema`] rewrites a
//! state by consuming its non-persistent left-hand side and producing its
//! right-hand side; persistent (`$`) premises must be present but are left
//! in place. Grounding a rule against a state yields the [`GroundAction`]s
//! available there.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::Bound;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Entity type tags of the built-in type hierarchy.
///
/// `Thing` is abstract: it is the parent of everything that can stand in a
/// room. `Food` and `Key` are portable `Object`s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeTag {
    #[serde(rename = "r")]
    Room,
    #[serde(rename = "t")]
    Thing,
    #[serde(rename = "c")]
    Container,
    #[serde(rename = "s")]
    Supporter,
    #[serde(rename = "d")]
    Door,
    #[serde(rename = "o")]
    Object,
    #[serde(rename = "f")]
    Food,
    #[serde(rename = "k")]
    Key,
    #[serde(rename = "P")]
    Player,
    #[serde(rename = "I")]
    Inventory,
}

impl TypeTag {
    pub const ALL: [TypeTag; 10] = [
        TypeTag::Room,
        TypeTag::Thing,
        TypeTag::Container,
        TypeTag::Supporter,
        TypeTag::Door,
        TypeTag::Object,
        TypeTag::Food,
        TypeTag::Key,
        TypeTag::Player,
        TypeTag::Inventory,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            TypeTag::Room => "r",
            TypeTag::Thing => "t",
            TypeTag::Container => "c",
            TypeTag::Supporter => "s",
            TypeTag::Door => "d",
            TypeTag::Object => "o",
            TypeTag::Food => "f",
            TypeTag::Key => "k",
            TypeTag::Player => "P",
            TypeTag::Inventory => "I",
        }
    }

    pub fn parent(self) -> Option<TypeTag> {
        match self {
            TypeTag::Container | TypeTag::Supporter | TypeTag::Door | TypeTag::Object => {
                Some(TypeTag::Thing)
            }
            TypeTag::Player => Some(TypeTag::Thing),
            TypeTag::Food | TypeTag::Key => Some(TypeTag::Object),
            TypeTag::Room | TypeTag::Thing | TypeTag::Inventory => None,
        }
    }

    /// True when `self` is `ancestor` or one of its descendants.
    pub fn conforms_to(self, ancestor: TypeTag) -> bool {
        let mut cur = Some(self);
        while let Some(t) = cur {
            if t == ancestor {
                return true;
            }
            cur = t.parent();
        }
        false
    }

    /// Portable things: objects and their subtypes.
    pub fn is_portable(self) -> bool {
        self.conforms_to(TypeTag::Object)
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for TypeTag {
    type Err = LogicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TypeTag::ALL
            .into_iter()
            .find(|t| t.symbol() == s)
            .ok_or_else(|| LogicError::Syntax(format!("unknown type tag `{s}`")))
    }
}

/// A typed entity. Identity is the id string; the tag travels with it so that
/// grounding can type-check bindings without a side table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId {
    id: Arc<str>,
    tag: TypeTag,
}

impl EntityId {
    pub fn new(id: impl AsRef<str>, tag: TypeTag) -> Self {
        EntityId {
            id: Arc::from(id.as_ref()),
            tag,
        }
    }

    pub fn player() -> Self {
        EntityId::new("P", TypeTag::Player)
    }

    pub fn inventory() -> Self {
        EntityId::new("I", TypeTag::Inventory)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tag(&self) -> TypeTag {
        self.tag
    }
}

impl fmt::Debug for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.id, self.tag)
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// `id:tag`, the same form `Debug` prints.
impl FromStr for EntityId {
    type Err = LogicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (id, tag) = s
            .rsplit_once(':')
            .ok_or_else(|| LogicError::Syntax(format!("expected `id:tag`, got `{s}`")))?;
        if id.is_empty() {
            return Err(LogicError::Syntax(format!("empty entity id in `{s}`")));
        }
        Ok(EntityId::new(id, tag.parse()?))
    }
}

impl Serialize for EntityId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&format_args!("{}:{}", self.id, self.tag))
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("action `{action}` is not applicable: missing {missing}")]
    NotApplicable { action: String, missing: String },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule `{rule}` expects {expected} arguments, got {got}")]
    Arity {
        rule: String,
        expected: usize,
        got: usize,
    },
}

/// A ground logical fact such as `in(apple,fridge)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    predicate: Arc<str>,
    args: Vec<EntityId>,
}

impl Atom {
    pub fn new(predicate: impl AsRef<str>, args: Vec<EntityId>) -> Self {
        Atom {
            predicate: Arc::from(predicate.as_ref()),
            args,
        }
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn args(&self) -> &[EntityId] {
        &self.args
    }

    pub fn arg(&self, i: usize) -> &EntityId {
        &self.args[i]
    }

    pub fn mentions(&self, e: &EntityId) -> bool {
        self.args.iter().any(|a| a == e)
    }

    /// Parses `pred(a,b)` resolving argument ids through `lookup`.
    pub fn parse_with(
        text: &str,
        lookup: &dyn Fn(&str) -> Option<EntityId>,
    ) -> Result<Atom, LogicError> {
        let (pred, args) = split_call(text)?;
        let args = args
            .iter()
            .map(|a| lookup(a).ok_or_else(|| LogicError::UnknownEntity(a.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Atom::new(pred, args))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Splits `name(a, b)` into `("name", ["a", "b"])`.
pub(crate) fn split_call(text: &str) -> Result<(&str, Vec<&str>), LogicError> {
    let text = text.trim();
    let open = text
        .find('(')
        .ok_or_else(|| LogicError::Syntax(format!("expected `(` in `{text}`")))?;
    if !text.ends_with(')') {
        return Err(LogicError::Syntax(format!(
            "expected `)` at end of `{text}`"
        )));
    }
    let name = text[..open].trim();
    if name.is_empty() {
        return Err(LogicError::Syntax(format!("missing name in `{text}`")));
    }
    let inner = text[open + 1..text.len() - 1].trim();
    let args = if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    if args.iter().any(|a| a.is_empty()) {
        return Err(LogicError::Syntax(format!("empty argument in `{text}`")));
    }
    Ok((name, args))
}

/// A multiset of atoms. The map is ordered by (predicate, args), which is the
/// canonical form used for equality, hashing and serialization.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    atoms: BTreeMap<Atom, u32>,
}

impl State {
    pub fn new() -> Self {
        State::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut s = State::new();
        for a in atoms {
            s.insert(a);
        }
        s
    }

    pub fn insert(&mut self, atom: Atom) {
        *self.atoms.entry(atom).or_insert(0) += 1;
    }

    /// Removes one copy; returns false when the atom was absent.
    pub fn remove(&mut self, atom: &Atom) -> bool {
        match self.atoms.get_mut(atom) {
            Some(n) if *n > 1 => {
                *n -= 1;
                true
            }
            Some(_) => {
                self.atoms.remove(atom);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains_key(atom)
    }

    pub fn count(&self, atom: &Atom) -> u32 {
        self.atoms.get(atom).copied().unwrap_or(0)
    }

    pub fn contains_all<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
        let mut need: BTreeMap<&Atom, u32> = BTreeMap::new();
        for a in atoms {
            *need.entry(a).or_insert(0) += 1;
        }
        need.into_iter().all(|(a, n)| self.count(a) >= n)
    }

    /// Number of atoms counting multiplicity.
    pub fn len(&self) -> usize {
        self.atoms.values().map(|&n| n as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.atoms.values().copied().max().unwrap_or(0)
    }

    /// Distinct atoms in canonical order.
    pub fn distinct(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.keys()
    }

    /// Atoms in canonical order, repeated by multiplicity.
    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms
            .iter()
            .flat_map(|(a, &n)| std::iter::repeat_n(a, n as usize))
    }

    /// Distinct atoms of one predicate.
    pub fn with_predicate<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a Atom> + 'a {
        let start = Atom::new(predicate, Vec::new());
        self.atoms
            .range((Bound::Included(start), Bound::Unbounded))
            .map(|(a, _)| a)
            .take_while(move |a| &*a.predicate == predicate)
    }

    pub fn entities(&self) -> BTreeSet<EntityId> {
        self.atoms
            .keys()
            .flat_map(|a| a.args.iter().cloned())
            .collect()
    }

    /// Canonical encoding: sorted atoms, one per line.
    pub fn canonical(&self) -> String {
        self.iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Atom> for State {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        State::from_atoms(iter)
    }
}

/// A rule argument: a parameter slot or a fixed entity (`P`, `I`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Const(EntityId),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub predicate: Arc<str>,
    pub args: Vec<Term>,
}

impl Pattern {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Pattern {
            predicate: Arc::from(predicate),
            args,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        })
    }

    /// Instantiates the pattern; `None` when a variable is unbound.
    pub fn ground(&self, binding: &[Option<EntityId>]) -> Option<Atom> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => binding.get(*v).cloned().flatten(),
                Term::Const(e) => Some(e.clone()),
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Atom {
            predicate: self.predicate.clone(),
            args,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub tag: TypeTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Premise {
    pub pattern: Pattern,
    pub persistent: bool,
}

/// A parameterized rewrite rule `lhs -o rhs`.
///
/// `command` is the surface template used to render a grounded instance,
/// with `{param}` placeholders (`"take {o} from {c}"`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleSchema {
    pub name: String,
    pub params: Vec<Param>,
    pub lhs: Vec<Premise>,
    pub rhs: Vec<Pattern>,
    pub command: String,
}

impl RuleSchema {
    /// The command verb: the rule name up to the first `/`.
    pub fn verb(&self) -> &str {
        self.name.split('/').next().unwrap_or(&self.name)
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    /// Parameter indices referenced by the command template, in order.
    pub fn command_params(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut rest = self.command.as_str();
        while let Some(open) = rest.find('{') {
            let Some(close) = rest[open..].find('}') else {
                break;
            };
            if let Some(i) = self.param_index(&rest[open + 1..open + close]) {
                out.push(i);
            }
            rest = &rest[open + close + 1..];
        }
        out
    }

    /// Words of the command template that follow the first placeholder and
    /// precede the second one (`from` in `take {o} from {c}`).
    pub fn command_marker(&self) -> Option<&str> {
        let first = self.command.find('}')?;
        let rest = &self.command[first + 1..];
        let second = rest.find('{')?;
        let marker = rest[..second].trim();
        (!marker.is_empty()).then_some(marker)
    }

    /// Builds the ground action for a complete binding, without checking
    /// applicability.
    pub fn instantiate(&self, binding: &[EntityId]) -> Result<GroundAction, LogicError> {
        if binding.len() != self.params.len() {
            return Err(LogicError::Arity {
                rule: self.name.clone(),
                expected: self.params.len(),
                got: binding.len(),
            });
        }
        let opt: Vec<Option<EntityId>> = binding.iter().cloned().map(Some).collect();
        let ground = |p: &Pattern| p.ground(&opt).expect("complete binding");
        let mut consumed = Vec::new();
        let mut required = Vec::new();
        for prem in &self.lhs {
            if prem.persistent {
                required.push(ground(&prem.pattern));
            } else {
                consumed.push(ground(&prem.pattern));
            }
        }
        let produced = self.rhs.iter().map(ground).collect();
        Ok(GroundAction {
            rule: Arc::from(self.name.as_str()),
            binding: binding.to_vec(),
            consumed,
            required,
            produced,
        })
    }
}

/// A fully grounded rule instance.
///
/// Identity is `(rule, binding)`; the atom lists are derived from them.
#[derive(Clone)]
pub struct GroundAction {
    pub rule: Arc<str>,
    pub binding: Vec<EntityId>,
    pub consumed: Vec<Atom>,
    pub required: Vec<Atom>,
    pub produced: Vec<Atom>,
}

impl GroundAction {
    pub fn rule_name(&self) -> &str {
        &self.rule
    }

    pub fn verb(&self) -> &str {
        self.rule.split('/').next().unwrap_or(&self.rule)
    }

    /// True when every consumed and required atom is present in `state`.
    pub fn is_applicable(&self, state: &State) -> bool {
        state.contains_all(self.consumed.iter().chain(self.required.iter()))
    }

    pub fn mentions(&self, e: &EntityId) -> bool {
        self.binding.iter().any(|b| b == e)
    }

    /// Short form: verb and the arguments named by the command
    /// template, e.g. `take(apple, fridge)`.
    pub fn short(&self, rule: &RuleSchema) -> String {
        let args: Vec<String> = rule
            .command_params()
            .into_iter()
            .map(|i| self.binding[i].to_string())
            .collect();
        if args.is_empty() {
            self.rule.to_string()
        } else {
            format!("{}({})", self.verb(), args.join(", "))
        }
    }
}

impl PartialEq for GroundAction {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule && self.binding == other.binding
    }
}

impl Eq for GroundAction {}

impl std::hash::Hash for GroundAction {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rule.hash(state);
        self.binding.hash(state);
    }
}

impl PartialOrd for GroundAction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroundAction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.rule, &self.binding).cmp(&(&other.rule, &other.binding))
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.rule)?;
        for (i, a) in self.binding.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Tries to extend `binding` so that `pattern` matches `atom`. Returns the
/// indices it bound, or `None` on mismatch (with `binding` restored).
pub(crate) fn unify(
    pattern: &Pattern,
    atom: &Atom,
    params: &[Param],
    binding: &mut [Option<EntityId>],
) -> Option<Vec<usize>> {
    if pattern.predicate != atom.predicate || pattern.args.len() != atom.args.len() {
        return None;
    }
    let mut newly = Vec::new();
    for (term, arg) in pattern.args.iter().zip(&atom.args) {
        let ok = match term {
            Term::Const(e) => e == arg,
            Term::Var(v) => match &binding[*v] {
                Some(b) => b == arg,
                None => {
                    if arg.tag().conforms_to(params[*v].tag) {
                        binding[*v] = Some(arg.clone());
                        newly.push(*v);
                        true
                    } else {
                        false
                    }
                }
            },
        };
        if !ok {
            for v in newly {
                binding[v] = None;
            }
            return None;
        }
    }
    Some(newly)
}

/// Picks the unmatched pattern with the most fixed arguments.
pub(crate) fn most_constrained(
    patterns: &[&Pattern],
    done: &[bool],
    binding: &[Option<EntityId>],
) -> Option<usize> {
    (0..patterns.len()).filter(|&i| !done[i]).max_by_key(|&i| {
        let fixed = patterns[i]
            .args
            .iter()
            .filter(|t| match t {
                Term::Const(_) => true,
                Term::Var(v) => binding[*v].is_some(),
            })
            .count();
        // prefer earlier patterns on ties
        (fixed, std::cmp::Reverse(i))
    })
}

/// All type-correct substitutions under which every premise of `rule` is
/// simultaneously present in `state`, in canonical order.
pub fn ground_rule(rule: &RuleSchema, state: &State) -> Vec<GroundAction> {
    let patterns: Vec<&Pattern> = rule.lhs.iter().map(|p| &p.pattern).collect();
    let mut done = vec![false; patterns.len()];
    let mut binding = vec![None; rule.params.len()];
    let mut found = BTreeSet::new();
    ground_search(rule, state, &patterns, &mut done, &mut binding, &mut found);
    found.into_iter().collect()
}

fn ground_search(
    rule: &RuleSchema,
    state: &State,
    patterns: &[&Pattern],
    done: &mut [bool],
    binding: &mut [Option<EntityId>],
    found: &mut BTreeSet<GroundAction>,
) {
    let Some(next) = most_constrained(patterns, done, binding) else {
        if binding.iter().all(Option::is_some) {
            let full: Vec<EntityId> = binding.iter().cloned().map(Option::unwrap).collect();
            let action = rule
                .instantiate(&full)
                .expect("binding length matches params");
            if action.is_applicable(state) {
                found.insert(action);
            }
        }
        return;
    };
    done[next] = true;
    let pattern = patterns[next];
    for atom in state.with_predicate(&pattern.predicate) {
        if let Some(newly) = unify(pattern, atom, &rule.params, binding) {
            ground_search(rule, state, patterns, done, binding, found);
            for v in newly {
                binding[v] = None;
            }
        }
    }
    done[next] = false;
}

/// `state - consumed + produced`. The input is left untouched.
pub fn apply_action(state: &State, action: &GroundAction) -> Result<State, LogicError> {
    if let Some(missing) = action.required.iter().find(|a| !state.contains(a)) {
        return Err(LogicError::NotApplicable {
            action: action.to_string(),
            missing: missing.to_string(),
        });
    }
    let mut next = state.clone();
    for atom in &action.consumed {
        if !next.remove(atom) {
            return Err(LogicError::NotApplicable {
                action: action.to_string(),
                missing: atom.to_string(),
            });
        }
    }
    for atom in &action.produced {
        next.insert(atom.clone());
    }
    Ok(next)
}

/// One step of forward chaining: every grounding of every rule, in
/// canonical order.
pub fn admissible_actions(state: &State, rules: &[RuleSchema]) -> Vec<GroundAction> {
    let mut all: Vec<GroundAction> = rules.iter().flat_map(|r| ground_rule(r, state)).collect();
    all.sort();
    all.dedup();
    all
}

/// The explored part of the underlying MDP.
#[derive(Debug, Clone)]
pub struct TransitionGraph {
    pub states: Vec<State>,
    /// `(from, action, to)` indices into `states`.
    pub edges: Vec<(usize, GroundAction, usize)>,
    /// Set when at least one reachable state was left out.
    pub truncated: bool,
}

impl TransitionGraph {
    pub fn index_of(&self, state: &State) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }
}

/// Breadth-first enumeration with canonical-state deduplication, keeping at
/// most `state_limit` states.
pub fn enumerate_reachable(
    initial: &State,
    rules: &[RuleSchema],
    state_limit: usize,
) -> TransitionGraph {
    let limit = state_limit.max(1);
    let mut states = vec![initial.clone()];
    let mut index: HashMap<State, usize> = HashMap::from([(initial.clone(), 0)]);
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let current = states[i].clone();
        for action in admissible_actions(&current, rules) {
            let next = apply_action(&current, &action).expect("admissible actions apply");
            let j = match index.get(&next) {
                Some(&j) => j,
                None if states.len() < limit => {
                    let j = states.len();
                    index.insert(next.clone(), j);
                    states.push(next);
                    queue.push_back(j);
                    j
                }
                None => {
                    truncated = true;
                    continue;
                }
            };
            edges.push((i, action, j));
        }
    }
    TransitionGraph {
        states,
        edges,
        truncated,
    }
}
