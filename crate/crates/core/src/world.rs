//! Map generation by random walk on a grid, and object placement.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Atom, EntityId, State, TypeTag};

/// Probability that a walk step between two already-visited cells adds a
/// new connection.
pub const LOOP_PROBABILITY: f64 = 0.5;
/// Probability that a connection gets a door when doors are enabled.
pub const DOOR_PROBABILITY: f64 = 0.5;
/// Probability that a generated door starts closed.
pub const DOOR_CLOSED_PROBABILITY: f64 = 0.5;
/// Probability that a portable object starts in the player's inventory.
pub const INVENTORY_PROBABILITY: f64 = 0.1;

const MAX_WALK_STEPS_PER_ROOM: usize = 20_000;
const MAX_MAP_ATTEMPTS: usize = 4;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WorldError {
    #[error("invalid world spec: {0}")]
    InvalidSpec(String),
    #[error("map generation failed after {0} attempts")]
    GenerationFailed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub nb_rooms: usize,
    pub grid_size: usize,
    pub with_doors: bool,
    pub nb_objects: usize,
    pub seed: u64,
}

impl WorldSpec {
    pub fn validate(&self) -> Result<(), WorldError> {
        if self.nb_rooms == 0 {
            return Err(WorldError::InvalidSpec(
                "nb_rooms must be at least 1".into(),
            ));
        }
        if self.grid_size.saturating_mul(self.grid_size) < self.nb_rooms {
            return Err(WorldError::InvalidSpec(format!(
                "a {0}x{0} grid cannot hold {1} rooms",
                self.grid_size, self.nb_rooms
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::South,
        Direction::East,
        Direction::West,
    ];

    pub fn word(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::East => "east",
            Direction::West => "west",
        }
    }

    pub fn from_word(w: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.word() == w)
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::South => Direction::North,
            Direction::East => Direction::West,
            Direction::West => Direction::East,
        }
    }

    /// Grid offset; north is towards smaller `y`.
    pub fn offset(self) -> (i32, i32) {
        match self {
            Direction::North => (0, -1),
            Direction::South => (0, 1),
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
        }
    }

    /// `north_of` and friends.
    pub fn predicate(self) -> &'static str {
        match self {
            Direction::North => "north_of",
            Direction::South => "south_of",
            Direction::East => "east_of",
            Direction::West => "west_of",
        }
    }

    pub fn rule_name(self) -> &'static str {
        match self {
            Direction::North => "go/north",
            Direction::South => "go/south",
            Direction::East => "go/east",
            Direction::West => "go/west",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomCell {
    pub id: EntityId,
    pub x: i32,
    pub y: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DoorState {
    Open,
    Closed,
    Locked,
}

impl DoorState {
    pub fn predicate(self) -> &'static str {
        match self {
            DoorState::Open => "open",
            DoorState::Closed => "closed",
            DoorState::Locked => "locked",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exit {
    pub from: EntityId,
    pub direction: Direction,
    pub to: EntityId,
    pub door: Option<EntityId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapGraph {
    pub rooms: Vec<RoomCell>,
    /// Both directions of every connection are listed.
    pub exits: Vec<Exit>,
    pub door_states: BTreeMap<EntityId, DoorState>,
}

impl MapGraph {
    pub fn exit(&self, room: &EntityId, dir: Direction) -> Option<&Exit> {
        self.exits
            .iter()
            .find(|e| &e.from == room && e.direction == dir)
    }

    /// Undirected connection count.
    pub fn connection_count(&self) -> usize {
        self.exits.len() / 2
    }

    /// Independent cycles: connections beyond a spanning tree.
    pub fn loop_count(&self) -> usize {
        (self.connection_count() + 1).saturating_sub(self.rooms.len())
    }

    pub fn is_connected(&self) -> bool {
        let Some(first) = self.rooms.first() else {
            return true;
        };
        let mut seen = BTreeSet::from([first.id.clone()]);
        let mut queue = VecDeque::from([first.id.clone()]);
        while let Some(r) = queue.pop_front() {
            for e in self.exits.iter().filter(|e| e.from == r) {
                if seen.insert(e.to.clone()) {
                    queue.push_back(e.to.clone());
                }
            }
        }
        seen.len() == self.rooms.len()
    }

    /// Atoms describing rooms, exits and doors. Door state atoms are
    /// included only when `with_door_states` is set.
    pub fn atoms(&self, with_door_states: bool) -> Vec<Atom> {
        let mut out = Vec::new();
        for e in &self.exits {
            out.push(Atom::new(
                e.direction.predicate(),
                vec![e.to.clone(), e.from.clone()],
            ));
            match &e.door {
                None => out.push(Atom::new("free", vec![e.from.clone(), e.to.clone()])),
                Some(d) => {
                    out.push(Atom::new(
                        "link",
                        vec![e.from.clone(), d.clone(), e.to.clone()],
                    ));
                    if with_door_states && self.door_states.get(d) == Some(&DoorState::Open) {
                        out.push(Atom::new("free", vec![e.from.clone(), e.to.clone()]));
                    }
                }
            }
        }
        if with_door_states {
            for (d, st) in &self.door_states {
                out.push(Atom::new(st.predicate(), vec![d.clone()]));
            }
        }
        out
    }

    pub fn doors(&self) -> impl Iterator<Item = &EntityId> {
        self.door_states.keys()
    }
}

/// Random walk on a `grid_size`-square lattice until `nb_rooms` distinct
/// cells are visited. Each first visit creates a room connected to the cell
/// it came from; stepping between two known rooms that are not yet
/// connected adds a connection with [`LOOP_PROBABILITY`].
pub fn generate_map<R: Rng + ?Sized>(
    spec: &WorldSpec,
    rng: &mut R,
) -> Result<MapGraph, WorldError> {
    spec.validate()?;
    for _ in 0..MAX_MAP_ATTEMPTS {
        if let Some(map) = walk(spec, rng) {
            return Ok(map);
        }
    }
    Err(WorldError::GenerationFailed(MAX_MAP_ATTEMPTS))
}

fn walk<R: Rng + ?Sized>(spec: &WorldSpec, rng: &mut R) -> Option<MapGraph> {
    let n = spec.grid_size as i32;
    let mut cells: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    let mut order: Vec<(i32, i32)> = Vec::new();
    let mut connections: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut edges: Vec<(usize, Direction, usize)> = Vec::new();
    let mut cur = (rng.gen_range(0..n), rng.gen_range(0..n));
    cells.insert(cur, 0);
    order.push(cur);
    let budget = MAX_WALK_STEPS_PER_ROOM * spec.nb_rooms;
    let mut steps = 0;
    while order.len() < spec.nb_rooms {
        steps += 1;
        if steps > budget {
            return None;
        }
        let dir = *Direction::ALL.choose(rng).expect("non-empty");
        let (dx, dy) = dir.offset();
        let next = (cur.0 + dx, cur.1 + dy);
        if next.0 < 0 || next.1 < 0 || next.0 >= n || next.1 >= n {
            continue;
        }
        let from = cells[&cur];
        let (to, connect) = match cells.get(&next) {
            Some(&to) => {
                let key = (from.min(to), from.max(to));
                (
                    to,
                    !connections.contains(&key) && rng.gen_bool(LOOP_PROBABILITY),
                )
            }
            None => {
                let to = order.len();
                cells.insert(next, to);
                order.push(next);
                (to, true)
            }
        };
        if connect {
            connections.insert((from.min(to), from.max(to)));
            edges.push((from, dir, to));
        }
        cur = next;
    }

    let rooms: Vec<RoomCell> = order
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| RoomCell {
            id: EntityId::new(format!("r{i}"), TypeTag::Room),
            x,
            y,
        })
        .collect();
    let mut exits = Vec::new();
    let mut door_states = BTreeMap::new();
    for (from, dir, to) in edges {
        let door = if spec.with_doors && rng.gen_bool(DOOR_PROBABILITY) {
            let d = EntityId::new(format!("d{}", door_states.len()), TypeTag::Door);
            let st = if rng.gen_bool(DOOR_CLOSED_PROBABILITY) {
                DoorState::Closed
            } else {
                DoorState::Open
            };
            door_states.insert(d.clone(), st);
            Some(d)
        } else {
            None
        };
        exits.push(Exit {
            from: rooms[from].id.clone(),
            direction: dir,
            to: rooms[to].id.clone(),
            door: door.clone(),
        });
        exits.push(Exit {
            from: rooms[to].id.clone(),
            direction: dir.opposite(),
            to: rooms[from].id.clone(),
            door,
        });
    }
    Some(MapGraph {
        rooms,
        exits,
        door_states,
    })
}

/// Relative weights of generated object types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeMix {
    pub weights: Vec<(TypeTag, f64)>,
}

impl TypeMix {
    /// Containers, supporters, food and plain objects.
    pub fn house() -> Self {
        TypeMix {
            weights: vec![
                (TypeTag::Container, 0.2),
                (TypeTag::Supporter, 0.2),
                (TypeTag::Food, 0.3),
                (TypeTag::Object, 0.3),
            ],
        }
    }

    /// Only things fixed in place.
    pub fn furniture() -> Self {
        TypeMix {
            weights: vec![(TypeTag::Container, 0.5), (TypeTag::Supporter, 0.5)],
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TypeTag {
        self.weights
            .choose_weighted(rng, |(_, w)| *w)
            .map(|(t, _)| *t)
            .unwrap_or(TypeTag::Object)
    }
}

/// Builds the initial state: the player in the first room, map atoms, and
/// `nb_objects` objects whose rooms are drawn uniformly.
pub fn place_objects<R: Rng + ?Sized>(
    map: &MapGraph,
    nb_objects: usize,
    type_mix: &TypeMix,
    rng: &mut R,
) -> State {
    let mut state = State::from_atoms(map.atoms(true));
    let Some(start) = map.rooms.first() else {
        return state;
    };
    state.insert(Atom::new("at", vec![EntityId::player(), start.id.clone()]));

    let tags: Vec<TypeTag> = (0..nb_objects).map(|_| type_mix.sample(rng)).collect();
    let mut holders: BTreeMap<usize, Vec<EntityId>> = BTreeMap::new();
    let mut portables = Vec::new();
    for (i, tag) in tags.into_iter().enumerate() {
        let id = EntityId::new(format!("{}{i}", tag.symbol()), tag);
        let room = rng.gen_range(0..map.rooms.len());
        if tag.is_portable() {
            portables.push((id, room));
            continue;
        }
        state.insert(Atom::new(
            "at",
            vec![id.clone(), map.rooms[room].id.clone()],
        ));
        if tag == TypeTag::Container {
            let st = if rng.gen_bool(0.5) { "open" } else { "closed" };
            state.insert(Atom::new(st, vec![id.clone()]));
        }
        holders.entry(room).or_default().push(id);
    }
    for (id, room) in portables {
        if rng.gen_bool(INVENTORY_PROBABILITY) {
            state.insert(Atom::new("in", vec![id, EntityId::inventory()]));
            continue;
        }
        let spots = holders.get(&room).map(Vec::as_slice).unwrap_or(&[]);
        let pick = rng.gen_range(0..=spots.len());
        let atom = match spots.get(pick) {
            None => Atom::new("at", vec![id, map.rooms[room].id.clone()]),
            Some(h) if h.tag() == TypeTag::Container => Atom::new("in", vec![id, h.clone()]),
            Some(h) => Atom::new("on", vec![id, h.clone()]),
        };
        state.insert(atom);
    }
    state
}

/// The room an entity ultimately sits in, following `in`/`on` chains.
pub fn room_of(state: &State, entity: &EntityId) -> Option<EntityId> {
    let mut cur = entity.clone();
    for _ in 0..8 {
        if cur.tag() == TypeTag::Room {
            return Some(cur);
        }
        let holder = ["at", "in", "on"].iter().find_map(|p| {
            state
                .with_predicate(p)
                .find(|a| a.arg(0) == &cur)
                .map(|a| a.arg(1).clone())
        })?;
        if holder.tag() == TypeTag::Inventory {
            return None;
        }
        cur = holder;
    }
    None
}

pub fn player_room(state: &State) -> Option<EntityId> {
    let p = EntityId::player();
    state
        .with_predicate("at")
        .find(|a| a.arg(0) == &p)
        .map(|a| a.arg(1).clone())
}
