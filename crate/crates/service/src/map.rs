//! Graph document for drawing the current state of a game.

use serde::{Deserialize, Serialize};
use tw_core::game::GameDefinition;
use tw_core::world::{player_room, room_of, Direction, DoorState};
use tw_core::{EntityId, State, TypeTag};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSnapshot {
    pub rooms: Vec<RoomNode>,
    pub exits: Vec<ExitEdge>,
    pub doors: Vec<DoorNode>,
    pub objects: Vec<ObjectNode>,
    pub player_room: Option<String>,
    /// Entities named by the winning conditions.
    pub quest_targets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomNode {
    pub id: String,
    pub name: String,
    pub x: i32,
    pub y: i32,
    pub player: bool,
    /// A quest target currently lies somewhere in this room.
    pub target: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExitEdge {
    pub from: String,
    pub direction: Direction,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub door: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoorNode {
    pub id: String,
    pub name: String,
    pub state: DoorState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectNode {
    pub id: String,
    pub name: String,
    /// Type symbol: `c`, `s`, `o`, `k`, `f` or `t`.
    pub kind: TypeTag,
    /// `at`, `in` or `on`.
    pub relation: String,
    /// The room, container, supporter or `I` for the inventory.
    pub holder: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room: Option<String>,
    pub target: bool,
}

pub fn snapshot(game: &GameDefinition, state: &State) -> MapSnapshot {
    let name = |e: &EntityId| game.names.display(e).to_string();
    let targets: Vec<EntityId> = game
        .quest
        .iter()
        .flat_map(|q| q.winning_conditions.iter())
        .flat_map(|a| a.args().iter())
        .filter(|e| {
            !matches!(
                e.tag(),
                TypeTag::Player | TypeTag::Inventory | TypeTag::Room
            )
        })
        .cloned()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let target_rooms: Vec<EntityId> = targets.iter().filter_map(|t| room_of(state, t)).collect();
    let here = player_room(state);

    let rooms = state
        .entities()
        .into_iter()
        .filter(|e| e.tag() == TypeTag::Room)
        .map(|r| {
            let (x, y) = game.coords.get(&r).copied().unwrap_or((0, 0));
            RoomNode {
                id: r.id().to_string(),
                name: name(&r),
                x,
                y,
                player: here.as_ref() == Some(&r),
                target: target_rooms.contains(&r),
            }
        })
        .collect();

    let mut exits = Vec::new();
    for dir in Direction::ALL {
        for a in state.with_predicate(dir.predicate()) {
            let (to, from) = (a.arg(0), a.arg(1));
            let door = state
                .with_predicate("link")
                .find(|l| l.arg(0) == from && l.arg(2) == to)
                .map(|l| l.arg(1).id().to_string());
            exits.push(ExitEdge {
                from: from.id().to_string(),
                direction: dir,
                to: to.id().to_string(),
                door,
            });
        }
    }
    exits.sort_by(|a, b| (&a.from, a.direction).cmp(&(&b.from, b.direction)));

    let doors = state
        .entities()
        .into_iter()
        .filter(|e| e.tag() == TypeTag::Door)
        .filter_map(|d| {
            let st = [DoorState::Locked, DoorState::Closed, DoorState::Open]
                .into_iter()
                .find(|s| state.with_predicate(s.predicate()).any(|a| a.arg(0) == &d))?;
            Some(DoorNode {
                id: d.id().to_string(),
                name: name(&d),
                state: st,
            })
        })
        .collect();

    let mut objects = Vec::new();
    for rel in ["at", "in", "on"] {
        for a in state.with_predicate(rel) {
            let obj = a.arg(0);
            if obj.tag() == TypeTag::Player {
                continue;
            }
            objects.push(ObjectNode {
                id: obj.id().to_string(),
                name: name(obj),
                kind: obj.tag(),
                relation: rel.to_string(),
                holder: a.arg(1).id().to_string(),
                room: room_of(state, obj).map(|r| r.id().to_string()),
                target: targets.contains(obj),
            });
        }
    }
    objects.sort_by(|a, b| a.id.cmp(&b.id));

    MapSnapshot {
        rooms,
        exits,
        doors,
        objects,
        player_room: here.map(|r| r.id().to_string()),
        quest_targets: targets.iter().map(|t| t.id().to_string()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tw_core::bench::make_treasure_hunter;
    use tw_core::fixtures::mini_world_game;

    #[test]
    fn kitchen() {
        let g = mini_world_game();
        let m = snapshot(&g, &g.initial_state);
        assert_eq!(m.rooms.len(), 1);
        assert!(m.rooms[0].player);
        assert_eq!(m.player_room.as_deref(), Some("kitchen"));
        assert_eq!(m.quest_targets, ["apple"]);
        let apple = m.objects.iter().find(|o| o.id == "apple").unwrap();
        assert_eq!(
            (apple.relation.as_str(), apple.holder.as_str()),
            ("in", "fridge")
        );
        assert!(apple.target && m.rooms[0].target);
        assert!(m.exits.is_empty() && m.doors.is_empty());
    }

    #[test]
    fn treasure_hunter_marks_target_and_follows_player() {
        let g = make_treasure_hunter(20, 3).unwrap();
        let m = snapshot(&g, &g.initial_state);
        assert_eq!(m.rooms.len(), 10);
        assert_eq!(m.rooms.iter().filter(|r| r.player).count(), 1);
        assert_eq!(m.quest_targets.len(), 1);
        assert_eq!(m.rooms.iter().filter(|r| r.target).count(), 1);
        for e in &m.exits {
            assert!(m.exits.iter().any(|b| b.from == e.to && b.to == e.from));
        }

        let q = g.quest.as_ref().unwrap();
        let states = q.replay(&g.initial_state).unwrap();
        let i = q.actions.iter().position(|a| a.verb() == "go").unwrap();
        let before = snapshot(&g, &states[i]);
        let after = snapshot(&g, &states[i + 1]);
        assert_ne!(after.player_room, before.player_room);
        assert!(after
            .rooms
            .iter()
            .any(|r| r.player && Some(&r.id) == after.player_room.as_ref()));
    }
}
