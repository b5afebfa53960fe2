use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Agent, Object, Power, WorldState};

/// Object types the benchmark tasks refer to.
pub const TASK_TYPES: [&str; 4] = ["remotecontrol", "shirt", "cellphone", "couch"];
pub const SWITCHABLE_TYPES: [&str; 3] = ["tv", "lamp", "computer"];
pub const GRABBABLE_TYPES: [&str; 6] = ["book", "cup", "plate", "pillow", "towel", "apple"];
pub const SITTABLE_TYPES: [&str; 2] = ["chair", "bed"];

const ROOM_TYPES: [&str; 5] = ["livingroom", "kitchen", "bedroom", "bathroom", "office"];

/// Properties of a vocabulary type: (grabbable, sittable, switchable).
pub(crate) fn type_properties(kind: &str) -> (bool, bool, bool) {
    match kind {
        "remotecontrol" => (true, false, true),
        "shirt" | "cellphone" => (true, false, false),
        "couch" => (false, true, false),
        k if SWITCHABLE_TYPES.contains(&k) => (false, false, true),
        k if GRABBABLE_TYPES.contains(&k) => (true, false, false),
        k if SITTABLE_TYPES.contains(&k) => (false, true, false),
        _ => (false, false, false),
    }
}

fn other_types() -> Vec<&'static str> {
    SWITCHABLE_TYPES
        .iter()
        .chain(&GRABBABLE_TYPES)
        .chain(&SITTABLE_TYPES)
        .copied()
        .collect()
}

/// A deterministic scene with `n_objects` objects spread over one to five
/// rooms. With six or more objects, exactly one each of remotecontrol, shirt,
/// cellphone and couch is present. Every remote control starts switched off.
pub fn random_scene(seed: u64, n_objects: usize) -> WorldState {
    assert!(n_objects >= 1, "a scene needs at least one object");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_rooms = rng.gen_range(1..=ROOM_TYPES.len());
    let mut room_types = ROOM_TYPES.to_vec();
    room_types.shuffle(&mut rng);
    let rooms: BTreeMap<String, String> = room_types[..n_rooms]
        .iter()
        .enumerate()
        .map(|(i, t)| (format!("{t}{}", (i + 1) * 100), t.to_string()))
        .collect();
    let room_ids: Vec<&String> = rooms.keys().collect();

    let mut kinds: Vec<&str> = Vec::with_capacity(n_objects);
    let others = other_types();
    if n_objects >= TASK_TYPES.len() + 2 {
        kinds.extend(TASK_TYPES);
        while kinds.len() < n_objects {
            kinds.push(others.choose(&mut rng).expect("nonempty"));
        }
        kinds.shuffle(&mut rng);
    } else {
        let all: Vec<&str> = TASK_TYPES.iter().copied().chain(others.iter().copied()).collect();
        while kinds.len() < n_objects {
            kinds.push(all.choose(&mut rng).expect("nonempty"));
        }
    }

    let mut objects = BTreeMap::new();
    for (i, kind) in kinds.into_iter().enumerate() {
        let (grabbable, sittable, switchable) = type_properties(kind);
        // every device starts switched off
        let powered = if switchable { Power::Off } else { Power::None };
        let room = room_ids[rng.gen_range(0..room_ids.len())].clone();
        objects.insert(
            format!("{kind}{}", i + 1),
            Object {
                kind: kind.to_string(),
                room,
                grabbable,
                sittable,
                switchable,
                powered,
            },
        );
    }
    let agent_room = room_ids[rng.gen_range(0..room_ids.len())].clone();
    WorldState {
        rooms,
        objects,
        agent: Agent {
            room: agent_room,
            ..Agent::default()
        },
        step: 0,
    }
}
