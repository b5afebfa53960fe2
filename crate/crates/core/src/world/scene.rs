//! Scene files (TOML).
//!
//! ```toml
//! [[rooms]]
//! id = "livingroom100"
//! type = "livingroom"
//!
//! [[objects]]
//! id = "remotecontrol1"
//! type = "remotecontrol"
//! room = "livingroom100"
//! grabbable = true
//! switchable = true
//! powered = "off"
//!
//! [agent]
//! room = "livingroom100"
//! close = ["remotecontrol1"]    # optional, as are held and sitting_on
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Agent, Object, Power, WorldState, AGENT_ID, AGENT_TYPE, HAND_CAPACITY};
use crate::term::is_plain_symbol;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("scene error: {message}")]
pub struct SchemaError {
    pub message: String,
}

impl SchemaError {
    fn new(message: impl Into<String>) -> Self {
        SchemaError {
            message: message.into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    #[serde(default)]
    rooms: Vec<RoomDoc>,
    #[serde(default)]
    objects: Vec<ObjectDoc>,
    agent: AgentDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoomDoc {
    id: String,
    #[serde(rename = "type")]
    kind: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDoc {
    id: String,
    #[serde(rename = "type")]
    kind: String,
    room: String,
    #[serde(default)]
    grabbable: bool,
    #[serde(default)]
    sittable: bool,
    #[serde(default)]
    switchable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    powered: Option<PowerDoc>,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PowerDoc {
    On,
    Off,
    None,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentDoc {
    room: String,
    #[serde(default)]
    close: Vec<String>,
    #[serde(default)]
    held: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sitting_on: Option<String>,
}

fn check_id(id: &str, what: &str) -> Result<(), SchemaError> {
    if !is_plain_symbol(id) || id == "[]" || id == "not" {
        return Err(SchemaError::new(format!(
            "{what} `{id}` is not a valid identifier (lowercase letter, then letters, digits or _)"
        )));
    }
    Ok(())
}

/// Parses and validates a scene document. The result is at step 0.
pub fn load_scene(text: &str) -> Result<WorldState, SchemaError> {
    let doc: SceneDoc = toml::from_str(text).map_err(|e| SchemaError::new(e.message().to_string()))?;
    let mut ids: HashSet<&str> = HashSet::from([AGENT_ID]);

    let mut rooms = BTreeMap::new();
    for r in &doc.rooms {
        check_id(&r.id, "room id")?;
        check_id(&r.kind, "room type")?;
        if !ids.insert(&r.id) {
            return Err(SchemaError::new(format!("duplicate id `{}`", r.id)));
        }
        rooms.insert(r.id.clone(), r.kind.clone());
    }

    let mut objects = BTreeMap::new();
    for o in &doc.objects {
        check_id(&o.id, "object id")?;
        check_id(&o.kind, "object type")?;
        if !ids.insert(&o.id) {
            return Err(SchemaError::new(format!("duplicate id `{}`", o.id)));
        }
        if o.kind == AGENT_TYPE {
            return Err(SchemaError::new(format!(
                "object `{}` may not have type {AGENT_TYPE}",
                o.id
            )));
        }
        if !rooms.contains_key(&o.room) {
            return Err(SchemaError::new(format!(
                "object `{}` refers to unknown room `{}`",
                o.id, o.room
            )));
        }
        let powered = match (o.switchable, o.powered) {
            (true, Some(PowerDoc::On)) => Power::On,
            (true, Some(PowerDoc::Off)) => Power::Off,
            (true, _) => {
                return Err(SchemaError::new(format!(
                    "switchable object `{}` is missing field `powered` (\"on\" or \"off\")",
                    o.id
                )))
            }
            (false, None | Some(PowerDoc::None)) => Power::None,
            (false, Some(_)) => {
                return Err(SchemaError::new(format!(
                    "object `{}` has a power state but is not switchable",
                    o.id
                )))
            }
        };
        objects.insert(
            o.id.clone(),
            Object {
                kind: o.kind.clone(),
                room: o.room.clone(),
                grabbable: o.grabbable,
                sittable: o.sittable,
                switchable: o.switchable,
                powered,
            },
        );
    }

    let a = &doc.agent;
    if !rooms.contains_key(&a.room) {
        return Err(SchemaError::new(format!("agent refers to unknown room `{}`", a.room)));
    }
    let close: BTreeSet<String> = a.close.iter().cloned().collect();
    let held: BTreeSet<String> = a.held.iter().cloned().collect();
    for c in &close {
        match objects.get(c) {
            None => return Err(SchemaError::new(format!("agent is close to unknown object `{c}`"))),
            Some(o) if o.room != a.room => {
                return Err(SchemaError::new(format!(
                    "agent is close to `{c}`, which is in another room"
                )))
            }
            Some(_) => {}
        }
    }
    if held.len() > HAND_CAPACITY {
        return Err(SchemaError::new(format!(
            "agent holds {} objects; at most {HAND_CAPACITY}",
            held.len()
        )));
    }
    for h in &held {
        if !close.contains(h) {
            return Err(SchemaError::new(format!(
                "held object `{h}` must also be listed as close"
            )));
        }
        if !objects[h].grabbable {
            return Err(SchemaError::new(format!("held object `{h}` is not grabbable")));
        }
    }

    if let Some(x) = &a.sitting_on {
        if !close.contains(x) {
            return Err(SchemaError::new(format!(
                "agent sits on `{x}`, which must also be listed as close"
            )));
        }
        if !objects[x].sittable {
            return Err(SchemaError::new(format!("agent sits on `{x}`, which is not sittable")));
        }
    }

    Ok(WorldState {
        rooms,
        objects,
        agent: Agent {
            room: a.room.clone(),
            close,
            held,
            sitting_on: a.sitting_on.clone(),
        },
        step: 0,
    })
}

pub fn load_scene_file(path: impl AsRef<Path>) -> Result<WorldState, SchemaError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| SchemaError::new(format!("cannot read {}: {e}", path.display())))?;
    load_scene(&text)
}

/// Writes a state back in scene-file form. The step counter is not part of
/// the format and is dropped.
pub fn scene_to_toml(s: &WorldState) -> String {
    let doc = SceneDoc {
        rooms: s
            .rooms
            .iter()
            .map(|(id, kind)| RoomDoc {
                id: id.clone(),
                kind: kind.clone(),
            })
            .collect(),
        objects: s
            .objects
            .iter()
            .map(|(id, o)| ObjectDoc {
                id: id.clone(),
                kind: o.kind.clone(),
                room: o.room.clone(),
                grabbable: o.grabbable,
                sittable: o.sittable,
                switchable: o.switchable,
                powered: match o.powered {
                    Power::On => Some(PowerDoc::On),
                    Power::Off => Some(PowerDoc::Off),
                    Power::None => None,
                },
            })
            .collect(),
        agent: AgentDoc {
            room: s.agent.room.clone(),
            close: s.agent.close.iter().cloned().collect(),
            held: s.agent.held.iter().cloned().collect(),
            sitting_on: s.agent.sitting_on.clone(),
        },
    };
    toml::to_string(&doc).expect("scene documents serialize")
}
