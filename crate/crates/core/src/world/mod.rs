//! A discrete household scene with mid-level actions.
//!
//! The agent (always `character0`) stands in one room, is close to a set of
//! objects, holds at most two of them and may sit on one. Walking to an
//! object moves the agent (and whatever it holds) to that object's room and
//! resets closeness to the target plus the held objects.

mod facts;
mod random;
mod scene;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::parser::parse_term;
use crate::term::Term;

pub use facts::{fluent_list, fluents, state_to_facts, Fluent};
pub use random::{random_scene, GRABBABLE_TYPES, SITTABLE_TYPES, SWITCHABLE_TYPES, TASK_TYPES};
pub use scene::{load_scene, load_scene_file, scene_to_toml, SchemaError};

pub const AGENT_ID: &str = "character0";
pub const AGENT_TYPE: &str = "character";
pub const HAND_CAPACITY: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Power {
    On,
    Off,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Object {
    pub kind: String,
    pub room: String,
    pub grabbable: bool,
    pub sittable: bool,
    pub switchable: bool,
    pub powered: Power,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Agent {
    pub room: String,
    pub close: BTreeSet<String>,
    pub held: BTreeSet<String>,
    pub sitting_on: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldState {
    /// Room id to room type.
    pub rooms: BTreeMap<String, String>,
    pub objects: BTreeMap<String, Object>,
    pub agent: Agent,
    pub step: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Walk(String),
    Grab(String),
    SwitchOn(String),
    SwitchOff(String),
    Sit(String),
    StandUp,
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::Walk(_) => "walk",
            Action::Grab(_) => "grab",
            Action::SwitchOn(_) => "switchon",
            Action::SwitchOff(_) => "switchoff",
            Action::Sit(_) => "sit",
            Action::StandUp => "standup",
        }
    }

    pub fn target(&self) -> Option<&str> {
        match self {
            Action::Walk(x) | Action::Grab(x) | Action::SwitchOn(x) | Action::SwitchOff(x) | Action::Sit(x) => Some(x),
            Action::StandUp => None,
        }
    }

    pub fn to_term(&self) -> Term {
        match self.target() {
            Some(x) => Term::compound(self.name(), vec![Term::atom(x)]),
            None => Term::atom(self.name()),
        }
    }

    pub fn from_term(t: &Term) -> Option<Action> {
        if let Term::Atom(a) = t {
            return (&**a == "standup").then_some(Action::StandUp);
        }
        let (name, 1) = t.functor()? else { return None };
        let Term::Atom(x) = &t.args()[0] else { return None };
        let x = x.to_string();
        Some(match name {
            "walk" => Action::Walk(x),
            "grab" => Action::Grab(x),
            "switchon" => Action::SwitchOn(x),
            "switchoff" => Action::SwitchOff(x),
            "sit" => Action::Sit(x),
            _ => return None,
        })
    }

    /// Every action that names `targets` (plus `standup`), legal or not.
    pub fn all_for<'a>(targets: impl IntoIterator<Item = &'a str>) -> Vec<Action> {
        let mut out = Vec::new();
        for x in targets {
            out.push(Action::Walk(x.into()));
            out.push(Action::Grab(x.into()));
            out.push(Action::SwitchOn(x.into()));
            out.push(Action::SwitchOff(x.into()));
            out.push(Action::Sit(x.into()));
        }
        out.push(Action::StandUp);
        out
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

impl FromStr for Action {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = parse_term(s).map_err(|e| e.to_string())?;
        Action::from_term(&t).ok_or_else(|| format!("not an action: {s}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Legality {
    Legal,
    Illegal(&'static str),
}

impl Legality {
    pub fn is_legal(self) -> bool {
        self == Legality::Legal
    }

    pub fn reason(self) -> Option<&'static str> {
        match self {
            Legality::Legal => None,
            Legality::Illegal(r) => Some(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("illegal action {action}: {reason}")]
pub struct IllegalAction {
    pub action: Action,
    pub reason: &'static str,
}

impl WorldState {
    pub fn object(&self, id: &str) -> Option<&Object> {
        self.objects.get(id)
    }

    /// Object ids of the given type, in id order.
    pub fn objects_of_type<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.objects
            .iter()
            .filter(move |(_, o)| o.kind == kind)
            .map(|(id, _)| id.as_str())
    }

    pub fn legal(&self, a: &Action) -> Legality {
        use Legality::Illegal;
        let agent = &self.agent;
        if let Action::StandUp = a {
            return if agent.sitting_on.is_some() {
                Legality::Legal
            } else {
                Illegal("not sitting")
            };
        }
        let x = a.target().expect("targeted action");
        if x == AGENT_ID {
            if let Action::Walk(_) = a {
                return Illegal("cannot walk to a character");
            }
        }
        let Some(obj) = self.objects.get(x) else {
            return Illegal("unknown object");
        };
        let close = agent.close.contains(x);
        match a {
            Action::Walk(_) if close => Illegal("already close"),
            Action::Walk(_) => Legality::Legal,
            _ if !close => Illegal("not close"),
            Action::Grab(_) if !obj.grabbable => Illegal("not grabbable"),
            Action::Grab(_) if agent.held.contains(x) => Illegal("already held"),
            Action::Grab(_) if agent.held.len() >= HAND_CAPACITY => Illegal("hands full"),
            Action::Grab(_) if agent.sitting_on.is_some() => Illegal("sitting"),
            Action::SwitchOn(_) | Action::SwitchOff(_) if !obj.switchable => Illegal("not switchable"),
            Action::SwitchOn(_) if obj.powered == Power::On => Illegal("already on"),
            Action::SwitchOff(_) if obj.powered == Power::Off => Illegal("already off"),
            Action::Sit(_) if !obj.sittable => Illegal("not sittable"),
            Action::Sit(_) if agent.sitting_on.is_some() => Illegal("already sitting"),
            _ => Legality::Legal,
        }
    }

    /// The successor state. The input is left untouched.
    pub fn apply_action(&self, a: &Action) -> Result<WorldState, IllegalAction> {
        if let Legality::Illegal(reason) = self.legal(a) {
            return Err(IllegalAction {
                action: a.clone(),
                reason,
            });
        }
        let mut s = self.clone();
        match a {
            Action::Walk(x) => {
                let room = s.objects[x].room.clone();
                for h in &s.agent.held {
                    if let Some(o) = s.objects.get_mut(h) {
                        o.room = room.clone();
                    }
                }
                s.agent.room = room;
                s.agent.close = s.agent.held.clone();
                s.agent.close.insert(x.clone());
                s.agent.sitting_on = None;
            }
            Action::Grab(x) => {
                s.agent.held.insert(x.clone());
            }
            Action::SwitchOn(x) => s.objects.get_mut(x).expect("legal").powered = Power::On,
            Action::SwitchOff(x) => s.objects.get_mut(x).expect("legal").powered = Power::Off,
            Action::Sit(x) => s.agent.sitting_on = Some(x.clone()),
            Action::StandUp => s.agent.sitting_on = None,
        }
        s.step += 1;
        Ok(s)
    }

    /// Every action over the scene's objects that is legal here.
    pub fn legal_actions(&self) -> Vec<Action> {
        Action::all_for(self.objects.keys().map(String::as_str))
            .into_iter()
            .filter(|a| self.legal(a).is_legal())
            .collect()
    }

    /// Checks the structural invariants; returns the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let agent = &self.agent;
        if !self.rooms.contains_key(&agent.room) {
            return Err(format!("agent in unknown room {}", agent.room));
        }
        for (id, o) in &self.objects {
            if !self.rooms.contains_key(&o.room) {
                return Err(format!("{id} in unknown room {}", o.room));
            }
            if (o.powered == Power::None) == o.switchable {
                return Err(format!("{id}: power state disagrees with switchability"));
            }
        }
        if agent.held.len() > HAND_CAPACITY {
            return Err("more than two objects held".into());
        }
        for h in &agent.held {
            if !agent.close.contains(h) {
                return Err(format!("held {h} is not close"));
            }
            match self.objects.get(h) {
                Some(o) if o.grabbable => {}
                _ => return Err(format!("held {h} is not a grabbable object")),
            }
        }
        for c in &agent.close {
            match self.objects.get(c) {
                Some(o) if o.room == agent.room => {}
                _ => return Err(format!("close {c} is not an object in the agent's room")),
            }
        }
        if let Some(x) = &agent.sitting_on {
            match self.objects.get(x) {
                Some(o) if o.sittable && o.room == agent.room => {}
                _ => return Err(format!("sitting on {x}, which is not sittable here")),
            }
        }
        Ok(())
    }
}
