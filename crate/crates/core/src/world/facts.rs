//! Translation of a world state into logic facts.

use super::{Power, WorldState, AGENT_ID, AGENT_TYPE};
use crate::syntax::{Clause, Program};
use crate::term::Term;

/// A dynamic state property carried in the planner's state lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fluent {
    Close(String),
    Holds(String),
    On(String),
    SittingOn(String),
}

impl Fluent {
    pub fn functor(&self) -> &'static str {
        match self {
            Fluent::Close(_) => "close",
            Fluent::Holds(_) => "holds",
            Fluent::On(_) => "on",
            Fluent::SittingOn(_) => "sitting_on",
        }
    }

    pub fn object(&self) -> &str {
        match self {
            Fluent::Close(x) | Fluent::Holds(x) | Fluent::On(x) | Fluent::SittingOn(x) => x,
        }
    }

    pub fn new(functor: &str, object: impl Into<String>) -> Option<Fluent> {
        let x = object.into();
        Some(match functor {
            "close" => Fluent::Close(x),
            "holds" => Fluent::Holds(x),
            "on" => Fluent::On(x),
            "sitting_on" => Fluent::SittingOn(x),
            _ => return None,
        })
    }

    pub fn to_term(&self) -> Term {
        Term::compound(self.functor(), vec![Term::atom(self.object())])
    }
}

/// The fluents that hold in `s`, sorted by their text and duplicate-free.
pub fn fluents(s: &WorldState) -> Vec<Fluent> {
    let mut out: Vec<Fluent> = Vec::new();
    out.extend(s.agent.close.iter().cloned().map(Fluent::Close));
    out.extend(s.agent.held.iter().cloned().map(Fluent::Holds));
    out.extend(
        s.objects
            .iter()
            .filter(|(_, o)| o.powered == Power::On)
            .map(|(id, _)| Fluent::On(id.clone())),
    );
    out.extend(s.agent.sitting_on.iter().cloned().map(Fluent::SittingOn));
    let mut keyed: Vec<(String, Fluent)> = out.into_iter().map(|f| (f.to_term().to_string(), f)).collect();
    keyed.sort();
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, f)| f).collect()
}

/// The canonical fluent list of `s` as a logic list term.
pub fn fluent_list(s: &WorldState) -> Term {
    Term::list(fluents(s).iter().map(Fluent::to_term))
}

fn fact(name: &str, args: Vec<Term>) -> Clause {
    Clause::fact(Term::compound(name, args))
}

/// Timestamp-free facts describing `s`: `type/2` for rooms, objects and the
/// agent, `inside/2` for objects and the agent, `on/1`/`off/1` for switchable
/// objects, `grabbable/1` and `sittable/1`, and `close_to_character/1` holding
/// the canonical fluent list.
pub fn state_to_facts(s: &WorldState) -> Program {
    let a = Term::atom;
    let mut p = Program::default();
    for (id, kind) in &s.rooms {
        p.push(fact("type", vec![a(id.as_str()), a(kind.as_str())]));
    }
    for (id, o) in &s.objects {
        p.push(fact("type", vec![a(id.as_str()), a(o.kind.as_str())]));
    }
    p.push(fact("type", vec![a(AGENT_ID), a(AGENT_TYPE)]));
    for (id, o) in &s.objects {
        p.push(fact("inside", vec![a(id.as_str()), a(o.room.as_str())]));
    }
    p.push(fact("inside", vec![a(AGENT_ID), a(s.agent.room.as_str())]));
    for (id, o) in &s.objects {
        match o.powered {
            Power::On => p.push(fact("on", vec![a(id.as_str())])),
            Power::Off => p.push(fact("off", vec![a(id.as_str())])),
            Power::None => {}
        }
    }
    for (id, o) in &s.objects {
        if o.grabbable {
            p.push(fact("grabbable", vec![a(id.as_str())]));
        }
        if o.sittable {
            p.push(fact("sittable", vec![a(id.as_str())]));
        }
    }
    p.push(fact("close_to_character", vec![fluent_list(s)]));
    p
}
