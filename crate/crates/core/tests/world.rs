mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{kb_legal, random_walk, sample_pair, SIX};
use goalplan::world::{load_scene, random_scene, scene_to_toml, state_to_facts, Action, Power, WorldState, AGENT_ID};
use goalplan::{Program, Term};

/// Rebuilds what the facts say about a scene, independently of the encoder.
#[derive(Debug, Default, PartialEq)]
struct Decoded {
    types: BTreeMap<String, String>,
    inside: BTreeMap<String, String>,
    power: BTreeMap<String, Power>,
    grabbable: BTreeSet<String>,
    sittable: BTreeSet<String>,
    state: Vec<String>,
}

fn atom(t: &Term) -> String {
    match t {
        Term::Atom(a) => a.to_string(),
        other => panic!("expected an atom, got {other}"),
    }
}

fn decode(p: &Program) -> Decoded {
    let mut d = Decoded::default();
    for c in p.clauses() {
        assert!(c.is_fact() && c.head.is_ground(), "{c}");
        let args = c.head.args();
        match c.head.functor().unwrap() {
            ("type", 2) => assert!(d.types.insert(atom(&args[0]), atom(&args[1])).is_none()),
            ("inside", 2) => assert!(d.inside.insert(atom(&args[0]), atom(&args[1])).is_none()),
            ("on", 1) => assert!(d.power.insert(atom(&args[0]), Power::On).is_none()),
            ("off", 1) => assert!(d.power.insert(atom(&args[0]), Power::Off).is_none()),
            ("grabbable", 1) => assert!(d.grabbable.insert(atom(&args[0]))),
            ("sittable", 1) => assert!(d.sittable.insert(atom(&args[0]))),
            ("close_to_character", 1) => {
                d.state = args[0].as_list().unwrap().iter().map(|f| f.to_string()).collect();
            }
            other => panic!("unexpected fact {other:?}"),
        }
    }
    d
}

fn expected(s: &WorldState) -> Decoded {
    let mut d = Decoded::default();
    for (id, kind) in &s.rooms {
        d.types.insert(id.clone(), kind.clone());
    }
    d.types.insert(AGENT_ID.into(), "character".into());
    d.inside.insert(AGENT_ID.into(), s.agent.room.clone());
    for (id, o) in &s.objects {
        d.types.insert(id.clone(), o.kind.clone());
        d.inside.insert(id.clone(), o.room.clone());
        if o.powered != Power::None {
            d.power.insert(id.clone(), o.powered);
        }
        if o.grabbable {
            d.grabbable.insert(id.clone());
        }
        if o.sittable {
            d.sittable.insert(id.clone());
        }
    }
    let mut state: Vec<String> = s.agent.close.iter().map(|x| format!("close({x})")).collect();
    state.extend(s.agent.held.iter().map(|x| format!("holds({x})")));
    state.extend(
        s.objects
            .iter()
            .filter(|(_, o)| o.powered == Power::On)
            .map(|(x, _)| format!("on({x})")),
    );
    state.extend(s.agent.sitting_on.iter().map(|x| format!("sitting_on({x})")));
    state.sort();
    state.dedup();
    d.state = state;
    d
}

#[test]
fn six_object_facts_decode() {
    let s = load_scene(SIX).unwrap();
    let d = decode(&state_to_facts(&s));
    assert_eq!(d, expected(&s));
    assert_eq!(d.state, ["on(lamp6)"]);
    assert_eq!(d.power.len(), 3);
    assert_eq!(d.types.len(), 2 + 6 + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn actions_preserve_invariants(seed in any::<u64>(), n in 1usize..15, steps in 0usize..25, probes in prop::collection::vec(any::<prop::sample::Index>(), 25)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = random_scene(seed, n);
        prop_assert_eq!(s.check_invariants(), Ok(()));
        for (i, probe) in probes.iter().enumerate().take(steps) {
            let all = Action::all_for(s.objects.keys().map(String::as_str));
            let a = probe.get(&all);
            match s.apply_action(a) {
                Ok(next) => {
                    prop_assert!(s.legal(a).is_legal());
                    prop_assert_eq!(next.check_invariants(), Ok(()), "after {} at {}", a, i);
                    prop_assert_eq!(next.step, s.step + 1);
                    prop_assert_eq!(next.rooms.len(), s.rooms.len());
                    prop_assert_eq!(next.objects.len(), s.objects.len());
                    s = next;
                }
                Err(e) => {
                    prop_assert!(!s.legal(a).is_legal());
                    prop_assert_eq!(&e.action, a);
                }
            }
            // keep some legal steps in the mix
            if let Some(a) = s.legal_actions().choose(&mut rng) {
                s = s.apply_action(a).unwrap();
            }
        }
    }

    #[test]
    fn facts_round_trip(seed in any::<u64>(), n in 1usize..30, steps in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in random_walk(&random_scene(seed, n), steps, &mut rng) {
            prop_assert_eq!(decode(&state_to_facts(&s)), expected(&s));
        }
    }

    #[test]
    fn scene_text_round_trips(seed in any::<u64>(), n in 1usize..30, steps in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_walk(&random_scene(seed, n), steps, &mut rng).pop().unwrap();
        let mut back = load_scene(&scene_to_toml(&s)).unwrap();
        back.step = s.step;
        prop_assert_eq!(back, s);
    }

    #[test]
    fn native_legality_matches_knowledge_base(seed in any::<u64>()) {
        let (s, a) = sample_pair(seed);
        prop_assert_eq!(s.legal(&a).is_legal(), kb_legal(&s, &a), "{} in {:?}", a, s);
    }
}
