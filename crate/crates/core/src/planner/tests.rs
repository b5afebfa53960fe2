use super::*;
use crate::parser::parse_clause;
use crate::world::load_scene;

const MINIMAL: &str = include_str!("../../fixtures/minimal.toml");
const SIX: &str = include_str!("../../fixtures/six_objects.toml");

fn task(name: &str) -> Task {
    find_task(&builtin_catalog(), name).unwrap().clone()
}

fn texts(p: &Plan) -> Vec<String> {
    p.actions.iter().map(|a| a.to_string()).collect()
}

#[test]
fn kb_contains_listing_clause() {
    let want = parse_clause("transform(State1,FinalState,_,[]) :- subset(FinalState,State1).").unwrap();
    let kb = domain_kb();
    assert!(kb.clauses().iter().any(|c| crate::term::variant_of(&c.head, &want.head)
        && c.body.len() == 1
        && c.body[0].to_string().starts_with("subset(")));
    let compact: String = DOMAIN_SOURCE.split_whitespace().collect();
    assert!(compact.contains("transform(State1,FinalState,_,[]):-subset(FinalState,State1)."));
}

#[test]
fn kb_covers_every_action() {
    let kb = domain_kb();
    for name in ["walk", "grab", "switchon", "switchoff", "sit", "standup"] {
        for pred in ["legal_action", "update"] {
            assert!(
                kb.clauses()
                    .iter()
                    .any(|c| c.head.functor() == Some((pred, pred_arity(pred)))
                        && c.head.args()[0].functor().map(|f| f.0) == Some(name)),
                "{pred} for {name}"
            );
        }
    }
    for fluent in ["holds", "on", "sitting_on"] {
        assert!(kb.clauses().iter().any(|c| {
            c.head.functor() == Some(("suggest", 2))
                && c.head.args()[0].functor().map(|f| f.0) == Some("walk")
                && c.body
                    .first()
                    .is_some_and(|l| l.to_string().starts_with(&format!("member({fluent}(")))
        }));
    }
}

fn pred_arity(p: &str) -> usize {
    if p == "update" {
        3
    } else {
        2
    }
}

#[test]
fn encode_examples() {
    let minimal = load_scene(MINIMAL).unwrap();
    assert_eq!(
        encode_task(&task("walk_to_remote"), &minimal).unwrap().to_string(),
        "transform([close(remotecontrol1)],P)"
    );
    let six = load_scene(SIX).unwrap();
    assert_eq!(
        encode_task(&task("grab_remote_and_shirt"), &six).unwrap().to_string(),
        "transform([holds(remotecontrol1),holds(shirt2)],P)"
    );
    assert_eq!(
        encode_task(&task("sit_on_couch"), &minimal),
        Err(PlanError::Unresolvable("couch".into()))
    );
}

#[test]
fn minimal_plans() {
    let s = load_scene(MINIMAL).unwrap();
    let o = PlanOptions::default();
    assert_eq!(
        texts(&plan(&s, &task("walk_to_remote"), &o).unwrap()),
        ["walk(remotecontrol1)"]
    );
    let grab = plan(&s, &task("grab_remote"), &o).unwrap();
    assert_eq!(texts(&grab), ["walk(remotecontrol1)", "grab(remotecontrol1)"]);
    let end = execute_plan(&s, &grab).unwrap();
    assert!(goal_satisfied(&end, &task("grab_remote")).unwrap());
    assert!(!goal_satisfied(&s, &task("grab_remote")).unwrap());
    assert!(matches!(
        plan(&s, &task("sit_on_couch"), &o),
        Err(PlanError::Unresolvable(_))
    ));
}

#[test]
fn execute_examples() {
    let s = load_scene(MINIMAL).unwrap();
    assert_eq!(execute_plan(&s, &Plan { actions: vec![] }).unwrap(), s);
    let err = execute_plan(
        &s,
        &Plan {
            actions: vec![Action::Grab("remotecontrol1".into())],
        },
    )
    .unwrap_err();
    assert_eq!((err.index, err.source.reason), (0, "not close"));
}

#[test]
fn six_object_table_tasks() {
    let s = load_scene(SIX).unwrap();
    let lens: Vec<usize> = TABLE_TASKS
        .iter()
        .map(|name| plan(&s, &task(name), &PlanOptions::default()).unwrap().len())
        .collect();
    assert_eq!(lens, [2, 4, 4]);
}

#[test]
fn already_satisfied_goal_gives_empty_plan() {
    let s = load_scene(MINIMAL).unwrap();
    let s = s.apply_action(&Action::Walk("remotecontrol1".into())).unwrap();
    assert!(plan(&s, &task("walk_to_remote"), &PlanOptions::default())
        .unwrap()
        .is_empty());
}

#[test]
fn no_plan_within_length() {
    let s = load_scene(SIX).unwrap();
    let o = PlanOptions {
        max_plan_len: 1,
        ..PlanOptions::default()
    };
    assert_eq!(
        plan(&s, &task("grab_remote"), &o),
        Err(PlanError::NoPlan { max_len: 1 })
    );
    let zero = PlanOptions {
        max_plan_len: 0,
        ..PlanOptions::default()
    };
    assert!(matches!(
        plan(&s, &task("grab_remote"), &zero),
        Err(PlanError::InvalidOptions(_))
    ));
}

#[test]
fn pruning_drops_task_catalog_rules() {
    let s = load_scene(SIX).unwrap();
    let (full, _) = planning_program(&s, &task("grab_remote"), false).unwrap();
    let (pruned, _) = planning_program(&s, &task("grab_remote"), true).unwrap();
    assert!(pruned.len() < full.len());
    assert!(!pruned.to_string().contains("complete_task("));
}

#[test]
fn catalog_file() {
    let text = "[[task]]\nname = \"grab_cup\"\ngoal = [[\"holds\", \"cup\"]]\n";
    let c = load_catalog(text).unwrap();
    assert_eq!(c, vec![Task::new("grab_cup", &[("holds", "cup")])]);
    assert!(load_catalog("[[task]]\nname = \"x\"\ngoal = [[\"holds\", \"dragon\"]]\n").is_err());
    assert!(load_catalog("[[task]]\nname = \"x\"\ngoal = [[\"owns\", \"cup\"]]\n").is_err());
}
