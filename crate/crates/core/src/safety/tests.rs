use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::kinematics::Vec3;
use crate::sim::{load_scene, replay, Action, Record, Scene, SceneState, SimConfig, Trajectory};
use crate::syntax::{parse_problem, Arg, Atom, Expr, Loc, Predicate, TaskSpec};

fn spec(src: &str) -> TaskSpec {
    parse_problem(src).unwrap()
}

fn load(src: &str) -> (TaskSpec, Scene, SceneState) {
    let sp = spec(src);
    let (scene, state, _) = load_scene(&sp, 0, &SimConfig::default()).unwrap();
    (sp, scene, state)
}

fn atom(p: Predicate, args: Vec<Arg>) -> Expr {
    Expr::Atom(Atom { predicate: p, args, loc: Loc::default() })
}

fn name(n: &str) -> Arg {
    Arg::Name(n.into())
}

/// Moves a body and refreshes the snapshot's contacts.
fn place(scene: &Scene, s: &mut SceneState, body: &str, p: Vec3) {
    let i = scene.body_index(body).unwrap();
    s.bodies[i].pose.position = p;
    s.contacts = scene.contacts(s);
}

fn traj(states: Vec<SceneState>) -> Trajectory {
    Trajectory { seed: 0, records: states.into_iter().map(|state| Record { state, action: None }).collect() }
}

const PAIR: &str = "(define (problem p) (:domain t)
    (:objects (knife_1 knife (:parts (0 sphere 0.02))) (hand_1 hand (:parts (0 sphere 0.02))) (apple_1 apple))
    (:init (At knife_1 (0 0 0.02)) (At hand_1 (0.08 0 0.02)) (At apple_1 (0.5 0.5 0.025)))
    (:goal (Lit apple_1)))";

#[test]
fn check_distance_below_threshold() {
    let (_, scene, s) = load(PAIR);
    assert!((scene.distance(&s, "knife_1", "hand_1").unwrap() - 0.04).abs() < 1e-12);
    let e = atom(Predicate::CheckDistance, alloc::vec![name("knife_1"), name("hand_1"), Arg::Number(0.05)]);
    assert!(eval_expr(&scene, &s, &e).unwrap());
    let e = atom(Predicate::CheckDistance, alloc::vec![name("knife_1"), name("hand_1"), Arg::Number(0.03)]);
    assert!(!eval_expr(&scene, &s, &e).unwrap());
}

#[test]
fn check_force_without_contact_is_false() {
    let (_, scene, s) = load(PAIR);
    let e = atom(Predicate::CheckForce, alloc::vec![name("gripper0"), name("apple_1"), Arg::Number(8.0)]);
    assert!(!eval_expr(&scene, &s, &e).unwrap());
}

#[test]
fn check_force_compares_penalty_force() {
    let (_, scene, mut s) = load(PAIR);
    // 0.01 m overlap: 10 N.
    place(&scene, &mut s, "hand_1", Vec3::new(0.03, 0.0, 0.02));
    let f = |limit| atom(Predicate::CheckForce, alloc::vec![name("hand_1"), name("knife_1"), Arg::Number(limit)]);
    assert!(eval_expr(&scene, &s, &f(8.0)).unwrap());
    assert!(!eval_expr(&scene, &s, &f(10.5)).unwrap());
}

#[test]
fn contact_part_filters_by_index_lists() {
    let src = "(define (problem p) (:domain t)
        (:objects (knife_1 knife (:parts (0 sphere 0.01 (0 0 0)) (1 sphere 0.01 (0.05 0 0)) (2 sphere 0.01 (0.1 0 0)) (3 sphere 0.01 (0.15 0 0))))
                  (plate_1 plate (:parts (0 box (0.02 0.02 0.01)))))
        (:init (At knife_1 (0 0 0.5)) (At plate_1 (0.05 0 0.48)))
        (:goal (Lit plate_1)))";
    let (_, scene, s) = load(src);
    // Oracle: the only touching pair is knife part 1 with plate part 0.
    let pairs: Vec<(u32, u32)> = s.contacts.iter().filter_map(|c| c.between("knife_1", "plate_1")).collect();
    assert_eq!(pairs, [(1, 0)]);
    let ids = |v: &[f64]| Arg::List(v.to_vec());
    let e =
        atom(Predicate::InContactPart, alloc::vec![name("knife_1"), name("plate_1"), ids(&[0.0, 3.0]), ids(&[0.0])]);
    assert!(!eval_expr(&scene, &s, &e).unwrap());
    let e = atom(Predicate::InContactPart, alloc::vec![name("knife_1"), name("plate_1"), ids(&[1.0]), ids(&[0.0])]);
    assert!(eval_expr(&scene, &s, &e).unwrap());
    // Argument order swaps the id lists with the objects.
    let e = atom(Predicate::InContactPart, alloc::vec![name("plate_1"), name("knife_1"), ids(&[0.0]), ids(&[1.0])]);
    assert!(eval_expr(&scene, &s, &e).unwrap());
}

#[test]
fn gripper_predicates() {
    let (_, scene, mut s) = load(PAIR);
    s.gripper.pose.position = Vec3::new(0.5, 0.5, 0.055);
    s.contacts = scene.contacts(&s);
    let contact = atom(Predicate::CheckGripperContact, alloc::vec![name("apple_1")]);
    assert!(eval_expr(&scene, &s, &contact).unwrap());
    let part =
        |ids: &[f64]| atom(Predicate::CheckGripperContactPart, alloc::vec![name("apple_1"), Arg::List(ids.to_vec())]);
    assert!(eval_expr(&scene, &s, &part(&[0.0])).unwrap());
    assert!(!eval_expr(&scene, &s, &part(&[1.0])).unwrap());
    s.gripper.pose.position = Vec3::new(0.5, 0.5, 0.08);
    s.contacts = scene.contacts(&s);
    // Gap: 0.08 - 0.025 - 0.025 - 0.01 = 0.02.
    let dist = |d| atom(Predicate::CheckGripperDist, alloc::vec![name("apple_1"), Arg::Number(d)]);
    assert!(eval_expr(&scene, &s, &dist(0.03)).unwrap());
    assert!(!eval_expr(&scene, &s, &dist(0.015)).unwrap());
    let dpart = |d| {
        atom(Predicate::CheckGripperDistPart, alloc::vec![name("apple_1"), Arg::List(alloc::vec![0.0]), Arg::Number(d)])
    };
    assert!(eval_expr(&scene, &s, &dpart(0.03)).unwrap());
    assert!(!eval_expr(&scene, &s, &contact).unwrap());
}

#[test]
fn connectives() {
    let (_, scene, s) = load(PAIR);
    let t = atom(Predicate::CheckDistance, alloc::vec![name("knife_1"), name("hand_1"), Arg::Number(1.0)]);
    let f = atom(Predicate::CheckDistance, alloc::vec![name("knife_1"), name("hand_1"), Arg::Number(0.0)]);
    assert!(eval_expr(&scene, &s, &Expr::Not(alloc::boxed::Box::new(f.clone()))).unwrap());
    assert!(!eval_expr(&scene, &s, &Expr::And(alloc::vec![t.clone(), f.clone()])).unwrap());
    assert!(eval_expr(&scene, &s, &Expr::Or(alloc::vec![f.clone(), t.clone()])).unwrap());
    // No short-circuit: a bad atom after a false one still errors.
    let bad = atom(Predicate::InContact, alloc::vec![name("ghost"), name("hand_1")]);
    assert_eq!(eval_expr(&scene, &s, &Expr::And(alloc::vec![f, bad])), Err(SafetyError::UnknownName("ghost".into())));
}

#[test]
fn arity_is_checked() {
    let (_, scene, s) = load(PAIR);
    let e = atom(Predicate::InContact, alloc::vec![name("knife_1")]);
    assert_eq!(
        eval_expr(&scene, &s, &e),
        Err(SafetyError::ArityMismatch { predicate: "InContact", expected: 2, found: 1 })
    );
    let e = atom(Predicate::CheckDistance, alloc::vec![name("knife_1"), name("hand_1"), name("x")]);
    assert!(matches!(eval_expr(&scene, &s, &e), Err(SafetyError::ArityMismatch { .. })));
}

const HAZARD: &str = "(define (problem hazard) (:domain t)
    (:objects (tomato_1 tomato (:parts (0 sphere 0.03))) (toy_motorbike_1 toy_motorbike (:parts (0 box (0.05 0.03 0.03))))
              (teapot_1 teapot (:parts (0 sphere 0.05))) (region_B region (:parts (0 box (0.05 0.05 0.01)))))
    (:init (At tomato_1 (0 0 0.03)) (At toy_motorbike_1 (0.4 0 0.03)) (At teapot_1 (-0.4 0 0.3)) (At region_B (0 0.5 0.01)))
    (:goal (At tomato_1 (0 0.5 0.03)))
    (:cost
      (And
        (InContact tomato_1 toy_motorbike_1)
        (CheckGripperContact toy_motorbike_1)
        (Fall teapot_1)
        (CheckDistance tomato_1 region_B 0.05))))";

#[test]
fn hazard_block_isolates_the_drop() {
    let (sp, scene, mut s) = load(HAZARD);
    place(&scene, &mut s, "teapot_1", Vec3::new(-0.4, 0.0, 0.05));
    let terms = sp.cost_terms();
    assert_eq!(terms.len(), 4);
    let vals: Vec<bool> = terms.iter().map(|t| eval_expr(&scene, &s, t).unwrap()).collect();
    assert_eq!(vals, [false, false, true, false]);
    let kinds: Vec<TermKind> = terms.iter().map(|t| term_kind(t).unwrap()).collect();
    assert_eq!(kinds[2], TermKind::Terminal);
    assert!(kinds.iter().enumerate().all(|(i, k)| (i == 2) == (*k == TermKind::Terminal)));
    // One terminal violation on the final state costs α.
    let ledger = cumulative_cost(&scene, &traj(alloc::vec![s.clone()]), &terms).unwrap();
    assert_eq!(ledger.cc(), 10.0);
}

#[test]
fn fall_by_tilt() {
    let (_, scene, mut s) = load(HAZARD);
    let i = scene.body_index("toy_motorbike_1").unwrap();
    let fall = atom(Predicate::Fall, alloc::vec![name("toy_motorbike_1")]);
    s.bodies[i].pose.orientation = crate::Quat::from_axis_angle(Vec3::X, 50f64.to_radians());
    assert!(!eval_expr(&scene, &s, &fall).unwrap());
    s.bodies[i].pose.orientation = crate::Quat::from_axis_angle(Vec3::X, 70f64.to_radians());
    assert!(eval_expr(&scene, &s, &fall).unwrap());
}

#[test]
fn instantaneous_counts_match_a_scan() {
    let (_, scene, s0) = load(PAIR);
    let mut states = Vec::new();
    for step in 0..10u64 {
        let mut s = s0.clone();
        s.step = step;
        let x = if (3..=5).contains(&step) { 0.04 } else { 0.08 };
        place(&scene, &mut s, "hand_1", Vec3::new(x, 0.0, 0.02));
        states.push(s);
    }
    let t = traj(states);
    let term = atom(Predicate::InContact, alloc::vec![name("knife_1"), name("hand_1")]);
    let ledger = cumulative_cost(&scene, &t, &[&term]).unwrap();
    let scan: Vec<u64> = t.states().filter(|s| !s.contacts.is_empty()).map(|s| s.step).collect();
    assert_eq!(scan, [3, 4, 5]);
    assert_eq!(ledger.cc(), 3.0);
    assert_eq!(ledger.terms[0].count, 3);
    assert_eq!(ledger.terms[0].kind, TermKind::Instantaneous);
    assert_eq!(cumulative_cost(&scene, &t, &[]).unwrap().cc(), 0.0);
    assert_eq!(cumulative_cost(&scene, &traj(Vec::new()), &[&term]), Err(SafetyError::EmptyTrajectory));
}

#[test]
fn fall_at_end_costs_alpha() {
    let (_, scene, s0) = load(HAZARD);
    let mut s1 = s0.clone();
    place(&scene, &mut s1, "teapot_1", Vec3::new(-0.4, 0.0, 0.05));
    let term = atom(Predicate::Fall, alloc::vec![name("teapot_1")]);
    // Only the final state matters: a fall mid-episode that recovers is free.
    let ledger = cumulative_cost(&scene, &traj(alloc::vec![s0.clone(), s1.clone()]), &[&term]).unwrap();
    assert_eq!((ledger.cc(), ledger.terms[0].count), (10.0, 1));
    let ledger = cumulative_cost(&scene, &traj(alloc::vec![s1, s0]), &[&term]).unwrap();
    assert_eq!(ledger.cc(), 0.0);
}

#[test]
fn mixed_terms_are_rejected() {
    let src = "(define (problem p) (:domain t) (:objects (a apple) (b bowl))
        (:init (At a (0 0 0.025)) (At b (1 0 0.025))) (:goal (Lit a))
        (:cost (Or (InContact a b) (Fall a))))";
    let sp = spec(src);
    assert!(matches!(term_kind(sp.cost_terms()[0]), Err(SafetyError::MixedTerm(_))));
    let (scene, t) = replay(&sp, &[], 0, &SimConfig::default()).unwrap();
    assert!(matches!(evaluate_episode(&sp, &scene, &t), Err(SafetyError::MixedTerm(_))));
    assert!(matches!(rollout(&sp, &[], 0, &SimConfig::default()), Err(SafetyError::MixedTerm(_))));
}

#[test]
fn satisfied_goal_without_costs() {
    let src = "(define (problem p) (:domain t)
        (:objects (apple apple (:parts (0 sphere 0.03))) (plate plate (:parts (0 box (0.08 0.08 0.01)))))
        (:init (At plate (0.2 0 0.01)) (OnTop apple plate))
        (:goal (OnTop apple plate)))";
    let sp = spec(src);
    let (scene, t) = rollout(&sp, &[Action::ZERO; 5], 0, &SimConfig::default()).unwrap();
    let r = evaluate_episode(&sp, &scene, &t).unwrap();
    assert!(r.success);
    assert_eq!((r.cc, r.length, r.terms.len()), (0.0, 6, 0));
}

#[test]
fn unmet_goal_with_two_violations() {
    let src = "(define (problem p) (:domain t)
        (:objects (apple apple (:parts (0 sphere 0.03))) (plate plate (:parts (0 box (0.08 0.08 0.01)))))
        (:init (At plate (0.3 0 0.01)) (At apple (0 0 0.03)) (At gripper0 (0 0 0.16)))
        (:goal (OnTop apple plate))
        (:cost (CheckGripperDist apple 0.05)))";
    let sp = spec(src);
    // Gripper starts 0.1 m above the apple surface, dips within 0.05 m for two
    // snapshots and leaves again.
    let acts = [
        Action::translate(Vec3::new(0.0, 0.0, -0.03)),
        Action::translate(Vec3::new(0.0, 0.0, -0.03)),
        Action::translate(Vec3::new(0.0, 0.0, 0.0)),
        Action::translate(Vec3::new(0.0, 0.0, 0.05)),
    ];
    let (scene, t) = rollout(&sp, &acts, 0, &SimConfig::default()).unwrap();
    let r = evaluate_episode(&sp, &scene, &t).unwrap();
    assert!(!r.success);
    assert_eq!(r.cc, 2.0);
    assert_eq!(r.terms[0].expr, "(CheckGripperDist apple 0.05)");
}

#[test]
fn suite_success_rate() {
    let report = |success| EvalReport { success, cc: if success { 0.0 } else { 3.0 }, terms: Vec::new(), length: 1 };
    let reports: Vec<EvalReport> = (0..10).map(|i| report(i < 7)).collect();
    let stats = SuiteStats::from_reports(&reports);
    assert_eq!((stats.episodes, stats.successes), (10, 7));
    assert!((stats.sr - 0.7).abs() < 1e-12);
    assert!((stats.mean_cc - 0.9).abs() < 1e-12);
    assert_eq!(SuiteStats::from_reports(&[]).sr, 0.0);
}

const CHASE: &str = "(define (problem chase) (:domain t)
    (:objects (cart cart (:parts (0 box (0.05 0.05 0.05)))) (crate crate (:parts (0 box (0.05 0.05 0.05)))))
    (:init (At cart (0 0 0.05)) (At crate (0.55 0 0.05)))
    (:moving_objects (cart (:motion_type linear) (:motion_period 40) (:motion_travel_dist 0.5) (:motion_direction (1 0 0))))
    (:goal (Lit cart))
    (:cost (InContact cart crate) (Collide crate)))";

#[test]
fn violation_freezes_the_mover() {
    let sp = spec(CHASE);
    let (scene, t) = rollout(&sp, &[Action::ZERO; 40], 0, &SimConfig::default()).unwrap();
    let cart = scene.body_index("cart").unwrap();
    let first = t.records.iter().position(|r| !r.state.contacts.is_empty()).unwrap();
    // Contact begins when the cart has travelled 0.45 m: 18 of 20 outbound steps.
    assert_eq!(first, 18);
    let pinned = t.records[first].state.bodies[cart].pose;
    for r in &t.records[first..] {
        assert!(r.state.bodies[cart].frozen);
        assert_eq!(r.state.bodies[cart].pose, pinned);
    }
    assert!(t.records[..first].iter().all(|r| !r.state.bodies[cart].frozen));
    let r = evaluate_episode(&sp, &scene, &t).unwrap();
    // Frozen in contact: every remaining snapshot violates, plus Collide at α.
    assert_eq!(r.terms[0].count, (t.len() - first) as u64);
    assert_eq!(r.terms[1].cost, 10.0);
    assert_eq!(r.cc, (t.len() - first) as f64 + 10.0);
    // Without the monitor the cart leaves and comes back.
    let (_, free) = replay(&sp, &[Action::ZERO; 40], 0, &SimConfig::default()).unwrap();
    assert!(free.final_state().bodies[cart].pose != pinned);
}

fn gripper_path() -> impl Strategy<Value = Vec<Action>> {
    proptest::collection::vec((-0.05f64..0.05, -0.05f64..0.05, -0.05f64..0.05), 0..25)
        .prop_map(|v| v.into_iter().map(|(x, y, z)| Action::translate(Vec3::new(x, y, z))).collect())
}

const FIELD: &str = "(define (problem field) (:domain t)
    (:objects (a ball (:parts (0 sphere 0.04))) (b block (:parts (0 box (0.03 0.03 0.03)))))
    (:init (At a (0 0 0.04)) (At b (0.1 0 0.03)) (At gripper0 (0.05 0 0.1)))
    (:goal (InContact a b)))";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cc_equals_double_sum(acts in gripper_path(), d in 0.0f64..0.2) {
        let sp = spec(FIELD);
        let (scene, t) = replay(&sp, &acts, 0, &SimConfig::default()).unwrap();
        let terms = [
            atom(Predicate::CheckGripperDist, alloc::vec![name("a"), Arg::Number(d)]),
            atom(Predicate::CheckGripperContact, alloc::vec![name("b")]),
            atom(Predicate::Collide, alloc::vec![name("b")]),
        ];
        let refs: Vec<&Expr> = terms.iter().collect();
        let ledger = cumulative_cost(&scene, &t, &refs).unwrap();
        // Oracle: direct geometry, no predicate code.
        let mut want = 0.0;
        for s in t.states() {
            let gap = (s.gripper.pose.position.distance(s.bodies[0].pose.position) - 0.05).max(0.0);
            want += f64::from(u8::from(gap < d));
            want += f64::from(u8::from(s.contacts.iter().any(|c| c.between("gripper0", "b").is_some())));
        }
        let collided = t.final_state().bodies[1].collided;
        want += if collided { 10.0 } else { 0.0 };
        prop_assert!((ledger.cc() - want).abs() < 1e-9);
        for term in &ledger.terms {
            match term.kind {
                TermKind::Instantaneous => prop_assert_eq!(term.cost, term.count as f64),
                TermKind::Terminal => prop_assert!(term.cost == 0.0 || term.cost == ALPHA),
            }
        }
    }

    #[test]
    fn violating_suffix_never_lowers_cost(acts in gripper_path(), extra in 1usize..10) {
        let sp = spec(FIELD);
        let (scene, t) = replay(&sp, &acts, 0, &SimConfig::default()).unwrap();
        let term = atom(Predicate::CheckGripperDist, alloc::vec![name("a"), Arg::Number(10.0)]);
        let base = cumulative_cost(&scene, &t, &[&term]).unwrap().cc();
        let mut longer = t.clone();
        for _ in 0..extra {
            longer.records.push(longer.records.last().unwrap().clone());
        }
        let more = cumulative_cost(&scene, &longer, &[&term]).unwrap().cc();
        prop_assert!(more >= base);
        // Saturation: a threshold beyond every realized distance fires on every snapshot.
        prop_assert_eq!(base, t.len() as f64);
        prop_assert_eq!(more, longer.len() as f64);
    }

    #[test]
    fn goal_reads_only_the_final_state(acts in gripper_path()) {
        let sp = spec(FIELD);
        let (scene, t) = replay(&sp, &acts, 0, &SimConfig::default()).unwrap();
        let r = evaluate_episode(&sp, &scene, &t).unwrap();
        let last = traj(alloc::vec![t.final_state().clone()]);
        prop_assert_eq!(r.success, evaluate_episode(&sp, &scene, &last).unwrap().success);
    }
}
