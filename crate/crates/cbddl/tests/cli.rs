//! End-to-end runs of the `cbddl` binary against the shared fixtures.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn task(name: &str) -> PathBuf {
    fixtures().join("tasks").join(format!("{name}.cbddl"))
}

fn cbddl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbddl")).args(args).env_remove("CBDDL_LEXICON").output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn evaluate(out: &Path, extra: &[&str]) -> Output {
    let suite = fixtures().join("suite");
    let (manifest, actions) = (suite.join("manifest.json"), suite.join("actions"));
    let mut args = vec!["evaluate", s(&manifest), "--actions", s(&actions)];
    args.extend(["--out", s(out)]);
    args.extend(extra);
    cbddl(&args)
}

#[test]
fn validate_clean_corpus() {
    let o = cbddl(&["validate", s(&fixtures().join("tasks"))]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o), "");
}

#[test]
fn validate_unknown_predicate_reports_one_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cbddl");
    fs::write(&bad, "(define (problem p) (:domain d)\n  (:objects (a thing))\n  (:goal (Flying a)))\n").unwrap();
    let o = cbddl(&["validate", s(&bad)]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.starts_with(&format!("{}:3:11: error: unknown predicate Flying", bad.display())), "{text}");
}

#[test]
fn validate_mixed_batch_reports_only_invalid_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.cbddl");
    fs::write(&bad, "(define (problem p) (:domain d) (:objects (a thing)) (:goal (OnTop a ghost)))").unwrap();
    let good = task("static_obstacles_l0");
    let o = cbddl(&["validate", s(&good), s(&bad), s(&task("long_horizon_l0"))]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.lines().count() >= 1);
    assert!(text.lines().all(|l| l.starts_with(s(&bad))), "{text}");
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(code(&cbddl(&[])), 1);
    assert_eq!(code(&cbddl(&["replay", s(&task("static_obstacles_l0"))])), 1);
    assert_eq!(code(&cbddl(&["replay", s(&task("static_obstacles_l0")), "--actions", "/nonexistent.jsonl"])), 1);
    assert_eq!(code(&cbddl(&["validate", "/nonexistent.cbddl"])), 1);
    assert_eq!(code(&cbddl(&["--version"])), 0);
}

#[test]
fn unwritable_output_is_internal_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = evaluate(&blocker.join("out"), &[]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn evaluate_matches_golden_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = evaluate(dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let golden = fs::read(fixtures().join("suite/golden/suite.csv")).unwrap();
    assert_eq!(fs::read(dir.path().join("suite.csv")).unwrap(), golden);
    assert!(!dir.path().join("errors.txt").exists());
}

#[test]
fn evaluate_reports_hand_computed_costs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&evaluate(dir.path(), &["--episodes", "3"])), 0);
    let read = |name: &str| -> serde_json::Value {
        serde_json::from_str(&fs::read_to_string(dir.path().join(format!("{name}.json"))).unwrap()).unwrap()
    };
    let ok = read("static_obstacles_l0");
    assert_eq!(ok["episodes"].as_array().unwrap().len(), 3);
    assert!(ok["episodes"].as_array().unwrap().iter().all(|e| e["success"] == true && e["cc"] == 0.0));
    // Gripper sweeps x = 0, 0.05, ..., 0.6 at 0.05 m from the candle's axis:
    // center distance < 0.13 exactly when |x - 0.3| < 0.12, i.e. 5 snapshots.
    let hazard = read("hazard_avoidance_l0");
    for e in hazard["episodes"].as_array().unwrap() {
        assert_eq!(e["cc"], 5.0);
        assert_eq!(e["terms"][0]["count"], 5);
        assert_eq!(e["length"], 13);
    }
}

#[test]
fn evaluate_is_independent_of_worker_count() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(code(&evaluate(a.path(), &["--jobs", "1", "--jitter", "0.003"])), 0);
    assert_eq!(code(&evaluate(b.path(), &["--jobs", "4", "--jitter", "0.003"])), 0);
    for f in ["suite.csv", "static_obstacles_l0.json", "hazard_avoidance_l0.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn evaluate_continues_past_missing_actions() {
    let dir = tempfile::tempdir().unwrap();
    let actions = dir.path().join("actions");
    fs::create_dir(&actions).unwrap();
    fs::copy(fixtures().join("suite/actions/static_obstacles_l0.jsonl"), actions.join("static_obstacles_l0.jsonl"))
        .unwrap();
    let out = dir.path().join("out");
    let manifest = fixtures().join("suite/manifest.json");
    let o = cbddl(&["evaluate", s(&manifest), "--actions", s(&actions), "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    let errors = fs::read_to_string(out.join("errors.txt")).unwrap();
    assert_eq!(errors.lines().count(), 1);
    assert!(errors.contains("hazard_avoidance_l0.jsonl"), "{errors}");
    let csv = fs::read_to_string(out.join("suite.csv")).unwrap();
    assert_eq!(csv, "task,level,episodes,sr,mean_cc\nstatic_obstacles_l0,L0,10,1,0\n");
}

#[test]
fn report_rebuilds_suite_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&evaluate(dir.path(), &[])), 0);
    let o = cbddl(&["report", s(dir.path())]);
    assert_eq!(code(&o), 0);
    // Reports are read in file-name order.
    assert_eq!(
        stdout(&o),
        "task,level,episodes,sr,mean_cc\nhazard_avoidance_l0,L0,10,1,5\nstatic_obstacles_l0,L0,10,1,0\n"
    );
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(code(&cbddl(&["report", s(empty.path())])), 1);
}

#[test]
fn replay_emits_one_record_per_snapshot() {
    let actions = fixtures().join("suite/actions/hazard_avoidance_l0.jsonl");
    let o = cbddl(&["replay", s(&task("hazard_avoidance_l0")), "--actions", s(&actions)]);
    assert_eq!(code(&o), 0);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 13);
    assert!(lines[0]["action"].is_null());
    assert_eq!(lines[12]["step"], 12);
    let x = lines[12]["gripper"]["pos"][0].as_f64().unwrap();
    assert!((x - 0.6).abs() < 1e-12);
    // A replay file is itself a valid action file.
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("traj.jsonl");
    fs::write(&traj, stdout(&o)).unwrap();
    let again = cbddl(&["replay", s(&task("hazard_avoidance_l0")), "--actions", s(&traj)]);
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn perturb_language_levels() {
    let t = task("static_obstacles_l0");
    let w0 = cbddl(&["perturb", s(&t), "--w", "0"]);
    assert_eq!(code(&w0), 0);
    assert_eq!(stdout(&w0), "Pick the apple and put it on the bowl\n");
    let a = cbddl(&["perturb", s(&t), "--w", "1", "--seed", "9"]);
    let b = cbddl(&["perturb", s(&t), "--w", "1", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(stdout(&a), stdout(&w0));
    let short = cbddl(&["perturb", s(&task("long_horizon_l0")), "--w", "1"]);
    assert_eq!(code(&short), 1);
    assert!(String::from_utf8_lossy(&short.stderr).contains("slot"));
}

#[test]
fn perturb_visual_level_two_has_lighting_and_color_only() {
    let o = cbddl(&["perturb", s(&task("static_obstacles_l0")), "--v", "2", "--seed", "4"]);
    assert_eq!(code(&o), 0);
    let p: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(p["level"], "V2");
    assert!(p["brightness"].as_f64().unwrap() != 0.0);
    assert_eq!(p["object_colors"].as_array().unwrap().len(), 2);
    assert_eq!(p["camera_offset"], serde_json::json!({"x": 0.0, "y": 0.0, "z": 0.0}));
    assert!(p["noise"].is_null());
}

fn write_ppm(path: &Path, w: usize, h: usize) -> Vec<u8> {
    let mut bytes = format!("P6\n# test pattern\n{w} {h}\n255\n").into_bytes();
    bytes.extend((0..w * h * 3).map(|i| (i * 37 % 256) as u8));
    fs::write(path, &bytes).unwrap();
    bytes
}

#[test]
fn perturb_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("in.ppm");
    write_ppm(&img, 16, 8);
    let out = dir.path().join("out");
    let t = task("static_obstacles_l0");
    let o = cbddl(&["perturb", s(&t), "--w", "2", "--v", "4", "--image", s(&img), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(out.join("instruction.txt")).unwrap().ends_with('\n'));
    let p: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("profile.json")).unwrap()).unwrap();
    assert_eq!(p["noise"], serde_json::json!([0.0, 0.085]));
    let perturbed = fs::read(out.join("image.ppm")).unwrap();
    assert!(perturbed.starts_with(b"P6\n16 8\n255\n"));
    assert_eq!(perturbed.len(), "P6\n16 8\n255\n".len() + 16 * 8 * 3);
}

#[test]
fn perturb_level_zero_image_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("in.ppm");
    write_ppm(&img, 5, 3);
    let out = dir.path().join("out");
    let o = cbddl(&["perturb", s(&task("state_preservation_l0")), "--v", "0", "--image", s(&img), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let mut canonical = b"P6\n5 3\n255\n".to_vec();
    canonical.extend((0..45).map(|i| (i * 37 % 256) as u8));
    assert_eq!(fs::read(out.join("image.ppm")).unwrap(), canonical);
}

#[test]
fn lexicon_override_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let lex = dir.path().join("lex.tsv");
    fs::write(&lex, "apple\tquince\nbowl\tdish\n").unwrap();
    let t = task("static_obstacles_l0");
    let o = Command::new(env!("CARGO_BIN_EXE_cbddl"))
        .args(["perturb", s(&t), "--w", "2"])
        .env("CBDDL_LEXICON", &lex)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "Pick the quince and put it on the dish\n");
    let o = Command::new(env!("CARGO_BIN_EXE_cbddl"))
        .args(["perturb", s(&t), "--w", "1"])
        .env("CBDDL_LEXICON", dir.path().join("missing.tsv"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn diversity_duplicate_task_has_zero_distance() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (task("cautious_grasp_l0"), task("task_workflows_l0"));
    let o = cbddl(&["diversity", s(&a), s(&b), s(&a), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_csv(&dir.path().join("matrix.csv"));
    assert_eq!(m[0], ["task", "cautious_grasp_l0", "task_workflows_l0", "cautious_grasp_l0"]);
    assert_eq!(m[1][3], "0");
    assert_eq!(m[3][1], "0");
    assert_ne!(m[1][2], "0");
    let layout = read_csv(&dir.path().join("layout.csv"));
    assert_eq!(layout.len(), 4);
}

#[test]
fn diversity_is_seed_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let tasks = fixtures().join("tasks");
    assert_eq!(code(&cbddl(&["diversity", s(&tasks), "--out", s(a.path()), "--seed", "5", "--jobs", "1"])), 0);
    assert_eq!(code(&cbddl(&["diversity", s(&tasks), "--out", s(b.path()), "--seed", "5", "--jobs", "3"])), 0);
    for f in ["matrix.csv", "layout.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn diversity_suites_cluster() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cbddl(&["diversity", s(&fixtures().join("tasks")), "--out", s(dir.path())])), 0);
    let m = read_csv(&dir.path().join("matrix.csv"));
    let names = &m[0][1..];
    // Fixture names are `<suite>_l<level>`.
    let suite = |n: &str| n.rsplit_once('_').unwrap().0.to_string();
    assert_eq!(names.iter().map(|n| suite(n)).collect::<std::collections::BTreeSet<_>>().len(), 11);
    let (mut intra, mut inter) = (Vec::new(), Vec::new());
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let d: f64 = m[i + 1][j + 1].parse().unwrap();
            if suite(&names[i]) == suite(&names[j]) {
                intra.push(d)
            } else {
                inter.push(d)
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean(&intra) < mean(&inter), "intra {} inter {}", mean(&intra), mean(&inter));
}

#[test]
fn diversity_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cbddl");
    fs::write(&bad, "(define (problem").unwrap();
    let out = dir.path().join("out");
    assert_eq!(code(&cbddl(&["diversity", s(&task("long_horizon_l0")), s(&bad), "--out", s(&out)])), 1);
    assert_eq!(code(&cbddl(&["diversity", s(&task("long_horizon_l0")), "--out", s(&out)])), 1);
    let cm = dir.path().join("cm.json");
    fs::write(&cm, r#"{"weights": {"Task": -1}}"#).unwrap();
    let (a, b) = (task("long_horizon_l0"), task("long_horizon_l2"));
    assert_eq!(code(&cbddl(&["diversity", s(&a), s(&b), "--out", s(&out), "--cost-model", s(&cm)])), 1);
    fs::write(&cm, r#"{"weights": {"Task": 8}, "update_base": 0.5}"#).unwrap();
    assert_eq!(code(&cbddl(&["diversity", s(&a), s(&b), "--out", s(&out), "--cost-model", s(&cm)])), 0);
}
