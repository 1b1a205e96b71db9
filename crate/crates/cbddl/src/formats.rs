//! On-disk formats: trajectories, action files, reports, CSV tables and PPM images.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cbddl_core::diversity::{DistanceMatrix, Layout};
use cbddl_core::perturb::ImageBuffer;
use cbddl_core::safety::{EvalReport, SuiteStats};
use cbddl_core::sim::{Action, Scene, Trajectory};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// One JSON object per snapshot:
/// `{"step", "gripper", "objects": {name: {"pos","quat","frozen"}}, "action", "contacts"}`.
pub fn trajectory_records(scene: &Scene, traj: &Trajectory) -> Vec<Value> {
    traj.records
        .iter()
        .map(|r| {
            let s = &r.state;
            let objects: serde_json::Map<String, Value> = scene
                .bodies()
                .iter()
                .zip(&s.bodies)
                .map(|(b, st)| {
                    let v = json!({
                        "pos": st.pose.position.to_array(),
                        "quat": st.pose.orientation.to_array(),
                        "frozen": st.frozen,
                    });
                    (b.name.clone(), v)
                })
                .collect();
            let grasped = s.gripper.grasp.map(|g| scene.bodies()[g.body].name.clone());
            let contacts: Vec<Value> = s
                .contacts
                .iter()
                .map(|c| {
                    json!({"a": c.a, "a_part": c.a_part, "b": c.b, "b_part": c.b_part, "depth": c.depth, "force": c.force})
                })
                .collect();
            json!({
                "step": s.step,
                "gripper": {
                    "pos": s.gripper.pose.position.to_array(),
                    "quat": s.gripper.pose.orientation.to_array(),
                    "aperture": s.gripper.aperture,
                    "grasped": grasped,
                },
                "objects": objects,
                "action": r.action.map(|a| a.to_array()),
                "contacts": contacts,
            })
        })
        .collect()
}

pub fn write_trajectory(out: &mut dyn Write, scene: &Scene, traj: &Trajectory) -> Result<()> {
    for rec in trajectory_records(scene, traj) {
        serde_json::to_writer(&mut *out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn action_from(v: &Value) -> Result<Option<Action>> {
    let arr = match v {
        Value::Null => return Ok(None),
        Value::Array(a) => a,
        Value::Object(o) => return o.get("action").map_or(Ok(None), action_from),
        _ => bail!("expected an action array or a trajectory record"),
    };
    let nums: Vec<f64> = arr
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| anyhow!("action entries must be numbers")))
        .collect::<Result<_>>()?;
    let fixed: [f64; 7] = nums.try_into().map_err(|v: Vec<f64>| anyhow!("action needs 7 numbers, got {}", v.len()))?;
    if fixed.iter().any(|x| !x.is_finite()) {
        bail!("action entries must be finite");
    }
    Ok(Some(Action::from_array(fixed)))
}

/// Reads actions from JSON Lines. Each line is either a bare 7-number array or
/// a trajectory record whose `action` field is used; `null` actions and blank
/// lines are skipped.
pub fn read_actions(reader: impl BufRead) -> Result<Vec<Action>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line).with_context(|| format!("line {}", n + 1))?;
        if let Some(a) = action_from(&v).with_context(|| format!("line {}", n + 1))? {
            out.push(a);
        }
    }
    Ok(out)
}

pub fn read_actions_file(path: &Path) -> Result<Vec<Action>> {
    let f = std::fs::File::open(path).with_context(|| format!("cannot open action file {}", path.display()))?;
    read_actions(std::io::BufReader::new(f)).with_context(|| format!("in {}", path.display()))
}

/// Per-task evaluation output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: String,
    pub level: String,
    pub episodes: Vec<EvalReport>,
}

impl TaskReport {
    pub fn stats(&self) -> SuiteStats {
        SuiteStats::from_reports(&self.episodes)
    }
}

/// `task,level,episodes,sr,mean_cc`, one row per task.
pub fn write_suite_csv(out: impl Write, reports: &[TaskReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["task", "level", "episodes", "sr", "mean_cc"])?;
    for r in reports {
        let s = r.stats();
        w.write_record([
            r.task.clone(),
            r.level.clone(),
            s.episodes.to_string(),
            s.sr.to_string(),
            s.mean_cc.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Header `task,<name>...`, then one row per task.
pub fn write_matrix_csv(out: impl Write, names: &[String], m: &DistanceMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["task".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for (i, name) in names.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend(m.row(i).iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_layout_csv(out: impl Write, names: &[String], layout: &Layout) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["task", "x", "y"])?;
    for (name, p) in names.iter().zip(&layout.points) {
        w.write_record([name.clone(), p[0].to_string(), p[1].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Cost model file: `{"weights": {"Task": 4, ...}, "update_base": 1}`.
/// Kinds left out keep their default weight.
pub fn read_cost_model(path: &Path) -> Result<cbddl_core::diversity::CostModel> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct File {
        #[serde(default)]
        weights: BTreeMap<cbddl_core::diversity::NodeKind, f64>,
        update_base: Option<f64>,
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let f: File = serde_json::from_str(&text).with_context(|| format!("bad cost model {}", path.display()))?;
    let mut cm = cbddl_core::diversity::CostModel::default();
    cm.weights.extend(f.weights);
    if let Some(b) = f.update_base {
        cm.update_base = b;
    }
    cm.validate().with_context(|| format!("bad cost model {}", path.display()))?;
    Ok(cm)
}

/// Reads a binary PPM (P6, maxval 255).
pub fn read_ppm(path: &Path) -> Result<ImageBuffer> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    if !bytes.starts_with(b"P6") {
        bail!("{} is not a binary PPM (P6)", path.display());
    }
    let img = image::load_from_memory_with_format(&bytes, image::ImageFormat::Pnm)
        .with_context(|| format!("cannot decode {}", path.display()))?;
    if !matches!(img, image::DynamicImage::ImageRgb8(_)) {
        bail!("{} must be 8-bit RGB", path.display());
    }
    let rgb = img.into_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    Ok(ImageBuffer::new(w, h, rgb.into_raw())?)
}

/// Encodes a binary PPM with the header `P6\n<w> <h>\n255\n`.
pub fn encode_ppm(img: &ImageBuffer) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actions_accept_arrays_and_records() {
        let text =
            "[0.01,0,0,0,0,0,-0.02]\n\n{\"step\":0,\"action\":null}\n{\"step\":1,\"action\":[0,0,-0.05,0,0,0,0]}\n";
        let acts = read_actions(text.as_bytes()).unwrap();
        assert_eq!(acts.len(), 2);
        assert_eq!(acts[0].grip, -0.02);
        assert_eq!(acts[1].translation.z, -0.05);
        assert!(read_actions("[1,2,3]".as_bytes()).is_err());
        assert!(read_actions("nope".as_bytes()).is_err());
    }

    #[test]
    fn ppm_round_trip() {
        let img = ImageBuffer::new(3, 2, (0..18).collect()).unwrap();
        let bytes = encode_ppm(&img);
        assert!(bytes.starts_with(b"P6"));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.ppm");
        std::fs::write(&p, &bytes).unwrap();
        assert_eq!(read_ppm(&p).unwrap(), img);
    }

    #[test]
    fn suite_csv_columns() {
        let ep = |success, cc| EvalReport { success, cc, terms: vec![], length: 3 };
        let r = TaskReport { task: "t".into(), level: "L1".into(), episodes: vec![ep(true, 0.0), ep(false, 3.0)] };
        let mut out = Vec::new();
        write_suite_csv(&mut out, &[r]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "task,level,episodes,sr,mean_cc\nt,L1,2,0.5,1.5\n");
    }
}
