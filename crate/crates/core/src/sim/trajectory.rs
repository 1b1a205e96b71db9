//! Episode recording.

use alloc::vec::Vec;

use super::scene::{load_scene, Action, Generators, Scene, SceneState, SimConfig};
use super::SceneError;
use crate::syntax::TaskSpec;

/// One recorded snapshot and the action that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub state: SceneState,
    /// `None` for the initial snapshot.
    pub action: Option<Action>,
}

/// States `s_0 .. s_{L-1}` of one episode. Never empty.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub records: Vec<Record>,
}

impl Trajectory {
    /// Episode length L.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = &SceneState> + '_ {
        self.records.iter().map(|r| &r.state)
    }

    pub fn final_state(&self) -> &SceneState {
        &self.records.last().expect("trajectory is never empty").state
    }
}

/// Hook run on every snapshot before it is recorded, starting with step 0.
pub trait StepMonitor {
    fn observe(&mut self, scene: &Scene, state: &mut SceneState, gens: &mut Generators);
}

/// Monitor that does nothing.
pub struct NoMonitor;

impl StepMonitor for NoMonitor {
    fn observe(&mut self, _: &Scene, _: &mut SceneState, _: &mut Generators) {}
}

/// Loads `spec` and applies `actions`, stopping after `config.max_steps` steps.
pub fn replay(
    spec: &TaskSpec,
    actions: &[Action],
    seed: u64,
    config: &SimConfig,
) -> Result<(Scene, Trajectory), SceneError> {
    replay_with(spec, actions, seed, config, &mut NoMonitor)
}

pub fn replay_with(
    spec: &TaskSpec,
    actions: &[Action],
    seed: u64,
    config: &SimConfig,
    monitor: &mut dyn StepMonitor,
) -> Result<(Scene, Trajectory), SceneError> {
    let (scene, mut state, mut gens) = load_scene(spec, seed, config)?;
    monitor.observe(&scene, &mut state, &mut gens);
    let n = actions.len().min(config.max_steps);
    let mut records = Vec::with_capacity(n + 1);
    records.push(Record { state: state.clone(), action: None });
    for action in &actions[..n] {
        let mut next = scene.step(&state, action, &gens);
        monitor.observe(&scene, &mut next, &mut gens);
        records.push(Record { state: next.clone(), action: Some(*action) });
        state = next;
    }
    Ok((scene, Trajectory { seed, records }))
}
