//! Analytic contact model and episode replay.
//!
//! Bodies are unions of sphere and box parts placed kinematically: moving
//! objects follow their generators, a grasped object follows the gripper,
//! everything else stays put. Contacts come from signed separations between
//! parts, and the contact force is a linear penalty on penetration depth.

mod geometry;
mod scene;
mod trajectory;

use alloc::string::String;

pub use geometry::{separation, Primitive};
pub use scene::{
    load_scene, Action, Body, BodyState, ContactEvent, EntityId, Generators, Grasp, GripperState, Scene, SceneState,
    SimConfig,
};
pub use trajectory::{replay, replay_with, NoMonitor, Record, StepMonitor, Trajectory};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SceneError {
    #[error("unknown object `{0}`")]
    UnknownName(String),
    #[error("`{0}` is not a moving object")]
    NotAMover(String),
    #[error("`{0}` cannot be used in :init")]
    BadInit(&'static str),
}
