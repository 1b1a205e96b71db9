//! Pose algebra and moving-object generators.

mod math;
mod motion;

pub use math::{slerp, Pose, Quat, Vec3};
pub use motion::{MotionGenerator, DEFAULT_DT};
