//! Kinematic motion generators for moving objects.
//!
//! Every generator is a pure function of the step index: the pose at step `n`
//! never depends on earlier calls.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use libm::{cos, sin};

use super::math::{slerp, Pose, Quat, Vec3};
use crate::syntax::{Motion, MotionSpec};

/// Seconds per simulation step.
pub const DEFAULT_DT: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct MotionGenerator {
    motion: Motion,
    initial: Pose,
    dt: f64,
    /// Orientation at each waypoint, resolved once at bind time.
    waypoint_orientations: Vec<Quat>,
}

impl MotionGenerator {
    /// Binds `spec` to the pose the object had at episode start.
    pub fn new(spec: &MotionSpec, initial: Pose, dt: f64) -> Self {
        let waypoint_orientations = match &spec.motion {
            Motion::Waypoints { waypoints, .. } => {
                let mut prev = initial.orientation;
                waypoints
                    .iter()
                    .map(|w| {
                        prev = Quat::facing(w.direction).unwrap_or(prev);
                        prev
                    })
                    .collect()
            }
            _ => Vec::new(),
        };
        MotionGenerator { motion: spec.motion.clone(), initial, dt, waypoint_orientations }
    }

    pub fn motion(&self) -> &Motion {
        &self.motion
    }

    pub fn initial_pose(&self) -> Pose {
        self.initial
    }

    pub fn pose_at(&self, step: u64) -> Pose {
        let p0 = self.initial.position;
        let q0 = self.initial.orientation;
        match &self.motion {
            Motion::Linear { period, travel_dist, direction } => {
                let period = u64::from(*period).max(1);
                let phase = (step % period) as f64;
                let half = period as f64 / 2.0;
                // Triangle wave: out during the first half, back during the second.
                let s = if phase <= half { phase / half } else { (period as f64 - phase) / half };
                Pose::new(p0 + direction.normalized() * (travel_dist * s), q0)
            }
            Motion::Circular { center, period } => {
                let period = u64::from(*period).max(1);
                let phi = TAU * (step % period) as f64 / period as f64;
                let (s, c) = (sin(phi), cos(phi));
                let off = p0 - *center;
                let rotated = Vec3::new(off.x * c - off.y * s, off.x * s + off.y * c, off.z);
                Pose::new(*center + rotated, q0)
            }
            Motion::Waypoints { waypoints, period } => {
                let per = u64::from(*period).max(1);
                let last = waypoints.len().saturating_sub(1);
                if waypoints.is_empty() {
                    return self.initial;
                }
                let seg = (step / per) as usize;
                if seg >= last {
                    return Pose::new(waypoints[last].position, self.waypoint_orientations[last]);
                }
                let t = (step % per) as f64 / per as f64;
                let (a, b) = (&waypoints[seg], &waypoints[seg + 1]);
                let (qa, qb) = (self.waypoint_orientations[seg], self.waypoint_orientations[seg + 1]);
                let position = if t == 0.0 { a.position } else { a.position.lerp(b.position, t) };
                Pose::new(position, slerp(qa, qb, t))
            }
            Motion::Projectile { initial_speed, direction, gravity } => {
                let t = step as f64 * self.dt;
                let v0 = direction.normalized() * *initial_speed;
                Pose::new(p0 + v0 * t + *gravity * (0.5 * t * t), q0)
            }
        }
    }
}
