//! Analytic proximity tests between sphere and box primitives.

use crate::kinematics::{Pose, Quat, Vec3};
use crate::syntax::{PartDecl, Shape};

/// A part placed in the world.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    Sphere {
        center: Vec3,
        radius: f64,
    },
    /// Oriented box.
    Box {
        center: Vec3,
        half_extents: Vec3,
        orientation: Quat,
    },
}

impl Primitive {
    pub fn place(pose: &Pose, part: &PartDecl) -> Primitive {
        let center = pose.transform_point(part.offset);
        match part.shape {
            Shape::Sphere { radius } => Primitive::Sphere { center, radius },
            Shape::Box { half_extents } => Primitive::Box { center, half_extents, orientation: pose.orientation },
        }
    }

    pub fn center(&self) -> Vec3 {
        match *self {
            Primitive::Sphere { center, .. } | Primitive::Box { center, .. } => center,
        }
    }

    /// Half extents of the world-axis-aligned bounding box.
    pub fn aabb_half(&self) -> Vec3 {
        match *self {
            Primitive::Sphere { radius, .. } => Vec3::new(radius, radius, radius),
            Primitive::Box { half_extents: h, orientation: q, .. } => {
                let ax = q.rotate(Vec3::X).abs();
                let ay = q.rotate(Vec3::Y).abs();
                let az = q.rotate(Vec3::Z).abs();
                ax * h.x + ay * h.y + az * h.z
            }
        }
    }

    pub fn aabb(&self) -> (Vec3, Vec3) {
        let (c, h) = (self.center(), self.aabb_half());
        (c - h, c + h)
    }

    /// Smallest full width across the part, used as the grasp width.
    pub fn width(&self) -> f64 {
        match *self {
            Primitive::Sphere { radius, .. } => 2.0 * radius,
            Primitive::Box { half_extents, .. } => 2.0 * half_extents.min_elem(),
        }
    }
}

/// Signed separation from a point to an oriented box: positive outside,
/// negative (minus the depth to the nearest face) inside.
fn point_box(p: Vec3, center: Vec3, half: Vec3, orientation: Quat) -> f64 {
    let local = orientation.conjugate().rotate(p - center);
    let clamped =
        Vec3::new(local.x.clamp(-half.x, half.x), local.y.clamp(-half.y, half.y), local.z.clamp(-half.z, half.z));
    let outside = (local - clamped).norm();
    if outside > 0.0 {
        outside
    } else {
        let face = (half - local.abs()).min_elem();
        -face
    }
}

/// Signed surface separation between two primitives.
///
/// Positive values are gaps, negative values are penetration depths.
/// Sphere pairs and sphere/box pairs are exact; box/box pairs use the
/// world-axis-aligned bounds of both boxes, which is exact for unrotated boxes.
pub fn separation(a: &Primitive, b: &Primitive) -> f64 {
    match (*a, *b) {
        (Primitive::Sphere { center: ca, radius: ra }, Primitive::Sphere { center: cb, radius: rb }) => {
            ca.distance(cb) - (ra + rb)
        }
        (Primitive::Sphere { center, radius }, Primitive::Box { center: bc, half_extents, orientation })
        | (Primitive::Box { center: bc, half_extents, orientation }, Primitive::Sphere { center, radius }) => {
            point_box(center, bc, half_extents, orientation) - radius
        }
        (Primitive::Box { .. }, Primitive::Box { .. }) => {
            let gap = (a.center() - b.center()).abs() - (a.aabb_half() + b.aabb_half());
            if gap.x < 0.0 && gap.y < 0.0 && gap.z < 0.0 {
                gap.max_elem()
            } else {
                Vec3::new(gap.x.max(0.0), gap.y.max(0.0), gap.z.max(0.0)).norm()
            }
        }
    }
}
