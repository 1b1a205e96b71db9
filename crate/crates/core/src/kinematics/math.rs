//! Small fixed-size vector and quaternion types.

use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use libm::{acos, atan2, cos, fabs, sin, sqrt};

/// Cartesian 3-vector, meters unless stated otherwise.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm(self) -> f64 {
        sqrt(self.dot(self))
    }

    /// Unit vector in the same direction, or zero for the zero vector.
    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            Vec3::ZERO
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn abs(self) -> Vec3 {
        Vec3::new(fabs(self.x), fabs(self.y), fabs(self.z))
    }

    pub fn max_elem(self) -> f64 {
        self.x.max(self.y).max(self.z)
    }

    pub fn min_elem(self) -> f64 {
        self.x.min(self.y).min(self.z)
    }

    pub fn component_min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn component_max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Rotation quaternion `w + xi + yj + zk`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for Quat {
    fn default() -> Self {
        Quat::IDENTITY
    }
}

/// Below this angle slerp falls back to normalized lerp.
const SLERP_EPS: f64 = 1e-6;

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat { w, x, y, z }
    }

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Quat {
        let a = axis.normalized();
        let (s, c) = (sin(angle / 2.0), cos(angle / 2.0));
        Quat::new(c, a.x * s, a.y * s, a.z * s)
    }

    /// Rotation vector (axis times angle in radians) to quaternion.
    pub fn from_rotation_vector(v: Vec3) -> Quat {
        let angle = v.norm();
        if angle == 0.0 {
            Quat::IDENTITY
        } else {
            Quat::from_axis_angle(v, angle)
        }
    }

    /// Orientation whose local +x axis points along `dir`, with world +z as the
    /// up reference. Returns `None` for a zero direction.
    pub fn facing(dir: Vec3) -> Option<Quat> {
        let n = dir.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        let d = dir * (1.0 / n);
        let yaw = atan2(d.y, d.x);
        let pitch = -libm::asin(d.z.clamp(-1.0, 1.0));
        Some(Quat::from_axis_angle(Vec3::Z, yaw) * Quat::from_axis_angle(Vec3::Y, pitch))
    }

    pub fn dot(self, o: Quat) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn normalized(self) -> Quat {
        let n = self.norm();
        if n > 0.0 {
            self.scale(1.0 / n)
        } else {
            Quat::IDENTITY
        }
    }

    pub fn conjugate(self) -> Quat {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    fn scale(self, s: f64) -> Quat {
        Quat::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    fn add(self, o: Quat) -> Quat {
        Quat::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v) * 2.0;
        v + t * self.w + u.cross(t)
    }

    /// Rotation angle in `[0, π]` between two orientations.
    pub fn angle_to(self, o: Quat) -> f64 {
        let d = fabs(self.dot(o)).min(1.0);
        2.0 * acos(d)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn to_rotation_vector(self) -> Vec3 {
        let q = if self.w < 0.0 { self.scale(-1.0) } else { self };
        let s = sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
        if s == 0.0 {
            return Vec3::ZERO;
        }
        let angle = 2.0 * atan2(s, q.w);
        Vec3::new(q.x, q.y, q.z) * (angle / s)
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// Spherical linear interpolation along the shortest arc.
///
/// `t` is clamped to `[0, 1]`. Antipodal inputs are resolved by negating `b`;
/// nearly identical inputs use normalized linear interpolation.
pub fn slerp(a: Quat, b: Quat, t: f64) -> Quat {
    let t = t.clamp(0.0, 1.0);
    if t == 0.0 {
        return a;
    }
    let mut b = b;
    let mut d = a.dot(b);
    if d < 0.0 {
        b = b.scale(-1.0);
        d = -d;
    }
    if t == 1.0 {
        return b;
    }
    let theta = acos(d.min(1.0));
    if theta < SLERP_EPS {
        return a.scale(1.0 - t).add(b.scale(t)).normalized();
    }
    let s = sin(theta);
    let wa = sin((1.0 - t) * theta) / s;
    let wb = sin(t * theta) / s;
    a.scale(wa).add(b.scale(wb)).normalized()
}

/// Position plus unit orientation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose {
    pub position: Vec3,
    pub orientation: Quat,
}

impl Pose {
    pub fn new(position: Vec3, orientation: Quat) -> Self {
        Pose { position, orientation }
    }

    pub fn from_position(position: Vec3) -> Self {
        Pose { position, orientation: Quat::IDENTITY }
    }

    /// Maps a point in this pose's local frame to world coordinates.
    pub fn transform_point(&self, local: Vec3) -> Vec3 {
        self.position + self.orientation.rotate(local)
    }

    pub fn inverse_transform_point(&self, world: Vec3) -> Vec3 {
        self.orientation.conjugate().rotate(world - self.position)
    }

    /// `self ∘ other`: `other` expressed in this frame, lifted to world.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            position: self.transform_point(other.position),
            orientation: (self.orientation * other.orientation).normalized(),
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.orientation.conjugate();
        Pose { position: inv.rotate(-self.position), orientation: inv }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    use proptest::prelude::*;

    fn close(a: Quat, b: Quat, tol: f64) -> bool {
        a.angle_to(b) < tol && (a.norm() - 1.0).abs() < 1e-12
    }

    #[test]
    fn slerp_identity_case() {
        let q = Quat::from_axis_angle(Vec3::new(1.0, 2.0, 3.0), 0.7);
        let m = slerp(q, q, 0.5);
        assert!(close(m, q, 1e-12));
    }

    #[test]
    fn slerp_midpoint_of_quarter_turn() {
        let m = slerp(Quat::IDENTITY, Quat::from_axis_angle(Vec3::Z, FRAC_PI_2), 0.5);
        let want = Quat::from_axis_angle(Vec3::Z, FRAC_PI_4);
        assert!((m.w - want.w).abs() < 1e-9 && (m.z - want.z).abs() < 1e-9);
        assert!(m.x.abs() < 1e-12 && m.y.abs() < 1e-12);
    }

    #[test]
    fn slerp_quarter_of_half_turn_matches_axis_angle_interpolation() {
        // Oracle: interpolate the angle directly about the fixed axis.
        let b = Quat::from_axis_angle(Vec3::X, PI);
        for &t in &[0.1, 0.25, 0.5, 0.9] {
            let want = Quat::from_axis_angle(Vec3::X, t * PI);
            let got = slerp(Quat::IDENTITY, b, t);
            assert!((got.w - want.w).abs() < 1e-9 && (got.x - want.x).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn slerp_endpoints_and_antipodes() {
        let a = Quat::from_axis_angle(Vec3::Y, 0.3);
        let b = Quat::from_axis_angle(Vec3::Y, 1.1);
        assert_eq!(slerp(a, b, 0.0), a);
        assert!(close(slerp(a, b, 1.0), b, 1e-12));
        // -b is the same rotation; the path must stay short.
        let neg = Quat::new(-b.w, -b.x, -b.y, -b.z);
        let m = slerp(a, neg, 0.5);
        assert!(close(m, Quat::from_axis_angle(Vec3::Y, 0.7), 1e-9));
    }

    #[test]
    fn facing_points_x_axis_along_direction() {
        for d in [Vec3::X, Vec3::Y, Vec3::new(1.0, 1.0, 0.0), Vec3::new(0.0, 1.0, 1.0), Vec3::new(-1.0, 0.2, -0.4)] {
            let q = Quat::facing(d).unwrap();
            let fwd = q.rotate(Vec3::X);
            assert!((fwd - d.normalized()).norm() < 1e-12, "{d:?} -> {fwd:?}");
        }
        assert!(Quat::facing(Vec3::ZERO).is_none());
    }

    #[test]
    fn rotation_vector_round_trip() {
        let v = Vec3::new(0.1, -0.4, 0.25);
        let back = Quat::from_rotation_vector(v).to_rotation_vector();
        assert!((back - v).norm() < 1e-12);
    }

    fn unit_quat() -> impl Strategy<Value = Quat> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("non-degenerate", |(w, x, y, z)| w * w + x * x + y * y + z * z > 1e-3)
            .prop_map(|(w, x, y, z)| Quat::new(w, x, y, z).normalized())
    }

    proptest! {
        #[test]
        fn slerp_angle_is_linear_in_t(a in unit_quat(), b in unit_quat(), t in 0.0f64..=1.0) {
            let total = a.angle_to(b);
            prop_assume!(total > 1e-3 && total < PI - 1e-3);
            let m = slerp(a, b, t);
            prop_assert!((m.norm() - 1.0).abs() < 1e-9);
            prop_assert!((a.angle_to(m) - t * total).abs() < 1e-9);
        }

        #[test]
        fn rotate_preserves_length(q in unit_quat(), x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0) {
            let v = Vec3::new(x, y, z);
            prop_assert!((q.rotate(v).norm() - v.norm()).abs() < 1e-9);
        }
    }
}
