//! Truth values of atoms and expressions on a single snapshot.

use alloc::string::ToString;
use alloc::vec::Vec;

use libm::acos;

use super::SafetyError;
use crate::kinematics::Vec3;
use crate::sim::{EntityId, Scene, SceneState};
use crate::syntax::{Arg, ArgKind, Atom, Expr, Predicate};

/// A terminal `Fall` needs the lowest point to drop at least this far, in meters.
pub const FALL_DROP: f64 = 0.05;
/// Tilt of the up axis, in degrees, that also counts as a fall.
pub const FALL_TILT_DEG: f64 = 60.0;
/// Lateral slack around a support's footprint for "on" relations, in meters.
pub const ON_LATERAL_TOLERANCE: f64 = 0.02;
/// Position tolerance of a goal `At`, in meters.
pub const AT_TOLERANCE: f64 = 0.01;

fn check_schema(atom: &Atom) -> Result<(), SafetyError> {
    let schema = atom.predicate.schema();
    let arity = || SafetyError::ArityMismatch {
        predicate: atom.predicate.name(),
        expected: schema.len(),
        found: atom.args.len(),
    };
    if schema.len() != atom.args.len() {
        return Err(arity());
    }
    let fits = schema.iter().zip(&atom.args).all(|(k, a)| match (k, a) {
        (ArgKind::Entity, Arg::Name(_)) | (ArgKind::Number, Arg::Number(_)) | (ArgKind::Ids, Arg::List(_)) => true,
        (ArgKind::Vec3, Arg::List(l)) => l.len() == 3,
        _ => false,
    });
    if fits {
        Ok(())
    } else {
        Err(arity())
    }
}

struct View<'a> {
    scene: &'a Scene,
    state: &'a SceneState,
}

impl View<'_> {
    fn entity(&self, arg: &Arg) -> Result<EntityId, SafetyError> {
        let name = arg.as_name().unwrap_or_default();
        self.scene.resolve(name).map_err(|_| SafetyError::UnknownName(name.to_string()))
    }

    fn body(&self, arg: &Arg) -> Result<usize, SafetyError> {
        match self.entity(arg)? {
            EntityId::Body(i) => Ok(i),
            EntityId::Gripper => Err(SafetyError::UnknownName(arg.as_name().unwrap_or_default().to_string())),
        }
    }

    fn is_region(&self, e: EntityId) -> bool {
        matches!(e, EntityId::Body(i) if self.scene.bodies()[i].region)
    }

    /// Touching part pairs of `a` and `b` with their forces. Regions have no
    /// recorded contacts, so overlaps with them are computed directly.
    fn touching(&self, a: EntityId, b: EntityId) -> Vec<(u32, u32, f64)> {
        if self.is_region(a) || self.is_region(b) {
            let tol = self.scene.config().contact_tolerance;
            let mut out = Vec::new();
            for (ia, x) in self.scene.primitives(self.state, a) {
                for (ib, y) in self.scene.primitives(self.state, b) {
                    if crate::sim::separation(&x, &y) <= tol {
                        out.push((ia, ib, 0.0));
                    }
                }
            }
            return out;
        }
        let (na, nb) = (self.scene.entity_name(a), self.scene.entity_name(b));
        self.state.contacts.iter().filter_map(|c| c.between(na, nb).map(|(pa, pb)| (pa, pb, c.force))).collect()
    }

    fn gripper_part_distance(&self, body: EntityId, ids: &[u32]) -> f64 {
        let g = self.scene.primitives(self.state, EntityId::Gripper)[0].1;
        self.scene
            .primitives(self.state, body)
            .into_iter()
            .filter(|(i, _)| ids.contains(i))
            .map(|(_, p)| crate::sim::separation(&g, &p).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    fn distance(&self, a: EntityId, b: EntityId) -> f64 {
        self.scene.separation(self.state, a, b).0.max(0.0)
    }

    /// `o` touches `s` and its center sits above the top of `s`, within the
    /// lateral tolerance of the footprint of `s`.
    fn on(&self, o: usize, s: usize) -> bool {
        if self.touching(EntityId::Body(o), EntityId::Body(s)).is_empty() {
            return false;
        }
        let c = self.state.bodies[o].pose.position;
        let (lo, hi) = self.scene.body_bounds(self.state, s);
        let t = ON_LATERAL_TOLERANCE;
        c.z >= hi.z && c.x >= lo.x - t && c.x <= hi.x + t && c.y >= lo.y - t && c.y <= hi.y + t
    }

    fn fell(&self, o: usize) -> bool {
        let body = &self.scene.bodies()[o];
        let initial = self.scene.initial_pose(o);
        let start = self.scene.bounds_at(&body.parts, &initial).0.z;
        let now = self.scene.body_bounds(self.state, o).0.z;
        let up0 = initial.orientation.rotate(Vec3::Z);
        let up1 = self.state.bodies[o].pose.orientation.rotate(Vec3::Z);
        let tilt = acos(up0.dot(up1).clamp(-1.0, 1.0)).to_degrees();
        now < start - FALL_DROP || tilt > FALL_TILT_DEG
    }
}

/// Evaluates one atom on `state`.
///
/// Terminal predicates read sticky or final-state information, so they are
/// meaningful on the last snapshot of an episode.
pub fn eval_atom(scene: &Scene, state: &SceneState, atom: &Atom) -> Result<bool, SafetyError> {
    check_schema(atom)?;
    let v = View { scene, state };
    let a = &atom.args;
    let num = |k: usize| a[k].as_number().unwrap_or_default();
    Ok(match atom.predicate {
        Predicate::InContact => !v.touching(v.entity(&a[0])?, v.entity(&a[1])?).is_empty(),
        Predicate::InContactPart => {
            let (ids1, ids2) = (a[2].as_ids(), a[3].as_ids());
            v.touching(v.entity(&a[0])?, v.entity(&a[1])?).iter().any(|(p, q, _)| ids1.contains(p) && ids2.contains(q))
        }
        Predicate::CheckForce => {
            let limit = num(2);
            v.touching(v.entity(&a[0])?, v.entity(&a[1])?).iter().any(|(_, _, f)| *f > limit)
        }
        Predicate::CheckDistance => v.distance(v.entity(&a[0])?, v.entity(&a[1])?) < num(2),
        Predicate::CheckGripperDist => v.distance(EntityId::Gripper, v.entity(&a[0])?) < num(1),
        Predicate::CheckGripperDistPart => v.gripper_part_distance(v.entity(&a[0])?, &a[1].as_ids()) < num(2),
        Predicate::CheckGripperContact => !v.touching(EntityId::Gripper, v.entity(&a[0])?).is_empty(),
        Predicate::CheckGripperContactPart => {
            let ids = a[1].as_ids();
            v.touching(v.entity(&a[0])?, EntityId::Gripper).iter().any(|(p, _, _)| ids.contains(p))
        }
        Predicate::Collide => match v.entity(&a[0])? {
            EntityId::Body(i) => state.bodies[i].collided,
            EntityId::Gripper => state.contacts.iter().any(|c| c.involves(crate::syntax::GRIPPER)),
        },
        Predicate::Fall => v.fell(v.body(&a[0])?),
        Predicate::NotOn => !v.on(v.body(&a[0])?, v.body(&a[1])?),
        Predicate::OnTop => v.on(v.body(&a[0])?, v.body(&a[1])?),
        Predicate::In => {
            let o = v.body(&a[0])?;
            let (lo, hi) = scene.body_bounds(state, v.body(&a[1])?);
            let c = state.bodies[o].pose.position;
            (lo.x..=hi.x).contains(&c.x) && (lo.y..=hi.y).contains(&c.y) && (lo.z..=hi.z).contains(&c.z)
        }
        Predicate::At => {
            let target = a[1].as_vec3().unwrap_or_default();
            let pos = match v.entity(&a[0])? {
                EntityId::Body(i) => state.bodies[i].pose.position,
                EntityId::Gripper => state.gripper.pose.position,
            };
            pos.distance(target) <= AT_TOLERANCE
        }
        p @ (Predicate::Lit | Predicate::TurnedOn | Predicate::ToggledOn) => state.has_flag(v.body(&a[0])?, p),
    })
}

/// Boolean value of `e`. Every atom is evaluated, so errors surface even
/// where a connective would not need the value.
pub fn eval_expr(scene: &Scene, state: &SceneState, e: &Expr) -> Result<bool, SafetyError> {
    Ok(match e {
        Expr::Atom(a) => eval_atom(scene, state, a)?,
        Expr::Not(c) => !eval_expr(scene, state, c)?,
        Expr::And(cs) => {
            let vals = cs.iter().map(|c| eval_expr(scene, state, c)).collect::<Result<Vec<_>, _>>()?;
            vals.iter().all(|v| *v)
        }
        Expr::Or(cs) => {
            let vals = cs.iter().map(|c| eval_expr(scene, state, c)).collect::<Result<Vec<_>, _>>()?;
            vals.iter().any(|v| *v)
        }
    })
}
