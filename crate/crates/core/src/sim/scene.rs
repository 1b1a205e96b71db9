//! Scene construction, stepping and queries.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::geometry::{separation, Primitive};
use super::SceneError;
use crate::kinematics::{MotionGenerator, Pose, Quat, Vec3, DEFAULT_DT};
use crate::syntax::{Atom, PartDecl, Predicate, TaskSpec, GRIPPER};

/// Tunable constants of the contact model.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Penalty stiffness in N/m: force = k_pen * depth.
    pub k_pen: f64,
    pub dt: f64,
    pub max_steps: usize,
    /// Per-step cap on the gripper translation, in meters.
    pub max_translation: f64,
    /// Separations up to this value count as contact.
    pub contact_tolerance: f64,
    /// Gripper-to-part gap below which a closing gripper grasps.
    pub grasp_distance: f64,
    pub gripper_radius: f64,
    pub max_aperture: f64,
    pub gripper_home: Vec3,
    /// Half width of the uniform x/y jitter added to `At` placements.
    pub placement_jitter: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            k_pen: 1000.0,
            dt: DEFAULT_DT,
            max_steps: 500,
            max_translation: 0.05,
            contact_tolerance: 1e-6,
            grasp_distance: 0.005,
            gripper_radius: 0.01,
            max_aperture: 0.08,
            gripper_home: Vec3::new(0.0, 0.0, 0.5),
            placement_jitter: 0.0,
        }
    }
}

/// Gripper command for one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Action {
    /// World-frame translation in meters, clamped per step.
    pub translation: Vec3,
    /// World-frame rotation applied to the gripper orientation.
    pub rotation: Quat,
    /// Aperture change in meters; negative closes.
    pub grip: f64,
}

impl Default for Action {
    fn default() -> Self {
        Action::ZERO
    }
}

impl Action {
    pub const ZERO: Action = Action { translation: Vec3::ZERO, rotation: Quat::IDENTITY, grip: 0.0 };

    pub fn translate(v: Vec3) -> Action {
        Action { translation: v, ..Action::ZERO }
    }

    pub fn grip(delta: f64) -> Action {
        Action { grip: delta, ..Action::ZERO }
    }

    /// `[dx, dy, dz, rx, ry, rz, grip]` with the rotation as a rotation vector.
    pub fn to_array(&self) -> [f64; 7] {
        let t = self.translation;
        let r = self.rotation.to_rotation_vector();
        [t.x, t.y, t.z, r.x, r.y, r.z, self.grip]
    }

    pub fn from_array(a: [f64; 7]) -> Action {
        Action {
            translation: Vec3::new(a[0], a[1], a[2]),
            rotation: Quat::from_rotation_vector(Vec3::new(a[3], a[4], a[5])),
            grip: a[6],
        }
    }
}

/// Something that can touch: a declared object or the gripper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityId {
    Body(usize),
    Gripper,
}

/// Static description of one declared object.
#[derive(Clone, Debug, PartialEq)]
pub struct Body {
    pub name: String,
    pub category: String,
    pub parts: Vec<PartDecl>,
    /// Regions are volumes: they have distances but never contacts.
    pub region: bool,
    /// Driven by a motion generator.
    pub mover: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContactEvent {
    pub a: String,
    pub a_part: u32,
    pub b: String,
    pub b_part: u32,
    /// Penetration depth in meters, never negative.
    pub depth: f64,
    /// k_pen * depth.
    pub force: f64,
}

impl ContactEvent {
    pub fn swapped(&self) -> ContactEvent {
        ContactEvent {
            a: self.b.clone(),
            a_part: self.b_part,
            b: self.a.clone(),
            b_part: self.a_part,
            depth: self.depth,
            force: self.force,
        }
    }

    pub fn involves(&self, name: &str) -> bool {
        self.a == name || self.b == name
    }

    /// Parts of `x` and `y` in this event if it joins exactly that pair.
    pub fn between(&self, x: &str, y: &str) -> Option<(u32, u32)> {
        if self.a == x && self.b == y {
            Some((self.a_part, self.b_part))
        } else if self.a == y && self.b == x {
            Some((self.b_part, self.a_part))
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BodyState {
    pub pose: Pose,
    pub frozen: bool,
    /// Sticky: set once the body touches something it did not touch at load.
    pub collided: bool,
    /// Boolean state predicates that hold, sorted.
    pub flags: Vec<Predicate>,
}

/// Rigid attachment of a body to the gripper.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grasp {
    pub body: usize,
    pub part: u32,
    /// Body pose in the gripper frame.
    pub relative: Pose,
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GripperState {
    pub pose: Pose,
    /// Finger opening in meters, within `[0, max_aperture]`.
    pub aperture: f64,
    pub grasp: Option<Grasp>,
}

/// Everything that changes over an episode.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneState {
    pub step: u64,
    /// Parallel to [`Scene::bodies`].
    pub bodies: Vec<BodyState>,
    pub gripper: GripperState,
    /// Contacts of this snapshot, in canonical pair order.
    pub contacts: Vec<ContactEvent>,
}

impl SceneState {
    pub fn has_flag(&self, body: usize, p: Predicate) -> bool {
        self.bodies[body].flags.contains(&p)
    }
}

/// Motion generators bound at load time, one slot per body.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Generators(Vec<Option<MotionGenerator>>);

impl Generators {
    pub fn get(&self, body: usize) -> Option<&MotionGenerator> {
        self.0.get(body).and_then(Option::as_ref)
    }

    /// Number of attached generators.
    pub fn active(&self) -> usize {
        self.0.iter().filter(|g| g.is_some()).count()
    }
}

/// Immutable geometry and load-time facts of one episode.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    bodies: Vec<Body>,
    index: BTreeMap<String, usize>,
    initial: Vec<Pose>,
    /// Entity pairs already touching at load; they never set `collided`.
    resting: BTreeSet<(EntityId, EntityId)>,
    config: SimConfig,
}

/// Builds the scene for `spec` and its step-0 state.
///
/// `:init` atoms apply in order. `At` sets a position (plus jitter when
/// configured), `OnTop a b` centers `a` over `b` with its lowest point on
/// `b`'s top, and the boolean predicates set flags. Unplaced objects rest on
/// the floor at the origin.
pub fn load_scene(
    spec: &TaskSpec,
    seed: u64,
    config: &SimConfig,
) -> Result<(Scene, SceneState, Generators), SceneError> {
    let bodies: Vec<Body> = spec
        .objects
        .iter()
        .map(|o| Body {
            name: o.name.clone(),
            category: o.category.clone(),
            parts: o.parts.clone(),
            region: o.is_region(),
            mover: spec.motion(&o.name).is_some(),
        })
        .collect();
    let index = bodies.iter().enumerate().map(|(i, b)| (b.name.clone(), i)).collect();
    let mut scene = Scene { bodies, index, initial: Vec::new(), resting: BTreeSet::new(), config: config.clone() };

    let mut states: Vec<BodyState> = scene
        .bodies
        .iter()
        .map(|b| {
            let pose = Pose::default();
            let lift = if b.region { 0.0 } else { -scene.bounds_at(&b.parts, &pose).0.z };
            BodyState {
                pose: Pose::from_position(Vec3::new(0.0, 0.0, lift)),
                frozen: false,
                collided: false,
                flags: Vec::new(),
            }
        })
        .collect();
    let mut gripper =
        GripperState { pose: Pose::from_position(config.gripper_home), aperture: config.max_aperture, grasp: None };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for atom in &spec.init {
        scene.apply_init(atom, &mut states, &mut gripper, &mut rng)?;
    }
    for s in &mut states {
        s.flags.sort();
        s.flags.dedup();
    }

    let mut gens = Vec::with_capacity(scene.bodies.len());
    for (i, b) in scene.bodies.iter().enumerate() {
        gens.push(spec.motion(&b.name).map(|m| MotionGenerator::new(m, states[i].pose, config.dt)));
    }
    scene.initial = states.iter().map(|s| s.pose).collect();

    let mut state = SceneState { step: 0, bodies: states, gripper, contacts: Vec::new() };
    let pairs = scene.contact_pairs(&state);
    scene.resting = pairs.iter().map(|(a, b, _)| (*a, *b)).collect();
    state.contacts = pairs.into_iter().map(|(_, _, c)| c).collect();
    Ok((scene, state, Generators(gens)))
}

impl Scene {
    pub fn bodies(&self) -> &[Body] {
        &self.bodies
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn body_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn body(&self, name: &str) -> Option<&Body> {
        self.body_index(name).map(|i| &self.bodies[i])
    }

    pub fn resolve(&self, name: &str) -> Result<EntityId, SceneError> {
        if name == GRIPPER {
            return Ok(EntityId::Gripper);
        }
        self.body_index(name).map(EntityId::Body).ok_or_else(|| SceneError::UnknownName(name.to_string()))
    }

    pub fn entity_name(&self, e: EntityId) -> &str {
        match e {
            EntityId::Body(i) => &self.bodies[i].name,
            EntityId::Gripper => GRIPPER,
        }
    }

    /// Pose of a body when the episode started.
    pub fn initial_pose(&self, body: usize) -> Pose {
        self.initial[body]
    }

    fn apply_init(
        &self,
        atom: &Atom,
        states: &mut [BodyState],
        gripper: &mut GripperState,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), SceneError> {
        let name = |k: usize| atom.args.get(k).and_then(|a| a.as_name()).unwrap_or_default();
        match atom.predicate {
            Predicate::At => {
                let pos = atom.args.get(1).and_then(|a| a.as_vec3()).unwrap_or_default();
                match self.resolve(name(0))? {
                    EntityId::Gripper => gripper.pose.position = pos,
                    EntityId::Body(i) => {
                        let mut pos = pos;
                        let j = self.config.placement_jitter;
                        if j > 0.0 && !self.bodies[i].region {
                            pos.x += rng.random_range(-j..=j);
                            pos.y += rng.random_range(-j..=j);
                        }
                        states[i].pose.position = pos;
                    }
                }
            }
            Predicate::OnTop => {
                let (a, b) = (self.body_id(name(0))?, self.body_id(name(1))?);
                let top = self.bounds_at(&self.bodies[b].parts, &states[b].pose).1.z;
                let pose = states[a].pose;
                let bottom = self.bounds_at(&self.bodies[a].parts, &pose).0.z - pose.position.z;
                let support = states[b].pose.position;
                states[a].pose.position = Vec3::new(support.x, support.y, top - bottom);
            }
            p @ (Predicate::Lit | Predicate::TurnedOn | Predicate::ToggledOn) => {
                let i = self.body_id(name(0))?;
                states[i].flags.push(p);
            }
            other => return Err(SceneError::BadInit(other.name())),
        }
        Ok(())
    }

    fn body_id(&self, name: &str) -> Result<usize, SceneError> {
        self.body_index(name).ok_or_else(|| SceneError::UnknownName(name.to_string()))
    }

    /// World-axis-aligned bounds of a part list at `pose`.
    pub fn bounds_at(&self, parts: &[PartDecl], pose: &Pose) -> (Vec3, Vec3) {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for p in parts {
            let (a, b) = Primitive::place(pose, p).aabb();
            lo = lo.component_min(a);
            hi = hi.component_max(b);
        }
        (lo, hi)
    }

    /// Bounds of a body in `state`.
    pub fn body_bounds(&self, state: &SceneState, body: usize) -> (Vec3, Vec3) {
        self.bounds_at(&self.bodies[body].parts, &state.bodies[body].pose)
    }

    /// Placed primitives of an entity, tagged with part indices.
    pub fn primitives(&self, state: &SceneState, e: EntityId) -> Vec<(u32, Primitive)> {
        match e {
            EntityId::Gripper => alloc::vec![(
                0,
                Primitive::Sphere { center: state.gripper.pose.position, radius: self.config.gripper_radius },
            )],
            EntityId::Body(i) => {
                let pose = state.bodies[i].pose;
                self.bodies[i].parts.iter().map(|p| (p.index, Primitive::place(&pose, p))).collect()
            }
        }
    }

    /// Minimum signed separation between two entities and the parts realizing it.
    pub fn separation(&self, state: &SceneState, a: EntityId, b: EntityId) -> (f64, u32, u32) {
        let (pa, pb) = (self.primitives(state, a), self.primitives(state, b));
        let mut best = (f64::INFINITY, 0, 0);
        for (ia, x) in &pa {
            for (ib, y) in &pb {
                let s = separation(x, y);
                if s < best.0 {
                    best = (s, *ia, *ib);
                }
            }
        }
        best
    }

    /// Surface-to-surface distance in meters; zero when penetrating.
    pub fn distance(&self, state: &SceneState, a: &str, b: &str) -> Result<f64, SceneError> {
        let (a, b) = (self.resolve(a)?, self.resolve(b)?);
        Ok(self.separation(state, a, b).0.max(0.0))
    }

    fn physical(&self) -> Vec<EntityId> {
        let mut out: Vec<EntityId> =
            (0..self.bodies.len()).filter(|&i| !self.bodies[i].region).map(EntityId::Body).collect();
        out.push(EntityId::Gripper);
        out
    }

    fn contact_pairs(&self, state: &SceneState) -> Vec<(EntityId, EntityId, ContactEvent)> {
        let ents = self.physical();
        let mut out = Vec::new();
        for (k, &a) in ents.iter().enumerate() {
            let pa = self.primitives(state, a);
            for &b in &ents[k + 1..] {
                let pb = self.primitives(state, b);
                for (ia, x) in &pa {
                    for (ib, y) in &pb {
                        let s = separation(x, y);
                        if s <= self.config.contact_tolerance {
                            let depth = (-s).max(0.0);
                            out.push((
                                a,
                                b,
                                ContactEvent {
                                    a: self.entity_name(a).to_string(),
                                    a_part: *ia,
                                    b: self.entity_name(b).to_string(),
                                    b_part: *ib,
                                    depth,
                                    force: self.config.k_pen * depth,
                                },
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    /// Contact events for the poses in `state`.
    pub fn contacts(&self, state: &SceneState) -> Vec<ContactEvent> {
        self.contact_pairs(state).into_iter().map(|(_, _, c)| c).collect()
    }

    /// Advances one step.
    ///
    /// Order: gripper motion, release, generator poses, attached bodies,
    /// grasp, settling of a released body, contacts.
    pub fn step(&self, state: &SceneState, action: &Action, gens: &Generators) -> SceneState {
        let cfg = &self.config;
        let mut next = state.clone();
        next.step = state.step + 1;

        let mut t = action.translation;
        let n = t.norm();
        if n > cfg.max_translation {
            t = t * (cfg.max_translation / n);
        }
        let g = &mut next.gripper;
        g.pose.position += t;
        g.pose.orientation = (action.rotation.normalized() * g.pose.orientation).normalized();
        g.aperture = (g.aperture + action.grip).clamp(0.0, cfg.max_aperture);

        let mut released = None;
        if let Some(grasp) = g.grasp {
            if g.aperture >= grasp.width {
                g.grasp = None;
                released = Some(grasp.body);
            }
        }

        for (i, body) in next.bodies.iter_mut().enumerate() {
            if body.frozen {
                continue;
            }
            if let Some(gen) = gens.get(i) {
                body.pose = gen.pose_at(next.step);
            }
        }

        if let Some(grasp) = next.gripper.grasp {
            next.bodies[grasp.body].pose = next.gripper.pose.compose(&grasp.relative);
        } else if next.gripper.aperture < state.gripper.aperture && released.is_none() {
            next.gripper.grasp = self.try_grasp(&next);
        }

        if let Some(i) = released {
            self.settle(&mut next, i);
        }

        let pairs = self.contact_pairs(&next);
        for (a, b, _) in &pairs {
            if self.resting.contains(&(*a, *b)) {
                continue;
            }
            for e in [a, b] {
                if let EntityId::Body(i) = e {
                    next.bodies[*i].collided = true;
                }
            }
        }
        next.contacts = pairs.into_iter().map(|(_, _, c)| c).collect();
        next
    }

    /// Nearest graspable part within reach that is wider than the aperture.
    /// Regions, movers and frozen bodies are never grasped.
    fn try_grasp(&self, state: &SceneState) -> Option<Grasp> {
        let gpose = state.gripper.pose;
        let gripper = Primitive::Sphere { center: gpose.position, radius: self.config.gripper_radius };
        let mut best: Option<(f64, Grasp)> = None;
        for (i, body) in self.bodies.iter().enumerate() {
            if body.region || body.mover || state.bodies[i].frozen {
                continue;
            }
            let pose = state.bodies[i].pose;
            for p in &body.parts {
                let prim = Primitive::place(&pose, p);
                let s = separation(&gripper, &prim);
                let width = prim.width();
                if s <= self.config.grasp_distance
                    && state.gripper.aperture < width
                    && best.as_ref().is_none_or(|(d, _)| s < *d)
                {
                    let relative = gpose.inverse().compose(&pose);
                    best = Some((s, Grasp { body: i, part: p.index, relative, width }));
                }
            }
        }
        best.map(|(_, g)| g)
    }

    /// Drops a body straight down onto the highest support under its footprint.
    fn settle(&self, state: &mut SceneState, body: usize) {
        let (lo, hi) = self.body_bounds(state, body);
        let mut floor: f64 = 0.0;
        for (j, other) in self.bodies.iter().enumerate() {
            if j == body || other.region {
                continue;
            }
            let (olo, ohi) = self.body_bounds(state, j);
            let overlap = lo.x < ohi.x && olo.x < hi.x && lo.y < ohi.y && olo.y < hi.y;
            if overlap && ohi.z <= lo.z + 1e-9 {
                floor = floor.max(ohi.z);
            }
        }
        if lo.z > floor {
            state.bodies[body].pose.position.z -= lo.z - floor;
        }
    }

    /// Pins a moving object for the rest of the episode.
    ///
    /// Detaches its generator and marks it frozen; the pose is left as is.
    /// Freezing twice is a no-op.
    pub fn freeze_object(&self, state: &mut SceneState, gens: &mut Generators, name: &str) -> Result<(), SceneError> {
        let i = self.body_id(name)?;
        if !self.bodies[i].mover {
            return Err(SceneError::NotAMover(name.to_string()));
        }
        state.bodies[i].frozen = true;
        if let Some(slot) = gens.0.get_mut(i) {
            *slot = None;
        }
        Ok(())
    }
}
