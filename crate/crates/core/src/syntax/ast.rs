//! Typed representation of a parsed problem file.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexer::Span;
use super::predicate::Predicate;
use crate::kinematics::Vec3;

/// Reserved entity name for the robot gripper.
pub const GRIPPER: &str = "gripper0";

/// Category that marks an object declaration as a non-physical region.
pub const REGION_CATEGORY: &str = "region";

/// Source location attached to a node. Always compares equal, so structural
/// equality of specs ignores where things were written.
/// Ordering and hashing agree with that equality.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Loc(pub Span);

impl PartialEq for Loc {
    fn eq(&self, _: &Loc) -> bool {
        true
    }
}

impl PartialOrd for Loc {
    fn partial_cmp(&self, other: &Loc) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Loc {
    fn cmp(&self, _: &Loc) -> core::cmp::Ordering {
        core::cmp::Ordering::Equal
    }
}

impl core::hash::Hash for Loc {
    fn hash<H: core::hash::Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpec {
    pub name: String,
    pub domain: String,
    pub language: Option<String>,
    pub objects: Vec<ObjectDecl>,
    pub moving_objects: Vec<MotionSpec>,
    pub init: Vec<Atom>,
    pub goal: Expr,
    pub cost: Vec<Expr>,
    pub visual: VisualSpec,
    pub cameras: Vec<CameraDecl>,
}

impl TaskSpec {
    pub fn object(&self, name: &str) -> Option<&ObjectDecl> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn motion(&self, name: &str) -> Option<&MotionSpec> {
        self.moving_objects.iter().find(|m| m.object == name)
    }

    pub fn is_region(&self, name: &str) -> bool {
        self.object(name).is_some_and(ObjectDecl::is_region)
    }

    /// Independent cost constraints: each entry of `:cost`, with a top-level
    /// `(And ...)` entry split into its children.
    pub fn cost_terms(&self) -> Vec<&Expr> {
        self.cost
            .iter()
            .flat_map(|e| match e {
                Expr::And(children) => children.iter().collect::<Vec<_>>(),
                other => alloc::vec![other],
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectDecl {
    pub name: String,
    pub category: String,
    pub parts: Vec<PartDecl>,
    pub loc: Loc,
}

impl ObjectDecl {
    pub fn is_region(&self) -> bool {
        self.category == REGION_CATEGORY
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Sphere {
        radius: f64,
    },
    /// Box given by its half extents along the local axes.
    Box {
        half_extents: Vec3,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartDecl {
    pub index: u32,
    pub shape: Shape,
    /// Offset of the part center in the object frame.
    pub offset: Vec3,
    pub loc: Loc,
}

/// Part used when an object declaration has no `(:parts ...)` block.
pub fn default_part(loc: Loc) -> PartDecl {
    PartDecl { index: 0, shape: Shape::Sphere { radius: 0.025 }, offset: Vec3::ZERO, loc }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Arg {
    Name(String),
    Number(f64),
    List(Vec<f64>),
}

impl Arg {
    pub fn as_name(&self) -> Option<&str> {
        match self {
            Arg::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Arg::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[f64]> {
        match self {
            Arg::List(l) => Some(l),
            _ => None,
        }
    }

    /// Part indices; only valid once the atom passed the schema check.
    pub fn as_ids(&self) -> Vec<u32> {
        self.as_list().map(|l| l.iter().map(|&v| v as u32).collect()).unwrap_or_default()
    }

    pub fn as_vec3(&self) -> Option<Vec3> {
        match self.as_list()? {
            [x, y, z] => Some(Vec3::new(*x, *y, *z)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub predicate: Predicate,
    pub args: Vec<Arg>,
    pub loc: Loc,
}

impl Atom {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Arg::as_name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
    Atom(Atom),
}

impl Expr {
    /// Every atom in the tree, left to right.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a Atom>) {
            match e {
                Expr::And(cs) | Expr::Or(cs) => cs.iter().for_each(|c| walk(c, out)),
                Expr::Not(c) => walk(c, out),
                Expr::Atom(a) => out.push(a),
            }
        }
        walk(self, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MotionSpec {
    pub object: String,
    pub motion: Motion,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Waypoint {
    pub position: Vec3,
    /// Facing direction; zero keeps the previous orientation.
    pub direction: Vec3,
}

/// Default number of steps per waypoint segment.
pub const DEFAULT_WAYPOINT_PERIOD: u32 = 50;

#[derive(Clone, Debug, PartialEq)]
pub enum Motion {
    Linear {
        period: u32,
        travel_dist: f64,
        direction: Vec3,
    },
    Circular {
        center: Vec3,
        period: u32,
    },
    /// `period` is the number of steps spent on each segment.
    Waypoints {
        waypoints: Vec<Waypoint>,
        period: u32,
    },
    Projectile {
        initial_speed: f64,
        direction: Vec3,
        gravity: Vec3,
    },
}

impl Motion {
    pub fn type_name(&self) -> &'static str {
        match self {
            Motion::Linear { .. } => "linear",
            Motion::Circular { .. } => "circular",
            Motion::Waypoints { .. } => "waypoints",
            Motion::Projectile { .. } => "projectile",
        }
    }
}

/// Default color temperature in Kelvin.
pub const NEUTRAL_TEMPERATURE: f64 = 6500.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ImageSettings {
    pub brightness: f64,
    pub contrast: f64,
    pub saturation: f64,
    pub temperature: f64,
    pub loc: Loc,
}

impl Default for ImageSettings {
    fn default() -> Self {
        ImageSettings {
            brightness: 0.0,
            contrast: 0.0,
            saturation: 0.0,
            temperature: NEUTRAL_TEMPERATURE,
            loc: Loc::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseMode {
    None,
    Gaussian { mean: f64, var: f64 },
    SaltPepper { prob: f64 },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VisualSpec {
    pub image_settings: Option<ImageSettings>,
    pub noise: Option<(NoiseMode, Loc)>,
    pub random_color: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CameraDecl {
    pub name: String,
    pub offset: Option<Vec3>,
}
