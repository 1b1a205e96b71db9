//! Semantic checks over a parsed [`TaskSpec`].

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ast::*;
use super::lexer::Span;
use super::predicate::{ArgKind, Predicate, PredicateClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub span: Span,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.severity, self.message)
    }
}

struct Checker<'a> {
    spec: &'a TaskSpec,
    out: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn error(&mut self, loc: Loc, message: String) {
        self.out.push(Diagnostic { span: loc.0, severity: Severity::Error, message });
    }

    fn warning(&mut self, loc: Loc, message: String) {
        self.out.push(Diagnostic { span: loc.0, severity: Severity::Warning, message });
    }

    fn objects(&mut self) {
        let mut seen = BTreeSet::new();
        for o in &self.spec.objects {
            if o.name == GRIPPER {
                self.error(o.loc, format!("{GRIPPER} is reserved for the robot gripper"));
            }
            if !seen.insert(o.name.as_str()) {
                self.error(o.loc, format!("duplicate object {}", o.name));
            }
            if o.parts.is_empty() {
                self.error(o.loc, format!("object {} has no parts", o.name));
            }
            let mut indices: Vec<u32> = o.parts.iter().map(|p| p.index).collect();
            indices.sort_unstable();
            if indices.iter().enumerate().any(|(i, &idx)| idx as usize != i) {
                self.error(o.loc, format!("part indices of {} must be contiguous from 0", o.name));
            }
            for p in &o.parts {
                let ok = match p.shape {
                    Shape::Sphere { radius } => radius > 0.0 && radius.is_finite(),
                    Shape::Box { half_extents } => half_extents.min_elem() > 0.0 && half_extents.is_finite(),
                };
                if !ok {
                    self.error(p.loc, format!("part {} of {} has non-positive size", p.index, o.name));
                }
            }
        }
    }

    fn entity(&mut self, loc: Loc, name: &str) -> Option<Option<&'a ObjectDecl>> {
        if name == GRIPPER {
            return Some(None);
        }
        let spec: &'a TaskSpec = self.spec;
        match spec.object(name) {
            Some(o) => Some(Some(o)),
            None => {
                self.error(loc, format!("unknown object {name}"));
                None
            }
        }
    }

    fn part_ids(&mut self, loc: Loc, owner: Option<&ObjectDecl>, arg: &Arg) {
        let count = owner.map_or(1, |o| o.parts.len());
        let name = owner.map_or(GRIPPER, |o| o.name.as_str());
        for id in arg.as_ids() {
            if id as usize >= count {
                self.error(loc, format!("part index {id} out of range for {name} ({count} part(s))"));
            }
        }
    }

    fn atom(&mut self, atom: &Atom) {
        let schema = atom.predicate.schema();
        if schema.len() != atom.args.len() {
            self.error(
                atom.loc,
                format!("{} takes {} argument(s), got {}", atom.predicate, schema.len(), atom.args.len()),
            );
            return;
        }
        let mut entities: Vec<Option<Option<&'a ObjectDecl>>> = Vec::new();
        for (arg, kind) in atom.args.iter().zip(schema) {
            let ok = match (kind, arg) {
                (ArgKind::Entity, Arg::Name(n)) => {
                    entities.push(self.entity(atom.loc, n));
                    true
                }
                (ArgKind::Number, Arg::Number(v)) => v.is_finite(),
                (ArgKind::Vec3, Arg::List(l)) => l.len() == 3,
                (ArgKind::Ids, Arg::List(l)) => !l.is_empty() && l.iter().all(|v| *v >= 0.0 && *v == libm::trunc(*v)),
                _ => false,
            };
            if !ok {
                self.error(atom.loc, format!("{} expects a {kind} here", atom.predicate));
            }
        }
        let resolved = |i: usize| entities.get(i).copied().flatten();
        match atom.predicate {
            Predicate::InContactPart => {
                if let (Some(a), Some(b)) = (resolved(0), resolved(1)) {
                    self.part_ids(atom.loc, a, &atom.args[2]);
                    self.part_ids(atom.loc, b, &atom.args[3]);
                }
            }
            Predicate::CheckGripperDistPart | Predicate::CheckGripperContactPart => {
                if let Some(a) = resolved(0) {
                    self.part_ids(atom.loc, a, &atom.args[1]);
                }
            }
            _ => {}
        }
        let physical_args: &[usize] = match atom.predicate {
            Predicate::InContact | Predicate::InContactPart | Predicate::CheckForce => &[0, 1],
            Predicate::CheckGripperContact
            | Predicate::CheckGripperContactPart
            | Predicate::Collide
            | Predicate::Fall
            | Predicate::OnTop => &[0],
            Predicate::NotOn => &[0],
            _ => &[],
        };
        for &i in physical_args {
            if let Some(Some(o)) = resolved(i) {
                if o.is_region() {
                    self.warning(atom.loc, format!("{} never makes contact: {} is a region", o.name, atom.predicate));
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr, context: &str, allowed: impl Fn(Predicate) -> bool + Copy) {
        for atom in e.atoms() {
            if !allowed(atom.predicate) {
                self.error(atom.loc, format!("predicate {} is not allowed in {context}", atom.predicate));
            }
            self.atom(atom);
        }
    }

    fn cost_terms(&mut self) {
        for term in self.spec.cost_terms() {
            let atoms = term.atoms();
            let inst = atoms.iter().any(|a| a.predicate.class() == PredicateClass::Instantaneous);
            let terminal = atoms.iter().any(|a| a.predicate.class() == PredicateClass::Terminal);
            if inst && terminal {
                let loc = atoms[0].loc;
                self.error(loc, String::from("cost term mixes instantaneous and terminal predicates"));
            }
        }
    }

    fn motions(&mut self) {
        let mut seen = BTreeSet::new();
        for m in &self.spec.moving_objects {
            match self.spec.object(&m.object) {
                None => self.error(m.loc, format!("unknown object {}", m.object)),
                Some(o) if o.is_region() => self.error(m.loc, format!("region {} cannot move", m.object)),
                Some(_) => {}
            }
            if !seen.insert(m.object.as_str()) {
                self.error(m.loc, format!("{} has more than one motion", m.object));
            }
            let name = &m.object;
            match &m.motion {
                Motion::Linear { period, travel_dist, direction } => {
                    self.period(m.loc, name, *period);
                    if !(*travel_dist > 0.0 && travel_dist.is_finite()) {
                        self.error(m.loc, format!("{name}: travel distance must be positive"));
                    }
                    self.direction(m.loc, name, *direction);
                }
                Motion::Circular { center, period } => {
                    self.period(m.loc, name, *period);
                    if !center.is_finite() {
                        self.error(m.loc, format!("{name}: center must be finite"));
                    }
                }
                Motion::Waypoints { waypoints, period } => {
                    self.period(m.loc, name, *period);
                    if waypoints.len() < 2 {
                        self.error(m.loc, format!("{name}: at least 2 waypoints are required"));
                    }
                }
                Motion::Projectile { initial_speed, direction, gravity } => {
                    if !(initial_speed.is_finite() && *initial_speed >= 0.0) {
                        self.error(m.loc, format!("{name}: initial speed must be non-negative"));
                    }
                    self.direction(m.loc, name, *direction);
                    if !gravity.is_finite() {
                        self.error(m.loc, format!("{name}: gravity must be finite"));
                    }
                }
            }
        }
    }

    fn period(&mut self, loc: Loc, name: &str, period: u32) {
        if period < 2 {
            self.error(loc, format!("{name}: motion period must be at least 2 steps"));
        }
    }

    fn direction(&mut self, loc: Loc, name: &str, d: crate::kinematics::Vec3) {
        if !(d.is_finite() && d.norm() > 0.0) {
            self.error(loc, format!("{name}: direction must be a non-zero vector"));
        }
    }

    fn visual(&mut self) {
        if let Some(s) = &self.spec.visual.image_settings {
            if s.temperature.is_nan() || s.temperature <= 0.0 {
                self.error(s.loc, String::from("temperature must be positive"));
            }
        }
        match self.spec.visual.noise {
            Some((NoiseMode::Gaussian { var, .. }, loc)) if var.is_nan() || var < 0.0 => {
                self.error(loc, String::from("noise variance must be non-negative"));
            }
            Some((NoiseMode::SaltPepper { prob }, loc)) if !(0.0..=1.0).contains(&prob) => {
                self.error(loc, String::from("salt-and-pepper probability must be in [0, 1]"));
            }
            _ => {}
        }
        let mut seen = BTreeSet::new();
        for c in &self.spec.cameras {
            if !seen.insert(c.name.as_str()) {
                self.error(Loc::default(), format!("duplicate camera {}", c.name));
            }
        }
    }
}

/// Checks every cross-reference and value constraint of `spec`.
///
/// Returns an empty list iff the task is valid. Diagnostics are sorted by
/// source position, so the result does not depend on check order.
pub fn validate(spec: &TaskSpec) -> Vec<Diagnostic> {
    let mut c = Checker { spec, out: Vec::new() };
    c.objects();
    for atom in &spec.init {
        if !atom.predicate.allowed_in_init() {
            c.error(atom.loc, format!("predicate {} is not allowed in :init", atom.predicate));
        }
        c.atom(atom);
    }
    c.expr(&spec.goal, ":goal", |p| p.class() == PredicateClass::State);
    for e in &spec.cost {
        c.expr(e, ":cost", Predicate::is_cost);
    }
    c.cost_terms();
    c.motions();
    c.visual();
    let mut out = c.out;
    out.sort();
    out.dedup();
    out
}
