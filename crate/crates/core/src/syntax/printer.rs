//! Canonical text form of a [`TaskSpec`].

use alloc::string::String;
use core::fmt::Write;

use super::ast::*;
use crate::kinematics::Vec3;

fn vec3(out: &mut String, v: Vec3) {
    let _ = write!(out, "({} {} {})", v.x, v.y, v.z);
}

fn quoted(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
}

pub fn write_arg(out: &mut String, arg: &Arg) {
    match arg {
        Arg::Name(n) => out.push_str(n),
        Arg::Number(v) => {
            let _ = write!(out, "{v}");
        }
        Arg::List(items) => {
            out.push('(');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{v}");
            }
            out.push(')');
        }
    }
}

pub fn write_atom(out: &mut String, atom: &Atom) {
    out.push('(');
    out.push_str(atom.predicate.name());
    for a in &atom.args {
        out.push(' ');
        write_arg(out, a);
    }
    out.push(')');
}

/// Single-line rendering of an expression.
pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr_inline(&mut s, e);
    s
}

fn write_expr_inline(out: &mut String, e: &Expr) {
    match e {
        Expr::Atom(a) => write_atom(out, a),
        Expr::Not(c) => {
            out.push_str("(Not ");
            write_expr_inline(out, c);
            out.push(')');
        }
        Expr::And(cs) | Expr::Or(cs) => {
            out.push_str(if matches!(e, Expr::And(_)) { "(And" } else { "(Or" });
            for c in cs {
                out.push(' ');
                write_expr_inline(out, c);
            }
            out.push(')');
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_expr(out: &mut String, e: &Expr, depth: usize) {
    indent(out, depth);
    match e {
        Expr::And(cs) | Expr::Or(cs) => {
            out.push_str(if matches!(e, Expr::And(_)) { "(And\n" } else { "(Or\n" });
            for c in cs {
                write_expr(out, c, depth + 1);
            }
            indent(out, depth);
            out.push_str(")\n");
        }
        _ => {
            write_expr_inline(out, e);
            out.push('\n');
        }
    }
}

fn write_part(out: &mut String, p: &PartDecl) {
    let _ = write!(out, "({} ", p.index);
    match p.shape {
        Shape::Sphere { radius } => {
            let _ = write!(out, "sphere {radius} ");
        }
        Shape::Box { half_extents } => {
            out.push_str("box ");
            vec3(out, half_extents);
            out.push(' ');
        }
    }
    vec3(out, p.offset);
    out.push(')');
}

fn write_motion(out: &mut String, m: &MotionSpec) {
    let _ = writeln!(out, "    ({}", m.object);
    let _ = writeln!(out, "      (:motion_type {})", m.motion.type_name());
    match &m.motion {
        Motion::Linear { period, travel_dist, direction } => {
            let _ = writeln!(out, "      (:motion_period {period})");
            let _ = writeln!(out, "      (:motion_travel_dist {travel_dist})");
            out.push_str("      (:motion_direction ");
            vec3(out, *direction);
            out.push_str(")\n");
        }
        Motion::Circular { center, period } => {
            out.push_str("      (:motion_center ");
            vec3(out, *center);
            out.push_str(")\n");
            let _ = writeln!(out, "      (:motion_period {period})");
        }
        Motion::Waypoints { waypoints, period } => {
            out.push_str("      (:motion_waypoints (");
            for (i, w) in waypoints.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let (p, d) = (w.position, w.direction);
                let _ = write!(out, "({} {} {} {} {} {})", p.x, p.y, p.z, d.x, d.y, d.z);
            }
            out.push_str("))\n");
            let _ = writeln!(out, "      (:motion_period {period})");
        }
        Motion::Projectile { initial_speed, direction, gravity } => {
            let _ = writeln!(out, "      (:motion_initial_speed {initial_speed})");
            out.push_str("      (:motion_direction ");
            vec3(out, *direction);
            out.push_str(")\n      (:motion_gravity ");
            vec3(out, *gravity);
            out.push_str(")\n");
        }
    }
    out.push_str("    )\n");
}

/// Renders `spec` in canonical block order. Empty optional blocks are omitted.
pub fn pretty_print(spec: &TaskSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", spec.name);
    let _ = writeln!(out, "  (:domain {})", spec.domain);
    if let Some(lang) = &spec.language {
        out.push_str("  (:language ");
        quoted(&mut out, lang);
        out.push_str(")\n");
    }
    out.push_str("  (:objects\n");
    for o in &spec.objects {
        let _ = write!(out, "    ({} {} (:parts", o.name, o.category);
        for p in &o.parts {
            out.push(' ');
            write_part(&mut out, p);
        }
        out.push_str("))\n");
    }
    out.push_str("  )\n");
    if !spec.init.is_empty() {
        out.push_str("  (:init\n");
        for a in &spec.init {
            indent(&mut out, 2);
            write_atom(&mut out, a);
            out.push('\n');
        }
        out.push_str("  )\n");
    }
    if !spec.moving_objects.is_empty() {
        out.push_str("  (:moving_objects\n");
        for m in &spec.moving_objects {
            write_motion(&mut out, m);
        }
        out.push_str("  )\n");
    }
    out.push_str("  (:goal\n");
    write_expr(&mut out, &spec.goal, 2);
    out.push_str("  )\n");
    if !spec.cost.is_empty() {
        out.push_str("  (:cost\n");
        for c in &spec.cost {
            write_expr(&mut out, c, 2);
        }
        out.push_str("  )\n");
    }
    if let Some(s) = &spec.visual.image_settings {
        let _ = writeln!(
            out,
            "  (:image_settings (:brightness {}) (:contrast {}) (:saturation {}) (:temperature {}))",
            s.brightness, s.contrast, s.saturation, s.temperature
        );
    }
    if let Some((mode, _)) = &spec.visual.noise {
        match mode {
            NoiseMode::None => out.push_str("  (:noise none)\n"),
            NoiseMode::Gaussian { mean, var } => {
                let _ = writeln!(out, "  (:noise gaussian {mean} {var})");
            }
            NoiseMode::SaltPepper { prob } => {
                let _ = writeln!(out, "  (:noise salt_pepper {prob})");
            }
        }
    }
    if !spec.cameras.is_empty() {
        out.push_str("  (:camera");
        for c in &spec.cameras {
            out.push(' ');
            out.push_str(&c.name);
            if let Some(o) = c.offset {
                out.push(' ');
                vec3(&mut out, o);
            }
        }
        out.push_str(")\n");
    }
    if let Some(rc) = spec.visual.random_color {
        let _ = writeln!(out, "  (:random_color {rc})");
    }
    out.push_str(")\n");
    out
}
