//! Structural parser from s-expressions to [`TaskSpec`].

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::error::{ParseError, SyntaxError};
use super::lexer::{read_all, Sexp, Span};
use super::predicate::{ArgKind, Predicate};
use crate::kinematics::Vec3;

type PResult<T> = Result<T, ParseError>;

fn err<T>(node: &Sexp, message: impl Into<String>) -> PResult<T> {
    Err(ParseError { span: node.span(), token: node.describe(), message: message.into() })
}

fn err_at<T>(span: Span, token: &str, message: impl Into<String>) -> PResult<T> {
    Err(ParseError { span, token: token.to_string(), message: message.into() })
}

/// Parses one `(define (problem ...) ...)` form.
pub fn parse_problem(source: &str) -> Result<TaskSpec, SyntaxError> {
    let forms = read_all(source)?;
    let top = match forms.as_slice() {
        [one] => one,
        [] => return Err(err_at::<()>(Span::new(1, 1), "", "empty file, expected (define ...)").unwrap_err().into()),
        [_, second, ..] => return Err(err::<()>(second, "expected a single (define ...) form").unwrap_err().into()),
    };
    Ok(parse_define(top)?)
}

fn expect_list<'a>(node: &'a Sexp, what: &str) -> PResult<&'a [Sexp]> {
    match node.as_list() {
        Some(items) => Ok(items),
        None => err(node, format!("expected {what}")),
    }
}

fn expect_symbol<'a>(node: &'a Sexp, what: &str) -> PResult<&'a str> {
    match node.as_symbol() {
        Some(s) => Ok(s),
        None => err(node, format!("expected {what}")),
    }
}

fn identifier<'a>(node: &'a Sexp, what: &str) -> PResult<&'a str> {
    let s = expect_symbol(node, what)?;
    if s.starts_with(':') {
        return err(node, format!("expected {what}, found keyword"));
    }
    Ok(s)
}

fn number(node: &Sexp, what: &str) -> PResult<f64> {
    match node {
        Sexp::Number(v, _) => Ok(*v),
        _ => err(node, format!("expected {what}")),
    }
}

fn count(node: &Sexp, what: &str) -> PResult<u32> {
    let v = number(node, what)?;
    if v < 0.0 || v != libm::trunc(v) || v > u32::MAX as f64 {
        return err(node, format!("expected non-negative integer {what}"));
    }
    Ok(v as u32)
}

fn vec3(node: &Sexp, what: &str) -> PResult<Vec3> {
    let items = expect_list(node, what)?;
    if items.len() != 3 {
        return err(node, format!("expected {what} with 3 components, got {}", items.len()));
    }
    Ok(Vec3::new(number(&items[0], what)?, number(&items[1], what)?, number(&items[2], what)?))
}

/// Splits `(:keyword args...)` into its keyword and arguments.
fn keyword_form(node: &Sexp) -> PResult<(&str, &[Sexp])> {
    let items = expect_list(node, "a (:keyword ...) block")?;
    match items.split_first() {
        Some((Sexp::Symbol(k, _), rest)) if k.starts_with(':') => Ok((k.as_str(), rest)),
        _ => err(node, "expected a (:keyword ...) block"),
    }
}

fn exactly<'a>(node: &Sexp, args: &'a [Sexp], n: usize, what: &str) -> PResult<&'a [Sexp]> {
    if args.len() != n {
        return err(node, format!("wrong arity: {what} takes {n} argument(s), got {}", args.len()));
    }
    Ok(args)
}

#[derive(Default)]
struct Blocks<'a> {
    domain: Option<&'a Sexp>,
    language: Option<&'a Sexp>,
    objects: Option<&'a Sexp>,
    init: Option<&'a Sexp>,
    goal: Option<&'a Sexp>,
    cost: Option<&'a Sexp>,
    moving: Option<&'a Sexp>,
    image: Option<&'a Sexp>,
    noise: Option<&'a Sexp>,
    camera: Option<&'a Sexp>,
    random_color: Option<&'a Sexp>,
}

fn parse_define(top: &Sexp) -> PResult<TaskSpec> {
    let items = expect_list(top, "(define ...)")?;
    match items.first() {
        Some(Sexp::Symbol(s, _)) if s == "define" => {}
        _ => return err(top, "expected (define (problem NAME) ...)"),
    }
    let header = items.get(1).map_or_else(|| err(top, "missing (problem NAME)"), Ok)?;
    let name = match header.as_list() {
        Some([Sexp::Symbol(p, _), n]) if p == "problem" => identifier(n, "problem name")?.to_string(),
        _ => return err(header, "expected (problem NAME)"),
    };

    let mut blocks = Blocks::default();
    for block in &items[2..] {
        let (kw, _) = keyword_form(block)?;
        let slot = match kw {
            ":domain" => &mut blocks.domain,
            ":language" => &mut blocks.language,
            ":objects" => &mut blocks.objects,
            ":init" => &mut blocks.init,
            ":goal" => &mut blocks.goal,
            ":cost" => &mut blocks.cost,
            ":moving_objects" => &mut blocks.moving,
            ":image_settings" => &mut blocks.image,
            ":noise" => &mut blocks.noise,
            ":camera" => &mut blocks.camera,
            ":random_color" => &mut blocks.random_color,
            other => return err(block, format!("unknown block keyword {other}")),
        };
        if slot.is_some() {
            return err(block, format!("duplicate block {kw}"));
        }
        *slot = Some(block);
    }

    let domain = match blocks.domain {
        Some(b) => {
            let args = exactly(b, keyword_form(b)?.1, 1, ":domain")?;
            identifier(&args[0], "domain name")?.to_string()
        }
        None => return err(top, "missing (:domain ...) block"),
    };
    let language = match blocks.language {
        Some(b) => {
            let args = exactly(b, keyword_form(b)?.1, 1, ":language")?;
            match &args[0] {
                Sexp::Str(s, _) => Some(s.clone()),
                other => return err(other, "expected instruction string"),
            }
        }
        None => None,
    };
    let objects = match blocks.objects {
        Some(b) => keyword_form(b)?.1.iter().map(parse_object).collect::<PResult<Vec<_>>>()?,
        None => return err(top, "missing (:objects ...) block"),
    };
    let init = match blocks.init {
        Some(b) => keyword_form(b)?
            .1
            .iter()
            .map(|n| match parse_expr(n)? {
                Expr::Atom(a) => Ok(a),
                _ => err(n, ":init accepts only ground atoms"),
            })
            .collect::<PResult<Vec<_>>>()?,
        None => Vec::new(),
    };
    let goal = match blocks.goal {
        Some(b) => {
            let args = exactly(b, keyword_form(b)?.1, 1, ":goal")?;
            parse_expr(&args[0])?
        }
        None => return err(top, "missing (:goal ...) block"),
    };
    let cost = match blocks.cost {
        Some(b) => keyword_form(b)?.1.iter().map(parse_expr).collect::<PResult<Vec<_>>>()?,
        None => Vec::new(),
    };
    let moving_objects = match blocks.moving {
        Some(b) => keyword_form(b)?.1.iter().map(parse_motion).collect::<PResult<Vec<_>>>()?,
        None => Vec::new(),
    };
    let visual = VisualSpec {
        image_settings: blocks.image.map(parse_image_settings).transpose()?,
        noise: blocks.noise.map(parse_noise).transpose()?,
        random_color: match blocks.random_color {
            Some(b) => {
                let args = exactly(b, keyword_form(b)?.1, 1, ":random_color")?;
                match args[0].as_symbol() {
                    Some("true") => Some(true),
                    Some("false") => Some(false),
                    _ => return err(&args[0], "expected true or false"),
                }
            }
            None => None,
        },
    };
    let cameras = match blocks.camera {
        Some(b) => parse_cameras(keyword_form(b)?.1)?,
        None => Vec::new(),
    };

    Ok(TaskSpec { name, domain, language, objects, moving_objects, init, goal, cost, visual, cameras })
}

fn parse_object(node: &Sexp) -> PResult<ObjectDecl> {
    let items = expect_list(node, "object declaration (name category ...)")?;
    if items.len() < 2 || items.len() > 3 {
        return err(node, "object declaration must be (name category [(:parts ...)])");
    }
    let name = identifier(&items[0], "object name")?.to_string();
    let category = identifier(&items[1], "object category")?.to_string();
    let loc = Loc(node.span());
    let parts = match items.get(2) {
        Some(p) => {
            let (kw, rest) = keyword_form(p)?;
            if kw != ":parts" {
                return err(p, format!("unknown object attribute {kw}"));
            }
            rest.iter().map(parse_part).collect::<PResult<Vec<_>>>()?
        }
        None => alloc::vec![default_part(loc)],
    };
    Ok(ObjectDecl { name, category, parts, loc })
}

fn parse_part(node: &Sexp) -> PResult<PartDecl> {
    let items = expect_list(node, "part (index shape size [offset])")?;
    if items.len() < 3 || items.len() > 4 {
        return err(node, "part must be (index sphere R [(x y z)]) or (index box (hx hy hz) [(x y z)])");
    }
    let index = count(&items[0], "part index")?;
    let shape = match expect_symbol(&items[1], "part shape")? {
        "sphere" => Shape::Sphere { radius: number(&items[2], "sphere radius")? },
        "box" => Shape::Box { half_extents: vec3(&items[2], "box half extents")? },
        _ => return err(&items[1], "part shape must be sphere or box"),
    };
    let offset = match items.get(3) {
        Some(o) => vec3(o, "part offset")?,
        None => Vec3::ZERO,
    };
    Ok(PartDecl { index, shape, offset, loc: Loc(node.span()) })
}

pub(crate) fn parse_expr(node: &Sexp) -> PResult<Expr> {
    let items = expect_list(node, "expression")?;
    let (head, args) = match items.split_first() {
        Some((h, rest)) => (expect_symbol(h, "connective or predicate name")?, rest),
        None => return err(node, "empty expression"),
    };
    match head {
        "And" | "Or" => {
            if args.len() < 2 {
                return err(node, format!("wrong arity: {head} requires at least 2 children, got {}", args.len()));
            }
            let children = args.iter().map(parse_expr).collect::<PResult<Vec<_>>>()?;
            Ok(if head == "And" { Expr::And(children) } else { Expr::Or(children) })
        }
        "Not" => {
            let args = exactly(node, args, 1, "Not")?;
            Ok(Expr::Not(Box::new(parse_expr(&args[0])?)))
        }
        name => {
            let predicate = match Predicate::from_name(name) {
                Some(p) => p,
                None => return err(&items[0], format!("unknown predicate {name}")),
            };
            let schema = predicate.schema();
            if args.len() != schema.len() {
                return err(
                    node,
                    format!("wrong arity: {name} takes {} argument(s), got {}", schema.len(), args.len()),
                );
            }
            let args = args.iter().zip(schema).map(|(a, kind)| parse_arg(a, *kind)).collect::<PResult<Vec<_>>>()?;
            Ok(Expr::Atom(Atom { predicate, args, loc: Loc(node.span()) }))
        }
    }
}

fn parse_arg(node: &Sexp, kind: ArgKind) -> PResult<Arg> {
    match kind {
        ArgKind::Entity => Ok(Arg::Name(identifier(node, "object name")?.to_string())),
        ArgKind::Number => Ok(Arg::Number(number(node, "number")?)),
        ArgKind::Vec3 => Ok(Arg::List(vec3(node, "position")?.to_array().to_vec())),
        ArgKind::Ids => {
            let items = expect_list(node, "part index list")?;
            let ids = items.iter().map(|n| count(n, "part index").map(f64::from)).collect::<PResult<Vec<_>>>()?;
            if ids.is_empty() {
                return err(node, "part index list is empty");
            }
            Ok(Arg::List(ids))
        }
    }
}

fn parse_motion(node: &Sexp) -> PResult<MotionSpec> {
    let items = expect_list(node, "moving object (name (:motion_type t) ...)")?;
    let (name, attrs) = match items.split_first() {
        Some((n, rest)) => (identifier(n, "moving object name")?.to_string(), rest),
        None => return err(node, "empty moving object entry"),
    };

    let mut motion_type: Option<(&str, &Sexp)> = None;
    let mut found: Vec<(&str, &Sexp, &Sexp)> = Vec::new();
    for attr in attrs {
        let (kw, args) = keyword_form(attr)?;
        let args = exactly(attr, args, 1, kw)?;
        if found.iter().any(|(k, _, _)| *k == kw) || (kw == ":motion_type" && motion_type.is_some()) {
            return err(attr, format!("duplicate attribute {kw}"));
        }
        if kw == ":motion_type" {
            motion_type = Some((expect_symbol(&args[0], "motion type")?, attr));
        } else {
            found.push((kw, &args[0], attr));
        }
    }
    let (ty, _) = motion_type.map_or_else(|| err(node, "missing (:motion_type ...)"), Ok)?;
    let allowed: &[&str] = match ty {
        "linear" => &[":motion_period", ":motion_travel_dist", ":motion_direction"],
        "circular" => &[":motion_center", ":motion_period"],
        "waypoints" => &[":motion_waypoints", ":motion_period"],
        "projectile" => &[":motion_initial_speed", ":motion_direction", ":motion_gravity"],
        _ => return err(node, format!("unknown motion type {ty}")),
    };
    for (kw, _, attr) in &found {
        if !allowed.contains(kw) {
            let known = [
                ":motion_period",
                ":motion_travel_dist",
                ":motion_direction",
                ":motion_center",
                ":motion_waypoints",
                ":motion_initial_speed",
                ":motion_gravity",
            ];
            if known.contains(kw) {
                return err(attr, format!("attribute {kw} is not valid for {ty} motion"));
            }
            return err(attr, format!("unknown motion attribute {kw}"));
        }
    }
    let get = |kw: &str| -> PResult<&Sexp> {
        match found.iter().find(|(k, _, _)| *k == kw) {
            Some((_, v, _)) => Ok(v),
            None => err(node, format!("{ty} motion requires {kw}")),
        }
    };
    let motion = match ty {
        "linear" => Motion::Linear {
            period: count(get(":motion_period")?, "motion period")?,
            travel_dist: number(get(":motion_travel_dist")?, "travel distance")?,
            direction: vec3(get(":motion_direction")?, "direction")?,
        },
        "circular" => Motion::Circular {
            center: vec3(get(":motion_center")?, "center")?,
            period: count(get(":motion_period")?, "motion period")?,
        },
        "waypoints" => {
            let list = get(":motion_waypoints")?;
            let waypoints = expect_list(list, "waypoint list")?
                .iter()
                .map(|w| {
                    let v = expect_list(w, "waypoint (x y z dir_x dir_y dir_z)")?;
                    if v.len() != 6 {
                        return err(w, format!("waypoint needs 6 numbers, got {}", v.len()));
                    }
                    let n = v.iter().map(|x| number(x, "waypoint component")).collect::<PResult<Vec<_>>>()?;
                    Ok(Waypoint { position: Vec3::new(n[0], n[1], n[2]), direction: Vec3::new(n[3], n[4], n[5]) })
                })
                .collect::<PResult<Vec<_>>>()?;
            let period = match found.iter().find(|(k, _, _)| *k == ":motion_period") {
                Some((_, v, _)) => count(v, "motion period")?,
                None => DEFAULT_WAYPOINT_PERIOD,
            };
            Motion::Waypoints { waypoints, period }
        }
        _ => Motion::Projectile {
            initial_speed: number(get(":motion_initial_speed")?, "initial speed")?,
            direction: vec3(get(":motion_direction")?, "direction")?,
            gravity: vec3(get(":motion_gravity")?, "gravity")?,
        },
    };
    Ok(MotionSpec { object: name, motion, loc: Loc(node.span()) })
}

fn parse_image_settings(block: &Sexp) -> PResult<ImageSettings> {
    let mut s = ImageSettings { loc: Loc(block.span()), ..ImageSettings::default() };
    let mut seen: Vec<&str> = Vec::new();
    for attr in keyword_form(block)?.1 {
        let (kw, args) = keyword_form(attr)?;
        let args = exactly(attr, args, 1, kw)?;
        if seen.contains(&kw) {
            return err(attr, format!("duplicate attribute {kw}"));
        }
        seen.push(kw);
        let v = number(&args[0], kw)?;
        match kw {
            ":brightness" => s.brightness = v,
            ":contrast" => s.contrast = v,
            ":saturation" => s.saturation = v,
            ":temperature" => s.temperature = v,
            _ => return err(attr, format!("unknown image setting {kw}")),
        }
    }
    Ok(s)
}

fn parse_noise(block: &Sexp) -> PResult<(NoiseMode, Loc)> {
    let args = keyword_form(block)?.1;
    let mode = match args.split_first() {
        Some((m, rest)) => match expect_symbol(m, "noise mode")? {
            "none" => {
                exactly(block, rest, 0, "none")?;
                NoiseMode::None
            }
            "gaussian" => {
                let r = exactly(block, rest, 2, "gaussian")?;
                NoiseMode::Gaussian { mean: number(&r[0], "mean")?, var: number(&r[1], "variance")? }
            }
            "salt_pepper" => {
                let r = exactly(block, rest, 1, "salt_pepper")?;
                NoiseMode::SaltPepper { prob: number(&r[0], "probability")? }
            }
            _ => return err(m, "noise mode must be none, gaussian or salt_pepper"),
        },
        None => return err(block, "missing noise mode"),
    };
    Ok((mode, Loc(block.span())))
}

fn parse_cameras(args: &[Sexp]) -> PResult<Vec<CameraDecl>> {
    let mut out: Vec<CameraDecl> = Vec::new();
    for node in args {
        match node {
            Sexp::Symbol(..) => {
                out.push(CameraDecl { name: identifier(node, "camera name")?.to_string(), offset: None })
            }
            Sexp::List(..) => {
                let v = vec3(node, "camera offset")?;
                match out.last_mut() {
                    Some(cam) if cam.offset.is_none() => cam.offset = Some(v),
                    _ => return err(node, "camera offset must follow a camera name"),
                }
            }
            _ => return err(node, "expected camera name or offset"),
        }
    }
    Ok(out)
}
