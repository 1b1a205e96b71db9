//! Core of the CBDDL task language.
//!
//! CBDDL is a predicate-logic task format for tabletop manipulation
//! benchmarks. On top of the classic `:objects`/`:init`/`:goal` problem triple
//! it adds kinematically driven moving objects, visual perturbation settings
//! and a `:cost` block of safety constraints.
//!
//! This crate is `no_std` (it needs `alloc`) and contains no IO:
//!
//! * [`syntax`] lexes, parses, validates and pretty-prints problem files.
//! * [`kinematics`] holds pose algebra and the moving-object generators.
//! * [`sim`] is an analytic contact model that replays agent actions.
//! * [`safety`] evaluates goals and accumulates safety costs.
//! * [`perturb`] produces graded language and visual perturbations.
//! * [`diversity`] measures task-space diversity with tree edit distance.
//!
//! File formats, the suite runner and the command-line tool live in the
//! `cbddl` crate.

#![no_std]
#![cfg_attr(docsrs, feature(doc_cfg))]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diversity;
pub mod kinematics;
pub mod perturb;
pub mod safety;
pub mod sim;
pub mod syntax;

pub use kinematics::{Pose, Quat, Vec3};
pub use syntax::{parse_problem, pretty_print, validate, Diagnostic, Severity, TaskSpec};
