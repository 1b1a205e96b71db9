//! Graded language and visual perturbations.
//!
//! Language level Wk replaces exactly k slots of an instruction template with
//! lexicon candidates. Visual level Vk is cumulative: V1 perturbs lighting,
//! V2 adds object colors, V3 a camera offset and V4 Gaussian sensor noise.

mod image;
mod language;
mod visual;

use alloc::string::String;

pub use image::{
    adjust_brightness, adjust_contrast, adjust_saturation, adjust_temperature, apply_enhancement, apply_gaussian_noise,
    apply_profile, apply_salt_pepper, gaussian_noise_field, temperature_gains, ImageBuffer, KELVIN_TABLE,
};
pub use language::{
    all_variants, sample_training_instruction, substitute, InstructionTemplate, Lexicon, Segment, DEFAULT_LEXICON,
};
pub use visual::{
    perturb_camera, sample_profile, ObjectColor, VisualLevel, VisualProfile, CAMERA_OFFSET, COLOR_RANGE, LIGHT_DELTA,
    NOISE, TEMPERATURE_RANGE,
};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PerturbError {
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("template: {0}")]
    Template(String),
    #[error("no lexicon entry for slot word `{0}`")]
    UnknownBase(String),
    #[error("level W{requested} needs {requested} slot(s), template has {available}")]
    NotEnoughSlots { requested: usize, available: usize },
    #[error("image of {width}x{height} needs {} bytes, got {len}", width * height * 3)]
    ImageSize { width: usize, height: usize, len: usize },
    #[error("noise variance must be finite and non-negative, got {0}")]
    Variance(f64),
    #[error("probability must lie in [0, 1], got {0}")]
    Probability(f64),
}
