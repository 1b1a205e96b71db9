//! Cumulative visual perturbation profiles and camera offsets.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kinematics::{Pose, Vec3};
use crate::syntax::NEUTRAL_TEMPERATURE;

/// Half width of the lighting deltas.
pub const LIGHT_DELTA: f64 = 0.75;
/// Color temperature range in Kelvin.
pub const TEMPERATURE_RANGE: (f64, f64) = (3500.0, 8500.0);
/// Per-channel object color range; alpha stays 1.
pub const COLOR_RANGE: (f64, f64) = (0.2, 0.8);
/// Half width of the per-axis camera offset, in meters.
pub const CAMERA_OFFSET: f64 = 0.105;
/// Gaussian sensor noise `(mean, variance)` on normalized intensities.
pub const NOISE: (f64, f64) = (0.0, 0.085);

/// Visual difficulty. Each level adds one perturbation family to the previous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VisualLevel {
    V0,
    /// Lighting.
    V1,
    /// Lighting and object colors.
    V2,
    /// Adds a camera offset.
    V3,
    /// Adds Gaussian sensor noise.
    V4,
}

impl VisualLevel {
    pub const ALL: [VisualLevel; 5] =
        [VisualLevel::V0, VisualLevel::V1, VisualLevel::V2, VisualLevel::V3, VisualLevel::V4];

    pub fn from_index(k: u8) -> Option<VisualLevel> {
        VisualLevel::ALL.get(usize::from(k)).copied()
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectColor {
    pub object: String,
    pub rgba: [f64; 4],
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VisualProfile {
    pub level: VisualLevel,
    pub brightness: f64,
    pub contrast: f64,
    pub saturation: f64,
    /// Kelvin; 6500 is neutral.
    pub temperature: f64,
    /// `None` leaves materials untouched.
    pub object_colors: Option<Vec<ObjectColor>>,
    pub camera_offset: Vec3,
    /// Gaussian `(mean, variance)`.
    pub noise: Option<(f64, f64)>,
}

impl Default for VisualProfile {
    fn default() -> Self {
        VisualProfile {
            level: VisualLevel::V0,
            brightness: 0.0,
            contrast: 0.0,
            saturation: 0.0,
            temperature: NEUTRAL_TEMPERATURE,
            object_colors: None,
            camera_offset: Vec3::ZERO,
            noise: None,
        }
    }
}

impl VisualProfile {
    /// Names of the fields that differ from the V0 profile.
    pub fn perturbed_fields(&self) -> Vec<&'static str> {
        let d = VisualProfile::default();
        let mut out = Vec::new();
        let mut check = |name, differs: bool| {
            if differs {
                out.push(name);
            }
        };
        check("brightness", self.brightness != d.brightness);
        check("contrast", self.contrast != d.contrast);
        check("saturation", self.saturation != d.saturation);
        check("temperature", self.temperature != d.temperature);
        check("object_colors", self.object_colors.is_some());
        check("camera_offset", self.camera_offset != d.camera_offset);
        check("noise", self.noise.is_some());
        out
    }
}

/// Samples a profile for `level`.
///
/// Every family is drawn from the same stream in a fixed order and then masked
/// by level, so for one seed a higher level extends a lower one. `objects`
/// receive colors from V2 on.
pub fn sample_profile(level: VisualLevel, seed: u64, objects: &[&str]) -> VisualProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let brightness = rng.random_range(-LIGHT_DELTA..LIGHT_DELTA);
    let contrast = rng.random_range(-LIGHT_DELTA..LIGHT_DELTA);
    let saturation = rng.random_range(-LIGHT_DELTA..LIGHT_DELTA);
    let temperature = rng.random_range(TEMPERATURE_RANGE.0..TEMPERATURE_RANGE.1);
    let camera_offset = Vec3::new(
        rng.random_range(-CAMERA_OFFSET..=CAMERA_OFFSET),
        rng.random_range(-CAMERA_OFFSET..=CAMERA_OFFSET),
        rng.random_range(-CAMERA_OFFSET..=CAMERA_OFFSET),
    );
    let colors = objects
        .iter()
        .map(|o| {
            let mut c = || rng.random_range(COLOR_RANGE.0..COLOR_RANGE.1);
            ObjectColor { object: (*o).into(), rgba: [c(), c(), c(), 1.0] }
        })
        .collect();

    let mut p = VisualProfile { level, ..VisualProfile::default() };
    if level >= VisualLevel::V1 {
        (p.brightness, p.contrast, p.saturation, p.temperature) = (brightness, contrast, saturation, temperature);
    }
    if level >= VisualLevel::V2 {
        p.object_colors = Some(colors);
    }
    if level >= VisualLevel::V3 {
        p.camera_offset = camera_offset;
    }
    if level >= VisualLevel::V4 {
        p.noise = Some(NOISE);
    }
    p
}

/// Shifts each position coordinate by `U(-half_width, half_width)`;
/// orientation is kept. A zero width returns `pose` unchanged.
pub fn perturb_camera(pose: Pose, seed: u64, half_width: f64) -> Pose {
    if half_width <= 0.0 {
        return pose;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = || rng.random_range(-half_width..=half_width);
    let offset = Vec3::new(d(), d(), d());
    Pose::new(pose.position + offset, pose.orientation)
}
