//! Deterministic operations on 8-bit RGB images.

use alloc::vec::Vec;

use libm::{round, sqrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::visual::VisualProfile;
use super::PerturbError;
use crate::syntax::NEUTRAL_TEMPERATURE;

/// Kelvin to RGB rows `kelvin,r,g,b` at 100 K spacing.
pub const KELVIN_TABLE: &str = include_str!("../../data/kelvin_rgb.csv");

/// Row-major RGB8 pixels; `data.len() == width * height * 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<ImageBuffer, PerturbError> {
        if width.checked_mul(height).and_then(|n| n.checked_mul(3)) != Some(data.len()) {
            return Err(PerturbError::ImageSize { width, height, len: data.len() });
        }
        Ok(ImageBuffer { width, height, data })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> ImageBuffer {
        let data = rgb.iter().copied().cycle().take(width * height * 3).collect();
        ImageBuffer { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Left-right mirror.
    pub fn mirrored(&self) -> ImageBuffer {
        let mut data = Vec::with_capacity(self.data.len());
        for row in self.data.chunks_exact(self.width * 3) {
            for px in row.chunks_exact(3).rev() {
                data.extend_from_slice(px);
            }
        }
        ImageBuffer { width: self.width, height: self.height, data }
    }

    fn map_pixels(&self, mut f: impl FnMut([u8; 3]) -> [u8; 3]) -> ImageBuffer {
        let mut data = Vec::with_capacity(self.data.len());
        for px in self.data.chunks_exact(3) {
            data.extend_from_slice(&f([px[0], px[1], px[2]]));
        }
        ImageBuffer { width: self.width, height: self.height, data }
    }
}

fn quantize(v: f64) -> u8 {
    round(v).clamp(0.0, 255.0) as u8
}

/// ITU-R 601 luma in fixed point, exact and order independent.
fn gray(p: [u8; 3]) -> u32 {
    (u32::from(p[0]) * 19595 + u32::from(p[1]) * 38470 + u32::from(p[2]) * 7471 + 0x8000) >> 16
}

pub fn adjust_brightness(img: &ImageBuffer, factor: f64) -> ImageBuffer {
    img.map_pixels(|p| p.map(|c| quantize(factor * f64::from(c))))
}

/// Blends towards the mean gray level of the whole image.
pub fn adjust_contrast(img: &ImageBuffer, factor: f64) -> ImageBuffer {
    let n = img.data.len() / 3;
    if n == 0 {
        return img.clone();
    }
    let total: u64 = img.data.chunks_exact(3).map(|p| u64::from(gray([p[0], p[1], p[2]]))).sum();
    let mean = total as f64 / n as f64;
    img.map_pixels(|p| p.map(|c| quantize(mean + factor * (f64::from(c) - mean))))
}

/// Blends each pixel towards its own gray level.
pub fn adjust_saturation(img: &ImageBuffer, factor: f64) -> ImageBuffer {
    img.map_pixels(|p| {
        let g = f64::from(gray(p));
        p.map(|c| quantize(g + factor * (f64::from(c) - g)))
    })
}

fn kelvin_rows() -> Vec<[f64; 4]> {
    KELVIN_TABLE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split(',').map(|v| v.trim().parse::<f64>().expect("kelvin table is numeric"));
            [(); 4].map(|_| it.next().expect("kelvin table has four columns"))
        })
        .collect()
}

fn kelvin_rgb(rows: &[[f64; 4]], kelvin: f64) -> [f64; 3] {
    let first = rows[0];
    let last = rows[rows.len() - 1];
    if kelvin <= first[0] {
        return [first[1], first[2], first[3]];
    }
    if kelvin >= last[0] {
        return [last[1], last[2], last[3]];
    }
    let i = rows.partition_point(|r| r[0] <= kelvin) - 1;
    let (a, b) = (rows[i], rows[i + 1]);
    let t = (kelvin - a[0]) / (b[0] - a[0]);
    [1, 2, 3].map(|c| a[c] + t * (b[c] - a[c]))
}

/// Per-channel gains for a color temperature, equal to 1 at 6500 K.
pub fn temperature_gains(kelvin: f64) -> [f64; 3] {
    let rows = kelvin_rows();
    let t = kelvin_rgb(&rows, kelvin);
    let n = kelvin_rgb(&rows, NEUTRAL_TEMPERATURE);
    [t[0] / n[0], t[1] / n[1], t[2] / n[2]]
}

pub fn adjust_temperature(img: &ImageBuffer, kelvin: f64) -> ImageBuffer {
    let g = temperature_gains(kelvin);
    img.map_pixels(|p| [0, 1, 2].map(|c| quantize(g[c] * f64::from(p[c]))))
}

/// Brightness, contrast, saturation, then temperature, with factor
/// `1 + delta` for the first three and rounding after every stage.
pub fn apply_enhancement(img: &ImageBuffer, profile: &VisualProfile) -> ImageBuffer {
    let out = adjust_brightness(img, 1.0 + profile.brightness);
    let out = adjust_contrast(&out, 1.0 + profile.contrast);
    let out = adjust_saturation(&out, 1.0 + profile.saturation);
    adjust_temperature(&out, profile.temperature)
}

/// Raw noise samples `N(mean, var)` for `len` channel values, before clamping.
pub fn gaussian_noise_field(len: usize, mean: f64, var: f64, seed: u64) -> Result<Vec<f64>, PerturbError> {
    if !var.is_finite() || var < 0.0 {
        return Err(PerturbError::Variance(var));
    }
    let dist = Normal::new(mean, sqrt(var)).map_err(|_| PerturbError::Variance(var))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..len).map(|_| dist.sample(&mut rng)).collect())
}

/// Adds i.i.d. noise to every channel of the `[0, 1]`-normalized image, then
/// clamps and re-quantizes.
pub fn apply_gaussian_noise(img: &ImageBuffer, mean: f64, var: f64, seed: u64) -> Result<ImageBuffer, PerturbError> {
    let noise = gaussian_noise_field(img.data.len(), mean, var, seed)?;
    let data = img
        .data
        .iter()
        .zip(noise)
        .map(|(&c, n)| quantize((f64::from(c) / 255.0 + n).clamp(0.0, 1.0) * 255.0))
        .collect();
    Ok(ImageBuffer { width: img.width, height: img.height, data })
}

/// Selects each pixel with probability `prob` and sets all its channels to 0
/// or 255 with equal odds.
pub fn apply_salt_pepper(img: &ImageBuffer, prob: f64, seed: u64) -> Result<ImageBuffer, PerturbError> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(PerturbError::Probability(prob));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(img.map_pixels(|p| {
        let hit = rng.random::<f64>() < prob;
        let salt = rng.random::<bool>();
        match (hit, salt) {
            (true, true) => [255; 3],
            (true, false) => [0; 3],
            _ => p,
        }
    }))
}

/// Enhancement followed by the profile's Gaussian noise, if any.
pub fn apply_profile(img: &ImageBuffer, profile: &VisualProfile, seed: u64) -> Result<ImageBuffer, PerturbError> {
    let out = apply_enhancement(img, profile);
    match profile.noise {
        Some((mean, var)) => apply_gaussian_noise(&out, mean, var, seed),
        None => Ok(out),
    }
}
