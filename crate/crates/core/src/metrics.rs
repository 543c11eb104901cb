//! Watermark similarity and image fidelity measures.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::attacks::ATTACK_COUNT;
use crate::bitplane::BitPlane;
use crate::error::{Error, Result};
use crate::raster::Samples;

/// Tolerance on the sum of a weight profile.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Correlation between an embedded plane `w` and a retrieved plane `w_star`:
/// `Σ w·w* / sqrt(Σ w · Σ w*)`.
///
/// An all-zero plane against a non-empty one scores 0; two all-zero planes
/// score 1.
pub fn crc(w: &BitPlane, w_star: &BitPlane) -> Result<f64> {
    if w.dimensions() != w_star.dimensions() {
        return Err(Error::dims(w.dimensions(), w_star.dimensions()));
    }
    Ok(correlate(w.bits(), w_star.bits()))
}

/// Like [`crc`] on raw `{0, 1}` samples, rejecting anything else.
pub fn crc_samples(w: &[u8], w_star: &[u8]) -> Result<f64> {
    if w.len() != w_star.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            found: w_star.len(),
        });
    }
    if let Some(&bad) = w.iter().chain(w_star).find(|&&b| b > 1) {
        return Err(Error::NonBinary(bad));
    }
    Ok(correlate(w, w_star))
}

fn correlate(w: &[u8], w_star: &[u8]) -> f64 {
    let mut both = 0u64;
    let mut sum_w = 0u64;
    let mut sum_star = 0u64;
    for (&a, &b) in w.iter().zip(w_star) {
        both += (a & b) as u64;
        sum_w += a as u64;
        sum_star += b as u64;
    }
    match (sum_w, sum_star) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        _ => both as f64 / ((sum_w as f64) * (sum_star as f64)).sqrt(),
    }
}

pub fn mse<T: Samples + ?Sized>(a: &T, b: &T) -> Result<f64> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::dims(a.dimensions(), b.dimensions()));
    }
    let sum: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.samples().len() as f64)
}

/// Peak signal-to-noise ratio in dB; identical inputs are [`Psnr::Infinite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn from_mse(mse: f64) -> Psnr {
        if mse == 0.0 {
            Psnr::Infinite
        } else {
            Psnr::Finite(10.0 * (255.0f64 * 255.0 / mse).log10())
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Psnr::Finite(v) => v,
            Psnr::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Psnr::Infinite)
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v:.6}"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

pub fn psnr<T: Samples + ?Sized>(a: &T, b: &T) -> Result<Psnr> {
    mse(a, b).map(Psnr::from_mse)
}

/// Ten non-negative attack weightings summing to one, in canonical attack order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct WeightProfile {
    name: String,
    weights: [f64; ATTACK_COUNT],
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    name: String,
    weights: Vec<f64>,
}

impl TryFrom<ProfileRepr> for WeightProfile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        WeightProfile::new(r.name, &r.weights)
    }
}

impl From<WeightProfile> for ProfileRepr {
    fn from(p: WeightProfile) -> Self {
        ProfileRepr {
            name: p.name,
            weights: p.weights.to_vec(),
        }
    }
}

/// Bundled profiles in thousandths, so their sums can be checked exactly.
pub const PRESET_THOUSANDTHS: [(&str, [u32; ATTACK_COUNT]); 4] = [
    (
        "table1-p1",
        [100, 100, 100, 100, 100, 100, 100, 100, 100, 100],
    ),
    ("table1-p2", [50, 50, 50, 50, 50, 50, 200, 200, 200, 100]),
    ("table1-p3", [25, 50, 25, 25, 25, 50, 100, 400, 100, 200]),
    ("table1-p4", [25, 25, 50, 50, 50, 50, 50, 200, 300, 200]),
];

impl WeightProfile {
    pub fn new(name: impl Into<String>, weights: &[f64]) -> Result<Self> {
        let name = name.into();
        let weights: [f64; ATTACK_COUNT] =
            weights.try_into().map_err(|_| Error::LengthMismatch {
                expected: ATTACK_COUNT,
                found: weights.len(),
            })?;
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidProfile(format!(
                "{name}: weight {w} is negative or not finite"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidProfile(format!(
                "{name}: weights sum to {sum}, not 1"
            )));
        }
        Ok(Self { name, weights })
    }

    /// Equal weights across all ten attacks.
    pub fn uniform() -> Self {
        Self::preset("table1-p1").expect("bundled preset")
    }

    pub fn preset(name: &str) -> Result<Self> {
        let (name, parts) = PRESET_THOUSANDTHS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::InvalidProfile(format!("unknown preset {name:?}")))?;
        let weights = parts.map(|p| p as f64 / 1000.0);
        Self::new(*name, &weights)
    }

    pub fn presets() -> Vec<WeightProfile> {
        PRESET_THOUSANDTHS
            .iter()
            .map(|(n, _)| Self::preset(n).expect("bundled preset"))
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weights(&self) -> &[f64; ATTACK_COUNT] {
        &self.weights
    }
}

/// `Σ crc_i · a_i` over the ten attacks.
pub fn weighted_crc(crcs: &[f64], profile: &WeightProfile) -> Result<f64> {
    if crcs.len() != ATTACK_COUNT {
        return Err(Error::LengthMismatch {
            expected: ATTACK_COUNT,
            found: crcs.len(),
        });
    }
    Ok(crcs
        .iter()
        .zip(profile.weights.iter())
        .map(|(c, a)| c * a)
        .sum())
}
