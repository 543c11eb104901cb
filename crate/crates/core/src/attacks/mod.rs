//! The ten robustness attacks, in their canonical order.
//!
//! Every attack preserves the canvas size so that blind, positional plane
//! extraction stays defined on the attacked image.

mod jpeg;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::GrayImage;
use crate::rng::BitSource;

pub use jpeg::{scaled_table, LUMA_QUANT};

/// Number of attacks in a full evaluation.
pub const ATTACK_COUNT: usize = 10;

/// Seed used for salt-and-pepper noise when none is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttackKind {
    AngleRotation,
    RotateTransform,
    Crop,
    LowPassFilter,
    Quantization,
    Translation,
    ContrastStretch,
    SaltPepper,
    Compression,
    Shrink,
}

impl AttackKind {
    pub const ALL: [AttackKind; ATTACK_COUNT] = [
        AttackKind::AngleRotation,
        AttackKind::RotateTransform,
        AttackKind::Crop,
        AttackKind::LowPassFilter,
        AttackKind::Quantization,
        AttackKind::Translation,
        AttackKind::ContrastStretch,
        AttackKind::SaltPepper,
        AttackKind::Compression,
        AttackKind::Shrink,
    ];

    /// Position in the canonical ordering, 1-based.
    pub fn ordinal(self) -> usize {
        self as usize + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            AttackKind::AngleRotation => "angle-rotation",
            AttackKind::RotateTransform => "rotate-transform",
            AttackKind::Crop => "crop",
            AttackKind::LowPassFilter => "low-pass-filter",
            AttackKind::Quantization => "quantization",
            AttackKind::Translation => "translation",
            AttackKind::ContrastStretch => "contrast-stretch",
            AttackKind::SaltPepper => "salt-pepper",
            AttackKind::Compression => "compression",
            AttackKind::Shrink => "shrink",
        }
    }

    /// The attack of this kind with its default parameters.
    pub fn default_attack(self) -> Attack {
        match self {
            AttackKind::AngleRotation => Attack::AngleRotation { degrees: 5.0 },
            AttackKind::RotateTransform => Attack::RotateTransform { degrees: 5.0 },
            AttackKind::Crop => Attack::Crop { fraction: 0.41 },
            AttackKind::LowPassFilter => Attack::LowPassFilter { size: 3 },
            AttackKind::Quantization => Attack::Quantization { step: 4 },
            AttackKind::Translation => Attack::Translation { dx: 5, dy: 5 },
            AttackKind::ContrastStretch => Attack::ContrastStretch,
            AttackKind::SaltPepper => Attack::SaltPepper {
                density: 0.02,
                seed: DEFAULT_SEED,
            },
            AttackKind::Compression => Attack::Compression { quality: 75 },
            AttackKind::Shrink => Attack::Shrink { factor: 2 },
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownAttack(s.to_string()))
    }
}

/// One attack together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Attack {
    /// Rotate counterclockwise about the centre, nearest neighbour, zero fill.
    AngleRotation { degrees: f64 },
    /// Rotate by `+degrees` then back by `-degrees`.
    RotateTransform { degrees: f64 },
    /// Zero a centred horizontal band covering `fraction` of the rows.
    Crop { fraction: f64 },
    /// `size`×`size` box mean with clamped borders.
    LowPassFilter { size: u32 },
    /// `step * floor(pixel / step)`.
    Quantization { step: u32 },
    /// Shift content right by `dx` and down by `dy`, zero fill.
    Translation { dx: i64, dy: i64 },
    /// Linear min-max stretch to the full 0..=255 range.
    ContrastStretch,
    /// Each pixel becomes 0 or 255 with probability `density`.
    SaltPepper { density: f64, seed: u64 },
    /// 8×8 block DCT round trip at the given JPEG quality.
    Compression { quality: u8 },
    /// Block-average down by `factor`, replicate back up.
    Shrink { factor: u32 },
}

impl Attack {
    pub fn kind(&self) -> AttackKind {
        match self {
            Attack::AngleRotation { .. } => AttackKind::AngleRotation,
            Attack::RotateTransform { .. } => AttackKind::RotateTransform,
            Attack::Crop { .. } => AttackKind::Crop,
            Attack::LowPassFilter { .. } => AttackKind::LowPassFilter,
            Attack::Quantization { .. } => AttackKind::Quantization,
            Attack::Translation { .. } => AttackKind::Translation,
            Attack::ContrastStretch => AttackKind::ContrastStretch,
            Attack::SaltPepper { .. } => AttackKind::SaltPepper,
            Attack::Compression { .. } => AttackKind::Compression,
            Attack::Shrink { .. } => AttackKind::Shrink,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Attack::AngleRotation { degrees } | Attack::RotateTransform { degrees } => {
                if !degrees.is_finite() || degrees.abs() > 360.0 {
                    return bad(format!("rotation angle {degrees} outside [-360, 360]"));
                }
            }
            Attack::Crop { fraction } => {
                if !(0.0..=1.0).contains(&fraction) {
                    return bad(format!("crop fraction {fraction} outside [0, 1]"));
                }
            }
            Attack::LowPassFilter { size } => {
                if size == 0 || size % 2 == 0 || size > 255 {
                    return bad(format!("filter size {size} must be odd and in 1..=255"));
                }
            }
            Attack::Quantization { step } => {
                if !(1..=255).contains(&step) {
                    return bad(format!("quantization step {step} outside 1..=255"));
                }
            }
            Attack::Translation { dx, dy } => {
                const LIMIT: i64 = 1 << 20;
                if dx.abs() > LIMIT || dy.abs() > LIMIT {
                    return bad(format!("translation ({dx}, {dy}) too large"));
                }
            }
            Attack::ContrastStretch => {}
            Attack::SaltPepper { density, .. } => {
                if !(0.0..=1.0).contains(&density) {
                    return bad(format!("noise density {density} outside [0, 1]"));
                }
            }
            Attack::Compression { quality } => {
                if !(1..=100).contains(&quality) {
                    return bad(format!("quality {quality} outside 1..=100"));
                }
            }
            Attack::Shrink { factor } => {
                if !(1..=256).contains(&factor) {
                    return bad(format!("shrink factor {factor} outside 1..=256"));
                }
            }
        }
        Ok(())
    }

    /// Replaces the seed of a salt-and-pepper attack; other kinds are returned unchanged.
    pub fn with_seed(self, seed: u64) -> Attack {
        match self {
            Attack::SaltPepper { density, .. } => Attack::SaltPepper { density, seed },
            other => other,
        }
    }
}

/// The default ten-attack suite, canonical order.
pub fn default_suite(seed: u64) -> [Attack; ATTACK_COUNT] {
    AttackKind::ALL.map(|k| k.default_attack().with_seed(seed))
}

/// Checks that `attacks` holds exactly ten valid attacks.
///
/// Position `i` is scored with weight `a_i`; the default suite follows the
/// canonical kind order, custom suites may deviate.
pub fn validate_suite(attacks: &[Attack]) -> Result<()> {
    if attacks.len() != ATTACK_COUNT {
        return Err(Error::LengthMismatch {
            expected: ATTACK_COUNT,
            found: attacks.len(),
        });
    }
    attacks.iter().try_for_each(Attack::validate)
}

/// True when the suite lists the ten kinds in canonical order.
pub fn is_canonical_order(attacks: &[Attack]) -> bool {
    attacks.len() == ATTACK_COUNT
        && attacks
            .iter()
            .zip(AttackKind::ALL)
            .all(|(a, k)| a.kind() == k)
}

pub fn apply_attack(img: &GrayImage, attack: &Attack) -> Result<GrayImage> {
    attack.validate()?;
    Ok(match *attack {
        Attack::AngleRotation { degrees } => rotate(img, degrees),
        Attack::RotateTransform { degrees } => rotate(&rotate(img, degrees), -degrees),
        Attack::Crop { fraction } => crop_band(img, fraction),
        Attack::LowPassFilter { size } => box_filter(img, size as usize),
        Attack::Quantization { step } => {
            let step = step as u16;
            img.map(|p| ((p as u16 / step) * step) as u8)
        }
        Attack::Translation { dx, dy } => translate(img, dx, dy),
        Attack::ContrastStretch => contrast_stretch(img),
        Attack::SaltPepper { density, seed } => salt_pepper(img, density, seed),
        Attack::Compression { quality } => jpeg::compress(img, quality),
        Attack::Shrink { factor } => shrink(img, factor as usize),
    })
}

fn rotate(img: &GrayImage, degrees: f64) -> GrayImage {
    let (w, h) = img.dimensions();
    let (sin, cos) = degrees.to_radians().sin_cos();
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    GrayImage::from_fn(w, h, |r, c| {
        let x = c as f64 - cx;
        let y = r as f64 - cy;
        // inverse map of a counterclockwise turn with the y axis pointing down
        let sx = (cos * x - sin * y + cx).round();
        let sy = (sin * x + cos * y + cy).round();
        if sx >= 0.0 && sy >= 0.0 && (sx as usize) < w && (sy as usize) < h {
            img.get(sy as usize, sx as usize)
        } else {
            0
        }
    })
    .expect("dimensions preserved")
}

/// Rows in the zeroed band for a given height.
pub fn crop_band_rows(height: usize, fraction: f64) -> usize {
    ((fraction * height as f64).round() as usize).min(height)
}

fn crop_band(img: &GrayImage, fraction: f64) -> GrayImage {
    let (w, h) = img.dimensions();
    let rows = crop_band_rows(h, fraction);
    let start = (h - rows) / 2;
    let band = start..start + rows;
    GrayImage::from_fn(
        w,
        h,
        |r, c| if band.contains(&r) { 0 } else { img.get(r, c) },
    )
    .expect("dimensions preserved")
}

fn box_filter(img: &GrayImage, size: usize) -> GrayImage {
    let (w, h) = img.dimensions();
    let radius = (size / 2) as isize;
    let n = (size * size) as u32;
    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;
    GrayImage::from_fn(w, h, |r, c| {
        let mut sum = 0u32;
        for dy in -radius..=radius {
            let rr = clamp(r as isize + dy, h);
            for dx in -radius..=radius {
                sum += img.get(rr, clamp(c as isize + dx, w)) as u32;
            }
        }
        ((sum + n / 2) / n) as u8
    })
    .expect("dimensions preserved")
}

fn translate(img: &GrayImage, dx: i64, dy: i64) -> GrayImage {
    let (w, h) = img.dimensions();
    GrayImage::from_fn(w, h, |r, c| {
        let sr = r as i64 - dy;
        let sc = c as i64 - dx;
        if sr >= 0 && sc >= 0 && (sr as usize) < h && (sc as usize) < w {
            img.get(sr as usize, sc as usize)
        } else {
            0
        }
    })
    .expect("dimensions preserved")
}

fn contrast_stretch(img: &GrayImage) -> GrayImage {
    let min = *img.pixels().iter().min().expect("non-empty") as u32;
    let max = *img.pixels().iter().max().expect("non-empty") as u32;
    if min == max {
        return img.clone();
    }
    let range = max - min;
    img.map(|p| (((p as u32 - min) * 510 + range) / (2 * range)) as u8)
}

fn salt_pepper(img: &GrayImage, density: f64, seed: u64) -> GrayImage {
    let mut rng = BitSource::new(seed);
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| {
            if rng.next_unit() < density {
                if rng.next_bit() == 1 {
                    255
                } else {
                    0
                }
            } else {
                p
            }
        })
        .collect();
    GrayImage::new(img.width(), img.height(), pixels).expect("dimensions preserved")
}

fn shrink(img: &GrayImage, factor: usize) -> GrayImage {
    if factor == 1 {
        return img.clone();
    }
    let (w, h) = img.dimensions();
    let sw = w.div_ceil(factor);
    let sh = h.div_ceil(factor);
    let mut small = vec![0u8; sw * sh];
    for br in 0..sh {
        for bc in 0..sw {
            let rows = br * factor..((br + 1) * factor).min(h);
            let cols = bc * factor..((bc + 1) * factor).min(w);
            let n = (rows.len() * cols.len()) as u32;
            let sum: u32 = rows
                .flat_map(|r| cols.clone().map(move |c| (r, c)))
                .map(|(r, c)| img.get(r, c) as u32)
                .sum();
            small[br * sw + bc] = ((sum + n / 2) / n) as u8;
        }
    }
    GrayImage::from_fn(w, h, |r, c| small[(r / factor) * sw + c / factor])
        .expect("dimensions preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(w: usize, h: usize) -> GrayImage {
        GrayImage::from_fn(w, h, |r, c| ((r * 31 + c * 7) % 256) as u8).unwrap()
    }

    fn noise(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut rng = BitSource::new(seed);
        GrayImage::from_fn(w, h, |_, _| (rng.next_u64() >> 56) as u8).unwrap()
    }

    #[test]
    fn canonical_order_and_names() {
        let suite = default_suite(DEFAULT_SEED);
        for (i, a) in suite.iter().enumerate() {
            assert_eq!(a.kind().ordinal(), i + 1);
            assert_eq!(a.kind().name().parse::<AttackKind>().unwrap(), a.kind());
        }
        assert!(matches!(
            "blur".parse::<AttackKind>(),
            Err(Error::UnknownAttack(_))
        ));
        validate_suite(&suite).unwrap();
    }

    #[test]
    fn suite_checks() {
        let mut suite = default_suite(1);
        assert!(is_canonical_order(&suite));
        suite.swap(0, 1);
        assert!(!is_canonical_order(&suite));
        assert!(validate_suite(&suite).is_ok());
        assert!(validate_suite(&suite[..9]).is_err());
        suite[3] = Attack::LowPassFilter { size: 2 };
        assert!(validate_suite(&suite).is_err());
    }

    #[test]
    fn zero_density_noise_is_identity() {
        let img = ramp(17, 11);
        for seed in [0, 9, 12345] {
            let out = apply_attack(&img, &Attack::SaltPepper { density: 0.0, seed }).unwrap();
            assert_eq!(out, img);
        }
    }

    #[test]
    fn full_density_noise_is_binary() {
        let img = ramp(32, 32);
        let out = apply_attack(
            &img,
            &Attack::SaltPepper {
                density: 1.0,
                seed: 3,
            },
        )
        .unwrap();
        assert!(out.pixels().iter().all(|&p| p == 0 || p == 255));
    }

    #[test]
    fn translation_shifts_right() {
        let img = GrayImage::new(2, 2, vec![10, 20, 30, 40]).unwrap();
        let out = apply_attack(&img, &Attack::Translation { dx: 1, dy: 0 }).unwrap();
        assert_eq!(out.pixels(), &[0, 10, 0, 30]);
        let out = apply_attack(&img, &Attack::Translation { dx: 0, dy: -1 }).unwrap();
        assert_eq!(out.pixels(), &[30, 40, 0, 0]);
    }

    #[test]
    fn quantization_example() {
        let img = GrayImage::filled(1, 1, 178).unwrap();
        let out = apply_attack(&img, &Attack::Quantization { step: 4 }).unwrap();
        assert_eq!(out.pixels(), &[176]);
    }

    #[test]
    fn crop_fraction_within_one_row() {
        let img = GrayImage::filled(256, 256, 200).unwrap();
        let out = apply_attack(&img, &Attack::Crop { fraction: 0.41 }).unwrap();
        let zeroed = out.pixels().iter().filter(|&&p| p == 0).count();
        let frac = zeroed as f64 / 65536.0;
        assert!((frac - 0.41).abs() <= 1.0 / 256.0, "fraction {frac}");
        assert_eq!(crop_band_rows(256, 0.41), 105);
        // band is centred
        // rows 75..180 are zeroed
        assert_eq!(out.get(74, 0), 200);
        assert_eq!(out.get(75, 0), 0);
        assert_eq!(out.get(179, 0), 0);
        assert_eq!(out.get(180, 0), 200);
    }

    #[test]
    fn box_filter_rounds_half_up() {
        // 3x3 clamped window around centre of [[0,0,0],[0,1,0],[0,0,0]] holds a single 1
        let img = GrayImage::new(3, 3, vec![0, 0, 0, 0, 5, 0, 0, 0, 0]).unwrap();
        let out = apply_attack(&img, &Attack::LowPassFilter { size: 3 }).unwrap();
        // 5 / 9 = 0.56 -> 1 everywhere the centre is in the window
        assert!(out.pixels().iter().all(|&p| p == 1));
        let flat = GrayImage::filled(5, 4, 77).unwrap();
        assert_eq!(
            apply_attack(&flat, &Attack::LowPassFilter { size: 5 }).unwrap(),
            flat
        );
    }

    #[test]
    fn contrast_stretch_maps_extremes() {
        let img = GrayImage::new(3, 1, vec![50, 100, 150]).unwrap();
        let out = apply_attack(&img, &Attack::ContrastStretch).unwrap();
        // (100 - 50) * 255 / 100 = 127.5 -> 128
        assert_eq!(out.pixels(), &[0, 128, 255]);
        let flat = GrayImage::filled(4, 4, 9).unwrap();
        assert_eq!(apply_attack(&flat, &Attack::ContrastStretch).unwrap(), flat);
    }

    #[test]
    fn shrink_averages_blocks() {
        let img = GrayImage::new(2, 2, vec![0, 1, 2, 4]).unwrap();
        let out = apply_attack(&img, &Attack::Shrink { factor: 2 }).unwrap();
        // (0 + 1 + 2 + 4 + 2) / 4 = 2
        assert_eq!(out.pixels(), &[2, 2, 2, 2]);
        let img = ramp(5, 3);
        assert_eq!(
            apply_attack(&img, &Attack::Shrink { factor: 1 }).unwrap(),
            img
        );
        assert_eq!(
            apply_attack(&img, &Attack::Shrink { factor: 2 })
                .unwrap()
                .dimensions(),
            (5, 3)
        );
    }

    #[test]
    fn rotation_by_zero_and_full_turn_is_identity() {
        let img = ramp(9, 7);
        assert_eq!(
            apply_attack(&img, &Attack::AngleRotation { degrees: 0.0 }).unwrap(),
            img
        );
        assert_eq!(
            apply_attack(&img, &Attack::AngleRotation { degrees: 360.0 }).unwrap(),
            img
        );
    }

    #[test]
    fn quarter_turn_on_square() {
        // odd side so the centre is a pixel and the turn is exact
        let img = GrayImage::from_fn(3, 3, |r, c| (r * 3 + c) as u8).unwrap();
        let out = apply_attack(&img, &Attack::AngleRotation { degrees: 90.0 }).unwrap();
        // counterclockwise: the top row becomes the left column read bottom-up
        assert_eq!(out.pixels(), &[2, 5, 8, 1, 4, 7, 0, 3, 6]);
    }

    #[test]
    fn rotation_zero_fills_corners() {
        let img = GrayImage::filled(32, 32, 200).unwrap();
        let out = apply_attack(&img, &Attack::AngleRotation { degrees: 45.0 }).unwrap();
        assert_eq!(out.get(0, 0), 0);
        assert_eq!(out.get(16, 16), 200);
    }

    #[test]
    fn rotate_transform_differs_from_plain_rotation() {
        let img = noise(64, 64, 5);
        let a = apply_attack(&img, &Attack::AngleRotation { degrees: 5.0 }).unwrap();
        let b = apply_attack(&img, &Attack::RotateTransform { degrees: 5.0 }).unwrap();
        assert_ne!(a, b);
        // restore brings the centre back to the original content
        assert_eq!(b.get(32, 32), img.get(32, 32));
    }

    #[test]
    fn parameter_validation() {
        let img = ramp(4, 4);
        for bad in [
            Attack::Crop { fraction: 1.5 },
            Attack::LowPassFilter { size: 4 },
            Attack::Quantization { step: 0 },
            Attack::SaltPepper {
                density: -0.1,
                seed: 0,
            },
            Attack::Compression { quality: 0 },
            Attack::Shrink { factor: 0 },
            Attack::AngleRotation { degrees: f64::NAN },
        ] {
            assert!(
                matches!(apply_attack(&img, &bad), Err(Error::InvalidParameter(_))),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn serde_uses_kind_tag() {
        let json = serde_json::to_string(&Attack::Translation { dx: 5, dy: 5 }).unwrap();
        assert_eq!(json, r#"{"kind":"translation","dx":5,"dy":5}"#);
        let back: Attack = serde_json::from_str(r#"{"kind":"contrast-stretch"}"#).unwrap();
        assert_eq!(back, Attack::ContrastStretch);
        assert!(serde_json::from_str::<Attack>(r#"{"kind":"blur"}"#).is_err());
    }

    #[test]
    fn quantization_by_four_clears_two_lsb_planes() {
        let img = noise(64, 64, 11);
        let out = apply_attack(&img, &Attack::Quantization { step: 4 }).unwrap();
        assert!(out.pixels().iter().all(|&p| p & 0b11 == 0));
    }

    fn arb_image() -> impl Strategy<Value = GrayImage> {
        (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), w * h)
                .prop_map(move |px| GrayImage::new(w, h, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn attacks_preserve_dimensions_and_are_deterministic(img in arb_image(), seed in any::<u64>()) {
            for attack in default_suite(seed) {
                let a = apply_attack(&img, &attack).unwrap();
                let b = apply_attack(&img, &attack).unwrap();
                prop_assert_eq!(a.dimensions(), img.dimensions());
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn stretch_and_quantize_are_idempotent(img in arb_image(), step in 1u32..=255) {
            let once = apply_attack(&img, &Attack::ContrastStretch).unwrap();
            prop_assert_eq!(apply_attack(&once, &Attack::ContrastStretch).unwrap(), once);
            let q = Attack::Quantization { step };
            let once = apply_attack(&img, &q).unwrap();
            prop_assert_eq!(apply_attack(&once, &q).unwrap(), once);
        }
    }
}
