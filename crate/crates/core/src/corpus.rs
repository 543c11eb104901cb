//! The bundled 256×256 test corpus.
//!
//! * `cover`: grayscale astronaut portrait (NASA, public domain), 2×2 area
//!   downsampled from the 512×512 original.
//! * `signature`: a synthetic scanned signature, dark ink strokes on slightly
//!   noisy white paper. Its high planes carry the clean glyph shape while the
//!   low planes are dominated by scan noise.

use std::f64::consts::TAU;

use crate::raster::{load_pgm, GrayImage};
use crate::rng::BitSource;

pub const CORPUS_SIZE: usize = 256;
pub const SIGNATURE_SEED: u64 = 2009;

const COVER_PGM: &[u8] = include_bytes!("../data/astronaut256.pgm");
const SIGNATURE_PGM: &[u8] = include_bytes!("../data/signature256.pgm");

pub fn cover() -> GrayImage {
    load_pgm(COVER_PGM).expect("bundled cover is a valid PGM")
}

pub fn signature() -> GrayImage {
    load_pgm(SIGNATURE_PGM).expect("bundled signature is a valid PGM")
}

pub fn cover_pgm() -> &'static [u8] {
    COVER_PGM
}

pub fn signature_pgm() -> &'static [u8] {
    SIGNATURE_PGM
}

const PAPER: f64 = 236.0;
const INK: f64 = 28.0;
const NOISE: u64 = 14;
const PEN_RADIUS: f64 = 2.2;

/// Renders the synthetic signature used as the default watermark.
pub fn synthetic_signature(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut coverage = vec![0.0f64; width * height];
    let sx = width as f64 / 256.0;
    let sy = height as f64 / 256.0;

    let mut stroke = |f: &dyn Fn(f64) -> (f64, f64), samples: usize| {
        for i in 0..=samples {
            let (x, y) = f(i as f64 / samples as f64);
            stamp(
                &mut coverage,
                width,
                height,
                x * sx,
                y * sy,
                PEN_RADIUS * sx.min(sy),
            );
        }
    };

    // capital loop on the left
    stroke(
        &|t| {
            let a = TAU * (0.15 + 1.1 * t);
            (62.0 + 26.0 * a.cos() - 10.0 * t, 104.0 + 40.0 * a.sin())
        },
        1500,
    );
    // downstroke of the capital
    stroke(&|t| (58.0 + 8.0 * t, 70.0 + 90.0 * t), 600);
    // cursive body: a prolate trochoid gives the running loops
    stroke(
        &|t| {
            let a = TAU * 6.5 * t;
            let x = 78.0 + 148.0 * t - 9.0 * a.sin();
            let y = 122.0 - 16.0 * a.cos() + 10.0 * (TAU * 0.5 * t).sin();
            (x, y)
        },
        6000,
    );
    // underline flourish
    stroke(
        &|t| {
            let x = 40.0 + 186.0 * t;
            let y = 176.0 + 9.0 * (TAU * t).sin() - 14.0 * t;
            (x, y)
        },
        2000,
    );
    // dot
    stroke(
        &|t| (204.0 + 3.0 * (TAU * t).cos(), 84.0 + 3.0 * (TAU * t).sin()),
        80,
    );

    let mut rng = BitSource::new(seed);
    let pixels = coverage
        .iter()
        .map(|&c| {
            let jitter = (rng.next_u64() % (2 * NOISE + 1)) as f64 - NOISE as f64;
            let v = PAPER * (1.0 - c) + INK * c + jitter;
            v.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::new(width, height, pixels).expect("positive dimensions")
}

fn stamp(coverage: &mut [f64], width: usize, height: usize, x: f64, y: f64, radius: f64) {
    let reach = radius + 1.0;
    if y + reach < 0.0 || x + reach < 0.0 {
        return;
    }
    let r0 = (y - reach).floor().max(0.0) as usize;
    let r1 = ((y + reach).ceil() as usize).min(height.saturating_sub(1));
    let c0 = (x - reach).floor().max(0.0) as usize;
    let c1 = ((x + reach).ceil() as usize).min(width.saturating_sub(1));
    for r in r0..=r1 {
        for c in c0..=c1 {
            let d = ((c as f64 - x).powi(2) + (r as f64 - y).powi(2)).sqrt();
            let cov = (radius + 0.5 - d).clamp(0.0, 1.0);
            let slot = &mut coverage[r * width + c];
            *slot = slot.max(cov);
        }
    }
}
