//! Self-contained baseline-JPEG style lossy round trip on the luminance channel.

use crate::raster::GrayImage;

/// ITU-T T.81 Annex K luminance quantization table, row-major.
pub const LUMA_QUANT: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Luminance table scaled with the IJG quality rule, entries clamped to 1..=255.
pub fn scaled_table(quality: u8) -> [u16; 64] {
    let q = quality.clamp(1, 100) as u32;
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut out = [0u16; 64];
    for (o, &base) in out.iter_mut().zip(LUMA_QUANT.iter()) {
        *o = ((base as u32 * scale + 50) / 100).clamp(1, 255) as u16;
    }
    out
}

struct Basis {
    // cos[(2x + 1) u pi / 16] indexed [u][x]
    cos: [[f64; 8]; 8],
}

impl Basis {
    fn new() -> Self {
        let mut cos = [[0.0; 8]; 8];
        for (u, row) in cos.iter_mut().enumerate() {
            for (x, c) in row.iter_mut().enumerate() {
                *c = (((2 * x + 1) * u) as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        Self { cos }
    }

    fn alpha(u: usize) -> f64 {
        if u == 0 {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        }
    }

    fn forward(&self, block: &[f64; 64]) -> [f64; 64] {
        let mut out = [0.0; 64];
        for v in 0..8 {
            for u in 0..8 {
                let mut acc = 0.0;
                for y in 0..8 {
                    for x in 0..8 {
                        acc += block[y * 8 + x] * self.cos[u][x] * self.cos[v][y];
                    }
                }
                out[v * 8 + u] = 0.25 * Self::alpha(u) * Self::alpha(v) * acc;
            }
        }
        out
    }

    fn inverse(&self, coeffs: &[f64; 64]) -> [f64; 64] {
        let mut out = [0.0; 64];
        for y in 0..8 {
            for x in 0..8 {
                let mut acc = 0.0;
                for v in 0..8 {
                    for u in 0..8 {
                        acc += Self::alpha(u)
                            * Self::alpha(v)
                            * coeffs[v * 8 + u]
                            * self.cos[u][x]
                            * self.cos[v][y];
                    }
                }
                out[y * 8 + x] = 0.25 * acc;
            }
        }
        out
    }
}

/// DCT → quantize → dequantize → inverse DCT over 8×8 blocks.
///
/// The image is padded to a multiple of 8 by edge replication and cropped back.
/// Coefficients are rounded half away from zero, output pixels half up.
pub fn compress(img: &GrayImage, quality: u8) -> GrayImage {
    let table = scaled_table(quality);
    let basis = Basis::new();
    let (w, h) = img.dimensions();
    let pw = w.div_ceil(8) * 8;
    let ph = h.div_ceil(8) * 8;
    let src = |r: usize, c: usize| img.get(r.min(h - 1), c.min(w - 1));

    let mut out = vec![0u8; w * h];
    for by in (0..ph).step_by(8) {
        for bx in (0..pw).step_by(8) {
            let mut block = [0.0; 64];
            for y in 0..8 {
                for x in 0..8 {
                    block[y * 8 + x] = src(by + y, bx + x) as f64 - 128.0;
                }
            }
            let mut coeffs = basis.forward(&block);
            for (c, &q) in coeffs.iter_mut().zip(table.iter()) {
                let q = q as f64;
                *c = (*c / q).round() * q;
            }
            let recon = basis.inverse(&coeffs);
            for y in 0..8 {
                for x in 0..8 {
                    let (r, c) = (by + y, bx + x);
                    if r < h && c < w {
                        let v = (recon[y * 8 + x] + 128.0 + 0.5).floor();
                        out[r * w + c] = v.clamp(0.0, 255.0) as u8;
                    }
                }
            }
        }
    }
    GrayImage::new(w, h, out).expect("dimensions preserved")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quality_scaling() {
        assert_eq!(scaled_table(50), LUMA_QUANT);
        assert!(scaled_table(100).iter().all(|&q| q == 1));
        // q = 75 halves the table: (16 * 50 + 50) / 100 = 8
        assert_eq!(scaled_table(75)[0], 8);
        // q = 1 saturates at 255
        assert_eq!(scaled_table(1)[63], 255);
    }

    #[test]
    fn transform_pair_is_orthonormal() {
        let basis = Basis::new();
        let mut block = [0.0; 64];
        for (i, b) in block.iter_mut().enumerate() {
            *b = ((i * 37) % 255) as f64 - 128.0;
        }
        let back = basis.inverse(&basis.forward(&block));
        for (a, b) in block.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    // Direct O(N^4) evaluation of the DCT-II definition as an oracle.
    #[test]
    fn forward_matches_definition() {
        let basis = Basis::new();
        let mut block = [0.0; 64];
        for (i, b) in block.iter_mut().enumerate() {
            *b = ((i * 53 + 11) % 200) as f64 - 100.0;
        }
        let got = basis.forward(&block);
        let pi = std::f64::consts::PI;
        for v in 0..8 {
            for u in 0..8 {
                let cu = if u == 0 { 1.0 / 2f64.sqrt() } else { 1.0 };
                let cv = if v == 0 { 1.0 / 2f64.sqrt() } else { 1.0 };
                let mut s = 0.0;
                for y in 0..8 {
                    for x in 0..8 {
                        s += block[y * 8 + x]
                            * ((2.0 * x as f64 + 1.0) * u as f64 * pi / 16.0).cos()
                            * ((2.0 * y as f64 + 1.0) * v as f64 * pi / 16.0).cos();
                    }
                }
                let want = 0.25 * cu * cv * s;
                assert!((got[v * 8 + u] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn flat_block_survives_exactly() {
        // DC = 8 * (100 - 128) = -224, divisible by the q=75 DC step of 8
        let img = GrayImage::filled(8, 8, 100).unwrap();
        assert_eq!(compress(&img, 75), img);
    }

    #[test]
    fn odd_sizes_are_padded_and_cropped() {
        let img = GrayImage::from_fn(13, 9, |r, c| (r * 20 + c * 3) as u8).unwrap();
        let out = compress(&img, 90);
        assert_eq!(out.dimensions(), (13, 9));
        let max_err = out
            .pixels()
            .iter()
            .zip(img.pixels())
            .map(|(&a, &b)| (a as i32 - b as i32).abs())
            .max()
            .unwrap();
        assert!(max_err <= 8, "max error {max_err}");
    }
}
