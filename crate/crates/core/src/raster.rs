//! 8-bit grayscale rasters and the binary PGM (P5) codec.
//!
//! Pixels are stored row-major with the origin at the top-left corner, so
//! `(row, col)` addresses `pixels[row * width + col]`.

use crate::error::{Error, Result};

/// An immutable 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidImage("dimensions overflow".into()))?;
        if pixels.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(row, col));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Pixel at `(row, col)`. Panics when out of bounds.
    pub fn get(&self, row: usize, col: usize) -> u8 {
        assert!(row < self.height && col < self.width);
        self.pixels[row * self.width + col]
    }

    /// Same dimensions, pixels transformed one by one.
    pub fn map(&self, f: impl Fn(u8) -> u8) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// Shared read access used by the pixel-wise metrics.
pub trait Samples {
    fn dimensions(&self) -> (usize, usize);
    fn samples(&self) -> &[u8];
}

impl Samples for GrayImage {
    fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    fn samples(&self) -> &[u8] {
        &self.pixels
    }
}

/// Decodes a binary PGM with maxval 255.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cursor = HeaderCursor { bytes, pos: 0 };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::MalformedHeader("missing P5 magic number".into()));
    }
    cursor.pos = 2;
    let width = cursor.next_number("width")?;
    let height = cursor.next_number("height")?;
    let maxval = cursor.next_number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates maxval from the raster
    match bytes.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => {
            return Err(Error::MalformedHeader(
                "expected whitespace after maxval".into(),
            ))
        }
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    let expected = (width as usize)
        .checked_mul(height as usize)
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;
    let payload = &bytes[cursor.pos..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    GrayImage::new(
        width as usize,
        height as usize,
        payload[..expected].to_vec(),
    )
}

/// Encodes as binary PGM with the fixed header `P5\n<w> <h>\n255\n`.
pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.pixels);
    out
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn next_number(&mut self, field: &str) -> Result<u32> {
        let start_ws = self.pos;
        self.skip_whitespace_and_comments();
        if self.pos == start_ws {
            return Err(Error::MalformedHeader(format!(
                "expected whitespace before {field}"
            )));
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader(format!("missing {field}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("{field} out of range")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smallest_file_decodes_to_zero_image() {
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend([0, 0, 0, 0]);
        let img = load_pgm(&bytes).unwrap();
        assert_eq!(img.dimensions(), (2, 2));
        assert!(img.pixels().iter().all(|&p| p == 0));
    }

    #[test]
    fn single_pixel() {
        let mut bytes = b"P5 1 1 255\n".to_vec();
        bytes.push(178);
        assert_eq!(load_pgm(&bytes).unwrap().pixels(), &[178]);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5\n# scanner output\n1 1\n255\n".to_vec();
        bytes.push(7);
        assert_eq!(load_pgm(&bytes).unwrap().pixels(), &[7]);
    }

    #[test]
    fn sixteen_bit_maxval_is_rejected() {
        let bytes = b"P5 1 1 65535\n\0\0".to_vec();
        assert_eq!(load_pgm(&bytes), Err(Error::UnsupportedMaxval(65535)));
    }

    #[test]
    fn distinct_diagnostics() {
        assert!(matches!(
            load_pgm(b"P2 1 1 255\n0"),
            Err(Error::MalformedHeader(_))
        ));
        assert!(matches!(
            load_pgm(b"P5 1 x 255\n0"),
            Err(Error::MalformedHeader(_))
        ));
        assert_eq!(
            load_pgm(b"P5 2 2 255\n\x01\x02"),
            Err(Error::TruncatedPayload {
                expected: 4,
                found: 2
            })
        );
    }

    #[test]
    fn save_uses_fixed_header() {
        let img = GrayImage::filled(1, 1, 0).unwrap();
        assert_eq!(save_pgm(&img), b"P5\n1 1\n255\n\0");

        let img = GrayImage::from_fn(2, 3, |r, c| (r * 2 + c) as u8).unwrap();
        let bytes = save_pgm(&img);
        assert!(bytes.starts_with(b"P5\n2 3\n255\n"));
        assert_eq!(bytes.len() - b"P5\n2 3\n255\n".len(), 6);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(GrayImage::new(0, 3, vec![]).is_err());
        assert_eq!(
            GrayImage::new(2, 2, vec![0; 3]),
            Err(Error::LengthMismatch {
                expected: 4,
                found: 3
            })
        );
    }

    #[test]
    fn row_major_indexing() {
        let img = GrayImage::new(3, 2, vec![0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(img.get(1, 0), 3);
        assert_eq!(img.get(0, 2), 2);
    }

    proptest! {
        #[test]
        fn codec_round_trip(w in 1usize..40, h in 1usize..40, seed in any::<u64>()) {
            let mut state = seed;
            let img = GrayImage::from_fn(w, h, |_, _| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 56) as u8
            }).unwrap();
            let bytes = save_pgm(&img);
            let back = load_pgm(&bytes).unwrap();
            prop_assert_eq!(&back, &img);
            prop_assert_eq!(save_pgm(&back), bytes);
        }
    }
}
