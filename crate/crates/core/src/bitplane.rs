//! Bit-plane slicing, plane-replacement embedding and blind extraction.
//!
//! Planes are numbered the way the watermarking literature draws them:
//! plane 1 is the most significant bit (weight 128) and plane 8 the least
//! significant bit (weight 1).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{GrayImage, Samples};
use crate::rng::BitSource;

/// A bit-plane index in `1..=8`, 1 = MSB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct PlaneIndex(u8);

impl PlaneIndex {
    pub const MSB: PlaneIndex = PlaneIndex(1);
    pub const LSB: PlaneIndex = PlaneIndex(8);

    pub fn new(index: i64) -> Result<Self> {
        if (1..=8).contains(&index) {
            Ok(PlaneIndex(index as u8))
        } else {
            Err(Error::PlaneOutOfRange(index))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Right shift that brings this plane's bit to position 0.
    pub fn shift(self) -> u32 {
        8 - self.0 as u32
    }

    /// Numeric weight of the plane, `2^(8 - l)`.
    pub fn weight(self) -> u8 {
        1 << self.shift()
    }

    pub fn all() -> impl DoubleEndedIterator<Item = PlaneIndex> + Clone {
        (1..=8).map(PlaneIndex)
    }

    fn bit_of(self, pixel: u8) -> u8 {
        (pixel >> self.shift()) & 1
    }
}

impl TryFrom<i64> for PlaneIndex {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        PlaneIndex::new(value)
    }
}

impl From<PlaneIndex> for u8 {
    fn from(p: PlaneIndex) -> u8 {
        p.0
    }
}

impl fmt::Display for PlaneIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One binary plane of an image, row-major, values in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitPlane {
    width: usize,
    height: usize,
    bits: Vec<u8>,
    index: PlaneIndex,
}

impl BitPlane {
    pub fn new(width: usize, height: usize, bits: Vec<u8>, index: PlaneIndex) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if bits.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                found: bits.len(),
            });
        }
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::NonBinary(bad));
        }
        Ok(Self {
            width,
            height,
            bits,
            index,
        })
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

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn index(&self) -> PlaneIndex {
        self.index
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// The same bits tagged with a different plane index.
    pub fn with_index(mut self, index: PlaneIndex) -> Self {
        self.index = index;
        self
    }

    /// Renders the plane as a viewable image, 0 → 0 and 1 → 255.
    pub fn to_image(&self) -> GrayImage {
        GrayImage::new(
            self.width,
            self.height,
            self.bits.iter().map(|&b| b * 255).collect(),
        )
        .expect("plane dimensions are valid")
    }
}

impl Samples for BitPlane {
    fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    fn samples(&self) -> &[u8] {
        &self.bits
    }
}

/// All eight planes of an image, ordered 1 (MSB) to 8 (LSB).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneStack {
    planes: Vec<BitPlane>,
}

impl PlaneStack {
    pub fn new(planes: Vec<BitPlane>) -> Result<Self> {
        if planes.len() != 8
            || planes
                .iter()
                .zip(PlaneIndex::all())
                .any(|(p, idx)| p.index != idx)
        {
            return Err(Error::MalformedStack);
        }
        let dims = planes[0].dimensions();
        if let Some(p) = planes.iter().find(|p| p.dimensions() != dims) {
            return Err(Error::dims(dims, p.dimensions()));
        }
        Ok(Self { planes })
    }

    pub fn planes(&self) -> &[BitPlane] {
        &self.planes
    }

    pub fn plane(&self, index: PlaneIndex) -> &BitPlane {
        &self.planes[index.get() as usize - 1]
    }

    pub fn into_planes(self) -> Vec<BitPlane> {
        self.planes
    }
}

pub fn decompose(img: &GrayImage) -> PlaneStack {
    let planes = PlaneIndex::all()
        .map(|idx| extract_plane(img, idx))
        .collect();
    PlaneStack { planes }
}

/// Inverse of [`decompose`]: `pixel = Σ bit_l · 2^(8 - l)`.
pub fn recompose(stack: &PlaneStack) -> Result<GrayImage> {
    let (width, height) = stack.planes[0].dimensions();
    let mut pixels = vec![0u8; width * height];
    for plane in &stack.planes {
        if plane.dimensions() != (width, height) {
            return Err(Error::dims((width, height), plane.dimensions()));
        }
        let shift = plane.index.shift();
        for (px, &bit) in pixels.iter_mut().zip(&plane.bits) {
            *px |= bit << shift;
        }
    }
    GrayImage::new(width, height, pixels)
}

/// Blind retrieval: reads plane `index` straight out of `img`.
pub fn extract_plane(img: &GrayImage, index: PlaneIndex) -> BitPlane {
    BitPlane {
        width: img.width(),
        height: img.height(),
        bits: img.pixels().iter().map(|&p| index.bit_of(p)).collect(),
        index,
    }
}

/// Replaces plane `image_plane` of `cover` with the given binary plane.
pub fn embed_plane(
    cover: &GrayImage,
    mark: &BitPlane,
    image_plane: PlaneIndex,
) -> Result<GrayImage> {
    if cover.dimensions() != mark.dimensions() {
        return Err(Error::dims(cover.dimensions(), mark.dimensions()));
    }
    let shift = image_plane.shift();
    let clear = !(1u8 << shift);
    let pixels = cover
        .pixels()
        .iter()
        .zip(mark.bits())
        .map(|(&px, &bit)| (px & clear) | (bit << shift))
        .collect();
    GrayImage::new(cover.width(), cover.height(), pixels)
}

/// Embeds plane `wm_plane` of `watermark` into plane `image_plane` of `cover`.
///
/// Every other plane of the cover is left untouched, so each pixel moves by at
/// most `2^(8 - image_plane)`.
pub fn embed(
    cover: &GrayImage,
    watermark: &GrayImage,
    image_plane: PlaneIndex,
    wm_plane: PlaneIndex,
) -> Result<GrayImage> {
    if cover.dimensions() != watermark.dimensions() {
        return Err(Error::dims(cover.dimensions(), watermark.dimensions()));
    }
    embed_plane(cover, &extract_plane(watermark, wm_plane), image_plane)
}

/// A Bernoulli(1/2) noise plane, the classic pseudorandom LSB watermark.
///
/// Bits are the top bits of successive outputs of [`BitSource`] in row-major
/// order; the plane is tagged as plane 8.
pub fn pseudorandom_plane(seed: u64, width: usize, height: usize) -> Result<BitPlane> {
    let mut rng = BitSource::new(seed);
    let bits = (0..width * height).map(|_| rng.next_bit()).collect();
    BitPlane::new(width, height, bits, PlaneIndex::LSB)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plane(i: i64) -> PlaneIndex {
        PlaneIndex::new(i).unwrap()
    }

    fn pixel(v: u8) -> GrayImage {
        GrayImage::filled(1, 1, v).unwrap()
    }

    #[test]
    fn plane_index_range() {
        assert_eq!(PlaneIndex::new(0), Err(Error::PlaneOutOfRange(0)));
        assert_eq!(PlaneIndex::new(9), Err(Error::PlaneOutOfRange(9)));
        assert_eq!(plane(1).weight(), 128);
        assert_eq!(plane(8).weight(), 1);
    }

    #[test]
    fn decompose_binary_expansion() {
        let stack = decompose(&pixel(178));
        let bits: Vec<u8> = stack.planes().iter().map(|p| p.bits()[0]).collect();
        assert_eq!(bits, vec![1, 0, 1, 1, 0, 0, 1, 0]);

        let stack = decompose(&pixel(255));
        assert!(stack.planes().iter().all(|p| p.bits()[0] == 1));

        let stack = decompose(&GrayImage::filled(4, 3, 0).unwrap());
        assert!(stack.planes().iter().all(|p| p.count_ones() == 0));
    }

    fn stack_from(bits: [u8; 8], w: usize, h: usize, at: usize) -> PlaneStack {
        let planes = PlaneIndex::all()
            .map(|idx| {
                let mut v = vec![0; w * h];
                v[at] = bits[idx.get() as usize - 1];
                BitPlane::new(w, h, v, idx).unwrap()
            })
            .collect();
        PlaneStack::new(planes).unwrap()
    }

    #[test]
    fn recompose_examples() {
        let planes = PlaneIndex::all()
            .map(|idx| {
                let v = if idx == PlaneIndex::MSB { 1 } else { 0 };
                BitPlane::new(3, 2, vec![v; 6], idx).unwrap()
            })
            .collect();
        let img = recompose(&PlaneStack::new(planes).unwrap()).unwrap();
        assert!(img.pixels().iter().all(|&p| p == 128));

        let img = recompose(&stack_from([0, 0, 0, 0, 0, 0, 1, 1], 2, 2, 3)).unwrap();
        assert_eq!(img.pixels(), &[0, 0, 0, 3]);
    }

    #[test]
    fn stack_rejects_mismatched_planes() {
        let mut planes: Vec<BitPlane> = PlaneIndex::all()
            .map(|idx| BitPlane::new(2, 2, vec![0; 4], idx).unwrap())
            .collect();
        planes[5] = BitPlane::new(1, 4, vec![0; 4], plane(6)).unwrap();
        assert!(matches!(
            PlaneStack::new(planes),
            Err(Error::DimensionMismatch { .. })
        ));
        let planes = PlaneIndex::all()
            .rev()
            .map(|idx| BitPlane::new(2, 2, vec![0; 4], idx).unwrap())
            .collect();
        assert_eq!(PlaneStack::new(planes), Err(Error::MalformedStack));
    }

    #[test]
    fn exhaustive_gradient_round_trip() {
        let img = GrayImage::from_fn(256, 1, |_, c| c as u8).unwrap();
        assert_eq!(recompose(&decompose(&img)).unwrap(), img);
    }

    #[test]
    fn extract_single_bit() {
        assert_eq!(extract_plane(&pixel(178), plane(7)).bits(), &[1]);
    }

    #[test]
    fn embed_examples() {
        let zero = GrayImage::filled(1, 1, 0).unwrap();
        let full = GrayImage::filled(1, 1, 255).unwrap();
        // watermark bit 0 at l = 7 clears the weight-2 bit
        assert_eq!(
            embed(&pixel(178), &zero, plane(7), plane(1))
                .unwrap()
                .pixels(),
            &[176]
        );
        // watermark bit 1 at l = 8 sets the weight-1 bit
        assert_eq!(
            embed(&pixel(178), &full, plane(8), plane(1))
                .unwrap()
                .pixels(),
            &[179]
        );
    }

    #[test]
    fn embed_identity_when_planes_agree() {
        let cover = GrayImage::from_fn(16, 16, |r, c| (r * 16 + c) as u8).unwrap();
        // the cover's own plane 3 written back into plane 3
        assert_eq!(embed(&cover, &cover, plane(3), plane(3)).unwrap(), cover);
    }

    #[test]
    fn embed_rejects_dimension_mismatch() {
        let a = GrayImage::filled(2, 2, 0).unwrap();
        let b = GrayImage::filled(2, 3, 0).unwrap();
        assert!(matches!(
            embed(&a, &b, plane(8), plane(1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bitplane_rejects_non_binary() {
        assert_eq!(
            BitPlane::new(2, 1, vec![0, 2], plane(1)),
            Err(Error::NonBinary(2))
        );
    }

    #[test]
    fn pseudorandom_is_deterministic() {
        let a = pseudorandom_plane(7, 64, 64).unwrap();
        let b = pseudorandom_plane(7, 64, 64).unwrap();
        assert_eq!(a, b);
    }

    // Frozen from a single run of the generator.
    #[test]
    fn pseudorandom_frozen_values() {
        let p1 = pseudorandom_plane(1, 256, 256).unwrap();
        let p2 = pseudorandom_plane(2, 256, 256).unwrap();
        let differing = p1
            .bits()
            .iter()
            .zip(p2.bits())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(differing, FROZEN_DIFF_SEED1_SEED2);

        let p42 = pseudorandom_plane(42, 256, 256).unwrap();
        assert_eq!(p42.count_ones(), FROZEN_ONES_SEED42);
        let density = p42.count_ones() as f64 / 65536.0;
        assert!((0.48..=0.52).contains(&density), "density {density}");
    }

    const FROZEN_DIFF_SEED1_SEED2: usize = 32912;
    const FROZEN_ONES_SEED42: usize = 32797;

    fn arb_image() -> impl Strategy<Value = GrayImage> {
        (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), w * h)
                .prop_map(move |px| GrayImage::new(w, h, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn recompose_inverts_decompose(img in arb_image()) {
            prop_assert_eq!(recompose(&decompose(&img)).unwrap(), img);
        }

        #[test]
        fn embed_then_extract_recovers_watermark_plane(
            (cover, wm) in (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
                let px = proptest::collection::vec(any::<u8>(), w * h);
                (px.clone(), px).prop_map(move |(a, b)| {
                    (GrayImage::new(w, h, a).unwrap(), GrayImage::new(w, h, b).unwrap())
                })
            }),
            l in 1i64..=8,
            k in 1i64..=8,
        ) {
            let (l, k) = (plane(l), plane(k));
            let out = embed(&cover, &wm, l, k).unwrap();
            let (got, want) = (extract_plane(&out, l), extract_plane(&wm, k));
            prop_assert_eq!(got.bits(), want.bits());
            for other in PlaneIndex::all().filter(|&p| p != l) {
                prop_assert_eq!(extract_plane(&out, other), extract_plane(&cover, other));
            }
            for (&a, &b) in out.pixels().iter().zip(cover.pixels()) {
                prop_assert!((a as i32 - b as i32).abs() <= l.weight() as i32);
            }
        }
    }
}
