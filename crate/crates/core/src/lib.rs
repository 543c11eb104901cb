//! Bit-plane watermarking toolkit.
//!
//! A chosen bit plane of a signature image is written into a chosen bit plane
//! of a cover image. The watermarked image is put through ten attacks, the
//! plane is read back blindly, and a correlation score per attack is folded
//! into a weighted score per user weight profile. Sweeping the plane
//! combinations and taking the argmax picks the best (image plane, watermark
//! plane) pair for a given profile.
//!
//! ```
//! use planemark::{embed, extract_plane, GrayImage, PlaneIndex};
//!
//! let cover = GrayImage::filled(4, 4, 178).unwrap();
//! let mark = GrayImage::filled(4, 4, 30).unwrap();
//! let l = PlaneIndex::new(7).unwrap();
//! let out = embed(&cover, &mark, l, PlaneIndex::MSB).unwrap();
//! assert_eq!(out.pixels()[0], 176);
//! assert_eq!(extract_plane(&out, l).count_ones(), 0);
//! ```

pub mod attacks;
pub mod bitplane;
pub mod cli;
pub mod corpus;
mod error;
pub mod metrics;
pub mod optimizer;
pub mod raster;
pub mod report;
pub mod rng;

pub use attacks::{apply_attack, default_suite, Attack, AttackKind, ATTACK_COUNT};
pub use bitplane::{
    decompose, embed, embed_plane, extract_plane, pseudorandom_plane, recompose, BitPlane,
    PlaneIndex, PlaneStack,
};
pub use error::{Error, Result};
pub use metrics::{crc, mse, psnr, weighted_crc, Psnr, WeightProfile};
pub use optimizer::{
    evaluate_baseline, evaluate_combination, select_optimal, sweep, EvaluationRecord,
    OptimizationReport, PlaneCombination, SweepPlan,
};
pub use raster::{load_pgm, save_pgm, GrayImage};
