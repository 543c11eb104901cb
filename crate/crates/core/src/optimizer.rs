//! Embed → attack → extract → score over a grid of plane combinations, and
//! selection of the best combination for each weight profile.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::attacks::{
    apply_attack, default_suite, validate_suite, Attack, ATTACK_COUNT, DEFAULT_SEED,
};
use crate::bitplane::{embed_plane, extract_plane, pseudorandom_plane, BitPlane, PlaneIndex};
use crate::error::{Error, Result};
use crate::metrics::{crc, psnr, weighted_crc, Psnr, WeightProfile};
use crate::raster::GrayImage;

/// Image plane `l` receives watermark plane `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlaneCombination {
    pub image_plane: PlaneIndex,
    pub watermark_plane: PlaneIndex,
}

impl PlaneCombination {
    pub fn new(image_plane: i64, watermark_plane: i64) -> Result<Self> {
        Ok(Self {
            image_plane: PlaneIndex::new(image_plane)?,
            watermark_plane: PlaneIndex::new(watermark_plane)?,
        })
    }

    /// Row label in the `Com.(l,k)` style.
    pub fn label(&self) -> String {
        format!("Com.({},{})", self.image_plane, self.watermark_plane)
    }

    /// Report order: image plane ascending, then watermark plane descending,
    /// so the default grid reads `Com.(7,8)` … `Com.(7,1)`, `Com.(8,8)` … `Com.(8,1)`.
    pub fn report_order(&self, other: &Self) -> Ordering {
        self.image_plane
            .cmp(&other.image_plane)
            .then(other.watermark_plane.cmp(&self.watermark_plane))
    }
}

impl fmt::Display for PlaneCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Scores for one embedded plane under the attack suite.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneScores {
    /// CRC per attack, canonical order.
    pub crcs: [f64; ATTACK_COUNT],
    /// PSNR between the cover and the watermarked image.
    pub fidelity_psnr: Psnr,
    /// PSNR between the embedded plane and the plane read back without attack.
    pub recovery_psnr_no_attack: Psnr,
    /// PSNR between the embedded plane and the plane read back after each attack.
    pub recovery_psnrs: [Psnr; ATTACK_COUNT],
    /// Weighted CRC per profile, aligned with the profiles it was scored against.
    pub weighted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub combination: PlaneCombination,
    pub scores: PlaneScores,
}

/// The pseudorandom-plane reference run (a noise plane in the LSB).
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRecord {
    pub seed: u64,
    pub image_plane: PlaneIndex,
    pub scores: PlaneScores,
}

impl BaselineRecord {
    pub fn label(&self) -> String {
        format!("pseudo {}-{}", self.image_plane, self.image_plane)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub profile: String,
    pub combination: PlaneCombination,
    pub weighted: f64,
}

/// What to sweep and how to score it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub image_planes: Vec<PlaneIndex>,
    pub watermark_planes: Vec<PlaneIndex>,
    pub attacks: Vec<Attack>,
    pub profiles: Vec<WeightProfile>,
    /// Seed of the pseudorandom baseline plane; `None` skips the baseline.
    pub baseline_seed: Option<u64>,
}

impl Default for SweepPlan {
    /// Image planes 7 and 8 against all eight watermark planes, the default
    /// attack suite and the four bundled profiles.
    fn default() -> Self {
        Self {
            image_planes: vec![PlaneIndex::new(7).unwrap(), PlaneIndex::LSB],
            watermark_planes: PlaneIndex::all().collect(),
            attacks: default_suite(DEFAULT_SEED).to_vec(),
            profiles: WeightProfile::presets(),
            baseline_seed: Some(DEFAULT_SEED),
        }
    }
}

impl SweepPlan {
    /// All 64 combinations.
    pub fn full_grid() -> Self {
        Self {
            image_planes: PlaneIndex::all().collect(),
            ..Self::default()
        }
    }

    pub fn combinations(&self) -> Result<Vec<PlaneCombination>> {
        if self.image_planes.is_empty() || self.watermark_planes.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut combos: Vec<PlaneCombination> = self
            .image_planes
            .iter()
            .flat_map(|&l| {
                self.watermark_planes
                    .iter()
                    .map(move |&k| PlaneCombination {
                        image_plane: l,
                        watermark_plane: k,
                    })
            })
            .collect();
        combos.sort_by(PlaneCombination::report_order);
        combos.dedup();
        Ok(combos)
    }

    pub fn validate(&self) -> Result<()> {
        self.combinations()?;
        validate_suite(&self.attacks)?;
        let mut names: Vec<&str> = self.profiles.iter().map(|p| p.name()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidProfile(format!(
                "duplicate profile name {:?}",
                w[0]
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport {
    pub plan: SweepPlan,
    /// One record per combination, in report order.
    pub records: Vec<EvaluationRecord>,
    /// One selection per profile, in profile order.
    pub selections: Vec<Selection>,
    pub baseline: Option<BaselineRecord>,
}

impl OptimizationReport {
    /// Assembles a report from records evaluated in any order.
    pub fn from_records(
        plan: SweepPlan,
        mut records: Vec<EvaluationRecord>,
        baseline: Option<BaselineRecord>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptySubset);
        }
        records.sort_by(|a, b| a.combination.report_order(&b.combination));
        let mut report = Self {
            plan,
            records,
            selections: Vec::new(),
            baseline,
        };
        report.selections = report
            .plan
            .profiles
            .iter()
            .map(|p| {
                let combination = select_optimal(&report, p.name())?;
                let weighted = report
                    .weighted_of(combination, p.name())
                    .expect("selected record exists");
                Ok(Selection {
                    profile: p.name().to_string(),
                    combination,
                    weighted,
                })
            })
            .collect::<Result<_>>()?;
        Ok(report)
    }

    pub fn profile_position(&self, profile: &str) -> Option<usize> {
        self.plan.profiles.iter().position(|p| p.name() == profile)
    }

    pub fn record(&self, combination: PlaneCombination) -> Option<&EvaluationRecord> {
        self.records.iter().find(|r| r.combination == combination)
    }

    pub fn weighted_of(&self, combination: PlaneCombination, profile: &str) -> Option<f64> {
        let idx = self.profile_position(profile)?;
        self.record(combination).map(|r| r.scores.weighted[idx])
    }

    pub fn selection(&self, profile: &str) -> Option<&Selection> {
        self.selections.iter().find(|s| s.profile == profile)
    }
}

/// Scores `mark` embedded into plane `image_plane` of `cover` against every attack.
pub fn evaluate_plane(
    cover: &GrayImage,
    mark: &BitPlane,
    image_plane: PlaneIndex,
    attacks: &[Attack],
    profiles: &[WeightProfile],
) -> Result<PlaneScores> {
    validate_suite(attacks)?;
    let embedded = embed_plane(cover, mark, image_plane)?;
    let fidelity_psnr = psnr(cover, &embedded)?;
    let recovery_psnr_no_attack = psnr(mark, &extract_plane(&embedded, image_plane))?;

    let mut crcs = [0.0; ATTACK_COUNT];
    let mut recovery_psnrs = [Psnr::Infinite; ATTACK_COUNT];
    for (i, attack) in attacks.iter().enumerate() {
        let attacked = apply_attack(&embedded, attack)?;
        let retrieved = extract_plane(&attacked, image_plane);
        crcs[i] = crc(mark, &retrieved)?;
        recovery_psnrs[i] = psnr(mark, &retrieved)?;
    }
    let weighted = profiles
        .iter()
        .map(|p| weighted_crc(&crcs, p))
        .collect::<Result<_>>()?;
    Ok(PlaneScores {
        crcs,
        fidelity_psnr,
        recovery_psnr_no_attack,
        recovery_psnrs,
        weighted,
    })
}

pub fn evaluate_combination(
    cover: &GrayImage,
    watermark: &GrayImage,
    combination: PlaneCombination,
    attacks: &[Attack],
    profiles: &[WeightProfile],
) -> Result<EvaluationRecord> {
    if cover.dimensions() != watermark.dimensions() {
        return Err(Error::dims(cover.dimensions(), watermark.dimensions()));
    }
    let mark = extract_plane(watermark, combination.watermark_plane);
    let scores = evaluate_plane(cover, &mark, combination.image_plane, attacks, profiles)?;
    Ok(EvaluationRecord {
        combination,
        scores,
    })
}

/// Pseudorandom noise plane embedded into the LSB, scored like any combination.
pub fn evaluate_baseline(
    cover: &GrayImage,
    seed: u64,
    attacks: &[Attack],
    profiles: &[WeightProfile],
) -> Result<BaselineRecord> {
    let mark = pseudorandom_plane(seed, cover.width(), cover.height())?;
    let scores = evaluate_plane(cover, &mark, PlaneIndex::LSB, attacks, profiles)?;
    Ok(BaselineRecord {
        seed,
        image_plane: PlaneIndex::LSB,
        scores,
    })
}

/// Evaluates every combination of the plan (in parallel) and selects the
/// optimum per profile. The result does not depend on evaluation order.
pub fn sweep(
    cover: &GrayImage,
    watermark: &GrayImage,
    plan: &SweepPlan,
) -> Result<OptimizationReport> {
    plan.validate()?;
    if cover.dimensions() != watermark.dimensions() {
        return Err(Error::dims(cover.dimensions(), watermark.dimensions()));
    }
    let records = plan
        .combinations()?
        .into_par_iter()
        .map(|combo| evaluate_combination(cover, watermark, combo, &plan.attacks, &plan.profiles))
        .collect::<Result<Vec<_>>>()?;
    let baseline = plan
        .baseline_seed
        .map(|seed| evaluate_baseline(cover, seed, &plan.attacks, &plan.profiles))
        .transpose()?;
    OptimizationReport::from_records(plan.clone(), records, baseline)
}

/// Ranking used for selection: higher weighted CRC wins, then the larger image
/// plane (closer to the LSB), then the smaller watermark plane.
pub fn preference(a: (PlaneCombination, f64), b: (PlaneCombination, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
        .then(a.0.image_plane.cmp(&b.0.image_plane))
        .then(b.0.watermark_plane.cmp(&a.0.watermark_plane))
}

/// Argmax of a profile's weighted CRC over the report, with the [`preference`] tie-break.
pub fn select_optimal(report: &OptimizationReport, profile: &str) -> Result<PlaneCombination> {
    let idx = report
        .profile_position(profile)
        .ok_or_else(|| Error::ProfileAbsent(profile.to_string()))?;
    select_from(
        report
            .records
            .iter()
            .map(|r| (r.combination, r.scores.weighted[idx])),
    )
    .ok_or(Error::EmptySubset)
}

/// Best entry of a `(combination, weighted value)` table.
pub fn select_from(
    table: impl IntoIterator<Item = (PlaneCombination, f64)>,
) -> Option<PlaneCombination> {
    table
        .into_iter()
        .max_by(|&a, &b| preference(a, b))
        .map(|(c, _)| c)
}
