//! JSON and CSV serialization of evaluation results.
//!
//! Every computed number is written with exactly six decimals; an infinite
//! PSNR is written as the string `"inf"`.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::attacks::{Attack, AttackKind};
use crate::metrics::{Psnr, WeightProfile};
use crate::optimizer::{BaselineRecord, EvaluationRecord, OptimizationReport, PlaneScores};

pub const REPORT_FORMAT: &str = "planemark-report/1";
pub const RECORD_FORMAT: &str = "planemark-record/1";

/// A number rendered with six fixed decimals.
#[derive(Debug, Clone, Copy)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_str(if self.0 > 0.0 { "inf" } else { "-inf" });
        }
        let raw =
            RawValue::from_string(format!("{:.6}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

pub fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

pub fn psnr_text(p: Psnr) -> String {
    match p {
        Psnr::Infinite => "inf".to_string(),
        Psnr::Finite(v) => fixed(v),
    }
}

struct PsnrField(Psnr);

impl Serialize for PsnrField {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Psnr::Infinite => s.serialize_str("inf"),
            Psnr::Finite(v) => Fixed(v).serialize(s),
        }
    }
}

/// Profile name → weighted CRC, in profile order.
struct WeightedMap<'a> {
    profiles: &'a [WeightProfile],
    values: &'a [f64],
}

impl Serialize for WeightedMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.values.len()))?;
        for (p, v) in self.profiles.iter().zip(self.values) {
            map.serialize_entry(p.name(), &Fixed(*v))?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct RecordJson<'a> {
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    image_plane: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    watermark_plane: Option<u8>,
    crcs: Vec<Fixed>,
    fidelity_psnr: PsnrField,
    recovery_psnr_no_attack: PsnrField,
    recovery_psnrs: Vec<PsnrField>,
    weighted: WeightedMap<'a>,
}

impl<'a> RecordJson<'a> {
    fn from_scores(
        label: String,
        image_plane: u8,
        scores: &'a PlaneScores,
        profiles: &'a [WeightProfile],
    ) -> Self {
        Self {
            label,
            seed: None,
            image_plane,
            watermark_plane: None,
            crcs: scores.crcs.iter().map(|&c| Fixed(c)).collect(),
            fidelity_psnr: PsnrField(scores.fidelity_psnr),
            recovery_psnr_no_attack: PsnrField(scores.recovery_psnr_no_attack),
            recovery_psnrs: scores
                .recovery_psnrs
                .iter()
                .map(|&p| PsnrField(p))
                .collect(),
            weighted: WeightedMap {
                profiles,
                values: &scores.weighted,
            },
        }
    }

    fn new(rec: &'a EvaluationRecord, profiles: &'a [WeightProfile]) -> Self {
        let c = rec.combination;
        Self {
            watermark_plane: Some(c.watermark_plane.get()),
            ..Self::from_scores(c.label(), c.image_plane.get(), &rec.scores, profiles)
        }
    }

    fn baseline(b: &'a BaselineRecord, profiles: &'a [WeightProfile]) -> Self {
        Self {
            seed: Some(b.seed),
            ..Self::from_scores(b.label(), b.image_plane.get(), &b.scores, profiles)
        }
    }
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    name: &'a str,
    weights: Vec<Fixed>,
}

fn profiles_json(profiles: &[WeightProfile]) -> Vec<ProfileJson<'_>> {
    profiles
        .iter()
        .map(|p| ProfileJson {
            name: p.name(),
            weights: p.weights().iter().map(|&w| Fixed(w)).collect(),
        })
        .collect()
}

#[derive(Serialize)]
struct SelectionJson<'a> {
    profile: &'a str,
    label: String,
    image_plane: u8,
    watermark_plane: u8,
    weighted: Fixed,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    format: &'static str,
    image_planes: Vec<u8>,
    watermark_planes: Vec<u8>,
    attacks: &'a [Attack],
    profiles: Vec<ProfileJson<'a>>,
    records: Vec<RecordJson<'a>>,
    selections: Vec<SelectionJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<RecordJson<'a>>,
}

#[derive(Serialize)]
struct SingleRecordJson<'a> {
    format: &'static str,
    attacks: &'a [Attack],
    profiles: Vec<ProfileJson<'a>>,
    record: RecordJson<'a>,
}

pub fn report_json(report: &OptimizationReport) -> String {
    let plan = &report.plan;
    let mut image_planes: Vec<u8> = plan.image_planes.iter().map(|p| p.get()).collect();
    let mut watermark_planes: Vec<u8> = plan.watermark_planes.iter().map(|p| p.get()).collect();
    image_planes.sort_unstable();
    image_planes.dedup();
    watermark_planes.sort_unstable();
    watermark_planes.dedup();
    let doc = ReportJson {
        format: REPORT_FORMAT,
        image_planes,
        watermark_planes,
        attacks: &plan.attacks,
        profiles: profiles_json(&plan.profiles),
        records: report
            .records
            .iter()
            .map(|r| RecordJson::new(r, &plan.profiles))
            .collect(),
        selections: report
            .selections
            .iter()
            .map(|s| SelectionJson {
                profile: &s.profile,
                label: s.combination.label(),
                image_plane: s.combination.image_plane.get(),
                watermark_plane: s.combination.watermark_plane.get(),
                weighted: Fixed(s.weighted),
            })
            .collect(),
        baseline: report
            .baseline
            .as_ref()
            .map(|b| RecordJson::baseline(b, &plan.profiles)),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

pub fn record_json(
    record: &EvaluationRecord,
    attacks: &[Attack],
    profiles: &[WeightProfile],
) -> String {
    let doc = SingleRecordJson {
        format: RECORD_FORMAT,
        attacks,
        profiles: profiles_json(profiles),
        record: RecordJson::new(record, profiles),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("record serializes");
    out.push('\n');
    out
}

/// Column headers of the CSV matrix.
pub fn csv_header(attacks: &[Attack], profiles: &[WeightProfile]) -> Vec<String> {
    let mut header = vec!["combination".to_string()];
    header.extend(
        attacks
            .iter()
            .enumerate()
            .map(|(i, a)| format!("crc_{}_{}", i + 1, a.kind())),
    );
    header.push("fidelity_psnr".to_string());
    header.extend(profiles.iter().map(|p| p.name().to_string()));
    header
}

/// One row per combination: label, ten CRCs, fidelity PSNR, one weighted CRC per profile.
pub fn report_csv(report: &OptimizationReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header(&report.plan.attacks, &report.plan.profiles))
        .expect("in-memory write");
    for rec in &report.records {
        let mut row = vec![rec.combination.label()];
        row.extend(rec.scores.crcs.iter().map(|&c| fixed(c)));
        row.push(psnr_text(rec.scores.fidelity_psnr));
        row.extend(rec.scores.weighted.iter().map(|&v| fixed(v)));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Human-readable selection summary, one line per profile.
pub fn selection_summary(report: &OptimizationReport) -> String {
    let mut out = String::new();
    for s in &report.selections {
        out.push_str(&format!(
            "{}: {} weighted CRC {}\n",
            s.profile,
            s.combination.label(),
            fixed(s.weighted)
        ));
    }
    if let Some(b) = &report.baseline {
        for (p, v) in report.plan.profiles.iter().zip(&b.scores.weighted) {
            out.push_str(&format!(
                "{} baseline ({}): {}\n",
                p.name(),
                b.label(),
                fixed(*v)
            ));
        }
    }
    out
}

/// Canonical attack names, for help text.
pub fn attack_names() -> Vec<&'static str> {
    AttackKind::ALL.iter().map(|k| k.name()).collect()
}
