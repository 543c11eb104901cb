//! Python bindings for the `planemark` toolkit.

use planemark::attacks::{default_suite, Attack, AttackKind, DEFAULT_SEED};
use planemark::bitplane::{self, PlaneIndex};
use planemark::metrics::{self, WeightProfile};
use planemark::optimizer::{self, PlaneCombination, SweepPlan};
use planemark::raster::{self, GrayImage};
use planemark::{corpus, report};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

fn err(e: planemark::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn plane(i: i64) -> PyResult<PlaneIndex> {
    PlaneIndex::new(i).map_err(err)
}

/// 8-bit grayscale image.
#[pyclass(name = "GrayImage", module = "pyplanemark")]
#[derive(Clone)]
struct PyGrayImage(GrayImage);

#[pymethods]
impl PyGrayImage {
    #[new]
    fn new(width: usize, height: usize, pixels: Vec<u8>) -> PyResult<Self> {
        GrayImage::new(width, height, pixels).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_pgm(data: &[u8]) -> PyResult<Self> {
        raster::load_pgm(data).map(Self).map_err(err)
    }

    fn to_pgm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &raster::save_pgm(&self.0))
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn pixels(&self) -> Vec<u8> {
        self.0.pixels().to_vec()
    }

    fn get(&self, row: usize, col: usize) -> PyResult<u8> {
        if row >= self.0.height() || col >= self.0.width() {
            return Err(PyValueError::new_err("pixel out of range"));
        }
        Ok(self.0.get(row, col))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("GrayImage({}x{})", self.0.width(), self.0.height())
    }
}

/// Binary plane of an image, tagged with its plane number (1 = MSB).
#[pyclass(name = "BitPlane", module = "pyplanemark")]
#[derive(Clone)]
struct PyBitPlane(bitplane::BitPlane);

#[pymethods]
impl PyBitPlane {
    #[new]
    fn new(width: usize, height: usize, bits: Vec<u8>, index: i64) -> PyResult<Self> {
        bitplane::BitPlane::new(width, height, bits, plane(index)?)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn index(&self) -> u8 {
        self.0.index().get()
    }

    #[getter]
    fn bits(&self) -> Vec<u8> {
        self.0.bits().to_vec()
    }

    fn count_ones(&self) -> usize {
        self.0.count_ones()
    }

    fn to_image(&self) -> PyGrayImage {
        PyGrayImage(self.0.to_image())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!(
            "BitPlane({}x{}, plane {})",
            self.0.width(),
            self.0.height(),
            self.0.index()
        )
    }
}

/// Result of a plane-combination sweep.
#[pyclass(name = "Report", module = "pyplanemark")]
struct PyReport(optimizer::OptimizationReport);

#[pymethods]
impl PyReport {
    fn json(&self) -> String {
        report::report_json(&self.0)
    }

    fn csv(&self) -> String {
        report::report_csv(&self.0)
    }

    /// `(profile, image_plane, watermark_plane, weighted)` per profile.
    fn selections(&self) -> Vec<(String, u8, u8, f64)> {
        self.0
            .selections
            .iter()
            .map(|s| {
                (
                    s.profile.clone(),
                    s.combination.image_plane.get(),
                    s.combination.watermark_plane.get(),
                    s.weighted,
                )
            })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.0.records.len()
    }
}

#[pyfunction]
fn decompose(image: &PyGrayImage) -> Vec<PyBitPlane> {
    bitplane::decompose(&image.0)
        .into_planes()
        .into_iter()
        .map(PyBitPlane)
        .collect()
}

#[pyfunction]
fn recompose(planes: Vec<PyBitPlane>) -> PyResult<PyGrayImage> {
    let stack =
        bitplane::PlaneStack::new(planes.into_iter().map(|p| p.0).collect()).map_err(err)?;
    bitplane::recompose(&stack).map(PyGrayImage).map_err(err)
}

#[pyfunction]
fn extract_plane(image: &PyGrayImage, plane_index: i64) -> PyResult<PyBitPlane> {
    Ok(PyBitPlane(bitplane::extract_plane(
        &image.0,
        plane(plane_index)?,
    )))
}

#[pyfunction]
fn embed(
    cover: &PyGrayImage,
    watermark: &PyGrayImage,
    image_plane: i64,
    wm_plane: i64,
) -> PyResult<PyGrayImage> {
    bitplane::embed(
        &cover.0,
        &watermark.0,
        plane(image_plane)?,
        plane(wm_plane)?,
    )
    .map(PyGrayImage)
    .map_err(err)
}

#[pyfunction]
fn embed_plane(cover: &PyGrayImage, mark: &PyBitPlane, image_plane: i64) -> PyResult<PyGrayImage> {
    bitplane::embed_plane(&cover.0, &mark.0, plane(image_plane)?)
        .map(PyGrayImage)
        .map_err(err)
}

#[pyfunction]
fn pseudorandom_plane(seed: u64, width: usize, height: usize) -> PyResult<PyBitPlane> {
    bitplane::pseudorandom_plane(seed, width, height)
        .map(PyBitPlane)
        .map_err(err)
}

fn to_json(value: &Bound<'_, PyAny>) -> PyResult<serde_json::Value> {
    if value.is_instance_of::<pyo3::types::PyBool>() {
        return Err(PyValueError::new_err("attack parameters must be numbers"));
    }
    if let Ok(i) = value.extract::<i64>() {
        return Ok(i.into());
    }
    let f: f64 = value
        .extract()
        .map_err(|_| PyValueError::new_err("attack parameters must be numbers"))?;
    Ok(f.into())
}

/// Applies one attack; parameters not given take their defaults.
#[pyfunction]
#[pyo3(signature = (image, kind, **params))]
fn apply_attack(
    image: &PyGrayImage,
    kind: &str,
    params: Option<&Bound<'_, PyDict>>,
) -> PyResult<PyGrayImage> {
    let kind: AttackKind = kind.parse().map_err(err)?;
    let mut spec = serde_json::to_value(kind.default_attack()).expect("attack serializes");
    if let Some(params) = params {
        for (k, v) in params.iter() {
            spec[k.extract::<String>()?] = to_json(&v)?;
        }
    }
    let attack: Attack =
        serde_json::from_value(spec).map_err(|e| PyValueError::new_err(e.to_string()))?;
    planemark::attacks::apply_attack(&image.0, &attack)
        .map(PyGrayImage)
        .map_err(err)
}

#[pyfunction]
fn crc(w: &PyBitPlane, w_star: &PyBitPlane) -> PyResult<f64> {
    metrics::crc(&w.0, &w_star.0).map_err(err)
}

#[pyfunction]
fn mse(a: &PyGrayImage, b: &PyGrayImage) -> PyResult<f64> {
    metrics::mse(&a.0, &b.0).map_err(err)
}

/// PSNR in dB; `inf` for identical images.
#[pyfunction]
fn psnr(a: &PyGrayImage, b: &PyGrayImage) -> PyResult<f64> {
    metrics::psnr(&a.0, &b.0).map(|p| p.value()).map_err(err)
}

fn profile(name: &str, weights: Option<Vec<f64>>) -> PyResult<WeightProfile> {
    match weights {
        Some(w) => WeightProfile::new(name, &w),
        None => WeightProfile::preset(name),
    }
    .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (crcs, profile_name, weights=None))]
fn weighted_crc(crcs: Vec<f64>, profile_name: &str, weights: Option<Vec<f64>>) -> PyResult<f64> {
    metrics::weighted_crc(&crcs, &profile(profile_name, weights)?).map_err(err)
}

/// Preset profiles as `{name: [ten weights]}`.
#[pyfunction]
fn preset_profiles<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for p in WeightProfile::presets() {
        out.set_item(p.name(), p.weights().to_vec())?;
    }
    Ok(out)
}

fn profiles(names: Option<Vec<String>>) -> PyResult<Vec<WeightProfile>> {
    match names {
        None => Ok(WeightProfile::presets()),
        Some(names) => names.iter().map(|n| profile(n, None)).collect(),
    }
}

/// Scores one combination under the default attack suite; returns a JSON document.
#[pyfunction]
#[pyo3(signature = (cover, watermark, image_plane, wm_plane, profile_names=None, seed=DEFAULT_SEED))]
fn evaluate(
    py: Python<'_>,
    cover: &PyGrayImage,
    watermark: &PyGrayImage,
    image_plane: i64,
    wm_plane: i64,
    profile_names: Option<Vec<String>>,
    seed: u64,
) -> PyResult<String> {
    let combination = PlaneCombination::new(image_plane, wm_plane).map_err(err)?;
    let profiles = profiles(profile_names)?;
    let attacks = default_suite(seed);
    let record = py
        .allow_threads(|| {
            optimizer::evaluate_combination(
                &cover.0,
                &watermark.0,
                combination,
                &attacks,
                &profiles,
            )
        })
        .map_err(err)?;
    Ok(report::record_json(&record, &attacks, &profiles))
}

/// Sweeps plane combinations (default: image planes 7 and 8 against all watermark planes).
#[pyfunction]
#[pyo3(signature = (cover, watermark, image_planes=None, wm_planes=None, profile_names=None, seed=DEFAULT_SEED, baseline=true))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    cover: &PyGrayImage,
    watermark: &PyGrayImage,
    image_planes: Option<Vec<i64>>,
    wm_planes: Option<Vec<i64>>,
    profile_names: Option<Vec<String>>,
    seed: u64,
    baseline: bool,
) -> PyResult<PyReport> {
    let mut plan = SweepPlan {
        attacks: default_suite(seed).to_vec(),
        profiles: profiles(profile_names)?,
        baseline_seed: baseline.then_some(seed),
        ..SweepPlan::default()
    };
    if let Some(l) = image_planes {
        plan.image_planes = l.into_iter().map(plane).collect::<PyResult<_>>()?;
    }
    if let Some(k) = wm_planes {
        plan.watermark_planes = k.into_iter().map(plane).collect::<PyResult<_>>()?;
    }
    py.allow_threads(|| optimizer::sweep(&cover.0, &watermark.0, &plan))
        .map(PyReport)
        .map_err(err)
}

#[pyfunction]
fn corpus_cover() -> PyGrayImage {
    PyGrayImage(corpus::cover())
}

#[pyfunction]
fn corpus_signature() -> PyGrayImage {
    PyGrayImage(corpus::signature())
}

#[pymodule]
fn pyplanemark(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrayImage>()?;
    m.add_class::<PyBitPlane>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(recompose, m)?)?;
    m.add_function(wrap_pyfunction!(extract_plane, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(embed_plane, m)?)?;
    m.add_function(wrap_pyfunction!(pseudorandom_plane, m)?)?;
    m.add_function(wrap_pyfunction!(apply_attack, m)?)?;
    m.add_function(wrap_pyfunction!(crc, m)?)?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_crc, m)?)?;
    m.add_function(wrap_pyfunction!(preset_profiles, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_cover, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_signature, m)?)?;
    m.add("ATTACKS", report::attack_names())?;
    Ok(())
}
