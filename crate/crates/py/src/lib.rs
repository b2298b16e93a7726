//! Python bindings for the csviz toolkit.
//!
//! Exposes the dataset container, the radial C-space renderer, the image
//! comparison metrics, and the desk-scale experiment pipelines. Structured
//! configs and reports cross the boundary as JSON strings using the same
//! schemas the `csviz` CLI reads and writes; images and datasets cross as
//! small wrapper classes.
//!
//! Error mapping: invalid inputs raise `ValueError`; experiment-level
//! failures (sampling budget exhausted, every workspace skipped) raise
//! `RuntimeError`.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use csviz_core as cs;

fn core_err(e: cs::Error) -> PyErr {
    if e.is_experiment_failure() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn bad_input(context: &str, e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(format!("{context}: {e}"))
}

fn label_from_u8(v: u8) -> PyResult<cs::Label> {
    match v {
        0 => Ok(cs::Label::Free),
        1 => Ok(cs::Label::Collision),
        other => Err(PyValueError::new_err(format!(
            "label must be 0 (free) or 1 (collision), got {other}"
        ))),
    }
}

fn label_to_u8(l: cs::Label) -> u8 {
    match l {
        cs::Label::Free => 0,
        cs::Label::Collision => 1,
    }
}

fn parse_plot_mode(s: &str) -> PyResult<cs::PlotMode> {
    match s {
        "free-only" => Ok(cs::PlotMode::FreeOnly),
        "all" => Ok(cs::PlotMode::All),
        "collision-gray" => Ok(cs::PlotMode::CollisionGray),
        other => Err(PyValueError::new_err(format!(
            "plot mode must be 'free-only', 'all', or 'collision-gray', got '{other}'"
        ))),
    }
}

fn parse_sample_mode(s: &str) -> PyResult<cs::SampleMode> {
    match s {
        "free-only" => Ok(cs::SampleMode::FreeOnly),
        "all" => Ok(cs::SampleMode::All),
        other => Err(PyValueError::new_err(format!(
            "sample mode must be 'free-only' or 'all', got '{other}'"
        ))),
    }
}

/// Labeled joint-angle samples for one workspace.
#[pyclass(module = "csviz", skip_from_py_object)]
#[derive(Clone)]
struct Dataset {
    inner: cs::Dataset,
}

#[pymethods]
impl Dataset {
    /// Build a dataset from raw samples (radians in [-pi, pi]) and labels
    /// (0 free, 1 collision). Validates shape and ranges.
    #[new]
    #[pyo3(signature = (samples, labels, workspace_id = String::from("python"), seed = 0))]
    fn new(
        samples: Vec<Vec<f64>>,
        labels: Vec<u8>,
        workspace_id: String,
        seed: u64,
    ) -> PyResult<Self> {
        let labels = labels
            .into_iter()
            .map(label_from_u8)
            .collect::<PyResult<Vec<_>>>()?;
        let inner = cs::Dataset {
            n_joints: samples.first().map_or(0, Vec::len),
            workspace_id,
            seed,
            samples,
            labels,
        };
        inner.validate().map_err(core_err)?;
        Ok(Dataset { inner })
    }

    /// Read a dataset from a .json or .csv file (picked by extension).
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Dataset { inner: cs::Dataset::load(&path).map_err(core_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Dataset { inner: cs::Dataset::from_json(text).map_err(core_err)? })
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(Dataset { inner: cs::Dataset::from_csv(text).map_err(core_err)? })
    }

    /// Write the dataset as .json or .csv (picked by extension).
    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(core_err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(core_err)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[getter]
    fn n_joints(&self) -> usize {
        self.inner.n_joints
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn free_count(&self) -> usize {
        self.inner.free_count()
    }

    #[getter]
    fn workspace_id(&self) -> String {
        self.inner.workspace_id.clone()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn samples(&self) -> Vec<Vec<f64>> {
        self.inner.samples.clone()
    }

    fn labels(&self) -> Vec<u8> {
        self.inner.labels.iter().copied().map(label_to_u8).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.m()
    }

    fn __eq__(&self, other: &Dataset) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(n_joints={}, m={}, free={}, workspace_id='{}')",
            self.inner.n_joints,
            self.inner.m(),
            self.inner.free_count(),
            self.inner.workspace_id
        )
    }
}

/// 8-bit RGB raster image.
#[pyclass(module = "csviz", skip_from_py_object)]
#[derive(Clone)]
struct Image {
    inner: cs::RasterImage,
}

#[pymethods]
impl Image {
    /// Read a .ppm or .png file (picked by extension).
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Image { inner: cs::RasterImage::load(&path).map_err(core_err)? })
    }

    #[staticmethod]
    fn from_ppm(bytes: &[u8]) -> PyResult<Self> {
        Ok(Image { inner: cs::decode_ppm(bytes).map_err(core_err)? })
    }

    #[staticmethod]
    fn from_png(bytes: &[u8]) -> PyResult<Self> {
        Ok(Image { inner: cs::decode_png(bytes).map_err(core_err)? })
    }

    /// Write the image as .ppm or .png (picked by extension).
    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(core_err)
    }

    /// Binary P6 PPM encoding.
    fn to_ppm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &cs::encode_ppm(&self.inner))
    }

    /// PNG encoding.
    fn to_png<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        Ok(PyBytes::new(py, &cs::encode_png(&self.inner).map_err(core_err)?))
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.width
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.height
    }

    /// RGB triple at (x, y); origin top-left.
    fn pixel(&self, x: u32, y: u32) -> PyResult<(u8, u8, u8)> {
        if x >= self.inner.width || y >= self.inner.height {
            return Err(PyValueError::new_err(format!(
                "pixel ({x}, {y}) outside {}x{} image",
                self.inner.width, self.inner.height
            )));
        }
        let cs::Rgb8([r, g, b]) = self.inner.get(x, y);
        Ok((r, g, b))
    }

    fn __eq__(&self, other: &Image) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Image({}x{})", self.inner.width, self.inner.height)
    }
}

/// Index of the uniform bin over [-pi, pi] that contains theta.
#[pyfunction]
fn discretize(theta: f64, n_d: usize) -> PyResult<usize> {
    cs::discretize(theta, n_d).map_err(core_err)
}

/// Center angle of a bin; the inverse residual is at most pi / n_d.
#[pyfunction]
fn bin_center(bin: usize, n_d: usize) -> PyResult<f64> {
    cs::bin_center(bin, n_d).map_err(core_err)
}

/// Deterministic sub-bin shifts separating duplicate child bins that have
/// distinct parents; no shift exceeds epsilon_max (default: half bin width).
#[pyfunction]
#[pyo3(signature = (ds, n_d, epsilon_max = None))]
fn apply_epsilon(ds: &Dataset, n_d: usize, epsilon_max: Option<f64>) -> PyResult<Dataset> {
    let disc = cs::DiscretizationSpec { n_d };
    let pert = match epsilon_max {
        Some(epsilon_max) => cs::PerturbationSpec { epsilon_max },
        None => cs::PerturbationSpec::default_for(n_d),
    };
    Ok(Dataset { inner: cs::apply_epsilon(&ds.inner, &disc, &pert).map_err(core_err)? })
}

/// Seeded uniform subset with floor(fraction * m) samples, original order.
#[pyfunction]
fn subsample(ds: &Dataset, fraction: f64, seed: u64) -> PyResult<Dataset> {
    Ok(Dataset { inner: cs::subsample(&ds.inner, fraction, seed).map_err(core_err)? })
}

/// Render a dataset as a radial plot plus legend strip.
///
/// `config_json` takes the same document as the CLI's --config render file;
/// the keyword overrides beat it. `mode` is 'free-only', 'all', or
/// 'collision-gray'.
#[pyfunction]
#[pyo3(signature = (ds, config_json = None, n_d = None, canvas_px = None, epsilon_max = None, mode = None))]
fn render(
    ds: &Dataset,
    config_json: Option<&str>,
    n_d: Option<usize>,
    canvas_px: Option<u32>,
    epsilon_max: Option<f64>,
    mode: Option<&str>,
) -> PyResult<Image> {
    let mut rc: cs::RenderConfig = match config_json {
        Some(text) => serde_json::from_str(text).map_err(|e| bad_input("render config", e))?,
        None => cs::RenderConfig::default(),
    };
    if n_d.is_some() {
        rc.n_d = n_d;
    }
    if canvas_px.is_some() {
        rc.canvas_px = canvas_px;
    }
    if epsilon_max.is_some() {
        rc.epsilon_max = epsilon_max;
    }
    if let Some(m) = mode {
        rc.mode = Some(parse_plot_mode(m)?);
    }
    let spec = rc.resolve(ds.inner.n_joints).map_err(core_err)?;
    Ok(Image { inner: cs::render(&ds.inner, &spec).map_err(core_err)? })
}

/// Default colormap color for a position t in [0, 1].
#[pyfunction]
fn colormap_lookup(t: f64) -> (u8, u8, u8) {
    let cs::Rgb8([r, g, b]) = cs::colormap_lookup(&cs::ColorMapSpec::default(), t);
    (r, g, b)
}

/// Pixels of `a` not confirmed by `b`, on white. Returns the difference
/// image and a stats dict (nonwhite_before, nonwhite_after, mismatch_ratio).
#[pyfunction]
fn pixel_setminus<'py>(
    py: Python<'py>,
    a: &Image,
    b: &Image,
) -> PyResult<(Image, Bound<'py, PyDict>)> {
    let (img, stats) = cs::pixel_setminus(&a.inner, &b.inner, cs::WHITE).map_err(core_err)?;
    let d = PyDict::new(py);
    d.set_item("nonwhite_before", stats.nonwhite_before)?;
    d.set_item("nonwhite_after", stats.nonwhite_after)?;
    d.set_item("mismatch_ratio", stats.mismatch_ratio)?;
    Ok((Image { inner: img }, d))
}

/// Per-channel 255 - |a - b|; identical images come out all white.
#[pyfunction]
fn negative_subtraction(a: &Image, b: &Image) -> PyResult<Image> {
    Ok(Image { inner: cs::negative_subtraction(&a.inner, &b.inner).map_err(core_err)? })
}

/// Mean squared error over all pixels and channels.
#[pyfunction]
fn mse(a: &Image, b: &Image) -> PyResult<f64> {
    cs::mse(&a.inner, &b.inner).map_err(core_err)
}

/// Remove `rows` pixel rows from the bottom (e.g. the legend strip).
#[pyfunction]
fn crop_bottom(img: &Image, rows: u32) -> PyResult<Image> {
    Ok(Image { inner: cs::crop_bottom(&img.inner, rows).map_err(core_err)? })
}

/// Share of collision-free labels in the dataset.
#[pyfunction]
fn checker_accuracy(ds: &Dataset) -> PyResult<f64> {
    cs::checker_accuracy(&ds.inner).map_err(core_err)
}

/// 1 - mismatch_ratio of setminus(perturbed, reference) on white.
#[pyfunction]
fn visualization_accuracy(perturbed: &Image, reference: &Image) -> PyResult<f64> {
    cs::visualization_accuracy(&perturbed.inner, &reference.inner, cs::WHITE).map_err(core_err)
}

/// Sample Pearson correlation (needs >= 3 points, non-constant inputs).
#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    cs::pearson(&xs, &ys).map_err(core_err)
}

/// Fisher-z aggregate of correlations: dict with r_mean, se, n_groups.
#[pyfunction]
fn fisher_z_mean<'py>(py: Python<'py>, rs: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let s = cs::fisher_z_mean(&rs).map_err(core_err)?;
    let d = PyDict::new(py);
    d.set_item("r_mean", s.r_mean)?;
    d.set_item("se", s.se)?;
    d.set_item("n_groups", s.n_groups)?;
    Ok(d)
}

fn parse_experiment_config(
    config_json: Option<&str>,
    seed: Option<u64>,
    n_d: Option<usize>,
) -> PyResult<cs::ExperimentConfig> {
    let mut cfg: cs::ExperimentConfig = match config_json {
        Some(text) => serde_json::from_str(text).map_err(|e| bad_input("experiment config", e))?,
        None => cs::ExperimentConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(n_d) = n_d {
        cfg.n_d = n_d;
        cfg.render.n_d = None;
    }
    Ok(cfg)
}

/// Build one workspace of an experiment: the robot, a seeded random
/// workspace, and a sampled dataset. Returns (robot_json, workspace_json,
/// dataset); the JSON documents match the files `csviz generate` writes.
#[pyfunction]
#[pyo3(signature = (config_json = None, seed = None, workspace_index = 0, mode = "free-only"))]
fn generate_scene(
    config_json: Option<&str>,
    seed: Option<u64>,
    workspace_index: usize,
    mode: &str,
) -> PyResult<(String, String, Dataset)> {
    let cfg = parse_experiment_config(config_json, seed, None)?;
    let mode = parse_sample_mode(mode)?;
    let (robot, ws, ds) = cs::generate_scene(&cfg, workspace_index, mode).map_err(core_err)?;
    let robot_json =
        serde_json::to_string_pretty(&robot).map_err(|e| bad_input("robot json", e))?;
    let ws_json = serde_json::to_string_pretty(&ws).map_err(|e| bad_input("workspace json", e))?;
    Ok((robot_json, ws_json, Dataset { inner: ds }))
}

/// Relabel ceil(fraction * m) seeded-random free samples as collisions and
/// replace their angles with genuinely colliding configurations.
#[pyfunction]
fn inject_collision_states(
    ds: &Dataset,
    fraction: f64,
    robot_json: &str,
    workspace_json: &str,
    seed: u64,
) -> PyResult<Dataset> {
    let robot: cs::PlanarRobot =
        serde_json::from_str(robot_json).map_err(|e| bad_input("robot json", e))?;
    let ws: cs::Workspace =
        serde_json::from_str(workspace_json).map_err(|e| bad_input("workspace json", e))?;
    Ok(Dataset {
        inner: cs::inject_collision_states(&ds.inner, fraction, &robot, &ws, seed)
            .map_err(core_err)?,
    })
}

/// Run the collision-injection accuracy experiment; returns the report as a
/// JSON string (same schema as the CLI's accuracy-report.json).
#[pyfunction]
#[pyo3(signature = (config_json = None, seed = None, n_d = None))]
fn run_accuracy_experiment(
    config_json: Option<&str>,
    seed: Option<u64>,
    n_d: Option<usize>,
) -> PyResult<String> {
    let cfg = parse_experiment_config(config_json, seed, n_d)?;
    let report = cs::run_accuracy_experiment(&cfg, None).map_err(core_err)?;
    serde_json::to_string_pretty(&report).map_err(|e| bad_input("report json", e))
}

/// Run the subset-degradation experiment; returns the report as a JSON
/// string (same schema as the CLI's subset-report.json).
#[pyfunction]
#[pyo3(signature = (config_json = None, seed = None, n_d = None))]
fn run_subset_experiment(
    config_json: Option<&str>,
    seed: Option<u64>,
    n_d: Option<usize>,
) -> PyResult<String> {
    let cfg = parse_experiment_config(config_json, seed, n_d)?;
    let report = cs::run_subset_experiment(&cfg, None).map_err(core_err)?;
    serde_json::to_string_pretty(&report).map_err(|e| bad_input("report json", e))
}

#[pymodule]
fn csviz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("SCHEMA_VERSION", cs::SCHEMA_VERSION)?;
    m.add_class::<Dataset>()?;
    m.add_class::<Image>()?;
    m.add_function(wrap_pyfunction!(discretize, m)?)?;
    m.add_function(wrap_pyfunction!(bin_center, m)?)?;
    m.add_function(wrap_pyfunction!(apply_epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(subsample, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(colormap_lookup, m)?)?;
    m.add_function(wrap_pyfunction!(pixel_setminus, m)?)?;
    m.add_function(wrap_pyfunction!(negative_subtraction, m)?)?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(crop_bottom, m)?)?;
    m.add_function(wrap_pyfunction!(checker_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(visualization_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(fisher_z_mean, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scene, m)?)?;
    m.add_function(wrap_pyfunction!(inject_collision_states, m)?)?;
    m.add_function(wrap_pyfunction!(run_accuracy_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_subset_experiment, m)?)?;
    Ok(())
}
