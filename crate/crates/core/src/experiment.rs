//! Seeded end-to-end experiments.
//!
//! The accuracy experiment degrades sampled datasets by injecting verified
//! collision states and correlates the collision checker's accuracy with an
//! image-level accuracy derived from pixel set subtraction. The subset
//! experiment renders shrinking subsamples and tracks MSE against the full
//! render. Both emit reproducible JSON-serializable reports.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::colormap::Rgb8;
use crate::cspace::subsample;
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::metrics::{mse, pixel_setminus};
use crate::planar::{
    in_collision, random_workspace, sample_cspace, Bounds, PlanarRobot, SampleMode, Workspace,
    REJECTION_BUDGET_PER_SAMPLE,
};
use crate::raster::{FileFormat, RasterImage};
use crate::render::{render, PlotMode, RenderConfig, RenderSpec};
use crate::rng::{self, subseed};
use crate::stats::{fisher_z_mean, pearson, CorrelationSummary};

pub const SCHEMA_VERSION: u32 = 1;

/// Fisher z is undefined at |r| = 1; measured correlations that land there
/// are pulled inside by one ulp-scale nudge before aggregation.
const MAX_FISHER_R: f64 = 1.0 - 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_joints: usize,
    /// Samples per workspace dataset.
    pub m: usize,
    pub n_workspaces: usize,
    pub n_d: usize,
    pub seed: u64,
    /// None picks the experiment's own default schedule.
    pub fractions: Option<Vec<f64>>,
    pub n_obstacles: usize,
    pub link_length: f64,
    pub link_half_width: f64,
    pub obstacle_radius: (f64, f64),
    /// Obstacles are placed in the centered square of this half extent.
    pub bound_half_extent: f64,
    /// Layout/colormap overrides for every render in the experiment.
    pub render: RenderConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_joints: 7,
            m: 10_000,
            n_workspaces: 10,
            n_d: 500,
            seed: 7,
            fractions: None,
            n_obstacles: 4,
            link_length: 0.5,
            link_half_width: 0.05,
            obstacle_radius: (0.2, 0.5),
            bound_half_extent: 2.5,
            render: RenderConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_joints < 2 {
            return Err(Error::BadConfig("n_joints must be at least 2".into()));
        }
        if self.m == 0 {
            return Err(Error::BadConfig("m must be positive".into()));
        }
        if self.n_workspaces == 0 {
            return Err(Error::BadConfig("n_workspaces must be at least 1".into()));
        }
        if let Some(fr) = &self.fractions {
            if fr.is_empty() || fr.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
                return Err(Error::BadConfig("fractions must be a non-empty subset of (0, 1]".into()));
            }
        }
        Ok(())
    }

    /// The identical-link chain this config describes.
    pub fn robot(&self) -> PlanarRobot {
        PlanarRobot::uniform(self.n_joints, self.link_length, self.link_half_width)
    }

    /// Render settings with the config's n_d as the discretization fallback.
    pub fn resolve_render(&self) -> Result<RenderSpec> {
        let mut rc = self.render.clone();
        rc.n_d = Some(rc.n_d.unwrap_or(self.n_d));
        rc.resolve(self.n_joints)
    }

    /// FNV-1a over the canonical JSON encoding; identifies the exact config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf29ce484222325;
        for b in json.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

/// Deterministically builds workspace `w` of the config's sequence and samples
/// a dataset in it. With `SampleMode::FreeOnly` this reproduces exactly the
/// scene the experiment pipelines use for the same `w`.
pub fn generate_scene(
    cfg: &ExperimentConfig,
    w: usize,
    mode: SampleMode,
) -> Result<(PlanarRobot, Workspace, Dataset)> {
    cfg.validate()?;
    let robot = cfg.robot();
    let base = subseed(cfg.seed, w as u64);
    let bounds = Bounds::centered(cfg.bound_half_extent);
    let ws = random_workspace(subseed(base, 0), cfg.n_obstacles, bounds, cfg.obstacle_radius)?;
    let ds = sample_cspace(&robot, &ws, cfg.m, subseed(base, 1), mode)?;
    Ok((robot, ws, ds))
}

/// Replaces ceil(fraction*m) samples at seeded-random positions with
/// rejection-sampled configurations verified to collide; replaced samples are
/// relabeled Collision. fraction 0 is the no-op limit.
pub fn inject_collision_states(
    ds: &Dataset,
    fraction: f64,
    robot: &PlanarRobot,
    ws: &Workspace,
    seed: u64,
) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::FractionOutOfRange(fraction));
    }
    ds.validate()?;
    let m = ds.m();
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    let count = ((fraction * m as f64).ceil() as usize).min(m);
    if count == 0 {
        return Ok(ds.clone());
    }

    let mut r = rng::stream(seed);
    // seeded distinct positions via partial shuffle, applied in index order
    let mut idx: Vec<usize> = (0..m).collect();
    for k in 0..count.min(m - 1) {
        let j = k + rng::uniform_index(&mut r, m - k);
        idx.swap(k, j);
    }
    let mut positions: Vec<usize> = idx[..count].to_vec();
    positions.sort_unstable();

    let mut out = ds.clone();
    let budget = REJECTION_BUDGET_PER_SAMPLE * count;
    let mut attempts = 0usize;
    for (done, &pos) in positions.iter().enumerate() {
        loop {
            if attempts >= budget {
                return Err(Error::RejectionBudget {
                    wanted: count - done,
                    attempts,
                });
            }
            attempts += 1;
            let q: Vec<f64> = (0..ds.n_joints).map(|_| rng::uniform_angle(&mut r)).collect();
            if in_collision(robot, ws, &q)? {
                out.samples[pos] = q;
                out.labels[pos] = Label::Collision;
                break;
            }
        }
    }
    Ok(out)
}

/// Fraction of Free labels.
pub fn checker_accuracy(ds: &Dataset) -> Result<f64> {
    if ds.m() == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(ds.free_count() as f64 / ds.m() as f64)
}

/// 1 - mismatch_ratio of setminus(perturbed, reference): the share of the
/// perturbed render's ink that the reference confirms.
pub fn visualization_accuracy(
    perturbed: &RasterImage,
    reference: &RasterImage,
    background: Rgb8,
) -> Result<f64> {
    let (_, stats) = pixel_setminus(perturbed, reference, background)?;
    Ok(1.0 - stats.mismatch_ratio)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub workspace: String,
    pub fraction: f64,
    pub checker_accuracy: f64,
    pub visualization_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceCorrelation {
    pub workspace: String,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedWorkspace {
    pub workspace: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub schema_version: u32,
    pub kind: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    /// Sign convention of the correlated quantities.
    pub orientation: String,
    pub rows: Vec<AccuracyRow>,
    pub correlations: Vec<WorkspaceCorrelation>,
    pub skipped: Vec<SkippedWorkspace>,
    pub summary: CorrelationSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetRow {
    pub workspace: String,
    pub fraction: f64,
    pub mse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetFractionSummary {
    pub fraction: f64,
    pub mean_mse: f64,
    pub sd_mse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetReport {
    pub schema_version: u32,
    pub kind: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub rows: Vec<SubsetRow>,
    pub skipped: Vec<SkippedWorkspace>,
    pub summary: Vec<SubsetFractionSummary>,
}

/// Where experiments optionally dump per-step renders.
#[derive(Clone, Copy, Debug)]
pub struct ImageSink<'a> {
    pub dir: &'a Path,
    pub format: FileFormat,
}

impl ImageSink<'_> {
    fn save(&self, stem: &str, img: &RasterImage) -> Result<()> {
        img.save(&self.dir.join(format!("{stem}.{}", self.format.extension())))
    }
}

fn save_image(sink: Option<&ImageSink<'_>>, stem: &str, img: &RasterImage) -> Result<()> {
    match sink {
        Some(s) => s.save(stem, img),
        None => Ok(()),
    }
}

struct WorkspaceRun {
    id: String,
    ws: Workspace,
    ds: Dataset,
}

/// Builds workspace w of the experiment with its FreeOnly dataset, or
/// explains why it is unusable.
fn build_workspace(
    cfg: &ExperimentConfig,
    robot: &PlanarRobot,
    w: usize,
) -> std::result::Result<WorkspaceRun, String> {
    let base = subseed(cfg.seed, w as u64);
    let bounds = Bounds::centered(cfg.bound_half_extent);
    let ws = random_workspace(subseed(base, 0), cfg.n_obstacles, bounds, cfg.obstacle_radius)
        .map_err(|e| format!("workspace generation failed: {e}"))?;
    let ds = sample_cspace(robot, &ws, cfg.m, subseed(base, 1), SampleMode::FreeOnly)
        .map_err(|e| format!("free-space sampling failed: {e}"))?;
    Ok(WorkspaceRun {
        id: format!("ws-{w}"),
        ws,
        ds,
    })
}

/// Injection sweep: correlate checker accuracy with visualization accuracy
/// across injected fractions, per workspace, then Fisher-average the r's.
pub fn run_accuracy_experiment(
    cfg: &ExperimentConfig,
    images: Option<&ImageSink<'_>>,
) -> Result<AccuracyReport> {
    cfg.validate()?;
    let fractions = cfg
        .fractions
        .clone()
        .unwrap_or_else(|| (1..=10).map(|k| k as f64 / 10.0).collect());
    if fractions.len() < 3 {
        return Err(Error::BadConfig(
            "accuracy experiment needs at least 3 fractions for a correlation".into(),
        ));
    }
    let robot = cfg.robot();
    let spec = cfg.resolve_render()?;
    let reference_spec = RenderSpec { mode: PlotMode::FreeOnly, ..spec.clone() };
    let injected_spec = RenderSpec { mode: PlotMode::All, ..spec };

    let mut rows = Vec::new();
    let mut correlations = Vec::new();
    let mut skipped = Vec::new();
    for w in 0..cfg.n_workspaces {
        let run = match build_workspace(cfg, &robot, w) {
            Ok(run) => run,
            Err(reason) => {
                skipped.push(SkippedWorkspace { workspace: format!("ws-{w}"), reason });
                continue;
            }
        };
        let reference = render(&run.ds, &reference_spec)?;
        save_image(images, &format!("{}-reference", run.id), &reference)?;

        let base = subseed(cfg.seed, w as u64);
        let mut xs = Vec::with_capacity(fractions.len());
        let mut ys = Vec::with_capacity(fractions.len());
        let mut ws_rows = Vec::with_capacity(fractions.len());
        let mut failure = None;
        for (fi, &fraction) in fractions.iter().enumerate() {
            let injected =
                match inject_collision_states(&run.ds, fraction, &robot, &run.ws, subseed(base, 2 + fi as u64)) {
                    Ok(d) => d,
                    Err(e) => {
                        failure = Some(format!("injection at fraction {fraction} failed: {e}"));
                        break;
                    }
                };
            let img = render(&injected, &injected_spec)?;
            save_image(images, &format!("{}-injected-{fraction}", run.id), &img)?;
            let checker = checker_accuracy(&injected)?;
            let viz = visualization_accuracy(&img, &reference, injected_spec.layout.background)?;
            xs.push(checker);
            ys.push(viz);
            ws_rows.push(AccuracyRow {
                workspace: run.id.clone(),
                fraction,
                checker_accuracy: checker,
                visualization_accuracy: viz,
            });
        }
        if let Some(reason) = failure {
            skipped.push(SkippedWorkspace { workspace: run.id, reason });
            continue;
        }
        match pearson(&xs, &ys) {
            Ok(r) => {
                rows.extend(ws_rows);
                correlations.push(WorkspaceCorrelation {
                    workspace: run.id,
                    r: r.clamp(-MAX_FISHER_R, MAX_FISHER_R),
                });
            }
            Err(e) => skipped.push(SkippedWorkspace {
                workspace: run.id,
                reason: format!("correlation undefined: {e}"),
            }),
        }
    }

    if correlations.is_empty() {
        return Err(Error::DegenerateExperiment(format!(
            "all {} workspaces were skipped (first reason: {})",
            cfg.n_workspaces,
            skipped.first().map_or("none".into(), |s| s.reason.clone())
        )));
    }
    let summary = fisher_z_mean(&correlations.iter().map(|c| c.r).collect::<Vec<_>>())?;
    Ok(AccuracyReport {
        schema_version: SCHEMA_VERSION,
        kind: "accuracy".into(),
        config: cfg.clone(),
        config_hash: cfg.hash(),
        orientation: "visualization_accuracy = 1 - mismatch_ratio of setminus(injected, reference); \
                      both accuracies fall as the injected fraction grows, so the expected correlation is positive"
            .into(),
        rows,
        correlations,
        skipped,
        summary,
    })
}

/// Subsampling sweep: MSE of each subset render against the full render,
/// summarized as mean and sample standard deviation per fraction.
pub fn run_subset_experiment(
    cfg: &ExperimentConfig,
    images: Option<&ImageSink<'_>>,
) -> Result<SubsetReport> {
    cfg.validate()?;
    let fractions = cfg
        .fractions
        .clone()
        .unwrap_or_else(|| (1..=9).rev().map(|k| k as f64 / 10.0).collect());
    let robot = cfg.robot();
    let spec = cfg.resolve_render()?;

    let mut rows: Vec<SubsetRow> = Vec::new();
    let mut skipped = Vec::new();
    let mut used = 0usize;
    for w in 0..cfg.n_workspaces {
        let run = match build_workspace(cfg, &robot, w) {
            Ok(run) => run,
            Err(reason) => {
                skipped.push(SkippedWorkspace { workspace: format!("ws-{w}"), reason });
                continue;
            }
        };
        let full = render(&run.ds, &spec)?;
        save_image(images, &format!("{}-full", run.id), &full)?;
        let base = subseed(cfg.seed, w as u64);
        for (fi, &fraction) in fractions.iter().enumerate() {
            let sub = subsample(&run.ds, fraction, subseed(base, 2 + fi as u64))?;
            let img = render(&sub, &spec)?;
            save_image(images, &format!("{}-subset-{fraction}", run.id), &img)?;
            rows.push(SubsetRow {
                workspace: run.id.clone(),
                fraction,
                mse: mse(&img, &full)?,
            });
        }
        used += 1;
    }
    if used == 0 {
        return Err(Error::DegenerateExperiment(format!(
            "all {} workspaces were skipped (first reason: {})",
            cfg.n_workspaces,
            skipped.first().map_or("none".into(), |s| s.reason.clone())
        )));
    }

    let summary = fractions
        .iter()
        .map(|&fraction| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.fraction == fraction)
                .map(|r| r.mse)
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let sd = if vals.len() < 2 {
                0.0
            } else {
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() as f64 - 1.0))
                    .sqrt()
            };
            SubsetFractionSummary { fraction, mean_mse: mean, sd_mse: sd }
        })
        .collect();
    Ok(SubsetReport {
        schema_version: SCHEMA_VERSION,
        kind: "subset".into(),
        config: cfg.clone(),
        config_hash: cfg.hash(),
        rows,
        skipped,
        summary,
    })
}
