//! Radial rasterization of discretized configuration spaces.
//!
//! Joint pair i = 0..n-2 occupies one annular band. Within a band each parent
//! bin of joint i owns a ring whose radius grows with the bin index; a sample
//! is drawn on its parent's ring at the child angle theta_{i+1}, colored by
//! the parent bin through a shared colormap. Below the radial plot a legend
//! strip shows one [-pi, pi] colormap bar per joint pair.



use serde::{Deserialize, Serialize};

use crate::colormap::{colormap_lookup, parent_color, round_half_up, ColorMapSpec, Rgb8, WHITE};
use crate::cspace::{apply_epsilon, discretize, DiscretizationSpec, PerturbationSpec};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::raster::RasterImage;

/// Pixels kept clear between the outermost ring and the canvas edge.
pub const MARGIN_PX: f64 = 20.0;

/// Fill color for collision states under PlotMode::CollisionGray.
pub const COLLISION_GRAY: Rgb8 = Rgb8([128, 128, 128]);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotMode {
    /// Plot collision-free samples only; collision states appear as holes.
    #[default]
    FreeOnly,
    /// Plot every sample with its normal color, ignoring labels.
    All,
    /// Plot every sample, collision states in a reserved gray.
    CollisionGray,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutSpec {
    /// Square plot area side, pixels. Legends extend the image below it.
    pub canvas_px: u32,
    /// Inner ring radius, pixels.
    pub r0: f64,
    /// Radius increment per parent bin within a band, pixels.
    pub ring_step: f64,
    /// Radial gap between consecutive joint-pair bands, pixels.
    pub band_gap: f64,
    /// Side of the square painted per plotted point.
    pub point_px: u32,
    pub background: Rgb8,
    /// Total height of the legend strip appended below the plot; 0 disables.
    pub legend_strip_px: u32,
}

impl LayoutSpec {
    /// Default layout for a given problem size: canvas 2000 with ring_step
    /// sized to fit, growing the canvas instead when even step 1 overflows.
    pub fn default_for(n_joints: usize, n_d: usize) -> Result<Self> {
        let mut layout = LayoutSpec {
            canvas_px: 2000,
            r0: 60.0,
            ring_step: 1.0,
            band_gap: 12.0,
            point_px: 2,
            background: WHITE,
            legend_strip_px: 80,
        };
        if n_joints < 2 {
            return Err(Error::NeedTwoJoints(n_joints));
        }
        if n_d == 0 {
            return Err(Error::ZeroBins);
        }
        let bands = (n_joints - 1) as f64;
        let avail = layout.canvas_px as f64 / 2.0 - layout.r0 - MARGIN_PX - bands * layout.band_gap;
        layout.ring_step = (avail / (bands * n_d as f64)).floor().max(1.0);
        let outer = outermost_radius(n_joints, n_d, &layout);
        if outer + MARGIN_PX > layout.canvas_px as f64 / 2.0 {
            layout.canvas_px = 2 * (outer.ceil() as u32 + MARGIN_PX as u32);
        }
        layout.validate(n_joints, n_d)?;
        Ok(layout)
    }

    pub fn validate(&self, n_joints: usize, n_d: usize) -> Result<()> {
        if n_joints < 2 {
            return Err(Error::NeedTwoJoints(n_joints));
        }
        if n_d == 0 {
            return Err(Error::ZeroBins);
        }
        if !(self.r0 > 0.0) {
            return Err(Error::BadLayout("inner radius must be positive".into()));
        }
        if !(self.ring_step > 0.0) {
            return Err(Error::BadLayout("ring step must be positive".into()));
        }
        if self.band_gap < 0.0 {
            return Err(Error::BadLayout("band gap must be non-negative".into()));
        }
        if self.point_px < 1 {
            return Err(Error::BadLayout("point size must be at least 1 pixel".into()));
        }
        if self.legend_strip_px > 0 && self.legend_strip_px as usize / (n_joints - 1) == 0 {
            return Err(Error::BadLayout(format!(
                "legend strip of {} px cannot hold {} bars",
                self.legend_strip_px,
                n_joints - 1
            )));
        }
        let outer = outermost_radius(n_joints, n_d, self);
        if outer + MARGIN_PX > self.canvas_px as f64 / 2.0 {
            return Err(Error::LayoutOverflow {
                outer,
                canvas: self.canvas_px as usize,
            });
        }
        Ok(())
    }
}

/// Ring radius of a parent bin: r0 + i*(n_d*step + gap) + bin*step, strictly
/// increasing in (i, parent_bin) lexicographic order.
pub fn ring_radius(i: usize, parent_bin: usize, n_d: usize, layout: &LayoutSpec) -> Result<f64> {
    if parent_bin >= n_d {
        return Err(Error::BinOutOfRange { bin: parent_bin, n_d });
    }
    Ok(layout.r0
        + i as f64 * (n_d as f64 * layout.ring_step + layout.band_gap)
        + parent_bin as f64 * layout.ring_step)
}

fn outermost_radius(n_joints: usize, n_d: usize, layout: &LayoutSpec) -> f64 {
    layout.r0
        + (n_joints - 2) as f64 * (n_d as f64 * layout.ring_step + layout.band_gap)
        + (n_d - 1) as f64 * layout.ring_step
}

/// Render configuration as accepted from JSON: every field optional, falling
/// back to the built-in defaults for the dataset at hand.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub n_d: Option<usize>,
    pub epsilon_max: Option<f64>,
    pub canvas_px: Option<u32>,
    pub r0: Option<f64>,
    pub ring_step: Option<f64>,
    pub band_gap: Option<f64>,
    pub point_px: Option<u32>,
    pub background: Option<Rgb8>,
    pub legend_strip_px: Option<u32>,
    pub colormap: Option<ColorMapSpec>,
    pub mode: Option<PlotMode>,
}

/// Fully resolved render inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderSpec {
    pub disc: DiscretizationSpec,
    pub pert: PerturbationSpec,
    pub colormap: ColorMapSpec,
    pub layout: LayoutSpec,
    pub mode: PlotMode,
}

impl RenderConfig {
    /// Applies defaults for anything unset. Explicit canvas sizes are
    /// validated, never grown.
    pub fn resolve(&self, n_joints: usize) -> Result<RenderSpec> {
        let n_d = self.n_d.unwrap_or(DiscretizationSpec::default().n_d);
        let disc = DiscretizationSpec { n_d };
        let pert = match self.epsilon_max {
            Some(epsilon_max) => PerturbationSpec { epsilon_max },
            None => PerturbationSpec::default_for(n_d),
        };
        pert.validate(&disc)?;

        let defaults = if self.canvas_px.is_none() && self.ring_step.is_none() {
            LayoutSpec::default_for(n_joints, n_d)?
        } else {
            // explicit geometry: recompute the step against the stated canvas
            let mut base = LayoutSpec {
                canvas_px: self.canvas_px.unwrap_or(2000),
                r0: self.r0.unwrap_or(60.0),
                ring_step: 1.0,
                band_gap: self.band_gap.unwrap_or(12.0),
                point_px: 2,
                background: WHITE,
                legend_strip_px: 80,
            };
            if self.ring_step.is_none() {
                let bands = (n_joints.max(2) - 1) as f64;
                let avail =
                    base.canvas_px as f64 / 2.0 - base.r0 - MARGIN_PX - bands * base.band_gap;
                base.ring_step = (avail / (bands * n_d as f64)).floor().max(1.0);
            }
            base
        };
        let layout = LayoutSpec {
            canvas_px: self.canvas_px.unwrap_or(defaults.canvas_px),
            r0: self.r0.unwrap_or(defaults.r0),
            ring_step: self.ring_step.unwrap_or(defaults.ring_step),
            band_gap: self.band_gap.unwrap_or(defaults.band_gap),
            point_px: self.point_px.unwrap_or(defaults.point_px),
            background: self.background.unwrap_or(defaults.background),
            legend_strip_px: self.legend_strip_px.unwrap_or(defaults.legend_strip_px),
        };
        layout.validate(n_joints, n_d)?;
        Ok(RenderSpec {
            disc,
            pert,
            colormap: self.colormap.clone().unwrap_or_default(),
            layout,
            mode: self.mode.unwrap_or_default(),
        })
    }
}

fn paint_square(img: &mut RasterImage, plot_px: u32, fx: f64, fy: f64, side: u32, color: Rgb8) {
    let x0 = round_half_up(fx - side as f64 / 2.0) as i64;
    let y0 = round_half_up(fy - side as f64 / 2.0) as i64;
    for y in y0..y0 + side as i64 {
        if y < 0 || y >= plot_px as i64 {
            continue;
        }
        for x in x0..x0 + side as i64 {
            if x < 0 || x >= plot_px as i64 {
                continue;
            }
            img.set(x as u32, y as u32, color);
        }
    }
}

/// Renders a dataset. The image is canvas_px wide and canvas_px +
/// legend_strip_px tall; samples are plotted in ascending order with
/// last-write-wins, so the result is a pure function of its inputs.
pub fn render(ds: &Dataset, spec: &RenderSpec) -> Result<RasterImage> {
    ds.validate()?;
    if ds.m() == 0 {
        return Err(Error::EmptyDataset);
    }
    let n = ds.n_joints;
    if n < 2 {
        return Err(Error::NeedTwoJoints(n));
    }
    let n_d = spec.disc.n_d;
    spec.layout.validate(n, n_d)?;

    // the plot set: what the mode keeps; epsilon disambiguates plotted points
    let plot_set = match spec.mode {
        PlotMode::FreeOnly => {
            let keep: Vec<usize> = (0..ds.m()).filter(|&k| ds.labels[k] == Label::Free).collect();
            Dataset {
                n_joints: n,
                workspace_id: ds.workspace_id.clone(),
                seed: ds.seed,
                samples: keep.iter().map(|&k| ds.samples[k].clone()).collect(),
                labels: keep.iter().map(|&k| ds.labels[k]).collect(),
            }
        }
        PlotMode::All | PlotMode::CollisionGray => ds.clone(),
    };
    let perturbed = apply_epsilon(&plot_set, &spec.disc, &spec.pert)?;

    let canvas = spec.layout.canvas_px;
    let mut img = RasterImage::new(canvas, canvas + spec.layout.legend_strip_px, spec.layout.background);
    let center = canvas as f64 / 2.0;

    for (k, q) in perturbed.samples.iter().enumerate() {
        for i in 0..n - 1 {
            let parent_bin = discretize(q[i], n_d)?;
            let color = if spec.mode == PlotMode::CollisionGray && perturbed.labels[k] == Label::Collision
            {
                COLLISION_GRAY
            } else {
                parent_color(&spec.colormap, parent_bin, n_d)?
            };
            let r = ring_radius(i, parent_bin, n_d, &spec.layout)?;
            let theta = q[i + 1];
            let fx = center + r * theta.cos();
            let fy = center - r * theta.sin(); // screen y grows downward
            paint_square(&mut img, canvas, fx, fy, spec.layout.point_px, color);
        }
    }

    if spec.layout.legend_strip_px > 0 {
        let bar_h = spec.layout.legend_strip_px / (n as u32 - 1);
        for bar in 0..(n as u32 - 1) {
            for x in 0..canvas {
                let color = colormap_lookup(&spec.colormap, (x as f64 + 0.5) / canvas as f64);
                for dy in 0..bar_h {
                    img.set(x, canvas + bar * bar_h + dy, color);
                }
            }
        }
    }
    Ok(img)
}

/// Angle in [-pi, pi] of a pixel center relative to the plot center, with the
/// same orientation the renderer uses (y up; screen y down).
pub fn pixel_angle(layout: &LayoutSpec, x: u32, y: u32) -> f64 {
    let center = layout.canvas_px as f64 / 2.0;
    let dx = x as f64 + 0.5 - center;
    let dy = center - (y as f64 + 0.5);
    dy.atan2(dx)
}

/// Radius in pixels of a pixel center relative to the plot center.
pub fn pixel_radius(layout: &LayoutSpec, x: u32, y: u32) -> f64 {
    let center = layout.canvas_px as f64 / 2.0;
    (x as f64 + 0.5 - center).hypot(y as f64 + 0.5 - center)
}
