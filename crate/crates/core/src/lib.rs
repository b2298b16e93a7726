//! Configuration-space visualization for planar rotative manipulators.
//!
//! The crate samples joint configurations of a planar arm among circular
//! obstacles, discretizes them into per-joint bins, renders the resulting
//! discrete configuration space as a radial color-mapped image, and compares
//! renders pixel by pixel. Two built-in experiments measure how faithfully
//! the images track collision-checker degradation and sample-count reduction.

pub mod colormap;
pub mod cspace;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod planar;
pub mod raster;
pub mod render;
pub mod rng;
pub mod stats;

pub use colormap::{colormap_lookup, parent_color, ColorMapSpec, ControlPoint, Rgb8, WHITE};
pub use cspace::{
    apply_epsilon, bin_center, bin_dataset, build_tree, discretize, subsample, BinnedState,
    ConditionalTree, DiscretizationSpec, PerturbationSpec,
};
pub use dataset::{Dataset, Label};
pub use error::{Error, Result};
pub use experiment::{
    checker_accuracy, generate_scene, inject_collision_states, run_accuracy_experiment,
    run_subset_experiment, visualization_accuracy, AccuracyReport, ExperimentConfig, ImageSink,
    SubsetReport, SCHEMA_VERSION,
};
pub use metrics::{crop_bottom, mse, negative_subtraction, pixel_setminus, DiffStats};
pub use planar::{
    forward_kinematics, in_collision, random_workspace, sample_cspace, Bounds, CircleObstacle,
    LinkSpec, PlanarRobot, SampleMode, Vec2, Workspace,
};
pub use raster::{decode_png, decode_ppm, encode_png, encode_ppm, FileFormat, RasterImage};
pub use render::{
    pixel_angle, pixel_radius, render, ring_radius, LayoutSpec, PlotMode, RenderConfig, RenderSpec,
};
pub use stats::{fisher_z_mean, pearson, CorrelationSummary};
