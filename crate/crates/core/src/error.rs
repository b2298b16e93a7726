use thiserror::Error;

/// Unified error type for the whole toolkit.
///
/// Variants are grouped by origin so callers (the CLI in particular) can
/// distinguish bad input from a failed experiment run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("angle {0} is outside [-pi, pi]")]
    AngleOutOfRange(f64),

    #[error("expected {expected} joint angles, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dataset has {samples} samples but {labels} labels")]
    LabelCountMismatch { samples: usize, labels: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("operation needs at least 2 joints, dataset has {0}")]
    NeedTwoJoints(usize),

    #[error("joint pair index {pair} out of range for {n_joints} joints")]
    JointPairOutOfRange { pair: usize, n_joints: usize },

    #[error("bin {bin} out of range for {n_d} bins")]
    BinOutOfRange { bin: usize, n_d: usize },

    #[error("discretization needs at least 1 bin")]
    ZeroBins,

    #[error("epsilon_max {epsilon_max} must lie in [0, {limit}) for this discretization")]
    EpsilonOutOfRange { epsilon_max: f64, limit: f64 },

    #[error("fraction {0} is outside (0, 1]")]
    FractionOutOfRange(f64),

    #[error("sample count must be at least 1")]
    ZeroSamples,

    #[error("bounds box is empty (min must be strictly below max on both axes)")]
    EmptyBounds,

    #[error("radius range [{lo}, {hi}] is invalid (need 0 < lo <= hi)")]
    BadRadiusRange { lo: f64, hi: f64 },

    #[error("rejection sampling gave up after {attempts} attempts ({wanted} states still missing)")]
    RejectionBudget { wanted: usize, attempts: usize },

    #[error("colormap is invalid: {0}")]
    BadColorMap(String),

    #[error("layout is invalid: {0}")]
    BadLayout(String),

    #[error("outermost ring radius {outer:.1} px does not fit a {canvas} px canvas")]
    LayoutOverflow { outer: f64, canvas: usize },

    #[error("image sizes differ: {aw}x{ah} vs {bw}x{bh}")]
    SizeMismatch { aw: usize, ah: usize, bw: usize, bh: usize },

    #[error("cannot crop {rows} rows from a {height} px tall image")]
    CropTooLarge { rows: usize, height: usize },

    #[error("series lengths differ: {x} vs {y}")]
    SeriesLengthMismatch { x: usize, y: usize },

    #[error("correlation needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("series {0} is constant, correlation is undefined")]
    ConstantSeries(&'static str),

    #[error("correlation {0} is outside (-1, 1), Fisher z is undefined")]
    CorrelationOutOfRange(f64),

    #[error("experiment produced no usable workspaces: {0}")]
    DegenerateExperiment(String),

    #[error("invalid experiment config: {0}")]
    BadConfig(String),

    #[error("PPM data is malformed: {0}")]
    PpmFormat(String),

    #[error("CSV data is malformed: {0}")]
    CsvFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    /// True for failures of an experiment run itself rather than of its inputs.
    pub fn is_experiment_failure(&self) -> bool {
        matches!(
            self,
            Error::RejectionBudget { .. } | Error::DegenerateExperiment(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
