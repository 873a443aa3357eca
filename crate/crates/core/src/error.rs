use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node identifier `{0}`")]
    UnknownNode(String),
    #[error("unknown layer `{0}`")]
    UnknownLayer(String),
    #[error("self-exposure of bank `{0}`")]
    SelfExposure(String),
    #[error("invalid amount {value} ({context})")]
    InvalidAmount { value: f64, context: String },
    #[error("negative amount {amount} in layer {layer} not permitted by its sign policy")]
    NegativeAmount { layer: String, amount: f64 },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("empty network")]
    EmptyNetwork,
    #[error("capitals incomplete: no capital for {0}")]
    CapitalsIncomplete(String),
    #[error("capital of bank `{bank}` must be positive, got {value}")]
    NonPositiveCapital { bank: String, value: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("negative coupling weight {0}")]
    NegativeCoupling(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("matrix has spectral radius 0; no dominant eigenvector")]
    ZeroMatrix,
    #[error("attenuation a = {a} with spectral radius {lambda} gives a*lambda >= 1")]
    DivergentAttenuation { a: f64, lambda: f64 },
    #[error("surcharge cannot reach threshold {threshold}: spectral radius stays at {lambda} up to c = {c_max:e}")]
    Unstabilizable { threshold: f64, lambda: f64, c_max: f64 },
    #[error("targeting vector fixed point not reached in {0} outer iterations")]
    FixedPointDivergence(usize),
    #[error("factor `{0}` is constant")]
    ConstantFactor(String),
    #[error("factor panel has a gap: period {period} lacks factor `{factor}`")]
    FactorGap { period: String, factor: String },
    #[error("underdetermined regression: {observations} observations for {parameters} parameters")]
    Underdetermined { observations: usize, parameters: usize },
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
    #[error("time step {dt} exceeds stability bound {bound}")]
    UnstableStep { dt: f64, bound: f64 },
    #[error("inconsistent bank registries across snapshots: {0}")]
    InconsistentRegistry(String),
    #[error("unknown centrality measure `{0}`")]
    UnknownMeasure(String),
    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code, used by the CLI's `ERROR <code>: ...` line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownNode(_) => "unknown_node",
            Error::UnknownLayer(_) => "unknown_layer",
            Error::SelfExposure(_) => "self_exposure",
            Error::InvalidAmount { .. } => "invalid_amount",
            Error::NegativeAmount { .. } => "negative_amount",
            Error::MissingColumn(_) => "missing_column",
            Error::Parse { .. } => "parse_error",
            Error::EmptyNetwork => "empty_network",
            Error::CapitalsIncomplete(_) => "capitals_incomplete",
            Error::NonPositiveCapital { .. } => "non_positive_capital",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NegativeCoupling(_) => "negative_coupling",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NonConvergence { .. } => "non_convergence",
            Error::ZeroMatrix => "zero_matrix",
            Error::DivergentAttenuation { .. } => "divergent_attenuation",
            Error::Unstabilizable { .. } => "unstabilizable",
            Error::FixedPointDivergence(_) => "fixed_point_divergence",
            Error::ConstantFactor(_) => "constant_factor",
            Error::FactorGap { .. } => "factor_gap",
            Error::Underdetermined { .. } => "underdetermined",
            Error::Eigensolver(_) => "eigensolver_failure",
            Error::UnstableStep { .. } => "unstable_step",
            Error::InconsistentRegistry(_) => "inconsistent_registry",
            Error::UnknownMeasure(_) => "unknown_measure",
            Error::UnsupportedFormat(_) => "unsupported_format",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
