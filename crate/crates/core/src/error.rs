use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure classes; the CLI maps them onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad configuration or malformed input data.
    Config,
    /// The inputs violate a hypothesis the analysis relies on.
    Hypothesis,
    /// A solver failed or results disagree.
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 1,
            ErrorClass::Hypothesis => 2,
            ErrorClass::Numerical => 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("winding tail not resolved: tail bound {bound:e} exceeds {tol:e} at the truncation cap {cap}")]
    TailNotResolved { bound: f64, tol: f64, cap: usize },
    #[error("kernel has zero quadrature mass")]
    ZeroMass,
    #[error("invalid sample at index {index}: {value} (samples must be finite and nonnegative)")]
    InvalidSample { index: usize, value: f64 },
    #[error("degenerate kernel: minimal row integral is {gamma1:e}")]
    DegenerateKernel { gamma1: f64 },
    #[error("kernel is not primitive: no power up to {n_max} is strictly positive")]
    NotPrimitive { n_max: usize },
    #[error("potential is positive at node {index} (value {value:e})")]
    PositivePotential { index: usize, value: f64 },
    #[error("grid mismatch: expected {expected}, found {found}")]
    GridMismatch { expected: String, found: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mu = {mu} is not above the essential edge -alpha1 = {edge} by the required margin")]
    MuBelowEdge { mu: f64, edge: f64 },
    #[error("matrix entry ({row}, {col}) is negative: {value:e}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("vector entry {index} is not positive: {value:e}")]
    NonPositiveVector { index: usize, value: f64 },
    #[error("{what} did not converge after {iterations} iterations (last gap {gap:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        gap: f64,
    },
    #[error("QR iteration stalled at eigenvalue index {index} after {iterations} sweeps")]
    QrNotConverged { index: usize, iterations: usize },
    #[error("bisection bracket failure: {0}")]
    BracketFailure(String),
    #[error("maximum eigenvalue estimates disagree: {first} vs {second} differ by {diff:e} > {tol:e}")]
    MethodDisagreement {
        first: &'static str,
        second: &'static str,
        diff: f64,
        tol: f64,
    },
    #[error("eigen-residual {residual:e} exceeds {tol:e}")]
    Residual { residual: f64, tol: f64 },
    #[error("maximum eigenvalue {lambda} lies outside (-alpha1, 0) = ({edge}, 0)")]
    LocationViolated { lambda: f64, edge: f64 },
    #[error("kernel mass {mass} is not normalized to 1")]
    NotNormalized { mass: f64 },
    #[error("degenerate Fourier symbol: max |a_k| over k != 0 is {max_modulus}")]
    DegenerateSymbol { max_modulus: f64 },
    #[error("gap bound requires a convolution kernel")]
    NotConvolution,
    #[error("evolution unstable at t = {time}: norm {norm:e} exceeds {limit:e}")]
    Unstable { time: f64, norm: f64, limit: f64 },
    #[error("norm vanished at t = {time} inside the fit window")]
    ZeroNorm { time: f64 },
    #[error("theorem hypotheses violated: {}", .0.join("; "))]
    HypothesisViolated(Vec<String>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("csv error: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            PositivePotential { .. }
            | DegenerateKernel { .. }
            | NotPrimitive { .. }
            | HypothesisViolated(_)
            | NotConvolution
            | NotNormalized { .. }
            | DegenerateSymbol { .. } => ErrorClass::Hypothesis,
            NotConverged { .. }
            | QrNotConverged { .. }
            | BracketFailure(_)
            | MethodDisagreement { .. }
            | Residual { .. }
            | LocationViolated { .. }
            | MuBelowEdge { .. }
            | Unstable { .. }
            | ZeroNorm { .. }
            | NegativeEntry { .. }
            | NonPositiveVector { .. } => ErrorClass::Numerical,
            TailNotResolved { .. }
            | ZeroMass
            | InvalidSample { .. }
            | GridMismatch { .. }
            | DimensionMismatch { .. }
            | InvalidArgument(_)
            | Parse(_)
            | Validation(_)
            | Csv(_)
            | Io(_) => ErrorClass::Config,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            TailNotResolved { .. } => "TailNotResolved",
            ZeroMass => "ZeroMass",
            InvalidSample { .. } => "InvalidSample",
            DegenerateKernel { .. } => "DegenerateKernel",
            NotPrimitive { .. } => "NotPrimitive",
            PositivePotential { .. } => "PositivePotential",
            GridMismatch { .. } => "GridMismatch",
            DimensionMismatch { .. } => "DimensionMismatch",
            MuBelowEdge { .. } => "MuBelowEdge",
            NegativeEntry { .. } => "NegativeEntry",
            NonPositiveVector { .. } => "NonPositiveVector",
            NotConverged { .. } => "NotConverged",
            QrNotConverged { .. } => "QRNotConverged",
            BracketFailure(_) => "BracketFailure",
            MethodDisagreement { .. } => "MethodDisagreement",
            Residual { .. } => "Residual",
            LocationViolated { .. } => "LocationViolated",
            NotNormalized { .. } => "NotNormalized",
            DegenerateSymbol { .. } => "DegenerateSymbol",
            NotConvolution => "NotConvolution",
            Unstable { .. } => "Unstable",
            ZeroNorm { .. } => "ZeroNorm",
            HypothesisViolated(_) => "HypothesisViolated",
            InvalidArgument(_) => "InvalidArgument",
            Parse(_) => "ParseError",
            Validation(_) => "ValidationError",
            Csv(_) => "CsvError",
            Io(_) => "IoError",
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
