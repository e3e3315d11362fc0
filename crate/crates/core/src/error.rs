use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} > {bound:.3e})")]
    NotHermitian { asymmetry: f64, bound: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid Schatten exponent p = {0} (need p >= 1)")]
    InvalidP(f64),
    #[error("matrix is numerically singular (sigma_min = {sigma_min:.3e} <= {tol:.3e})")]
    Singular { sigma_min: f64, tol: f64 },
    #[error("function is undefined on the spectrum at {0}")]
    FUndefinedOnSpectrum(f64),
    #[error("transport section undefined: S = QP + (1-Q)(1-P) has sigma_min = {sigma_min:.3e}")]
    SectionUndefined { sigma_min: f64 },
    #[error("value {value} outside admissible range {range}")]
    OutOfRange { value: f64, range: &'static str },
    #[error("operator is not an orthogonal projection (idempotency {idempotency:.3e}, asymmetry {asymmetry:.3e}, tol {tol:.3e})")]
    NotAProjection {
        idempotency: f64,
        asymmetry: f64,
        tol: f64,
    },
    #[error("eigenvalue cluster ambiguity near {value}: gap {gap:.3e} lies in the unresolved band")]
    ClusterAmbiguity { value: f64, gap: f64 },
    #[error("eigenvalue pairing mismatch: {0}")]
    PairingMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("angle {angle:.3e} is within the ambiguity band of 0 or pi/2")]
    ToleranceBreakdown { angle: f64 },
    #[error("no geodesic: dim R(P)∩N(Q) = {rp_nq} but dim N(P)∩R(Q) = {np_rq}")]
    NoGeodesic { rp_nq: usize, np_rq: usize },
    #[error("model range violation: {0}")]
    RangeViolation(String),
    #[error("tail not summable: exponent {exponent} * p/2 = {product} <= 1")]
    NotSummable { exponent: f64, product: f64 },
    #[error("model describes a finite-dimensional {0} side")]
    FiniteSpace(&'static str),
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("trace {trace} is not an integer (distance {distance:.3e})")]
    NotInteger { trace: f64, distance: f64 },
    #[error("B = P + P0 - 1 is numerically singular (sigma_min = {sigma_min:.3e})")]
    SingularB { sigma_min: f64 },
    #[error("symbol vanishes on the circle (min modulus {min_modulus:.3e})")]
    SymbolVanishes { min_modulus: f64 },
    #[error("truncation too coarse: {0}")]
    TruncationTooCoarse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
