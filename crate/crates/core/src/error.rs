use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("material '{name}' not found; available: {available}")]
    MaterialNotFound { name: String, available: String },

    #[error("record '{record}': invalid {field}: {reason}")]
    Validation {
        record: String,
        field: &'static str,
        reason: String,
    },

    #[error("catalog parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("material '{0}' lacks elastic constants")]
    MissingElastic(String),

    #[error("material '{0}' has no usable phase velocity")]
    MissingVelocity(String),

    #[error("material '{0}' is not piezoelectric")]
    NotPiezoelectric(String),

    #[error("material '{0}' lacks mirror reflection coefficients")]
    MissingMirrorCoefficients(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("no decaying root: {0}")]
    RootSelection(String),

    #[error("no surface mode in window [{lo:.3}, {hi:.3}] m/s (best |det B| = {best:.3e})")]
    NoSurfaceMode { lo: f64, hi: f64, best: f64 },

    #[error("degenerate mirror: groove reflectivity is zero")]
    DegenerateMirror,

    #[error("infeasible design targets; best found: N = {n}, h/λ = {h:.4}, Q = {q:.1}, κ_gd/κ_bd = {ratio:.2}")]
    Infeasible { n: usize, h: f64, q: f64, ratio: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
