use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice (d={d}, N={n}) exceeds the memory budget: {required} bytes needed, {budget} allowed")]
    Budget {
        d: usize,
        n: usize,
        required: u128,
        budget: u128,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("patch {patch} is classified {actual}, requested as {requested}")]
    Classification {
        patch: usize,
        actual: &'static str,
        requested: &'static str,
    },

    #[error("compressed block of patch {patch} is numerically singular (sigma_min = {sigma_min:e})")]
    Rank { patch: usize, sigma_min: f64 },

    #[error("tolerance not met: {what} = {value:e} > {tol:e}; {advice}")]
    Tolerance {
        what: &'static str,
        value: f64,
        tol: f64,
        advice: &'static str,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("parse error on line {line}: {message}")]
    Literal { line: usize, message: String },

    #[error("linear algebra backend failed: {0}")]
    Backend(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
