use thiserror::Error;

/// Failure classes shared by the library, the CLI exit codes and the C ABI
/// status codes.
#[derive(Debug, Error)]
pub enum SbtError {
    /// Malformed or inconsistent user input.
    #[error("input error: {0}")]
    Input(String),

    /// Geometry violates a structural requirement (self-intersection,
    /// epsilon above the tube guard, undefined tangent).
    #[error("invalid geometry: {0}")]
    GeometryInvalid(String),

    /// Query outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Kernel evaluated too close to its singularity.
    #[error("singular evaluation: |x| = {0:e}")]
    Singular(f64),

    /// Internal numerical failure (non-finite result, failed root solve).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SbtError {
    pub fn input(msg: impl Into<String>) -> Self {
        SbtError::Input(msg.into())
    }

    pub fn geometry(msg: impl Into<String>) -> Self {
        SbtError::GeometryInvalid(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        SbtError::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        SbtError::Numerical(msg.into())
    }

    /// Process exit code: 1 input/config, 2 geometry, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            SbtError::Input(_) | SbtError::Io { .. } | SbtError::Domain(_) => 1,
            SbtError::GeometryInvalid(_) => 2,
            SbtError::Singular(_) | SbtError::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, SbtError>;
