use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("quadrature did not converge (estimated error {estimate:.3e}, target {target:.3e}, {intervals} intervals)")]
    Convergence {
        estimate: f64,
        target: f64,
        intervals: usize,
    },

    #[error("unsupported asymptotic case: {0}")]
    Unsupported(String),

    #[error("simulation unstable at t = {t}: |theta| = {modulus:.3e}")]
    Instability { t: f64, modulus: f64 },

    #[error("at t = {t}: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn at(self, t: f64) -> Self {
        Error::AtTime {
            t,
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Validation(_) | Error::Domain(_) | Error::Unsupported(_) => true,
            Error::AtTime { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
