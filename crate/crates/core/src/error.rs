use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Parameter(&'static str),
    Domain(&'static str),
    NotPositiveDefinite,
    SectorMismatch { left: usize, right: usize },
    FitFailure { residual: f64 },
    NotBracketed,
    Numerical(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Domain(msg) => write!(f, "argument outside domain: {msg}"),
            Error::NotPositiveDefinite => f.write_str("matrix is not positive definite"),
            Error::SectorMismatch { left, right } => {
                write!(f, "charges live in different sectors ({left} vs {right})")
            }
            Error::FitFailure { residual } => {
                write!(f, "fit rejected, relative residual {residual:.3e}")
            }
            Error::NotBracketed => f.write_str("no sign change inside the requested range"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
