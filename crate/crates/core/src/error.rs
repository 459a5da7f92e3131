use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidInput(String),
    EmptyRegion,
    OutsideTube,
    SingularPoint,
    UndersampledTrace { step: usize, gap: f64 },
    InconsistentTrace { residual: f64 },
    NearIntersection { distance: f64 },
    NonTransversal,
    IllPosed,
    ResolveTube { h: f64, delta0: f64 },
    EpsilonTooLarge,
    NonConvergent(String),
    Unstable(String),
    Budget { needed: usize, suggested_r_cut: f64 },
    NonFinite(String),
    Io(String),
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::EmptyRegion => write!(f, "empty sampling region"),
            Error::OutsideTube => write!(f, "outside tube"),
            Error::SingularPoint => write!(f, "singular point"),
            Error::UndersampledTrace { step, gap } => {
                write!(f, "undersampled trace (step {step}, angular gap {gap:.4})")
            }
            Error::InconsistentTrace { residual } => {
                write!(f, "inconsistent trace (residual {residual:.4})")
            }
            Error::NearIntersection { distance } => {
                write!(f, "near-intersection: refine or reject (distance {distance:.3e})")
            }
            Error::NonTransversal => write!(f, "non-transversal"),
            Error::IllPosed => write!(f, "ill-posed"),
            Error::ResolveTube { h, delta0 } => {
                write!(f, "resolve the tube (h = {h}, tube radius = {delta0})")
            }
            Error::EpsilonTooLarge => write!(f, "ε too large"),
            Error::NonConvergent(m) => write!(f, "quadrature non-convergent: {m}"),
            Error::Unstable(m) => write!(f, "unstable estimate: {m}"),
            Error::Budget { needed, suggested_r_cut } => write!(
                f,
                "kernel needs {needed} entries, over budget; try r_cut = {suggested_r_cut:.4}"
            ),
            Error::NonFinite(m) => write!(f, "non-finite value: {m}"),
            Error::Io(m) => write!(f, "io: {m}"),
            Error::Parse(m) => write!(f, "parse: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
