use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point at B_r = {radius:e} lies inside the origin guard")]
    OriginGuard { radius: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("geodesic length {0:e} is too small to define a speed profile")]
    ZeroLength(f64),
    #[error("quadrature did not converge after {evals} evaluations")]
    NonConvergence { evals: usize },
    #[error("unsupported curve: {0}")]
    UnsupportedCurve(String),
    #[error("curve has the wrong orientation for {mode} operation (A = {area:e}); reverse the curve")]
    WrongOrientation { mode: &'static str, area: f64 },
    #[error("stationary state is not unique")]
    DegenerateNullSpace,
    #[error("linear system is singular")]
    SingularSystem,
    #[error("every optimizer start failed")]
    AllSeedsFailed,
}

impl Error {
    /// Errors caused by the physics domain (as opposed to malformed input).
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_))
    }
}
