use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series did not converge within {terms} terms (tail estimate {tail:.3e})")]
    NonConvergence { terms: usize, tail: f64 },

    #[error("series diverges at L = {l}: asymptotic term ratio {ratio:.6} is not below 1")]
    Divergence { l: i64, ratio: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypergeometric argument outside the implemented domain at L = {l} (z = {z_re} + {z_im}i)")]
    HypergeometricDomain { l: i64, z_re: f64, z_im: f64 },

    #[error("integrand pole within {distance:.3e} of the contour at L = {l}, Re E = {e_re}")]
    PoleNearContour { l: i64, e_re: f64, distance: f64 },

    #[error("time integral tail not decayed: bound {bound:.3e} (need T_max * Im E >= 30)")]
    TailNotDecayed { bound: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge: {0}")]
    Eigensolver(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(String),

    #[error("{method}: {source}")]
    Method {
        method: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_method(self, method: impl Into<String>) -> Error {
        Error::Method {
            method: method.into(),
            source: Box::new(self),
        }
    }
}
