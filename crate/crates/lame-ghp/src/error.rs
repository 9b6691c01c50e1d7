//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the special functions, field evaluators, constraint
/// assembly and the numerical checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A Bessel argument fell outside the supported interval `[0, t_max]`.
    #[error("Bessel argument {value} lies outside the supported interval [0, {max}]")]
    BesselDomain { value: f64, max: f64 },

    /// An exact series coefficient was requested beyond the exact-arithmetic range.
    #[error(
        "exact Bessel coefficient (order {order}, index {index}) exceeds the supported range order + index <= {limit}"
    )]
    CoefficientOverflow { order: u32, index: u32, limit: u32 },

    /// `Γ(n)` does not fit in an `f64`.
    #[error("Gamma({argument}) overflows double precision")]
    GammaOverflow { argument: f64 },

    /// Lamé constants or eigenvalue violate the medium invariants.
    #[error("invalid medium: {0}")]
    InvalidMedium(String),

    /// Fourier coefficient sequences are malformed.
    #[error("invalid Fourier coefficients: {0}")]
    InvalidCoefficients(String),

    /// A point, segment or sector is geometrically invalid.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// An impedance series violates the class-A invariants.
    #[error("invalid impedance series: {0}")]
    InvalidImpedance(String),

    /// Truncation orders are inconsistent with the requested operation.
    #[error("inconsistent truncation: {0}")]
    Truncation(String),

    /// The two segments are collinear, which reduces to the single-line case.
    #[error(
        "collinear segments (opening angle pi) reduce to a single line or the classical unique continuation setting and are not a two-line scenario"
    )]
    CollinearSegments,

    /// A scenario label is not present in the catalog.
    #[error("unknown scenario label `{0}`")]
    UnknownScenario(String),

    /// A scenario is structurally invalid.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// An operation precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A numerical kernel (SVD, quadrature, fit) did not converge or is unreliable.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// An incident wave or mode set is invalid.
    #[error("invalid wave data: {0}")]
    InvalidWave(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
