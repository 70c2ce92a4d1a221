//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Edge lengths must be positive finite numbers.
    #[error("edge lengths must be positive and finite")]
    InvalidLengths,

    /// Six lengths that do not embed as a nondegenerate Euclidean
    /// tetrahedron (a flat face or a Cayley-Menger determinant at or below
    /// the scale-aware floor).
    #[error("degenerate tetrahedron: volume measure {det:.3e} at or below floor {floor:.3e}")]
    DegenerateTetrahedron { det: f64, floor: f64 },

    /// A point configuration with a vanishing volume where a nonzero one is
    /// required.
    #[error("flat configuration: {quantity} = {value:.3e} vanishes")]
    FlatConfiguration { quantity: &'static str, value: f64 },

    /// Metric data that does not fit the complex it is paired with.
    #[error("invalid metric for complex: {reason}")]
    InvalidMetric { reason: String },

    /// Structurally inconsistent pre-triangulation data.
    #[error("invalid complex: {reason}")]
    InvalidComplex { reason: String },

    /// Parameters failing p >= 3, 0 < q < p, gcd(p, q) = 1,
    /// 1 <= k <= floor(p/2), gcd(p, k) = 1.
    #[error("invalid lens parameters: {reason}")]
    InvalidLensParams { reason: String },

    /// Realization parameters failing rho > 0, sigma > 0, or carrying
    /// non-finite values.
    #[error("invalid realization parameters: {reason}")]
    InvalidRealizationParams { reason: String },

    /// A realization whose tetrahedra are too close to flat to be useful.
    #[error("degenerate realization: min |V_i| = {min_volume:.3e} at or below floor {floor:.3e}")]
    DegenerateRealization { min_volume: f64, floor: f64 },

    /// The four-parameter length Jacobian lost rank.
    #[error("singular length-parameter Jacobian: |det| = {det:.3e} at or below floor {floor:.3e}")]
    SingularJacobian { det: f64, floor: f64 },
}
