use thiserror::Error;

use crate::spin_basis::SpinLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// |sin α²| fell below the singularity threshold; inverse kinematic
    /// matrices do not exist there.
    #[error("singular orientation: |sin alpha2| = {sin_polar:e} is below threshold {threshold:e}")]
    SingularOrientation { sin_polar: f64, threshold: f64 },

    #[error("invalid spin label (2s={two_s}, 2m={two_m}, 2mbar={two_mbar}): {reason}")]
    InvalidLabel {
        two_s: i32,
        two_m: i32,
        two_mbar: i32,
        reason: &'static str,
    },

    #[error("superposition mixes integer and half-odd-integer spin: {first} and {second}")]
    ParityMixing { first: SpinLabel, second: SpinLabel },

    #[error("quadrature under-resolved: band limit {band_limit} exceeds grid capacity {capacity}")]
    QuadratureUnderresolved { band_limit: f64, capacity: f64 },

    #[error("density profile is not normalized (integral = {integral})")]
    UnnormalizedProfile { integral: f64 },

    #[error("invalid step size: {0}")]
    StepSizeInvalid(String),

    #[error("field provider has no gradient for a non-uniform magnetic field")]
    FieldProviderMissingGradient,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
