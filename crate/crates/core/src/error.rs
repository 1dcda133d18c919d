use thiserror::Error;

/// Errors produced by model validation and the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A coil has a non-physical lumped parameter.
    #[error(
        "coil {index}: requires L > 0, C > 0 and R >= 0, \
         got L = {inductance} H, C = {capacitance} F, R = {resistance} ohm"
    )]
    NonPositiveComponent {
        index: usize,
        inductance: f64,
        capacitance: f64,
        resistance: f64,
    },

    /// Coupling matrix shape does not match the coil count.
    #[error("coupling matrix is {rows}x{cols} but the array has {coils} coils")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        coils: usize,
    },

    /// k[row][col] and k[col][row] differ.
    #[error("k[{row}][{col}] = {upper} but k[{col}][{row}] = {lower}")]
    NonSymmetricCoupling {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    /// A diagonal coupling entry is not exactly one.
    #[error("coupling matrix diagonal entry [{index}][{index}] is {value}, must equal 1")]
    DiagonalNotUnity { index: usize, value: f64 },

    /// An off-diagonal coupling coefficient lies outside (-1, 1).
    #[error("coupling coefficient k[{row}][{col}] = {value} lies outside (-1, 1)")]
    CouplingOutOfRange { row: usize, col: usize, value: f64 },

    /// The coupling matrix admits no physical mutual-inductance realization.
    #[error("coupling matrix is not positive-definite (symmetric factorization failed)")]
    NotPositiveDefinite,

    /// A scalar coupling coefficient violates 0 <= k < 1.
    #[error("coupling coefficient k = {0} lies outside [0, 1)")]
    KOutOfRange(f64),

    /// Ill-formed frequency grid.
    #[error(
        "frequency grid requires 0 < start < stop and points >= 2, \
         got {start_hz} Hz .. {stop_hz} Hz with {points} points"
    )]
    InvalidFrequencyGrid {
        start_hz: f64,
        stop_hz: f64,
        points: usize,
    },

    /// Drive element index outside the array.
    #[error("drive element index {index} out of range for a {coils}-coil array")]
    InvalidDriveIndex { index: usize, coils: usize },

    /// Coupling matrix inversion failed.
    #[error("coupling matrix inversion failed")]
    SingularCoupling,

    /// The two algebraic routes to the characteristic matrix disagree.
    #[error("characteristic-matrix routes disagree (relative difference {relative:.3e})")]
    FormulationMismatch { relative: f64 },

    /// The coupled system is exactly singular at this frequency (lossless
    /// resonance). Reported, never regularized.
    #[error("system singular at angular frequency {omega} rad/s (lossless resonance)")]
    SingularAtFrequency { omega: f64 },

    /// Spectrum too short for peak detection.
    #[error("spectrum needs at least 3 points for peak detection")]
    EmptySpectrum,

    /// More detected peaks than modes visible from the drive element.
    #[error(
        "{peaks} peaks detected but only {visible_modes} modes are visible \
         from element {drive_index}"
    )]
    UnmatchedPeak {
        peaks: usize,
        visible_modes: usize,
        drive_index: usize,
    },

    /// The coupling-fit residual is not unimodal over the search bracket;
    /// the sampled residual curve is attached for inspection.
    #[error("coupling-fit residual is not unimodal over the bracket ({} samples attached)", k_samples.len())]
    NoBracket {
        k_samples: Vec<f64>,
        residuals: Vec<f64>,
    },

    /// A precondition on an argument failed.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable short name of the violated invariant or failure kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonPositiveComponent { .. } => "NonPositiveComponent",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonSymmetricCoupling { .. } => "NonSymmetricCoupling",
            Error::DiagonalNotUnity { .. } => "DiagonalNotUnity",
            Error::CouplingOutOfRange { .. } => "CouplingOutOfRange",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::KOutOfRange(_) => "KOutOfRange",
            Error::InvalidFrequencyGrid { .. } => "InvalidFrequencyGrid",
            Error::InvalidDriveIndex { .. } => "InvalidDriveIndex",
            Error::SingularCoupling => "SingularCoupling",
            Error::FormulationMismatch { .. } => "FormulationMismatch",
            Error::SingularAtFrequency { .. } => "SingularAtFrequency",
            Error::EmptySpectrum => "EmptySpectrum",
            Error::UnmatchedPeak { .. } => "UnmatchedPeak",
            Error::NoBracket { .. } => "NoBracket",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True for errors caused by invalid model data or arguments, false for
    /// failures arising inside the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveComponent { .. }
                | Error::DimensionMismatch { .. }
                | Error::NonSymmetricCoupling { .. }
                | Error::DiagonalNotUnity { .. }
                | Error::CouplingOutOfRange { .. }
                | Error::NotPositiveDefinite
                | Error::KOutOfRange(_)
                | Error::InvalidFrequencyGrid { .. }
                | Error::InvalidDriveIndex { .. }
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
