// negated float comparisons are deliberate throughout: `!(x < limit)`
// routes NaN into the rejection branch, which `x >= limit` would not
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Multi-modal resonance analysis for magnetically over-coupled inductor
//! arrays.
//!
//! An array of LC resonators whose coils couple magnetically splits its
//! single natural resonance into as many modes as there are elements. This
//! crate predicts those modes two independent ways and cross-checks them:
//!
//! * [`eigen`] solves the characteristic matrix `Omega K^{-1} Omega` of the
//!   lossless system for resonant frequencies and voltage mode shapes;
//! * [`sweep`] solves the full lossy Kirchhoff system frequency by
//!   frequency for the driven element's input impedance and every element
//!   current and voltage;
//! * [`analysis`] extracts impedance peaks, matches them to modes,
//!   quantifies the damping-induced disparity between the two models and
//!   fits coupling coefficients from observed splitting;
//! * [`twocoil`] covers the two-resonator special case in closed form;
//! * [`model`] holds the validated physical data everything else consumes.
//!
//! ```
//! use overcoupled::{
//!     build_linear_chain, solve_modes, validate_array, CoilCircuit,
//!     NEAREST_NEIGHBOR_ONLY,
//! };
//!
//! let coil = CoilCircuit::new(10e-6, 150e-12, 10.0);
//! let model = validate_array(build_linear_chain(
//!     vec![coil; 3],
//!     0.14,
//!     NEAREST_NEIGHBOR_ONLY,
//! )?)?;
//! let modes = solve_modes(&model)?;
//! assert_eq!(modes.frequencies_hz().len(), 3);
//! # Ok::<(), overcoupled::Error>(())
//! ```

pub mod analysis;
pub mod eigen;
pub mod error;
pub mod model;
pub mod sweep;
pub mod twocoil;

// the matrix types in the public API come from here
pub use nalgebra;
pub use num_complex;

pub use analysis::{
    damping_study, detect_peaks, find_peaks, fit_coupling, match_peaks_to_modes, quality_factors,
    suggested_grid, CouplingFit, DampingRow, Peak, PeakList, QualityFactor, DEFAULT_GRID_POINTS,
    DEFAULT_PROMINENCE_FLOOR,
};
pub use eigen::{
    characteristic_matrix, classify_modes, predicted_peak_count, solve_modes, ModeClassification,
    ModeSet, DEFAULT_NODE_TOLERANCE,
};
pub use error::{Error, Result};
pub use model::{
    build_close_packed, build_linear_chain, validate_array, ArrayModel, CoilCircuit,
    CouplingMatrix, FrequencyGrid, GridSpacing, ValidatedArray, NEAREST_NEIGHBOR_ONLY,
};
pub use sweep::{
    assemble_system, input_impedance, passive_impedance, solve_at, sweep, DriveSpec, PointSolution,
    SweepResult,
};
pub use twocoil::{
    coupled_frequencies_general, dispersion_curve, dispersion_curve_with, estimate_k_from_split,
    frequency_ratio_branches, identical_coupled_frequencies, DispersionCurve, DispersionOptions,
    RatioBranches, SplitPair,
};
