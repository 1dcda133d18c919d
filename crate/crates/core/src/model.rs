//! Physical data model: coil parameters, coupling matrices and the validated
//! array handle every solver consumes.
//!
//! All quantities are strict SI (henries, farads, ohms, rad/s). Hertz appears
//! only in `_hz`-suffixed accessors and the frequency grid.

use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sentinel decay exponent for [`build_linear_chain`]: couple nearest
/// neighbours only, zero everything beyond.
pub const NEAREST_NEIGHBOR_ONLY: f64 = f64::INFINITY;

/// Lumped parameters of one LC resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoilCircuit {
    /// Inductance in henries.
    pub inductance: f64,
    /// Capacitance in farads.
    pub capacitance: f64,
    /// Series resistance in ohms.
    pub resistance: f64,
}

impl CoilCircuit {
    pub fn new(inductance: f64, capacitance: f64, resistance: f64) -> Self {
        Self {
            inductance,
            capacitance,
            resistance,
        }
    }

    /// Natural angular frequency 1/sqrt(LC) in rad/s. Ignores resistance
    /// and any coupling.
    pub fn natural_angular_frequency(&self) -> f64 {
        1.0 / (self.inductance * self.capacitance).sqrt()
    }

    /// Natural resonant frequency in hertz.
    pub fn natural_frequency_hz(&self) -> f64 {
        self.natural_angular_frequency() / TAU
    }

    pub(crate) fn check(&self, index: usize) -> Result<()> {
        let ok = self.inductance > 0.0
            && self.inductance.is_finite()
            && self.capacitance > 0.0
            && self.capacitance.is_finite()
            && self.resistance >= 0.0
            && self.resistance.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::NonPositiveComponent {
                index,
                inductance: self.inductance,
                capacitance: self.capacitance,
                resistance: self.resistance,
            })
        }
    }
}

/// Dimensionless coupling-coefficient matrix.
///
/// Invariants (unit diagonal, symmetry, |k| < 1 off-diagonal,
/// positive-definiteness) are enforced by [`validate_array`], not here, so
/// that a config file can be loaded first and rejected with a precise error.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: DMatrix<f64>,
}

impl CouplingMatrix {
    /// Wraps a raw coefficient matrix without checking it.
    pub fn new(entries: DMatrix<f64>) -> Self {
        Self { entries }
    }

    /// Identity coupling: every coil isolated.
    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
        }
    }

    /// Every off-diagonal pair shares the same coefficient.
    pub fn uniform(n: usize, k: f64) -> Self {
        let mut entries = DMatrix::from_element(n, n, k);
        entries.fill_diagonal(1.0);
        Self { entries }
    }

    /// Chain coupling decaying with element separation `d` as
    /// `k_nn / d^decay_exponent`. [`NEAREST_NEIGHBOR_ONLY`] zeroes every
    /// non-adjacent pair.
    pub fn chain(n: usize, k_nn: f64, decay_exponent: f64) -> Self {
        let entries = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 1.0,
            1 => k_nn,
            _ if decay_exponent == NEAREST_NEIGHBOR_ONLY => 0.0,
            d => k_nn / (d as f64).powf(decay_exponent),
        });
        Self { entries }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// An ordered set of resonators plus their coupling matrix, prior to
/// validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayModel {
    pub coils: Vec<CoilCircuit>,
    pub coupling: CouplingMatrix,
}

impl ArrayModel {
    pub fn new(coils: Vec<CoilCircuit>, coupling: CouplingMatrix) -> Self {
        Self { coils, coupling }
    }
}

/// Proof-carrying wrapper around [`ArrayModel`]: constructed only by
/// [`validate_array`], immutable afterwards, safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedArray {
    model: ArrayModel,
}

/// Checks every model invariant and returns the validated handle.
///
/// Positive-definiteness of the coupling matrix is the acceptance test, not
/// merely |k| < 1: an indefinite matrix has no mutual-inductance
/// realization. It is checked by attempting a Cholesky factorization.
pub fn validate_array(model: ArrayModel) -> Result<ValidatedArray> {
    if model.coils.is_empty() {
        return Err(Error::InvalidArgument(
            "array needs at least one coil".into(),
        ));
    }
    for (index, coil) in model.coils.iter().enumerate() {
        coil.check(index)?;
    }
    let n = model.coils.len();
    let k = model.coupling.entries();
    if k.nrows() != n || k.ncols() != n {
        return Err(Error::DimensionMismatch {
            rows: k.nrows(),
            cols: k.ncols(),
            coils: n,
        });
    }
    for i in 0..n {
        let value = k[(i, i)];
        if value != 1.0 {
            return Err(Error::DiagonalNotUnity { index: i, value });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (upper, lower) = (k[(i, j)], k[(j, i)]);
            if upper != lower {
                return Err(Error::NonSymmetricCoupling {
                    row: i,
                    col: j,
                    upper,
                    lower,
                });
            }
            if !(upper.abs() < 1.0) {
                return Err(Error::CouplingOutOfRange {
                    row: i,
                    col: j,
                    value: upper,
                });
            }
        }
    }
    if k.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(ValidatedArray { model })
}

impl ValidatedArray {
    pub fn coils(&self) -> &[CoilCircuit] {
        &self.model.coils
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.model.coupling
    }

    /// Number of array elements.
    pub fn len(&self) -> usize {
        self.model.coils.len()
    }

    pub fn is_empty(&self) -> bool {
        self.model.coils.is_empty()
    }

    pub fn model(&self) -> &ArrayModel {
        &self.model
    }

    pub fn into_model(self) -> ArrayModel {
        self.model
    }

    /// Mutual-inductance matrix M[n][m] = k[n][m] sqrt(L_n L_m), henries.
    /// The diagonal is exactly L_n. Symmetric positive-definite for every
    /// validated model.
    pub fn mutual_inductance_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let coils = &self.model.coils;
        let k = self.model.coupling.entries();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                coils[i].inductance
            } else {
                k[(i, j)] * (coils[i].inductance * coils[j].inductance).sqrt()
            }
        })
    }

    /// Natural angular frequencies 1/sqrt(L_n C_n) of the uncoupled
    /// elements, rad/s.
    pub fn natural_angular_frequencies(&self) -> Vec<f64> {
        self.model
            .coils
            .iter()
            .map(CoilCircuit::natural_angular_frequency)
            .collect()
    }

    /// Natural resonant frequencies in hertz. Independent of resistance and
    /// of the coupling matrix.
    pub fn natural_frequencies_hz(&self) -> Vec<f64> {
        self.model
            .coils
            .iter()
            .map(CoilCircuit::natural_frequency_hz)
            .collect()
    }

    /// Same array with every coil's series resistance replaced.
    pub fn with_uniform_resistance(&self, resistance: f64) -> Result<ValidatedArray> {
        if !(resistance >= 0.0 && resistance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "resistance must be finite and >= 0, got {resistance}"
            )));
        }
        let mut model = self.model.clone();
        for coil in &mut model.coils {
            coil.resistance = resistance;
        }
        // only the resistances changed, which no coupling invariant touches
        Ok(ValidatedArray { model })
    }
}

/// Builds and validates a linear chain whose coupling decays with element
/// separation `d` as `k_nn / d^decay_exponent`. Pass
/// [`NEAREST_NEIGHBOR_ONLY`] to zero all non-adjacent couplings.
pub fn build_linear_chain(
    coils: Vec<CoilCircuit>,
    k_nn: f64,
    decay_exponent: f64,
) -> Result<ArrayModel> {
    if !(k_nn > 0.0 && k_nn < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "chain coupling k_nn must lie in (0, 1), got {k_nn}"
        )));
    }
    if !(decay_exponent >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "decay exponent must be >= 0, got {decay_exponent}"
        )));
    }
    let coupling = CouplingMatrix::chain(coils.len(), k_nn, decay_exponent);
    Ok(validate_array(ArrayModel::new(coils, coupling))?.into_model())
}

/// Builds and validates a close-packed array: every pair of elements shares
/// the same coupling coefficient `k`.
pub fn build_close_packed(coils: Vec<CoilCircuit>, k: f64) -> Result<ArrayModel> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "close-packed coupling k must lie in (0, 1), got {k}"
        )));
    }
    let coupling = CouplingMatrix::uniform(coils.len(), k);
    Ok(validate_array(ArrayModel::new(coils, coupling))?.into_model())
}

/// Frequency-axis sample spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpacing {
    Linear,
    Logarithmic,
}

/// Sampling grid for frequency sweeps, hertz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    start_hz: f64,
    stop_hz: f64,
    points: usize,
    spacing: GridSpacing,
}

impl FrequencyGrid {
    pub fn new(start_hz: f64, stop_hz: f64, points: usize, spacing: GridSpacing) -> Result<Self> {
        let ok = start_hz > 0.0 && start_hz < stop_hz && stop_hz.is_finite() && points >= 2;
        if !ok {
            return Err(Error::InvalidFrequencyGrid {
                start_hz,
                stop_hz,
                points,
            });
        }
        Ok(Self {
            start_hz,
            stop_hz,
            points,
            spacing,
        })
    }

    pub fn linear(start_hz: f64, stop_hz: f64, points: usize) -> Result<Self> {
        Self::new(start_hz, stop_hz, points, GridSpacing::Linear)
    }

    pub fn logarithmic(start_hz: f64, stop_hz: f64, points: usize) -> Result<Self> {
        Self::new(start_hz, stop_hz, points, GridSpacing::Logarithmic)
    }

    pub fn start_hz(&self) -> f64 {
        self.start_hz
    }

    pub fn stop_hz(&self) -> f64 {
        self.stop_hz
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> GridSpacing {
        self.spacing
    }

    /// The sampled frequencies. Both endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let mut out = Vec::with_capacity(n);
        match self.spacing {
            GridSpacing::Linear => {
                let step = (self.stop_hz - self.start_hz) / (n - 1) as f64;
                for i in 0..n {
                    out.push(self.start_hz + i as f64 * step);
                }
            }
            GridSpacing::Logarithmic => {
                let (a, b) = (self.start_hz.ln(), self.stop_hz.ln());
                let step = (b - a) / (n - 1) as f64;
                for i in 0..n {
                    out.push((a + i as f64 * step).exp());
                }
            }
        }
        out[0] = self.start_hz;
        out[n - 1] = self.stop_hz;
        out
    }
}
