//! Closed-form analytics for a coupled pair of resonators: frequency
//! splitting, dimensionless dispersion and coupling extraction from a
//! measured split.
//!
//! The lossless pair resonates where (1 - k^2) w^4 - (w1^2 + w2^2) w^2 +
//! w1^2 w2^2 = 0, a quadratic in w^2 whose two roots are the split
//! branches. For identical resonators they collapse to w0 / sqrt(1 +- k).

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::{
    build_linear_chain, validate_array, CoilCircuit, FrequencyGrid, NEAREST_NEIGHBOR_ONLY,
};
use crate::sweep::{sweep, DriveSpec};

/// The two resonant angular frequencies of a coupled pair, rad/s.
///
/// Branch labels follow the identical-coil closed form w0 / sqrt(1 +- k):
/// `omega_minus` (the 1 - k denominator) is always the upper branch,
/// `omega_plus` the lower, so `omega_minus >= omega_plus` holds by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPair {
    omega_plus: f64,
    omega_minus: f64,
}

impl SplitPair {
    /// Orders two measured angular frequencies into a pair.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "split frequencies must be positive and finite, got {a} and {b} rad/s"
            )));
        }
        Ok(Self {
            omega_plus: a.min(b),
            omega_minus: a.max(b),
        })
    }

    /// Lower branch, rad/s.
    pub fn omega_plus(&self) -> f64 {
        self.omega_plus
    }

    /// Upper branch, rad/s.
    pub fn omega_minus(&self) -> f64 {
        self.omega_minus
    }

    /// Both branches in hertz, ordered (lower, upper).
    pub fn frequencies_hz(&self) -> (f64, f64) {
        (self.omega_plus / TAU, self.omega_minus / TAU)
    }
}

/// Dimensionless branch ratios r = w / w1 of a coupled pair.
///
/// `r_minus` is the upper branch, mirroring [`SplitPair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBranches {
    pub r_plus: f64,
    pub r_minus: f64,
}

fn check_k(k: f64) -> Result<()> {
    if (0.0..1.0).contains(&k) {
        Ok(())
    } else {
        Err(Error::KOutOfRange(k))
    }
}

/// Split angular frequencies of two arbitrary resonators coupled with
/// coefficient `k`. Symmetric under swapping the two coils; reduces to
/// [`identical_coupled_frequencies`] when they match.
pub fn coupled_frequencies_general(
    coil1: &CoilCircuit,
    coil2: &CoilCircuit,
    k: f64,
) -> Result<SplitPair> {
    check_k(k)?;
    coil1.check(0)?;
    coil2.check(1)?;
    let w1_sq = 1.0 / (coil1.inductance * coil1.capacitance);
    let w2_sq = 1.0 / (coil2.inductance * coil2.capacitance);
    let (lo_sq, hi_sq) = split_squares(w1_sq, w2_sq, k);
    Ok(SplitPair {
        omega_plus: lo_sq.sqrt(),
        omega_minus: hi_sq.sqrt(),
    })
}

/// Roots of (1 - k^2) u^2 - (a + b) u + a b in u = w^2. The smaller root
/// comes from the product identity to avoid cancellation.
fn split_squares(a: f64, b: f64, k: f64) -> (f64, f64) {
    let one_minus_k_sq = 1.0 - k * k;
    let s = a + b;
    let disc = (s * s - 4.0 * one_minus_k_sq * a * b).max(0.0);
    let hi = (s + disc.sqrt()) / (2.0 * one_minus_k_sq);
    let lo = a * b / (one_minus_k_sq * hi);
    (lo, hi)
}

/// Branch ratios r = w / w1 for natural-frequency ratio `omega_ratio` =
/// w2 / w1. Equals [`coupled_frequencies_general`] rescaled by w1.
pub fn frequency_ratio_branches(omega_ratio: f64, k: f64) -> Result<RatioBranches> {
    check_k(k)?;
    if !(omega_ratio > 0.0 && omega_ratio.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "frequency ratio must be positive and finite, got {omega_ratio}"
        )));
    }
    let (lo_sq, hi_sq) = split_squares(1.0, omega_ratio * omega_ratio, k);
    Ok(RatioBranches {
        r_plus: lo_sq.sqrt(),
        r_minus: hi_sq.sqrt(),
    })
}

/// Split frequencies of two identical resonators: w = 1 / sqrt(LC (1 +- k)).
pub fn identical_coupled_frequencies(
    inductance: f64,
    capacitance: f64,
    k: f64,
) -> Result<SplitPair> {
    check_k(k)?;
    CoilCircuit::new(inductance, capacitance, 0.0).check(0)?;
    let lc = inductance * capacitance;
    Ok(SplitPair {
        omega_plus: 1.0 / (lc * (1.0 + k)).sqrt(),
        omega_minus: 1.0 / (lc * (1.0 - k)).sqrt(),
    })
}

/// Coupling coefficient recovered from a measured split:
/// k = (w_upper^2 - w_lower^2) / (w_upper^2 + w_lower^2).
///
/// A degenerate (unsplit) pair is not an error and yields exactly 0.
pub fn estimate_k_from_split(pair: &SplitPair) -> f64 {
    if pair.omega_plus == pair.omega_minus {
        return 0.0;
    }
    let lo_sq = pair.omega_plus * pair.omega_plus;
    let hi_sq = pair.omega_minus * pair.omega_minus;
    (hi_sq - lo_sq) / (hi_sq + lo_sq)
}

/// Both split branches sampled against the coupling coefficient, with a
/// per-sample resolvability verdict from the full lossy sweep model.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    pub k_values: Vec<f64>,
    /// Lower branch (the 1 + k denominator), hertz.
    pub lower_branch_hz: Vec<f64>,
    /// Upper branch (the 1 - k denominator), hertz.
    pub upper_branch_hz: Vec<f64>,
    /// Whether the two impedance peaks are separately resolvable at this k.
    pub resolvable: Vec<bool>,
}

/// Tuning knobs for the resolvability test.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionOptions {
    /// Two peaks count as resolved when the valley between them drops to
    /// at most this fraction of the smaller peak.
    pub dip_factor: f64,
    /// Sample count of the per-k sweep window.
    pub window_points: usize,
    /// Relative margin added around the branch interval.
    pub band_margin: f64,
}

impl Default for DispersionOptions {
    fn default() -> Self {
        Self {
            dip_factor: 0.9,
            window_points: 1201,
            band_margin: 0.1,
        }
    }
}

/// Samples the identical-pair dispersion on k in [0, k_max] and marks where
/// the two branches become resolvable in the lossy impedance spectrum.
pub fn dispersion_curve(
    inductance: f64,
    capacitance: f64,
    resistance: f64,
    k_max: f64,
    steps: usize,
) -> Result<DispersionCurve> {
    dispersion_curve_with(
        inductance,
        capacitance,
        resistance,
        k_max,
        steps,
        &DispersionOptions::default(),
    )
}

pub fn dispersion_curve_with(
    inductance: f64,
    capacitance: f64,
    resistance: f64,
    k_max: f64,
    steps: usize,
    options: &DispersionOptions,
) -> Result<DispersionCurve> {
    if !(k_max > 0.0 && k_max < 1.0) {
        return Err(Error::KOutOfRange(k_max));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "dispersion curve needs at least 2 steps, got {steps}"
        )));
    }
    if !(resistance > 0.0 && resistance.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "resolvability needs finite peaks: resistance must be > 0, got {resistance}"
        )));
    }
    CoilCircuit::new(inductance, capacitance, resistance).check(0)?;

    let mut curve = DispersionCurve {
        k_values: Vec::with_capacity(steps),
        lower_branch_hz: Vec::with_capacity(steps),
        upper_branch_hz: Vec::with_capacity(steps),
        resolvable: Vec::with_capacity(steps),
    };
    for i in 0..steps {
        let k = k_max * i as f64 / (steps - 1) as f64;
        let pair = identical_coupled_frequencies(inductance, capacitance, k)?;
        let (f_lo, f_hi) = pair.frequencies_hz();
        let resolvable = if k == 0.0 {
            false
        } else {
            split_resolvable(inductance, capacitance, resistance, k, f_lo, f_hi, options)?
        };
        curve.k_values.push(k);
        curve.lower_branch_hz.push(f_lo);
        curve.upper_branch_hz.push(f_hi);
        curve.resolvable.push(resolvable);
    }
    Ok(curve)
}

fn split_resolvable(
    inductance: f64,
    capacitance: f64,
    resistance: f64,
    k: f64,
    f_lo: f64,
    f_hi: f64,
    options: &DispersionOptions,
) -> Result<bool> {
    let coil = CoilCircuit::new(inductance, capacitance, resistance);
    let model = validate_array(build_linear_chain(
        vec![coil, coil],
        k,
        NEAREST_NEIGHBOR_ONLY,
    )?)?;
    let grid = FrequencyGrid::linear(
        f_lo * (1.0 - options.band_margin),
        f_hi * (1.0 + options.band_margin),
        options.window_points,
    )?;
    let result = sweep(&model, &DriveSpec { driven: 0, grid })?;
    let magnitudes: Vec<f64> = result.input_impedance().iter().map(|z| z.norm()).collect();
    Ok(two_peak_dip(&magnitudes, options.dip_factor))
}

/// True when the spectrum shows two interior maxima separated by a valley
/// at most `dip_factor` times the smaller of the two.
fn two_peak_dip(magnitudes: &[f64], dip_factor: f64) -> bool {
    let mut maxima = Vec::new();
    for i in 1..magnitudes.len().saturating_sub(1) {
        if magnitudes[i] > magnitudes[i - 1] && magnitudes[i] >= magnitudes[i + 1] {
            maxima.push(i);
        }
    }
    if maxima.len() < 2 {
        return false;
    }
    maxima.sort_by(|&a, &b| magnitudes[b].total_cmp(&magnitudes[a]));
    let (left, right) = (maxima[0].min(maxima[1]), maxima[0].max(maxima[1]));
    let valley = magnitudes[left..=right]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    valley <= dip_factor * magnitudes[left].min(magnitudes[right])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const L: f64 = 10e-6;
    const C: f64 = 150e-12;

    #[test]
    fn uncoupled_pair_keeps_natural_frequency() {
        let coil = CoilCircuit::new(L, C, 0.0);
        let pair = coupled_frequencies_general(&coil, &coil, 0.0).unwrap();
        let w0 = coil.natural_angular_frequency();
        assert_relative_eq!(pair.omega_plus(), w0, max_relative = 1e-14);
        assert_relative_eq!(pair.omega_minus(), w0, max_relative = 1e-14);
    }

    #[test]
    fn general_reduces_to_identical_form() {
        let coil = CoilCircuit::new(L, C, 0.0);
        for k in [0.01, 0.14, 0.3, 0.6, 0.9] {
            let general = coupled_frequencies_general(&coil, &coil, k).unwrap();
            let identical = identical_coupled_frequencies(L, C, k).unwrap();
            assert_relative_eq!(
                general.omega_plus(),
                identical.omega_plus(),
                max_relative = 1e-13
            );
            assert_relative_eq!(
                general.omega_minus(),
                identical.omega_minus(),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn general_split_is_symmetric_under_swap() {
        let a = CoilCircuit::new(L, C, 0.0);
        let b = CoilCircuit::new(L, 2.0 * C, 0.0);
        let ab = coupled_frequencies_general(&a, &b, 0.2).unwrap();
        let ba = coupled_frequencies_general(&b, &a, 0.2).unwrap();
        assert_relative_eq!(ab.omega_plus(), ba.omega_plus(), max_relative = 1e-14);
        assert_relative_eq!(ab.omega_minus(), ba.omega_minus(), max_relative = 1e-14);
    }

    #[test]
    fn general_split_frozen_asymmetric_case() {
        // frozen from an independent quadratic solve for 10 uH / 150 pF
        // against 10 uH / 300 pF at k = 0.2
        let a = CoilCircuit::new(L, C, 0.0);
        let b = CoilCircuit::new(L, 300e-12, 0.0);
        let pair = coupled_frequencies_general(&a, &b, 0.2).unwrap();
        assert_relative_eq!(pair.omega_plus(), 17_926_777.52834465, max_relative = 1e-12);
        assert_relative_eq!(
            pair.omega_minus(),
            26_838_355.279634852,
            max_relative = 1e-12
        );
    }

    #[test]
    fn ratio_branches_identical_at_rest() {
        let r = frequency_ratio_branches(1.0, 0.0).unwrap();
        assert_relative_eq!(r.r_plus, 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.r_minus, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn ratio_branches_identical_split() {
        // r^2 = (2 +- 2k) / (2 (1 - k^2)) at equal natural frequencies
        let r = frequency_ratio_branches(1.0, 0.14).unwrap();
        assert_relative_eq!(r.r_plus, 0.936585811581694, max_relative = 1e-13);
        assert_relative_eq!(r.r_minus, 1.0783277320343843, max_relative = 1e-13);
    }

    #[test]
    fn ratio_branches_consistent_with_general_split() {
        let a = CoilCircuit::new(L, C, 0.0);
        let b = CoilCircuit::new(4e-6, 220e-12, 0.0);
        let w1 = a.natural_angular_frequency();
        let w2 = b.natural_angular_frequency();
        for k in [0.05, 0.2, 0.45] {
            let pair = coupled_frequencies_general(&a, &b, k).unwrap();
            let ratio = frequency_ratio_branches(w2 / w1, k).unwrap();
            assert_relative_eq!(pair.omega_plus() / w1, ratio.r_plus, max_relative = 1e-12);
            assert_relative_eq!(pair.omega_minus() / w1, ratio.r_minus, max_relative = 1e-12);
        }
    }

    #[test]
    fn identical_split_frozen_values() {
        let pair = identical_coupled_frequencies(L, C, 0.14).unwrap();
        let (f_lo, f_hi) = pair.frequencies_hz();
        assert_relative_eq!(f_lo, 3_848_771.043359351, max_relative = 1e-12);
        assert_relative_eq!(f_hi, 4_431_240.041205017, max_relative = 1e-12);
    }

    #[test]
    fn identical_split_limits() {
        let rest = identical_coupled_frequencies(L, C, 0.0).unwrap();
        assert_eq!(rest.omega_plus(), rest.omega_minus());

        let w0 = CoilCircuit::new(L, C, 0.0).natural_angular_frequency();
        let strong = identical_coupled_frequencies(L, C, 0.99).unwrap();
        assert_relative_eq!(strong.omega_minus(), 10.0 * w0, max_relative = 1e-12);
        assert_relative_eq!(
            strong.omega_plus(),
            w0 / 1.99f64.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn split_product_identity() {
        // (w_plus^2)(1 + k) = (w_minus^2)(1 - k) = w0^2
        let w0_sq = 1.0 / (L * C);
        for k in [0.01, 0.14, 0.3, 0.6] {
            let pair = identical_coupled_frequencies(L, C, k).unwrap();
            assert_relative_eq!(
                pair.omega_plus().powi(2) * (1.0 + k),
                w0_sq,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                pair.omega_minus().powi(2) * (1.0 - k),
                w0_sq,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn degenerate_pair_estimates_zero() {
        let pair = SplitPair::new(1e7, 1e7).unwrap();
        assert_eq!(estimate_k_from_split(&pair), 0.0);
    }

    #[test]
    fn split_estimate_round_trip() {
        for k in [0.01, 0.05, 0.14, 0.3, 0.6] {
            let pair = identical_coupled_frequencies(L, C, k).unwrap();
            assert!((estimate_k_from_split(&pair) - k).abs() <= 1e-12);
        }
    }

    #[test]
    fn split_estimate_from_frozen_frequencies() {
        let pair = SplitPair::new(TAU * 3_848_771.043359351, TAU * 4_431_240.041205017).unwrap();
        assert!((estimate_k_from_split(&pair) - 0.14).abs() <= 1e-12);
    }

    #[test]
    fn k_out_of_range_is_rejected() {
        let coil = CoilCircuit::new(L, C, 0.0);
        assert_eq!(
            coupled_frequencies_general(&coil, &coil, 1.0),
            Err(Error::KOutOfRange(1.0))
        );
        assert_eq!(
            identical_coupled_frequencies(L, C, -0.1),
            Err(Error::KOutOfRange(-0.1))
        );
        assert_eq!(
            frequency_ratio_branches(1.0, 1.2),
            Err(Error::KOutOfRange(1.2))
        );
    }

    #[test]
    fn split_pair_orders_inputs() {
        let pair = SplitPair::new(2e7, 1e7).unwrap();
        assert_eq!(pair.omega_plus(), 1e7);
        assert_eq!(pair.omega_minus(), 2e7);
        assert!(SplitPair::new(-1.0, 1e7).is_err());
        assert!(SplitPair::new(f64::NAN, 1e7).is_err());
    }
}
