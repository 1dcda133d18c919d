//! Peak extraction, peak-to-mode matching, damping characterization and
//! scalar coupling fits.

use std::f64::consts::TAU;

use crate::eigen::{classify_modes, solve_modes, ModeSet, DEFAULT_NODE_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{
    build_linear_chain, validate_array, CoilCircuit, FrequencyGrid, ValidatedArray,
    NEAREST_NEIGHBOR_ONLY,
};
use crate::sweep::{input_impedance, sweep, DriveSpec, SweepResult};
use crate::twocoil::{estimate_k_from_split, SplitPair};

/// Peaks below this fraction of the global maximum are discarded.
pub const DEFAULT_PROMINENCE_FLOOR: f64 = 0.01;

/// Default sweep density for peak detection.
pub const DEFAULT_GRID_POINTS: usize = 2000;

/// Points of the dense window re-solved around each detected peak.
const REFINE_POINTS: usize = 50;

/// Half-width of the refinement window, in coarse grid steps.
const REFINE_SPAN_STEPS: f64 = 2.0;

/// One detected resonant peak.
#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    pub frequency_hz: f64,
    /// |Z0| at the (interpolated) peak, ohms.
    pub magnitude: f64,
    /// Topographic prominence on the coarse grid, ohms.
    pub prominence: f64,
    /// Mode index assigned by [`match_peaks_to_modes`].
    pub matched_mode: Option<usize>,
    /// Signed relative frequency error against the matched eigen-frequency.
    pub deviation: Option<f64>,
}

/// Detected peaks, ascending in frequency.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakList {
    peaks: Vec<Peak>,
}

impl PeakList {
    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }
}

/// Local maxima of |Z0| with prominence at least `prominence_floor` times
/// the global maximum. Peak positions are refined by parabolic
/// interpolation of the log-magnitude through the three surrounding
/// samples, which keeps them within one grid step of the raw maximum.
pub fn find_peaks(spectrum: &SweepResult, prominence_floor: f64) -> Result<PeakList> {
    if !(prominence_floor > 0.0 && prominence_floor < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "prominence floor must lie in (0, 1), got {prominence_floor}"
        )));
    }
    let frequencies = spectrum.frequencies_hz();
    if frequencies.len() < 3 {
        return Err(Error::EmptySpectrum);
    }
    let magnitudes = spectrum.magnitudes();
    let global_max = magnitudes.iter().copied().fold(0.0f64, f64::max);
    if !global_max.is_finite() || global_max <= 0.0 {
        return Ok(PeakList::default());
    }

    let mut peaks = Vec::new();
    for i in 1..magnitudes.len() - 1 {
        let triple_finite = magnitudes[i - 1].is_finite()
            && magnitudes[i].is_finite()
            && magnitudes[i + 1].is_finite();
        if !triple_finite
            || !(magnitudes[i] > magnitudes[i - 1] && magnitudes[i] >= magnitudes[i + 1])
        {
            continue;
        }
        let prominence = prominence_at(&magnitudes, i);
        if prominence < prominence_floor * global_max {
            continue;
        }
        let (frequency_hz, log_magnitude) = parabolic_vertex(
            [frequencies[i - 1], frequencies[i], frequencies[i + 1]],
            [
                magnitudes[i - 1].ln(),
                magnitudes[i].ln(),
                magnitudes[i + 1].ln(),
            ],
        );
        peaks.push(Peak {
            frequency_hz,
            magnitude: log_magnitude.exp(),
            prominence,
            matched_mode: None,
            deviation: None,
        });
    }
    Ok(PeakList { peaks })
}

/// Standard topographic prominence: height above the higher of the two
/// valley floors separating this maximum from taller terrain.
fn prominence_at(magnitudes: &[f64], peak: usize) -> f64 {
    let height = magnitudes[peak];
    let mut left_floor = height;
    for i in (0..peak).rev() {
        if magnitudes[i] > height {
            break;
        }
        left_floor = left_floor.min(magnitudes[i]);
    }
    let mut right_floor = height;
    for &magnitude in &magnitudes[peak + 1..] {
        if magnitude > height {
            break;
        }
        right_floor = right_floor.min(magnitude);
    }
    height - left_floor.max(right_floor)
}

/// Vertex of the parabola through three points, clamped to the outer
/// abscissae. Falls back to the middle point when the curvature is not
/// strictly negative.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let s1 = (y[1] - y[0]) / (x[1] - x[0]);
    let s2 = (y[2] - y[1]) / (x[2] - x[1]);
    let m1 = 0.5 * (x[0] + x[1]);
    let m2 = 0.5 * (x[1] + x[2]);
    let curvature = (s2 - s1) / (m2 - m1);
    if !(curvature < 0.0) {
        return (x[1], y[1]);
    }
    let vertex = (m1 - s1 / curvature).clamp(x[0], x[2]);
    let value = y[0] + s1 * (vertex - x[0]) + 0.5 * curvature * (vertex - x[0]) * (vertex - x[1]);
    (vertex, value)
}

/// Sweeps the grid, detects peaks, then re-solves a dense window around
/// each peak for sub-grid frequency accuracy.
pub fn detect_peaks(
    model: &ValidatedArray,
    drive: &DriveSpec,
    prominence_floor: f64,
) -> Result<PeakList> {
    let coarse = sweep(model, drive)?;
    let found = find_peaks(&coarse, prominence_floor)?;
    let frequencies = coarse.frequencies_hz();
    let mut peaks = Vec::with_capacity(found.len());
    for peak in found.peaks() {
        peaks.push(refine_peak(model, drive.driven, frequencies, peak)?);
    }
    peaks.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
    Ok(PeakList { peaks })
}

fn refine_peak(
    model: &ValidatedArray,
    driven: usize,
    coarse_frequencies: &[f64],
    peak: &Peak,
) -> Result<Peak> {
    let position = coarse_frequencies
        .partition_point(|&f| f < peak.frequency_hz)
        .clamp(1, coarse_frequencies.len() - 1);
    let step = coarse_frequencies[position] - coarse_frequencies[position - 1];
    let lo = (peak.frequency_hz - REFINE_SPAN_STEPS * step).max(coarse_frequencies[0]);
    let hi = (peak.frequency_hz + REFINE_SPAN_STEPS * step)
        .min(coarse_frequencies[coarse_frequencies.len() - 1]);
    if !(lo < hi) {
        return Ok(peak.clone());
    }

    let window: Vec<f64> = (0..REFINE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (REFINE_POINTS - 1) as f64)
        .collect();
    let mut magnitudes = Vec::with_capacity(REFINE_POINTS);
    for &f in &window {
        let magnitude = match input_impedance(model, driven, TAU * f) {
            Ok(z) => z.norm(),
            Err(Error::SingularAtFrequency { .. }) => f64::NAN,
            Err(other) => return Err(other),
        };
        magnitudes.push(magnitude);
    }
    let argmax = match (0..REFINE_POINTS)
        .filter(|&i| magnitudes[i].is_finite())
        .max_by(|&a, &b| magnitudes[a].total_cmp(&magnitudes[b]))
    {
        Some(i) => i,
        None => return Ok(peak.clone()),
    };

    let mut refined = peak.clone();
    if argmax > 0 && argmax < REFINE_POINTS - 1 && magnitudes[argmax].is_finite() {
        let (frequency_hz, log_magnitude) = parabolic_vertex(
            [window[argmax - 1], window[argmax], window[argmax + 1]],
            [
                magnitudes[argmax - 1].ln(),
                magnitudes[argmax].ln(),
                magnitudes[argmax + 1].ln(),
            ],
        );
        refined.frequency_hz = frequency_hz;
        refined.magnitude = log_magnitude.exp();
    } else {
        refined.frequency_hz = window[argmax];
        refined.magnitude = magnitudes[argmax];
    }
    Ok(refined)
}

/// Greedy nearest-frequency assignment of peaks to the modes visible from
/// the drive element. Each mode is used at most once; a peak left without a
/// mode is a modeling inconsistency and errors out.
pub fn match_peaks_to_modes(
    peaks: &PeakList,
    modes: &ModeSet,
    drive_index: usize,
) -> Result<PeakList> {
    if drive_index >= modes.len() {
        return Err(Error::InvalidDriveIndex {
            index: drive_index,
            coils: modes.len(),
        });
    }
    let classification = classify_modes(modes, DEFAULT_NODE_TOLERANCE)?;
    let visible: Vec<usize> = (0..modes.len())
        .filter(|&mode| classification.visible_from(mode).contains(&drive_index))
        .collect();

    let mut pairs = Vec::new();
    for (peak_index, peak) in peaks.peaks().iter().enumerate() {
        for &mode in &visible {
            let mode_frequency = modes.frequencies_hz()[mode];
            let deviation = (peak.frequency_hz - mode_frequency) / mode_frequency;
            pairs.push((deviation.abs(), peak_index, mode, deviation));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut peak_taken = vec![false; peaks.len()];
    let mut mode_taken = vec![false; modes.len()];
    let mut annotated = peaks.peaks().to_vec();
    let mut assigned = 0usize;
    for (_, peak_index, mode, deviation) in pairs {
        if peak_taken[peak_index] || mode_taken[mode] {
            continue;
        }
        peak_taken[peak_index] = true;
        mode_taken[mode] = true;
        annotated[peak_index].matched_mode = Some(mode);
        annotated[peak_index].deviation = Some(deviation);
        assigned += 1;
    }
    if assigned < peaks.len() {
        return Err(Error::UnmatchedPeak {
            peaks: peaks.len(),
            visible_modes: visible.len(),
            drive_index,
        });
    }
    Ok(PeakList { peaks: annotated })
}

/// One row of a damping study.
#[derive(Debug, Clone, PartialEq)]
pub struct DampingRow {
    pub resistance: f64,
    pub detected_peaks: usize,
    /// Signed relative deviation per mode; `None` when the mode attracted
    /// no peak (node-suppressed or merged away by damping).
    pub deviations: Vec<Option<f64>>,
}

/// Re-sweeps the array at each uniform series resistance and tabulates the
/// per-mode disparity between detected peaks and the lossless
/// eigen-frequencies. Peak-count drops mark damping-induced mode merging.
pub fn damping_study(
    model: &ValidatedArray,
    resistances: &[f64],
    drive: &DriveSpec,
) -> Result<Vec<DampingRow>> {
    if resistances.is_empty() {
        return Err(Error::InvalidArgument(
            "damping study needs at least one resistance".into(),
        ));
    }
    for window in resistances.windows(2) {
        if !(window[0] < window[1]) {
            return Err(Error::InvalidArgument(
                "resistances must be positive and strictly ascending".into(),
            ));
        }
    }
    if !(resistances[0] > 0.0) {
        return Err(Error::InvalidArgument(
            "resistances must be positive and strictly ascending".into(),
        ));
    }

    let modes = solve_modes(model)?;
    let mut rows = Vec::with_capacity(resistances.len());
    for &resistance in resistances {
        let lossy = model.with_uniform_resistance(resistance)?;
        let peaks = detect_peaks(&lossy, drive, DEFAULT_PROMINENCE_FLOOR)?;
        let matched = match_peaks_to_modes(&peaks, &modes, drive.driven)?;
        let mut deviations = vec![None; modes.len()];
        for peak in matched.peaks() {
            if let (Some(mode), Some(deviation)) = (peak.matched_mode, peak.deviation) {
                deviations[mode] = Some(deviation);
            }
        }
        rows.push(DampingRow {
            resistance,
            detected_peaks: peaks.len(),
            deviations,
        });
    }
    Ok(rows)
}

/// Result of a scalar coupling fit.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingFit {
    pub k: f64,
    /// Sum of squared relative differences at the fitted k.
    pub residual: f64,
    /// Model eigen-frequencies at the fitted k, hertz.
    pub frequencies_hz: Vec<f64>,
}

const FIT_SCAN_POINTS: usize = 129;
const FIT_GOLDEN_ITERATIONS: usize = 100;
/// A secondary residual minimum counts as a competing fit only when it
/// drops below this fraction of the barrier separating it from the global
/// basin. Shallow kinks from observed frequencies switching their nearest
/// model branch stay above it; genuinely ambiguous fits fall far below.
const FIT_AMBIGUITY_FACTOR: f64 = 0.5;

/// Fits a single uniform nearest-neighbour coupling coefficient to observed
/// resonant frequencies.
///
/// A two-coil array with two observations inverts the squared-split formula
/// exactly; otherwise the summed squared relative mismatch between observed
/// and nearest model frequencies is minimized over `bracket` by a coarse
/// scan plus golden-section refinement. A residual that is not unimodal
/// over the bracket aborts with the sampled curve attached.
pub fn fit_coupling(
    coils: &[CoilCircuit],
    observed_hz: &[f64],
    bracket: (f64, f64),
) -> Result<CouplingFit> {
    if coils.len() < 2 {
        return Err(Error::InvalidArgument(
            "coupling fit needs at least two coils".into(),
        ));
    }
    if observed_hz.is_empty() || observed_hz.len() > coils.len() {
        return Err(Error::InvalidArgument(format!(
            "observed frequency count must lie in 1..={}, got {}",
            coils.len(),
            observed_hz.len()
        )));
    }
    if observed_hz.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        return Err(Error::InvalidArgument(
            "observed frequencies must be positive and finite".into(),
        ));
    }
    let (lo, hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "search bracket must satisfy 0 < lo < hi < 1, got ({lo}, {hi})"
        )));
    }

    if coils.len() == 2 && observed_hz.len() == 2 {
        let pair = SplitPair::new(TAU * observed_hz[0], TAU * observed_hz[1])?;
        let k = estimate_k_from_split(&pair);
        let frequencies_hz = chain_frequencies(coils, k)?;
        let residual = fit_residual(observed_hz, &frequencies_hz);
        return Ok(CouplingFit {
            k,
            residual,
            frequencies_hz,
        });
    }

    let k_samples: Vec<f64> = (0..FIT_SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (FIT_SCAN_POINTS - 1) as f64)
        .collect();
    let residuals: Vec<f64> = k_samples
        .iter()
        .map(|&k| match chain_frequencies(coils, k) {
            Ok(frequencies) => fit_residual(observed_hz, &frequencies),
            Err(_) => f64::INFINITY,
        })
        .collect();

    let best = (0..FIT_SCAN_POINTS)
        .filter(|&i| residuals[i].is_finite())
        .min_by(|&a, &b| residuals[a].total_cmp(&residuals[b]))
        .ok_or_else(|| Error::NoBracket {
            k_samples: k_samples.clone(),
            residuals: residuals.clone(),
        })?;

    for i in 1..FIT_SCAN_POINTS - 1 {
        let local_min = residuals[i].is_finite()
            && residuals[i] < residuals[i - 1]
            && residuals[i] <= residuals[i + 1];
        if !local_min || i == best {
            continue;
        }
        let (path_lo, path_hi) = (i.min(best), i.max(best));
        let barrier = residuals[path_lo..=path_hi]
            .iter()
            .copied()
            .filter(|r| r.is_finite())
            .fold(0.0f64, f64::max);
        if residuals[i] < FIT_AMBIGUITY_FACTOR * barrier {
            return Err(Error::NoBracket {
                k_samples,
                residuals,
            });
        }
    }

    let mut a = k_samples[best.saturating_sub(1)];
    let mut b = k_samples[(best + 1).min(FIT_SCAN_POINTS - 1)];
    let objective = |k: f64| -> f64 {
        match chain_frequencies(coils, k) {
            Ok(frequencies) => fit_residual(observed_hz, &frequencies),
            Err(_) => f64::INFINITY,
        }
    };
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..FIT_GOLDEN_ITERATIONS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let k = 0.5 * (a + b);
    let frequencies_hz = chain_frequencies(coils, k)?;
    let residual = fit_residual(observed_hz, &frequencies_hz);
    Ok(CouplingFit {
        k,
        residual,
        frequencies_hz,
    })
}

fn chain_frequencies(coils: &[CoilCircuit], k: f64) -> Result<Vec<f64>> {
    let model = validate_array(build_linear_chain(
        coils.to_vec(),
        k,
        NEAREST_NEIGHBOR_ONLY,
    )?)?;
    Ok(solve_modes(&model)?.frequencies_hz().to_vec())
}

fn fit_residual(observed_hz: &[f64], model_hz: &[f64]) -> f64 {
    observed_hz
        .iter()
        .map(|&observed| {
            model_hz
                .iter()
                .map(|&model| ((observed - model) / model).powi(2))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Per-element quality factors Q = w0 L / R.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityFactor {
    values: Vec<f64>,
}

impl QualityFactor {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Elements with zero resistance, flagged as infinite Q.
    pub fn infinite_indices(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, q)| q.is_infinite())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn any_infinite(&self) -> bool {
        self.values.iter().any(|q| q.is_infinite())
    }
}

pub fn quality_factors(model: &ValidatedArray) -> QualityFactor {
    QualityFactor {
        values: model
            .coils()
            .iter()
            .map(|coil| {
                if coil.resistance == 0.0 {
                    f64::INFINITY
                } else {
                    coil.natural_angular_frequency() * coil.inductance / coil.resistance
                }
            })
            .collect(),
    }
}

/// Linear detection grid bracketing every eigen-frequency with a 20%
/// relative margin.
pub fn suggested_grid(modes: &ModeSet, points: usize) -> Result<FrequencyGrid> {
    let first = modes.frequencies_hz().first().copied().unwrap_or(0.0);
    let last = modes.frequencies_hz().last().copied().unwrap_or(0.0);
    FrequencyGrid::linear(first * 0.8, last * 1.2, points)
}
