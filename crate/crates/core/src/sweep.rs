//! Direct solution of the coupled Kirchhoff system: the ground-truth lossy
//! model the eigen predictions are judged against.
//!
//! Topology convention: the driven element is measured across its parallel
//! LC tank, every passive element is a closed series RLC loop. With a unit
//! current source across the driven tank the input impedance is numerically
//! the driven-node voltage, so no source impedance needs to be modelled.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CoilCircuit, FrequencyGrid, ValidatedArray};

/// Which element is driven, and over which frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    /// Zero-based element index.
    pub driven: usize,
    pub grid: FrequencyGrid,
}

/// Impedance of a passive series RLC loop: Z = R + 1/(iwC) + iwL.
pub fn passive_impedance(coil: &CoilCircuit, omega: f64) -> Complex64 {
    Complex64::new(
        coil.resistance,
        omega * coil.inductance - 1.0 / (omega * coil.capacitance),
    )
}

/// Full complex mesh matrix at one frequency.
///
/// The driven row carries the coil branch impedance R + iwL (its capacitor
/// sits in parallel outside the mesh); every passive row carries the series
/// loop impedance; off-diagonals are iw M. The matrix is symmetric, and the
/// implied right-hand side is (V_driven, 0, ..., 0).
pub fn assemble_system(
    model: &ValidatedArray,
    driven: usize,
    omega: f64,
) -> Result<DMatrix<Complex64>> {
    check_drive(model, driven)?;
    Ok(assemble_with(
        model,
        &model.mutual_inductance_matrix(),
        driven,
        omega,
    ))
}

fn assemble_with(
    model: &ValidatedArray,
    mutual: &DMatrix<f64>,
    driven: usize,
    omega: f64,
) -> DMatrix<Complex64> {
    let coils = model.coils();
    DMatrix::from_fn(model.len(), model.len(), |i, j| {
        if i != j {
            Complex64::new(0.0, omega * mutual[(i, j)])
        } else if i == driven {
            Complex64::new(coils[i].resistance, omega * mutual[(i, i)])
        } else {
            passive_impedance(&coils[i], omega)
        }
    })
}

/// Solution of the mesh system with unit current in the driven coil branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSolution {
    /// Branch voltage per unit branch current, i.e. the impedance of the
    /// driven coil branch including every coupling effect.
    pub coil_impedance: Complex64,
    /// Coil branch currents, normalized to `currents[driven] = 1`.
    pub currents: DVector<Complex64>,
}

/// Solves the mesh system at one angular frequency.
pub fn solve_at(model: &ValidatedArray, driven: usize, omega: f64) -> Result<PointSolution> {
    check_drive(model, driven)?;
    let mutual = model.mutual_inductance_matrix();
    solve_with(model, &mutual, driven, omega)
}

fn solve_with(
    model: &ValidatedArray,
    mutual: &DMatrix<f64>,
    driven: usize,
    omega: f64,
) -> Result<PointSolution> {
    let n = model.len();
    let z = assemble_with(model, mutual, driven, omega);
    let mut currents = DVector::from_element(n, Complex64::new(1.0, 0.0));
    if n > 1 {
        let passive: Vec<usize> = (0..n).filter(|&i| i != driven).collect();
        let sub = DMatrix::from_fn(n - 1, n - 1, |i, j| z[(passive[i], passive[j])]);
        let rhs = DVector::from_fn(n - 1, |i, _| -z[(passive[i], driven)]);
        let solution = sub
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularAtFrequency { omega })?;
        for (p, &row) in passive.iter().enumerate() {
            currents[row] = solution[p];
        }
    }
    let coil_impedance: Complex64 = (0..n).map(|j| z[(driven, j)] * currents[j]).sum();
    if !coil_impedance.is_finite() {
        return Err(Error::SingularAtFrequency { omega });
    }
    Ok(PointSolution {
        coil_impedance,
        currents,
    })
}

/// Impedance across the driven element's parallel LC tank:
/// Z0 = (1/Z_coil + iwC)^{-1}. Maximal at the array resonances.
pub fn input_impedance(model: &ValidatedArray, driven: usize, omega: f64) -> Result<Complex64> {
    check_drive(model, driven)?;
    let mutual = model.mutual_inductance_matrix();
    let (z0, _, _) = point_response(model, &mutual, driven, omega)?;
    Ok(z0)
}

/// Complex spectra of a full frequency sweep.
///
/// Grid points where the lossless system is exactly singular are flagged in
/// `singular_points` and carry NaN entries; they are never regularized.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    driven: usize,
    frequencies_hz: Vec<f64>,
    input_impedance: Vec<Complex64>,
    element_currents: DMatrix<Complex64>,
    element_voltages: DMatrix<Complex64>,
    singular_points: Vec<usize>,
}

impl SweepResult {
    pub fn driven(&self) -> usize {
        self.driven
    }

    pub fn frequencies_hz(&self) -> &[f64] {
        &self.frequencies_hz
    }

    /// Z0 per grid point.
    pub fn input_impedance(&self) -> &[Complex64] {
        &self.input_impedance
    }

    /// |Z0| per grid point.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.input_impedance.iter().map(|z| z.norm()).collect()
    }

    /// N x points matrix of coil branch currents at unit injected current.
    pub fn element_currents(&self) -> &DMatrix<Complex64> {
        &self.element_currents
    }

    /// N x points matrix of element terminal voltages at unit injected
    /// current. The driven column equals Z0; passive entries equal the
    /// capacitor voltage -I/(iwC).
    pub fn element_voltages(&self) -> &DMatrix<Complex64> {
        &self.element_voltages
    }

    pub fn singular_points(&self) -> &[usize] {
        &self.singular_points
    }
}

/// Sweeps the grid, solving the full system at every point.
pub fn sweep(model: &ValidatedArray, drive: &DriveSpec) -> Result<SweepResult> {
    check_drive(model, drive.driven)?;
    let frequencies_hz = drive.grid.values();
    let n = model.len();
    let points = frequencies_hz.len();
    let mutual = model.mutual_inductance_matrix();

    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut input_impedance = vec![nan; points];
    let mut element_currents = DMatrix::from_element(n, points, nan);
    let mut element_voltages = DMatrix::from_element(n, points, nan);
    let mut singular_points = Vec::new();

    for (point, &f) in frequencies_hz.iter().enumerate() {
        match point_response(model, &mutual, drive.driven, TAU * f) {
            Ok((z0, currents, voltages)) => {
                input_impedance[point] = z0;
                element_currents.set_column(point, &currents);
                element_voltages.set_column(point, &voltages);
            }
            Err(Error::SingularAtFrequency { .. }) => singular_points.push(point),
            Err(other) => return Err(other),
        }
    }

    Ok(SweepResult {
        driven: drive.driven,
        frequencies_hz,
        input_impedance,
        element_currents,
        element_voltages,
        singular_points,
    })
}

/// One grid point: tank impedance plus element currents and voltages scaled
/// to unit injected current.
fn point_response(
    model: &ValidatedArray,
    mutual: &DMatrix<f64>,
    driven: usize,
    omega: f64,
) -> Result<(Complex64, DVector<Complex64>, DVector<Complex64>)> {
    let solution = solve_with(model, mutual, driven, omega)?;
    let z_coil = solution.coil_impedance;
    let tank_admittance =
        z_coil.inv() + Complex64::new(0.0, omega * model.coils()[driven].capacitance);
    let z0 = tank_admittance.inv();
    if !z0.is_finite() {
        return Err(Error::SingularAtFrequency { omega });
    }

    let scale = z0 / z_coil;
    let currents = solution.currents.map(|i| i * scale);
    let coils = model.coils();
    let n = model.len();
    // terminal voltage: row of (R_diag + iwM) applied to the currents; for a
    // passive loop this equals the capacitor voltage -I/(iwC)
    let voltages = DVector::from_fn(n, |i, _| {
        let mut v = currents[i] * Complex64::new(coils[i].resistance, omega * mutual[(i, i)]);
        for j in 0..n {
            if j != i {
                v += Complex64::new(0.0, omega * mutual[(i, j)]) * currents[j];
            }
        }
        v
    });
    Ok((z0, currents, voltages))
}

fn check_drive(model: &ValidatedArray, driven: usize) -> Result<()> {
    if driven < model.len() {
        Ok(())
    } else {
        Err(Error::InvalidDriveIndex {
            index: driven,
            coils: model.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        build_linear_chain, validate_array, ArrayModel, CouplingMatrix, NEAREST_NEIGHBOR_ONLY,
    };
    use approx::assert_relative_eq;

    const L: f64 = 10e-6;
    const C: f64 = 150e-12;

    fn single(r: f64) -> ValidatedArray {
        validate_array(ArrayModel::new(
            vec![CoilCircuit::new(L, C, r)],
            CouplingMatrix::identity(1),
        ))
        .unwrap()
    }

    #[test]
    fn passive_impedance_at_series_resonance_is_resistive() {
        let coil = CoilCircuit::new(L, C, 10.0);
        let z = passive_impedance(&coil, coil.natural_angular_frequency());
        assert_eq!(z.re, 10.0);
        assert!(z.im.abs() < 1e-9 * z.re.abs());
    }

    #[test]
    fn passive_impedance_is_capacitive_at_low_frequency() {
        let coil = CoilCircuit::new(L, C, 10.0);
        let z = passive_impedance(&coil, 1.0);
        assert!(z.norm() > 1e9);
        assert!(z.im < 0.0);
    }

    #[test]
    fn passive_impedance_frozen_value() {
        // at the natural frequency of 10 uH / 150 pF the reactances cancel
        let coil = CoilCircuit::new(L, C, 10.0);
        let z = passive_impedance(&coil, TAU * 4_109_362.9604099984);
        assert_relative_eq!(z.re, 10.0, max_relative = 1e-14);
        assert!(z.im.abs() < 1e-6);
    }

    #[test]
    fn single_coil_system_and_solution() {
        let model = single(10.0);
        let omega = 2e7;
        let z = assemble_system(&model, 0, omega).unwrap();
        assert_eq!(z.nrows(), 1);
        assert_eq!(z[(0, 0)], Complex64::new(10.0, omega * L));
        let solution = solve_at(&model, 0, omega).unwrap();
        assert_eq!(solution.coil_impedance, Complex64::new(10.0, omega * L));
    }

    #[test]
    fn assembled_matrix_is_symmetric_with_coupling_zero_pattern() {
        let model = validate_array(
            build_linear_chain(
                vec![CoilCircuit::new(L, C, 2.0); 3],
                0.14,
                NEAREST_NEIGHBOR_ONLY,
            )
            .unwrap(),
        )
        .unwrap();
        let z = assemble_system(&model, 0, 2.3e7).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(z[(i, j)], z[(j, i)]);
            }
        }
        assert_eq!(z[(0, 2)], Complex64::new(0.0, 0.0));
        assert_ne!(z[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn mesh_residual_is_tiny() {
        let model = validate_array(
            build_linear_chain(vec![CoilCircuit::new(L, C, 5.0); 4], 0.2, 2.0).unwrap(),
        )
        .unwrap();
        for omega in [1.5e7, 2.58e7, 4.0e7] {
            let z = assemble_system(&model, 1, omega).unwrap();
            let solution = solve_at(&model, 1, omega).unwrap();
            let product = &z * &solution.currents;
            // rows other than the driven one must vanish
            let mut residual = 0.0f64;
            for (i, v) in product.iter().enumerate() {
                if i != 1 {
                    residual = residual.max(v.norm());
                }
            }
            let scale = solution.coil_impedance.norm();
            assert!(residual <= 1e-10 * scale, "residual {residual} at {omega}");
            assert_relative_eq!(
                product[1].re,
                solution.coil_impedance.re,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn lossless_pair_input_impedance_grows_near_split_roots() {
        let model = validate_array(ArrayModel::new(
            vec![CoilCircuit::new(L, C, 0.0); 2],
            CouplingMatrix::uniform(2, 0.14),
        ))
        .unwrap();
        let pair = crate::twocoil::identical_coupled_frequencies(L, C, 0.14).unwrap();
        for root in [pair.omega_plus(), pair.omega_minus()] {
            let far = input_impedance(&model, 0, root * (1.0 + 1e-3))
                .unwrap()
                .norm();
            let near = input_impedance(&model, 0, root * (1.0 + 1e-5))
                .unwrap()
                .norm();
            let nearer = input_impedance(&model, 0, root * (1.0 + 1e-7))
                .unwrap()
                .norm();
            assert!(far < near && near < nearer, "{far} {near} {nearer}");
        }
    }

    #[test]
    fn exact_lossless_singularity_is_reported() {
        // at w = 2^24 rad/s the passive loop reactance cancels exactly:
        // w L2 = 1/(w C2) = 16384, so the passive row is identically zero
        let coils = vec![
            CoilCircuit::new(2f64.powi(-9), 2f64.powi(-40), 0.0),
            CoilCircuit::new(2f64.powi(-10), 2f64.powi(-38), 0.0),
        ];
        let model =
            validate_array(ArrayModel::new(coils, CouplingMatrix::uniform(2, 0.5))).unwrap();
        let omega = 2f64.powi(24);
        assert_eq!(
            solve_at(&model, 0, omega),
            Err(Error::SingularAtFrequency { omega })
        );
    }

    #[test]
    fn sweep_flags_singular_grid_points() {
        // 2 pi * 2670176.857720436 rounds to exactly 2^24 rad/s
        let singular_f_hz = 2_670_176.857_720_436;
        assert_eq!(TAU * singular_f_hz, 2f64.powi(24));
        let coils = vec![
            CoilCircuit::new(2f64.powi(-9), 2f64.powi(-40), 0.0),
            CoilCircuit::new(2f64.powi(-10), 2f64.powi(-38), 0.0),
        ];
        let model =
            validate_array(ArrayModel::new(coils, CouplingMatrix::uniform(2, 0.5))).unwrap();
        let grid = FrequencyGrid::linear(singular_f_hz, 2.0 * singular_f_hz, 3).unwrap();
        let result = sweep(&model, &DriveSpec { driven: 0, grid }).unwrap();
        assert_eq!(result.singular_points(), &[0]);
        assert!(result.input_impedance()[0].re.is_nan());
        assert!(result.input_impedance()[1].is_finite());
    }

    #[test]
    fn uncoupled_sweep_leaves_passive_elements_silent() {
        let coils = vec![CoilCircuit::new(L, C, 10.0); 3];
        let model = validate_array(ArrayModel::new(coils, CouplingMatrix::identity(3))).unwrap();
        let grid = FrequencyGrid::linear(3.0e6, 5.0e6, 41).unwrap();
        let result = sweep(&model, &DriveSpec { driven: 1, grid }).unwrap();
        assert!(result.singular_points().is_empty());
        for point in 0..41 {
            for element in [0, 2] {
                assert_eq!(
                    result.element_voltages()[(element, point)],
                    Complex64::new(0.0, 0.0)
                );
                assert_eq!(
                    result.element_currents()[(element, point)],
                    Complex64::new(0.0, 0.0)
                );
            }
            // driven column carries the tank impedance
            assert_relative_eq!(
                result.element_voltages()[(1, point)].re,
                result.input_impedance()[point].re,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn single_coil_peak_sits_at_natural_frequency() {
        let model = single(1.0);
        let f0 = CoilCircuit::new(L, C, 1.0).natural_frequency_hz();
        let grid = FrequencyGrid::linear(f0 * 0.97, f0 * 1.03, 601).unwrap();
        let result = sweep(&model, &DriveSpec { driven: 0, grid }).unwrap();
        let mags = result.magnitudes();
        let argmax = (0..mags.len())
            .max_by(|&a, &b| mags[a].total_cmp(&mags[b]))
            .unwrap();
        let step = result.frequencies_hz()[1] - result.frequencies_hz()[0];
        assert!((result.frequencies_hz()[argmax] - f0).abs() <= step);
    }

    #[test]
    fn drive_index_is_checked() {
        let model = single(1.0);
        assert!(matches!(
            solve_at(&model, 1, 1e7),
            Err(Error::InvalidDriveIndex { index: 1, coils: 1 })
        ));
    }
}
