//! Shared test oracles, deliberately independent of the library's own
//! solver paths: a cyclic Jacobi eigensolver for the eigen predictions, the
//! lossless determinant for split roots, and a golden-section maximizer for
//! closed-form peak locations.

// each test binary uses its own subset of these helpers; index loops are
// the clearest idiom for the rotation algebra
#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

/// Dense symmetric eigensolve by cyclic Jacobi rotations. Returns
/// eigenvalues ascending with the matching eigenvectors as columns.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= 1e-14 * frobenius(&a) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let (aip, aiq) = (a[i][p], a[i][q]);
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let (apj, aqj) = (a[p][j], a[q][j]);
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let (vip, viq) = (v[i][p], v[i][q]);
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row][col]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

fn frobenius(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .flat_map(|row| row.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Characteristic matrix built from scratch for the oracle: inverts the
/// coupling matrix by Gauss-Jordan elimination rather than a factorization.
pub fn oracle_characteristic(
    inductances: &[f64],
    capacitances: &[f64],
    k: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let n = inductances.len();
    let k_inv = gauss_jordan_inverse(k);
    let w: Vec<f64> = inductances
        .iter()
        .zip(capacitances)
        .map(|(l, c)| 1.0 / (l * c).sqrt())
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| w[i] * k_inv[i][j] * w[j]).collect())
        .collect()
}

pub fn gauss_jordan_inverse(matrix: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = matrix.len();
    let mut aug: Vec<Vec<f64>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs()))
            .unwrap();
        aug.swap(col, pivot_row);
        let pivot = aug[col][col];
        assert!(pivot.abs() > 1e-300, "oracle inverse hit a zero pivot");
        for x in aug[col].iter_mut() {
            *x /= pivot;
        }
        for row in 0..n {
            if row != col {
                let factor = aug[row][col];
                for j in 0..2 * n {
                    aug[row][j] -= factor * aug[col][j];
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// Determinant of the lossless all-series mesh matrix of a two-coil system
/// at angular frequency `omega`, normalized by its Frobenius norm squared.
/// Vanishes exactly at the split roots.
pub fn lossless_pair_det_residual(l1: f64, c1: f64, l2: f64, c2: f64, k: f64, omega: f64) -> f64 {
    let m = k * (l1 * l2).sqrt();
    let z11 = Complex64::new(0.0, omega * l1 - 1.0 / (omega * c1));
    let z22 = Complex64::new(0.0, omega * l2 - 1.0 / (omega * c2));
    let z12 = Complex64::new(0.0, omega * m);
    let det = z11 * z22 - z12 * z12;
    let norm_sq = z11.norm_sqr() + z22.norm_sqr() + 2.0 * z12.norm_sqr();
    det.norm() / norm_sq
}

/// Golden-section maximizer for smooth unimodal functions.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Closed-form tank impedance of a single series-R coil in parallel with a
/// capacitor, evaluated without the sweep solver.
pub fn single_tank_impedance(r: f64, l: f64, c: f64, omega: f64) -> Complex64 {
    let coil = Complex64::new(r, omega * l);
    (coil.inv() + Complex64::new(0.0, omega * c)).inv()
}
