//! Eigenmode analysis of the coupled lossless array.
//!
//! The array resonates where the characteristic matrix
//! `Omega K^{-1} Omega` (with `Omega` the diagonal matrix of natural
//! angular frequencies and `K` the coupling matrix) has an eigenvalue equal
//! to the squared angular frequency. The matching eigenvector holds the
//! relative voltage amplitude on every element: an entry of zero marks a
//! node, an element from which that mode can be neither driven nor seen.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVectorViewMut};

use crate::error::{Error, Result};
use crate::model::ValidatedArray;

/// Components below this fraction of the largest one count as nodes.
pub const DEFAULT_NODE_TOLERANCE: f64 = 1e-6;

/// Relative eigenvalue gap below which two modes count as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Required agreement between the two characteristic-matrix routes.
const ROUTE_AGREEMENT: f64 = 1e-10;

/// Components below this carry no usable sign information.
const SIGN_TOLERANCE: f64 = 1e-9;

/// Resonant frequencies and voltage mode shapes of a validated array.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    frequencies_hz: Vec<f64>,
    mode_shapes: DMatrix<f64>,
    degeneracy_groups: Vec<Vec<usize>>,
}

impl ModeSet {
    /// Mode frequencies in hertz, ascending.
    pub fn frequencies_hz(&self) -> &[f64] {
        &self.frequencies_hz
    }

    /// Column i is the voltage shape of mode i, scaled so its
    /// largest-magnitude component is +1 (ties oriented so the first
    /// significant component is positive).
    pub fn mode_shapes(&self) -> &DMatrix<f64> {
        &self.mode_shapes
    }

    /// Mode indices partitioned by equal eigenvalue.
    pub fn degeneracy_groups(&self) -> &[Vec<usize>] {
        &self.degeneracy_groups
    }

    /// Number of modes (= number of array elements).
    pub fn len(&self) -> usize {
        self.frequencies_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies_hz.is_empty()
    }
}

/// Per-mode node sets and the drive positions each mode is observable from.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeClassification {
    nodes: Vec<Vec<usize>>,
    visible_from: Vec<Vec<usize>>,
}

impl ModeClassification {
    /// Element indices with near-zero amplitude in mode `mode`.
    pub fn nodes(&self, mode: usize) -> &[usize] {
        &self.nodes[mode]
    }

    /// Element indices from which mode `mode` is observable (the complement
    /// of its node set).
    pub fn visible_from(&self, mode: usize) -> &[usize] {
        &self.visible_from[mode]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Characteristic matrix in (rad/s)^2, symmetric positive-definite.
///
/// Computed as `Omega K^{-1} Omega` and cross-checked against the
/// algebraically equal route `(Csqrt M Csqrt)^{-1}` (with `Csqrt` the
/// diagonal of sqrt(C_n) and `M` the mutual-inductance matrix); the two must
/// agree to within 1e-10 relative.
pub fn characteristic_matrix(model: &ValidatedArray) -> Result<DMatrix<f64>> {
    let n = model.len();
    let k_inv = model
        .coupling()
        .entries()
        .clone()
        .cholesky()
        .ok_or(Error::SingularCoupling)?
        .inverse();
    let w = model.natural_angular_frequencies();
    let mut a = DMatrix::from_fn(n, n, |i, j| w[i] * k_inv[(i, j)] * w[j]);

    let m = model.mutual_inductance_matrix();
    let c_sqrt: Vec<f64> = model.coils().iter().map(|c| c.capacitance.sqrt()).collect();
    let cmc = DMatrix::from_fn(n, n, |i, j| c_sqrt[i] * m[(i, j)] * c_sqrt[j]);
    let b = cmc.cholesky().ok_or(Error::SingularCoupling)?.inverse();

    let relative = (&a - &b).norm() / a.norm();
    if !(relative <= ROUTE_AGREEMENT) {
        return Err(Error::FormulationMismatch { relative });
    }

    // exact symmetry for the eigensolver
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    Ok(a)
}

/// Solves the characteristic eigenproblem: frequencies ascending, shapes
/// normalized, degenerate subspaces re-orthogonalized.
pub fn solve_modes(model: &ValidatedArray) -> Result<ModeSet> {
    let n = model.len();
    let se = nalgebra::SymmetricEigen::new(characteristic_matrix(model)?);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    if eigenvalues[0] <= 0.0 {
        return Err(Error::SingularCoupling);
    }

    let mut mode_shapes = DMatrix::zeros(n, n);
    for (column, &source) in order.iter().enumerate() {
        mode_shapes.set_column(column, &se.eigenvectors.column(source));
    }

    let degeneracy_groups = group_degenerate(&eigenvalues);
    for group in &degeneracy_groups {
        if group.len() > 1 {
            orthogonalize_columns(&mut mode_shapes, group);
        }
    }
    for column in 0..n {
        normalize_mode(mode_shapes.column_mut(column));
    }

    Ok(ModeSet {
        frequencies_hz: eigenvalues.iter().map(|l| l.sqrt() / TAU).collect(),
        mode_shapes,
        degeneracy_groups,
    })
}

fn group_degenerate(sorted_eigenvalues: &[f64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..sorted_eigenvalues.len() {
        let gap = sorted_eigenvalues[i] - sorted_eigenvalues[i - 1];
        if gap < DEGENERACY_GAP * sorted_eigenvalues[i].abs() {
            groups.last_mut().unwrap().push(i);
        } else {
            groups.push(vec![i]);
        }
    }
    groups
}

/// Modified Gram-Schmidt within one degenerate subspace. The eigensolver
/// already returns near-orthogonal vectors; this removes the residual
/// cross-talk before sign normalization.
fn orthogonalize_columns(shapes: &mut DMatrix<f64>, group: &[usize]) {
    for (pos, &column) in group.iter().enumerate() {
        for &earlier in &group[..pos] {
            let projection = shapes.column(column).dot(&shapes.column(earlier));
            let basis = shapes.column(earlier).clone_owned();
            shapes.column_mut(column).axpy(-projection, &basis, 1.0);
        }
        let norm = shapes.column(column).norm();
        shapes.column_mut(column).unscale_mut(norm);
    }
}

/// Scales so the largest-magnitude component is exactly +1. When the
/// maximum is tied between +1 and -1 entries the vector is oriented so the
/// first significant component is positive.
fn normalize_mode(mut column: DVectorViewMut<f64>) {
    let mut index_max = 0;
    let mut value_max = 0.0;
    for (i, v) in column.iter().enumerate() {
        if v.abs() > value_max {
            value_max = v.abs();
            index_max = i;
        }
    }
    let scale = column[index_max];
    for v in column.iter_mut() {
        *v /= scale;
    }
    column[index_max] = 1.0;

    if let Some(first) = column.iter().copied().find(|v| v.abs() > SIGN_TOLERANCE) {
        if first < 0.0 && column.iter().any(|v| (v + 1.0).abs() <= SIGN_TOLERANCE) {
            for v in column.iter_mut() {
                *v = -*v;
            }
        }
    }
}

/// Marks nodes (components below `node_tolerance` times the mode maximum)
/// and the complementary visibility sets.
pub fn classify_modes(modes: &ModeSet, node_tolerance: f64) -> Result<ModeClassification> {
    if !(node_tolerance > 0.0 && node_tolerance <= 0.1) {
        return Err(Error::InvalidArgument(format!(
            "node tolerance must lie in (0, 0.1], got {node_tolerance}"
        )));
    }
    let n = modes.len();
    let mut nodes = Vec::with_capacity(n);
    let mut visible_from = Vec::with_capacity(n);
    for mode in 0..n {
        let column = modes.mode_shapes.column(mode);
        let max = column.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (mut node_set, mut visible_set) = (Vec::new(), Vec::new());
        for (element, v) in column.iter().enumerate() {
            if v.abs() < node_tolerance * max {
                node_set.push(element);
            } else {
                visible_set.push(element);
            }
        }
        nodes.push(node_set);
        visible_from.push(visible_set);
    }
    Ok(ModeClassification {
        nodes,
        visible_from,
    })
}

/// Number of distinct resonant peaks a sweep driven at `drive_index` can
/// show: degeneracy groups count once, and a group is invisible when the
/// drive element is a node of every mode in it.
pub fn predicted_peak_count(modes: &ModeSet, drive_index: usize) -> Result<usize> {
    let n = modes.len();
    if drive_index >= n {
        return Err(Error::InvalidDriveIndex {
            index: drive_index,
            coils: n,
        });
    }
    let count = modes
        .degeneracy_groups
        .iter()
        .filter(|group| {
            group
                .iter()
                .any(|&mode| modes.mode_shapes[(drive_index, mode)].abs() >= DEFAULT_NODE_TOLERANCE)
        })
        .count();
    Ok(count)
}
