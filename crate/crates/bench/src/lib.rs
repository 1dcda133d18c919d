//! Model builders shared by the benchmarks.

use overcoupled::{
    build_linear_chain, validate_array, CoilCircuit, ValidatedArray, NEAREST_NEIGHBOR_ONLY,
};

/// Identical-coil nearest-neighbour chain used across the benchmarks.
pub fn chain(n: usize, resistance: f64) -> ValidatedArray {
    let coil = CoilCircuit::new(10e-6, 150e-12, resistance);
    validate_array(build_linear_chain(vec![coil; n], 0.14, NEAREST_NEIGHBOR_ONLY).unwrap()).unwrap()
}
