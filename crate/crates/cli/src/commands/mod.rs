pub mod divisibility;
pub mod dynamics;
pub mod entanglement;
pub mod erasure;
pub mod naive_distance;
pub mod weighted_distance;

use num_complex::Complex64;
use tracedown::linalg::{ComplexMatrix, StateVector};

/// Density operator of the +45 degree polarization state.
pub fn plus_density() -> ComplexMatrix {
    StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
        .unwrap()
        .density()
}
