//! Trace-decreasing quantum dynamical maps at desk scale.
//!
//! Postselected experiments are described by quantum operations: completely
//! positive maps that may shrink the trace, with the trace itself being the
//! success probability of the conditioning outcome. This crate provides
//!
//! * a self-contained dense complex linear algebra kernel ([`linalg`]),
//! * quantum operations with Kraus, Choi and superoperator views and
//!   reconstruction of the bridging map between two snapshots of a
//!   dynamical map ([`channel`]),
//! * polarization-dependent-loss dynamics, in closed form and through a
//!   fixed-step RK4 integrator ([`pdl`]),
//! * information-flow indicators over time grids, including the corrected
//!   discrimination probability and the divisibility verdict ([`flow`]),
//! * two-qubit entanglement analysis of postselected states
//!   ([`entanglement`]),
//! * the generalized erasure lift that turns any trace-decreasing
//!   operation into a trace-preserving channel ([`erasure`]).
//!
//! All values are immutable after construction and every function is a pure
//! function of its inputs, so the whole API is safe to use concurrently.

pub mod channel;
pub mod entanglement;
pub mod erasure;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod pdl;

pub use error::{Error, Result};
