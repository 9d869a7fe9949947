//! Generalized erasure lift: a trace-decreasing operation on a
//! d-dimensional system becomes a trace-preserving channel on d+1
//! dimensions, with the failure probability routed into an orthogonal
//! erasure flag state.

use num_complex::Complex64;

use crate::channel::{QuantumOperation, OPERATION_TOL};
use crate::error::{Error, Result};
use crate::flow::success_prob_distinguish_states;
use crate::linalg::ComplexMatrix;

/// A trace-decreasing operation together with its trace-preserving lift.
///
/// The lift acts block-diagonally: the d-block evolves under the inner
/// operation, the flag entry accumulates the trace deficit, and
/// system-flag coherences are sent to zero (the block form of the lift
/// leaves them unconstrained; the Kraus construction below is the minimal
/// faithful choice).
#[derive(Debug, Clone)]
pub struct ErasureLiftedChannel {
    inner: QuantumOperation,
    lifted: QuantumOperation,
    flag_index: usize,
}

impl ErasureLiftedChannel {
    pub fn inner(&self) -> &QuantumOperation {
        &self.inner
    }

    pub fn lifted(&self) -> &QuantumOperation {
        &self.lifted
    }

    /// Basis index of the erasure flag state |e>.
    pub fn flag_index(&self) -> usize {
        self.flag_index
    }

    /// Embeds a d-dimensional state into the lifted space with zero flag
    /// population.
    pub fn pad_state(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.inner.dim();
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: rho.dim(),
            });
        }
        Ok(ComplexMatrix::from_fn(d + 1, |i, j| {
            if i < d && j < d {
                rho.get(i, j)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }
}

/// Probability that the operation fails on `rho`. Both routes,
/// `1 - tr(op[rho])` and `tr((I - op†[I]) rho)`, are evaluated and must
/// agree to 1e-10.
pub fn failure_probability(op: &QuantumOperation, rho: &ComplexMatrix) -> Result<f64> {
    let via_output = 1.0 - op.success_probability(rho)?;
    let deficit = ComplexMatrix::identity(op.dim()).sub(&op.dual_on_identity());
    let via_dual = deficit.matmul(rho).trace().re;
    assert!(
        (via_output - via_dual).abs() < 1e-10,
        "failure probability routes disagree: {via_output} vs {via_dual}"
    );
    Ok(via_output)
}

/// Kraus set of the lift of `op`: every inner Kraus operator embedded
/// into the d+1 space, one flag-inflow operator `sqrt(nu) |e><m|` per
/// eigenpair of `I - op†[I]` with eigenvalue above 1e-12, and `|e><e|`
/// so the flag is absorbing.
fn lifted_kraus(op: &QuantumOperation) -> Result<Vec<ComplexMatrix>> {
    let d = op.dim();
    let mut kraus = Vec::with_capacity(op.kraus().len() + d + 1);
    for k in op.kraus() {
        kraus.push(ComplexMatrix::from_fn(d + 1, |i, j| {
            if i < d && j < d {
                k.get(i, j)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }));
    }

    let deficit = ComplexMatrix::identity(d).sub(&op.dual_on_identity());
    let (vals, vecs) = deficit.hermitian_eig()?;
    for (idx, &nu) in vals.iter().enumerate() {
        if nu <= 1e-12 {
            continue;
        }
        let scale = nu.sqrt();
        let mut k = ComplexMatrix::zeros(d + 1);
        for j in 0..d {
            k.set(d, j, vecs.get(j, idx).conj() * scale);
        }
        kraus.push(k);
    }

    let mut flag = ComplexMatrix::zeros(d + 1);
    flag.set(d, d, Complex64::new(1.0, 0.0));
    kraus.push(flag);
    Ok(kraus)
}

/// Lifts a valid trace-decreasing operation to its trace-preserving
/// erasure channel.
pub fn lift(op: &QuantumOperation) -> Result<ErasureLiftedChannel> {
    let (tni_ok, max_eig) = op.is_trace_nonincreasing(OPERATION_TOL)?;
    if !tni_ok {
        return Err(Error::NotTraceNonincreasing {
            max_eigenvalue: max_eig,
        });
    }
    let lifted = QuantumOperation::from_kraus_unchecked(lifted_kraus(op)?);
    Ok(ErasureLiftedChannel {
        inner: op.clone(),
        lifted,
        flag_index: op.dim(),
    })
}

/// Lifts a bridging operation so that the lifted dynamics stays divisible:
/// the d-block evolves under `theta`, the flag keeps its population and
/// absorbs the new trace deficit.
pub fn lift_intermediate(theta: &QuantumOperation) -> Result<QuantumOperation> {
    let (tni_ok, max_eig) = theta.is_trace_nonincreasing(OPERATION_TOL)?;
    if !tni_ok {
        return Err(Error::NotTraceNonincreasing {
            max_eigenvalue: max_eig,
        });
    }
    Ok(QuantumOperation::from_kraus_unchecked(lifted_kraus(theta)?))
}

/// Gain in discrimination success probability from keeping the erasure
/// record: `1/2 + 1/4 || lift[rho1] - lift[rho2] ||_1` minus the corrected
/// success probability of the postselected scenario. Algebraically equal
/// to `1/2 (1 - min_i tr(op[rho_i]))`.
pub fn distinguishability_gain(
    op: &QuantumOperation,
    rho1: &ComplexMatrix,
    rho2: &ComplexMatrix,
) -> Result<f64> {
    let channel = lift(op)?;
    let lifted_out1 = channel.lifted().apply(&channel.pad_state(rho1)?)?;
    let lifted_out2 = channel.lifted().apply(&channel.pad_state(rho2)?)?;
    let lifted_success = 0.5 + 0.25 * lifted_out1.sub(&lifted_out2).trace_norm_hermitian()?;

    let out1 = op.apply(rho1)?;
    let out2 = op.apply(rho2)?;
    let postselected_success = success_prob_distinguish_states(&out1, &out2)?;
    Ok(lifted_success - postselected_success)
}
