//! Two-qubit entanglement analysis of postselected system-ancilla states:
//! concurrence, the closed form it takes under pure losses, the positive
//! partial transpose criterion, pure-state Schmidt rank, and the
//! death/revival witness.

use crate::channel::{normalize_conditional, QuantumOperation};
use crate::error::{Error, Result};
use crate::linalg::{partial_transpose_b, pauli_y, tensor, ComplexMatrix, StateVector, RANK_TOL};
use crate::pdl::PdlParams;

/// Default concurrence level below which entanglement counts as dead.
pub const ZERO_THRESHOLD: f64 = 1e-9;

/// Wootters concurrence of a two-qubit state: `max(0, mu1 - mu2 - mu3 - mu4)`
/// where the `mu_i` are the descending square roots of the eigenvalues of
/// `sqrt(rho) (sigma_y (x) sigma_y) conj(rho) (sigma_y (x) sigma_y) sqrt(rho)`,
/// conjugation taken in the |H>,|V> product basis. The whole pipeline runs
/// on Hermitian eigendecompositions; eigenvalues below the rank tolerance
/// are treated as exact zeros.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "concurrence expects a unit-trace state, got trace {trace}"
        )));
    }
    let (vals, vecs) = rho.hermitian_eig()?;
    let min = *vals.last().unwrap();
    if min < -1e-9 {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    // clamp rounding-level negatives before taking the square root
    let clamped: Vec<f64> = vals.iter().map(|&l| l.max(0.0)).collect();
    let rho_psd = vecs
        .matmul(&ComplexMatrix::diag_real(&clamped))
        .matmul(&vecs.adjoint())
        .hermitize();
    let sqrt_rho = rho_psd.psd_sqrt()?;

    let yy = tensor(&pauli_y(), &pauli_y());
    let flipped = yy.matmul(&rho_psd.conjugate()).matmul(&yy);
    let m = sqrt_rho.matmul(&flipped).matmul(&sqrt_rho).hermitize();
    let (m_vals, _) = m.hermitian_eig()?;

    let mu: Vec<f64> = m_vals
        .iter()
        .map(|&l| {
            if l.abs() < RANK_TOL {
                0.0
            } else {
                l.max(0.0).sqrt()
            }
        })
        .collect();
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

/// Concurrence of the postselected state under pure losses:
/// `2 sqrt(p_H p_V) / (p_H + p_V)
///  = sqrt((gamma^2 cos^2(omega t) + omega^2) / (gamma^2 + omega^2))`.
pub fn concurrence_closed_form(params: &PdlParams, t: f64) -> f64 {
    let (g, w) = (params.gamma(), params.omega());
    ((g * g * (w * t).cos().powi(2) + w * w) / (g * g + w * w)).sqrt()
}

/// Applies `op (x) Id` to a system-ancilla state and renormalizes.
pub fn postselected_state(op: &QuantumOperation, rho_sa: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lifted = op.tensor_with_identity(2);
    normalize_conditional(&lifted.apply(rho_sa)?)
}

/// Normalizes a trajectory state by its raw trace.
///
/// Unlike [`normalize_conditional`] there is no absolute floor on the
/// trace: deep in the decay the success probability drops below any fixed
/// gate while the state itself stays well conditioned, because every
/// entry carries the same overall decay factor. Fails only when the trace
/// is not strictly positive.
pub fn normalize_trajectory_state(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let trace = rho.trace().re;
    if !trace.is_finite() || trace <= 0.0 {
        return Err(Error::PostselectionImpossible { trace });
    }
    Ok(rho.scale_real(1.0 / trace))
}

/// Concurrence of the normalized state at every trajectory sample,
/// scanned for death and revival at the given threshold.
pub fn concurrence_series(
    trajectory: &[(f64, ComplexMatrix)],
    zero_threshold: f64,
) -> Result<ConcurrenceSeries> {
    let mut times = Vec::with_capacity(trajectory.len());
    let mut values = Vec::with_capacity(trajectory.len());
    for (t, state) in trajectory {
        let rho = normalize_trajectory_state(state)?;
        times.push(*t);
        values.push(concurrence(&rho)?);
    }
    Ok(death_revival(&times, &values, zero_threshold))
}

/// Positive-partial-transpose check: separable exactly when the partial
/// transpose stays PSD. For two qubits PPT is equivalent to separability
/// (Horodecki criterion). Returns the flag and the minimal eigenvalue.
pub fn is_ppt_separable(rho: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let pt = partial_transpose_b(rho, (2, 2))?;
    let (vals, _) = pt.hermitian_eig()?;
    let min = *vals.last().unwrap();
    Ok((min >= -tol, min))
}

/// Schmidt rank of a two-qubit pure state: the number of singular values
/// of the 2x2 amplitude matrix above `tol` times the largest one.
pub fn schmidt_rank_pure(psi: &StateVector, tol: f64) -> Result<usize> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: psi.dim(),
        });
    }
    let amp = ComplexMatrix::from_fn(2, |i, j| psi.amplitude(i * 2 + j));
    let gram = amp.adjoint().matmul(&amp).hermitize();
    let (vals, _) = gram.hermitian_eig()?;
    let singulars: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let largest = singulars[0];
    Ok(singulars.iter().filter(|&&s| s > tol * largest).count())
}

/// Concurrence samples over a grid with the death/revival verdict.
#[derive(Debug, Clone)]
pub struct ConcurrenceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub zero_threshold: f64,
    /// First grid time at which the concurrence drops below the threshold.
    pub death_time: Option<f64>,
    /// Whether any later sample climbs back to the threshold or above.
    pub revival_detected: bool,
}

impl ConcurrenceSeries {
    /// Death followed by revival witnesses that the underlying dynamics
    /// cannot be divisible into valid operations.
    pub fn indicates_indivisibility(&self) -> bool {
        self.death_time.is_some() && self.revival_detected
    }
}

/// Scans a concurrence series for entanglement death and revival.
pub fn death_revival(times: &[f64], values: &[f64], zero_threshold: f64) -> ConcurrenceSeries {
    assert_eq!(times.len(), values.len(), "times and values must align");
    let mut death_time = None;
    let mut death_index = None;
    for (k, &v) in values.iter().enumerate() {
        if v < zero_threshold {
            death_time = Some(times[k]);
            death_index = Some(k);
            break;
        }
    }
    let revival_detected = match death_index {
        Some(k) => values[k + 1..].iter().any(|&v| v >= zero_threshold),
        None => false,
    };
    ConcurrenceSeries {
        times: times.to_vec(),
        values: values.to_vec(),
        zero_threshold,
        death_time,
        revival_detected,
    }
}
