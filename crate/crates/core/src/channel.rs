//! Quantum operations: completely positive, trace-nonincreasing maps in
//! Kraus form, with Choi-matrix and superoperator views.
//!
//! Vectorization is row-stacking throughout, so the superoperator of
//! `rho -> sum_i K_i rho K_i†` is `sum_i K_i (x) conj(K_i)` and the Choi
//! matrix is the reshuffle `C[(a,i),(b,j)] = S[(a,b),(i,j)]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{tensor, ComplexMatrix};

/// Tolerance for the trace-nonincreasing and complete-positivity
/// invariants enforced at construction.
pub const OPERATION_TOL: f64 = 1e-9;

/// Choi eigenvalues above this threshold contribute a Kraus operator when
/// an operation is rebuilt from its Choi matrix.
pub const KRAUS_RECOVERY_TOL: f64 = 1e-10;

/// Condition estimates at or above this value make an intermediate map
/// indeterminate instead of guessing a pseudo-inverse branch.
pub const CONDITION_LIMIT: f64 = 1e12;

/// A quantum operation on a `dim`-dimensional system, stored as a
/// nonempty Kraus set of `dim x dim` matrices.
#[derive(Debug, Clone)]
pub struct QuantumOperation {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumOperation {
    /// Builds an operation, enforcing the trace-nonincreasing invariant
    /// `sum K†K <= I` at tolerance 1e-9. Complete positivity is automatic
    /// for an explicit Kraus set.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let op = Self::from_kraus_unchecked(kraus);
        let (ok, max_eig) = op.is_trace_nonincreasing(OPERATION_TOL)?;
        if !ok {
            return Err(Error::NotTraceNonincreasing {
                max_eigenvalue: max_eig,
            });
        }
        Ok(op)
    }

    /// Builds an operation without validating the trace-nonincreasing
    /// invariant. Intended for divisibility analysis, which must observe
    /// invalid intermediate maps rather than fail on them.
    pub fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Self {
        assert!(!kraus.is_empty(), "Kraus set must be nonempty");
        let dim = kraus[0].dim();
        for k in &kraus {
            assert_eq!(k.dim(), dim, "all Kraus operators must share one dimension");
        }
        Self { dim, kraus }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_kraus_unchecked(vec![ComplexMatrix::identity(dim)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `sum_i K_i rho K_i†`; the output is subnormalized in general.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: rho.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim);
        for k in &self.kraus {
            out = out.add(&k.matmul(rho).matmul(&k.adjoint()));
        }
        Ok(out)
    }

    /// Probability that the operation succeeds on `rho`: tr(apply(rho)).
    pub fn success_probability(&self, rho: &ComplexMatrix) -> Result<f64> {
        Ok(self.apply(rho)?.trace().re)
    }

    /// Dual map applied to the identity: `sum_i K_i† K_i`.
    pub fn dual_on_identity(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for k in &self.kraus {
            out = out.add(&k.adjoint().matmul(k));
        }
        out.hermitize()
    }

    /// Whether `lambda_max(sum K†K) <= 1 + tol`, together with the
    /// eigenvalue itself.
    pub fn is_trace_nonincreasing(&self, tol: f64) -> Result<(bool, f64)> {
        let (vals, _) = self.dual_on_identity().hermitian_eig()?;
        let max = vals[0];
        Ok((max <= 1.0 + tol, max))
    }

    /// Choi matrix `sum_ij op[|i><j|] (x) |i><j|`.
    pub fn choi(&self) -> ChoiMatrix {
        let d2 = self.dim * self.dim;
        let mut m = ComplexMatrix::zeros(d2);
        for k in &self.kraus {
            // rank-one contribution from the row-major flattening of K
            for r in 0..d2 {
                let kr = k.get(r / self.dim, r % self.dim);
                if kr.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..d2 {
                    let v = m.get(r, c) + kr * k.get(c / self.dim, c % self.dim).conj();
                    m.set(r, c, v);
                }
            }
        }
        ChoiMatrix {
            matrix: m,
            dim: self.dim,
        }
    }

    /// Whether the Choi matrix is PSD at `-tol`, with its min eigenvalue.
    pub fn is_cp(&self, tol: f64) -> Result<(bool, f64)> {
        let min = self.choi().min_eigenvalue()?;
        Ok((min >= -tol, min))
    }

    /// Row-stacking superoperator `sum_i K_i (x) conj(K_i)`.
    pub fn to_superoperator(&self) -> ComplexMatrix {
        let d2 = self.dim * self.dim;
        let mut s = ComplexMatrix::zeros(d2);
        for k in &self.kraus {
            s = s.add(&tensor(k, &k.conjugate()));
        }
        s
    }

    /// Rebuilds an operation from a Choi matrix, keeping eigenpairs with
    /// eigenvalue above 1e-10 and enforcing the construction invariants.
    pub fn from_choi(choi: &ChoiMatrix) -> Result<Self> {
        Self::from_choi_with_threshold(choi, KRAUS_RECOVERY_TOL)
    }

    /// Like [`Self::from_choi`] with the recovery threshold scaled to the
    /// largest Choi eigenvalue. Required for deeply decayed snapshots of a
    /// dynamical map, whose overall scale sits far below one: an absolute
    /// threshold would truncate genuine Kraus content there.
    pub fn from_choi_relative(choi: &ChoiMatrix, rel_tol: f64) -> Result<Self> {
        let (vals, _) = choi.matrix.hermitize().hermitian_eig()?;
        Self::from_choi_with_threshold(choi, rel_tol * vals[0].max(0.0))
    }

    fn from_choi_with_threshold(choi: &ChoiMatrix, threshold: f64) -> Result<Self> {
        let min = choi.min_eigenvalue()?;
        if min < -OPERATION_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Self::new(kraus_from_choi_with_threshold(choi, threshold)?)
    }

    /// Composition `second . first` (apply `first`, then `second`).
    pub fn compose(second: &Self, first: &Self) -> Result<Self> {
        if second.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: second.dim,
                actual: first.dim,
            });
        }
        let mut kraus = Vec::with_capacity(second.kraus.len() * first.kraus.len());
        for k2 in &second.kraus {
            for k1 in &first.kraus {
                kraus.push(k2.matmul(k1));
            }
        }
        Ok(Self::from_kraus_unchecked(kraus))
    }

    /// The operation acting on the first factor of a system-ancilla pair,
    /// with Kraus set `{K (x) I_d}`.
    pub fn tensor_with_identity(&self, d_ancilla: usize) -> Self {
        let id = ComplexMatrix::identity(d_ancilla);
        Self::from_kraus_unchecked(self.kraus.iter().map(|k| tensor(k, &id)).collect())
    }
}

/// Choi matrix of a `dim -> dim` operation; a `dim^2`-dimensional
/// Hermitian matrix, PSD exactly when the map is completely positive.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    dim: usize,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = self.matrix.hermitize().hermitian_eig()?;
        Ok(*vals.last().unwrap())
    }
}

/// Reshuffles a row-stacking superoperator into the matching Choi matrix.
pub fn superoperator_to_choi(s: &ComplexMatrix, dim: usize) -> Result<ChoiMatrix> {
    if s.dim() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            actual: s.dim(),
        });
    }
    let matrix = ComplexMatrix::from_fn(dim * dim, |r, c| {
        let (a, i) = (r / dim, r % dim);
        let (b, j) = (c / dim, c % dim);
        s.get(a * dim + b, i * dim + j)
    });
    Ok(ChoiMatrix { matrix, dim })
}

/// Kraus operators from the spectral decomposition of a Choi matrix,
/// keeping eigenpairs with eigenvalue above 1e-10.
pub fn kraus_from_choi(choi: &ChoiMatrix) -> Result<Vec<ComplexMatrix>> {
    kraus_from_choi_with_threshold(choi, KRAUS_RECOVERY_TOL)
}

/// Kraus operators from the spectral decomposition of a Choi matrix with
/// an explicit eigenvalue threshold.
pub fn kraus_from_choi_with_threshold(
    choi: &ChoiMatrix,
    threshold: f64,
) -> Result<Vec<ComplexMatrix>> {
    let d = choi.dim;
    let (vals, vecs) = choi.matrix.hermitize().hermitian_eig()?;
    let mut kraus = Vec::new();
    for (idx, &val) in vals.iter().enumerate() {
        if val <= threshold {
            continue;
        }
        let scale = val.sqrt();
        kraus.push(ComplexMatrix::from_fn(d, |a, i| {
            vecs.get(a * d + i, idx) * scale
        }));
    }
    if kraus.is_empty() {
        // zero map: keep a single zero Kraus operator so the set stays nonempty
        kraus.push(ComplexMatrix::zeros(d));
    }
    Ok(kraus)
}

/// Outcome of reconstructing the map that bridges two snapshots of a
/// dynamical map.
#[derive(Debug, Clone)]
pub enum IntermediateResult {
    /// The bridge is a valid quantum operation.
    Operation(QuantumOperation),
    /// The bridge exists as a linear map but violates complete positivity
    /// or the trace-nonincreasing property; both margins are reported.
    NotAnOperation {
        min_choi_eigenvalue: f64,
        max_dual_eigenvalue: f64,
    },
    /// The earlier map is too ill-conditioned to invert reliably.
    Indeterminate { condition: f64 },
}

/// Reconstructs `theta` with `later = theta . earlier` by superoperator
/// division, then tests it for complete positivity and the
/// trace-nonincreasing property at tolerance `tol`.
pub fn intermediate_map(
    later: &QuantumOperation,
    earlier: &QuantumOperation,
    tol: f64,
) -> Result<IntermediateResult> {
    if later.dim() != earlier.dim() {
        return Err(Error::DimensionMismatch {
            expected: earlier.dim(),
            actual: later.dim(),
        });
    }
    let dim = earlier.dim();
    let s1 = earlier.to_superoperator();
    let s2 = later.to_superoperator();

    let condition = condition_estimate(&s1)?;
    if !condition.is_finite() || condition >= CONDITION_LIMIT {
        return Ok(IntermediateResult::Indeterminate { condition });
    }

    let s_theta = s2.matmul(&s1.inverse()?);
    let choi = superoperator_to_choi(&s_theta, dim)?;
    let min_choi = choi.min_eigenvalue()?;

    // dual on identity straight from the superoperator so the report is
    // available even when complete positivity fails
    let dual = apply_superoperator(&s_theta.adjoint(), &ComplexMatrix::identity(dim)).hermitize();
    let (dual_vals, _) = dual.hermitian_eig()?;
    let max_dual = dual_vals[0];

    if min_choi < -tol || max_dual > 1.0 + tol {
        return Ok(IntermediateResult::NotAnOperation {
            min_choi_eigenvalue: min_choi,
            max_dual_eigenvalue: max_dual,
        });
    }
    let kraus = kraus_from_choi(&choi)?;
    Ok(IntermediateResult::Operation(
        QuantumOperation::from_kraus_unchecked(kraus),
    ))
}

/// Ratio of the largest to smallest singular value of `s`, from the
/// Hermitian eigenvalues of `s† s`. Infinite when `s` is singular to
/// working precision.
pub fn condition_estimate(s: &ComplexMatrix) -> Result<f64> {
    let gram = s.adjoint().matmul(s).hermitize();
    let (vals, _) = gram.hermitian_eig()?;
    let max = vals[0].max(0.0);
    let min = *vals.last().unwrap();
    if min <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((max / min).sqrt())
}

/// Applies a row-stacking superoperator to a matrix.
pub fn apply_superoperator(s: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.dim();
    assert_eq!(s.dim(), d * d, "superoperator dimension mismatch");
    let mut out = ComplexMatrix::zeros(d);
    for r in 0..d * d {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..d * d {
            acc += s.get(r, c) * x.get(c / d, c % d);
        }
        out.set(r / d, r % d, acc);
    }
    out
}

/// Normalizes a subnormalized state: `rho / tr(rho)`. Fails when the
/// trace is not positive, i.e. the conditioning outcome never occurs.
pub fn normalize_conditional(rho_sub: &ComplexMatrix) -> Result<ComplexMatrix> {
    let trace = rho_sub.trace().re;
    if trace <= 1e-12 {
        return Err(Error::PostselectionImpossible { trace });
    }
    Ok(rho_sub.scale_real(1.0 / trace))
}
