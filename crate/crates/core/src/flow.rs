//! Candidate information-flow quantities for trace-decreasing dynamics,
//! monotonicity scanning, and the divisibility verdict over a time grid.
//!
//! The naive conditional-state trace distance and its probability-weighted
//! variant can both grow under divisible dynamics; the corrected success
//! probability of the discrimination task cannot. All three are provided
//! so the mismatch can be demonstrated.

use crate::channel::{
    intermediate_map, normalize_conditional, IntermediateResult, QuantumOperation,
};
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::pdl::TimeGrid;

/// Default slack when scanning a series for increases.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

/// Conventional trace distance between the two conditional output states,
/// `1/2 || out1/tr(out1) - out2/tr(out2) ||_1`.
pub fn naive_trace_distance_states(out1: &ComplexMatrix, out2: &ComplexMatrix) -> Result<f64> {
    let n1 = normalize_conditional(out1)?;
    let n2 = normalize_conditional(out2)?;
    Ok(0.5 * n1.sub(&n2).trace_norm_hermitian()?)
}

/// Trace distance weighted by the conditional implementation
/// probabilities: `|| out1 - out2 ||_1 / (p1 + p2)`.
pub fn weighted_trace_distance_states(out1: &ComplexMatrix, out2: &ComplexMatrix) -> Result<f64> {
    let total = out1.trace().re + out2.trace().re;
    if total <= 1e-12 {
        return Err(crate::error::Error::PostselectionImpossible { trace: total });
    }
    Ok(out1.sub(out2).trace_norm_hermitian()? / total)
}

/// Success probability of discriminating the equiprobable inputs given
/// that the operation succeeded, computed through the conditional states:
/// `1/2 (1 + || q1 out1/tr(out1) - q2 out2/tr(out2) ||_1)` with
/// `q_i = p_i / (p1 + p2)`.
pub fn conditional_success_prob_states(out1: &ComplexMatrix, out2: &ComplexMatrix) -> Result<f64> {
    let (p1, p2) = (out1.trace().re, out2.trace().re);
    let total = p1 + p2;
    if total <= 1e-12 {
        return Err(crate::error::Error::PostselectionImpossible { trace: total });
    }
    let n1 = normalize_conditional(out1)?.scale_real(p1 / total);
    let n2 = normalize_conditional(out2)?.scale_real(p2 / total);
    Ok(0.5 * (1.0 + n1.sub(&n2).trace_norm_hermitian()?))
}

/// Corrected success probability of the discrimination task,
/// `1/4 (tr(out1) + tr(out2) + || out1 - out2 ||_1)`.
pub fn success_prob_distinguish_states(out1: &ComplexMatrix, out2: &ComplexMatrix) -> Result<f64> {
    Ok(0.25 * (out1.trace().re + out2.trace().re + out1.sub(out2).trace_norm_hermitian()?))
}

/// Naive conditional-state trace distance at time `t` of a dynamical map.
pub fn naive_trace_distance<F>(
    map_at: F,
    rho1: &ComplexMatrix,
    rho2: &ComplexMatrix,
    t: f64,
) -> Result<f64>
where
    F: Fn(f64) -> QuantumOperation,
{
    let op = map_at(t);
    naive_trace_distance_states(&op.apply(rho1)?, &op.apply(rho2)?)
}

/// Probability-weighted trace distance at time `t` of a dynamical map.
pub fn weighted_trace_distance<F>(
    map_at: F,
    rho1: &ComplexMatrix,
    rho2: &ComplexMatrix,
    t: f64,
) -> Result<f64>
where
    F: Fn(f64) -> QuantumOperation,
{
    let op = map_at(t);
    weighted_trace_distance_states(&op.apply(rho1)?, &op.apply(rho2)?)
}

/// Corrected discrimination success probability at time `t`.
pub fn success_prob_distinguish<F>(
    map_at: F,
    rho1: &ComplexMatrix,
    rho2: &ComplexMatrix,
    t: f64,
) -> Result<f64>
where
    F: Fn(f64) -> QuantumOperation,
{
    let op = map_at(t);
    success_prob_distinguish_states(&op.apply(rho1)?, &op.apply(rho2)?)
}

/// A pair of adjacent grid samples where the scanned quantity rose by
/// more than the slack.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub t_from: f64,
    pub t_to: f64,
    pub increase: f64,
}

/// Result of scanning a sampled quantity for increases.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub quantity: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub slack: f64,
    pub violations: Vec<Violation>,
}

impl MonotonicityReport {
    pub fn is_nonincreasing(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Records every adjacent pair with `value[k+1] > value[k] + slack`.
pub fn scan_monotonicity(
    quantity: &str,
    times: &[f64],
    values: &[f64],
    slack: f64,
) -> MonotonicityReport {
    assert_eq!(times.len(), values.len(), "times and values must align");
    let mut violations = Vec::new();
    for k in 0..values.len().saturating_sub(1) {
        let increase = values[k + 1] - values[k];
        if increase > slack {
            violations.push(Violation {
                t_from: times[k],
                t_to: times[k + 1],
                increase,
            });
        }
    }
    MonotonicityReport {
        quantity: quantity.to_string(),
        times: times.to_vec(),
        values: values.to_vec(),
        slack,
        violations,
    }
}

/// Per-interval outcome of the divisibility check.
#[derive(Debug, Clone)]
pub enum IntervalVerdict {
    Checked {
        t_from: f64,
        t_to: f64,
        cp_ok: bool,
        min_choi_eigenvalue: f64,
        tni_ok: bool,
        max_dual_eigenvalue: f64,
    },
    Indeterminate {
        t_from: f64,
        t_to: f64,
        condition: f64,
    },
}

impl IntervalVerdict {
    pub fn passes(&self) -> bool {
        matches!(
            self,
            IntervalVerdict::Checked {
                cp_ok: true,
                tni_ok: true,
                ..
            }
        )
    }
}

/// Overall divisibility verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CpDivisible,
    Indivisible,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::CpDivisible => write!(f, "CP-divisible"),
            Verdict::Indivisible => write!(f, "Indivisible"),
            Verdict::Indeterminate => write!(f, "Indeterminate"),
        }
    }
}

/// Divisibility analysis of a dynamical map over a grid: every adjacent
/// interval's bridging map is reconstructed and tested.
#[derive(Debug, Clone)]
pub struct DivisibilityReport {
    pub tol: f64,
    pub intervals: Vec<IntervalVerdict>,
    pub overall: Verdict,
}

/// Reconstructs the bridging map on every adjacent grid interval and
/// tests complete positivity and the trace-nonincreasing property at
/// tolerance `tol`. Adjacent intervals suffice: a composition of valid
/// operations is a valid operation.
pub fn divisibility_verdict<F>(map_at: F, grid: &TimeGrid, tol: f64) -> Result<DivisibilityReport>
where
    F: Fn(f64) -> QuantumOperation,
{
    let times = grid.times();
    let mut intervals = Vec::with_capacity(times.len() - 1);
    let mut any_failed = false;
    let mut any_indeterminate = false;

    let mut earlier = map_at(times[0]);
    for pair in times.windows(2) {
        let later = map_at(pair[1]);
        let verdict = match intermediate_map(&later, &earlier, tol)? {
            IntermediateResult::Operation(theta) => {
                let (cp_ok, min_choi) = theta.is_cp(tol)?;
                let (tni_ok, max_dual) = theta.is_trace_nonincreasing(tol)?;
                IntervalVerdict::Checked {
                    t_from: pair[0],
                    t_to: pair[1],
                    cp_ok,
                    min_choi_eigenvalue: min_choi,
                    tni_ok,
                    max_dual_eigenvalue: max_dual,
                }
            }
            IntermediateResult::NotAnOperation {
                min_choi_eigenvalue,
                max_dual_eigenvalue,
            } => IntervalVerdict::Checked {
                t_from: pair[0],
                t_to: pair[1],
                cp_ok: min_choi_eigenvalue >= -tol,
                min_choi_eigenvalue,
                tni_ok: max_dual_eigenvalue <= 1.0 + tol,
                max_dual_eigenvalue,
            },
            IntermediateResult::Indeterminate { condition } => IntervalVerdict::Indeterminate {
                t_from: pair[0],
                t_to: pair[1],
                condition,
            },
        };
        match &verdict {
            IntervalVerdict::Checked { cp_ok, tni_ok, .. } => {
                if !cp_ok || !tni_ok {
                    any_failed = true;
                }
            }
            IntervalVerdict::Indeterminate { .. } => any_indeterminate = true,
        }
        intervals.push(verdict);
        earlier = later;
    }

    let overall = if any_failed {
        Verdict::Indivisible
    } else if any_indeterminate {
        Verdict::Indeterminate
    } else {
        Verdict::CpDivisible
    };
    Ok(DivisibilityReport {
        tol,
        intervals,
        overall,
    })
}

/// Closed form of the naive conditional trace distance for the
/// constant-rate loss pair acting on |H><H| and the +45 degree state:
/// `(1 + exp((gamma_V - gamma_H) t))^(-1/2)`.
pub fn naive_distance_closed_form(gamma_h: f64, gamma_v: f64, t: f64) -> f64 {
    1.0 / (1.0 + ((gamma_v - gamma_h) * t).exp()).sqrt()
}

/// Closed form of the weighted trace distance for the same input pair:
/// `sqrt(1 - 8 exp(-2 gamma_H t) / (3 exp(-gamma_H t) + exp(-gamma_V t))^2)`.
pub fn weighted_distance_closed_form(gamma_h: f64, gamma_v: f64, t: f64) -> f64 {
    let a = (-gamma_h * t).exp();
    let b = (-gamma_v * t).exp();
    (1.0 - 8.0 * a * a / (3.0 * a + b).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{projector_h, StateVector};
    use crate::pdl::{constant_pdl_map, negative_rate_demo_map, pdl_map, MapTable, PdlParams};
    use num_complex::Complex64;

    fn plus_density() -> ComplexMatrix {
        StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap()
            .density()
    }

    #[test]
    fn naive_distance_matches_closed_form() {
        let (gh, gv) = (2.0, 1.0);
        let map = |t: f64| constant_pdl_map(gh, gv, t);
        for &t in &[0.0, 0.3, 1.0, 2.4] {
            let simulated = naive_trace_distance(map, &projector_h(), &plus_density(), t).unwrap();
            assert!((simulated - naive_distance_closed_form(gh, gv, t)).abs() < 1e-12);
        }
        let at_zero = naive_trace_distance(map, &projector_h(), &plus_density(), 0.0).unwrap();
        assert!((at_zero - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn naive_distance_constant_for_balanced_rates() {
        // gamma_H = gamma_V collapses the closed form to 1/sqrt(2)
        let map = |t: f64| constant_pdl_map(1.5, 1.5, t);
        for &t in &[0.0, 0.5, 1.0, 2.0] {
            let d = naive_trace_distance(map, &projector_h(), &plus_density(), t).unwrap();
            assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn naive_distance_zero_for_equal_inputs() {
        let map = |t: f64| constant_pdl_map(2.0, 1.0, t);
        let d = naive_trace_distance(map, &plus_density(), &plus_density(), 1.0).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn naive_distance_ignores_global_rescaling() {
        let map = |t: f64| constant_pdl_map(2.0, 1.0, t);
        for &c in &[1.0f64, 0.5, 0.01] {
            let scaled = |t: f64| {
                let base = constant_pdl_map(2.0, 1.0, t);
                QuantumOperation::from_kraus_unchecked(
                    base.kraus()
                        .iter()
                        .map(|k| k.scale_real(c.sqrt()))
                        .collect(),
                )
            };
            let d0 = naive_trace_distance(map, &projector_h(), &plus_density(), 0.8).unwrap();
            let d1 = naive_trace_distance(scaled, &projector_h(), &plus_density(), 0.8).unwrap();
            assert!((d0 - d1).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_distance_matches_closed_form() {
        let (gh, gv) = (2.0, 1.0);
        let map = |t: f64| constant_pdl_map(gh, gv, t);
        for &t in &[0.0, 0.25, 0.9, 2.0] {
            let simulated =
                weighted_trace_distance(map, &projector_h(), &plus_density(), t).unwrap();
            assert!((simulated - weighted_distance_closed_form(gh, gv, t)).abs() < 1e-12);
        }
        let at_zero = weighted_trace_distance(map, &projector_h(), &plus_density(), 0.0).unwrap();
        assert!((at_zero - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!(
            weighted_trace_distance(map, &plus_density(), &plus_density(), 1.3)
                .unwrap()
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn weighted_distance_times_total_probability_is_output_distance() {
        let map = |t: f64| constant_pdl_map(2.0, 1.0, t);
        let t = 0.7;
        let op = map(t);
        let out1 = op.apply(&projector_h()).unwrap();
        let out2 = op.apply(&plus_density()).unwrap();
        let total = out1.trace().re + out2.trace().re;
        let weighted = weighted_trace_distance_states(&out1, &out2).unwrap();
        let direct = out1.sub(&out2).trace_norm_hermitian().unwrap();
        assert!((weighted * total - direct).abs() < 1e-12);
    }

    #[test]
    fn conditional_success_probability_identity() {
        let map = |t: f64| constant_pdl_map(2.0, 1.0, t);
        for &t in &[0.1, 0.8, 1.9] {
            let op = map(t);
            let out1 = op.apply(&projector_h()).unwrap();
            let out2 = op.apply(&plus_density()).unwrap();
            let via_conditional = conditional_success_prob_states(&out1, &out2).unwrap();
            let weighted = weighted_trace_distance_states(&out1, &out2).unwrap();
            assert!((via_conditional - 0.5 * (1.0 + weighted)).abs() < 1e-12);
        }
    }

    #[test]
    fn corrected_probability_examples() {
        let id = |_: f64| QuantumOperation::identity(2);
        let v = success_prob_distinguish(id, &projector_h(), &plus_density(), 0.0).unwrap();
        assert!((v - 0.25 * (2.0 + std::f64::consts::SQRT_2)).abs() < 1e-12);
        assert!((v - 0.8535534).abs() < 1e-7);

        let same = success_prob_distinguish(id, &plus_density(), &plus_density(), 0.0).unwrap();
        assert!((same - 0.5).abs() < 1e-12);
    }

    #[test]
    fn corrected_probability_nonincreasing_for_constant_losses() {
        let map = |t: f64| constant_pdl_map(2.0, 1.0, t);
        let grid = TimeGrid::new(3.0, 301).unwrap();
        let times = grid.times();
        let values: Vec<f64> = times
            .iter()
            .map(|&t| success_prob_distinguish(map, &projector_h(), &plus_density(), t).unwrap())
            .collect();
        let report = scan_monotonicity("p_succ", &times, &values, MONOTONICITY_SLACK);
        assert!(report.is_nonincreasing());
    }

    #[test]
    fn scan_monotonicity_cases() {
        let times = [0.0, 1.0, 2.0, 3.0];
        let decreasing = [3.0, 2.0, 1.0, 0.5];
        assert!(scan_monotonicity("d", &times, &decreasing, 1e-9).is_nonincreasing());

        let constant = [1.0; 4];
        assert!(scan_monotonicity("c", &times, &constant, 1e-9).is_nonincreasing());

        // naive distance grows on every interval when gamma_H > gamma_V
        let map = |t: f64| constant_pdl_map(2.0, 1.0, t);
        let grid = TimeGrid::new(3.0, 121).unwrap();
        let ts = grid.times();
        let values: Vec<f64> = ts
            .iter()
            .map(|&t| naive_trace_distance(map, &projector_h(), &plus_density(), t).unwrap())
            .collect();
        let report = scan_monotonicity("naive", &ts, &values, 1e-9);
        assert_eq!(report.violations.len(), ts.len() - 1);
    }

    #[test]
    fn verdict_cp_divisible_for_oscillating_losses() {
        let p = PdlParams::new(2.0, 1.0, 0.0).unwrap();
        let grid = TimeGrid::new(4.0 * std::f64::consts::PI, 201).unwrap();
        let report = divisibility_verdict(|t| pdl_map(&p, t), &grid, 1e-8).unwrap();
        assert_eq!(report.overall, Verdict::CpDivisible);
    }

    #[test]
    fn verdict_cp_divisible_with_depolarization() {
        let p = PdlParams::new(2.0, 1.0, 0.05).unwrap();
        let grid = TimeGrid::new(2.0 * std::f64::consts::PI, 101).unwrap();
        let table = MapTable::build(&p, &grid).unwrap();
        let report = divisibility_verdict(|t| table.at(t), &grid, 1e-8).unwrap();
        assert_eq!(report.overall, Verdict::CpDivisible);
    }

    #[test]
    fn verdict_indivisible_for_negative_rates() {
        let grid = TimeGrid::new(4.0 * std::f64::consts::PI, 201).unwrap();
        let report =
            divisibility_verdict(|t| negative_rate_demo_map(1.0, 1.0, t), &grid, 1e-8).unwrap();
        assert_eq!(report.overall, Verdict::Indivisible);

        // failures sit exactly where the integrated rate decreases
        for iv in &report.intervals {
            if let IntervalVerdict::Checked {
                t_from,
                t_to,
                tni_ok,
                ..
            } = iv
            {
                let exponent = |t: f64| 1.0 * (t - 2.0 * (t).sin());
                let decreasing = exponent(*t_to) < exponent(*t_from) - 1e-12;
                if decreasing {
                    assert!(!tni_ok, "interval [{t_from}, {t_to}] should fail");
                }
            }
        }
    }

    #[test]
    fn closed_form_values() {
        assert!((naive_distance_closed_form(2.0, 1.0, 1.0) - 0.8550196364).abs() < 1e-9);
        assert!((naive_distance_closed_form(2.0, 1.0, 1.0) - 0.8550).abs() < 1e-4);
        assert!(
            (weighted_distance_closed_form(2.0, 1.0, 0.0) - std::f64::consts::FRAC_1_SQRT_2).abs()
                < 1e-12
        );
    }
}
