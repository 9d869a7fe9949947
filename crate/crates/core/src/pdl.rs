//! Polarization-dependent-loss dynamics: the constant-rate semigroup, the
//! oscillating-rate family with its closed-form survival probabilities, and
//! the same losses accompanied by depolarization, where a fixed-step RK4
//! integrator is the source of truth.

use num_complex::Complex64;

use crate::channel::{superoperator_to_choi, QuantumOperation};
use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator, pauli_x, pauli_y, pauli_z, projector_h, projector_v, tensor, ComplexMatrix,
    StateVector,
};

/// Rates of the loss generator: `gamma` and `omega` shape the
/// time-dependent attenuation pair, `lambda` is the depolarization rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdlParams {
    gamma: f64,
    omega: f64,
    lambda: f64,
}

impl PdlParams {
    pub fn new(gamma: f64, omega: f64, lambda: f64) -> Result<Self> {
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 0, got {gamma}"
            )));
        }
        if omega.is_nan() || omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be >= 0, got {lambda}"
            )));
        }
        Ok(Self {
            gamma,
            omega,
            lambda,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Same loss rates with the depolarization switched off.
    pub fn without_depolarization(&self) -> Self {
        Self {
            lambda: 0.0,
            ..*self
        }
    }
}

/// Uniform sampling of `[0, t_max]` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if t_max.is_nan() || t_max <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "t_max must be > 0, got {t_max}"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "steps must be >= 2, got {steps}"
            )));
        }
        Ok(Self { t_max, steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time_at(&self, k: usize) -> f64 {
        k as f64 * self.t_max / (self.steps - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.time_at(k)).collect()
    }
}

/// Attenuation rate for the horizontal component at time `t`.
pub fn rate_h(params: &PdlParams, t: f64) -> f64 {
    let (g, w) = (params.gamma, params.omega);
    let c = (g * g + w * w).sqrt();
    g * (1.0 - w * (w * t).cos() / (c + g * (w * t).sin()))
}

/// Attenuation rate for the vertical component at time `t`.
pub fn rate_v(params: &PdlParams, t: f64) -> f64 {
    let (g, w) = (params.gamma, params.omega);
    let c = (g * g + w * w).sqrt();
    g * (1.0 + w * (w * t).cos() / (c - g * (w * t).sin()))
}

/// Integrated horizontal rate `Gamma_H(t)`, in closed form.
pub fn decay_exponent_h(params: &PdlParams, t: f64) -> f64 {
    let (g, w) = (params.gamma, params.omega);
    let c = (g * g + w * w).sqrt();
    g * t - (1.0 + (g / c) * (w * t).sin()).ln()
}

/// Integrated vertical rate `Gamma_V(t)`, in closed form.
pub fn decay_exponent_v(params: &PdlParams, t: f64) -> f64 {
    let (g, w) = (params.gamma, params.omega);
    let c = (g * g + w * w).sqrt();
    g * t - (1.0 - (g / c) * (w * t).sin()).ln()
}

/// Probability that an initially horizontal photon survives to time `t`.
pub fn survival_h(params: &PdlParams, t: f64) -> f64 {
    let (g, w) = (params.gamma, params.omega);
    let c = (g * g + w * w).sqrt();
    (-g * t).exp() * (1.0 + (g / c) * (w * t).sin())
}

/// Probability that an initially vertical photon survives to time `t`.
pub fn survival_v(params: &PdlParams, t: f64) -> f64 {
    let (g, w) = (params.gamma, params.omega);
    let c = (g * g + w * w).sqrt();
    (-g * t).exp() * (1.0 - (g / c) * (w * t).sin())
}

/// Closed-form loss map at time `t`: a single Kraus operator
/// `diag(sqrt(p_H), sqrt(p_V))`. Only valid without depolarization.
pub fn pdl_map(params: &PdlParams, t: f64) -> QuantumOperation {
    assert!(
        params.lambda == 0.0,
        "closed-form loss map requires lambda = 0"
    );
    let k = ComplexMatrix::diag_real(&[survival_h(params, t).sqrt(), survival_v(params, t).sqrt()]);
    QuantumOperation::from_kraus_unchecked(vec![k])
}

/// Constant-rate loss semigroup: Kraus
/// `diag(exp(-gamma_H t / 2), exp(-gamma_V t / 2))`.
pub fn constant_pdl_map(gamma_h: f64, gamma_v: f64, t: f64) -> QuantumOperation {
    let k = ComplexMatrix::diag_real(&[(-gamma_h * t / 2.0).exp(), (-gamma_v * t / 2.0).exp()]);
    QuantumOperation::from_kraus_unchecked(vec![k])
}

/// Loss family with an integrated horizontal rate that decreases on some
/// intervals (`gamma_H(t) = gamma (1 - 2 cos omega t)`, constant vertical
/// rate). The snapshots are not valid quantum operations near t = 0 and
/// the family is not divisible into valid operations; it exists to
/// exercise the failure reporting.
pub fn negative_rate_demo_map(gamma: f64, omega: f64, t: f64) -> QuantumOperation {
    let exponent_h = gamma * (t - 2.0 / omega * (omega * t).sin());
    let k = ComplexMatrix::diag_real(&[(-exponent_h / 2.0).exp(), (-gamma * t / 2.0).exp()]);
    QuantumOperation::from_kraus_unchecked(vec![k])
}

/// Right-hand side of the master equation at time `t`:
/// `-1/2 {gamma_H |H><H| + gamma_V |V><V|, rho}` plus, when `lambda > 0`,
/// the depolarizer `lambda/4 sum_i (sigma_i rho sigma_i - rho)`. With
/// `ancilla` the generator acts on the first factor of a two-qubit state.
pub fn generator_rhs(
    params: &PdlParams,
    t: f64,
    rho: &ComplexMatrix,
    ancilla: bool,
) -> Result<ComplexMatrix> {
    let expected = if ancilla { 4 } else { 2 };
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: rho.dim(),
        });
    }
    let lift = |m: &ComplexMatrix| {
        if ancilla {
            tensor(m, &ComplexMatrix::identity(2))
        } else {
            m.clone()
        }
    };

    let decay = lift(&projector_h())
        .scale_real(rate_h(params, t))
        .add(&lift(&projector_v()).scale_real(rate_v(params, t)));
    let mut rhs = anticommutator(&decay, rho).scale_real(-0.5);

    if params.lambda > 0.0 {
        for sigma in [pauli_x(), pauli_y(), pauli_z()] {
            let s = lift(&sigma);
            let flipped = s.matmul(rho).matmul(&s);
            rhs = rhs.add(&flipped.sub(rho).scale_real(params.lambda / 4.0));
        }
    }
    Ok(rhs)
}

/// Nominal RK4 substep for a grid: `t_max / (50 * steps)`. Each grid
/// interval is covered by equal substeps no longer than this.
fn substeps_per_interval(grid: &TimeGrid) -> usize {
    let h = grid.t_max / (50.0 * grid.steps as f64);
    let dt = grid.t_max / (grid.steps - 1) as f64;
    (dt / h).ceil() as usize
}

fn rk4_step<F>(rhs: &F, t: f64, h: f64, y: &ComplexMatrix) -> Result<ComplexMatrix>
where
    F: Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix>,
{
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + h / 2.0, &y.add(&k1.scale_real(h / 2.0)))?;
    let k3 = rhs(t + h / 2.0, &y.add(&k2.scale_real(h / 2.0)))?;
    let k4 = rhs(t + h, &y.add(&k3.scale_real(h)))?;
    Ok(y.add(
        &k1.add(&k2.scale_real(2.0))
            .add(&k3.scale_real(2.0))
            .add(&k4)
            .scale_real(h / 6.0),
    ))
}

fn integrate_grid<F>(
    rhs: &F,
    y0: &ComplexMatrix,
    grid: &TimeGrid,
    substep_factor: usize,
) -> Result<Vec<(f64, ComplexMatrix)>>
where
    F: Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix>,
{
    let n_sub = substeps_per_interval(grid) * substep_factor;
    let mut out = Vec::with_capacity(grid.steps);
    let mut y = y0.clone();
    out.push((0.0, y.clone()));
    for k in 0..grid.steps - 1 {
        let t0 = grid.time_at(k);
        let t1 = grid.time_at(k + 1);
        let h = (t1 - t0) / n_sub as f64;
        for s in 0..n_sub {
            y = rk4_step(rhs, t0 + s as f64 * h, h, &y)?;
        }
        out.push((t1, y.clone()));
    }
    Ok(out)
}

/// Integrates the master equation from `rho0` over the grid with
/// classical fixed-step RK4. Stored states are re-Hermitized; a state
/// eigenvalue below -1e-7 triggers one retry at half the step before the
/// run is declared unstable.
pub fn integrate(
    params: &PdlParams,
    rho0: &ComplexMatrix,
    grid: &TimeGrid,
    ancilla: bool,
) -> Result<Vec<(f64, ComplexMatrix)>> {
    let rhs = |t: f64, y: &ComplexMatrix| generator_rhs(params, t, y, ancilla);
    for factor in [1usize, 2] {
        let mut traj = integrate_grid(&rhs, rho0, grid, factor)?;
        for (_, state) in traj.iter_mut() {
            *state = state.hermitize();
        }
        let mut worst = f64::INFINITY;
        for (_, state) in &traj {
            let (vals, _) = state.hermitian_eig()?;
            worst = worst.min(*vals.last().unwrap());
        }
        if worst >= -1e-7 {
            return Ok(traj);
        }
        if factor == 2 {
            return Err(Error::IntegrationUnstable {
                min_eigenvalue: worst,
            });
        }
    }
    unreachable!()
}

/// Dynamical map snapshots over a grid for the depolarizing family,
/// obtained by integrating the superoperator equation with RK4 and
/// rebuilding a Kraus set at every node.
#[derive(Debug, Clone)]
pub struct MapTable {
    grid: TimeGrid,
    ops: Vec<QuantumOperation>,
}

impl MapTable {
    pub fn build(params: &PdlParams, grid: &TimeGrid) -> Result<Self> {
        let rhs = |t: f64, s: &ComplexMatrix| -> Result<ComplexMatrix> {
            Ok(generator_superoperator(params, t).matmul(s))
        };
        let s0 = ComplexMatrix::identity(4);
        let traj = integrate_grid(&rhs, &s0, grid, 1)?;
        let mut ops = Vec::with_capacity(traj.len());
        for (_, s) in &traj {
            let choi = superoperator_to_choi(s, 2)?;
            // relative recovery threshold: the snapshot scale decays far
            // below one, so an absolute cutoff would drop real content
            ops.push(QuantumOperation::from_choi_relative(
                &choi,
                crate::channel::KRAUS_RECOVERY_TOL,
            )?);
        }
        Ok(Self { grid: *grid, ops })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn op_at_index(&self, k: usize) -> &QuantumOperation {
        &self.ops[k]
    }

    /// Snapshot at a grid time. `t` must coincide with a grid node.
    pub fn at(&self, t: f64) -> QuantumOperation {
        let k = (t / self.grid.t_max * (self.grid.steps - 1) as f64).round() as usize;
        let k = k.min(self.grid.steps - 1);
        debug_assert!(
            (self.grid.time_at(k) - t).abs() <= 1e-9 * self.grid.t_max.max(1.0),
            "time {t} is not a grid node"
        );
        self.ops[k].clone()
    }
}

/// Row-stacking superoperator of the generator at time `t` (system only).
fn generator_superoperator(params: &PdlParams, t: f64) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let decay = projector_h()
        .scale_real(rate_h(params, t))
        .add(&projector_v().scale_real(rate_v(params, t)));
    // -1/2 (D (x) I + I (x) D^T); D is real diagonal
    let mut s = tensor(&decay, &id)
        .add(&tensor(&id, &decay.transpose()))
        .scale_real(-0.5);
    if params.lambda > 0.0 {
        for sigma in [pauli_x(), pauli_y(), pauli_z()] {
            let term = tensor(&sigma, &sigma.conjugate()).sub(&ComplexMatrix::identity(4));
            s = s.add(&term.scale_real(params.lambda / 4.0));
        }
    }
    s
}

/// Maximally entangled two-photon polarization state
/// `(|HH> + |VV>) / sqrt(2)`.
pub fn psi_plus() -> StateVector {
    StateVector::new(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])
    .unwrap()
}

/// Postselected system-ancilla state under the pure loss dynamics:
/// `(sqrt(p_H) |HH> + sqrt(p_V) |VV>) / sqrt(p_H + p_V)`.
pub fn conditional_pure_state(params: &PdlParams, t: f64) -> StateVector {
    let ph = survival_h(params, t);
    let pv = survival_v(params, t);
    StateVector::new(vec![
        Complex64::new(ph.sqrt(), 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(pv.sqrt(), 0.0),
    ])
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::IntermediateResult;
    use crate::linalg::{projector_h, Subsystem};

    fn params(gamma: f64, omega: f64, lambda: f64) -> PdlParams {
        PdlParams::new(gamma, omega, lambda).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PdlParams::new(-0.1, 1.0, 0.0).is_err());
        assert!(PdlParams::new(1.0, 0.0, 0.0).is_err());
        assert!(PdlParams::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn grid_samples() {
        let grid = TimeGrid::new(3.0, 4).unwrap();
        assert_eq!(grid.times(), vec![0.0, 1.0, 2.0, 3.0]);
        assert!(TimeGrid::new(3.0, 1).is_err());
        assert!(TimeGrid::new(0.0, 10).is_err());
    }

    #[test]
    fn rates_at_zero() {
        let p = params(2.0, 1.0, 0.0);
        let expected_h = 2.0 * (1.0 - 1.0 / 5f64.sqrt());
        let expected_v = 2.0 * (1.0 + 1.0 / 5f64.sqrt());
        assert!((rate_h(&p, 0.0) - expected_h).abs() < 1e-12);
        assert!((rate_v(&p, 0.0) - expected_v).abs() < 1e-12);
        assert!((rate_h(&p, 0.0) - 1.1055728).abs() < 1e-7);
        assert!((rate_v(&p, 0.0) - 2.8944272).abs() < 1e-7);
    }

    #[test]
    fn rates_stay_nonnegative() {
        for &(g, w) in &[(2.0, 1.0), (0.3, 1.7), (5.0, 0.4), (1.0, 1.0)] {
            let p = params(g, w, 0.0);
            for k in 0..10_000 {
                let t = k as f64 * 20.0 / 9_999.0;
                assert!(rate_h(&p, t) >= -1e-12, "gamma_H({t}) < 0 at g={g}, w={w}");
                assert!(rate_v(&p, t) >= -1e-12, "gamma_V({t}) < 0 at g={g}, w={w}");
            }
        }
    }

    #[test]
    fn survival_examples() {
        let p = params(2.0, 1.0, 0.0);
        assert!((survival_h(&p, 0.0) - 1.0).abs() < 1e-15);
        assert!((survival_v(&p, 0.0) - 1.0).abs() < 1e-15);

        let t = std::f64::consts::FRAC_PI_2;
        let expected = (-std::f64::consts::PI).exp() * (1.0 + 2.0 / 5f64.sqrt());
        assert!((survival_h(&p, t) - expected).abs() < 1e-12);
        assert!((survival_h(&p, t) - 0.0818657).abs() < 1e-7);
    }

    #[test]
    fn survival_derivative_matches_rate() {
        let p = params(2.0, 1.0, 0.0);
        let h = 1e-5;
        for k in 0..30 {
            let t = 0.05 + k as f64 * 0.1;
            let deriv = (survival_h(&p, t + h) - survival_h(&p, t - h)) / (2.0 * h);
            assert!((deriv + rate_h(&p, t) * survival_h(&p, t)).abs() < 1e-6);
            let deriv_v = (survival_v(&p, t + h) - survival_v(&p, t - h)) / (2.0 * h);
            assert!((deriv_v + rate_v(&p, t) * survival_v(&p, t)).abs() < 1e-6);
        }
    }

    #[test]
    fn survival_nonincreasing_on_grids() {
        for &(g, w) in &[(2.0, 1.0), (0.5, 1.3), (4.0, 0.7)] {
            let p = params(g, w, 0.0);
            let grid = TimeGrid::new(12.0, 1500).unwrap();
            let times = grid.times();
            for pair in times.windows(2) {
                assert!(survival_h(&p, pair[1]) <= survival_h(&p, pair[0]) + 1e-12);
                assert!(survival_v(&p, pair[1]) <= survival_v(&p, pair[0]) + 1e-12);
            }
        }
    }

    #[test]
    fn decay_exponent_matches_quadrature() {
        // composite Simpson on the rates, independent of the closed form
        let p = params(2.0, 1.0, 0.0);
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize| -> f64 {
            let h = (b - a) / n as f64;
            let mut acc = f(a) + f(b);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(a + i as f64 * h);
            }
            acc * h / 3.0
        };
        for &t in &[0.5, 1.0, 2.0, 3.0] {
            let num_h = simpson(&|x| rate_h(&p, x), 0.0, t, 2000);
            let num_v = simpson(&|x| rate_v(&p, x), 0.0, t, 2000);
            assert!((num_h - decay_exponent_h(&p, t)).abs() < 1e-8);
            assert!((num_v - decay_exponent_v(&p, t)).abs() < 1e-8);
        }
    }

    #[test]
    fn pdl_map_examples() {
        let p = params(2.0, 1.0, 0.0);
        let id = QuantumOperation::identity(2);
        assert!(
            pdl_map(&p, 0.0)
                .to_superoperator()
                .max_abs_diff(&id.to_superoperator())
                < 1e-14
        );

        let t = 0.9;
        let out = pdl_map(&p, t).apply(&projector_h()).unwrap();
        let expected = ComplexMatrix::diag_real(&[survival_h(&p, t), 0.0]);
        assert!(out.max_abs_diff(&expected) < 1e-14);

        let plus =
            StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let out = pdl_map(&p, t).apply(&plus.density()).unwrap();
        let off = 0.5 * (survival_h(&p, t) * survival_v(&p, t)).sqrt();
        assert!((out.get(0, 1).re - off).abs() < 1e-14);
    }

    #[test]
    fn constant_map_matches_closed_form_on_plus_state() {
        let (gh, gv, t) = (2.0, 1.0, 0.8);
        let plus =
            StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let out = constant_pdl_map(gh, gv, t).apply(&plus.density()).unwrap();
        let expected = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(0.5 * (-gh * t).exp(), 0.0),
            (1, 1) => Complex64::new(0.5 * (-gv * t).exp(), 0.0),
            _ => Complex64::new(0.5 * (-(gh + gv) * t / 2.0).exp(), 0.0),
        });
        assert!(out.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn constant_map_is_a_semigroup() {
        let (gh, gv) = (1.7, 0.4);
        for &(t1, t2) in &[(0.3, 0.9), (1.1, 0.2), (0.05, 2.5)] {
            let whole = constant_pdl_map(gh, gv, t1 + t2);
            let split = QuantumOperation::compose(
                &constant_pdl_map(gh, gv, t2),
                &constant_pdl_map(gh, gv, t1),
            )
            .unwrap();
            assert!(
                whole
                    .to_superoperator()
                    .max_abs_diff(&split.to_superoperator())
                    < 1e-12
            );
        }
    }

    #[test]
    fn generator_examples() {
        let p = params(2.0, 1.0, 0.0);
        let t = 0.4;
        let rhs = generator_rhs(&p, t, &projector_h(), false).unwrap();
        let expected = projector_h().scale_real(-rate_h(&p, t));
        assert!(rhs.max_abs_diff(&expected) < 1e-14);

        // depolarizer fixed point
        let depol_only = params(0.0, 1.0, 0.7);
        let maximally_mixed = ComplexMatrix::identity(2).scale_real(0.5);
        let rhs = generator_rhs(&depol_only, 0.0, &maximally_mixed, false).unwrap();
        assert!(rhs.max_abs_entry() < 1e-15);

        // trace of the generator output only sees the loss part
        let p = params(1.5, 1.0, 0.3);
        let rho = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(0.6, 0.0),
            (1, 1) => Complex64::new(0.4, 0.0),
            (0, 1) => Complex64::new(0.1, 0.2),
            _ => Complex64::new(0.1, -0.2),
        });
        let rhs = generator_rhs(&p, t, &rho, false).unwrap();
        let expected_trace = -rate_h(&p, t) * 0.6 - rate_v(&p, t) * 0.4;
        assert!((rhs.trace().re - expected_trace).abs() < 1e-12);
    }

    #[test]
    fn generator_dimension_check() {
        let p = params(1.0, 1.0, 0.0);
        assert!(generator_rhs(&p, 0.0, &ComplexMatrix::identity(4), false).is_err());
        assert!(generator_rhs(&p, 0.0, &ComplexMatrix::identity(2), true).is_err());
    }

    #[test]
    fn rk4_matches_closed_form_survival() {
        let p = params(2.0, 1.0, 0.0);
        let grid = TimeGrid::new(3.0, 61).unwrap();
        let rho0 = ComplexMatrix::identity(2).scale_real(0.5);
        let traj = integrate(&p, &rho0, &grid, false).unwrap();
        for (t, state) in &traj {
            assert!((state.get(0, 0).re - 0.5 * survival_h(&p, *t)).abs() < 1e-6);
            assert!((state.get(1, 1).re - 0.5 * survival_v(&p, *t)).abs() < 1e-6);
        }
        // trace never grows along the trajectory
        for pair in traj.windows(2) {
            assert!(pair[1].1.trace().re <= pair[0].1.trace().re + 1e-9);
        }
    }

    #[test]
    fn rk4_constant_when_rates_vanish() {
        let p = params(0.0, 1.0, 0.0);
        let grid = TimeGrid::new(2.0, 21).unwrap();
        let rho0 = projector_h();
        let traj = integrate(&p, &rho0, &grid, false).unwrap();
        for (_, state) in &traj {
            assert!(state.max_abs_diff(&rho0) < 1e-12);
        }
    }

    #[test]
    fn rk4_ancilla_matches_conditional_pure_state() {
        let p = params(2.0, 1.0, 0.0);
        let grid = TimeGrid::new(3.0, 31).unwrap();
        let rho0 = psi_plus().density();
        let traj = integrate(&p, &rho0, &grid, true).unwrap();
        for (t, state) in &traj {
            let normalized = state.scale_real(1.0 / state.trace().re);
            let expected = conditional_pure_state(&p, *t).density();
            assert!(normalized.max_abs_diff(&expected) < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn conditional_state_examples() {
        let p = params(2.0, 1.0, 0.0);
        assert!(
            conditional_pure_state(&p, 0.0)
                .density()
                .max_abs_diff(&psi_plus().density())
                < 1e-14
        );
        for &t in &[0.3, 1.0, 2.7] {
            let phi = conditional_pure_state(&p, t);
            assert!((phi.norm() - 1.0).abs() < 1e-12);
            let ratio = phi.amplitude(0).re / phi.amplitude(3).re;
            let expected = (survival_h(&p, t) / survival_v(&p, t)).sqrt();
            assert!((ratio - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn divisibility_is_constructive_for_pure_losses() {
        let p = params(2.0, 1.0, 0.0);
        let (t1, t2) = (0.7, 1.9);
        let factor_h = (survival_h(&p, t2) / survival_h(&p, t1)).sqrt();
        let factor_v = (survival_v(&p, t2) / survival_v(&p, t1)).sqrt();
        let bridge =
            QuantumOperation::new(vec![ComplexMatrix::diag_real(&[factor_h, factor_v])]).unwrap();
        let composed = QuantumOperation::compose(&bridge, &pdl_map(&p, t1)).unwrap();
        assert!(
            composed
                .to_superoperator()
                .max_abs_diff(&pdl_map(&p, t2).to_superoperator())
                < 1e-10
        );
    }

    #[test]
    fn map_table_reduces_to_closed_form_without_depolarization() {
        let p = params(2.0, 1.0, 0.0);
        let grid = TimeGrid::new(3.0, 31).unwrap();
        let table = MapTable::build(&p, &grid).unwrap();
        for (k, t) in grid.times().into_iter().enumerate() {
            let diff = table
                .op_at_index(k)
                .to_superoperator()
                .max_abs_diff(&pdl_map(&p, t).to_superoperator());
            assert!(diff < 1e-7, "t = {t}, diff = {diff}");
        }
    }

    #[test]
    fn map_table_snapshots_are_valid_operations() {
        let p = params(2.0, 1.0, 0.05);
        let grid = TimeGrid::new(std::f64::consts::PI, 41).unwrap();
        let table = MapTable::build(&p, &grid).unwrap();
        for k in 0..grid.steps() {
            let op = table.op_at_index(k);
            assert!(op.is_cp(1e-9).unwrap().0);
            assert!(op.is_trace_nonincreasing(1e-9).unwrap().0);
        }
        // lookup by time agrees with lookup by index
        let t = grid.time_at(17);
        assert!(
            table
                .at(t)
                .to_superoperator()
                .max_abs_diff(&table.op_at_index(17).to_superoperator())
                < 1e-15
        );
    }

    #[test]
    fn negative_rate_demo_has_growing_survival() {
        let (gamma, omega) = (1.0, 1.0);
        let at = |t: f64| negative_rate_demo_map(gamma, omega, t);
        match crate::channel::intermediate_map(&at(0.4), &at(0.1), 1e-8).unwrap() {
            IntermediateResult::NotAnOperation {
                max_dual_eigenvalue,
                ..
            } => assert!(max_dual_eigenvalue > 1.0 + 1e-3),
            other => panic!("expected NotAnOperation, got {other:?}"),
        }
    }

    #[test]
    fn integrate_rejects_indefinite_initial_state() {
        // an indefinite input stays indefinite under the losses, so the
        // halved retry fails too
        let p = params(1.0, 1.0, 0.0);
        let grid = TimeGrid::new(1.0, 5).unwrap();
        let rho0 = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(matches!(
            integrate(&p, &rho0, &grid, false),
            Err(Error::IntegrationUnstable { .. })
        ));
    }

    #[test]
    fn ancilla_generator_traces_out_to_system_generator() {
        let p = params(1.3, 1.0, 0.2);
        let rho = psi_plus().density();
        let rhs = generator_rhs(&p, 0.5, &rho, true).unwrap();
        let reduced = crate::linalg::partial_trace(&rhs, (2, 2), Subsystem::A).unwrap();
        let system_rho = crate::linalg::partial_trace(&rho, (2, 2), Subsystem::A).unwrap();
        let expected = generator_rhs(&p, 0.5, &system_rho, false).unwrap();
        assert!(reduced.max_abs_diff(&expected) < 1e-12);
    }
}
