//! Probability-weighted trace distance under constant-rate losses.
//!
//! Columns: t, weighted_dist_simulated, weighted_dist_closed_form,
//! abs_error. Gated like the naive-distance report; with gamma_H below
//! gamma_V the observed behavior is recorded without a monotonicity gate.

use anyhow::Result;

use tracedown::flow::{
    scan_monotonicity, weighted_distance_closed_form, weighted_trace_distance_states,
};
use tracedown::linalg::projector_h;
use tracedown::pdl::{constant_pdl_map, TimeGrid};

use crate::config::{ConfigArgs, Defaults, RunConfig};
use crate::output::{emit, emit_verdicts, fmt_sig, CsvDocument};

const DEFAULTS: Defaults = Defaults {
    gamma: 2.0,
    omega: 1.0,
    lambda: 0.0,
    gamma_h: 2.0,
    gamma_v: 1.0,
    t_max: 3.0,
    steps: 301,
    tol: 1e-6,
};

pub fn run(args: &ConfigArgs, same_states: bool) -> Result<bool> {
    let config = RunConfig::resolve(args, DEFAULTS)?;
    let grid = TimeGrid::new(config.t_max, config.steps)?;
    let rho1 = projector_h();
    let rho2 = if same_states {
        rho1.clone()
    } else {
        super::plus_density()
    };
    let biased = config.gamma_h > config.gamma_v;

    let mut gates = vec![format!("max abs_error < {}", fmt_sig(config.tol))];
    if biased && !same_states {
        gates.push("at least one increase detected (gamma_h > gamma_v)".into());
    }
    let mut doc = CsvDocument::new("weighted-distance", &config, &gates);
    if same_states {
        doc.comment("same-states override: both inputs are |H><H|");
    }
    doc.columns(&[
        "t",
        "weighted_dist_simulated",
        "weighted_dist_closed_form",
        "abs_error",
    ]);

    let times = grid.times();
    let mut values = Vec::with_capacity(times.len());
    let mut max_err: f64 = 0.0;
    for &t in &times {
        let op = constant_pdl_map(config.gamma_h, config.gamma_v, t);
        let simulated = weighted_trace_distance_states(&op.apply(&rho1)?, &op.apply(&rho2)?)?;
        let closed = if same_states {
            0.0
        } else {
            weighted_distance_closed_form(config.gamma_h, config.gamma_v, t)
        };
        let err = (simulated - closed).abs();
        max_err = max_err.max(err);
        values.push(simulated);
        doc.row(&[
            fmt_sig(t),
            fmt_sig(simulated),
            fmt_sig(closed),
            fmt_sig(err),
        ]);
    }

    let scan = scan_monotonicity("weighted distance", &times, &values, 1e-9);
    let error_ok = max_err < config.tol;
    let increase_ok = !(biased && !same_states) || !scan.violations.is_empty();
    let passed = error_ok && increase_ok;

    let csv_on_stdout = emit(&doc, config.out.as_deref())?;
    let mut verdicts = vec![
        format!(
            "closed-form agreement: {} (max abs_error = {})",
            if error_ok { "pass" } else { "FAIL" },
            fmt_sig(max_err)
        ),
        format!(
            "increases detected on {} of {} intervals",
            scan.violations.len(),
            times.len() - 1
        ),
    ];
    if biased && !same_states {
        verdicts.push(format!(
            "backflow-style increase present: {}",
            if increase_ok { "pass" } else { "FAIL" }
        ));
    }
    emit_verdicts(&verdicts, csv_on_stdout);
    Ok(passed)
}
