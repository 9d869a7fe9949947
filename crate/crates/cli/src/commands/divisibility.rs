//! Divisibility verdict over a time grid with per-interval eigenvalue
//! margins.
//!
//! Columns: t_from, t_to, min_choi_eigenvalue, max_dual_eigenvalue,
//! status. Gate: the overall verdict matches the known one for the chosen
//! dynamics (divisible for both loss families, indivisible for the
//! negative-rate demo).

use anyhow::Result;

use tracedown::flow::{divisibility_verdict, IntervalVerdict, Verdict};
use tracedown::pdl::{negative_rate_demo_map, pdl_map, MapTable, PdlParams, TimeGrid};

use crate::config::{ConfigArgs, Defaults, RunConfig};
use crate::output::{emit, emit_verdicts, fmt_sig, CsvDocument};
use crate::Dynamics;

const DEFAULTS: Defaults = Defaults {
    gamma: 2.0,
    omega: 1.0,
    lambda: 0.05,
    gamma_h: 2.0,
    gamma_v: 1.0,
    t_max: 4.0 * std::f64::consts::PI,
    steps: 201,
    tol: 1e-8,
};

pub fn run(args: &ConfigArgs, dynamics: Dynamics) -> Result<bool> {
    let config = RunConfig::resolve(args, DEFAULTS)?;
    let grid = TimeGrid::new(config.t_max, config.steps)?;

    let (label, expected) = match dynamics {
        Dynamics::Pdl => ("pdl", Verdict::CpDivisible),
        Dynamics::PdlDepol => ("pdl-depol", Verdict::CpDivisible),
        Dynamics::NegativeRateDemo => ("negative-rate-demo", Verdict::Indivisible),
    };

    let report = match dynamics {
        Dynamics::Pdl => {
            let params = PdlParams::new(config.gamma, config.omega, 0.0)?;
            divisibility_verdict(|t| pdl_map(&params, t), &grid, config.tol)?
        }
        Dynamics::PdlDepol => {
            let params = PdlParams::new(config.gamma, config.omega, config.lambda)?;
            let table = MapTable::build(&params, &grid)?;
            divisibility_verdict(|t| table.at(t), &grid, config.tol)?
        }
        Dynamics::NegativeRateDemo => divisibility_verdict(
            |t| negative_rate_demo_map(config.gamma, config.omega, t),
            &grid,
            config.tol,
        )?,
    };

    let gates = vec![format!("overall verdict is {expected}")];
    let mut doc = CsvDocument::new("divisibility", &config, &gates);
    doc.comment(&format!("dynamics: {label}"));
    doc.comment(&format!(
        "interval checks at tol {}: min Choi eigenvalue >= -tol, max dual eigenvalue <= 1 + tol",
        fmt_sig(config.tol)
    ));
    doc.columns(&[
        "t_from",
        "t_to",
        "min_choi_eigenvalue",
        "max_dual_eigenvalue",
        "status",
    ]);

    let mut failing = 0usize;
    let mut indeterminate = 0usize;
    for interval in &report.intervals {
        match interval {
            IntervalVerdict::Checked {
                t_from,
                t_to,
                cp_ok,
                min_choi_eigenvalue,
                tni_ok,
                max_dual_eigenvalue,
            } => {
                let status = match (cp_ok, tni_ok) {
                    (true, true) => "ok",
                    (false, true) => "cp-fail",
                    (true, false) => "tni-fail",
                    (false, false) => "cp-tni-fail",
                };
                if !cp_ok || !tni_ok {
                    failing += 1;
                }
                doc.row(&[
                    fmt_sig(*t_from),
                    fmt_sig(*t_to),
                    fmt_sig(*min_choi_eigenvalue),
                    fmt_sig(*max_dual_eigenvalue),
                    status.to_string(),
                ]);
            }
            IntervalVerdict::Indeterminate { t_from, t_to, .. } => {
                indeterminate += 1;
                doc.row(&[
                    fmt_sig(*t_from),
                    fmt_sig(*t_to),
                    "nan".into(),
                    "nan".into(),
                    "indeterminate".into(),
                ]);
            }
        }
    }

    let passed = report.overall == expected;
    let csv_on_stdout = emit(&doc, config.out.as_deref())?;
    emit_verdicts(
        &[
            format!("verdict: {}", report.overall),
            format!(
                "intervals: {} checked, {} failing, {} indeterminate",
                report.intervals.len(),
                failing,
                indeterminate
            ),
            format!(
                "expected {expected} for `{label}`: {}",
                if passed { "pass" } else { "FAIL" }
            ),
        ],
        csv_on_stdout,
    );
    Ok(passed)
}
