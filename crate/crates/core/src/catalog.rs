//! The small diagonal spaces in `ℂ³` used as regression fixtures, and the
//! checks of their known values.

use crate::config::SolverConfig;
use crate::error::Result;
use crate::gauges::gauge_nu_e;
use crate::linalg::{C64, ONE, ZERO};
use crate::maxgauge::{nu_max, nu_max_diag_oracle, uniqueness_probe};
use crate::report::CheckReport;
use crate::space::{LevelElement, OperatorSpace};

/// `span{x}` with `x = (−2, 0, 1)`: the accretive cone is trivial, so
/// `ν_max(x) = h(x) = 2` while `ν_e(x) = 1`.
pub fn degenerate_line() -> Result<(OperatorSpace, LevelElement)> {
    let s = OperatorSpace::real_diagonal(&[&[-2.0, 0.0, 1.0]], None)?;
    let x = s.element(1, vec![ONE])?;
    Ok((s, x))
}

/// `span{x = (2, n, 0), y = (0, n, 1)}` with `z = y − x`, where
/// `ν_max(z) = 2n/(n+2)` and `ν_e(z) = 1`.
pub fn two_generator(n: f64) -> Result<(OperatorSpace, LevelElement)> {
    let s = OperatorSpace::real_diagonal(&[&[2.0, n, 0.0], &[0.0, n, 1.0]], None)?;
    let z = s.element(1, vec![-ONE, ONE])?;
    Ok((s, z))
}

/// `span{x = (−n, 0, 1)}` with `f(x) = n`.
pub fn line_functional(n: f64) -> Result<(OperatorSpace, Vec<C64>)> {
    let s = OperatorSpace::real_diagonal(&[&[-n, 0.0, 1.0]], None)?;
    Ok((s, vec![C64::new(n, 0.0)]))
}

/// `span{x = (n, n, 0), y = (0, n, 1)}` with `f(x) = 0`, `f(y) = n/2`.
pub fn pair_functional(n: f64) -> Result<(OperatorSpace, Vec<C64>)> {
    let s = OperatorSpace::real_diagonal(&[&[n, n, 0.0], &[0.0, n, 1.0]], None)?;
    Ok((s, vec![ZERO, C64::new(n / 2.0, 0.0)]))
}

/// The full diagonal `ℂ^d`; its order unit is the identity, found in the span.
pub fn full_diagonal(d: usize) -> Result<OperatorSpace> {
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    OperatorSpace::real_diagonal(&refs, None)
}

/// Known values on [`degenerate_line`]: `ν_max(x) = 2` (to 1e-5, also by the
/// diagonal oracle), `ν_e(x) = 1` (to 1e-9) and a reported uniqueness gap
/// of 1 at `x` (to 1e-4).
pub fn check_degenerate_line(cfg: &SolverConfig) -> Result<CheckReport> {
    let (space, x) = degenerate_line()?;
    let mut report = CheckReport::new("degenerate-line", 0.0);
    let vmax = nu_max(&space, &x, cfg)?.value;
    let oracle = nu_max_diag_oracle(&space, &x, ORACLE_GRID)?;
    let ve = gauge_nu_e(&space, &x)?;
    report.metrics.insert("nu_max".into(), vmax);
    report.metrics.insert("oracle".into(), oracle);
    report.metrics.insert("nu_e".into(), ve);
    expect(&mut report, "nu_max", vmax, 2.0, 1e-5);
    expect(&mut report, "oracle", oracle, 2.0, 1e-5);
    expect(&mut report, "nu_e", ve, 1.0, 1e-9);
    let probe = uniqueness_probe(&space, 0, cfg.seed, cfg, 1e-4)?;
    let gap = probe.metrics.get("gap[b0]").copied().unwrap_or(f64::NAN);
    report.metrics.insert("gap".into(), gap);
    expect(&mut report, "gap", gap, 1.0, 1e-4);
    Ok(report)
}

/// Known values on [`two_generator`]: `ν_max(y − x) = 2n/(n+2)` within 1e-4
/// on both the default and the Dykstra-only path and within 5e-3 of the
/// diagonal oracle, and `ν_e(y − x) = 1` within 1e-9.
pub fn check_two_generator(n: usize, cfg: &SolverConfig) -> Result<CheckReport> {
    let nf = n as f64;
    let (space, z) = two_generator(nf)?;
    let want = 2.0 * nf / (nf + 2.0);
    let mut report = CheckReport::new(format!("two-generator[n={n}]"), 0.0);
    let vmax = nu_max(&space, &z, cfg)?.value;
    let dykstra_cfg = SolverConfig {
        interior_point: false,
        ..cfg.clone()
    };
    let dykstra = nu_max(&space, &z, &dykstra_cfg)?.value;
    let oracle = nu_max_diag_oracle(&space, &z, ORACLE_GRID)?;
    let ve = gauge_nu_e(&space, &z)?;
    for (k, v) in [("nu_max", vmax), ("nu_max_dykstra", dykstra), ("oracle", oracle), ("nu_e", ve), ("expected", want)] {
        report.metrics.insert(k.into(), v);
    }
    expect(&mut report, "nu_max", vmax, want, 1e-4);
    expect(&mut report, "nu_max_dykstra", dykstra, want, 1e-4);
    expect(&mut report, "nu_max - oracle", vmax - oracle, 0.0, 5e-3);
    expect(&mut report, "nu_e", ve, 1.0, 1e-9);
    Ok(report)
}

pub const ORACLE_GRID: usize = 200;

/// Records `|got − want| − tol` so that any excess is a violation of a
/// report with zero tolerance.
fn expect(report: &mut CheckReport, label: &str, got: f64, want: f64, tol: f64) {
    report.trials += 1;
    let slack = (got - want).abs() - tol;
    report.record(0, slack, || format!("{label} = {got:.12} but expected {want:.12} within {tol:e}"));
}
