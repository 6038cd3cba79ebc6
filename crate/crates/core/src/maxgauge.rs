//! The maximal gauge `ν_max(z) = inf{h(z + p) : p accretive}`.
//!
//! Only `Re(p)` matters, so the search runs over `H ∈ W ∩ PSD` where
//! `W = {Re(p) : p ∈ M_n(Z)}`. A target `t` is feasible when some such `H`
//! has `‖Re(z) + H‖ ≤ t`. A barrier method first brackets the value; any
//! remaining interval is bisected, with feasibility decided by Dykstra's
//! algorithm over the three sets.

use nalgebra::DVector;
use serde::Serialize;

use crate::barrier;
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::gauges::{gauge_h, gauge_nu, gauge_nu_e, mixed_sample};
use crate::laws::trial_rng;
use crate::linalg::{self, hermitian_to_vec, vec_to_hermitian, ComplexMatrix, C64};
use crate::report::CheckReport;
use crate::space::{LevelElement, OperatorSpace};
use crate::subspace::{self, OrthoBasis, RANK_TOL};

/// How often (in sweeps) the early certificates are evaluated.
const CERTIFICATE_EVERY: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct GaugeResult {
    pub value: f64,
    /// Accretive `p` with `h(z + p)` close to `value`.
    pub witness: Option<LevelElement>,
    /// Newton steps plus Dykstra sweeps.
    pub iterations: usize,
    /// False when some bisection step was declared infeasible only because
    /// the sweep cap ran out, so `value` may overestimate.
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub(crate) enum Probe {
    /// `H ∈ W`, PSD and inside the ball, all within `feas_tol`.
    Feasible { h: ComplexMatrix, sweeps: usize },
    /// Infeasible; with `certified`, `lower_bound` is a valid lower bound on
    /// the optimum, otherwise the sweep cap ran out far from convergence.
    Infeasible { lower_bound: f64, sweeps: usize, certified: bool },
    Undecided { residual: f64 },
}

/// Feasibility of `W ∩ PSD ∩ {H : ‖R + H‖ ≤ t}`.
///
/// Besides the cyclic residual test, two certificates end the run early:
/// the `W`-iterate may already be feasible within `feas_tol`, and the
/// accumulated Dykstra corrections `Y = -(q_W + q_PSD)` lie in `W^⊥ + PSD`,
/// so `tr(Y R) / ‖Y‖₁` bounds every feasible `‖R + H‖` from below.
pub(crate) fn probe(
    range: &OrthoBasis,
    r: &ComplexMatrix,
    t: f64,
    start: &ComplexMatrix,
    cfg: &SolverConfig,
) -> Result<Probe> {
    let m = r.rows();
    let center = r.scale_real(-1.0);
    let dim = m * m;
    let mut x = DVector::from_vec(hermitian_to_vec(start));
    let mut q_w = DVector::<f64>::zeros(dim);
    let mut q_psd = DVector::<f64>::zeros(dim);
    let mut q_ball = DVector::<f64>::zeros(dim);
    let mut residual = f64::INFINITY;
    let r_scale = 1.0 + linalg::spectral_norm(r);

    for sweep in 1..=cfg.dykstra_max_iter {
        let pre = &x + &q_w;
        let y_w = range.project(&pre);
        q_w = pre - &y_w;

        let pre = &y_w + &q_psd;
        let y_psd = DVector::from_vec(hermitian_to_vec(&linalg::project_psd(&vec_to_hermitian(pre.as_slice(), m))?));
        q_psd = pre - &y_psd;

        let pre = &y_psd + &q_ball;
        let ball = linalg::project_spectral_ball(&vec_to_hermitian(pre.as_slice(), m), &center, t)?;
        let y_ball = DVector::from_vec(hermitian_to_vec(&ball));
        q_ball = pre - &y_ball;

        residual = (&y_w - &y_psd).norm() + (&y_psd - &y_ball).norm() + (&y_ball - &y_w).norm();
        x = y_ball;

        if residual < cfg.dykstra_residual_tol {
            return Ok(Probe::Feasible {
                h: vec_to_hermitian(y_w.as_slice(), m),
                sweeps: sweep,
            });
        }
        if sweep % CERTIFICATE_EVERY == 0 {
            let h = vec_to_hermitian(y_w.as_slice(), m);
            let eig = linalg::hermitian_eig(&h)?;
            if eig.min() >= -cfg.feas_tol && linalg::spectral_norm(&(r + &h)) <= t + cfg.feas_tol {
                return Ok(Probe::Feasible { h, sweeps: sweep });
            }
            let y = vec_to_hermitian((-(&q_w + &q_psd)).as_slice(), m);
            let tn = linalg::trace_norm_hermitian(&y)?;
            if tn > 0.0 {
                let bound = y.real_inner(r) / tn - 1e-12 * r_scale;
                if bound > t {
                    return Ok(Probe::Infeasible {
                        lower_bound: bound,
                        sweeps: sweep,
                        certified: true,
                    });
                }
            }
        }
    }
    let sweeps = cfg.dykstra_max_iter;
    if residual > 100.0 * cfg.dykstra_residual_tol {
        Ok(Probe::Infeasible {
            lower_bound: t,
            sweeps,
            certified: false,
        })
    } else {
        Ok(Probe::Undecided { residual })
    }
}

/// `ν_max(z)`: barrier bracket (unless disabled), then bisection with the
/// Dykstra feasibility probe warm-started at the best point so far.
pub fn nu_max(space: &OperatorSpace, z: &LevelElement, cfg: &SolverConfig) -> Result<GaugeResult> {
    cfg.validate()?;
    check_member(space, z)?;
    let n = z.level();
    let geometry = space.geometry(n)?;
    let r = z.real_part();
    let h = gauge_h(z);
    let mut lo = 0.0f64;
    let mut hi = h;
    let mut best = ComplexMatrix::zeros(r.rows(), r.cols());
    let mut iterations = 0;
    let mut converged = true;

    if cfg.interior_point && geometry.hermitian_range.dim() > 0 && hi > cfg.bisect_tol {
        let m = r.rows();
        let basis: Vec<_> = geometry
            .hermitian_range
            .basis
            .column_iter()
            .map(|c| vec_to_hermitian(c.as_slice(), m).into_dmatrix())
            .collect();
        // Relaxation kept well inside feas_tol so the end point certifies.
        let eps = (1e-10 * (1.0 + h)).min(0.01 * cfg.feas_tol);
        if let Some(out) = barrier::solve(&basis, r.as_dmatrix(), eps, 0.25 * cfg.bisect_tol) {
            iterations += out.newton_steps;
            if out.upper < hi {
                hi = out.upper;
                best = ComplexMatrix::from_dmatrix(out.h);
            }
            lo = out.lower.min(hi);
        }
    }

    while hi - lo > cfg.bisect_tol {
        let t = 0.5 * (lo + hi);
        match probe(&geometry.hermitian_range, &r, t, &best, cfg)? {
            Probe::Feasible { h, sweeps } => {
                iterations += sweeps;
                // The certificate allows ‖R + H‖ up to t + feas_tol.
                hi = t;
                best = h;
            }
            Probe::Infeasible {
                lower_bound,
                sweeps,
                certified,
            } => {
                iterations += sweeps;
                converged &= certified;
                lo = lower_bound.max(t).min(hi);
            }
            Probe::Undecided { residual, .. } => return Err(Error::Indeterminate { t, residual }),
        }
    }
    let witness = space.lift_real_part(n, &best)?;
    Ok(GaugeResult {
        value: hi,
        witness: Some(witness),
        iterations,
        converged,
    })
}

fn check_member(space: &OperatorSpace, z: &LevelElement) -> Result<()> {
    if z.ambient_dim() != space.ambient_dim() || z.space_dim() != space.dim() {
        return Err(Error::SpaceMismatch(format!(
            "element of a {}-dimensional space in M_{}, space is {}-dimensional in M_{}",
            z.space_dim(),
            z.ambient_dim(),
            space.dim(),
            space.ambient_dim()
        )));
    }
    Ok(())
}

/// Brute-force `ν_max` for level-1 elements of a diagonal space.
///
/// Minimizes `max_j |R_j + (Gθ)_j|` over `Gθ ≥ 0`, where the columns of `G`
/// span the real-part range, by a `grid^r` sweep of a box known to contain
/// the optimum followed by two refinement passes around the best point.
pub fn nu_max_diag_oracle(space: &OperatorSpace, z: &LevelElement, grid: usize) -> Result<f64> {
    if !space.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    check_member(space, z)?;
    if z.level() != 1 {
        return Err(Error::Unsupported("the diagonal oracle works at level 1 only".into()));
    }
    let grid = grid.max(2);
    let d = space.ambient_dim();
    let re: Vec<f64> = (0..d).map(|j| z.realized().get(j, j).re).collect();

    // Real-part generators: Re(b_i) and Re(i b_i) = -Im(b_i), restricted to the diagonal.
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for b in space.basis() {
        cols.push((0..d).map(|j| b.get(j, j).re).collect());
        cols.push((0..d).map(|j| -b.get(j, j).im).collect());
    }
    let all = nalgebra::DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
    let keep = subspace::independent_columns(&all, RANK_TOL);
    let rank = keep.len();
    let objective = |g: &[f64]| -> Option<f64> {
        let mut worst = 0.0f64;
        for j in 0..d {
            if g[j] < -1e-12 {
                return None;
            }
            worst = worst.max((re[j] + g[j]).abs());
        }
        Some(worst)
    };
    let base = objective(&vec![0.0; d]).expect("zero is feasible");
    if rank == 0 {
        return Ok(base);
    }
    if rank > 3 {
        return Err(Error::Unsupported(format!(
            "diagonal oracle handles at most 3 real parameters, found {rank}"
        )));
    }
    let g = all.select_columns(keep.iter());
    let pinv_norm = subspace::pseudo_inverse(&g, RANK_TOL).norm();
    let r_inf = re.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut half_width = pinv_norm * 2.0 * r_inf * (d as f64).sqrt() + 1e-12;
    let mut center = vec![0.0; rank];
    let mut best = base;
    let eval = |theta: &[f64]| -> Option<f64> {
        let gv: Vec<f64> = (0..d)
            .map(|j| (0..rank).map(|c| g[(j, c)] * theta[c]).sum())
            .collect();
        objective(&gv)
    };
    if let Some(v) = eval(&center) {
        best = best.min(v);
    }
    for _pass in 0..3 {
        let step = 2.0 * half_width / (grid - 1) as f64;
        let mut best_theta = center.clone();
        let total = grid.pow(rank as u32);
        let mut theta = vec![0.0; rank];
        for idx in 0..total {
            let mut rem = idx;
            for c in 0..rank {
                theta[c] = center[c] - half_width + step * (rem % grid) as f64;
                rem /= grid;
            }
            if let Some(v) = eval(&theta) {
                if v < best {
                    best = v;
                    best_theta.copy_from_slice(&theta);
                }
            }
        }
        center = best_theta;
        half_width = 2.0 * step;
    }
    Ok(best)
}

/// `ν(z) ≤ ν_max(z)` and `h(z) = max(ν_max(z), ν_max(-z))`; when the order
/// unit is the identity, also `ν_e(z) ≤ ν_max(z)`.
pub fn check_dominance(space: &OperatorSpace, trials: usize, seed: u64, cfg: &SolverConfig, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("dominance", tol);
    let identity_unit = space
        .unit_or_identity()
        .approx_eq(&ComplexMatrix::identity(space.ambient_dim()), 1e-12);
    if !identity_unit {
        report.note("order unit is not the identity; the nu-e comparison is skipped");
    }
    for t in 0..trials {
        let (s, mut rng) = trial_rng(seed, t);
        let n = 1 + (t % cfg.level_cap.max(1));
        let z = mixed_sample(space, n, &mut rng)?;
        let plus = nu_max(space, &z, cfg);
        let minus = nu_max(space, &z.neg(), cfg);
        let (plus, minus) = match (plus, minus) {
            (Ok(a), Ok(b)) => (a.value, b.value),
            (Err(Error::Indeterminate { .. }), _) | (_, Err(Error::Indeterminate { .. })) => {
                report.skipped += 1;
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        report.trials += 1;
        let nu = gauge_nu(&z);
        let h = gauge_h(&z);
        report.record(s, nu - plus, || format!("n={n}: nu={nu:.9e} > nu_max={plus:.9e}"));
        let gap = (h - plus.max(minus)).abs();
        report.metric_max("max_h_identity_gap", gap);
        report.record(s, gap, || {
            format!("n={n}: h={h:.9e} vs max(nu_max(z), nu_max(-z))={:.9e}", plus.max(minus))
        });
        if identity_unit {
            let ne = gauge_nu_e(space, &z)?;
            report.record(s, ne - plus, || format!("n={n}: nu_e={ne:.9e} > nu_max={plus:.9e}"));
        }
    }
    Ok(report)
}

/// Compares `ν_max` with `ν_e`.
///
/// With the identity as order unit inside the space the two must agree and
/// disagreements are violations; otherwise the gaps are only measured and
/// reported (metrics `gap[...]`), including at the basis elements, their
/// negatives and pairwise differences.
pub fn uniqueness_probe(space: &OperatorSpace, trials: usize, seed: u64, cfg: &SolverConfig, tol: f64) -> Result<CheckReport> {
    let d = space.ambient_dim();
    let identity = ComplexMatrix::identity(d);
    let assert_mode = space.order_unit_coeffs().is_some()
        && space.unit_or_identity().approx_eq(&identity, 1e-12);
    let mut report = CheckReport::new("uniqueness", tol);
    report.note(if assert_mode {
        "assert mode: identity order unit in the space"
    } else {
        "gap-report mode: no identity order unit in the space; gaps are reported, not asserted"
    });

    let mut probes: Vec<(String, LevelElement)> = Vec::new();
    let k = space.dim();
    let unit_vec = |i: usize| -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); k];
        v[i] = C64::new(1.0, 0.0);
        v
    };
    for i in 0..k {
        let b = space.element(1, unit_vec(i))?;
        probes.push((format!("b{i}"), b.clone()));
        probes.push((format!("-b{i}"), b.neg()));
        for j in 0..k {
            if i != j {
                let diff = space.element(1, unit_vec(j))?.sub(&b)?;
                probes.push((format!("b{j}-b{i}"), diff));
            }
        }
    }
    for t in 0..trials {
        let (_, mut rng) = trial_rng(seed, t);
        let n = 1 + (t % cfg.level_cap.max(1));
        probes.push((format!("sample{t}"), mixed_sample(space, n, &mut rng)?));
    }

    for (idx, (label, z)) in probes.iter().enumerate() {
        let s = seed.wrapping_add(idx as u64);
        let vmax = match nu_max(space, z, cfg) {
            Ok(r) => r.value,
            Err(Error::Indeterminate { .. }) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        report.trials += 1;
        let ve = gauge_nu_e(space, z)?;
        let gap = vmax - ve;
        report.metric_max("gap_max", gap);
        if !label.starts_with("sample") {
            report.metrics.insert(format!("gap[{label}]"), gap);
        }
        if assert_mode {
            report.record(s, gap.abs(), || format!("{label}: nu_max={vmax:.9e} vs nu_e={ve:.9e}"));
        }
    }
    Ok(report)
}
