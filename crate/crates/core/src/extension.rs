//! Scalar functionals on a space: real-complete positivity, contractivity
//! for the hermitian gauge, and lower bounds on the value any positive
//! extension must take at a unit.
//!
//! On diagonal spaces at level 1 everything reduces to small polyhedra in
//! the real parameters `θ` of `z = Σ (θ_{2j} + iθ_{2j+1}) b_j`, and is
//! decided exactly; other levels and spaces are sampled.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::catalog;
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::gauges::{gauge_h, mixed_sample};
use crate::laws::trial_rng;
use crate::linalg::{self, ComplexMatrix, C64, ZERO};
use crate::polytope::{self, LpOutcome, MAX_VARIABLES};
use crate::report::CheckReport;
use crate::space::{sample_element_with, LevelElement, OperatorSpace, SampleMode};
use crate::subspace::{self, RANK_TOL};

const LP_TOL: f64 = 1e-12;

/// A linear functional given by its values on the basis.
#[derive(Clone, Debug)]
pub struct Functional<'a> {
    space: &'a OperatorSpace,
    values: Vec<C64>,
}

impl<'a> Functional<'a> {
    pub fn new(space: &'a OperatorSpace, values: Vec<C64>) -> Result<Self> {
        if values.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "{} functional values for a {}-dimensional space",
                values.len(),
                space.dim()
            )));
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> &'a OperatorSpace {
        self.space
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            space: self.space,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `f^{(n)}(z)`: `f` applied entrywise.
    pub fn apply(&self, z: &LevelElement) -> Result<ComplexMatrix> {
        if z.space_dim() != self.space.dim() || z.ambient_dim() != self.space.ambient_dim() {
            return Err(Error::SpaceMismatch("element is not from the functional's space".into()));
        }
        let n = z.level();
        let c = z.coeffs();
        Ok(ComplexMatrix::from_fn(n, n, |r, s| {
            self.values
                .iter()
                .enumerate()
                .fold(ZERO, |acc, (i, v)| acc + v * c[i * n * n + r * n + s])
        }))
    }
}

/// Level-1 real coordinates of a diagonal space: `Re z = G θ`, `Im z = G' θ`
/// (as diagonals) and `Re f(z) = ℓ·θ`.
struct DiagCoords {
    g: DMatrix<f64>,
    g_imag: DMatrix<f64>,
    ell: DVector<f64>,
}

impl DiagCoords {
    fn new(f: &Functional) -> Result<Self> {
        let space = f.space;
        if !space.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        let d = space.ambient_dim();
        let k = space.dim();
        let mut g = DMatrix::zeros(d, 2 * k);
        let mut g_imag = DMatrix::zeros(d, 2 * k);
        let mut ell = DVector::zeros(2 * k);
        for (j, b) in space.basis().iter().enumerate() {
            for i in 0..d {
                let v = b.get(i, i);
                g[(i, 2 * j)] = v.re;
                g[(i, 2 * j + 1)] = -v.im;
                g_imag[(i, 2 * j)] = v.im;
                g_imag[(i, 2 * j + 1)] = v.re;
            }
            ell[2 * j] = f.values[j].re;
            ell[2 * j + 1] = -f.values[j].im;
        }
        Ok(Self { g, g_imag, ell })
    }

    fn element(&self, space: &OperatorSpace, theta: &DVector<f64>) -> Result<LevelElement> {
        let coeffs = (0..space.dim())
            .map(|j| C64::new(theta[2 * j], theta[2 * j + 1]))
            .collect();
        space.element(1, coeffs)
    }

    /// Largest `|ℓ·θ|` over unit `θ` with `Gθ = 0` (directions where the
    /// real part vanishes), with such a `θ`.
    fn skew_leak(&self) -> (f64, Option<DVector<f64>>) {
        let ker = subspace::null_space(&self.g, RANK_TOL);
        if ker.ncols() == 0 {
            return (0.0, None);
        }
        let proj = ker.tr_mul(&self.ell);
        let leak = proj.norm();
        if leak == 0.0 {
            return (0.0, None);
        }
        (leak, Some(&ker * (&proj / leak)))
    }

    /// Independent real-part generators: `Re z = G_keep s` with `θ` supported on `keep`.
    fn reduced(&self) -> (Vec<usize>, DMatrix<f64>, DVector<f64>) {
        let keep = subspace::independent_columns(&self.g, RANK_TOL);
        let a = self.g.select_columns(keep.iter());
        let c = DVector::from_iterator(keep.len(), keep.iter().map(|&i| self.ell[i]));
        (keep, a, c)
    }

    fn embed(&self, keep: &[usize], s: &DVector<f64>) -> DVector<f64> {
        let mut theta = DVector::zeros(self.g.ncols());
        for (j, &i) in keep.iter().enumerate() {
            theta[i] = s[j];
        }
        theta
    }
}

/// Exact level-1 real positivity on a diagonal space: `Re f ≥ 0` on every
/// extreme generator of the accretive cone and `Re f = 0` where `Re z = 0`.
fn exact_positivity(f: &Functional, report: &mut CheckReport) -> Result<()> {
    let coords = DiagCoords::new(f)?;
    let (keep, a, c) = coords.reduced();
    if keep.len() > MAX_VARIABLES {
        report.note(format!(
            "{} real parameters: level-1 positivity is sampled only",
            keep.len()
        ));
        return Ok(());
    }
    report.note("level 1 decided exactly on the extreme generators of the accretive cone");
    let (leak, dir) = coords.skew_leak();
    report.trials += 1;
    report.record(0, leak, || {
        format!("Re f is {leak:.3e} on a direction with zero real part: {:?}", dir.map(|d| d.as_slice().to_vec()))
    });
    if keep.is_empty() {
        return Ok(());
    }
    for ray in polytope::extreme_rays(&(-&a), LP_TOL)? {
        let value = c.dot(&ray);
        report.trials += 1;
        report.metric_min("min_generator_value", value);
        let theta = coords.embed(&keep, &ray);
        let z = coords.element(f.space(), &theta)?;
        report.record(0, -value, || {
            format!("Re f = {value:.9e} on accretive generator {:?}", z.realized().diagonal())
        });
    }
    Ok(())
}

/// `sup{|Re f(z)| : h(z) ≤ 1}` at level 1 of a diagonal space; `+∞` when
/// `Re f` does not vanish where `h` does. `None` with more than three
/// independent real-part parameters.
pub fn exact_contraction_sup(f: &Functional) -> Result<Option<f64>> {
    let coords = DiagCoords::new(f)?;
    let (keep, a, c) = coords.reduced();
    if keep.len() > MAX_VARIABLES {
        return Ok(None);
    }
    if coords.skew_leak().0 > LP_TOL * (1.0 + coords.ell.amax()) {
        return Ok(Some(f64::INFINITY));
    }
    if keep.is_empty() {
        return Ok(Some(0.0));
    }
    let p = keep.len();
    let d = a.nrows();
    let mut stacked = DMatrix::zeros(2 * d, p);
    stacked.rows_mut(0, d).copy_from(&a);
    stacked.rows_mut(d, d).copy_from(&(-&a));
    let b = DVector::from_element(2 * d, 1.0);
    let mut best = 0.0f64;
    for obj in [c.clone(), -c] {
        match polytope::maximize(&obj, &stacked, &b, LP_TOL)? {
            LpOutcome::Optimal { value, .. } => best = best.max(value),
            LpOutcome::Unbounded { .. } => return Ok(Some(f64::INFINITY)),
            LpOutcome::Infeasible => unreachable!("s = 0 is feasible"),
        }
    }
    Ok(Some(best))
}

/// Real positivity of `f^{(n)}` for `n ≤ levels`: exact at level 1 on
/// diagonal spaces, on accretive samples otherwise.
pub fn is_real_cp(f: &Functional, levels: usize, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("real-cp", tol);
    if f.space().is_diagonal() {
        exact_positivity(f, &mut report)?;
    }
    let levels = levels.max(1);
    for t in 0..trials {
        let (s, mut rng) = trial_rng(seed, t);
        let n = 1 + t % levels;
        let z = match sample_element_with(f.space(), n, &mut rng, SampleMode::Accretive) {
            Ok(z) => z,
            Err(Error::SamplingExhausted { .. }) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        report.trials += 1;
        let m = linalg::real_part(&f.apply(&z)?)?;
        let low = linalg::lambda_min(&m)?;
        report.record(s, -low, || format!("n={n}: lambda_min(Re f(z)) = {low:.9e} on an accretive z"));
    }
    Ok(report)
}

/// `‖Re f^{(n)}(z)‖ ≤ h(z)` on samples at levels `≤ levels`; on diagonal
/// spaces with at most three real-part parameters also the exact level-1
/// supremum (metric `exact_sup`), which must not exceed 1.
pub fn is_real_cc(f: &Functional, levels: usize, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("real-cc", tol);
    let exact = if f.space().is_diagonal() { exact_contraction_sup(f)? } else { None };
    match exact {
        Some(sup) => {
            report.note("level-1 supremum computed exactly by vertex enumeration");
            report.metrics.insert("exact_sup".into(), sup);
            report.trials += 1;
            report.record(seed, sup - 1.0, || format!("sup |Re f| over the h-unit ball is {sup:.12}"));
        }
        None => report.note("sampling-only mode: no exact level-1 supremum"),
    }
    let levels = levels.max(1);
    for t in 0..trials {
        let (s, mut rng) = trial_rng(seed, t);
        let n = 1 + t % levels;
        let z = mixed_sample(f.space(), n, &mut rng)?;
        report.trials += 1;
        let lhs = linalg::spectral_norm(&linalg::real_part(&f.apply(&z)?)?);
        let h = gauge_h(&z);
        report.record(s, lhs - h, || format!("n={n}: |Re f(z)| = {lhs:.9e} > h(z) = {h:.9e}"));
    }
    Ok(report)
}

/// `sup{Re f(v) : v = v* in the space, unit − v ≥ 0}` for a diagonal space
/// and a positive diagonal `unit`: every positive extension `g` of `f` to
/// the diagonal algebra has `g(unit) ≥` this value. `+∞` when unbounded.
pub fn extension_lower_bound(f: &Functional, unit: &ComplexMatrix) -> Result<f64> {
    let coords = DiagCoords::new(f)?;
    let d = f.space().ambient_dim();
    if unit.rows() != d || unit.cols() != d || !unit.is_diagonal() {
        return Err(Error::InvalidArgument(format!("the unit must be a diagonal {d}x{d} matrix")));
    }
    let u = unit.diagonal();
    if u.iter().any(|x| x.im != 0.0 || !(x.re > 0.0)) {
        return Err(Error::InvalidArgument("the unit must have positive real diagonal entries".into()));
    }
    // Self-adjoint part: Im z = 0.
    let sa = subspace::null_space(&coords.g_imag, RANK_TOL);
    let p = sa.ncols();
    if p == 0 {
        return Ok(0.0);
    }
    if p > MAX_VARIABLES {
        return Err(Error::Unsupported(format!(
            "the self-adjoint part has {p} real parameters; at most {MAX_VARIABLES} are supported"
        )));
    }
    let a = &coords.g * &sa;
    let b = DVector::from_iterator(d, u.iter().map(|x| x.re));
    let c = sa.tr_mul(&coords.ell);
    match polytope::maximize(&c, &a, &b, LP_TOL)? {
        LpOutcome::Optimal { value, .. } => Ok(value.max(0.0)),
        LpOutcome::Unbounded { .. } => Ok(f64::INFINITY),
        LpOutcome::Infeasible => unreachable!("v = 0 is feasible for a positive unit"),
    }
}

/// Per-`n` outcome of the counterexample sweep.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleBounds {
    pub n: usize,
    /// Bound for the one-dimensional space `span{(−n, 0, 1)}` with `f(x) = n`.
    pub line_bound: f64,
    /// Bound for `span{(n, n, 0), (0, n, 1)}` with `f = (0, n/2)`.
    pub pair_bound: f64,
    /// Exact contraction supremum of the pair functional.
    pub pair_sup: f64,
}

/// Certifies at one `n > 2` that both functionals are real-cp and
/// contractive at level 1 (exactly), pass the sampled higher-level checks,
/// and yet force any positive extension to exceed 1 at the unit.
pub fn verify_extension_counterexamples(n: usize, cfg: &SolverConfig, trials: usize, tol: f64) -> Result<(CheckReport, CounterexampleBounds)> {
    if n <= 2 {
        return Err(Error::InvalidArgument(format!("n must exceed 2, got {n}")));
    }
    let mut report = CheckReport::new(format!("extension-counterexamples[n={n}]"), tol);
    let unit = ComplexMatrix::identity(3);
    let nf = n as f64;
    let mut bounds = CounterexampleBounds {
        n,
        line_bound: 0.0,
        pair_bound: 0.0,
        pair_sup: 0.0,
    };
    let (line, line_values) = catalog::line_functional(nf)?;
    let (pair, pair_values) = catalog::pair_functional(nf)?;
    for (label, space, values, want) in [
        ("line", &line, line_values, nf),
        ("pair", &pair, pair_values, nf / 2.0),
    ] {
        let f = Functional::new(space, values)?;
        let mut cp = is_real_cp(&f, cfg.level_cap, trials, cfg.seed, tol)?;
        cp.law_name = format!("{label}.real-cp");
        let mut cc = is_real_cc(&f, cfg.level_cap, trials, cfg.seed, tol)?;
        cc.law_name = format!("{label}.real-cc");
        let sup = cc.metrics.get("exact_sup").copied();
        report.absorb(cp);
        report.absorb(cc);
        let bound = extension_lower_bound(&f, &unit)?;
        report.metrics.insert(format!("{label}.bound"), bound);
        report.trials += 1;
        report.record(cfg.seed, (bound - want).abs(), || format!("{label}: bound {bound:.12} vs {want}"));
        report.record(cfg.seed, 1.0 + tol - bound, || format!("{label}: bound {bound:.12} does not exceed 1"));
        match label {
            "line" => bounds.line_bound = bound,
            _ => {
                bounds.pair_bound = bound;
                let s = sup.ok_or_else(|| Error::Unsupported("no exact supremum for the pair functional".into()))?;
                bounds.pair_sup = s;
                report.record(cfg.seed, (s - 1.0).abs(), || format!("pair: contraction supremum {s:.12} is not 1"));
            }
        }
    }
    Ok((report, bounds))
}

/// Runs [`verify_extension_counterexamples`] for each `n` and checks that the
/// pair bounds `n/2` strictly increase, i.e. no single constant bounds the
/// direct sum of the family.
pub fn verify_direct_sum_family(ns: &[usize], cfg: &SolverConfig, trials: usize, tol: f64) -> Result<(CheckReport, Vec<CounterexampleBounds>)> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("empty list of n".into()));
    }
    let mut report = CheckReport::new("direct-sum-family", tol);
    let mut all = Vec::new();
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &n in &sorted {
        let (r, b) = verify_extension_counterexamples(n, cfg, trials, tol)?;
        report.absorb(r);
        report.metrics.insert(format!("bound[n={n}]"), b.pair_bound);
        all.push(b);
    }
    for w in all.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        report.record(cfg.seed, a.pair_bound - b.pair_bound + tol, || {
            format!("bound at n={} ({}) is not below the bound at n={} ({})", a.n, a.pair_bound, b.n, b.pair_bound)
        });
    }
    report.note(format!(
        "pair bounds grow like n/2; the largest tested is {}",
        all.last().map(|b| b.pair_bound).unwrap_or(0.0)
    ));
    Ok((report, all))
}

/// Restriction of the state `diag(v) ↦ Σ p_j v_j` of the diagonal algebra.
pub fn restricted_state<'a>(space: &'a OperatorSpace, weights: &[f64]) -> Result<Functional<'a>> {
    let d = space.ambient_dim();
    if weights.len() != d || weights.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidArgument(format!("need {d} nonnegative weights")));
    }
    let total: f64 = weights.iter().sum();
    let values = space
        .basis()
        .iter()
        .map(|b| (0..d).fold(ZERO, |acc, j| acc + b.get(j, j) * (weights[j] / total)))
        .collect();
    Functional::new(space, values)
}
