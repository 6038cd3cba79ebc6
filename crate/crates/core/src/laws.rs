//! Randomized checkers for the matrix-gauge laws, generic over the gauge.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gauges::{gauge_h, gauge_norm, mixed_sample};
use crate::linalg::{self, ComplexMatrix, C64, I, ONE};
use crate::report::{trial_seed, CheckReport};
use crate::space::{sample_element_with, standard_spaces, OperatorSpace, SampleMode};

/// A level-indexed gauge together with the vector operations the laws need.
pub trait GaugeFamily {
    type Elem: Clone;

    fn name(&self) -> String;
    fn gauge(&self, z: &Self::Elem) -> Result<f64>;
    fn sample(&self, level: usize, rng: &mut ChaCha8Rng) -> Result<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn scale(&self, a: &Self::Elem, c: C64) -> Self::Elem;
    /// `Y* a X`.
    fn compress(&self, a: &Self::Elem, y: &ComplexMatrix, x: &ComplexMatrix) -> Result<Self::Elem>;
    fn direct_sum(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    /// Reference norm for ℂ-properness.
    fn norm(&self, a: &Self::Elem) -> f64;
    fn level(&self, a: &Self::Elem) -> usize;
    /// Whether `g(tz) = |t| g(z)` also holds for negative `t`.
    fn is_seminorm(&self) -> bool {
        false
    }
    fn level_cap(&self) -> usize;
    /// Highest level at which ℂ-properness is asserted.
    fn c_proper_level_cap(&self) -> usize {
        self.level_cap()
    }
}

pub(crate) fn trial_rng(seed: u64, trial: usize) -> (u64, ChaCha8Rng) {
    let s = trial_seed(seed, trial);
    (s, ChaCha8Rng::seed_from_u64(s))
}

pub(crate) fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let scale = 1.0 / ((2 * rows) as f64).sqrt();
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * scale
    })
}

pub(crate) fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    ComplexMatrix::from_dmatrix(g.into_dmatrix().qr().q())
}

fn level_in<R: Rng>(rng: &mut R, cap: usize) -> usize {
    rng.random_range(1..=cap.max(1))
}

/// Runs `body` once per trial; solver indeterminacy counts as a skipped trial.
fn run_trials<F>(report: &mut CheckReport, trials: usize, seed: u64, mut body: F) -> Result<()>
where
    F: FnMut(&mut CheckReport, u64, &mut ChaCha8Rng) -> Result<()>,
{
    for t in 0..trials {
        let (s, mut rng) = trial_rng(seed, t);
        match body(report, s, &mut rng) {
            Ok(()) => report.trials += 1,
            Err(Error::Indeterminate { .. }) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Congruence inequality `g(X*AX) ≤ ‖X‖² g(A)`, unitary invariance, and the
/// direct-sum law `g(A ⊕ B) = max(g(A), g(B))`.
pub fn check_matrix_compatible<G: GaugeFamily>(g: &G, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new(format!("matrix-compatible[{}]", g.name()), tol);
    let cap = g.level_cap();
    run_trials(&mut report, trials, seed, |report, s, rng| {
        let n = level_in(rng, cap);
        let k = level_in(rng, cap);
        let m = level_in(rng, cap);
        let a = g.sample(n, rng)?;
        let b = g.sample(m, rng)?;
        let x = random_matrix(rng, n, k);
        let ga = g.gauge(&a)?;
        let gb = g.gauge(&b)?;

        let xn = linalg::spectral_norm(&x);
        let lhs = g.gauge(&g.compress(&a, &x, &x)?)?;
        let slack = lhs - xn * xn * ga;
        report.record(s, slack, || {
            format!("congruence n={n} k={k}: g(X*AX)={lhs:.9e} > |X|^2 g(A)={:.9e}", xn * xn * ga)
        });

        let u = random_unitary(rng, n);
        let gu = g.gauge(&g.compress(&a, &u, &u)?)?;
        report.record(s, (gu - ga).abs(), || format!("unitary n={n}: g(U*AU)={gu:.9e} vs g(A)={ga:.9e}"));

        let gs = g.gauge(&g.direct_sum(&a, &b)?)?;
        report.record(s, (gs - ga.max(gb)).abs(), || {
            format!("direct sum n={n} m={m}: g(A+B)={gs:.9e} vs max={:.9e}", ga.max(gb))
        });
        let gaa = g.gauge(&g.direct_sum(&a, &a)?)?;
        report.record(s, (gaa - ga).abs(), || format!("A(+)A n={n}: {gaa:.9e} vs {ga:.9e}"));
        Ok(())
    })?;
    Ok(report)
}

const HOMOGENEITY_FACTORS: [f64; 4] = [0.0, 0.5, 2.0, 7.25];
const SEMINORM_FACTORS: [f64; 2] = [-1.0, -2.5];

/// Subadditivity, positive homogeneity (absolute homogeneity for seminorms),
/// `g(0) = 0` and ℂ-properness.
pub fn check_gauge_axioms<G: GaugeFamily>(g: &G, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new(format!("gauge-axioms[{}]", g.name()), tol);
    let cap = g.level_cap();
    run_trials(&mut report, trials, seed, |report, s, rng| {
        let n = level_in(rng, cap);
        let a = g.sample(n, rng)?;
        let b = g.sample(n, rng)?;
        let ga = g.gauge(&a)?;
        let gb = g.gauge(&b)?;
        let gab = g.gauge(&g.add(&a, &b)?)?;
        report.record(s, gab - ga - gb, || {
            format!("subadditivity n={n}: g(a+b)={gab:.9e} > {ga:.9e} + {gb:.9e}")
        });
        let mut factors = HOMOGENEITY_FACTORS.to_vec();
        if g.is_seminorm() {
            factors.extend(SEMINORM_FACTORS);
        }
        for t in factors {
            let gt = g.gauge(&g.scale(&a, C64::new(t, 0.0)))?;
            let want = t.abs() * ga;
            report.record(s, (gt - want).abs(), || format!("homogeneity n={n} t={t}: {gt:.9e} vs {want:.9e}"));
        }
        if n <= g.c_proper_level_cap() {
            c_proper_trial(g, report, s, &a)?;
        }
        Ok(())
    })?;
    Ok(report)
}

/// One ℂ-properness probe: rescale `z` so that `max_k g(iᵏz)` sits at half
/// the tolerance and require `‖z‖ ≤ 100·tol`.
fn c_proper_trial<G: GaugeFamily>(g: &G, report: &mut CheckReport, s: u64, z: &G::Elem) -> Result<()> {
    let tol = report.tolerance;
    let rotations = [ONE, I, -ONE, -I];
    let mut top = 0.0f64;
    for r in rotations {
        top = top.max(g.gauge(&g.scale(z, r))?);
    }
    let norm = g.norm(z);
    if norm == 0.0 {
        return Ok(());
    }
    report.metric_min("min_rotation_gauge_over_norm", top / norm);
    let scaled = if top <= tol { z.clone() } else { g.scale(z, C64::new(0.5 * tol / top, 0.0)) };
    let mut scaled_top = 0.0f64;
    for r in rotations {
        scaled_top = scaled_top.max(g.gauge(&g.scale(&scaled, r))?);
    }
    if scaled_top <= tol {
        let sn = g.norm(&scaled);
        report.record(s, sn - 100.0 * tol, || {
            format!("c-proper: all rotations gauge <= {scaled_top:.3e} but norm {sn:.3e}")
        });
    }
    Ok(())
}

/// ℂ-properness alone, including the zero element.
pub fn check_c_proper<G: GaugeFamily>(g: &G, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new(format!("c-proper[{}]", g.name()), tol);
    let cap = g.c_proper_level_cap();
    run_trials(&mut report, trials, seed, |report, s, rng| {
        let n = level_in(rng, cap);
        let z = g.sample(n, rng)?;
        let zero = g.scale(&z, C64::new(0.0, 0.0));
        let g0 = g.gauge(&zero)?;
        report.record(s, g0.abs(), || format!("g(0) = {g0:.3e}"));
        c_proper_trial(g, report, s, &z)
    })?;
    Ok(report)
}

/// `h(y) ≤ max(h(x), h(z))` whenever `y − x` and `z − y` are accretive.
pub fn check_normality(space: &OperatorSpace, level_cap: usize, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("normality", tol);
    run_trials(&mut report, trials, seed, |report, s, rng| {
        let n = level_in(rng, level_cap);
        let y = sample_element_with(space, n, rng, SampleMode::Generic)?;
        let p = sample_element_with(space, n, rng, SampleMode::Accretive)?;
        let q = sample_element_with(space, n, rng, SampleMode::Accretive)?;
        let x = y.sub(&p)?;
        let z = y.add(&q)?;
        let (hx, hy, hz) = (gauge_h(&x), gauge_h(&y), gauge_h(&z));
        report.record(s, hy - hx.max(hz), || {
            format!("n={n}: h(y)={hy:.9e} > max(h(x)={hx:.9e}, h(z)={hz:.9e})")
        });
        Ok(())
    })?;
    Ok(report)
}

/// The L∞ operator-space axioms for the gauge-induced norm: `‖Y*AX‖ ≤ ‖Y‖‖X‖‖A‖` and
/// `‖A ⊕ B‖ = max(‖A‖, ‖B‖)`.
#[allow(non_snake_case)]
pub fn check_Linf_norm_laws(space: &OperatorSpace, level_cap: usize, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("linf-norm", tol);
    run_trials(&mut report, trials, seed, |report, s, rng| {
        let n = level_in(rng, level_cap);
        let k = level_in(rng, level_cap);
        let m = level_in(rng, level_cap);
        let a = mixed_sample(space, n, rng)?;
        let b = mixed_sample(space, m, rng)?;
        let x = random_matrix(rng, n, k);
        let y = random_matrix(rng, n, k);
        let na = gauge_norm(&a);
        let nb = gauge_norm(&b);
        let lhs = gauge_norm(&a.compress(&y, &x)?);
        let bound = linalg::spectral_norm(&x) * linalg::spectral_norm(&y) * na;
        report.record(s, lhs - bound, || format!("n={n} k={k}: |Y*AX|={lhs:.9e} > {bound:.9e}"));
        let ns = gauge_norm(&a.direct_sum(&b)?);
        report.record(s, (ns - na.max(nb)).abs(), || {
            format!("n={n} m={m}: |A+B|={ns:.9e} vs max={:.9e}", na.max(nb))
        });
        Ok(())
    })?;
    Ok(report)
}

/// Splits `trials` across the five standard random spaces of `seed` and
/// merges the per-space reports.
pub fn over_standard_spaces<F>(law: &str, tol: f64, trials: usize, seed: u64, mut run: F) -> Result<CheckReport>
where
    F: FnMut(&OperatorSpace, usize, u64) -> Result<CheckReport>,
{
    let spaces = standard_spaces(seed);
    let mut merged = CheckReport::new(law, tol);
    let count = spaces.len();
    for (i, space) in spaces.iter().enumerate() {
        let share = trials / count + usize::from(i < trials % count);
        if share == 0 {
            continue;
        }
        let mut r = run(space, share, trial_seed(seed, 1_000_000 + i))?;
        r.law_name = format!("space{i}");
        merged.absorb(r);
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SolverConfig;
    use crate::gauges::{ConcreteGauge, GaugeKind};
    use crate::space::LevelElement;

    #[test]
    fn nu_h_nue_pass_the_laws_on_a_few_trials() {
        for space in standard_spaces(11) {
            for kind in [GaugeKind::Nu, GaugeKind::H, GaugeKind::NuE] {
                let g = ConcreteGauge::new(&space, kind, SolverConfig::default());
                let r = check_matrix_compatible(&g, 10, 1, 1e-8).unwrap();
                assert!(r.is_clean(), "{r:?}");
                let r = check_gauge_axioms(&g, 10, 2, 1e-8).unwrap();
                assert!(r.is_clean(), "{r:?}");
                let r = check_c_proper(&g, 5, 3, 1e-8).unwrap();
                assert!(r.is_clean(), "{r:?}");
            }
        }
    }

    #[test]
    fn a_broken_gauge_is_caught() {
        // λ_min instead of λ_max is not subadditive.
        struct Broken<'a>(&'a OperatorSpace);
        impl GaugeFamily for Broken<'_> {
            type Elem = LevelElement;
            fn name(&self) -> String {
                "broken".into()
            }
            fn gauge(&self, z: &LevelElement) -> Result<f64> {
                Ok(-linalg::lambda_min(&z.real_part())?)
            }
            fn sample(&self, level: usize, rng: &mut ChaCha8Rng) -> Result<LevelElement> {
                mixed_sample(self.0, level, rng)
            }
            fn add(&self, a: &LevelElement, b: &LevelElement) -> Result<LevelElement> {
                a.add(b)
            }
            fn scale(&self, a: &LevelElement, c: C64) -> LevelElement {
                a.scale(c)
            }
            fn compress(&self, a: &LevelElement, y: &ComplexMatrix, x: &ComplexMatrix) -> Result<LevelElement> {
                a.compress(y, x)
            }
            fn direct_sum(&self, a: &LevelElement, b: &LevelElement) -> Result<LevelElement> {
                a.direct_sum(b)
            }
            fn norm(&self, a: &LevelElement) -> f64 {
                linalg::spectral_norm(a.realized())
            }
            fn level(&self, a: &LevelElement) -> usize {
                a.level()
            }
            fn level_cap(&self) -> usize {
                2
            }
        }
        let space = &standard_spaces(0)[1];
        let r = check_matrix_compatible(&Broken(space), 30, 0, 1e-8).unwrap();
        assert!(!r.is_clean());
        assert!(!r.violations.is_empty());
    }

    #[test]
    fn reports_are_deterministic() {
        let space = &standard_spaces(4)[0];
        let g = ConcreteGauge::new(space, GaugeKind::Nu, SolverConfig::default());
        let a = check_gauge_axioms(&g, 8, 5, 1e-8).unwrap();
        let b = check_gauge_axioms(&g, 8, 5, 1e-8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normality_and_linf_small_runs() {
        for space in standard_spaces(2) {
            assert!(check_normality(&space, 3, 10, 0, 1e-8).unwrap().is_clean());
            assert!(check_Linf_norm_laws(&space, 3, 10, 0, 1e-8).unwrap().is_clean());
        }
    }
}
