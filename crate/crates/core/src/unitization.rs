//! The unitization `Z × ℂ` of a concrete gauge space and its gauge
//!
//! ```text
//! u_n(A, X) = inf { t > 0 : X_t ≫ 0, ν(X_t^{-1/2} A X_t^{-1/2}) ≤ 1 },   X_t = tI − Re X
//! ```
//!
//! computed by bisection; feasibility in `t` is monotone.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::gauges::{gauge_nu, mixed_sample};
use crate::laws::{check_gauge_axioms, check_matrix_compatible, random_matrix, trial_rng, GaugeFamily};
use crate::linalg::{self, ComplexMatrix, C64};
use crate::report::CheckReport;
use crate::space::{LevelElement, OperatorSpace};

/// `(A, X) ∈ M_n(Z) × M_n`.
#[derive(Clone, Debug, Serialize)]
pub struct UnitizedElement {
    #[serde(rename = "A")]
    a: LevelElement,
    #[serde(rename = "X")]
    x: ComplexMatrix,
}

impl UnitizedElement {
    pub fn new(a: LevelElement, x: ComplexMatrix) -> Result<Self> {
        if !x.is_square() || x.rows() != a.level() {
            return Err(Error::Dimension(format!(
                "scalar part is {}x{} but the space part has level {}",
                x.rows(),
                x.cols(),
                a.level()
            )));
        }
        Ok(Self { a, x })
    }

    /// `(z, 0)`.
    pub fn embed(a: LevelElement) -> Self {
        let n = a.level();
        Self {
            a,
            x: ComplexMatrix::zeros(n, n),
        }
    }

    /// `e ⊗ I_n = (0, I_n)`.
    pub fn unit(space: &OperatorSpace, n: usize) -> Result<Self> {
        Ok(Self {
            a: space.zero_element(n)?,
            x: ComplexMatrix::identity(n),
        })
    }

    pub fn a(&self) -> &LevelElement {
        &self.a
    }

    pub fn x(&self) -> &ComplexMatrix {
        &self.x
    }

    pub fn level(&self) -> usize {
        self.a.level()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(self.a.add(&other.a)?, &self.x + &other.x)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            a: self.a.scale(c),
            x: self.x.scale(c),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    /// `(A, X − t I)`, i.e. `(A, X) − t·e`.
    pub fn shift(&self, t: f64) -> Self {
        let n = self.level();
        Self {
            a: self.a.clone(),
            x: &self.x - &ComplexMatrix::identity(n).scale_real(t),
        }
    }

    /// `(Y*AX, Y*XX)`.
    pub fn compress(&self, y: &ComplexMatrix, x: &ComplexMatrix) -> Result<Self> {
        let a = self.a.compress(y, x)?;
        let s = &(&y.adjoint() * &self.x) * x;
        Self::new(a, s)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Self::new(self.a.direct_sum(&other.a)?, linalg::direct_sum(&self.x, &other.x))
    }
}

/// Precomputed pieces of the feasibility test for one element.
struct Feasibility {
    re_a: ComplexMatrix,
    re_x: ComplexMatrix,
    d: usize,
    lambda_max_x: f64,
    nu_a: f64,
}

impl Feasibility {
    fn new(e: &UnitizedElement) -> Self {
        let re_x = linalg::real_part(&e.x).expect("square by construction");
        let lambda_max_x = linalg::lambda_max(&re_x).expect("Hermitian by construction");
        Self {
            re_a: e.a.real_part(),
            re_x,
            d: e.a.ambient_dim(),
            lambda_max_x,
            nu_a: gauge_nu(&e.a),
        }
    }

    fn holds(&self, t: f64, cfg: &SolverConfig) -> bool {
        let n = self.re_x.rows();
        let xt = &ComplexMatrix::identity(n).scale_real(t) - &self.re_x;
        let eig = linalg::hermitian_eig(&xt).expect("Hermitian by construction");
        if eig.min() <= cfg.strict_pos_tol {
            return false;
        }
        let k = eig.map(|l| 1.0 / l.sqrt()).kron(&ComplexMatrix::identity(self.d));
        let scaled = &(&k * &self.re_a) * &k;
        let nu = linalg::lambda_max(&scaled).expect("Hermitian by construction").max(0.0);
        nu <= 1.0 + cfg.unitization_feas_tol
    }
}

/// Whether `t` is admissible in the infimum defining `u`.
pub fn u_feasible(e: &UnitizedElement, t: f64, cfg: &SolverConfig) -> bool {
    Feasibility::new(e).holds(t, cfg)
}

/// `u_n(A, X)` by bisection on `[max(λ_max(Re X), 0), that + ν(A) + 1]`.
pub fn gauge_u(e: &UnitizedElement, cfg: &SolverConfig) -> f64 {
    let f = Feasibility::new(e);
    let mut lo = f.lambda_max_x.max(0.0);
    // λ_min(X_hi) ≥ ν(A) + 1, so ν(X_hi^{-1/2} A X_hi^{-1/2}) ≤ ν(A)/(ν(A)+1) < 1.
    let mut hi = lo + f.nu_a + 1.0;
    if lo == 0.0 && f.holds(0.0, cfg) {
        return 0.0;
    }
    while hi - lo > cfg.unitization_bisect_tol {
        let mid = 0.5 * (lo + hi);
        if f.holds(mid, cfg) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `inf{t > 0 : t·e⊗I − (A, X) accretive in the unitization}`. An element
/// `w` is accretive there when `u(−w) = 0`, and `−(t·e⊗I − (A, X))` is
/// `(A, X − tI)`; "= 0" is read as "below four bisection tolerances".
pub fn order_unit_formula(e: &UnitizedElement, cfg: &SolverConfig) -> f64 {
    let zero_tol = 4.0 * cfg.unitization_bisect_tol;
    let pred = |t: f64| gauge_u(&e.shift(t), cfg) <= zero_tol;
    let f = Feasibility::new(e);
    let mut lo = 0.0;
    let mut hi = f.lambda_max_x.max(0.0) + f.nu_a + 1.0;
    if pred(lo) {
        return 0.0;
    }
    while hi - lo > cfg.unitization_bisect_tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `u` as a [`GaugeFamily`] over the unitization of `space`.
#[derive(Clone, Debug)]
pub struct UnitizationGauge<'a> {
    pub space: &'a OperatorSpace,
    pub cfg: SolverConfig,
    pub level_cap: usize,
}

impl<'a> UnitizationGauge<'a> {
    pub fn new(space: &'a OperatorSpace, cfg: SolverConfig, level_cap: usize) -> Self {
        Self { space, cfg, level_cap }
    }
}

/// Space part from the usual mix; scalar part zero, negative semidefinite,
/// or a randomly scaled complex Gaussian matrix.
fn sample_unitized(space: &OperatorSpace, n: usize, rng: &mut ChaCha8Rng) -> Result<UnitizedElement> {
    let a = mixed_sample(space, n, rng)?;
    let roll: f64 = rng.random();
    let x = if roll < 0.15 {
        ComplexMatrix::zeros(n, n)
    } else if roll < 0.3 {
        let g = random_matrix(rng, n, n);
        (&g * &g.adjoint()).scale_real(-1.0)
    } else {
        let s: f64 = rng.random_range(0.1..3.0);
        random_matrix(rng, n, n).scale_real(s)
    };
    UnitizedElement::new(a, x)
}

impl GaugeFamily for UnitizationGauge<'_> {
    type Elem = UnitizedElement;

    fn name(&self) -> String {
        "u".to_string()
    }

    fn gauge(&self, z: &UnitizedElement) -> Result<f64> {
        Ok(gauge_u(z, &self.cfg))
    }

    fn sample(&self, level: usize, rng: &mut ChaCha8Rng) -> Result<UnitizedElement> {
        sample_unitized(self.space, level, rng)
    }

    fn add(&self, a: &UnitizedElement, b: &UnitizedElement) -> Result<UnitizedElement> {
        a.add(b)
    }

    fn scale(&self, a: &UnitizedElement, c: C64) -> UnitizedElement {
        a.scale(c)
    }

    fn compress(&self, a: &UnitizedElement, y: &ComplexMatrix, x: &ComplexMatrix) -> Result<UnitizedElement> {
        a.compress(y, x)
    }

    fn direct_sum(&self, a: &UnitizedElement, b: &UnitizedElement) -> Result<UnitizedElement> {
        a.direct_sum(b)
    }

    fn norm(&self, a: &UnitizedElement) -> f64 {
        linalg::spectral_norm(a.a.realized()).max(linalg::spectral_norm(&a.x))
    }

    fn level(&self, a: &UnitizedElement) -> usize {
        a.level()
    }

    fn level_cap(&self) -> usize {
        self.level_cap
    }

    // Only level 1 is claimed: u_1(iᵏ(z, λ)) = 0 for all k forces λ = 0.
    fn c_proper_level_cap(&self) -> usize {
        1
    }
}

/// Matrix compatibility and gauge axioms of `u` at levels ≤ 2, plus the
/// identities tying it to `ν` and to the unit `e = (0, 1)`:
///
/// - `u(z, 0) = ν(z)`;
/// - `u(A, X) = inf{t : t·e⊗I − (A, X) accretive}`;
/// - `u((A, X) − t·e) = 0` for `t ≥ u(A, X)` (archimedean);
/// - `u(e ⊗ I_n) = 1`;
/// - feasibility at `u + 2δ` and infeasibility at `u − 2δ` (bisection soundness).
///
/// Per-identity maxima are stored as metrics.
pub fn check_unitization_laws(
    space: &OperatorSpace,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig,
    tol: f64,
) -> Result<CheckReport> {
    cfg.validate()?;
    let cap = cfg.level_cap.min(2);
    let family = UnitizationGauge::new(space, cfg.clone(), cap);
    let mut report = CheckReport::new("unitization", tol);
    report.absorb(check_matrix_compatible(&family, trials, seed, tol)?);
    report.absorb(check_gauge_axioms(&family, trials, seed ^ 0x0a1, tol)?);

    let delta = cfg.unitization_bisect_tol;
    for t in 0..trials {
        let (s, mut rng) = trial_rng(seed ^ 0x0b2, t);
        let n = rng.random_range(1..=cap);
        let e = sample_unitized(space, n, &mut rng)?;
        report.trials += 1;

        let emb = (gauge_u(&UnitizedElement::embed(e.a.clone()), cfg) - gauge_nu(&e.a)).abs();
        report.metric_max("max_embedding_gap", emb);
        report.record(s, emb, || format!("n={n}: |u(z,0) - nu(z)| = {emb:.3e}"));

        let u = gauge_u(&e, cfg);
        let cross = order_unit_formula(&e, cfg);
        let gap = (u - cross).abs();
        report.metric_max("max_order_unit_gap", gap);
        report.record(s, gap, || format!("n={n}: u={u:.9e} vs order-unit formula {cross:.9e}"));

        for extra in [tol, 0.5, 3.0] {
            let v = gauge_u(&e.shift(u + extra), cfg);
            report.metric_max("max_archimedean", v);
            report.record(s, v, || format!("n={n}: u((A,X) - (u+{extra})e) = {v:.3e}"));
        }

        let f = Feasibility::new(&e);
        if !f.holds(u + 2.0 * delta, cfg) {
            report.record(s, f64::INFINITY, || format!("n={n}: infeasible just above u={u:.9e}"));
        }
        if u - 2.0 * delta > f.lambda_max_x.max(0.0) && f.holds(u - 2.0 * delta, cfg) {
            report.record(s, f64::INFINITY, || format!("n={n}: feasible just below u={u:.9e}"));
        }
    }
    for n in 1..=cap {
        let v = gauge_u(&UnitizedElement::unit(space, n)?, cfg);
        report.metric_max("max_unit_gap", (v - 1.0).abs());
        report.record(cfg.seed, (v - 1.0).abs(), || format!("u(e (x) I_{n}) = {v:.9e}"));
    }
    Ok(report)
}
