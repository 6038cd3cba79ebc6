//! Log-barrier path following for
//!
//! ```text
//! minimize t  subject to  H + εI ⪰ 0,  tI − R − H ⪰ 0,  tI + R + H ⪰ 0,  H ∈ W
//! ```
//!
//! i.e. `min ‖R + H‖` over `H ∈ W` that are PSD up to `ε`. The relaxation by
//! `ε` supplies a strictly feasible start even when `W ∩ PSD` has empty
//! interior. The optimum of the relaxed problem lies below the unrelaxed one,
//! so the duality-gap bound of the central path is a valid lower bound for
//! the maximal gauge.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{hermitian_to_vec, C64};

const MAX_NEWTON_PER_STAGE: usize = 80;
const MAX_STAGES: usize = 40;
const STAGE_GROWTH: f64 = 10.0;

pub(crate) struct BarrierOutcome {
    /// Final `H`, with `λ_min(H) ≥ −ε`.
    pub h: DMatrix<C64>,
    /// `‖R + H‖`.
    pub upper: f64,
    /// Lower bound on the `ε`-relaxed optimum.
    pub lower: f64,
    pub newton_steps: usize,
}

struct Block {
    /// `M^{-1/2}`.
    root: DMatrix<C64>,
}

/// `M^{-1/2}` when `M ≻ 0`.
fn inverse_root(m: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return None;
    }
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(1.0 / l.sqrt(), 0.0)));
    Some(v * d * v.adjoint())
}

fn is_pd(m: &DMatrix<C64>) -> bool {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    herm.cholesky().is_some()
}

fn hvec(m: &DMatrix<C64>) -> DVector<f64> {
    DVector::from_vec(hermitian_to_vec(&crate::linalg::ComplexMatrix::from_dmatrix(m.clone())))
}

fn spectral_norm_hermitian(m: &DMatrix<C64>) -> f64 {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    herm.symmetric_eigenvalues().iter().fold(0.0f64, |a, &l| a.max(l.abs()))
}

/// Solves the relaxed problem; `basis` spans `W` and `r` is `Re(z)`.
/// Returns `None` if Newton's method breaks down numerically.
pub(crate) fn solve(basis: &[DMatrix<C64>], r: &DMatrix<C64>, eps: f64, gap_tol: f64) -> Option<BarrierOutcome> {
    let m = r.nrows();
    let q = basis.len();
    let id = DMatrix::<C64>::identity(m, m);
    let nu = 3.0 * m as f64;
    let r_norm = spectral_norm_hermitian(r);

    let h_of = |x: &DVector<f64>| -> DMatrix<C64> {
        let mut h = DMatrix::<C64>::zeros(m, m);
        for (i, qi) in basis.iter().enumerate() {
            if x[i] != 0.0 {
                h += qi * C64::new(x[i], 0.0);
            }
        }
        h
    };
    let blocks_at = |x: &DVector<f64>, t: f64| -> [DMatrix<C64>; 3] {
        let h = h_of(x);
        let a = &h + &id * C64::new(eps, 0.0);
        let b = &id * C64::new(t, 0.0) - r - &h;
        let c = &id * C64::new(t, 0.0) + r + &h;
        [a, b, c]
    };

    let mut x = DVector::<f64>::zeros(q);
    let mut t = r_norm + 1.0;
    let mut s = nu / t.max(1.0);
    let mut newton_steps = 0;

    for _stage in 0..MAX_STAGES {
        for _ in 0..MAX_NEWTON_PER_STAGE {
            let mats = blocks_at(&x, t);
            let blocks: Vec<Block> = mats
                .iter()
                .map(|mm| inverse_root(mm).map(|root| Block { root }))
                .collect::<Option<_>>()?;
            // Columns: d/dx_i then d/dt of each block, congruated by M^{-1/2}.
            let dim = m * m;
            let mut hess = DMatrix::<f64>::zeros(q + 1, q + 1);
            let mut grad = DVector::<f64>::zeros(q + 1);
            grad[q] = s;
            for (bi, blk) in blocks.iter().enumerate() {
                let sign = match bi {
                    0 => 1.0,
                    1 => -1.0,
                    _ => 1.0,
                };
                let mut kmat = DMatrix::<f64>::zeros(dim, q + 1);
                for (i, qi) in basis.iter().enumerate() {
                    let k = &blk.root * qi * &blk.root * C64::new(sign, 0.0);
                    grad[i] -= k.trace().re;
                    kmat.set_column(i, &hvec(&k));
                }
                if bi > 0 {
                    let k = &blk.root * &blk.root;
                    grad[q] -= k.trace().re;
                    kmat.set_column(q, &hvec(&k));
                }
                hess += kmat.tr_mul(&kmat);
            }
            let step = solve_spd(&hess, &(-&grad))?;
            let dec2 = -grad.dot(&step);
            newton_steps += 1;
            if !(dec2 >= 0.0) {
                return None;
            }
            if dec2 < 1e-12 {
                break;
            }
            let lambda = dec2.sqrt();
            let mut alpha = if lambda > 0.25 { 1.0 / (1.0 + lambda) } else { 1.0 };
            let mut accepted = false;
            for _ in 0..60 {
                let xn = &x + step.rows(0, q) * alpha;
                let tn = t + step[q] * alpha;
                if blocks_at(&xn, tn).iter().all(is_pd) {
                    x = xn;
                    t = tn;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
            if lambda <= 0.25 && dec2 < 1e-10 {
                break;
            }
        }
        if nu / s <= gap_tol {
            break;
        }
        s *= STAGE_GROWTH;
    }
    let h = h_of(&x);
    let upper = spectral_norm_hermitian(&(r + &h));
    let lower = (t - 2.0 * nu / s).max(0.0);
    Some(BarrierOutcome {
        h,
        upper,
        lower,
        newton_steps,
    })
}

fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = a.clone().cholesky() {
        let x = ch.solve(b);
        if x.iter().all(|v| v.is_finite()) {
            return Some(x);
        }
    }
    let pinv = crate::subspace::pseudo_inverse(a, 1e-14);
    let x = pinv * b;
    x.iter().all(|v| v.is_finite()).then_some(x)
}
