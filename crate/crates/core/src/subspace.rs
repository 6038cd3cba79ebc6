//! Real linear subspaces given by spanning columns, thresholded by singular
//! values relative to the largest one.

use nalgebra::{ComplexField, DMatrix, DVector, Dyn, SVD};

/// Relative singular-value threshold used for rank, pruning and projection.
pub const RANK_TOL: f64 = 1e-10;

/// Singular value decomposition whose recomposition is verified.
///
/// The default nalgebra driver occasionally returns factors that do not
/// reproduce the input (seen on rank-deficient matrices with repeated
/// singular values); retry with a tight tolerance, then through the
/// transpose, then through a QR factor.
pub fn checked_svd<T>(a: &DMatrix<T>) -> SVD<T, Dyn, Dyn>
where
    T: ComplexField<RealField = f64>,
{
    let scale = a.iter().map(|x| x.clone().abs()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-11 * scale * (a.nrows().max(a.ncols()) as f64);
    let ok = |svd: &SVD<T, Dyn, Dyn>, target: &DMatrix<T>| {
        svd.clone()
            .recompose()
            .map(|r| (r - target).iter().all(|x| x.clone().abs() <= tol))
            .unwrap_or(false)
    };
    if let Some(svd) = a.clone().try_svd(true, true, 1e-15, 100_000) {
        if ok(&svd, a) {
            return svd;
        }
    }
    if let Some(t) = a.adjoint().try_svd(true, true, 1e-15, 100_000) {
        if ok(&t, &a.adjoint()) {
            return SVD {
                u: t.v_t.map(|v| v.adjoint()),
                v_t: t.u.map(|u| u.adjoint()),
                singular_values: t.singular_values,
            };
        }
    }
    if a.nrows() >= a.ncols() {
        let qr = a.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        if let Some(inner) = r.clone().try_svd(true, true, 1e-15, 100_000) {
            if ok(&inner, &r) {
                return SVD {
                    u: inner.u.map(|u| q * u),
                    v_t: inner.v_t,
                    singular_values: inner.singular_values,
                };
            }
        }
    }
    panic!("singular value decomposition failed to converge on a {}x{} matrix", a.nrows(), a.ncols());
}

fn padded_svd(a: &DMatrix<f64>) -> SVD<f64, Dyn, Dyn> {
    let (r, c) = a.shape();
    if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        checked_svd(&p)
    } else {
        checked_svd(a)
    }
}

fn threshold(sv: &DVector<f64>, rel: f64) -> f64 {
    let top = sv.iter().copied().fold(0.0, f64::max);
    rel * top
}

/// Orthonormal basis of the column space of `a`.
pub fn range_basis(a: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let rows = a.nrows();
    if a.ncols() == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = padded_svd(a);
    let thr = threshold(&svd.singular_values, rel);
    let u = svd.u.as_ref().expect("left vectors requested");
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > thr && s > 0.0)
        .map(|(i, _)| i)
        .collect();
    let mut out = DMatrix::zeros(rows, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.column_mut(dst).copy_from(&u.column(src).rows(0, rows));
    }
    out
}

/// Orthonormal basis of the kernel of `a`.
pub fn null_space(a: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let cols = a.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 || a.iter().all(|&x| x == 0.0) {
        return DMatrix::identity(cols, cols);
    }
    let svd = padded_svd(a);
    let thr = threshold(&svd.singular_values, rel);
    let vt = svd.v_t.as_ref().expect("right vectors requested");
    let small: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= thr)
        .map(|(i, _)| i)
        .collect();
    let mut out = DMatrix::zeros(cols, small.len());
    for (dst, &src) in small.iter().enumerate() {
        out.column_mut(dst).copy_from(&vt.row(src).transpose());
    }
    out
}

/// Moore-Penrose pseudo-inverse with relative singular-value cutoff.
pub fn pseudo_inverse(a: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return DMatrix::zeros(c, r);
    }
    let svd = checked_svd(a);
    let thr = threshold(&svd.singular_values, rel);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let mut out = DMatrix::zeros(c, r);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > thr && s > 0.0 {
            out += (vt.row(i).transpose() / s) * u.column(i).transpose();
        }
    }
    out
}

/// Numerical rank plus the smallest retained and largest singular values.
pub fn rank_profile(a: &DMatrix<f64>, rel: f64) -> (usize, f64, f64) {
    if a.nrows() == 0 || a.ncols() == 0 {
        return (0, 0.0, 0.0);
    }
    let sv = checked_svd(a).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    let bottom = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let rank = sv.iter().filter(|&&s| s > rel * top && s > 0.0).count();
    (rank, bottom, top)
}

/// Indices of a maximal linearly independent subset of the columns, chosen greedily left to right.
pub fn independent_columns(a: &DMatrix<f64>, rel: f64) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return chosen;
    }
    for j in 0..a.ncols() {
        let mut trial = chosen.clone();
        trial.push(j);
        let sub = a.select_columns(trial.iter());
        let (rank, _, _) = rank_profile(&sub, rel);
        if rank == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

/// Orthogonal projector onto the span of orthonormal columns.
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    pub basis: DMatrix<f64>,
}

impl OrthoBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        if self.dim() == 0 {
            return DVector::zeros(v.len());
        }
        let coords = self.basis.tr_mul(v);
        &self.basis * coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&a, RANK_TOL);
        assert_eq!(k.ncols(), 2);
        assert!((&a * &k).norm() < 1e-12);
    }

    #[test]
    fn range_and_rank() {
        let a = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert_eq!(range_basis(&a, RANK_TOL).ncols(), 1);
        assert_eq!(rank_profile(&a, RANK_TOL).0, 1);
        assert_eq!(independent_columns(&a, RANK_TOL), vec![0]);
    }

    #[test]
    fn pseudo_inverse_solves_consistent_systems() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let x = DVector::from_vec(vec![0.5, -2.0]);
        let b = &a * &x;
        let back = pseudo_inverse(&a, RANK_TOL) * b;
        assert!((back - x).norm() < 1e-12);
    }
}
