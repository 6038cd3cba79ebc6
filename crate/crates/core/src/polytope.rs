//! Exact small linear programs `max c·s` subject to `A s ≤ b`, for at most
//! three variables, by enumerating vertices and extreme rays.
//!
//! With `A` of full column rank the feasible set is pointed, so it is empty
//! iff it has no vertex, and the objective is unbounded iff some extreme ray
//! `r` of `{r : A r ≤ 0}` has `c·r > 0`. Vertices are the feasible solutions
//! of `p` active constraints, extreme rays the one-dimensional kernels of
//! `p − 1` of them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::subspace::{self, RANK_TOL};

pub const MAX_VARIABLES: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: DVector<f64> },
    Unbounded { ray: DVector<f64> },
    Infeasible,
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

fn check_shape(a: &DMatrix<f64>) -> Result<usize> {
    let p = a.ncols();
    if p == 0 || p > MAX_VARIABLES {
        return Err(Error::Unsupported(format!(
            "exact enumeration handles 1 to {MAX_VARIABLES} variables, got {p}"
        )));
    }
    let (rank, _, _) = subspace::rank_profile(a, RANK_TOL);
    if rank < p {
        return Err(Error::Unsupported("constraint matrix is not of full column rank".into()));
    }
    Ok(p)
}

fn scale_of(a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
    1.0 + a.amax().max(b.amax())
}

/// Vertices of `{s : A s ≤ b}`, feasible within `tol` (relative to the data scale).
pub fn vertices(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Result<Vec<DVector<f64>>> {
    let p = check_shape(a)?;
    let slack = tol * scale_of(a, b);
    let mut out: Vec<DVector<f64>> = Vec::new();
    for rows in subsets(a.nrows(), p) {
        let sub = a.select_rows(rows.iter());
        let rhs = DVector::from_iterator(p, rows.iter().map(|&i| b[i]));
        let (rank, _, _) = subspace::rank_profile(&sub, RANK_TOL);
        if rank < p {
            continue;
        }
        let Some(s) = sub.lu().solve(&rhs) else { continue };
        if (a * &s - b).iter().all(|&v| v <= slack) && !out.iter().any(|v| (v - &s).amax() <= slack) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Extreme rays of the recession cone `{r : A r ≤ 0}`, unit length.
pub fn extreme_rays(a: &DMatrix<f64>, tol: f64) -> Result<Vec<DVector<f64>>> {
    let p = check_shape(a)?;
    let slack = tol * (1.0 + a.amax());
    let mut out: Vec<DVector<f64>> = Vec::new();
    for rows in subsets(a.nrows(), p - 1) {
        let ker = if rows.is_empty() {
            DMatrix::identity(p, p)
        } else {
            subspace::null_space(&a.select_rows(rows.iter()), RANK_TOL)
        };
        if ker.ncols() != 1 {
            continue;
        }
        let r = ker.column(0).normalize();
        for cand in [r.clone(), -r] {
            if (a * &cand).iter().all(|&v| v <= slack) && !out.iter().any(|v| (v - &cand).amax() <= 1e-9) {
                out.push(cand);
            }
        }
    }
    Ok(out)
}

/// `max c·s` subject to `A s ≤ b`.
pub fn maximize(c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Result<LpOutcome> {
    if c.len() != a.ncols() || b.len() != a.nrows() {
        return Err(Error::Dimension(format!(
            "objective of length {}, {}x{} constraints, right-hand side of length {}",
            c.len(),
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let verts = vertices(a, b, tol)?;
    if verts.is_empty() {
        return Ok(LpOutcome::Infeasible);
    }
    let c_scale = tol * (1.0 + c.amax());
    if let Some(ray) = extreme_rays(a, tol)?.into_iter().find(|r| c.dot(r) > c_scale) {
        return Ok(LpOutcome::Unbounded { ray });
    }
    let (value, point) = verts
        .into_iter()
        .map(|v| (c.dot(&v), v))
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .expect("nonempty");
    Ok(LpOutcome::Optimal { value, point })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn square_box() {
        let a = m(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        let b = DVector::from_vec(vec![1.0, 1.0, 2.0, 2.0]);
        let c = DVector::from_vec(vec![1.0, 1.0]);
        match maximize(&c, &a, &b, 1e-12).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert!((value - 3.0).abs() < 1e-12);
                assert!((point[0] - 1.0).abs() < 1e-12 && (point[1] - 2.0).abs() < 1e-12);
            }
            o => panic!("{o:?}"),
        }
        assert_eq!(vertices(&a, &b, 1e-12).unwrap().len(), 4);
        assert!(extreme_rays(&a, 1e-12).unwrap().is_empty());
    }

    #[test]
    fn open_quadrant_is_unbounded_only_upward() {
        // s ≥ 0 componentwise.
        let a = m(&[&[-1.0, 0.0], &[0.0, -1.0]]);
        let b = DVector::zeros(2);
        assert!(matches!(
            maximize(&DVector::from_vec(vec![1.0, 0.0]), &a, &b, 1e-12).unwrap(),
            LpOutcome::Unbounded { .. }
        ));
        match maximize(&DVector::from_vec(vec![-1.0, -2.0]), &a, &b, 1e-12).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, 0.0),
            o => panic!("{o:?}"),
        }
        assert_eq!(extreme_rays(&a, 1e-12).unwrap().len(), 2);
    }

    #[test]
    fn one_variable_and_infeasible() {
        let a = m(&[&[1.0], &[-1.0]]);
        let infeasible = DVector::from_vec(vec![-1.0, -1.0]);
        assert_eq!(maximize(&DVector::from_vec(vec![1.0]), &a, &infeasible, 1e-12).unwrap(), LpOutcome::Infeasible);
        let half_line = m(&[&[1.0]]);
        assert!(matches!(
            maximize(&DVector::from_vec(vec![-1.0]), &half_line, &DVector::from_vec(vec![2.0]), 1e-12).unwrap(),
            LpOutcome::Unbounded { .. }
        ));
    }

    #[test]
    fn three_variables_simplex() {
        let a = m(&[&[-1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, -1.0], &[1.0, 1.0, 1.0]]);
        let b = DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(vertices(&a, &b, 1e-12).unwrap().len(), 4);
        match maximize(&DVector::from_vec(vec![1.0, 3.0, 2.0]), &a, &b, 1e-12).unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value - 3.0).abs() < 1e-12),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn rejects_rank_deficient_or_large() {
        let a = m(&[&[1.0, 1.0], &[2.0, 2.0]]);
        assert!(vertices(&a, &DVector::zeros(2), 1e-12).is_err());
        let big = DMatrix::<f64>::identity(4, 4);
        assert!(vertices(&big, &DVector::zeros(4), 1e-12).is_err());
    }
}
