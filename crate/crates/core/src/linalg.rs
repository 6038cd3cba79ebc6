//! Dense complex linear algebra.
//!
//! Everything the gauges need reduces to spectra of Hermitian matrices:
//! positive parts, spectral norms, and the two Frobenius projections (onto
//! the PSD cone and onto a spectral-norm ball) used by the maximal-gauge
//! solver. Matrices are immutable values; every operation returns a fresh
//! matrix.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative asymmetry accepted by [`hermitian_eig`] before it refuses the input.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Dense complex matrix, row-major in its serialized form.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(r, c, entries)
    }

    pub fn from_dmatrix(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Single-entry matrix unit `E_{r,s}`.
    pub fn unit(rows: usize, cols: usize, r: usize, s: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| if i == r && j == s { ONE } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.inner
    }

    /// Row-major copy of the entries.
    pub fn entries(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols()))
            .map(|i| self.inner[(i, i)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            inner: self.inner.map(|x| x * c),
        }
    }

    pub fn scale_real(&self, t: f64) -> Self {
        Self {
            inner: self.inner.map(|x| x * t),
        }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.inner.shape() != other.inner.shape() {
            return f64::INFINITY;
        }
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise equality within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Largest entrywise modulus of `self - self*`.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows())
                .all(|i| (0..self.cols()).all(|j| i == j || self.inner[(i, j)] == ZERO))
    }

    /// Frobenius inner product `Re tr(self* other)`.
    pub fn real_inner(&self, other: &Self) -> f64 {
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Kronecker product with `self` as the outer factor.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.kronecker(&other.inner),
        }
    }

    /// Copy of the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self {
            inner: self.inner.view((r0, c0), (rows, cols)).into_owned(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                if z.im == 0.0 {
                    write!(f, "{}", z.re)?;
                } else {
                    write!(f, "{}{:+}i", z.re, z.im)?;
                }
            }
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            inner: -&self.inner,
        }
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows())
            .map(|i| {
                (0..self.cols())
                    .map(|j| {
                        let z = self.inner[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(D::Error::custom("matrix rows have different lengths"));
        }
        let entries = rows
            .into_iter()
            .flatten()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::new(r, c, entries).map_err(D::Error::custom)
    }
}

/// Serde adapter for complex vectors written as `[[re, im], ...]`.
pub mod serde_c64_vec {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Spectral calculus: `U f(Λ) U*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let u = self.eigenvectors.as_dmatrix();
        let mut scaled = u.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = f(lambda);
            scaled.column_mut(j).scale_mut(v);
        }
        ComplexMatrix::from_dmatrix(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }
}

fn require_square(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "{what} needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    require_square(h, "Hermitian eigendecomposition")?;
    let asym = h.asymmetry();
    if asym > HERMITIAN_TOL * (1.0 + h.max_abs()) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    Ok(())
}

/// `(M + M*) / 2`.
pub fn real_part(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(m, "real part")?;
    Ok((m + &m.adjoint()).scale_real(0.5))
}

/// `(M - M*) / 2i`.
pub fn imag_part(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(m, "imaginary part")?;
    Ok((m - &m.adjoint()).scale(C64::new(0.0, -0.5)))
}

fn symmetrize(h: &ComplexMatrix) -> DMatrix<C64> {
    (h.as_dmatrix() + h.as_dmatrix().adjoint()) * C64::new(0.5, 0.0)
}

/// Full Hermitian eigendecomposition. The input is symmetrized before
/// decomposition; diagonal inputs bypass the iterative solver.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(h)?;
    let n = h.rows();
    if h.is_diagonal() {
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| h.get(i, i).re).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let eigenvalues = order.iter().map(|&i| diag[i]).collect();
        let eigenvectors =
            ComplexMatrix::from_fn(n, n, |i, j| if order[j] == i { ONE } else { ZERO });
        return Ok(HermitianEig {
            eigenvalues,
            eigenvectors,
        });
    }
    let eig = checked_symmetric_eigen(symmetrize(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    if h.is_diagonal() {
        let mut values: Vec<f64> = (0..h.rows()).map(|i| h.get(i, i).re).collect();
        values.sort_by(f64::total_cmp);
        return Ok(values);
    }
    Ok(hermitian_eig(h)?.eigenvalues)
}

/// Symmetric eigensolver with a residual check; the default driver is
/// retried with a tighter tolerance when `HV ≠ VΛ`.
fn checked_symmetric_eigen(m: DMatrix<C64>) -> nalgebra::SymmetricEigen<C64, nalgebra::Dyn> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-11 * scale * m.nrows() as f64;
    let good = |e: &nalgebra::SymmetricEigen<C64, nalgebra::Dyn>| {
        let lam = DMatrix::from_diagonal(&e.eigenvalues.map(|x| C64::new(x, 0.0)));
        let r = &m * &e.eigenvectors - &e.eigenvectors * lam;
        r.iter().all(|z| z.norm() <= tol)
    };
    for eps in [f64::EPSILON, 1e-15, 1e-16] {
        if let Some(e) = nalgebra::SymmetricEigen::try_new(m.clone(), eps, 100_000) {
            if good(&e) {
                return e;
            }
        }
    }
    panic!("Hermitian eigensolver failed on a {0}x{0} matrix", m.nrows());
}

pub fn lambda_max(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?.last().copied().unwrap_or(0.0))
}

pub fn lambda_min(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?.first().copied().unwrap_or(0.0))
}

/// `H₊ = U max(Λ, 0) U*`.
pub fn positive_part(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(h)?.map(|x| x.max(0.0)))
}

/// Largest singular value, `sqrt(λ_max(M* M))`.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = if m.rows() < m.cols() {
        m * &m.adjoint()
    } else {
        &m.adjoint() * m
    };
    // The Gram matrix is Hermitian by construction.
    lambda_max(&gram).unwrap_or(0.0).max(0.0).sqrt()
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?.iter().map(|x| x.abs()).sum())
}

/// Frobenius-nearest PSD matrix.
pub fn project_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    positive_part(h)
}

/// Frobenius-nearest point of `{X : ‖X - center‖ ≤ radius}`.
pub fn project_spectral_ball(
    h: &ComplexMatrix,
    center: &ComplexMatrix,
    radius: f64,
) -> Result<ComplexMatrix> {
    if radius < 0.0 || radius.is_nan() {
        return Err(Error::NegativeRadius(radius));
    }
    if h.rows() != center.rows() || h.cols() != center.cols() {
        return Err(Error::Dimension(format!(
            "ball projection of {}x{} around {}x{} center",
            h.rows(),
            h.cols(),
            center.rows(),
            center.cols()
        )));
    }
    let offset = h - center;
    let eig = hermitian_eig(&offset)?;
    if eig.min() >= -radius && eig.max() <= radius {
        return Ok(h.clone());
    }
    Ok(center + &eig.map(|x| x.clamp(-radius, radius)))
}

/// Block-diagonal `A ⊕ B`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    ComplexMatrix::from_fn(ra + b.rows(), ca + b.cols(), |i, j| {
        if i < ra && j < ca {
            a.get(i, j)
        } else if i >= ra && j >= ca {
            b.get(i - ra, j - ca)
        } else {
            ZERO
        }
    })
}

/// `X* A X` for `X` of size n×k and `A` of size n×n.
pub fn congruence(x: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a, "congruence")?;
    if x.rows() != a.rows() {
        return Err(Error::Dimension(format!(
            "congruence by {}x{} of a {}x{} matrix",
            x.rows(),
            x.cols(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(&(&x.adjoint() * a) * x)
}

/// Symmetric inverse square root of a strictly positive Hermitian matrix.
pub fn inverse_sqrt(h: &ComplexMatrix, strict_pos_tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    if eig.min() <= strict_pos_tol {
        return Err(Error::InvalidArgument(format!(
            "inverse square root of a matrix with smallest eigenvalue {:.3e}",
            eig.min()
        )));
    }
    Ok(eig.map(|x| 1.0 / x.sqrt()))
}

/// Isometric coordinates of a Hermitian matrix in the real Frobenius space:
/// diagonal entries followed by `√2·Re` and `√2·Im` of the strict upper triangle.
pub fn hermitian_to_vec(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(h.get(i, i).re);
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = h.get(i, j);
            out.push(s * z.re);
            out.push(s * z.im);
        }
    }
    out
}

/// Inverse of [`hermitian_to_vec`].
pub fn vec_to_hermitian(v: &[f64], n: usize) -> ComplexMatrix {
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(v[i], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = C64::new(v[k] * s, v[k + 1] * s);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    ComplexMatrix::from_dmatrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn nilpotent() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        real_part(&g).unwrap()
    }

    #[test]
    fn real_and_imag_parts() {
        let re = real_part(&nilpotent()).unwrap();
        assert!(re.approx_eq(
            &ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap(),
            1e-15
        ));
        let d = ComplexMatrix::from_real_diag(&[-2.0, 0.0, 1.0]);
        assert!(real_part(&d).unwrap().approx_eq(&d, 0.0));
        assert!(imag_part(&d).unwrap().approx_eq(&ComplexMatrix::zeros(3, 3), 0.0));

        let ii = ComplexMatrix::identity(2).scale(I);
        assert!(real_part(&ii).unwrap().approx_eq(&ComplexMatrix::zeros(2, 2), 0.0));
        assert!(imag_part(&ii).unwrap().approx_eq(&ComplexMatrix::identity(2), 1e-15));

        let im = imag_part(&nilpotent()).unwrap();
        let expected =
            ComplexMatrix::new(2, 2, vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]).unwrap();
        assert!(im.approx_eq(&expected, 1e-15));

        assert!(matches!(
            real_part(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn eig_small_cases() {
        let e = hermitian_eig(&ComplexMatrix::from_real_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 3.0]);
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = hermitian_eig(&x).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_bad_input() {
        assert!(matches!(
            hermitian_eig(&nilpotent()),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn eig_trace_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 4);
            let e = hermitian_eig(&h).unwrap();
            let sum: f64 = e.eigenvalues.iter().sum();
            assert!((sum - h.trace().re).abs() < 1e-9);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let scale = 1.0 + spectral_norm(&h);
            assert!(e.reconstruct().approx_eq(&h, 1e-10 * scale));
            let u = &e.eigenvectors;
            assert!((&u.adjoint() * u).approx_eq(&ComplexMatrix::identity(4), 1e-10));
        }
    }

    #[test]
    fn positive_part_examples() {
        let d = ComplexMatrix::from_real_diag(&[-2.0, 0.0, 1.0]);
        assert!(positive_part(&d)
            .unwrap()
            .approx_eq(&ComplexMatrix::from_real_diag(&[0.0, 0.0, 1.0]), 0.0));
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let half = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(positive_part(&x).unwrap().approx_eq(&half, 1e-12));
        let psd = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        assert!(positive_part(&psd).unwrap().approx_eq(&psd, 1e-10));
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&ComplexMatrix::from_real_diag(&[-2.0, 0.0, 1.0])) - 2.0).abs() < 1e-14);
        assert!((spectral_norm(&nilpotent()) - 2.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = hermitian_eig(&random_hermitian(&mut rng, 5)).unwrap().eigenvectors;
        assert!((spectral_norm(&u) - 1.0).abs() < 1e-10);
        // Rectangular input.
        let col = ComplexMatrix::new(2, 1, vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((spectral_norm(&col) - 5.0).abs() < 1e-13);
    }

    #[test]
    fn psd_projection_examples() {
        let h = ComplexMatrix::from_real_diag(&[-1.0, 2.0]);
        assert!(project_psd(&h)
            .unwrap()
            .approx_eq(&ComplexMatrix::from_real_diag(&[0.0, 2.0]), 0.0));
    }

    #[test]
    fn psd_projection_is_nearest_against_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, 3);
            let r = project_psd(&h).unwrap();
            let best = (&h - &r).frobenius_norm();
            for _ in 0..10 {
                // Random PSD perturbation of the projection stays in the cone.
                let g = ComplexMatrix::from_fn(3, 3, |_, _| {
                    c(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))
                });
                let q = &r + &(&g * &g.adjoint());
                assert!((&h - &q).frobenius_norm() >= best - 1e-12);
            }
        }
    }

    #[test]
    fn ball_projection_examples() {
        let center = ComplexMatrix::zeros(2, 2);
        let inside = ComplexMatrix::from_real_diag(&[0.5, -0.25]);
        assert_eq!(project_spectral_ball(&inside, &center, 1.0).unwrap(), inside);
        let out = project_spectral_ball(&ComplexMatrix::from_real_diag(&[3.0, 0.0]), &center, 1.0)
            .unwrap();
        assert!(out.approx_eq(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), 0.0));
        assert!(matches!(
            project_spectral_ball(&inside, &center, -1.0),
            Err(Error::NegativeRadius(_))
        ));
        assert!(matches!(
            project_spectral_ball(&inside, &ComplexMatrix::zeros(3, 3), 1.0),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn ball_projection_is_nearest_against_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, 3).scale_real(4.0);
            let center = random_hermitian(&mut rng, 3);
            let radius = rng.random_range(0.1..1.5);
            let r = project_spectral_ball(&h, &center, radius).unwrap();
            assert!(spectral_norm(&(&r - &center)) <= radius + 1e-10);
            let best = (&h - &r).frobenius_norm();
            for _ in 0..50 {
                let mut p = random_hermitian(&mut rng, 3);
                let nrm = spectral_norm(&p);
                p = p.scale_real(radius * rng.random_range(0.0..1.0) / nrm);
                let q = &center + &p;
                assert!((&h - &q).frobenius_norm() >= best - 1e-12);
            }
        }
    }

    #[test]
    fn direct_sum_and_congruence() {
        let a = ComplexMatrix::from_real_diag(&[1.0]);
        let b = ComplexMatrix::from_real_diag(&[2.0]);
        assert_eq!(direct_sum(&a, &b), ComplexMatrix::from_real_diag(&[1.0, 2.0]));
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(congruence(&ComplexMatrix::identity(2), &m).unwrap(), m);
        let e1 = ComplexMatrix::new(2, 1, vec![ONE, ZERO]).unwrap();
        assert_eq!(congruence(&e1, &m).unwrap(), ComplexMatrix::from_real_diag(&[1.0]));
        assert!(congruence(&ComplexMatrix::identity(3), &m).is_err());
    }

    #[test]
    fn hermitian_vec_round_trip_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = random_hermitian(&mut rng, 4);
        let v = hermitian_to_vec(&h);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - h.frobenius_norm()).abs() < 1e-12);
        assert!(vec_to_hermitian(&v, 4).approx_eq(&h, 1e-15));
    }

    #[test]
    fn json_format_is_nested_pairs() {
        let m = ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(0.0, -2.5)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,0.0],[0.0,-2.5]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0]],[[1,0],[2,0]]]").is_err());
    }
}
