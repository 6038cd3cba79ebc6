//! Concrete operator spaces `Z ⊆ M_d(ℂ)` and their matrix levels `M_n(Z)`.
//!
//! A level-`n` element is stored twice: as coefficients against the amplified
//! basis and as its realized `(nd)×(nd)` matrix. The amplified basis is
//! ordered basis-major, then row-major over block positions, so coefficient
//! `i·n² + r·n + s` multiplies `b_i ⊗ E_{r,s}` (the matrix carrying `b_i` in
//! block `(r, s)`).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_to_vec, vec_to_hermitian, ComplexMatrix, C64, ONE, ZERO,
};
use crate::subspace::{self, OrthoBasis, RANK_TOL};

/// Smallest eigenvalue a designated unit must exceed.
pub const UNIT_POS_TOL: f64 = 1e-9;
/// Hermitian tolerance for a designated unit.
pub const UNIT_HERM_TOL: f64 = 1e-9;
/// Attempts made by accretive sampling before giving up.
pub const ACCRETIVE_SAMPLING_CAP: usize = 500;

const PROJECTION_SWEEPS: usize = 3000;
const CONE_STARTS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Diagonal,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    Generic,
    Accretive,
    SelfAdjoint,
}

/// Real-linear geometry of `M_n(Z)` used by sampling and the maximal gauge.
///
/// Real parameters `θ ∈ ℝ^{2N}` encode coefficients `c_j = θ_{2j} + iθ_{2j+1}`.
#[derive(Debug)]
pub struct LevelGeometry {
    pub level: usize,
    /// Columns are `vec(Re(a_j))`, `vec(Re(i·a_j))` over the amplified basis.
    pub real_map: DMatrix<f64>,
    /// Orthonormal basis of `W = {Re(p) : p ∈ M_n(Z)}` in Hermitian coordinates.
    pub hermitian_range: OrthoBasis,
    /// Pseudo-inverse of `real_map`: lifts a point of `W` to parameters.
    pub lift: DMatrix<f64>,
    /// Parameters of elements with zero real part.
    pub skew_params: DMatrix<f64>,
    /// Parameters of self-adjoint elements.
    pub self_adjoint_params: DMatrix<f64>,
    cone: OnceLock<Arc<Vec<ComplexMatrix>>>,
}

#[derive(Clone)]
pub struct OperatorSpace {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
    unit_coeffs: Option<Vec<C64>>,
    unit: Option<ComplexMatrix>,
    representation: Representation,
    /// d²×k complex coordinates of the basis, and its pseudo-inverse.
    coord_pinv: DMatrix<C64>,
    identity_coeffs: Option<Vec<C64>>,
    geometry: Arc<Mutex<HashMap<usize, Arc<LevelGeometry>>>>,
}

impl fmt::Debug for OperatorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSpace")
            .field("ambient_dim", &self.ambient_dim)
            .field("dim", &self.basis.len())
            .field("representation", &self.representation)
            .field("unit_coeffs", &self.unit_coeffs)
            .finish()
    }
}

fn coordinate_matrix(basis: &[ComplexMatrix], d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d * d, basis.len(), |p, i| basis[i].get(p / d, p % d))
}

fn complex_to_real_rows(m: &DMatrix<C64>) -> DMatrix<f64> {
    // [Re -Im; Im Re] so that complex rank k appears as real rank 2k.
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
            (false, false) => z.re,
        }
    })
}

/// Validates a basis and optional unit coefficients into an [`OperatorSpace`].
pub fn build_space(basis: Vec<ComplexMatrix>, unit_coeffs: Option<Vec<C64>>) -> Result<OperatorSpace> {
    let first = basis
        .first()
        .ok_or_else(|| Error::InvalidArgument("basis must contain at least one matrix".into()))?;
    let d = first.rows();
    if d == 0 {
        return Err(Error::Dimension("ambient dimension must be positive".into()));
    }
    for (i, b) in basis.iter().enumerate() {
        if b.rows() != d || b.cols() != d {
            return Err(Error::Dimension(format!(
                "basis element {i} is {}x{}, expected {d}x{d}",
                b.rows(),
                b.cols()
            )));
        }
    }

    let coords = coordinate_matrix(&basis, d);
    let real = complex_to_real_rows(&coords);
    let sv = subspace::checked_svd(&real).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    let bottom = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = RANK_TOL * top;
    if top == 0.0 || bottom <= threshold || 2 * basis.len() > 2 * d * d {
        return Err(Error::RankDeficient {
            singular_value: if bottom.is_finite() { bottom } else { 0.0 },
            threshold,
        });
    }

    let representation = if basis.iter().all(ComplexMatrix::is_diagonal) {
        Representation::Diagonal
    } else {
        Representation::Full
    };

    let unit = match &unit_coeffs {
        None => None,
        Some(c) => {
            if c.len() != basis.len() {
                return Err(Error::InvalidUnit(format!(
                    "{} unit coefficients for a {}-dimensional space",
                    c.len(),
                    basis.len()
                )));
            }
            let e = combine(&basis, c, d);
            let asym = e.asymmetry();
            if asym > UNIT_HERM_TOL {
                return Err(Error::InvalidUnit(format!(
                    "unit is not Hermitian (asymmetry {asym:.3e})"
                )));
            }
            let lmin = linalg::lambda_min(&e)?;
            if lmin <= UNIT_POS_TOL {
                return Err(Error::InvalidUnit(format!(
                    "unit is not strictly positive (smallest eigenvalue {lmin:.3e})"
                )));
            }
            Some(e)
        }
    };

    let coord_pinv = complex_pseudo_inverse(&coords);
    let mut space = OperatorSpace {
        ambient_dim: d,
        basis,
        unit_coeffs,
        unit,
        representation,
        coord_pinv,
        identity_coeffs: None,
        geometry: Arc::new(Mutex::new(HashMap::new())),
    };
    space.identity_coeffs = membership(&space, &ComplexMatrix::identity(d), 1, 1e-9).ok();
    Ok(space)
}

fn complex_pseudo_inverse(a: &DMatrix<C64>) -> DMatrix<C64> {
    let svd = subspace::checked_svd(a);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let mut out = DMatrix::<C64>::zeros(a.ncols(), a.nrows());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > RANK_TOL * top && s > 0.0 {
            out += (vt.row(i).adjoint() / C64::new(s, 0.0)) * u.column(i).adjoint();
        }
    }
    out
}

fn combine(basis: &[ComplexMatrix], coeffs: &[C64], d: usize) -> ComplexMatrix {
    let mut m = DMatrix::<C64>::zeros(d, d);
    for (b, &c) in basis.iter().zip(coeffs) {
        if c != ZERO {
            m += b.as_dmatrix() * c;
        }
    }
    ComplexMatrix::from_dmatrix(m)
}

impl OperatorSpace {
    /// Space spanned by diagonal matrices given as length-`d` vectors.
    pub fn diagonal(vectors: &[Vec<C64>], unit_coeffs: Option<Vec<C64>>) -> Result<Self> {
        let basis = vectors.iter().map(|v| ComplexMatrix::from_diag(v)).collect();
        build_space(basis, unit_coeffs)
    }

    /// Diagonal space from real vectors.
    pub fn real_diagonal(vectors: &[&[f64]], unit_coeffs: Option<Vec<C64>>) -> Result<Self> {
        let basis = vectors.iter().map(|v| ComplexMatrix::from_real_diag(v)).collect();
        build_space(basis, unit_coeffs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn is_diagonal(&self) -> bool {
        self.representation == Representation::Diagonal
    }

    pub fn unit_coeffs(&self) -> Option<&[C64]> {
        self.unit_coeffs.as_deref()
    }

    /// The designated unit, realized in `M_d`.
    pub fn designated_unit(&self) -> Option<&ComplexMatrix> {
        self.unit.as_ref()
    }

    /// Coefficients of an order unit inside the space: the designated unit,
    /// else the ambient identity when it lies in the span.
    pub fn order_unit_coeffs(&self) -> Option<&[C64]> {
        self.unit_coeffs
            .as_deref()
            .or(self.identity_coeffs.as_deref())
    }

    /// Unit used by the order-unit gauge: the designated unit, else the ambient identity.
    pub fn unit_or_identity(&self) -> ComplexMatrix {
        self.unit
            .clone()
            .unwrap_or_else(|| ComplexMatrix::identity(self.ambient_dim))
    }

    /// Realizes `Σ c_i b_i`.
    pub fn combine(&self, coeffs: &[C64]) -> ComplexMatrix {
        combine(&self.basis, coeffs, self.ambient_dim)
    }

    /// Element of `M_n(Z)` from coefficients against the amplified basis.
    pub fn element(&self, level: usize, coeffs: Vec<C64>) -> Result<LevelElement> {
        if level == 0 {
            return Err(Error::ZeroLevel);
        }
        let k = self.dim();
        if coeffs.len() != level * level * k {
            return Err(Error::Dimension(format!(
                "level-{level} element of a {k}-dimensional space needs {} coefficients, got {}",
                level * level * k,
                coeffs.len()
            )));
        }
        let d = self.ambient_dim;
        let mut m = DMatrix::<C64>::zeros(level * d, level * d);
        for r in 0..level {
            for s in 0..level {
                let mut block = m.view_mut((r * d, s * d), (d, d));
                for (i, b) in self.basis.iter().enumerate() {
                    let c = coeffs[i * level * level + r * level + s];
                    if c != ZERO {
                        block += b.as_dmatrix() * c;
                    }
                }
            }
        }
        Ok(LevelElement {
            level,
            coeffs,
            realized: ComplexMatrix::from_dmatrix(m),
        })
    }

    pub fn zero_element(&self, level: usize) -> Result<LevelElement> {
        self.element(level, vec![ZERO; level * level * self.dim()])
    }

    /// `x ⊗ E_{r,s}` for a level-1 coefficient vector `x`.
    pub fn place(&self, level: usize, level1: &[C64], r: usize, s: usize) -> Result<LevelElement> {
        if level1.len() != self.dim() {
            return Err(Error::Dimension("level-1 coefficient vector has wrong length".into()));
        }
        let mut coeffs = vec![ZERO; level * level * self.dim()];
        for (i, &c) in level1.iter().enumerate() {
            coeffs[i * level * level + r * level + s] = c;
        }
        self.element(level, coeffs)
    }

    /// `x ⊗ I_n` for a level-1 coefficient vector `x`.
    pub fn diagonal_amplification(&self, level: usize, level1: &[C64]) -> Result<LevelElement> {
        if level1.len() != self.dim() {
            return Err(Error::Dimension("level-1 coefficient vector has wrong length".into()));
        }
        let mut coeffs = vec![ZERO; level * level * self.dim()];
        for (i, &c) in level1.iter().enumerate() {
            for r in 0..level {
                coeffs[i * level * level + r * level + r] = c;
            }
        }
        self.element(level, coeffs)
    }

    /// Element from real parameters (see [`LevelGeometry`]).
    pub fn element_from_params(&self, level: usize, params: &DVector<f64>) -> Result<LevelElement> {
        let coeffs = (0..params.len() / 2)
            .map(|j| C64::new(params[2 * j], params[2 * j + 1]))
            .collect();
        self.element(level, coeffs)
    }

    /// Cached real-linear geometry of level `n`.
    pub fn geometry(&self, level: usize) -> Result<Arc<LevelGeometry>> {
        if level == 0 {
            return Err(Error::ZeroLevel);
        }
        if let Some(g) = self.geometry.lock().unwrap().get(&level) {
            return Ok(Arc::clone(g));
        }
        let g = Arc::new(self.compute_geometry(level)?);
        self.geometry
            .lock()
            .unwrap()
            .insert(level, Arc::clone(&g));
        Ok(g)
    }

    fn compute_geometry(&self, level: usize) -> Result<LevelGeometry> {
        let amplified = amplify(self, level)?;
        let m = level * self.ambient_dim;
        let rows = m * m;
        let cols = 2 * amplified.len();
        let mut real_map = DMatrix::<f64>::zeros(rows, cols);
        let mut imag_map = DMatrix::<f64>::zeros(rows, cols);
        for (j, a) in amplified.iter().enumerate() {
            let re = linalg::real_part(a)?;
            let im = linalg::imag_part(a)?;
            let re_v = DVector::from_vec(hermitian_to_vec(&re));
            let im_v = DVector::from_vec(hermitian_to_vec(&im));
            // Re(i·a) = -Im(a), Im(i·a) = Re(a).
            real_map.set_column(2 * j, &re_v);
            real_map.set_column(2 * j + 1, &(-&im_v));
            imag_map.set_column(2 * j, &im_v);
            imag_map.set_column(2 * j + 1, &re_v);
        }
        Ok(LevelGeometry {
            level,
            hermitian_range: OrthoBasis {
                basis: subspace::range_basis(&real_map, RANK_TOL),
            },
            lift: subspace::pseudo_inverse(&real_map, RANK_TOL),
            skew_params: subspace::null_space(&real_map, RANK_TOL),
            self_adjoint_params: subspace::null_space(&imag_map, RANK_TOL),
            real_map,
            cone: OnceLock::new(),
        })
    }

    /// Element `p` with `Re(p) = h`, for `h` in the real-part range `W` of level `n`.
    pub fn lift_real_part(&self, level: usize, h: &ComplexMatrix) -> Result<LevelElement> {
        let g = self.geometry(level)?;
        let params = &g.lift * DVector::from_vec(hermitian_to_vec(h));
        self.element_from_params(level, &params)
    }
}

/// An element of `M_n(Z)`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct LevelElement {
    level: usize,
    #[serde(with = "crate::linalg::serde_c64_vec")]
    coeffs: Vec<C64>,
    #[serde(rename = "matrix")]
    realized: ComplexMatrix,
}

impl LevelElement {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn realized(&self) -> &ComplexMatrix {
        &self.realized
    }

    pub fn ambient_dim(&self) -> usize {
        self.realized.rows() / self.level
    }

    /// Number of basis elements of the underlying space.
    pub fn space_dim(&self) -> usize {
        self.coeffs.len() / (self.level * self.level)
    }

    fn coeff(&self, i: usize, r: usize, s: usize) -> C64 {
        self.coeffs[i * self.level * self.level + r * self.level + s]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.level != other.level
            || self.coeffs.len() != other.coeffs.len()
            || self.realized.rows() != other.realized.rows()
        {
            return Err(Error::Dimension(format!(
                "elements at levels {} and {} are not compatible",
                self.level, other.level
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            level: self.level,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            realized: &self.realized + &other.realized,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            level: self.level,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            realized: self.realized.scale(c),
        }
    }

    pub fn scale_real(&self, t: f64) -> Self {
        self.scale(C64::new(t, 0.0))
    }

    pub fn neg(&self) -> Self {
        self.scale_real(-1.0)
    }

    /// `Y* z X` for scalar matrices `Y`, `X` of size n×k.
    pub fn compress(&self, y: &ComplexMatrix, x: &ComplexMatrix) -> Result<Self> {
        let n = self.level;
        if x.rows() != n || y.rows() != n || x.cols() != y.cols() {
            return Err(Error::Dimension(format!(
                "compression of a level-{n} element by {}x{} and {}x{} matrices",
                y.rows(),
                y.cols(),
                x.rows(),
                x.cols()
            )));
        }
        let k = x.cols();
        if k == 0 {
            return Err(Error::ZeroLevel);
        }
        let dim = self.space_dim();
        let mut coeffs = vec![ZERO; k * k * dim];
        for i in 0..dim {
            for a in 0..k {
                for b in 0..k {
                    let mut acc = ZERO;
                    for r in 0..n {
                        let ya = y.get(r, a).conj();
                        if ya == ZERO {
                            continue;
                        }
                        for s in 0..n {
                            acc += ya * self.coeff(i, r, s) * x.get(s, b);
                        }
                    }
                    coeffs[i * k * k + a * k + b] = acc;
                }
            }
        }
        let d = self.ambient_dim();
        let id = ComplexMatrix::identity(d);
        let xa = x.kron(&id);
        let ya = y.kron(&id);
        let realized = &(&ya.adjoint() * &self.realized) * &xa;
        Ok(Self {
            level: k,
            coeffs,
            realized,
        })
    }

    /// `X* z X`.
    pub fn congruence(&self, x: &ComplexMatrix) -> Result<Self> {
        self.compress(x, x)
    }

    /// `z ⊕ w`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.space_dim() != other.space_dim() || self.ambient_dim() != other.ambient_dim() {
            return Err(Error::Dimension("direct sum of elements from different spaces".into()));
        }
        let (n, m) = (self.level, other.level);
        let l = n + m;
        let dim = self.space_dim();
        let mut coeffs = vec![ZERO; l * l * dim];
        for i in 0..dim {
            for r in 0..n {
                for s in 0..n {
                    coeffs[i * l * l + r * l + s] = self.coeff(i, r, s);
                }
            }
            for r in 0..m {
                for s in 0..m {
                    coeffs[i * l * l + (n + r) * l + (n + s)] = other.coeff(i, r, s);
                }
            }
        }
        Ok(Self {
            level: l,
            coeffs,
            realized: linalg::direct_sum(&self.realized, &other.realized),
        })
    }

    /// `[[0, c·z], [0, 0]]` at level `2n`.
    pub fn corner(&self, c: C64) -> Self {
        let n = self.level;
        let l = 2 * n;
        let dim = self.space_dim();
        let mut coeffs = vec![ZERO; l * l * dim];
        for i in 0..dim {
            for r in 0..n {
                for s in 0..n {
                    coeffs[i * l * l + r * l + (n + s)] = self.coeff(i, r, s) * c;
                }
            }
        }
        let d = self.ambient_dim();
        let big = n * d;
        let realized = ComplexMatrix::from_fn(2 * big, 2 * big, |a, b| {
            if a < big && b >= big {
                self.realized.get(a, b - big) * c
            } else {
                ZERO
            }
        });
        Self {
            level: l,
            coeffs,
            realized,
        }
    }

    /// Hermitian real part of the realization.
    pub fn real_part(&self) -> ComplexMatrix {
        (&self.realized + &self.realized.adjoint()).scale_real(0.5)
    }
}

/// The `n²·k` matrices `b_i ⊗ E_{r,s}` realized in `M_{nd}`.
pub fn amplify(space: &OperatorSpace, n: usize) -> Result<Vec<ComplexMatrix>> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let mut out = Vec::with_capacity(n * n * space.dim());
    for b in &space.basis {
        for r in 0..n {
            for s in 0..n {
                out.push(ComplexMatrix::unit(n, n, r, s).kron(b));
            }
        }
    }
    Ok(out)
}

/// Least-squares coefficients of `m` against the level-`n` amplified basis.
pub fn membership(space: &OperatorSpace, m: &ComplexMatrix, n: usize, tol: f64) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let d = space.ambient_dim;
    if m.rows() != n * d || m.cols() != n * d {
        return Err(Error::Dimension(format!(
            "level-{n} membership needs a {0}x{0} matrix, got {1}x{2}",
            n * d,
            m.rows(),
            m.cols()
        )));
    }
    let k = space.dim();
    let mut coeffs = vec![ZERO; n * n * k];
    for r in 0..n {
        for s in 0..n {
            let block = DVector::from_fn(d * d, |p, _| m.get(r * d + p / d, s * d + p % d));
            let c = &space.coord_pinv * block;
            for i in 0..k {
                coeffs[i * n * n + r * n + s] = c[i];
            }
        }
    }
    let element = space.element(n, coeffs)?;
    let residual = (m - element.realized()).frobenius_norm();
    if residual > tol * (1.0 + m.frobenius_norm()) {
        return Err(Error::NotAMember { residual });
    }
    Ok(element.coeffs)
}

/// `λ_min(Re z) ≥ -tol`.
pub fn is_accretive(_space: &OperatorSpace, z: &LevelElement, tol: f64) -> bool {
    linalg::lambda_min(&z.real_part()).is_ok_and(|l| l >= -tol)
}

/// The concrete *-closure `Z + Z*`, with dependent vectors pruned.
pub fn star_closure(space: &OperatorSpace) -> OperatorSpace {
    let d = space.ambient_dim;
    let mut kept: Vec<ComplexMatrix> = space.basis.clone();
    for b in &space.basis {
        let candidate = b.adjoint();
        let mut trial = kept.clone();
        trial.push(candidate);
        let coords = complex_to_real_rows(&coordinate_matrix(&trial, d));
        let (rank, _, _) = subspace::rank_profile(&coords, RANK_TOL);
        if rank == 2 * trial.len() {
            kept = trial;
        }
    }
    let unit = space.unit_coeffs.as_ref().map(|c| {
        let mut c = c.clone();
        c.resize(kept.len(), ZERO);
        c
    });
    build_space(kept, unit).expect("pruned basis of a valid space stays valid")
}

/// Deterministic sample at level `n` for the given seed.
pub fn sample_element(space: &OperatorSpace, n: usize, seed: u64, mode: SampleMode) -> Result<LevelElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_element_with(space, n, &mut rng, mode)
}

pub fn sample_element_with<R: Rng>(
    space: &OperatorSpace,
    n: usize,
    rng: &mut R,
    mode: SampleMode,
) -> Result<LevelElement> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    match mode {
        SampleMode::Generic => {
            let coeffs = (0..n * n * space.dim())
                .map(|_| normal_c64(rng))
                .collect();
            space.element(n, coeffs)
        }
        SampleMode::SelfAdjoint => {
            let g = space.geometry(n)?;
            let basis = &g.self_adjoint_params;
            if basis.ncols() == 0 {
                return Err(Error::NoSelfAdjointPart { level: n });
            }
            let w = DVector::from_fn(basis.ncols(), |_, _| rng.sample::<f64, _>(StandardNormal));
            space.element_from_params(n, &(basis * w))
        }
        SampleMode::Accretive => sample_accretive(space, n, rng),
    }
}

fn normal_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_skew<R: Rng>(space: &OperatorSpace, n: usize, rng: &mut R) -> Result<LevelElement> {
    let g = space.geometry(n)?;
    let basis = &g.skew_params;
    if basis.ncols() == 0 {
        return space.zero_element(n);
    }
    let w = DVector::from_fn(basis.ncols(), |_, _| rng.sample::<f64, _>(StandardNormal));
    space.element_from_params(n, &(basis * w))
}

fn sample_accretive<R: Rng>(space: &OperatorSpace, n: usize, rng: &mut R) -> Result<LevelElement> {
    for _ in 0..ACCRETIVE_SAMPLING_CAP {
        let candidate = match space.order_unit_coeffs() {
            Some(unit) => {
                // Shift a generic sample by a multiple of the order unit.
                let w = sample_element_with(space, n, rng, SampleMode::Generic)?;
                let e = space.diagonal_amplification(n, unit)?;
                let root = linalg::inverse_sqrt(&e.real_part(), 0.0)?;
                let scaled = &(&root * &w.real_part()) * &root;
                let shift = (-linalg::lambda_min(&scaled)?).max(0.0);
                let margin = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..1.0) };
                w.add(&e.scale_real(shift + margin))?
            }
            None => {
                let h = random_cone_point(space, n, rng)?;
                let p = space.lift_real_part(n, &h)?;
                p.add(&random_skew(space, n, rng)?)?
            }
        };
        if is_accretive(space, &candidate, 1e-10 * (1.0 + candidate.realized().max_abs())) {
            return Ok(candidate);
        }
    }
    Err(Error::SamplingExhausted {
        cap: ACCRETIVE_SAMPLING_CAP,
    })
}

/// Nonnegative combination of the cached cone generators (zero when the cone is trivial).
fn random_cone_point<R: Rng>(space: &OperatorSpace, n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let pool = space.cone_pool(n)?;
    let m = n * space.ambient_dim;
    let mut h = ComplexMatrix::zeros(m, m);
    for g in pool.iter() {
        if rng.random_bool(0.3) {
            continue;
        }
        let w: f64 = rng.random_range(0.0..2.0);
        h = &h + &g.scale_real(w);
    }
    Ok(h)
}

impl OperatorSpace {
    /// Unit-norm points of `W ∩ PSD` at level `n`, computed once per level.
    ///
    /// Level 1 uses alternating projections from random PSD starts; higher
    /// levels add `A ⊗ h` for level-1 generators `h` and random PSD `A`.
    pub fn cone_pool(&self, n: usize) -> Result<Arc<Vec<ComplexMatrix>>> {
        let g = self.geometry(n)?;
        if let Some(pool) = g.cone.get() {
            return Ok(Arc::clone(pool));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0de_0000 + n as u64);
        let mut pool = Vec::new();
        if n > 1 {
            for h in self.cone_pool(1)?.iter() {
                for _ in 0..2 {
                    let b = ComplexMatrix::from_fn(n, n, |_, _| normal_c64(&mut rng));
                    let a = &b * &b.adjoint();
                    let t = a.kron(h);
                    let norm = t.frobenius_norm();
                    pool.push(t.scale_real(1.0 / norm));
                }
            }
        }
        for _ in 0..CONE_STARTS {
            if let Some(h) = psd_point_in_range(&g, n * self.ambient_dim, &mut rng)? {
                pool.push(h);
            }
        }
        let pool = Arc::new(pool);
        let _ = g.cone.set(Arc::clone(&pool));
        Ok(pool)
    }
}

/// Alternating projections between the real-part range `W` and the PSD cone
/// from a random PSD start. Returns a unit-norm point of `W` that is PSD to
/// working precision, or `None` when the iterates collapse to zero or the
/// sweep budget runs out.
fn psd_point_in_range<R: Rng>(g: &LevelGeometry, m: usize, rng: &mut R) -> Result<Option<ComplexMatrix>> {
    let b = ComplexMatrix::from_fn(m, m, |_, _| normal_c64(rng));
    let mut current = (&b * &b.adjoint()).scale_real(1.0 / m as f64);
    let start = current.frobenius_norm();
    for _ in 0..PROJECTION_SWEEPS {
        let v = DVector::from_vec(hermitian_to_vec(&current));
        let in_range = vec_to_hermitian(g.hermitian_range.project(&v).as_slice(), m);
        let norm = in_range.frobenius_norm();
        if norm <= 1e-8 * start {
            return Ok(None);
        }
        let eig = linalg::hermitian_eig(&in_range)?;
        if eig.min() >= -1e-12 * norm {
            return Ok(Some(in_range.scale_real(1.0 / norm)));
        }
        current = eig.map(|x| x.max(0.0));
    }
    Ok(None)
}

/// Random spaces used by the property suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomSpaceKind {
    /// Random complex basis; cone may be trivial.
    Generic,
    /// Identity as the first basis element, designated as unit.
    Unital,
    /// Random real diagonal basis.
    Diagonal,
}

pub fn random_space<R: Rng>(rng: &mut R, d: usize, k: usize, kind: RandomSpaceKind) -> Result<OperatorSpace> {
    let k = k.clamp(1, d * d);
    for _ in 0..32 {
        let mut basis = Vec::with_capacity(k);
        let mut unit = None;
        match kind {
            RandomSpaceKind::Unital => {
                basis.push(ComplexMatrix::identity(d));
                let mut c = vec![ZERO; k];
                c[0] = ONE;
                unit = Some(c);
                for _ in 1..k {
                    basis.push(ComplexMatrix::from_fn(d, d, |_, _| normal_c64(rng)));
                }
            }
            RandomSpaceKind::Generic => {
                for _ in 0..k {
                    basis.push(ComplexMatrix::from_fn(d, d, |_, _| normal_c64(rng)));
                }
                // Half of the generic spaces receive a positive rank-one element.
                if rng.random_bool(0.5) {
                    let v = ComplexMatrix::from_fn(d, 1, |_, _| normal_c64(rng));
                    basis[0] = &v * &v.adjoint();
                }
            }
            RandomSpaceKind::Diagonal => {
                let k = k.min(d);
                basis.clear();
                for _ in 0..k {
                    let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                    basis.push(ComplexMatrix::from_real_diag(&v));
                }
            }
        }
        if let Ok(space) = build_space(basis, unit) {
            return Ok(space);
        }
    }
    Err(Error::InvalidArgument("could not draw an independent random basis".into()))
}

/// Five seeded spaces of ambient dimension 2 to 4 mixing all kinds.
pub fn standard_spaces(seed: u64) -> Vec<OperatorSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000_5ace);
    let plan = [
        (2, 2, RandomSpaceKind::Generic),
        (3, 2, RandomSpaceKind::Unital),
        (3, 3, RandomSpaceKind::Diagonal),
        (4, 2, RandomSpaceKind::Generic),
        (4, 3, RandomSpaceKind::Unital),
    ];
    plan.iter()
        .map(|&(d, k, kind)| random_space(&mut rng, d, k, kind).expect("random basis"))
        .collect()
}
