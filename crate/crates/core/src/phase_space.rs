//! Linear symplectic algebra on ℝ²ⁿ with coordinates ordered `(x, p)`.
//!
//! The standard structure matrix is `J = [[0, I], [-I, 0]]`, so Hamilton's
//! equations read `ż = J ∇H(z)` and the symplectic form is
//! `σ(z, z') = Jz · z'`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{HamliftError, Result};

/// Default tolerance for exact-algebra checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative threshold under which a block is treated as singular.
const SINGULAR_RCOND: f64 = 1e-10;

/// A point `z = (x, p)` of phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseSpacePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(HamliftError::InvalidArgument("phase space dimension must be at least 1".into()));
        }
        if x.len() != p.len() {
            return Err(HamliftError::DimensionMismatch { expected: x.len(), got: p.len() });
        }
        if x.iter().chain(p.iter()).any(|v| !v.is_finite()) {
            return Err(HamliftError::NonFinite("phase space point".into()));
        }
        Ok(Self { x, p })
    }

    /// One degree of freedom.
    pub fn new1(x: f64, p: f64) -> Self {
        Self { x: vec![x], p: vec![p] }
    }

    pub fn origin(n: usize) -> Self {
        Self { x: vec![0.0; n], p: vec![0.0; n] }
    }

    /// Splits a `2n` vector into its position and momentum halves.
    pub fn from_vector(z: &DVector<f64>) -> Result<Self> {
        if z.len() % 2 != 0 || z.is_empty() {
            return Err(HamliftError::InvalidArgument(format!("phase space vector has odd length {}", z.len())));
        }
        let n = z.len() / 2;
        Self::new(z.rows(0, n).iter().copied().collect(), z.rows(n, n).iter().copied().collect())
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.dim(), self.x.iter().chain(self.p.iter()).copied())
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }
}

/// The standard symplectic structure on ℝ²ⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticStructure {
    pub n: usize,
    pub j: DMatrix<f64>,
}

/// `J = [[0, I], [-I, 0]]` of size `2n`. Panics on `n = 0`; use
/// [`standard_symplectic`] for a checked constructor.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    assert!(n > 0, "symplectic dimension must be positive");
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

pub fn standard_symplectic(n: usize) -> Result<SymplecticStructure> {
    if n == 0 {
        return Err(HamliftError::InvalidArgument("n must be at least 1".into()));
    }
    Ok(SymplecticStructure { n, j: j_matrix(n) })
}

/// `σ(z, z') = Jz · z'`.
pub fn symplectic_form(z: &PhaseSpacePoint, zp: &PhaseSpacePoint) -> Result<f64> {
    if z.dim() != zp.dim() {
        return Err(HamliftError::DimensionMismatch { expected: z.dim(), got: zp.dim() });
    }
    Ok(sigma(&z.to_vector(), &zp.to_vector()))
}

/// Unchecked `σ` on raw `2n` vectors.
pub fn sigma(z: &DVector<f64>, zp: &DVector<f64>) -> f64 {
    let n = z.len() / 2;
    (0..n).map(|i| z[n + i] * zp[i] - z[i] * zp[n + i]).sum()
}

/// `‖SᵀJS − J‖_∞` (largest entry in absolute value).
pub fn symplectic_residual(s: &DMatrix<f64>) -> Result<f64> {
    if !s.is_square() {
        return Err(HamliftError::InvalidArgument(format!("matrix is {}x{}, not square", s.nrows(), s.ncols())));
    }
    if s.nrows() % 2 != 0 || s.nrows() == 0 {
        return Err(HamliftError::InvalidArgument(format!("symplectic matrices have even size, got {}", s.nrows())));
    }
    let j = j_matrix(s.nrows() / 2);
    Ok((s.transpose() * &j * s - j).amax())
}

pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(s)? <= tol)
}

/// A matrix of Sp(2n, ℝ), checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    matrix: DMatrix<f64>,
    tol: f64,
}

impl SymplecticMatrix {
    pub fn new(matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        let residual = symplectic_residual(&matrix)?;
        if residual > tol {
            return Err(HamliftError::NotSymplectic { residual, tolerance: tol });
        }
        Ok(Self { matrix, tol })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: DMatrix::identity(2 * n, 2 * n), tol: DEFAULT_TOL }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `S⁻¹ = −J Sᵀ J`, exact for symplectic `S`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = j_matrix(self.n());
        Self { matrix: -(&j * self.matrix.transpose() * &j), tol: self.tol }
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        Self { matrix: &self.matrix * &other.matrix, tol: self.tol.max(other.tol) }
    }

    pub fn apply(&self, z: &PhaseSpacePoint) -> Result<PhaseSpacePoint> {
        if z.dim() != self.n() {
            return Err(HamliftError::DimensionMismatch { expected: self.n(), got: z.dim() });
        }
        PhaseSpacePoint::from_vector(&(&self.matrix * z.to_vector()))
    }

    /// Blocks `(A, B, C, D)` of `[[A, B], [C, D]]`.
    pub fn blocks(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        split_blocks(&self.matrix)
    }
}

pub(crate) fn split_blocks(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n = m.nrows() / 2;
    (
        m.view((0, 0), (n, n)).into_owned(),
        m.view((0, n), (n, n)).into_owned(),
        m.view((n, 0), (n, n)).into_owned(),
        m.view((n, n), (n, n)).into_owned(),
    )
}

pub(crate) fn join_blocks(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

/// Inverse of `m` if it is comfortably non-singular.
fn checked_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let scale = m.amax();
    if scale == 0.0 {
        return None;
    }
    let svd = m.clone().svd(false, false);
    let smin = svd.singular_values.min();
    let smax = svd.singular_values.max();
    if smin <= SINGULAR_RCOND * smax {
        return None;
    }
    m.clone().try_inverse()
}

/// Quadratic generating function
/// `W(x, x') = ½ Px·x − Lx·x' + ½ Qx'·x'` with Maslov index `m` mod 4.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticGeneratingFunction {
    pub p: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub maslov: u8,
}

impl QuadraticGeneratingFunction {
    /// Builds `W` with the Maslov index on the branch `arg det L ∈ [0, 2π)`:
    /// `m = 0` when `det L > 0`, `m = 1` when `det L < 0`.
    pub fn new(p: DMatrix<f64>, l: DMatrix<f64>, q: DMatrix<f64>) -> Result<Self> {
        let n = l.nrows();
        if n == 0 || !l.is_square() {
            return Err(HamliftError::InvalidArgument("L must be a non-empty square matrix".into()));
        }
        for (name, m) in [("P", &p), ("Q", &q)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(HamliftError::DimensionMismatch { expected: n, got: m.nrows() });
            }
            if (m - m.transpose()).amax() > DEFAULT_TOL * (1.0 + m.amax()) {
                return Err(HamliftError::InvalidArgument(format!("{name} must be symmetric")));
            }
        }
        if p.iter().chain(l.iter()).chain(q.iter()).any(|v| !v.is_finite()) {
            return Err(HamliftError::NonFinite("generating function entries".into()));
        }
        let det = l.determinant();
        if checked_inverse(&l).is_none() {
            return Err(HamliftError::Singular(format!("L is singular (det L = {det:e})")));
        }
        let maslov = if det > 0.0 { 0 } else { 1 };
        Ok(Self { p, l, q, maslov })
    }

    /// Scalar form for one degree of freedom.
    pub fn new1(p: f64, l: f64, q: f64) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, p), DMatrix::from_element(1, 1, l), DMatrix::from_element(1, 1, q))
    }

    /// Selects the other sheet (`m + 2`) or re-asserts the default one.
    /// The parity of `m` must match the sign of `det L`.
    pub fn with_maslov(mut self, m: u8) -> Result<Self> {
        let m = m % 4;
        let det_positive = self.l.determinant() > 0.0;
        if (m % 2 == 0) != det_positive {
            return Err(HamliftError::InvalidArgument(format!(
                "Maslov index {m} is inconsistent with sign of det L"
            )));
        }
        self.maslov = m;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }

    pub fn eval(&self, x: &DVector<f64>, xp: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.p * x)) - xp.dot(&(&self.l * x)) + 0.5 * xp.dot(&(&self.q * xp))
    }

    /// Largest absolute entry over P, L, Q.
    pub fn max_coefficient(&self) -> f64 {
        self.p.amax().max(self.l.amax()).max(self.q.amax())
    }
}

/// `s^W = [[L⁻¹Q, L⁻¹], [PL⁻¹Q − Lᵀ, PL⁻¹]]`, so that `(x, p) = s^W (x', p')`
/// with `p = ∂_x W` and `p' = −∂_{x'} W`.
pub fn generating_to_symplectic(w: &QuadraticGeneratingFunction) -> Result<SymplecticMatrix> {
    let linv = checked_inverse(&w.l).ok_or_else(|| HamliftError::Singular("L is singular".into()))?;
    let a = &linv * &w.q;
    let c = &w.p * &linv * &w.q - w.l.transpose();
    let d = &w.p * &linv;
    let s = join_blocks(&a, &linv, &c, &d);
    let scale = 1.0 + s.amax().powi(2);
    SymplecticMatrix::new(s, 1e-12 * scale)
}

/// `W*(x, x') = −W(x', x)`: the triple `(P, L, Q) → (−Q, −Lᵀ, −P)`, with
/// Maslov index `n − m` so that `S^{W*}` inverts `S^W` including phase.
pub fn dual_generating(w: &QuadraticGeneratingFunction) -> QuadraticGeneratingFunction {
    let n = w.n() as i32;
    let m = (n - w.maslov as i32).rem_euclid(4) as u8;
    QuadraticGeneratingFunction { p: -w.q.clone(), l: -w.l.transpose(), q: -w.p.clone(), maslov: m }
}

/// Reads `(P, L, Q)` off a free symplectic matrix (upper-right block
/// invertible) by inverting the block formula of [`generating_to_symplectic`].
pub fn generating_from_free(s: &SymplecticMatrix) -> Result<QuadraticGeneratingFunction> {
    let (a, b, _c, d) = s.blocks();
    let l = checked_inverse(&b).ok_or_else(|| HamliftError::Singular("upper-right block is singular".into()))?;
    let q = &l * &a;
    let p = &d * &l;
    let sym = |m: DMatrix<f64>| (&m + m.transpose()) * 0.5;
    QuadraticGeneratingFunction::new(sym(p), l, sym(q))
}

/// `S = s^{outer} · s^{inner}` (or `S = s^{outer}` when `inner` is `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct FreeFactorization {
    pub outer: QuadraticGeneratingFunction,
    pub inner: Option<QuadraticGeneratingFunction>,
}

impl FreeFactorization {
    pub fn factors(&self) -> Vec<QuadraticGeneratingFunction> {
        std::iter::once(self.outer.clone()).chain(self.inner.clone()).collect()
    }

    pub fn product(&self) -> Result<DMatrix<f64>> {
        let mut m = generating_to_symplectic(&self.outer)?.into_matrix();
        if let Some(inner) = &self.inner {
            m = m * generating_to_symplectic(inner)?.into_matrix();
        }
        Ok(m)
    }
}

/// Writes `S = s^{W0} · (s^{W0})⁻¹ S` with a caller-chosen first factor.
pub fn factor_through(s: &SymplecticMatrix, first: &QuadraticGeneratingFunction) -> Result<FreeFactorization> {
    let s0 = generating_to_symplectic(first)?;
    let rest = SymplecticMatrix::new(s0.inverse().matrix() * s.matrix(), f64::INFINITY)?;
    let inner = generating_from_free(&rest)?;
    Ok(FreeFactorization { outer: first.clone(), inner: Some(inner) })
}

/// Splits any symplectic matrix into at most two free factors.
///
/// Free input is returned as a single factor. Otherwise the first factor is
/// `(0, I, 0)` (projecting to `J`), then `(kI, I, 0)` for `k = 1, 2, …` until
/// the remaining matrix is free.
pub fn free_factorization(s: &SymplecticMatrix) -> Result<FreeFactorization> {
    if let Ok(w) = generating_from_free(s) {
        return Ok(FreeFactorization { outer: w, inner: None });
    }
    let n = s.n();
    let id = DMatrix::<f64>::identity(n, n);
    for k in 0..16 {
        let w0 = QuadraticGeneratingFunction::new(id.clone() * k as f64, id.clone(), DMatrix::zeros(n, n))?;
        if let Ok(f) = factor_through(s, &w0) {
            return Ok(f);
        }
    }
    Err(HamliftError::Singular("no free factorization found".into()))
}
