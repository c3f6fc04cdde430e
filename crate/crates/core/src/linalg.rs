//! Dense complex matrices and the spectral primitives used by every other
//! module: operator norm, eigenvalues, spectral radius, triangular
//! projections and resolvent norms.
//!
//! Indices are zero-based throughout the Rust API. A matrix unit written
//! `E_{ij}` in mathematical notation (one-based) is `ComplexMatrix::unit(n, i-1, j-1)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Largest dimension accepted by any constructor.
pub const DIM_CAP: usize = 512;

const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITER_PER_DIM: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("lambda = {lambda} is within {tol:e} of an eigenvalue")]
    Singular { lambda: Complex64, tol: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("dimension {0} outside 1..={DIM_CAP}")]
    DimensionCap(usize),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// A square dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) {:?}", self.dim(), self.dim(), self.inner)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > DIM_CAP {
        return Err(LinalgError::DimensionCap(n));
    }
    Ok(())
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { inner: DMatrix::zeros(n, n) })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { inner: DMatrix::identity(n, n) })
    }

    /// `E_{ij}`: a single one at row `i`, column `j`.
    pub fn unit(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        m.inner[(i, j)] = Complex64::new(1.0, 0.0);
        Ok(m)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        check_dim(n)?;
        let inner = DMatrix::from_fn(n, n, f);
        Self::from_dmatrix(inner)
    }

    pub fn from_real_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::from_fn(n, |i, j| Complex64::new(f(i, j), 0.0))
    }

    /// Row-major real entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(LinalgError::DimMismatch { left: n, right: r.len() });
            }
        }
        Self::from_real_fn(n, |i, j| rows[i][j])
    }

    /// Row-major complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(LinalgError::DimMismatch { left: n, right: r.len() });
            }
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn diag(values: &[Complex64]) -> Result<Self> {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn diag_real(values: &[f64]) -> Result<Self> {
        Self::from_real_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(LinalgError::DimMismatch { left: inner.nrows(), right: inner.ncols() });
        }
        check_dim(inner.nrows())?;
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { inner })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.inner[(i, j)]).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.inner.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Self::from_dmatrix(&self.inner + &other.inner)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Self::from_dmatrix(&self.inner - &other.inner)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        if let (Some(a), Some(b)) = (self.real_part_if_real(), other.real_part_if_real()) {
            return Self::from_dmatrix((a * b).map(|x| Complex64::new(x, 0.0)));
        }
        Self::from_dmatrix(&self.inner * &other.inner)
    }

    pub fn is_real(&self) -> bool {
        self.inner.iter().all(|z| z.im == 0.0)
    }

    fn real_part_if_real(&self) -> Option<DMatrix<f64>> {
        self.is_real().then(|| self.inner.map(|z| z.re))
    }

    pub fn scale(&self, s: Complex64) -> Result<Self> {
        Self::from_dmatrix(&self.inner * s)
    }

    pub fn scale_real(&self, s: f64) -> Result<Self> {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::identity(self.dim())?;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(LinalgError::DimMismatch { left: self.dim(), right: v.len() });
        }
        let x = DVector::from_column_slice(v);
        Ok((&self.inner * x).iter().copied().collect())
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self.inner.iter().zip(other.inner.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn is_upper_triangular(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.inner[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    pub fn is_lower_triangular(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i + 1..n).all(|j| self.inner[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    /// Smallest superdiagonal offset `j - i` carrying a nonzero entry, or
    /// `None` for the zero matrix. Negative offsets mean nonzero entries
    /// below the diagonal.
    pub fn lowest_nonzero_offset(&self) -> Option<isize> {
        let n = self.dim();
        let mut best: Option<isize> = None;
        for i in 0..n {
            for j in 0..n {
                let z = self.inner[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    let off = j as isize - i as isize;
                    best = Some(best.map_or(off, |b| b.min(off)));
                }
            }
        }
        best
    }

    fn check_finite(&self) -> Result<()> {
        if self.inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix addition")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix subtraction")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { inner: -&self.inner }
    }
}

/// Singular values in decreasing order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.check_finite()?;
    if m.is_zero() {
        return Ok(vec![0.0; m.dim()]);
    }
    let mut sv: Vec<f64> = match m.real_part_if_real() {
        Some(real) => real.try_svd(false, false, f64::EPSILON, 0).ok_or(LinalgError::NoConvergence)?.singular_values.iter().copied().collect(),
        None => m.inner.clone().try_svd(false, false, f64::EPSILON, 0).ok_or(LinalgError::NoConvergence)?.singular_values.iter().copied().collect(),
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Largest singular value.
pub fn op_norm(m: &ComplexMatrix) -> Result<f64> {
    m.check_finite()?;
    if m.is_zero() {
        return Ok(0.0);
    }
    // Diagonal matrices read off directly; every other shape goes through the SVD.
    if m.is_upper_triangular() && m.is_lower_triangular() {
        return Ok(m.inner.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(singular_values(m)?[0])
}

/// Power iteration on `M* M`. Used as a fallback and as an independent
/// cross-check of [`op_norm`].
pub fn op_norm_power_iteration(m: &ComplexMatrix, tol: f64) -> Result<f64> {
    m.check_finite()?;
    let n = m.dim();
    if m.is_zero() {
        return Ok(0.0);
    }
    let gram = m.inner.adjoint() * &m.inner;
    // Deterministic start vector with generic components.
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.7371).sin() * 0.5, (i as f64 * 1.913).cos() * 0.25));
    v /= Complex64::new(v.norm(), 0.0);
    let mut estimate = 0.0;
    let cap = (10 * n).max(1000);
    for _ in 0..cap {
        let w = &gram * &v;
        let next = w.norm();
        if next == 0.0 {
            return Ok(0.0);
        }
        v = w / Complex64::new(next, 0.0);
        if (next - estimate).abs() <= tol * next {
            return Ok(next.sqrt());
        }
        estimate = next;
    }
    Ok(estimate.sqrt())
}

/// Numerical rank with singular-value cutoff `rel_cutoff * sigma_1`.
pub fn numerical_rank(m: &ComplexMatrix, rel_cutoff: f64) -> Result<usize> {
    let sv = singular_values(m)?;
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_cutoff * top).count())
}

/// All eigenvalues with multiplicity. Triangular inputs are read off the
/// diagonal exactly; everything else goes through Hessenberg reduction and
/// shifted QR (complex Schur form).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    m.check_finite()?;
    if m.is_upper_triangular() || m.is_lower_triangular() {
        return Ok(m.inner.diagonal().iter().copied().collect());
    }
    let n = m.dim();
    let schur = nalgebra::linalg::Schur::try_new(m.inner.clone(), SCHUR_EPS, SCHUR_MAX_ITER_PER_DIM * n)
        .ok_or(LinalgError::NoConvergence)?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Unit-norm eigenvector for an (approximate) eigenvalue by inverse iteration.
pub fn eigenvector(m: &ComplexMatrix, lambda: Complex64) -> Result<Vec<Complex64>> {
    m.check_finite()?;
    let n = m.dim();
    let scale = op_norm(m)?.max(1.0);
    let mut shifted = m.inner.clone();
    // Perturb the shift slightly so the solve stays nonsingular.
    let shift = lambda + Complex64::new(scale * 1e-10, scale * 1e-10);
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.lu();
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0, (i as f64) * 0.013));
    for _ in 0..8 {
        let w = lu.solve(&v).ok_or(LinalgError::NoConvergence)?;
        let nrm = w.norm();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(LinalgError::NoConvergence);
        }
        v = w / Complex64::new(nrm, 0.0);
    }
    Ok(v.iter().copied().collect())
}

pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `‖M^m‖^{1/m}`, the Gelfand estimate of the spectral radius.
pub fn gelfand_estimate(m: &ComplexMatrix, power: u32) -> Result<f64> {
    let p = m.pow(power)?;
    Ok(op_norm(&p)?.powf(1.0 / power as f64))
}

/// Splits `M` into its upper triangular part (`i <= j`) and its strictly
/// lower triangular part (`i > j`). The two pieces sum to `M` exactly.
pub fn triangular_parts(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    m.check_finite()?;
    let zero = Complex64::new(0.0, 0.0);
    let upper = m.inner.map_with_location(|i, j, z| if i <= j { z } else { zero });
    let lower = m.inner.map_with_location(|i, j, z| if i > j { z } else { zero });
    Ok((ComplexMatrix { inner: upper }, ComplexMatrix { inner: lower }))
}

pub fn upper_part(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(triangular_parts(m)?.0)
}

pub fn strict_lower_part(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(triangular_parts(m)?.1)
}

fn shifted(m: &ComplexMatrix, lambda: Complex64) -> DMatrix<Complex64> {
    let mut s = -&m.inner;
    for i in 0..m.dim() {
        s[(i, i)] += lambda;
    }
    s
}

/// `‖(λI − M)^{-1}‖` by a direct LU solve.
pub fn resolvent_norm(m: &ComplexMatrix, lambda: Complex64) -> Result<f64> {
    op_norm(&resolvent(m, lambda)?)
}

/// `(λI − M)^{-1}`, erroring when `λ` sits on the spectrum.
pub fn resolvent(m: &ComplexMatrix, lambda: Complex64) -> Result<ComplexMatrix> {
    m.check_finite()?;
    let tol = 1e-12 * op_norm(m)?.max(f64::MIN_POSITIVE);
    let eig = eigenvalues(m)?;
    if eig.iter().any(|mu| (mu - lambda).norm() <= tol) {
        return Err(LinalgError::Singular { lambda, tol });
    }
    let inv = shifted(m, lambda).try_inverse().ok_or(LinalgError::Singular { lambda, tol })?;
    ComplexMatrix::from_dmatrix(inv).map_err(|_| LinalgError::Singular { lambda, tol })
}

/// Outcome of summing the Neumann series `Σ_{r≥0} λ^{−r−1} M^r`.
#[derive(Debug, Clone)]
pub struct NeumannSum {
    pub inverse: ComplexMatrix,
    pub terms: usize,
    /// Upper bound on the norm of the discarded tail.
    pub tail_bound: f64,
}

/// Sums the Neumann series for `(λI − M)^{-1}` until the tail bound drops
/// below `tail_tol`.
///
/// The tail after `R` terms is bounded by `Σ_{i<p} ‖T_{R+i}‖ / (1 − ‖T_p‖)`
/// where `T_r = (M/λ)^r / λ` and `p` is the first power with `‖(M/λ)^p‖ ≤ 1/2`.
/// Frobenius norms stand in for operator norms in the window sum.
pub fn neumann_resolvent(m: &ComplexMatrix, lambda: Complex64, tail_tol: f64, max_terms: usize) -> Result<NeumannSum> {
    m.check_finite()?;
    if lambda.norm() == 0.0 {
        return Err(LinalgError::Singular { lambda, tol: 0.0 });
    }
    let n = m.dim();
    let inv_lambda = Complex64::new(1.0, 0.0) / lambda;
    let step = m.scale(inv_lambda)?;
    let step_inner = step.inner.clone();
    // power = (M/λ)^r
    let mut power = DMatrix::<Complex64>::identity(n, n);
    let mut sum = DMatrix::<Complex64>::zeros(n, n);
    let mut window: std::collections::VecDeque<(DMatrix<Complex64>, f64)> = std::collections::VecDeque::new();
    let mut contraction: Option<(usize, f64)> = None;
    let lam_abs = lambda.norm();

    for r in 0..max_terms {
        if power.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
            // Nilpotent: the remaining window terms complete the series.
            for (term, _) in window.drain(..) {
                sum += term * inv_lambda;
            }
            return Ok(NeumannSum { inverse: ComplexMatrix::from_dmatrix(sum)?, terms: r, tail_bound: 0.0 });
        }
        if contraction.is_none() && r >= 1 {
            let q = op_norm(&ComplexMatrix { inner: power.clone() })?;
            if q <= 0.5 {
                contraction = Some((r, q));
            }
        }
        let fro = power.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        window.push_back((power.clone(), fro));
        if let Some((p, q)) = contraction {
            while window.len() > p {
                let (term, _) = window.pop_front().expect("window nonempty");
                sum += term * inv_lambda;
            }
            if window.len() == p {
                let tail = window.iter().map(|(_, f)| *f).sum::<f64>() / (lam_abs * (1.0 - q));
                if tail < tail_tol {
                    let terms = r + 1 - p;
                    return Ok(NeumannSum { inverse: ComplexMatrix::from_dmatrix(sum)?, terms, tail_bound: tail });
                }
            }
        }
        power = &power * &step_inner;
        if power.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NoConvergence);
        }
    }
    Err(LinalgError::NoConvergence)
}

/// Norm of the Neumann-series resolvent, truncated once the tail is below `1e-12`.
pub fn neumann_resolvent_norm(m: &ComplexMatrix, lambda: Complex64) -> Result<f64> {
    let s = neumann_resolvent(m, lambda, 1e-12, 1_000_000)?;
    op_norm(&s.inverse)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨x, y⟩ = Σ x_i conj(y_i)`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn shift(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_real_fn(n, |i, j| if j == i + 1 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn op_norm_basic() {
        assert_eq!(op_norm(&ComplexMatrix::identity(3).unwrap()).unwrap(), 1.0);
        assert!((op_norm(&shift(4)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(op_norm(&ComplexMatrix::diag_real(&[1.0, 2.0, 3.0]).unwrap()).unwrap(), 3.0);
        assert_eq!(op_norm(&ComplexMatrix::zeros(5).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn op_norm_matches_power_iteration() {
        let m = ComplexMatrix::from_fn(7, |i, j| Complex64::new(((i * 7 + j) as f64).sin(), ((i + 2 * j) as f64).cos())).unwrap();
        let a = op_norm(&m).unwrap();
        let b = op_norm_power_iteration(&m, 1e-14).unwrap();
        assert!((a - b).abs() <= 1e-10 * a, "{a} vs {b}");
    }

    #[test]
    fn eigenvalues_examples() {
        let nil = ComplexMatrix::from_real_fn(5, |i, j| if j > i { (i + j) as f64 } else { 0.0 }).unwrap();
        assert!(eigenvalues(&nil).unwrap().iter().all(|z| *z == c(0.0)));

        let mut d: Vec<f64> = eigenvalues(&ComplexMatrix::diag_real(&[1.0, 2.0, 3.0]).unwrap())
            .unwrap()
            .iter()
            .map(|z| z.re)
            .collect();
        d.sort_by(f64::total_cmp);
        assert_eq!(d, vec![1.0, 2.0, 3.0]);

        // companion matrix of z^2 - 1
        let comp = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let mut e: Vec<f64> = eigenvalues(&comp).unwrap().iter().map(|z| z.re).collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenpair_residuals_are_small() {
        let m = ComplexMatrix::from_fn(12, |i, j| Complex64::new(((3 * i + 5 * j) as f64).sin(), ((i * j) as f64).cos() * 0.3)).unwrap();
        let norm = op_norm(&m).unwrap();
        for lambda in eigenvalues(&m).unwrap() {
            let v = eigenvector(&m, lambda).unwrap();
            let mv = m.apply(&v).unwrap();
            let r: Vec<Complex64> = mv.iter().zip(&v).map(|(a, b)| a - lambda * b).collect();
            assert!(vec_norm(&r) / norm <= 1e-8, "residual {}", vec_norm(&r) / norm);
        }
    }

    #[test]
    fn spectral_radius_examples() {
        assert_eq!(spectral_radius(&shift(6)).unwrap(), 0.0);
        assert_eq!(spectral_radius(&ComplexMatrix::diag_real(&[1.0, -2.0, 3.0]).unwrap()).unwrap(), 3.0);
    }

    #[test]
    fn triangular_parts_examples() {
        let id = ComplexMatrix::identity(3).unwrap();
        let (u, l) = triangular_parts(&id).unwrap();
        assert_eq!(u, id);
        assert!(l.is_zero());

        let (u, l) = triangular_parts(&shift(4)).unwrap();
        assert_eq!(u, shift(4));
        assert!(l.is_zero());

        let e21 = ComplexMatrix::unit(2, 1, 0).unwrap();
        let (u, l) = triangular_parts(&e21).unwrap();
        assert!(u.is_zero());
        assert_eq!(l, e21);
    }

    #[test]
    fn resolvent_examples() {
        let z = ComplexMatrix::zeros(4).unwrap();
        let lam = Complex64::new(0.0, 2.5);
        assert!((resolvent_norm(&z, lam).unwrap() - 0.4).abs() < 1e-14);

        let l = shift(8);
        for r in [1.5, 2.0, 4.0] {
            let lam = Complex64::from_polar(r, 0.3);
            assert!(resolvent_norm(&l, lam).unwrap() <= 1.0 / (r - 1.0) + 1e-12);
        }

        let d = ComplexMatrix::diag_real(&[1.0, 2.0]).unwrap();
        assert!((resolvent_norm(&d, c(3.0)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn resolvent_on_spectrum_is_singular() {
        let d = ComplexMatrix::diag_real(&[1.0, 2.0]).unwrap();
        assert!(matches!(resolvent_norm(&d, c(2.0)), Err(LinalgError::Singular { .. })));
    }

    #[test]
    fn neumann_agrees_with_direct_solve() {
        let m = ComplexMatrix::from_fn(10, |i, j| Complex64::new(((i + 3 * j) as f64).cos() * 0.2, ((2 * i + j) as f64).sin() * 0.1)).unwrap();
        let rho = spectral_radius(&m).unwrap();
        for r in [1.05, 1.5, 3.0] {
            let lam = Complex64::from_polar(rho * r + 1e-3, 1.1);
            let a = resolvent_norm(&m, lam).unwrap();
            let b = neumann_resolvent_norm(&m, lam).unwrap();
            assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
        }
        // nilpotent input terminates exactly
        let s = neumann_resolvent(&shift(6), c(0.5), 1e-12, 100).unwrap();
        assert_eq!(s.tail_bound, 0.0);
        assert_eq!(s.terms, 6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ComplexMatrix::zeros(0), Err(LinalgError::DimensionCap(0))));
        assert!(matches!(ComplexMatrix::zeros(DIM_CAP + 1), Err(LinalgError::DimensionCap(_))));
        assert!(matches!(ComplexMatrix::diag_real(&[1.0, f64::NAN]), Err(LinalgError::NonFinite)));
        let a = ComplexMatrix::identity(2).unwrap();
        let b = ComplexMatrix::identity(3).unwrap();
        assert!(matches!(a.try_mul(&b), Err(LinalgError::DimMismatch { .. })));
    }

    #[test]
    fn numerical_rank_counts() {
        assert_eq!(numerical_rank(&ComplexMatrix::identity(3).unwrap(), 1e-8).unwrap(), 3);
        assert_eq!(numerical_rank(&ComplexMatrix::unit(3, 0, 2).unwrap(), 1e-8).unwrap(), 1);
    }
}
