//! Finite sections of the direct-sum algebra `N = {(x_n, d_n x_n d_n^{-1})}`,
//! the averaged shift blocks `u_{n,k}`, the norms `p_n`, and the
//! element-level structural checks built on them.
//!
//! Everything here works level by level: an element is an expression tree
//! that evaluates to an `n x n` matrix at each level `n`. Quantities that are
//! a supremum over all levels are only ever computed over a finite level
//! range and are reported as truncated.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, ComplexMatrix, LinalgError, DIM_CAP};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CaiError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("value out of working range: {0}")]
    RangeExceeded(String),
    #[error("invalid weight rule: {0}")]
    InvalidRule(String),
    #[error("level {level} outside 1..={n_max}")]
    LevelOutOfRange { level: usize, n_max: usize },
    #[error("element is zero at level {0}")]
    ZeroElement(usize),
    #[error("matrix at level {level} has dimension {dim}")]
    LevelDim { level: usize, dim: usize },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, CaiError>;

/// Rule producing the weight sequence `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CRule {
    /// `c_n = n + offset`.
    Linear { offset: f64 },
    /// `c_n = values[n - 1]`.
    Table { values: Vec<f64> },
}

impl Default for CRule {
    fn default() -> Self {
        CRule::Linear { offset: 1.0 }
    }
}

impl CRule {
    fn value(&self, n: usize) -> Option<f64> {
        match self {
            CRule::Linear { offset } => Some(n as f64 + offset),
            CRule::Table { values } => values.get(n - 1).copied(),
        }
    }
}

/// The weight data fixing an algebra instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CaiParams {
    rule: CRule,
    n_max: usize,
    c: Vec<f64>,
}

pub const DEFAULT_N_MAX: usize = 100;

impl Default for CaiParams {
    fn default() -> Self {
        Self::new(CRule::default(), DEFAULT_N_MAX).expect("default parameters are valid")
    }
}

impl CaiParams {
    pub fn new(rule: CRule, n_max: usize) -> Result<Self> {
        if n_max == 0 || n_max > DIM_CAP {
            return Err(CaiError::InvalidRule(format!("n_max = {n_max} outside 1..={DIM_CAP}")));
        }
        if let CRule::Linear { offset } = rule {
            if !offset.is_finite() {
                return Err(CaiError::InvalidRule("non-finite offset".into()));
            }
        }
        let mut c = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let cn = rule
                .value(n)
                .ok_or_else(|| CaiError::InvalidRule(format!("table has no entry for level {n}")))?;
            if !cn.is_finite() || cn <= 1.0 {
                return Err(CaiError::InvalidRule(format!("c_{n} = {cn} must exceed 1")));
            }
            if let Some(&prev) = c.last() {
                if cn <= prev {
                    return Err(CaiError::InvalidRule(format!("c_{n} = {cn} does not exceed c_{} = {prev}", n - 1)));
                }
            }
            if !cn.powi(n as i32 - 1).is_finite() {
                return Err(CaiError::RangeExceeded(format!("c_{n}^{} overflows", n - 1)));
            }
            c.push(cn);
        }
        Ok(Self { rule, n_max, c })
    }

    pub fn rule(&self) -> &CRule {
        &self.rule
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `c_n` for `1 <= n <= n_max`.
    pub fn c(&self, n: usize) -> f64 {
        self.c[n - 1]
    }

    pub fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.n_max {
            return Err(CaiError::LevelOutOfRange { level: n, n_max: self.n_max });
        }
        Ok(())
    }

    pub fn check_range(&self, range: &RangeInclusive<usize>) -> Result<()> {
        if range.is_empty() {
            return Err(CaiError::InvalidArgument(format!("empty level range {range:?}")));
        }
        self.check_level(*range.start())?;
        self.check_level(*range.end())
    }

    pub fn full_range(&self) -> RangeInclusive<usize> {
        1..=self.n_max
    }
}

/// `L_n`: ones on the first superdiagonal, so `L_n e_1 = 0`, `L_n e_j = e_{j-1}`.
pub fn shift_matrix(n: usize) -> Result<ComplexMatrix> {
    Ok(ComplexMatrix::from_real_fn(n, |i, j| if j == i + 1 { 1.0 } else { 0.0 })?)
}

/// `d M d^{-1}` with `d = diag(c, c^2, ..., c^n)`, computed entrywise as
/// `c^{i-j} M_{ij}`.
pub fn similarity_scale(m: &ComplexMatrix, c: f64) -> Result<ComplexMatrix> {
    if !(c.is_finite() && c > 0.0) {
        return Err(CaiError::InvalidArgument(format!("scaling base {c}")));
    }
    let n = m.dim();
    let mut out = m.clone().into_dmatrix();
    for i in 0..n {
        for j in 0..n {
            let z = out[(i, j)];
            if z.re == 0.0 && z.im == 0.0 {
                continue;
            }
            let s = z * c.powi(i as i32 - j as i32);
            if !s.re.is_finite() || !s.im.is_finite() {
                return Err(CaiError::RangeExceeded(format!("entry ({i},{j}) scaled by {c}^{}", i as i64 - j as i64)));
            }
            out[(i, j)] = s;
        }
    }
    Ok(ComplexMatrix::from_dmatrix(out)?)
}

/// `p_n(x) = max(‖x‖, ‖d_n x d_n^{-1}‖)`.
pub fn p_level_norm(x: &ComplexMatrix, c: f64) -> Result<f64> {
    let plain = linalg::op_norm(x)?;
    let scaled = linalg::op_norm(&similarity_scale(x, c)?)?;
    Ok(plain.max(scaled))
}

/// The averaged shift block at level `n` for cai index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaiBlock {
    pub u: ComplexMatrix,
    /// Exponents averaged over; `None` when `n < k` and the block is the identity.
    pub exponents: Option<RangeInclusive<usize>>,
    pub mu: usize,
}

/// Integer interval `[ceil(n/k), floor(2n/k)]`, nonempty whenever `n >= k >= 1`.
pub fn averaging_interval(n: usize, k: usize) -> RangeInclusive<usize> {
    n.div_ceil(k)..=(2 * n) / k
}

/// `u_{n,k}`: the average of `L_n^i` over `i` in the averaging interval, or
/// `I_n` when `n < k`.
pub fn cai_block(n: usize, k: usize) -> Result<CaiBlock> {
    if k == 0 {
        return Err(CaiError::InvalidArgument("cai index k must be positive".into()));
    }
    if n < k {
        return Ok(CaiBlock { u: ComplexMatrix::identity(n)?, exponents: None, mu: 1 });
    }
    let e = averaging_interval(n, k);
    let mu = e.end() - e.start() + 1;
    let w = 1.0 / mu as f64;
    // L_n^i has ones on superdiagonal i; powers i >= n vanish.
    let u = ComplexMatrix::from_real_fn(n, |r, s| if s > r && e.contains(&(s - r)) { w } else { 0.0 })?;
    Ok(CaiBlock { u, exponents: Some(e), mu })
}

/// Serializable matrix form: row-major real parts and optional imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = CaiError;
    fn try_from(m: MatrixJson) -> Result<Self> {
        let n = m.re.len();
        let re_ok = m.re.iter().all(|r| r.len() == n);
        let im_ok = m.im.as_ref().is_none_or(|im| im.len() == n && im.iter().all(|r| r.len() == n));
        if !re_ok || !im_ok {
            return Err(CaiError::InvalidArgument("matrix rows must be square".into()));
        }
        Ok(ComplexMatrix::from_fn(n, |i, j| {
            Complex64::new(m.re[i][j], m.im.as_ref().map_or(0.0, |im| im[i][j]))
        })?)
    }
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let rows = m.to_rows();
        let re = rows.iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
        let im: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
        let has_im = im.iter().flatten().any(|&v| v != 0.0);
        MatrixJson { re, im: has_im.then_some(im) }
    }
}

/// An element of the direct-sum algebra, evaluated level by level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementJson", into = "ElementJson")]
pub enum Element {
    /// Finitely supported tuple; zero off the listed levels.
    FinSupp(BTreeMap<usize, ComplexMatrix>),
    /// The cai element `u_k`.
    CaiUnit(usize),
    Scale(Complex64, Box<Element>),
    Sum(Vec<Element>),
    /// Ordered product.
    Prod(Vec<Element>),
    /// Level-wise adjoint of the first coordinate.
    Adjoint(Box<Element>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ElementJson {
    FinSupp { levels: BTreeMap<String, MatrixJson> },
    CaiUnit { k: usize },
    Scale { re: f64, #[serde(default)] im: f64, child: Box<ElementJson> },
    Sum { children: Vec<ElementJson> },
    Prod { children: Vec<ElementJson> },
    Adjoint { child: Box<ElementJson> },
}

impl TryFrom<ElementJson> for Element {
    type Error = CaiError;
    fn try_from(j: ElementJson) -> Result<Self> {
        Ok(match j {
            ElementJson::FinSupp { levels } => {
                let mut map = BTreeMap::new();
                for (key, m) in levels {
                    let n: usize = key
                        .parse()
                        .map_err(|_| CaiError::InvalidArgument(format!("level key {key:?} is not a positive integer")))?;
                    let m = ComplexMatrix::try_from(m)?;
                    if m.dim() != n {
                        return Err(CaiError::LevelDim { level: n, dim: m.dim() });
                    }
                    map.insert(n, m);
                }
                Element::FinSupp(map)
            }
            ElementJson::CaiUnit { k } => {
                if k == 0 {
                    return Err(CaiError::InvalidArgument("cai index k must be positive".into()));
                }
                Element::CaiUnit(k)
            }
            ElementJson::Scale { re, im, child } => Element::Scale(Complex64::new(re, im), Box::new((*child).try_into()?)),
            ElementJson::Sum { children } => Element::Sum(children.into_iter().map(Element::try_from).collect::<Result<_>>()?),
            ElementJson::Prod { children } => Element::Prod(children.into_iter().map(Element::try_from).collect::<Result<_>>()?),
            ElementJson::Adjoint { child } => Element::Adjoint(Box::new((*child).try_into()?)),
        })
    }
}

impl From<Element> for ElementJson {
    fn from(e: Element) -> Self {
        match e {
            Element::FinSupp(map) => ElementJson::FinSupp { levels: map.iter().map(|(n, m)| (n.to_string(), MatrixJson::from(m))).collect() },
            Element::CaiUnit(k) => ElementJson::CaiUnit { k },
            Element::Scale(s, c) => ElementJson::Scale { re: s.re, im: s.im, child: Box::new((*c).into()) },
            Element::Sum(cs) => ElementJson::Sum { children: cs.into_iter().map(Into::into).collect() },
            Element::Prod(cs) => ElementJson::Prod { children: cs.into_iter().map(Into::into).collect() },
            Element::Adjoint(c) => ElementJson::Adjoint { child: Box::new((*c).into()) },
        }
    }
}

impl Element {
    pub fn zero() -> Self {
        Element::FinSupp(BTreeMap::new())
    }

    /// A finitely supported element with one nonzero level.
    pub fn single(level: usize, m: ComplexMatrix) -> Result<Self> {
        if m.dim() != level {
            return Err(CaiError::LevelDim { level, dim: m.dim() });
        }
        Ok(Element::FinSupp(BTreeMap::from([(level, m)])))
    }

    pub fn fin_supp(levels: BTreeMap<usize, ComplexMatrix>) -> Result<Self> {
        for (&n, m) in &levels {
            if m.dim() != n {
                return Err(CaiError::LevelDim { level: n, dim: m.dim() });
            }
        }
        Ok(Element::FinSupp(levels))
    }

    pub fn mul(self, rhs: Element) -> Element {
        Element::Prod(vec![self, rhs])
    }

    pub fn add(self, rhs: Element) -> Element {
        Element::Sum(vec![self, rhs])
    }

    pub fn sub(self, rhs: Element) -> Element {
        Element::Sum(vec![self, Element::Scale(Complex64::new(-1.0, 0.0), Box::new(rhs))])
    }

    pub fn scale(self, s: f64) -> Element {
        Element::Scale(Complex64::new(s, 0.0), Box::new(self))
    }

    pub fn adjoint(self) -> Element {
        Element::Adjoint(Box::new(self))
    }

    /// True when the tree only uses finitely supported and cai leaves
    /// combined by scaling, sums and products.
    pub fn in_tested_family(&self) -> bool {
        match self {
            Element::FinSupp(_) | Element::CaiUnit(_) => true,
            Element::Scale(_, c) => c.in_tested_family(),
            Element::Sum(cs) | Element::Prod(cs) => cs.iter().all(Element::in_tested_family),
            Element::Adjoint(_) => false,
        }
    }

    /// Highest level carrying a finitely supported leaf, if any.
    pub fn top_support_level(&self) -> Option<usize> {
        match self {
            Element::FinSupp(m) => m.keys().next_back().copied(),
            Element::CaiUnit(_) => None,
            Element::Scale(_, c) | Element::Adjoint(c) => c.top_support_level(),
            Element::Sum(cs) | Element::Prod(cs) => cs.iter().filter_map(Element::top_support_level).max(),
        }
    }

    /// Returns a copy with all levels below `m0` replaced by zero.
    pub fn tail_from(self, m0: usize) -> Result<Element> {
        let mut low = BTreeMap::new();
        for n in 1..m0 {
            low.insert(n, ComplexMatrix::identity(n)?);
        }
        // u_k with k beyond every level is the identity at each level
        let mask = Element::CaiUnit(usize::MAX).sub(Element::FinSupp(low));
        Ok(Element::Prod(vec![mask, self]))
    }
}

/// Evaluates `a` at level `n`.
pub fn eval_level(a: &Element, n: usize, params: &CaiParams) -> Result<ComplexMatrix> {
    params.check_level(n)?;
    eval_unchecked(a, n)
}

fn eval_unchecked(a: &Element, n: usize) -> Result<ComplexMatrix> {
    Ok(match a {
        Element::FinSupp(levels) => match levels.get(&n) {
            Some(m) => {
                if m.dim() != n {
                    return Err(CaiError::LevelDim { level: n, dim: m.dim() });
                }
                m.clone()
            }
            None => ComplexMatrix::zeros(n)?,
        },
        Element::CaiUnit(k) => cai_block(n, *k)?.u,
        Element::Scale(s, c) => eval_unchecked(c, n)?.scale(*s)?,
        Element::Sum(cs) => {
            let mut acc = ComplexMatrix::zeros(n)?;
            for c in cs {
                acc = acc.try_add(&eval_unchecked(c, n)?)?;
            }
            acc
        }
        Element::Prod(cs) => {
            let mut acc = ComplexMatrix::identity(n)?;
            for c in cs {
                acc = acc.try_mul(&eval_unchecked(c, n)?)?;
            }
            acc
        }
        Element::Adjoint(c) => eval_unchecked(c, n)?.adjoint(),
    })
}

/// Per-level `p_n` values and their maximum over a finite level range.
#[derive(Debug, Clone, PartialEq)]
pub struct PNormProfile {
    pub per_level: BTreeMap<usize, f64>,
    /// Maximum over `range`: a lower bound for the full supremum.
    pub sup: f64,
    pub range: RangeInclusive<usize>,
}

impl PNormProfile {
    pub const LABEL: &'static str = "truncated sup";

    /// Level attaining the truncated supremum (smallest on ties).
    pub fn argmax(&self) -> Option<usize> {
        self.per_level.iter().find(|(_, &v)| v == self.sup).map(|(&n, _)| n)
    }
}

pub fn p_norm(a: &Element, range: RangeInclusive<usize>, params: &CaiParams) -> Result<PNormProfile> {
    params.check_range(&range)?;
    let mut per_level = BTreeMap::new();
    let mut sup: f64 = 0.0;
    for n in range.clone() {
        let x = eval_unchecked(a, n)?;
        let v = p_level_norm(&x, params.c(n))?;
        sup = sup.max(v);
        per_level.insert(n, v);
    }
    Ok(PNormProfile { per_level, sup, range })
}

/// `p(a u_k − a) + p(u_k a − a)` over the range.
pub fn cai_defect(a: &Element, k: usize, range: RangeInclusive<usize>, params: &CaiParams) -> Result<f64> {
    let (right, left) = cai_defect_sides(a, k, range, params)?;
    Ok(right.sup + left.sup)
}

/// Profiles of `a u_k − a` (right) and `u_k a − a` (left).
pub fn cai_defect_sides(
    a: &Element,
    k: usize,
    range: RangeInclusive<usize>,
    params: &CaiParams,
) -> Result<(PNormProfile, PNormProfile)> {
    params.check_range(&range)?;
    let mut right = BTreeMap::new();
    let mut left = BTreeMap::new();
    let (mut rs, mut ls) = (0.0f64, 0.0f64);
    for n in range.clone() {
        let x = eval_unchecked(a, n)?;
        let u = cai_block(n, k)?.u;
        let c = params.c(n);
        let r = p_level_norm(&x.try_mul(&u)?.try_sub(&x)?, c)?;
        let l = p_level_norm(&u.try_mul(&x)?.try_sub(&x)?, c)?;
        rs = rs.max(r);
        ls = ls.max(l);
        right.insert(n, r);
        left.insert(n, l);
    }
    Ok((
        PNormProfile { per_level: right, sup: rs, range: range.clone() },
        PNormProfile { per_level: left, sup: ls, range },
    ))
}

/// Witness that a nonzero element is outside the Jacobson radical.
#[derive(Debug, Clone)]
pub struct SemisimpleWitness {
    pub level: usize,
    /// Zero-based basis index `i` with `x_m e_i != 0`.
    pub basis_index: usize,
    pub y: Element,
    pub v: Vec<Complex64>,
    /// `‖(I − y x) v‖` at the witness level.
    pub residual: f64,
}

pub fn semisimple_witness(x: &Element, m: usize, params: &CaiParams) -> Result<SemisimpleWitness> {
    let xm = eval_level(x, m, params)?;
    let i = (0..m)
        .find(|&j| (0..m).any(|r| xm.get(r, j) != Complex64::new(0.0, 0.0)))
        .ok_or(CaiError::ZeroElement(m))?;
    let z: Vec<Complex64> = (0..m).map(|r| xm.get(r, i)).collect();
    let zz = linalg::vec_norm(&z).powi(2);
    // y = e_i z^* / ‖z‖², so y z = e_i
    let ym = ComplexMatrix::from_fn(m, |r, s| if r == i { z[s].conj() / zz } else { Complex64::new(0.0, 0.0) })?;
    let mut v = vec![Complex64::new(0.0, 0.0); m];
    v[i] = Complex64::new(1.0, 0.0);
    let yx = ym.try_mul(&xm)?;
    let w = linalg::ComplexMatrix::identity(m)?.try_sub(&yx)?.apply(&v)?;
    let residual = linalg::vec_norm(&w);
    Ok(SemisimpleWitness { level: m, basis_index: i, y: Element::single(m, ym)?, v, residual })
}

/// True iff both `x` and `d x d^{-1}` are selfadjoint within `tol`. In that
/// case `x` must be diagonal; a non-diagonal `x` yields `InvariantViolation`.
pub fn diagonal_forcing_check(x: &ComplexMatrix, c: f64, tol: f64) -> Result<bool> {
    if !(c > 1.0) {
        return Err(CaiError::InvalidArgument(format!("scaling base {c} must exceed 1")));
    }
    let sa = x.max_abs_diff(&x.adjoint())? <= tol;
    if !sa {
        return Ok(false);
    }
    let s = similarity_scale(x, c)?;
    let scaled_sa = s.max_abs_diff(&s.adjoint())? <= tol;
    if !scaled_sa {
        return Ok(false);
    }
    let n = x.dim();
    let off = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| x.get(i, j).norm())
        .fold(0.0, f64::max);
    if off > tol {
        return Err(CaiError::InvariantViolation(format!(
            "x and its scaled form are selfadjoint but x has off-diagonal mass {off:e}"
        )));
    }
    Ok(true)
}

/// Rank-one idempotents are exactly the minimal idempotents of `M_n`.
pub fn minimal_idempotent_check(e: &ComplexMatrix, tol: f64) -> Result<bool> {
    let defect = linalg::op_norm(&e.try_mul(e)?.try_sub(e)?)?;
    if defect > tol {
        return Ok(false);
    }
    Ok(linalg::numerical_rank(e, 1e-8)? == 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub value: Complex64,
    /// Largest level contributing this value; `None` for the point 0.
    pub top_level: Option<usize>,
}

/// Level-wise spectrum: eigenvalues of modulus greater than `delta` over the
/// range, together with 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementSpectrum {
    pub delta: f64,
    pub range: RangeInclusive<usize>,
    pub points: Vec<SpectrumPoint>,
}

impl ElementSpectrum {
    /// Number of points with modulus above `delta` (0 excluded).
    pub fn count_above(&self, delta: f64) -> usize {
        self.points.iter().filter(|p| p.value.norm() > delta).count()
    }
}

/// Eigenvalues closer than this (relative to `max(1, |λ|)`) are merged.
pub const SPECTRUM_MERGE_TOL: f64 = 1e-6;

pub fn element_spectrum(a: &Element, range: RangeInclusive<usize>, delta: f64, params: &CaiParams) -> Result<ElementSpectrum> {
    if !(delta > 0.0) {
        return Err(CaiError::InvalidArgument(format!("delta = {delta} must be positive")));
    }
    params.check_range(&range)?;
    let mut points: Vec<SpectrumPoint> = vec![SpectrumPoint { value: Complex64::new(0.0, 0.0), top_level: None }];
    for n in range.clone() {
        let x = eval_unchecked(a, n)?;
        for lam in linalg::eigenvalues(&x)? {
            if lam.norm() <= delta {
                continue;
            }
            merge_point(&mut points, lam, n);
        }
    }
    Ok(ElementSpectrum { delta, range, points })
}

pub(crate) fn merge_point(points: &mut Vec<SpectrumPoint>, lam: Complex64, level: usize) {
    for p in points.iter_mut().skip(1) {
        if (p.value - lam).norm() <= SPECTRUM_MERGE_TOL * lam.norm().max(1.0) {
            p.top_level = Some(p.top_level.map_or(level, |t| t.max(level)));
            return;
        }
    }
    points.push(SpectrumPoint { value: lam, top_level: Some(level) });
}
