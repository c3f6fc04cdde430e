//! Parametric verifiers for the quantitative statements about the cai
//! algebra. Each verifier computes a measured quantity and the bound it is
//! supposed to respect, and returns a [`VerificationReport`].
//!
//! Existence statements ("there exist k, m such that ...") are made
//! constructive: `k` and `m` are selected from the finite truncation exactly
//! as the proofs select them. When the truncation cannot certify the
//! selection, the report is inconclusive rather than failed.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cai::{
    self, cai_block, eval_level, p_level_norm, p_norm, shift_matrix, similarity_scale, CaiError, CaiParams, Element, Result,
};
use crate::linalg::{self, ComplexMatrix, LinalgError, DIM_CAP};
use crate::report::{params, worst_report, VerificationReport};

/// Tolerance for the exact identity `⟨L_n^j η, η⟩ = 1 − j/n`.
pub const ETA_IDENTITY_TOL: f64 = 1e-12;
/// Residual accepted by the semisimplicity witness.
pub const WITNESS_TOL: f64 = 1e-10;
/// Power-decay target for `sup_n ‖S_n^k‖`.
pub const DECAY_TARGET: f64 = 1e-6;

fn invalid(msg: impl Into<String>) -> CaiError {
    CaiError::InvalidArgument(msg.into())
}

fn range_params(range: &RangeInclusive<usize>) -> [(&'static str, f64); 2] {
    [("level_lo", *range.start() as f64), ("level_hi", *range.end() as f64)]
}

/// `(1/|E|) Σ_{e∈E} L^e` for the shift on `C^dim`.
pub fn power_average(dim: usize, exponents: &[usize]) -> Result<ComplexMatrix> {
    if exponents.is_empty() {
        return Err(invalid("empty exponent set"));
    }
    let w = 1.0 / exponents.len() as f64;
    let set: BTreeSet<usize> = exponents.iter().copied().collect();
    if set.len() != exponents.len() {
        return Err(invalid("exponent set has repeated members"));
    }
    Ok(ComplexMatrix::from_real_fn(dim, |i, j| if j >= i && set.contains(&(j - i)) { w } else { 0.0 })?)
}

/// `‖u₁u₂ − u₂‖ ≤ 2n/μ₂` for power averages of the shift over `E1 ⊆ [0, n]`
/// and a consecutive set `E2`.
pub fn verify_averaging(e1: &[usize], e2: &[usize], n: usize, shift_dim: usize) -> Result<VerificationReport> {
    if e1.is_empty() || e2.is_empty() {
        return Err(invalid("E1 and E2 must be nonempty"));
    }
    if let Some(bad) = e1.iter().find(|&&e| e > n) {
        return Err(invalid(format!("E1 member {bad} outside [0, {n}]")));
    }
    let mut sorted = e2.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(invalid("E2 must be a set of consecutive integers"));
    }
    if shift_dim == 0 || shift_dim > DIM_CAP {
        return Err(invalid(format!("shift dimension {shift_dim}")));
    }
    let u1 = power_average(shift_dim, e1)?;
    let u2 = power_average(shift_dim, &sorted)?;
    let measured = linalg::op_norm(&u1.try_mul(&u2)?.try_sub(&u2)?)?;
    let mu2 = sorted.len();
    let bound = 2.0 * n as f64 / mu2 as f64;
    let p = params([
        ("n", n as f64),
        ("mu1", e1.len() as f64),
        ("mu2", mu2 as f64),
        ("e2_start", sorted[0] as f64),
        ("shift_dim", shift_dim as f64),
    ]);
    let mut e1_sorted = e1.to_vec();
    e1_sorted.sort_unstable();
    let mut r = VerificationReport::at_most("averaging_bound", p, measured, bound)
        .with_note(format!("E1 = {e1_sorted:?}"));
    if mu2 <= n {
        r = r.with_note("mu2 <= n: bound follows from ‖u1‖‖u2‖ + ‖u2‖ <= 2");
    }
    Ok(r)
}

/// `p(u_k) ≤ 1` over the range.
pub fn verify_cai_contractivity(p: &CaiParams, k: usize, range: RangeInclusive<usize>) -> Result<VerificationReport> {
    let prof = p_norm(&Element::CaiUnit(k), range.clone(), p)?;
    let [lo, hi] = range_params(&range);
    Ok(VerificationReport::at_most("cai_contractivity", params([("k", k as f64), lo, hi]), prof.sup, 1.0)
        .with_detail("argmax_level", prof.argmax().unwrap_or(0) as f64)
        .with_note(cai::PNormProfile::LABEL))
}

/// `p(u_k u_r − u_r) ≤ 2/t` for `k ≥ 2tr`.
pub fn verify_cai_mutual(p: &CaiParams, k: usize, r: usize, t: usize, range: RangeInclusive<usize>) -> Result<VerificationReport> {
    if t < 2 || r == 0 || k < 2 * t * r {
        return Err(invalid(format!("need integer t > 1 and k >= 2tr (k={k}, r={r}, t={t})")));
    }
    let diff = Element::CaiUnit(k).mul(Element::CaiUnit(r)).sub(Element::CaiUnit(r));
    let prof = p_norm(&diff, range.clone(), p)?;
    let [lo, hi] = range_params(&range);
    Ok(VerificationReport::at_most(
        "cai_mutual",
        params([("k", k as f64), ("r", r as f64), ("t", t as f64), lo, hi]),
        prof.sup,
        2.0 / t as f64,
    )
    .with_detail("argmax_level", prof.argmax().unwrap_or(0) as f64)
    .with_note(cai::PNormProfile::LABEL))
}

fn eta(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]
}

/// `⟨M η, η⟩` for the flat unit vector.
fn eta_form(m: &ComplexMatrix) -> Result<Complex64> {
    let e = eta(m.dim());
    Ok(linalg::inner(&m.apply(&e)?, &e))
}

/// `max_j |⟨L_n^j η, η⟩ − (1 − j/n)|` over `0 ≤ j ≤ n`.
pub fn eta_identity_error(n: usize) -> Result<f64> {
    let l = shift_matrix(n)?;
    let e = eta(n);
    let mut v = e.clone();
    let mut err: f64 = 0.0;
    for j in 0..=n {
        let form = linalg::inner(&v, &e);
        err = err.max((form - Complex64::new(1.0 - j as f64 / n as f64, 0.0)).norm());
        v = l.apply(&v)?;
    }
    Ok(err)
}

/// `‖u_{n,k}‖ ≥ 1 − 2/k` and `‖u_{n,k}³‖ ≥ 1 − 6/k`, with the flat-vector
/// certificate and the identity `⟨L_n^j η, η⟩ = 1 − j/n`.
pub fn verify_norm_lower(n: usize, k: usize) -> Result<VerificationReport> {
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 <= k <= n (n={n}, k={k})")));
    }
    let u = cai_block(n, k)?.u;
    let u3 = u.pow(3)?;
    let norm_u = linalg::op_norm(&u)?;
    let norm_u3 = linalg::op_norm(&u3)?;
    let bound_u = 1.0 - 2.0 / k as f64;
    let bound_u3 = 1.0 - 6.0 / k as f64;

    let eta_err = eta_identity_error(n)?;
    let cert_u = eta_form(&u)?.re;
    let cert_u3 = eta_form(&u3)?.re;

    let p = params([("n", n as f64), ("k", k as f64)]);
    let slack_u = norm_u - bound_u;
    let slack_u3 = norm_u3 - bound_u3;
    let mut r = if slack_u <= slack_u3 {
        VerificationReport::at_least("cai_norm_lower", p, norm_u, bound_u)
    } else {
        VerificationReport::at_least("cai_norm_lower", p, norm_u3, bound_u3)
    };
    r = r
        .with_detail("norm_u", norm_u)
        .with_detail("norm_u3", norm_u3)
        .with_detail("bound_u", bound_u)
        .with_detail("bound_u3", bound_u3)
        .with_detail("eta_cert_u", cert_u)
        .with_detail("eta_cert_u3", cert_u3)
        .with_detail("eta_identity_err", eta_err)
        .with_note("headline is the tighter of the two norm bounds");
    if slack_u.min(slack_u3) < -crate::report::PASS_SLACK {
        r = r.fail_with("norm lower bound violated");
    }
    if eta_err > ETA_IDENTITY_TOL {
        r = r.fail_with(format!("eta identity error {eta_err:e} exceeds {ETA_IDENTITY_TOL:e}"));
    }
    if cert_u < bound_u - crate::report::PASS_SLACK || cert_u3 < bound_u3 - crate::report::PASS_SLACK {
        r = r.fail_with("eta certificate below bound");
    }
    Ok(r)
}

/// [`verify_norm_lower`] over every `1 ≤ k ≤ n ≤ n_max`; returns the
/// report with the smallest margin, or the first failure.
pub fn verify_norm_lower_grid(n_max: usize) -> Result<VerificationReport> {
    let mut worst: Option<VerificationReport> = None;
    for n in 1..=n_max {
        for k in 1..=n {
            let r = verify_norm_lower(n, k)?;
            if !r.pass {
                return Ok(r.with_note(format!("first failure in the grid up to n_max = {n_max}")));
            }
            if worst.as_ref().is_none_or(|w| r.margin < w.margin) {
                worst = Some(r);
            }
        }
    }
    let mut r = worst.ok_or_else(|| invalid("empty grid"))?;
    r.params.insert("n_max".into(), n_max as f64);
    Ok(r.with_note("smallest margin over 1 <= k <= n <= n_max"))
}

/// `min_n ‖u_{n,r}³‖ ≥ 1/2` for `r ≥ 12`, and the `ℓ∞` embedding constant
/// `p(α·u_r³) ≥ (1/2) max|α_n|` on sampled indicator sequences.
pub fn verify_weakcompact_witness(
    p: &CaiParams,
    r: usize,
    range: RangeInclusive<usize>,
    seed: u64,
    samples: usize,
) -> Result<VerificationReport> {
    if r < 12 {
        return Err(invalid(format!("r = {r} < 12 does not guarantee 1 - 6/r >= 1/2")));
    }
    p.check_range(&range)?;
    let mut min_norm = f64::INFINITY;
    let mut argmin = 0;
    let mut p_levels = Vec::new();
    for n in range.clone() {
        let u3 = cai_block(n, r)?.u.pow(3)?;
        let norm = linalg::op_norm(&u3)?;
        if norm < min_norm {
            min_norm = norm;
            argmin = n;
        }
        p_levels.push(p_level_norm(&u3, p.c(n))?.max(norm));
    }

    // ᾱ ∈ {0,1}^range: p(ᾱ·x) = max over the selected levels of p_n(x_n).
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let levels = p_levels.len();
    for s in 0..samples {
        let mask: Vec<bool> = if s < levels {
            // indicator sequences first, one per level
            (0..levels).map(|i| i == s).collect()
        } else {
            (0..levels).map(|_| rng.random_bool(0.5)).collect()
        };
        if !mask.iter().any(|&b| b) {
            continue;
        }
        let val = mask.iter().zip(&p_levels).filter(|(b, _)| **b).map(|(_, v)| *v).fold(0.0, f64::max);
        min_ratio = min_ratio.min(val);
    }

    let [lo, hi] = range_params(&range);
    let mut rep = VerificationReport::at_least(
        "weak_compact_witness",
        params([("r", r as f64), lo, hi, ("seed", seed as f64), ("samples", samples as f64)]),
        min_norm,
        0.5,
    )
    .with_detail("argmin_level", argmin as f64)
    .with_detail("embedding_min_ratio", min_ratio)
    .with_note("r >= 12 from 1 - 6/r >= 1/2; a condition of the form 1 - 6n/r >= 1/2 cannot hold uniformly in n");
    if min_ratio < 0.5 - crate::report::PASS_SLACK {
        rep = rep.fail_with("l-infinity embedding constant below 1/2");
    }
    Ok(rep)
}

/// `‖d_n u_{n,k} d_n^{-1}‖ ≤ 1/c_n` for `n ≥ k`; measured as `max c_n ‖·‖`.
pub fn verify_cai_similarity(p: &CaiParams, k: usize, range: RangeInclusive<usize>) -> Result<VerificationReport> {
    p.check_range(&range)?;
    let lo = (*range.start()).max(k);
    let mut worst: f64 = 0.0;
    let mut worst_level = 0;
    for n in lo..=*range.end() {
        let u = cai_block(n, k)?.u;
        let v = linalg::op_norm(&similarity_scale(&u, p.c(n))?)? * p.c(n);
        if v > worst {
            worst = v;
            worst_level = n;
        }
    }
    let [a, b] = range_params(&range);
    Ok(VerificationReport::at_most("cai_similarity", params([("k", k as f64), a, b]), worst, 1.0)
        .with_detail("argmax_level", worst_level as f64)
        .with_note("measured is max over n >= k of c_n * ‖d_n u_{n,k} d_n^-1‖"))
}

/// Similarity decay along the tail of the range. For every tail level `n`
/// and the selected cai index `m ≤ n`:
/// `‖d_n T_n d_n^{-1}‖ ≤ p_n(T_n u_{n,m} − T_n) + p(T)/c_n`.
/// The headline compares `max_n (‖d_n T_n d_n^{-1}‖ − p(T)/c_n)` with
/// `ε/2 = max_n p_n(T_n u_{n,m} − T_n)` over the tail.
pub fn verify_similarity_decay(p: &CaiParams, a: &Element, range: RangeInclusive<usize>) -> Result<VerificationReport> {
    if !a.in_tested_family() {
        return Err(invalid("similarity decay is only checked for elements built from finitely supported and cai leaves"));
    }
    p.check_range(&range)?;
    let (lo, hi) = (*range.start(), *range.end());
    let tail_start = hi - (hi - lo) / 4;
    let p_a = p_norm(a, range.clone(), p)?.sup;

    let tail: Vec<(usize, ComplexMatrix, f64)> = (tail_start..=hi)
        .map(|n| {
            let x = eval_level(a, n, p)?;
            let scaled = linalg::op_norm(&similarity_scale(&x, p.c(n))?)?;
            Ok((n, x, scaled))
        })
        .collect::<Result<_>>()?;

    // Candidate cai indices m <= tail_start; keep the one with the smallest tail defect.
    let mut candidates: BTreeSet<usize> = BTreeSet::new();
    let mut m = tail_start;
    while m >= 1 {
        candidates.insert(m);
        m /= 2;
    }
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for &m in &candidates {
        let mut defects = Vec::with_capacity(tail.len());
        for (n, x, _) in &tail {
            let u = cai_block(*n, m)?.u;
            defects.push(p_level_norm(&x.try_mul(&u)?.try_sub(x)?, p.c(*n))?);
        }
        let sup = defects.iter().copied().fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(_, s, _)| sup < *s) {
            best = Some((m, sup, defects));
        }
    }
    let (m, half_eps, defects) = best.expect("at least one candidate");

    let mut measured = f64::NEG_INFINITY;
    let mut pointwise_ok = true;
    let mut max_scaled: f64 = 0.0;
    for ((n, _, scaled), defect) in tail.iter().zip(&defects) {
        let c = p.c(*n);
        measured = measured.max(scaled - p_a / c);
        max_scaled = max_scaled.max(*scaled);
        if *scaled > defect + p_a / c + crate::report::PASS_SLACK {
            pointwise_ok = false;
        }
    }
    let [a_lo, a_hi] = range_params(&range);
    let mut rep = VerificationReport::at_most(
        "similarity_decay",
        params([a_lo, a_hi, ("tail_start", tail_start as f64)]),
        measured,
        half_eps,
    )
    .with_detail("cai_index_m", m as f64)
    .with_detail("p_a_truncated", p_a)
    .with_detail("max_tail_scaled_norm", max_scaled)
    .with_note("bound is eps/2 = max tail p_n(T_n u_{n,m} - T_n); measured subtracts p(T)/c_n");
    if !pointwise_ok {
        rep = rep.fail_with("pointwise tail bound violated");
    }
    Ok(rep)
}

/// At level `n`: `‖Δ_L T_n‖ ≤ p_n(T_n)/(c_n − 1)` and
/// `|T_{ij}| ≤ c_n^{j−i} p_n(T_n)`. Measured is the worse of the two ratios.
pub fn verify_triangular_bounds(p: &CaiParams, a: &Element, n: usize) -> Result<VerificationReport> {
    let x = eval_level(a, n, p)?;
    let c = p.c(n);
    let pn = p_level_norm(&x, c)?;
    let (_, lower) = linalg::triangular_parts(&x)?;
    let lower_norm = linalg::op_norm(&lower)?;
    let lse_bound = pn / (c - 1.0);
    let lse_ratio = if lower_norm == 0.0 { 0.0 } else { lower_norm / lse_bound };
    let mut entry_ratio: f64 = 0.0;
    if pn > 0.0 {
        for i in 0..n {
            for j in 0..n {
                let v = x.get(i, j).norm();
                if v > 0.0 {
                    entry_ratio = entry_ratio.max(v / (c.powi(j as i32 - i as i32) * pn));
                }
            }
        }
    }
    Ok(VerificationReport::at_most("triangular_bounds", params([("n", n as f64), ("c_n", c)]), lse_ratio.max(entry_ratio), 1.0)
        .with_detail("lower_norm", lower_norm)
        .with_detail("lse_bound", lse_bound)
        .with_detail("lse_ratio", lse_ratio)
        .with_detail("entry_ratio", entry_ratio)
        .with_detail("p_n", pn))
}

/// Constructive choice of the cai index: the smallest `k` in the range with
/// `p(u_k T − T) < ε p(T)` (truncated).
#[derive(Debug, Clone, PartialEq)]
pub struct KSelection {
    pub k: usize,
    pub defect: f64,
    pub p_t: f64,
}

pub fn select_k(p: &CaiParams, a: &Element, eps: f64, range: RangeInclusive<usize>) -> Result<Option<KSelection>> {
    let p_t = p_norm(a, range.clone(), p)?.sup;
    if p_t == 0.0 {
        return Ok(None);
    }
    let levels: Vec<(usize, ComplexMatrix)> = range.clone().map(|n| Ok((n, eval_level(a, n, p)?))).collect::<Result<_>>()?;
    for k in 1..=*range.end() {
        let mut defect: f64 = 0.0;
        let mut ok = true;
        // u_{n,k} = I for n < k, so only levels n >= k contribute.
        for (n, x) in levels.iter().filter(|(n, _)| *n >= k) {
            let u = cai_block(*n, k)?.u;
            defect = defect.max(p_level_norm(&u.try_mul(x)?.try_sub(x)?, p.c(*n))?);
            if defect >= eps * p_t {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(KSelection { k, defect, p_t }));
        }
    }
    Ok(None)
}

/// First level with `c_n/(c_n − 1) < 2` and `ε + 2/(c_n − 1) < 2ε`.
pub fn select_m_power(p: &CaiParams, eps: f64) -> Option<usize> {
    (1..=p.n_max()).find(|&n| {
        let c = p.c(n);
        c / (c - 1.0) < 2.0 && eps + 2.0 / (c - 1.0) < 2.0 * eps
    })
}

fn binomial(r: usize, s: usize) -> f64 {
    if s > r {
        return 0.0;
    }
    let s = s.min(r - s);
    (0..s).fold(1.0, |acc, i| acc * (r - i) as f64 / (i + 1) as f64)
}

/// `Σ_{s=0}^{k−1} C(r,s) (2b)^r ε^{r−s}`.
pub fn power_bound_rhs(k: usize, r: usize, b: f64, eps: f64) -> f64 {
    (0..k).map(|s| binomial(r, s) * (2.0 * b).powi(r as i32) * eps.powi(r as i32 - s as i32)).sum()
}

/// `‖(Δ̄_U T_n)^r‖ ≤ Σ_{s<k} C(r,s) (2p(T))^r ε^{r−s}` for `n ≥ max(k, m)`.
/// Measured is the largest ratio LHS/RHS.
pub fn verify_power_bound(
    p: &CaiParams,
    a: &Element,
    eps: f64,
    r_list: &[usize],
    range: RangeInclusive<usize>,
) -> Result<VerificationReport> {
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    let [lo, hi] = range_params(&range);
    let base = params([("eps", eps), lo, hi, ("r_max", r_list.iter().copied().max().unwrap_or(0) as f64)]);
    let Some(sel) = select_k(p, a, eps, range.clone())? else {
        return Ok(VerificationReport::inconclusive("power_bound", base, "no k within the truncation achieves p(u_k T - T) < eps p(T)"));
    };
    let Some(m) = select_m_power(p, eps) else {
        return Ok(VerificationReport::inconclusive("power_bound", base, "no level m with c_m large enough"));
    };
    let start = sel.k.max(m).max(*range.start());
    if start > *range.end() {
        return Ok(VerificationReport::inconclusive("power_bound", base, format!("max(k, m) = {start} beyond the truncation"))
            .with_detail("k", sel.k as f64)
            .with_detail("m", m as f64));
    }
    let mut worst: f64 = 0.0;
    let (mut worst_n, mut worst_r) = (0, 0);
    for n in start..=*range.end() {
        let upper = linalg::upper_part(&eval_level(a, n, p)?)?;
        for &r in r_list {
            let lhs = linalg::op_norm(&upper.pow(r as u32)?)?;
            let rhs = power_bound_rhs(sel.k, r, sel.p_t, eps);
            let ratio = lhs / rhs;
            if ratio > worst {
                worst = ratio;
                worst_n = n;
                worst_r = r;
            }
        }
    }
    Ok(VerificationReport::at_most("power_bound", base, worst, 1.0)
        .with_detail("k", sel.k as f64)
        .with_detail("m", m as f64)
        .with_detail("defect", sel.defect)
        .with_detail("p_t_truncated", sel.p_t)
        .with_detail("worst_level", worst_n as f64)
        .with_detail("worst_r", worst_r as f64)
        .with_note("measured is max ratio of ‖(upper T_n)^r‖ to the binomial bound"))
}

/// Any product of upper triangular matrices containing `k` factors of
/// `S₁ = u_{n,k} Δ̄_U T_n` vanishes. Checks `S₁^k` and `(S₂S₁)^k` for exact zero.
pub fn verify_nilpotency(p: &CaiParams, a: &Element, k: usize, n: usize) -> Result<VerificationReport> {
    if n < k {
        return Err(invalid(format!("nilpotency needs n >= k (n={n}, k={k})")));
    }
    let upper = linalg::upper_part(&eval_level(a, n, p)?)?;
    let s1 = cai_block(n, k)?.u.try_mul(&upper)?;
    let s2 = upper.try_sub(&s1)?;
    let pure = s1.pow(k as u32)?;
    let mixed = s2.try_mul(&s1)?.pow(k as u32)?;
    let measured = pure.max_abs().max(mixed.max_abs());
    let mut rep = VerificationReport::at_most("nilpotency", params([("n", n as f64), ("k", k as f64)]), measured, 0.0)
        .with_note("exact zero required");
    if measured != 0.0 {
        rep = rep.fail_with("product is not exactly zero");
    }
    Ok(rep)
}

/// `K(k, b, ε) = 1 / (2 b (1 − ε) ε^k)`.
pub fn kappa(k: usize, b: f64, eps: f64) -> Result<f64> {
    if k == 0 || !(b > 0.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("kappa needs k >= 1, b > 0, 0 < eps < 1 (k={k}, b={b}, eps={eps})")));
    }
    Ok(1.0 / (2.0 * b * (1.0 - eps) * eps.powi(k as i32)))
}

/// Closed form `|λ|^{-1} Σ_{s<k} (2b/|λ|)^s (1 − 2bε/|λ|)^{−s−1}` of the
/// resolvent series bound; requires `|λ| > 2bε`.
pub fn resolvent_series_bound(k: usize, b: f64, eps: f64, lambda_abs: f64) -> f64 {
    let q = 2.0 * b / lambda_abs;
    let w = 1.0 - 2.0 * b * eps / lambda_abs;
    (0..k).map(|s| q.powi(s as i32) * w.powi(-(s as i32) - 1)).sum::<f64>() / lambda_abs
}

/// Brute-force partial sums `|λ|^{-1} Σ_{r<R} Σ_{s<k} C(r,s) (2b/|λ|)^r ε^{r−s}`
/// never exceed `K(k, b, ε)` on a grid of `|λ| > 4bε`.
pub fn verify_kappa(k: usize, b: f64, eps: f64, radius_factors: &[f64], terms: usize) -> Result<VerificationReport> {
    let kap = kappa(k, b, eps)?;
    let mut worst: f64 = 0.0;
    let mut closed_err: f64 = 0.0;
    for &f in radius_factors {
        if !(f > 1.0) {
            return Err(invalid("radius factors must exceed 1 (|λ| > 4bε)"));
        }
        let lam = 4.0 * b * eps * f;
        let mut partial = 0.0;
        for r in 0..terms {
            partial += power_bound_rhs(k, r, b, eps) / lam.powi(r as i32 + 1);
            worst = worst.max(partial);
        }
        let closed = resolvent_series_bound(k, b, eps, lam);
        closed_err = closed_err.max((partial - closed).abs() / closed);
    }
    Ok(VerificationReport::at_most("kappa_series", params([("k", k as f64), ("b", b), ("eps", eps), ("terms", terms as f64)]), worst, kap)
        .with_detail("closed_form_rel_err", closed_err))
}

/// Default λ samples: 8 equally spaced points on `|λ| = 5 p ε`.
pub fn default_lambda_samples(p_t: f64, eps: f64) -> Vec<Complex64> {
    (0..8).map(|j| Complex64::from_polar(5.0 * p_t * eps, 2.0 * PI * j as f64 / 8.0)).collect()
}

/// `‖(λ − Δ̄_U T_n)^{-1}‖ ≤ K` and `‖(λ − T_n)^{-1}‖ ≤ 2K` for
/// `|λ| > 4 p(T) ε` and `n ≥ max(k, m)`. Measured is the largest of the
/// ratios to the respective bound.
pub fn verify_resolvent(
    p: &CaiParams,
    a: &Element,
    eps: f64,
    lambda_samples: Option<&[Complex64]>,
    range: RangeInclusive<usize>,
) -> Result<VerificationReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps must lie in (0, 1)"));
    }
    let [lo, hi] = range_params(&range);
    let base = params([("eps", eps), lo, hi]);
    let Some(sel) = select_k(p, a, eps, range.clone())? else {
        return Ok(VerificationReport::inconclusive("resolvent_bounds", base, "no k within the truncation achieves p(u_k T - T) < eps p(T)"));
    };
    let Some(m5) = select_m_power(p, eps) else {
        return Ok(VerificationReport::inconclusive("resolvent_bounds", base, "no level m with c_m large enough"));
    };
    let kap = kappa(sel.k, sel.p_t, eps)?;
    let required_c = 1.0 + 2.0 * sel.p_t * kap;
    let m6 = (1..=p.n_max()).find(|&n| p.c(n) > required_c);
    let samples: Vec<Complex64> = match lambda_samples {
        Some(s) => s.to_vec(),
        None => default_lambda_samples(sel.p_t, eps),
    };
    if let Some(bad) = samples.iter().find(|l| l.norm() <= 4.0 * sel.p_t * eps) {
        return Err(invalid(format!("sample {bad} is not outside |λ| = 4 p(T) eps")));
    }
    let start = sel.k.max(m5).max(*range.start());
    if start > *range.end() {
        return Ok(VerificationReport::inconclusive("resolvent_bounds", base, format!("max(k, m) = {start} beyond the truncation")));
    }
    let mut worst: f64 = 0.0;
    let mut worst_upper: f64 = 0.0;
    let mut worst_full: f64 = 0.0;
    for n in start..=*range.end() {
        let x = eval_level(a, n, p)?;
        let upper = linalg::upper_part(&x)?;
        for &lam in &samples {
            let ru = match linalg::resolvent_norm(&upper, lam) {
                Ok(v) => v,
                Err(LinalgError::Singular { .. }) => f64::INFINITY,
                Err(e) => return Err(e.into()),
            };
            let rf = match linalg::resolvent_norm(&x, lam) {
                Ok(v) => v,
                Err(LinalgError::Singular { .. }) => f64::INFINITY,
                Err(e) => return Err(e.into()),
            };
            worst_upper = worst_upper.max(ru);
            worst_full = worst_full.max(rf);
            worst = worst.max(ru / kap).max(rf / (2.0 * kap));
        }
    }
    let mut rep = VerificationReport::at_most("resolvent_bounds", base, worst, 1.0)
        .with_detail("k", sel.k as f64)
        .with_detail("m", m5 as f64)
        .with_detail("kappa", kap)
        .with_detail("max_upper_resolvent", worst_upper)
        .with_detail("max_full_resolvent", worst_full)
        .with_detail("lambda_count", samples.len() as f64)
        .with_detail("neumann_required_c", required_c)
        .with_note("measured is max of ‖(λ-upper)^-1‖/K and ‖(λ-T_n)^-1‖/(2K)");
    match m6 {
        Some(m6) => rep = rep.with_detail("m_neumann", m6 as f64),
        None => {
            rep = rep.with_note("levels with c_n - 1 > 2 p K lie beyond the truncation; 2K bound checked directly on the available levels")
        }
    }
    Ok(rep)
}

/// Spot check of the perturbation step: `‖H‖ < 1/(2‖R^{-1}‖)` implies
/// `‖(R + H)^{-1}‖ ≤ 2‖R^{-1}‖`. Measured is the largest ratio
/// `‖(R+H)^{-1}‖ / (2‖R^{-1}‖)`.
pub fn verify_neumann_perturbation(seed: u64, trials: usize, dim: usize) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let r = random_matrix(&mut rng, dim)?;
        let r_inv = match r_inverse_norm(&r) {
            Some(v) => v,
            None => continue,
        };
        let h = random_matrix(&mut rng, dim)?;
        let h_norm = linalg::op_norm(&h)?;
        let target = rng.random_range(0.0..1.0) / (2.0 * r_inv);
        let h = h.scale_real(target / h_norm)?;
        let sum = r.try_add(&h)?;
        let s_inv = r_inverse_norm(&sum).unwrap_or(f64::INFINITY);
        worst = worst.max(s_inv / (2.0 * r_inv));
    }
    Ok(VerificationReport::at_most(
        "neumann_step",
        params([("seed", seed as f64), ("trials", trials as f64), ("dim", dim as f64)]),
        worst,
        1.0,
    ))
}

fn r_inverse_norm(r: &ComplexMatrix) -> Option<f64> {
    linalg::resolvent_norm(&-r, Complex64::new(0.0, 0.0)).ok()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Result<ComplexMatrix> {
    Ok(ComplexMatrix::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))?)
}

/// Spectrum counts stabilize along the truncation, and the inverse tuple
/// obeys `‖d_n (λ − T_n)^{-1} d_n^{-1}‖ ≤ |λ|^{-1}(1 − ε/|λ|)^{-1}` once
/// `‖d_n T_n d_n^{-1}‖ < ε`.
pub fn verify_null_spectrum(
    p: &CaiParams,
    a: &Element,
    deltas: &[f64],
    range: RangeInclusive<usize>,
    eps: f64,
) -> Result<VerificationReport> {
    if !a.in_tested_family() {
        return Err(invalid("null-spectrum check needs an element built from finitely supported and cai leaves"));
    }
    if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(invalid("deltas must be positive"));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    p.check_range(&range)?;
    let (lo, hi) = (*range.start(), *range.end());
    let half_start = hi - (hi - lo) / 2;
    let dmin = deltas.iter().copied().fold(f64::INFINITY, f64::min);

    // cumulative spectrum, level by level
    let mut counts: Vec<Vec<usize>> = vec![Vec::new(); deltas.len()];
    let mut spec = cai::element_spectrum(a, lo..=lo, dmin, p)?;
    let mut levels = Vec::new();
    for n in range.clone() {
        if n > lo {
            let step = cai::element_spectrum(a, n..=n, dmin, p)?;
            for pt in step.points.into_iter().skip(1) {
                cai::merge_point(&mut spec.points, pt.value, n);
            }
        }
        for (i, d) in deltas.iter().enumerate() {
            counts[i].push(spec.count_above(*d));
        }
        levels.push(n);
    }
    let mut variation = 0usize;
    for c in &counts {
        let tail: Vec<usize> = levels.iter().zip(c).filter(|(n, _)| **n >= half_start).map(|(_, v)| *v).collect();
        let (mn, mx) = (tail.iter().min().copied().unwrap_or(0), tail.iter().max().copied().unwrap_or(0));
        variation = variation.max(mx - mn);
    }

    // uniform resolvent bound on the scaled side
    let p_t = p_norm(a, range.clone(), p)?.sup;
    let scaled: Vec<(usize, ComplexMatrix)> =
        range.clone().map(|n| Ok((n, similarity_scale(&eval_level(a, n, p)?, p.c(n))?))).collect::<Result<_>>()?;
    let norms: Vec<f64> = scaled.iter().map(|(_, m)| linalg::op_norm(m)).collect::<std::result::Result<_, _>>()?;
    let q = (0..norms.len()).rev().take_while(|&i| norms[i] < eps).last().map(|i| scaled[i].0);
    let radius = 1.25 * (4.0 * p_t * eps).max(eps).max(p_t);
    let mut resolvent_ratio: f64 = 0.0;
    if let Some(q) = q {
        for (_, m) in scaled.iter().filter(|(n, _)| *n >= q) {
            for j in 0..8 {
                let lam = Complex64::from_polar(radius, 2.0 * PI * j as f64 / 8.0 + 0.1);
                let bound = 1.0 / (lam.norm() * (1.0 - eps / lam.norm()));
                let val = linalg::resolvent_norm(m, lam)?;
                resolvent_ratio = resolvent_ratio.max(val / bound);
            }
        }
    }
    let final_counts: Vec<String> = deltas.iter().zip(&counts).map(|(d, c)| format!("delta={d}: {}", c.last().unwrap_or(&0))).collect();
    let mut rep = VerificationReport::at_most(
        "null_spectrum",
        params([("level_lo", lo as f64), ("level_hi", hi as f64), ("eps", eps), ("delta_min", dmin)]),
        variation as f64,
        0.0,
    )
    .with_detail("points_above_delta_min", spec.count_above(dmin) as f64)
    .with_detail("scaled_tail_level_q", q.map_or(f64::NAN, |q| q as f64))
    .with_detail("resolvent_ratio", resolvent_ratio)
    .with_detail("lambda_radius", radius)
    .with_note(format!("measured is the variation of spectrum counts over levels >= {half_start}; {}", final_counts.join(", ")));
    if variation != 0 {
        rep = rep.fail_with("spectrum counts do not stabilize");
    }
    if q.is_none() {
        rep = rep.fail_with(format!("‖d_n T_n d_n^-1‖ never drops below eps = {eps} on the tail"));
    } else if resolvent_ratio > 1.0 + crate::report::PASS_SLACK {
        rep = rep.fail_with("scaled resolvent exceeds |λ|^-1 (1 - eps/|λ|)^-1");
    }
    Ok(rep)
}

/// `S = a` with levels below `m0` removed; if every level block has
/// spectral radius below `1 − 1e-6`, `max_n ‖S_n^k‖` must drop below `1e-6`
/// within `iter_cap` powers.
pub fn verify_power_decay(
    p: &CaiParams,
    a: &Element,
    m0: usize,
    range: RangeInclusive<usize>,
    iter_cap: usize,
) -> Result<VerificationReport> {
    p.check_range(&range)?;
    let [lo, hi] = range_params(&range);
    let base = params([("m0", m0 as f64), lo, hi, ("iter_cap", iter_cap as f64)]);
    let mut blocks = Vec::new();
    let mut max_radius: f64 = 0.0;
    for n in range.clone().filter(|&n| n >= m0) {
        let x = eval_level(a, n, p)?;
        let rho = linalg::spectral_radius(&x)?;
        max_radius = max_radius.max(rho);
        if !x.is_zero() {
            blocks.push(x);
        }
    }
    if max_radius >= 1.0 - 1e-6 {
        return Ok(VerificationReport::inconclusive("power_decay", base, format!("level spectral radius {max_radius} is not below 1 - 1e-6"))
            .with_detail("max_spectral_radius", max_radius));
    }
    let mut powers = blocks.clone();
    let mut reached = None;
    let mut sup = 0.0;
    for k in 1..=iter_cap {
        if k > 1 {
            for (pw, b) in powers.iter_mut().zip(&blocks) {
                if !pw.is_zero() {
                    *pw = pw.try_mul(b)?;
                }
            }
        }
        sup = 0.0f64;
        for pw in &powers {
            if pw.is_zero() || pw.frobenius_norm() < DECAY_TARGET * 1e-3 {
                continue;
            }
            sup = sup.max(linalg::op_norm(pw)?);
        }
        if sup < DECAY_TARGET {
            reached = Some(k);
            break;
        }
    }
    let rep = match reached {
        Some(k) => VerificationReport::at_most("power_decay", base, k as f64, iter_cap as f64).with_note("measured is the first k with sup_n ‖S_n^k‖ < 1e-6"),
        None => VerificationReport::at_most("power_decay", base, f64::INFINITY, iter_cap as f64)
            .fail_with(format!("sup_n ‖S_n^k‖ = {sup:e} after {iter_cap} powers")),
    };
    Ok(rep.with_detail("max_spectral_radius", max_radius))
}

/// Residual of the semisimplicity witness at level `m`.
pub fn verify_semisimple(p: &CaiParams, x: &Element, m: usize) -> Result<VerificationReport> {
    let w = cai::semisimple_witness(x, m, p)?;
    Ok(VerificationReport::at_most("semisimple_witness", params([("m", m as f64), ("basis_index", w.basis_index as f64)]), w.residual, WITNESS_TOL))
}

/// Random selfadjoint trials: diagonal ones must be accepted, the check must
/// never raise an invariant violation. Measured counts violations.
pub fn verify_diagonal_forcing(seed: u64, trials: usize, max_dim: usize, c: f64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut mismatches = 0usize;
    for t in 0..trials {
        let n = rng.random_range(1..=max_dim);
        let diagonal_only = t % 2 == 0;
        let x = ComplexMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(rng.random_range(-2.0..2.0), 0.0)
            } else if diagonal_only {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            }
        })?;
        // symmetrize
        let x = x.try_add(&x.adjoint())?.scale_real(0.5)?;
        match cai::diagonal_forcing_check(&x, c, 1e-10) {
            Ok(accepted) => {
                let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || x.get(i, j).norm() == 0.0));
                if accepted != is_diag {
                    mismatches += 1;
                }
            }
            Err(CaiError::InvariantViolation(_)) => violations += 1,
            Err(e) => return Err(e),
        }
    }
    let mut rep = VerificationReport::at_most(
        "diagonal_forcing",
        params([("seed", seed as f64), ("trials", trials as f64), ("max_dim", max_dim as f64), ("c", c)]),
        violations as f64,
        0.0,
    )
    .with_detail("acceptance_mismatches", mismatches as f64);
    if mismatches > 0 {
        rep = rep.fail_with("acceptance disagrees with diagonality");
    }
    Ok(rep)
}

/// Diagonal matrix units are minimal idempotents; `I_n` (n ≥ 2) is not.
/// Measured counts misclassifications.
pub fn verify_minimal_idempotents(n: usize) -> Result<VerificationReport> {
    let mut wrong = 0usize;
    for i in 0..n {
        if !cai::minimal_idempotent_check(&ComplexMatrix::unit(n, i, i)?, 1e-10)? {
            wrong += 1;
        }
        // rank-one idempotent e_i (e_i + e_j)^*
        let j = (i + 1) % n;
        let e = ComplexMatrix::from_real_fn(n, |r, s| if r == i && (s == i || s == j) { 1.0 } else { 0.0 })?;
        let expect = i != j;
        if n > 1 && cai::minimal_idempotent_check(&e, 1e-10)? != expect {
            wrong += 1;
        }
    }
    if n >= 2 && cai::minimal_idempotent_check(&ComplexMatrix::identity(n)?, 1e-10)? {
        wrong += 1;
    }
    Ok(VerificationReport::at_most("minimal_idempotents", params([("n", n as f64)]), wrong as f64, 0.0))
}

/// [`verify_averaging`] on random instances: `n ≤ 50`, `E1 ⊆ [0, n]` with
/// at most 10 members, `E2` a random run of consecutive integers, shift
/// dimension at most `max_dim`.
pub fn verify_averaging_random(seed: u64, instances: usize, max_dim: usize) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(instances);
    for _ in 0..instances {
        let n = rng.random_range(1..=50usize);
        let dim = rng.random_range(1..=max_dim);
        let size = rng.random_range(1..=(n + 1).min(10));
        let mut e1: BTreeSet<usize> = BTreeSet::new();
        while e1.len() < size {
            e1.insert(rng.random_range(0..=n));
        }
        let start = rng.random_range(0..dim);
        let len = rng.random_range(1..=dim);
        let e2: Vec<usize> = (start..start + len).collect();
        out.push(verify_averaging(&e1.into_iter().collect::<Vec<_>>(), &e2, n, dim)?);
    }
    let r = worst_report(out).ok_or_else(|| invalid("no instances"))?;
    Ok(r.with_note(format!("worst of {instances} random instances")))
}

/// Random matrix scaled to `p_n = 1`.
pub fn random_p_contraction(rng: &mut ChaCha8Rng, n: usize, c: f64) -> Result<ComplexMatrix> {
    loop {
        let x = random_matrix(rng, n)?;
        let pn = p_level_norm(&x, c)?;
        if pn > 0.0 {
            return Ok(x.scale_real(1.0 / pn)?);
        }
    }
}

/// [`verify_triangular_bounds`] on `trials` random p-contractions at level `n`.
pub fn verify_triangular_random(p: &CaiParams, seed: u64, trials: usize, n: usize) -> Result<VerificationReport> {
    p.check_level(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let x = random_p_contraction(&mut rng, n, p.c(n))?;
        out.push(verify_triangular_bounds(p, &Element::single(n, x)?, n)?);
    }
    worst_report(out).ok_or_else(|| invalid("no trials"))
}

/// [`verify_semisimple`] on random nonzero finitely supported elements with
/// support at one level in `1..=max_level`.
pub fn verify_semisimple_random(p: &CaiParams, seed: u64, trials: usize, max_level: usize) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let m = rng.random_range(1..=max_level.min(p.n_max()));
        let mut x = random_matrix(&mut rng, m)?;
        // sparse entries exercise witnesses on non-generic columns
        if rng.random_bool(0.5) {
            x = ComplexMatrix::from_fn(m, |i, j| if rng.random_bool(0.3) { x.get(i, j) } else { Complex64::new(0.0, 0.0) })?;
        }
        if x.is_zero() {
            x = ComplexMatrix::unit(m, m - 1, 0)?;
        }
        out.push(verify_semisimple(p, &Element::single(m, x)?, m)?);
    }
    worst_report(out).ok_or_else(|| invalid("no trials"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dflt() -> CaiParams {
        CaiParams::default()
    }

    #[test]
    fn averaging_examples() {
        let r = verify_averaging(&[0], &[0], 3, 10).unwrap();
        assert_eq!(r.measured, 0.0);
        assert_eq!(r.bound, 6.0);

        let r = verify_averaging(&[2, 3], &(0..8).collect::<Vec<_>>(), 3, 12).unwrap();
        assert_eq!(r.bound, 0.75);
        assert!(r.pass, "{r:?}");

        // mu2 <= n branch
        let r = verify_averaging(&[0, 1, 5], &[4, 5], 5, 20).unwrap();
        assert!(r.pass && r.notes.contains("mu2 <= n"));

        assert!(verify_averaging(&[4], &[0], 3, 5).is_err());
        assert!(verify_averaging(&[0], &[0, 2], 3, 5).is_err());
        assert!(verify_averaging(&[], &[0], 3, 5).is_err());
    }

    #[test]
    fn cai_mutual_examples() {
        let p = dflt();
        let r = verify_cai_mutual(&p, 8, 1, 2, 1..=60).unwrap();
        assert_eq!(r.measured, 0.0);
        let r = verify_cai_mutual(&p, 8, 2, 2, 1..=60).unwrap();
        assert!(r.pass && r.bound == 1.0, "{r:?}");
        let r = verify_cai_mutual(&p, 20, 2, 5, 1..=100).unwrap();
        assert!(r.pass && (r.bound - 0.4).abs() < 1e-15, "{r:?}");
        assert!(verify_cai_mutual(&p, 7, 2, 2, 1..=10).is_err());
        assert!(verify_cai_mutual(&p, 8, 2, 1, 1..=10).is_err());
    }

    #[test]
    fn norm_lower_examples() {
        let r = verify_norm_lower(12, 4).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.details["eta_cert_u"] - 0.625).abs() < 1e-14);
        assert!(r.details["eta_identity_err"] <= ETA_IDENTITY_TOL);

        // <L_4^2 η, η> = 1/2
        let l2 = shift_matrix(4).unwrap().pow(2).unwrap();
        assert!((eta_form(&l2).unwrap().re - 0.5).abs() < 1e-15);

        let r = verify_norm_lower(5, 5).unwrap();
        assert!(r.pass);
        assert!(verify_norm_lower(3, 4).is_err());
    }

    #[test]
    fn weakcompact_examples() {
        let p = dflt();
        let r = verify_weakcompact_witness(&p, 12, 1..=11, 1, 20).unwrap();
        assert_eq!(r.measured, 1.0);
        let r = verify_weakcompact_witness(&p, 12, 12..=40, 1, 50).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.details["embedding_min_ratio"] >= 0.5);
        assert!(verify_weakcompact_witness(&p, 11, 1..=20, 1, 5).is_err());
    }

    #[test]
    fn similarity_examples() {
        let p = dflt();
        let r = verify_cai_similarity(&p, 12, 1..=60).unwrap();
        assert!(r.pass, "{r:?}");

        let fin = Element::single(3, ComplexMatrix::from_real_fn(3, |i, j| (i + 2 * j) as f64).unwrap()).unwrap();
        let r = verify_similarity_decay(&p, &fin, 1..=40).unwrap();
        assert!(r.pass);
        assert_eq!(r.details["max_tail_scaled_norm"], 0.0);

        let r = verify_similarity_decay(&p, &Element::CaiUnit(12), 1..=60).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_similarity_decay(&p, &fin.clone().add(Element::CaiUnit(12)), 1..=60).unwrap();
        assert!(r.pass, "{r:?}");

        assert!(verify_similarity_decay(&p, &Element::CaiUnit(3).adjoint(), 1..=20).is_err());
    }

    #[test]
    fn triangular_examples() {
        let p = dflt();
        let r = verify_triangular_bounds(&p, &Element::CaiUnit(3), 10).unwrap();
        assert_eq!(r.details["lower_norm"], 0.0);
        assert!(r.pass);

        let e21 = Element::single(2, ComplexMatrix::unit(2, 1, 0).unwrap()).unwrap();
        let r = verify_triangular_bounds(&p, &e21, 2).unwrap();
        assert!((r.details["p_n"] - 3.0).abs() < 1e-12);
        assert!((r.details["lse_bound"] - 1.5).abs() < 1e-12);
        assert!((r.details["lower_norm"] - 1.0).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn kappa_examples() {
        assert!((kappa(1, 1.0, 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!((kappa(2, 1.0, 0.25).unwrap() - 32.0 / 3.0).abs() < 1e-12);
        let a = kappa(3, 0.7, 0.4).unwrap();
        let b = kappa(3, 0.35, 0.4).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
        assert!(kappa(0, 1.0, 0.5).is_err());
        assert!(kappa(1, 1.0, 1.0).is_err());
        assert!(kappa(1, 0.0, 0.5).is_err());
    }

    #[test]
    fn kappa_dominates_series() {
        for k in 1..6 {
            for eps in [0.1, 0.3, 0.6, 0.9] {
                let r = verify_kappa(k, 1.3, eps, &[1.0001, 1.2, 2.0, 5.0], 4000).unwrap();
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn power_bound_r0_and_rhs() {
        // r = 0: only the s = 0 term, equal to 1
        assert_eq!(power_bound_rhs(3, 0, 0.8, 0.2), 1.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(2, 5), 0.0);
    }

    #[test]
    fn neumann_step_holds() {
        let r = verify_neumann_perturbation(7, 40, 6).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn null_spectrum_examples() {
        let p = dflt();
        let a = Element::single(3, ComplexMatrix::diag_real(&[1.0, 2.0, 3.0]).unwrap()).unwrap();
        let r = verify_null_spectrum(&p, &a, &[0.5], 1..=40, 0.25).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.details["points_above_delta_min"], 3.0);

        let r = verify_null_spectrum(&p, &Element::CaiUnit(5), &[0.5], 1..=40, 0.25).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.details["points_above_delta_min"], 1.0);
    }

    #[test]
    fn power_decay_examples() {
        let p = dflt();
        let r = verify_power_decay(&p, &Element::CaiUnit(2).scale(0.5), 2, 1..=60, 200).unwrap();
        assert!(r.pass, "{r:?}");

        let r = verify_power_decay(&p, &Element::CaiUnit(200), 1, 1..=10, 50).unwrap();
        assert!(r.is_inconclusive());

        // strictly upper triangular levels vanish at the level dimension
        let s = Element::single(6, shift_matrix(6).unwrap()).unwrap();
        let r = verify_power_decay(&p, &s, 1, 1..=10, 50).unwrap();
        assert_eq!(r.measured, 6.0);
    }

    #[test]
    fn nilpotency_is_exact() {
        let p = dflt();
        for (n, k) in [(10, 2), (37, 5), (64, 8), (100, 3)] {
            let r = verify_nilpotency(&p, &Element::CaiUnit(2), k, n).unwrap();
            assert!(r.pass && r.measured == 0.0, "{r:?}");
        }
    }

    #[test]
    fn random_families() {
        let p = dflt();
        assert!(verify_averaging_random(1, 30, 60).unwrap().pass);
        let r = verify_triangular_random(&p, 2, 10, 10).unwrap();
        assert!(r.pass && r.params["trials"] == 10.0, "{r:?}");
        assert!(verify_semisimple_random(&p, 3, 20, 6).unwrap().pass);
    }

    #[test]
    fn structural_suites() {
        assert!(verify_diagonal_forcing(3, 100, 6, 2.0).unwrap().pass);
        assert!(verify_minimal_idempotents(5).unwrap().pass);
        let p = dflt();
        let x = Element::single(4, ComplexMatrix::unit(4, 2, 1).unwrap()).unwrap();
        assert!(verify_semisimple(&p, &x, 4).unwrap().pass);
    }
}
