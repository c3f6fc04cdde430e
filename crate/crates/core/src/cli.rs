//! Run configuration and suite execution shared by the `caialg` binary and
//! the FFI layer.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cai::{self, CRule, CaiError, CaiParams, Element, DEFAULT_N_MAX};
use crate::hbeta::{self, HbetaError, HbetaSuite, WeightSeq};
use crate::lemmas;
use crate::linalg::ComplexMatrix;
use crate::report::{self, params, EmitError, Format, VerificationReport};

/// Seeds are recorded as `f64` in report params and must round-trip.
pub const MAX_SEED: u64 = 1 << 53;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteId {
    CaiContractivity,
    Averaging,
    CaiMutual,
    NormLower,
    WeakCompact,
    Similarity,
    Triangular,
    PowerBound,
    Resolvent,
    NullSpectrum,
    PowerDecay,
    Semisimple,
    DiagonalForcing,
    MinimalIdempotents,
    Hbeta,
}

impl SuiteId {
    pub const ALL: [SuiteId; 15] = [
        SuiteId::CaiContractivity,
        SuiteId::Averaging,
        SuiteId::CaiMutual,
        SuiteId::NormLower,
        SuiteId::WeakCompact,
        SuiteId::Similarity,
        SuiteId::Triangular,
        SuiteId::PowerBound,
        SuiteId::Resolvent,
        SuiteId::NullSpectrum,
        SuiteId::PowerDecay,
        SuiteId::Semisimple,
        SuiteId::DiagonalForcing,
        SuiteId::MinimalIdempotents,
        SuiteId::Hbeta,
    ];

    pub fn name(self) -> String {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::String(s)) => s,
            _ => unreachable!("unit variant"),
        }
    }
}

impl std::str::FromStr for SuiteId {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| ConfigError::Invalid(format!("unknown suite {s:?}; known: {}", SuiteId::ALL.map(SuiteId::name).join(", "))))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HbetaConfig {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl Default for HbetaConfig {
    fn default() -> Self {
        Self { c: hbeta::DEFAULT_C, n: hbeta::DEFAULT_DEGREE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub c_rule: CRule,
    pub n_max: usize,
    /// Suites to run, in order.
    pub lemmas: Vec<SuiteId>,
    pub hbeta: HbetaConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    /// Element used by `spectrum` and `sweep`.
    pub element: Option<Element>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            c_rule: CRule::default(),
            n_max: DEFAULT_N_MAX,
            lemmas: SuiteId::ALL.to_vec(),
            hbeta: HbetaConfig::default(),
            out: None,
            format: Format::Json,
            seed: 0,
            element: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("invalid algebra parameters: {0}")]
    Cai(#[from] CaiError),
    #[error("invalid hbeta parameters: {0}")]
    Hbeta(#[from] HbetaError),
}

/// Validated form of a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Instance {
    pub params: CaiParams,
    pub weight: WeightSeq,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<Instance, ConfigError> {
        if self.seed >= MAX_SEED {
            return Err(ConfigError::Invalid(format!("seed {} must be below 2^53", self.seed)));
        }
        if self.lemmas.is_empty() {
            return Err(ConfigError::Invalid("empty suite selection".into()));
        }
        let params = CaiParams::new(self.c_rule.clone(), self.n_max)?;
        let weight = WeightSeq::new(self.hbeta.c, self.hbeta.n)?;
        if let Some(e) = &self.element {
            cai::p_norm(e, 1..=1, &params)?;
        }
        Ok(Instance { params, weight, seed: self.seed })
    }
}

/// `FinSupp{3 ↦ diag(1,2,3)} + u_4`, the default element for spectrum dumps.
pub fn default_element() -> Element {
    let d = ComplexMatrix::diag_real(&[1.0, 2.0, 3.0]).expect("3x3 diagonal");
    Element::single(3, d).expect("level 3 matches dimension 3").add(Element::CaiUnit(4))
}

fn failure(id: &str, err: impl std::fmt::Display) -> VerificationReport {
    VerificationReport::at_most(id, params([]), f64::NAN, f64::NAN).fail_with(format!("error: {err}"))
}

#[derive(Debug, thiserror::Error)]
enum SuiteError {
    #[error(transparent)]
    Cai(#[from] CaiError),
    #[error(transparent)]
    Hbeta(#[from] HbetaError),
}

fn run_one(id: SuiteId, inst: &Instance) -> Result<Vec<VerificationReport>, SuiteError> {
    let p = &inst.params;
    let n_max = p.n_max();
    let full = p.full_range();
    let seed = inst.seed;
    let mut out = Vec::new();
    match id {
        SuiteId::CaiContractivity => {
            for k in 1..=20.min(n_max) {
                out.push(lemmas::verify_cai_contractivity(p, k, full.clone())?);
            }
        }
        SuiteId::Averaging => out.push(lemmas::verify_averaging_random(seed, 200, 200)?),
        SuiteId::CaiMutual => {
            for r in 1..=4 {
                for t in [2, 3, 5] {
                    out.push(lemmas::verify_cai_mutual(p, 2 * t * r, r, t, full.clone())?);
                }
            }
        }
        SuiteId::NormLower => out.push(lemmas::verify_norm_lower_grid(n_max)?),
        SuiteId::WeakCompact => out.push(lemmas::verify_weakcompact_witness(p, 12, full.clone(), seed, 200)?),
        SuiteId::Similarity => {
            out.push(lemmas::verify_cai_similarity(p, 12, full.clone())?);
            out.push(lemmas::verify_similarity_decay(p, &Element::CaiUnit(12), full.clone())?);
            out.push(lemmas::verify_similarity_decay(p, &default_element(), full.clone())?);
        }
        SuiteId::Triangular => {
            for n in [10, 20, 40].into_iter().filter(|&n| n <= n_max) {
                out.push(lemmas::verify_triangular_random(p, seed, 100, n)?);
            }
        }
        SuiteId::PowerBound => {
            let a = Element::CaiUnit(2);
            out.push(lemmas::verify_power_bound(p, &a, 0.3, &(0..=8).collect::<Vec<_>>(), full.clone())?);
            if let Some(sel) = lemmas::select_k(p, &a, 0.3, full.clone())? {
                if sel.k <= n_max {
                    out.push(lemmas::verify_nilpotency(p, &a, sel.k, n_max)?);
                }
            }
        }
        SuiteId::Resolvent => {
            let a = Element::CaiUnit(2);
            out.push(lemmas::verify_kappa(2, 1.0, 0.3, &[1.0001, 1.25, 2.0, 5.0, 20.0], 2000)?);
            out.push(lemmas::verify_resolvent(p, &a, 0.3, None, full.clone())?);
            out.push(lemmas::verify_neumann_perturbation(seed, 100, 8)?);
        }
        SuiteId::NullSpectrum => out.push(lemmas::verify_null_spectrum(p, &default_element(), &[0.5], full.clone(), 0.25)?),
        SuiteId::PowerDecay => {
            out.push(lemmas::verify_power_decay(p, &Element::CaiUnit(2).scale(0.5), 2, full.clone(), 200)?);
        }
        SuiteId::Semisimple => out.push(lemmas::verify_semisimple_random(p, seed, 50, 8)?),
        SuiteId::DiagonalForcing => out.push(lemmas::verify_diagonal_forcing(seed, 1000, 6, p.c(1))?),
        SuiteId::MinimalIdempotents => out.push(lemmas::verify_minimal_idempotents(5)?),
        SuiteId::Hbeta => out.extend(hbeta::run_hbeta_suite(&HbetaSuite { weight: inst.weight, seed, ..HbetaSuite::default() })?),
    }
    Ok(out)
}

/// Outcome of a suite run.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub reports: Vec<VerificationReport>,
    pub exit_code: i32,
    pub inconclusive: usize,
}

fn finish(mut reports: Vec<VerificationReport>, seed: u64) -> SuiteOutcome {
    for r in &mut reports {
        r.params.insert("seed".into(), seed as f64);
    }
    let exit_code = if reports.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL };
    let inconclusive = reports.iter().filter(|r| r.is_inconclusive()).count();
    SuiteOutcome { reports, exit_code, inconclusive }
}

/// Runs the selected suites in order. Errors inside a suite become failing
/// reports; only configuration problems are returned as errors.
pub fn run_suite(config: &RunConfig) -> Result<SuiteOutcome, ConfigError> {
    let inst = config.validate()?;
    let mut reports = Vec::new();
    for &id in &config.lemmas {
        match run_one(id, &inst) {
            Ok(rs) => reports.extend(rs),
            Err(e) => reports.push(failure(&id.name(), e)),
        }
    }
    Ok(finish(reports, inst.seed))
}

/// Grid over truncations, cai indices, `ε` and `λ` radii. Radii are
/// multiples of `4 p(a) ε` and must exceed 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub n_max: Vec<usize>,
    pub k: Vec<usize>,
    pub eps: Vec<f64>,
    pub radii: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self { n_max: vec![25, 50], k: vec![2, 4, 12], eps: vec![0.3, 0.5], radii: vec![1.25, 2.0] }
    }
}

pub fn run_sweep(config: &RunConfig, grid: &SweepGrid) -> Result<SuiteOutcome, ConfigError> {
    let inst = config.validate()?;
    if grid.n_max.is_empty() || grid.k.is_empty() || grid.eps.is_empty() || grid.radii.is_empty() {
        return Err(ConfigError::Invalid("sweep grid axes must be nonempty".into()));
    }
    if let Some(r) = grid.radii.iter().find(|r| !(**r > 1.0)) {
        return Err(ConfigError::Invalid(format!("radius multiple {r} must exceed 1")));
    }
    if let Some(e) = grid.eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(ConfigError::Invalid(format!("eps {e} must lie in (0, 1)")));
    }
    let a = config.element.clone().unwrap_or(Element::CaiUnit(2));
    let mut reports = Vec::new();
    for &n_max in &grid.n_max {
        let p = CaiParams::new(config.c_rule.clone(), n_max)?;
        let full = p.full_range();
        let tag = |res: Result<VerificationReport, CaiError>, id: &str| {
            let mut r = res.unwrap_or_else(|e| failure(id, e));
            r.params.insert("n_max".into(), n_max as f64);
            r
        };
        for &k in &grid.k {
            reports.push(tag(lemmas::verify_cai_contractivity(&p, k, full.clone()), "cai_contractivity"));
            reports.push(tag(lemmas::verify_cai_similarity(&p, k, full.clone()), "cai_similarity"));
        }
        for &eps in &grid.eps {
            reports.push(tag(lemmas::verify_power_bound(&p, &a, eps, &(0..=8).collect::<Vec<_>>(), full.clone()), "power_bound"));
            let p_a = match cai::p_norm(&a, full.clone(), &p) {
                Ok(prof) => prof.sup,
                Err(e) => {
                    reports.push(tag(Err(e), "resolvent_bounds"));
                    continue;
                }
            };
            for &rad in &grid.radii {
                let samples: Vec<Complex64> = (0..8)
                    .map(|j| Complex64::from_polar(rad * 4.0 * p_a * eps, 2.0 * std::f64::consts::PI * j as f64 / 8.0))
                    .collect();
                let res = lemmas::verify_resolvent(&p, &a, eps, Some(&samples), full.clone()).map(|r| r.with_detail("radius_multiple", rad));
                reports.push(tag(res, "resolvent_bounds"));
            }
        }
    }
    Ok(finish(reports, inst.seed))
}

/// JSON dump of an element spectrum with 17 significant digits.
pub fn spectrum_json(s: &cai::ElementSpectrum) -> String {
    let pts: Vec<String> = s
        .points
        .iter()
        .map(|p| {
            format!(
                "    {{\"re\": {}, \"im\": {}, \"top_level\": {}}}",
                report::fmt_number(p.value.re),
                report::fmt_number(p.value.im),
                p.top_level.map_or("null".to_owned(), |l| l.to_string())
            )
        })
        .collect();
    format!(
        "{{\n  \"delta\": {},\n  \"level_lo\": {},\n  \"level_hi\": {},\n  \"points\": [\n{}\n  ]\n}}\n",
        report::fmt_number(s.delta),
        s.range.start(),
        s.range.end(),
        pts.join(",\n")
    )
}

pub fn run_spectrum(config: &RunConfig, delta: f64) -> Result<String, ConfigError> {
    let inst = config.validate()?;
    let a = config.element.clone().unwrap_or_else(default_element);
    let spec = cai::element_spectrum(&a, inst.params.full_range(), delta, &inst.params)?;
    Ok(spectrum_json(&spec))
}

/// Writes the reports to `config.out`, or returns the rendered text when no
/// path is configured.
pub fn write_reports(config: &RunConfig, reports: &[VerificationReport]) -> Result<Option<String>, EmitError> {
    match &config.out {
        Some(path) => report::emit_report(reports, config.format, path).map(|_| None),
        None => report::render(reports, config.format).map(Some),
    }
}

/// Count of reports per status, for the stderr summary.
pub fn summary(reports: &[VerificationReport]) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::from([("pass", 0), ("fail", 0), ("inconclusive", 0)]);
    for r in reports {
        let key = if r.is_inconclusive() {
            "inconclusive"
        } else if r.pass {
            "pass"
        } else {
            "fail"
        };
        *m.get_mut(key).expect("known key") += 1;
    }
    m
}
