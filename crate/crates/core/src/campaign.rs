//! Run configurations and campaign dispatch.
//!
//! A run is a TOML file with global settings and a list of `[[campaign]]`
//! tables; every campaign expands into claim checks whose reports are written
//! as JSON (one file per check), CSV for scans, and a `summary.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bregman::Exponent;
use crate::error::{LabError, Result};
use crate::forms::{self, PolarizedPath, QuadratureConfig};
use crate::report::{IdentityReport, ReportRecord, Verdict, VerificationReport, CSV_HEADER};
use crate::semigroup::checks;
use crate::semigroup::{ModelKind, ModelSpec, SemigroupModel, TestFunctionSpec};
use crate::verify::{self, ComparabilityPair, CounterexampleRow, SampleMode, SampleStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignKind {
    Pointwise,
    Inequalities,
    Convexity,
    Counterexample,
    SemigroupChecks,
    HardyStein,
    Polarized,
    GaussianHs,
    Constants,
    /// Form-level checks: Parseval, sandwich, small-time limit, pairings,
    /// polarized-form properties and the time-derivative identity.
    Forms,
}

impl CampaignKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pointwise => "pointwise",
            Self::Inequalities => "inequalities",
            Self::Convexity => "convexity",
            Self::Counterexample => "counterexample",
            Self::SemigroupChecks => "semigroup-checks",
            Self::HardyStein => "hardy-stein",
            Self::Polarized => "polarized",
            Self::GaussianHs => "gaussian-hs",
            Self::Constants => "constants",
            Self::Forms => "forms",
        }
    }
}

fn default_samples() -> u64 {
    100_000
}

fn default_mode() -> SampleMode {
    SampleMode::Mixture
}

/// One `[[campaign]]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub kind: CampaignKind,
    /// Output subdirectory; defaults to `<index>-<kind>`.
    #[serde(default)]
    pub id: Option<String>,
    /// Exponent list.
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub functions: Vec<TestFunctionSpec>,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_mode")]
    pub mode: SampleMode,
    /// Vector dimensions for randomized checks (`inequalities`, `constants`).
    #[serde(default)]
    pub dims: Vec<usize>,
    /// Exponents `λ` of the rest-power bounds (`inequalities`).
    #[serde(default)]
    pub lambda: Vec<f64>,
    /// Scan parameters (`counterexample`).
    #[serde(default)]
    pub k: Vec<u64>,
    /// Comparability pairs (`constants`).
    #[serde(default)]
    pub pairs: Vec<String>,
    /// Times for kernel checks and probes (`semigroup-checks`).
    #[serde(default)]
    pub times: Vec<f64>,
    /// Polarized route (`polarized`); chosen from `p` when absent.
    #[serde(default)]
    pub path: Option<PolarizedPath>,
    /// Fixed time (`gaussian-hs` second identity, `forms` time derivative).
    #[serde(default)]
    pub t: Option<f64>,
    /// Relative tolerance override.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Campaign-specific quadrature overrides.
    #[serde(default)]
    pub quadrature: Option<QuadratureConfig>,
}

/// A whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    /// Report directory (relative paths resolve against the working directory).
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub campaign: Vec<CampaignSpec>,
}

fn default_output() -> PathBuf {
    PathBuf::from("reports")
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| LabError::config("config", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks every field that downstream modules would reject.
    pub fn validate(&self) -> Result<()> {
        if self.campaign.is_empty() {
            return Err(LabError::config("campaign", "no campaigns listed"));
        }
        self.quadrature.validate()?;
        let mut ids = std::collections::BTreeSet::new();
        for (i, c) in self.campaign.iter().enumerate() {
            let id = campaign_id(i, c);
            if !ids.insert(id.clone()) {
                return Err(LabError::config(format!("campaign[{i}].id"), format!("duplicate id `{id}`")));
            }
            validate_campaign(c).map_err(|e| match e {
                LabError::Config { field, message } => LabError::config(format!("campaign[{i}].{field}"), message),
                other => LabError::config(format!("campaign[{i}]"), other.to_string()),
            })?;
        }
        Ok(())
    }
}

pub fn campaign_id(index: usize, c: &CampaignSpec) -> String {
    c.id.clone().unwrap_or_else(|| format!("{:02}-{}", index, c.kind.name()))
}

fn need<T>(v: &[T], field: &str) -> Result<()> {
    if v.is_empty() {
        Err(LabError::config(field, "must not be empty"))
    } else {
        Ok(())
    }
}

fn need_model(c: &CampaignSpec) -> Result<SemigroupModel> {
    let spec = c.model.as_ref().ok_or_else(|| LabError::config("model", "required for this campaign kind"))?;
    spec.build().map_err(|e| LabError::config("model", e.to_string()))
}

fn p_range(c: &CampaignSpec, ok: impl Fn(f64) -> bool, what: &str) -> Result<()> {
    need(&c.p, "p")?;
    for &p in &c.p {
        if !p.is_finite() || !ok(p) {
            return Err(LabError::config("p", format!("p = {p} not allowed: {what}")));
        }
    }
    Ok(())
}

fn validate_campaign(c: &CampaignSpec) -> Result<()> {
    if c.samples == 0 {
        return Err(LabError::config("samples", "must be at least 1"));
    }
    if let Some(t) = c.tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(LabError::config("tol", "must lie in (0, 1)"));
        }
    }
    if let Some(q) = &c.quadrature {
        q.validate().map_err(|e| LabError::config("quadrature", e.to_string()))?;
    }
    for (j, f) in c.functions.iter().enumerate() {
        f.validate().map_err(|e| LabError::config(format!("functions[{j}]"), e.to_string()))?;
    }
    for &d in &c.dims {
        if !(1..=3).contains(&d) {
            return Err(LabError::config("dims", "dimensions must be 1, 2 or 3"));
        }
    }
    let stable_line = |c: &CampaignSpec| -> Result<()> {
        let m = need_model(c)?;
        if m.kind != ModelKind::Stable || m.d != 1 {
            return Err(LabError::config("model", "identities are verified for stable models on R (d = 1)"));
        }
        for (j, f) in c.functions.iter().enumerate() {
            if f.dim() != 1 {
                return Err(LabError::config(format!("functions[{j}]"), "must live on R"));
            }
        }
        Ok(())
    };
    match c.kind {
        CampaignKind::Pointwise => p_range(c, |p| p > 1.0, "need p > 1"),
        CampaignKind::Inequalities => {
            p_range(c, |p| p > 1.0, "need p > 1")?;
            for &l in &c.lambda {
                if !(0.0..=2.0).contains(&l) {
                    return Err(LabError::config("lambda", "must lie in [0, 2]"));
                }
            }
            Ok(())
        }
        CampaignKind::Convexity => p_range(c, |p| p > 2.0, "the convexity claims need p > 2"),
        CampaignKind::Counterexample => {
            p_range(c, |p| p > 1.0 && p < 3.0 && p != 2.0, "the scan needs p in (1,3) minus {2}")?;
            need(&c.k, "k")?;
            if c.k.contains(&0) {
                return Err(LabError::config("k", "values must be positive"));
            }
            Ok(())
        }
        CampaignKind::Constants => {
            p_range(c, |p| p > 1.0, "need p > 1")?;
            for name in &c.pairs {
                ComparabilityPair::parse(name).map_err(|e| LabError::config("pairs", e.to_string()))?;
            }
            Ok(())
        }
        CampaignKind::SemigroupChecks => {
            need_model(c)?;
            for &t in &c.times {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(LabError::config("times", "must be positive"));
                }
            }
            if !c.p.is_empty() {
                p_range(c, |p| p > 1.0, "need p > 1")?;
            }
            Ok(())
        }
        CampaignKind::HardyStein => {
            stable_line(c)?;
            p_range(c, |p| p > 1.0, "need p > 1")?;
            if c.functions.is_empty() || c.functions.len() > 3 {
                return Err(LabError::config("functions", "give 1 to 3 component functions"));
            }
            Ok(())
        }
        CampaignKind::Polarized => {
            stable_line(c)?;
            p_range(c, |p| p >= 2.0, "the polarized identity needs p >= 2")?;
            if c.functions.len() != 2 {
                return Err(LabError::config("functions", "give exactly two functions (f, g)"));
            }
            if c.path == Some(PolarizedPath::Split) {
                p_range(c, |p| p > 2.0, "the split route needs p > 2")?;
                if !c.functions[0].is_gaussian_family() {
                    return Err(LabError::config("functions[0]", "the split route needs a Gaussian-family f"));
                }
            }
            if c.path.is_none() && !c.functions[0].is_gaussian_family() {
                for &p in &c.p {
                    if PolarizedPath::default_for(p) == PolarizedPath::Split {
                        return Err(LabError::config("path", "p in (2,3) defaults to the split route, which needs a Gaussian-family f"));
                    }
                }
            }
            Ok(())
        }
        CampaignKind::GaussianHs => {
            p_range(c, |p| p > 1.0, "need p > 1")?;
            need(&c.functions, "functions")?;
            for (j, f) in c.functions.iter().enumerate() {
                if !f.is_gaussian_family() || f.dim() != 1 {
                    return Err(LabError::config(format!("functions[{j}]"), "must be a Gaussian-family function on R"));
                }
            }
            Ok(())
        }
        CampaignKind::Forms => {
            stable_line(c)?;
            p_range(c, |p| p >= 2.0, "form checks use p >= 2")?;
            if c.functions.len() != 2 {
                return Err(LabError::config("functions", "give exactly two functions (u, v)"));
            }
            Ok(())
        }
    }
}

/// A report of any kind, as written to its JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ClaimReport {
    Identity(IdentityReport),
    Verification(VerificationReport),
    Inconclusive(ReportRecord),
}

impl ClaimReport {
    pub fn record(&self, campaign: &str) -> ReportRecord {
        match self {
            ClaimReport::Identity(r) => ReportRecord::from_identity(campaign, r),
            ClaimReport::Verification(r) => ReportRecord::from_verification(campaign, r),
            ClaimReport::Inconclusive(r) => r.clone(),
        }
    }

    pub fn claim_id(&self) -> &str {
        match self {
            ClaimReport::Identity(r) => &r.claim_id,
            ClaimReport::Verification(r) => &r.claim_id,
            ClaimReport::Inconclusive(r) => &r.claim_id,
        }
    }
}

impl From<IdentityReport> for ClaimReport {
    fn from(r: IdentityReport) -> Self {
        ClaimReport::Identity(r)
    }
}

impl From<VerificationReport> for ClaimReport {
    fn from(r: VerificationReport) -> Self {
        ClaimReport::Verification(r)
    }
}

/// Everything one campaign produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignOutput {
    pub reports: Vec<ClaimReport>,
    /// `(file name, contents)` of tabular scans.
    pub tables: Vec<(String, String)>,
}

struct Sink<'a> {
    out: &'a mut CampaignOutput,
}

impl Sink<'_> {
    fn push(&mut self, r: impl Into<ClaimReport>) {
        self.out.reports.push(r.into());
    }

    /// Records the outcome of a check; accuracy failures become
    /// inconclusive records, other errors propagate.
    fn take<T: Into<ClaimReport>>(&mut self, claim: &str, check: &str, params: &[(&str, f64)], r: Result<T>) -> Result<()> {
        match r {
            Ok(v) => {
                self.push(v);
                Ok(())
            }
            Err(e) if is_numerical(&e) => {
                self.push(inconclusive(claim, check, params, &e));
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    fn take_many<T: Into<ClaimReport>>(&mut self, claim: &str, check: &str, params: &[(&str, f64)], r: Result<Vec<T>>) -> Result<()> {
        match r {
            Ok(v) => {
                v.into_iter().for_each(|x| self.push(x));
                Ok(())
            }
            Err(e) if is_numerical(&e) => {
                self.push(inconclusive(claim, check, params, &e));
                Ok(())
            }
            Err(e) => Err(e),
        }
    }
}

fn is_numerical(e: &LabError) -> bool {
    matches!(e, LabError::Accuracy { .. } | LabError::Singularity(_) | LabError::Degenerate(_))
}

fn inconclusive(claim: &str, check: &str, params: &[(&str, f64)], e: &LabError) -> ClaimReport {
    let map = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    ClaimReport::Inconclusive(ReportRecord::inconclusive("", claim, check, &map, &e.to_string()))
}

/// Runs one campaign in memory.
pub fn execute_campaign(c: &CampaignSpec, seed: u64, global: &QuadratureConfig) -> Result<CampaignOutput> {
    validate_campaign(c)?;
    let mut out = CampaignOutput::default();
    let mut sink = Sink { out: &mut out };
    let quad = c.quadrature.clone().unwrap_or_else(|| global.clone());
    let strategy = SampleStrategy::new(c.mode, c.samples, seed)?;
    match c.kind {
        CampaignKind::Pointwise => {
            for &p in &c.p {
                let e = Exponent::new(p)?;
                verify::check_pointwise_identities(e, &strategy).into_iter().for_each(|r| sink.push(r));
            }
        }
        CampaignKind::Inequalities => {
            let dims = if c.dims.is_empty() { vec![1, 2, 3] } else { c.dims.clone() };
            let lambdas = if c.lambda.is_empty() { vec![0.0, 0.5, 1.0, 2.0] } else { c.lambda.clone() };
            for &p in &c.p {
                let e = Exponent::new(p)?;
                for &n in &dims {
                    for &l in &lambdas {
                        sink.take_many("lemma-A1-restpowers", "rest-powers", &[("kappa", p), ("lambda", l)], verify::check_lemma_a1(p, l, n, &strategy))?;
                    }
                    for pair in [ComparabilityPair::FvsG, ComparabilityPair::HvsG, ComparabilityPair::FvsHalfpower] {
                        let est = verify::estimate_comparability(pair, e, n, &strategy);
                        sink.take(pair.claim_id(), pair.name(), &[("p", p), ("n", n as f64)], est.map(|x| verify::comparability_report(&x)))?;
                    }
                }
                if p == 2.0 || p >= 3.0 {
                    let est = verify::estimate_comparability(ComparabilityPair::AbsJvsG, e, 2, &strategy);
                    sink.take("codiv-domination", "absJ_vs_G", &[("p", p)], est.map(|x| verify::comparability_report(&x)))?;
                }
            }
        }
        CampaignKind::Convexity => {
            for &p in &c.p {
                let e = Exponent::new(p)?;
                sink.take("witness-hessian", "hessian-minors", &[("p", p)], verify::check_witness_hessian(p, c.samples, seed))?;
                sink.take("witness-midpoint-convexity", "midpoint", &[("p", p)], verify::check_midpoint_convexity(e, c.samples, seed))?;
                sink.take_many("convexity-split-pp", "split-sums", &[("p", p)], verify::check_convexity_suite(e, &strategy))?;
            }
        }
        CampaignKind::Counterexample => {
            for &p in &c.p {
                let rows = verify::counterexample_scan(p, &c.k)?;
                let name = format!("counterexample-p{p}.csv");
                sink.out.tables.push((name, counterexample_csv(&rows)));
                sink.push(counterexample_report(p, &rows));
            }
        }
        CampaignKind::Constants => {
            let dims = if c.dims.is_empty() { vec![2] } else { c.dims.clone() };
            let pairs: Vec<ComparabilityPair> = if c.pairs.is_empty() {
                vec![ComparabilityPair::FvsG, ComparabilityPair::HvsG, ComparabilityPair::FvsHalfpower]
            } else {
                c.pairs.iter().map(|s| ComparabilityPair::parse(s)).collect::<Result<_>>()?
            };
            for &p in &c.p {
                let e = Exponent::new(p)?;
                for &pair in &pairs {
                    let ns: &[usize] = if pair == ComparabilityPair::AbsJvsG { &[2] } else { &dims };
                    for &n in ns {
                        let est = verify::estimate_comparability(pair, e, n, &strategy);
                        sink.take(pair.claim_id(), pair.name(), &[("p", p), ("n", n as f64)], est.map(|x| verify::comparability_report(&x)))?;
                    }
                }
            }
        }
        CampaignKind::SemigroupChecks => run_semigroup_checks(c, &mut sink)?,
        CampaignKind::HardyStein => {
            let model = need_model(c)?;
            let mut q = quad.clone();
            if let Some(t) = c.tol {
                q.tol = t;
            }
            for &p in &c.p {
                let params = [("p", p), ("alpha", model.alpha), ("d", 1.0)];
                match forms::verify_hardy_stein(&c.functions, p, &model, &q) {
                    Ok(o) => {
                        sink.push(o.identity);
                        sink.push(o.disintegration);
                    }
                    Err(e) if is_numerical(&e) => sink.push(inconclusive("hardy-stein", "vector-identity", &params, &e)),
                    Err(e) => return Err(e),
                }
            }
        }
        CampaignKind::Polarized => {
            let model = need_model(c)?;
            let mut q = quad.clone();
            if let Some(t) = c.tol {
                q.tol = t;
            }
            let (f, g) = (&c.functions[0], &c.functions[1]);
            for &p in &c.p {
                let path = c.path.unwrap_or_else(|| PolarizedPath::default_for(p));
                let params = [("p", p), ("alpha", model.alpha), ("d", 1.0)];
                match forms::verify_polarized_hardy_stein(f, g, p, &model, &q, path) {
                    Ok(o) => {
                        sink.push(o.identity);
                        sink.push(o.bound);
                    }
                    Err(e) if is_numerical(&e) => sink.push(inconclusive("polarized-hardy-stein", "polarized-identity", &params, &e)),
                    Err(e) => return Err(e),
                }
            }
        }
        CampaignKind::GaussianHs => {
            let mut q = quad.clone();
            q.tol = c.tol.unwrap_or(5e-3);
            if c.quadrature.is_none() {
                // the p = 2 integrand decays only like t^{-3/2}
                q.t_max = q.t_max.max(1e10);
            }
            let t_fixed = c.t.unwrap_or(0.5);
            for f in &c.functions {
                for &p in &c.p {
                    let params = [("p", p), ("alpha", 2.0), ("d", 1.0)];
                    match forms::verify_gaussian_hardy_stein(f, p, &q, t_fixed) {
                        Ok(o) => {
                            sink.push(o.identity);
                            sink.push(o.metafune_spina);
                        }
                        Err(e) if is_numerical(&e) => sink.push(inconclusive("gaussian-hs", "brownian-identity", &params, &e)),
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        CampaignKind::Forms => run_form_checks(c, &quad, &mut sink)?,
    }
    Ok(out)
}

fn run_semigroup_checks(c: &CampaignSpec, sink: &mut Sink) -> Result<()> {
    let model = need_model(c)?;
    let times = if c.times.is_empty() { vec![0.01, 1.0] } else { c.times.clone() };
    let pa = [("alpha", model.alpha), ("d", model.d as f64)];
    sink.take("levy-exponent", "exponent-probe", &pa, checks::check_levy_exponent(&model))?;
    sink.take("levy-density", "integrability", &pa, checks::check_levy_density(&model))?;
    for &t in &times {
        sink.take("kernel-normalization", "mass-one", &pa, checks::check_normalization(&model, t))?;
    }
    sink.take("kernel-symmetry", "symmetry-positivity", &pa, checks::check_kernel_symmetry(&model, &times, &[0.0, 0.5, 1.0, 2.0]))?;
    if model.d == 1 {
        sink.take("chapman-kolmogorov", "kernel-convolution", &pa, checks::check_chapman_kolmogorov(&model, 0.3, 0.7, 0.4))?;
    }
    if model.is_stable() {
        sink.take("condition-p1-p2", "small-time-ratio", &pa, checks::check_p1_p2(&model, &[1e-3, 0.1, 1.0, 10.0], &[0.5, 1.0, 2.0]))?;
    }
    let ps = if c.p.is_empty() { vec![2.0] } else { c.p.clone() };
    for f in &c.functions {
        if f.dim() != model.d || model.d != 1 {
            continue;
        }
        let t = times[times.len() / 2];
        sink.take("semigroup-mass", "mass-conservation", &pa, checks::check_semigroup_mass(&model, f, t))?;
        sink.take("chapman-kolmogorov", "semigroup-property", &pa, checks::check_semigroup_property(&model, f, 0.3, 0.7, &[0.0, 0.5, 1.5]))?;
        sink.take("chapman-kolmogorov", "spectral-vs-physical", &pa, checks::check_spectral_physical(&model, f, t, &[0.0, 0.5, 1.5]))?;
        sink.take("generator-consistency", "difference-quotients", &pa, checks::check_generator_consistency(&model, f, 0.5, 0.3, 0.1))?;
        if model.kind == ModelKind::Gaussian && f.is_gaussian_family() {
            sink.take("generator-consistency", "laplacian", &pa, checks::check_gaussian_laplacian(f, &[-1.0, 0.0, 0.7]))?;
        }
        for &p in &ps {
            sink.take("semigroup-decay", "sup-bound", &pa, checks::check_decay(&model, f, p, &times))?;
            let mut grid = vec![0.0];
            grid.extend(times.iter().copied());
            sink.take("stein-maximal", "maximal-norm", &pa, checks::stein_maximal_probe(&model, f, &grid, p))?;
        }
    }
    Ok(())
}

fn run_form_checks(c: &CampaignSpec, quad: &QuadratureConfig, sink: &mut Sink) -> Result<()> {
    let model = need_model(c)?;
    let (u, v) = (&c.functions[0], &c.functions[1]);
    let pa = [("alpha", model.alpha), ("d", 1.0)];
    let tol = c.tol.unwrap_or(1e-3);
    sink.take("form-parseval", "dirichlet-parseval", &pa, forms::check_form_parseval(u, &model, quad, tol))?;
    for &p in &c.p {
        let pp = [("p", p), ("alpha", model.alpha), ("d", 1.0)];
        sink.take("form-sandwich", "two-sided-bound", &pp, forms::check_sandwich(u, p, &model, quad))?;
        sink.take("pairing-single", "generator-pairing", &pp, forms::check_pairing_single(u, p, &model, quad, tol))?;
        sink.take("pairing-two-term", "generator-pairing", &pp, forms::check_pairing_two_term(u, v, p, &model, quad, tol))?;
        sink.take(
            "form-et-limit",
            "small-time-limit",
            &pp,
            forms::check_et_limit(u, p, &model, quad, &[0.2, 0.1, 0.05, 0.025], c.tol.unwrap_or(5e-3)),
        )?;
        sink.take_many("polarized-form", "properties", &pp, forms::check_polarized_form(u, v, p, &model, quad))?;
        let t = c.t.unwrap_or(0.5);
        sink.take("time-derivative", "three-way", &pp, forms::verify_time_derivative(u, v, p, &model, t, 0.1 * t, quad))?;
    }
    Ok(())
}

fn counterexample_csv(rows: &[CounterexampleRow]) -> String {
    let mut s = String::from("k,ratio,closed_form,rel_err\n");
    for r in rows {
        let _ = writeln!(s, "{},{:e},{:e},{:e}", r.k, r.ratio, r.closed_form, r.rel_err);
    }
    s
}

fn counterexample_report(p: f64, rows: &[CounterexampleRow]) -> VerificationReport {
    let worst = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let mut sorted: Vec<&CounterexampleRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.k);
    let monotone = sorted.windows(2).all(|w| w[1].ratio > w[0].ratio);
    let mut r = VerificationReport::new("codiv-counterexample", "closed-form-scan")
        .param("p", p)
        .param("n", 2.0)
        .param("tol", 1e-10)
        .note(format!("ratios increasing in k: {monotone}"));
    r.samples = rows.len() as u64;
    r.observed = worst;
    r.bound = 1e-10;
    r.pass = worst <= 1e-10 && monotone;
    r.witness = sorted.last().map(|x| vec![x.k as f64, x.ratio]);
    r
}

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Pass => 0,
            RunStatus::Fail => 1,
            RunStatus::Inconclusive => 2,
        }
    }
}

/// Outcome of [`run_campaign`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub status: RunStatus,
    pub records: Vec<ReportRecord>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn failures(&self) -> impl Iterator<Item = &ReportRecord> {
        self.records.iter().filter(|r| r.verdict != Verdict::Pass)
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

/// Runs every campaign and writes the reports below `config.output`.
/// Exit status: pass if every check passed, fail if any failed, otherwise
/// inconclusive if some check could not reach its accuracy target.
pub fn run_campaign(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let io = |e: std::io::Error, p: &Path| LabError::Io(format!("{}: {e}", p.display()));
    fs::create_dir_all(&config.output).map_err(|e| io(e, &config.output))?;
    let mut records = Vec::new();
    let mut files = Vec::new();
    for (i, c) in config.campaign.iter().enumerate() {
        let id = campaign_id(i, c);
        let out = execute_campaign(c, config.seed, &config.quadrature)?;
        let dir = config.output.join(sanitize(&id));
        fs::create_dir_all(&dir).map_err(|e| io(e, &dir))?;
        for (j, r) in out.reports.iter().enumerate() {
            let mut rec = r.record(&id);
            rec.campaign = id.clone();
            let path = dir.join(format!("{:03}-{}.json", j, sanitize(r.claim_id())));
            let body = match r {
                ClaimReport::Inconclusive(_) => serde_json::to_string_pretty(&ClaimReport::Inconclusive(rec.clone())),
                other => serde_json::to_string_pretty(other),
            }
            .map_err(|e| LabError::Io(e.to_string()))?;
            fs::write(&path, body + "\n").map_err(|e| io(e, &path))?;
            files.push(path);
            records.push(rec);
        }
        for (name, body) in &out.tables {
            let path = dir.join(sanitize(name));
            fs::write(&path, body).map_err(|e| io(e, &path))?;
            files.push(path);
        }
    }
    let mut summary = String::from(CSV_HEADER);
    summary.push('\n');
    for r in &records {
        summary.push_str(&r.csv_row());
        summary.push('\n');
    }
    let path = config.output.join("summary.csv");
    fs::write(&path, summary).map_err(|e| io(e, &path))?;
    files.push(path);
    let status = if records.iter().any(|r| r.verdict == Verdict::Fail) {
        RunStatus::Fail
    } else if records.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        RunStatus::Inconclusive
    } else {
        RunStatus::Pass
    };
    Ok(RunSummary { status, records, files })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_campaign_list_is_a_usage_error() {
        let e = RunConfig::from_toml("seed = 1\n").unwrap_err();
        assert!(matches!(e, LabError::Config { ref field, .. } if field == "campaign"), "{e}");
    }

    #[test]
    fn offending_field_is_named() {
        let text = "[[campaign]]\nkind = \"counterexample\"\np = [3.5]\nk = [4]\n";
        let e = RunConfig::from_toml(text).unwrap_err();
        assert!(matches!(e, LabError::Config { ref field, .. } if field == "campaign[0].p"), "{e}");
    }

    #[test]
    fn counterexample_campaign_writes_monotone_rows() {
        let c: CampaignSpec = toml::from_str("kind = \"counterexample\"\np = [2.5]\nk = [4, 8, 16, 32]\n").unwrap();
        let out = execute_campaign(&c, 0, &QuadratureConfig::default()).unwrap();
        let (_, csv) = &out.tables[0];
        assert_eq!(csv.lines().count(), 5);
        match &out.reports[0] {
            ClaimReport::Verification(r) => assert!(r.pass),
            other => panic!("{other:?}"),
        }
    }
}
