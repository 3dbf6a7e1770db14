//! Randomized verification of the pointwise identities, inequalities and
//! convexity claims, with empirical constants for the `≍` relations.
//!
//! Sampling is split into blocks of [`BLOCK`] samples; block `b` draws from
//! a ChaCha8 stream `(seed, b)`, blocks run in parallel and their partial
//! results are merged in block order, so every statistic is reproducible
//! bit-for-bit from `(seed, mode, count)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bregman::*;
use crate::error::{LabError, Result};
use crate::report::VerificationReport;

pub const BLOCK: u64 = 4096;

/// Pointwise identities must hold to this relative accuracy.
pub const IDENTITY_TOL: f64 = 1e-12;

/// A ratio larger than this is treated as having escaped every finite bound.
pub const ESCAPE_CAP: f64 = 1e6;

/// Ratios whose reference quantity is below this are skipped as underflow.
pub const UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    /// Uniform in a ball of radius `10^j`, `j ∈ {−3..3}`.
    UniformBall,
    /// Independent directions with magnitudes `10^U(−3,3)`.
    LogRadial,
    /// `z = w + δ|w|·e`, `δ = 10^U(−8,−1)`.
    NearDiagonal,
    /// Coordinates set exactly to zero, `w = 0`, `z = 0`, `w = z`, collinear
    /// pairs and sign flips.
    AxisDegenerate,
    /// Round-robin over the four modes above.
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStrategy {
    pub mode: SampleMode,
    pub count: u64,
    pub seed: u64,
}

impl SampleStrategy {
    pub fn new(mode: SampleMode, count: u64, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(LabError::param("sample count must be at least 1"));
        }
        Ok(SampleStrategy { mode, count, seed })
    }

    pub fn mixture(count: u64, seed: u64) -> Self {
        SampleStrategy {
            mode: SampleMode::Mixture,
            count: count.max(1),
            seed,
        }
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn direction(rng: &mut ChaCha8Rng, n: usize, out: &mut [f64; 3]) {
    loop {
        let mut r2 = 0.0;
        for v in out.iter_mut().take(n) {
            *v = gauss(rng);
            r2 += *v * *v;
        }
        if r2 > 1e-20 {
            let r = r2.sqrt();
            out.iter_mut().take(n).for_each(|v| *v /= r);
            out.iter_mut().skip(n).for_each(|v| *v = 0.0);
            return;
        }
    }
}

fn log_radial_point(rng: &mut ChaCha8Rng, n: usize) -> [f64; 3] {
    let mut d = [0.0; 3];
    direction(rng, n, &mut d);
    let r = 10f64.powf(rng.gen_range(-3.0..3.0));
    d.map(|v| v * r)
}

fn draw(rng: &mut ChaCha8Rng, mode: SampleMode, n: usize, index: u64) -> ([f64; 3], [f64; 3]) {
    let mode = match mode {
        SampleMode::Mixture => match index % 4 {
            0 => SampleMode::UniformBall,
            1 => SampleMode::LogRadial,
            2 => SampleMode::NearDiagonal,
            _ => SampleMode::AxisDegenerate,
        },
        m => m,
    };
    match mode {
        SampleMode::UniformBall => {
            let radius = 10f64.powi(rng.gen_range(-3..=3));
            let mut pt = || {
                let mut d = [0.0; 3];
                direction(rng, n, &mut d);
                let r = radius * rng.gen::<f64>().powf(1.0 / n as f64);
                d.map(|v| v * r)
            };
            let w = pt();
            (w, pt())
        }
        SampleMode::LogRadial => {
            let w = log_radial_point(rng, n);
            (w, log_radial_point(rng, n))
        }
        SampleMode::NearDiagonal => {
            let w = log_radial_point(rng, n);
            let mut e = [0.0; 3];
            direction(rng, n, &mut e);
            let delta = 10f64.powf(rng.gen_range(-8.0..-1.0)) * norm(&w[..n]);
            let mut z = w;
            for i in 0..n {
                z[i] += delta * e[i];
            }
            (w, z)
        }
        SampleMode::AxisDegenerate | SampleMode::Mixture => {
            let mut w = log_radial_point(rng, n);
            let mut z = log_radial_point(rng, n);
            match rng.gen_range(0..6) {
                0 => w = [0.0; 3],
                1 => z = [0.0; 3],
                2 => z = w,
                3 => {
                    let c = rng.gen_range(-3.0..3.0);
                    z = w.map(|v| v * c);
                }
                4 => z = w.map(|v| -v),
                _ => {
                    for i in 0..n {
                        if rng.gen::<bool>() {
                            w[i] = 0.0;
                        }
                        if rng.gen::<bool>() {
                            z[i] = 0.0;
                        }
                    }
                }
            }
            (w, z)
        }
    }
}

/// Runs `visit` on every sample and merges per-block accumulators in block
/// order; the result does not depend on the number of worker threads.
pub fn fold_samples<A, V, M>(strategy: &SampleStrategy, n: usize, init: impl Fn() -> A + Sync, visit: V, merge: M) -> A
where
    A: Send,
    V: Fn(&mut A, &mut ChaCha8Rng, u64, &[f64], &[f64]) + Sync,
    M: Fn(A, A) -> A,
{
    assert!((1..=3).contains(&n), "dimension must be 1, 2 or 3");
    let blocks = strategy.count.div_ceil(BLOCK);
    let parts: Vec<A> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(strategy.seed, b);
            let mut acc = init();
            let end = ((b + 1) * BLOCK).min(strategy.count);
            for i in b * BLOCK..end {
                let (w, z) = draw(&mut rng, strategy.mode, n, i);
                visit(&mut acc, &mut rng, i, &w[..n], &z[..n]);
            }
            acc
        })
        .collect();
    let mut it = parts.into_iter();
    let first = it.next().unwrap_or_else(&init);
    it.fold(first, merge)
}

/// Running extremes of a ratio with the inputs that realize them.
#[derive(Debug, Clone, Default)]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
    pub count: u64,
    pub skipped: u64,
}

impl Extremes {
    pub fn new() -> Self {
        Extremes {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            ..Default::default()
        }
    }

    pub fn push(&mut self, value: f64, w: &[f64], z: &[f64]) {
        self.count += 1;
        if value < self.min {
            self.min = value;
            self.argmin = w.iter().chain(z).copied().collect();
        }
        if value > self.max {
            self.max = value;
            self.argmax = w.iter().chain(z).copied().collect();
        }
    }

    pub fn merge(mut self, o: Extremes) -> Extremes {
        if o.min < self.min {
            self.min = o.min;
            self.argmin = o.argmin;
        }
        if o.max > self.max {
            self.max = o.max;
            self.argmax = o.argmax;
        }
        self.count += o.count;
        self.skipped += o.skipped;
        self
    }
}

/// Which comparability relation to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComparabilityPair {
    #[serde(rename = "F_vs_G")]
    FvsG,
    #[serde(rename = "H_vs_G")]
    HvsG,
    #[serde(rename = "F_vs_halfpower")]
    FvsHalfpower,
    #[serde(rename = "absJ_vs_G")]
    AbsJvsG,
}

impl ComparabilityPair {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "F_vs_G" => Ok(Self::FvsG),
            "H_vs_G" => Ok(Self::HvsG),
            "F_vs_halfpower" => Ok(Self::FvsHalfpower),
            "absJ_vs_G" => Ok(Self::AbsJvsG),
            other => Err(LabError::param(format!(
                "unknown pair `{other}` (expected F_vs_G, H_vs_G, F_vs_halfpower, absJ_vs_G)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::FvsG => "F_vs_G",
            Self::HvsG => "H_vs_G",
            Self::FvsHalfpower => "F_vs_halfpower",
            Self::AbsJvsG => "absJ_vs_G",
        }
    }

    pub fn claim_id(self) -> &'static str {
        match self {
            Self::FvsG => "comparability-f-g",
            Self::HvsG => "comparability-h-g",
            Self::FvsHalfpower => "comparability-halfpower",
            Self::AbsJvsG => "codiv-domination",
        }
    }
}

/// Observed constants `lower·G ≤ F ≤ upper·G` (labels: observed, not proved).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub pair: ComparabilityPair,
    pub lower: f64,
    pub upper: f64,
    pub samples: u64,
    pub skipped: u64,
    pub p: f64,
    pub n: usize,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
}

/// `|z^⟨p/2⟩ − w^⟨p/2⟩|²`.
pub fn halfpower_gap(w: &[f64], z: &[f64], p: f64) -> f64 {
    let mut a = [0.0; 3];
    let mut b = [0.0; 3];
    signed_power_into(w, 0.5 * p, &mut a[..w.len()]);
    signed_power_into(z, 0.5 * p, &mut b[..z.len()]);
    a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Min/max of the selected ratio over the sample.
pub fn estimate_comparability(pair: ComparabilityPair, p: Exponent, n: usize, strategy: &SampleStrategy) -> Result<ConstantEstimate> {
    let p = p.get();
    if !(1..=3).contains(&n) {
        return Err(LabError::param(format!("dimension must be 1, 2 or 3, got {n}")));
    }
    if pair == ComparabilityPair::AbsJvsG {
        if n != 2 {
            return Err(LabError::param("absJ_vs_G lives on R² (n = 2)"));
        }
        if !(p == 2.0 || p >= 3.0) {
            return Err(LabError::param(format!(
                "|J_p| ≤ c·G_p is only established for p = 2 or p ≥ 3, got p = {p}"
            )));
        }
    }
    let ext = fold_samples(
        strategy,
        n,
        Extremes::new,
        |acc, _, _, w, z| {
            let (num, den) = match pair {
                ComparabilityPair::FvsG => (bregman_f(w, z, p), comparison_g(w, z, p)),
                ComparabilityPair::HvsG => (bregman_h(w, z, p), comparison_g(w, z, p)),
                ComparabilityPair::FvsHalfpower => (bregman_f(w, z, p), halfpower_gap(w, z, p)),
                ComparabilityPair::AbsJvsG => (
                    codivergence_j([w[0], w[1]], [z[0], z[1]], p).abs(),
                    comparison_g(w, z, p),
                ),
            };
            let r = num / den;
            if den < UNDERFLOW || !r.is_finite() {
                acc.skipped += 1;
            } else {
                acc.push(r, w, z);
            }
        },
        Extremes::merge,
    );
    if ext.count == 0 {
        return Err(LabError::Degenerate(format!(
            "all {} samples had a vanishing reference quantity",
            strategy.count
        )));
    }
    Ok(ConstantEstimate {
        pair,
        lower: ext.min,
        upper: ext.max,
        samples: ext.count,
        skipped: ext.skipped,
        p,
        n,
        argmin: ext.argmin,
        argmax: ext.argmax,
    })
}

/// Turns a constant estimate into a report: bounded iff `0 ≤ lower ≤ upper < cap`.
pub fn comparability_report(est: &ConstantEstimate) -> VerificationReport {
    let lower_ok = if est.pair == ComparabilityPair::AbsJvsG {
        est.lower >= 0.0
    } else {
        est.lower > 0.0
    };
    let pass = lower_ok && est.upper.is_finite() && est.upper < ESCAPE_CAP && est.lower <= est.upper;
    let mut r = VerificationReport::new(est.pair.claim_id(), est.pair.name())
        .param("p", est.p)
        .param("n", est.n as f64)
        .note(format!("observed lower constant {:e}", est.lower))
        .note("constants are observed over the sample, not proved");
    r.samples = est.samples;
    r.skipped = est.skipped;
    r.observed = est.upper;
    r.bound = ESCAPE_CAP;
    r.pass = pass;
    r.witness = Some(est.argmax.clone());
    r
}

/// Which of the four bounds to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerInequality {
    /// `0 ≤ F_κ(w,z)`.
    Remainder,
    /// `|F_⟨κ⟩(w,z)|`.
    SignedRemainder,
    /// `||z|^κ − |w|^κ|`.
    DifferenceOfPowers,
    /// `|z^⟨κ⟩ − w^⟨κ⟩|`.
    DifferenceOfSignedPowers,
}

impl PowerInequality {
    pub const ALL: [PowerInequality; 4] = [
        Self::Remainder,
        Self::SignedRemainder,
        Self::DifferenceOfPowers,
        Self::DifferenceOfSignedPowers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Remainder => "remainder",
            Self::SignedRemainder => "signed-remainder",
            Self::DifferenceOfPowers => "difference-of-powers",
            Self::DifferenceOfSignedPowers => "difference-of-signed-powers",
        }
    }

    fn admissible(self, kappa: f64, lambda: f64) -> bool {
        match self {
            Self::Remainder | Self::SignedRemainder => kappa > 1.0 && (0.0..=2.0).contains(&lambda),
            _ => kappa > 0.0 && (0.0..=1.0).contains(&lambda),
        }
    }

    fn lhs(self, w: &[f64], z: &[f64], kappa: f64) -> f64 {
        match self {
            Self::Remainder => bregman_f(w, z, kappa),
            Self::SignedRemainder => norm(&remainder_f_signed(w, z, kappa).expect("κ > 1 checked")),
            Self::DifferenceOfPowers => (norm(z).powf(kappa) - norm(w).powf(kappa)).abs(),
            Self::DifferenceOfSignedPowers => {
                let mut a = [0.0; 3];
                let mut b = [0.0; 3];
                signed_power_into(w, kappa, &mut a[..w.len()]);
                signed_power_into(z, kappa, &mut b[..z.len()]);
                a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
        }
    }
}

/// Ratio `LHS / (|z−w|^λ (|w|∨|z|)^{κ−λ})` for each admissible bound.
pub fn check_lemma_a1(kappa: f64, lambda: f64, n: usize, strategy: &SampleStrategy) -> Result<Vec<VerificationReport>> {
    let which: Vec<PowerInequality> = PowerInequality::ALL
        .into_iter()
        .filter(|q| q.admissible(kappa, lambda))
        .collect();
    if which.is_empty() {
        return Err(LabError::param(format!(
            "no inequality admits κ = {kappa}, λ = {lambda}"
        )));
    }
    let mut out = Vec::new();
    for q in which {
        let ext = fold_samples(
            strategy,
            n,
            Extremes::new,
            |acc, _, _, w, z| {
                let dz: f64 = w.iter().zip(z).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
                let m = norm(w).max(norm(z));
                let den = dz.powf(lambda) * m.powf(kappa - lambda);
                let r = q.lhs(w, z, kappa) / den;
                if den < UNDERFLOW || !r.is_finite() {
                    acc.skipped += 1;
                } else {
                    acc.push(r, w, z);
                }
            },
            Extremes::merge,
        );
        let pass = ext.count > 0 && ext.max.is_finite() && ext.max < ESCAPE_CAP && ext.min >= 0.0;
        let mut r = VerificationReport::new("lemma-A1-restpowers", q.name())
            .param("kappa", kappa)
            .param("lambda", lambda)
            .param("n", n as f64)
            .note("observed constant over the sample");
        r.samples = ext.count;
        r.skipped = ext.skipped;
        r.observed = ext.max;
        r.bound = ESCAPE_CAP;
        r.pass = pass;
        r.witness = Some(ext.argmax);
        out.push(r);
    }
    Ok(out)
}

/// One row of the counterexample scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub k: u64,
    pub ratio: f64,
    pub closed_form: f64,
    pub rel_err: f64,
}

/// `k^{3−p}|2^{p−1} − p| / (1 + 4/k²)^{(p−2)/2}`.
pub fn counterexample_closed_form(p: f64, k: f64) -> f64 {
    k.powf(3.0 - p) * (2f64.powf(p - 1.0) - p).abs() / (1.0 + 4.0 / (k * k)).powf(0.5 * (p - 2.0))
}

/// `|J_p|/G_p` along `w = (1, 1/k)`, `z = (1, 2/k)`.
pub fn counterexample_scan(p: f64, ks: &[u64]) -> Result<Vec<CounterexampleRow>> {
    if !(p > 1.0 && p < 3.0 && p != 2.0) || !p.is_finite() {
        return Err(LabError::param(format!(
            "the scan diverges only for p ∈ (1,3) \\ {{2}}, got p = {p}"
        )));
    }
    if ks.is_empty() || ks.contains(&0) {
        return Err(LabError::param("k values must be positive integers"));
    }
    Ok(ks
        .iter()
        .map(|&k| {
            let kf = k as f64;
            let w = [1.0, 1.0 / kf];
            let z = [1.0, 2.0 / kf];
            let ratio = codivergence_j(w, z, p).abs() / comparison_g(&w, &z, p);
            let closed_form = counterexample_closed_form(p, kf);
            CounterexampleRow {
                k,
                ratio,
                closed_form,
                rel_err: (ratio - closed_form).abs() / closed_form,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Default)]
struct Violations {
    worst: f64,
    witness: Vec<f64>,
    count: u64,
    violations: u64,
}

impl Violations {
    fn new() -> Self {
        Violations {
            worst: 0.0,
            ..Default::default()
        }
    }

    /// Records `err`; `err > tol` counts as a violation.
    fn push(&mut self, err: f64, tol: f64, w: &[f64], z: &[f64]) {
        self.count += 1;
        let err = if err.is_nan() { f64::INFINITY } else { err };
        if err > tol {
            self.violations += 1;
        }
        if err > self.worst || (self.witness.is_empty() && err == self.worst && err > 0.0) {
            self.worst = err;
            self.witness = w.iter().chain(z).copied().collect();
        }
    }

    fn merge(mut self, o: Violations) -> Violations {
        if o.worst > self.worst {
            self.worst = o.worst;
            self.witness = o.witness;
        }
        self.count += o.count;
        self.violations += o.violations;
        self
    }

    fn report(self, claim: &str, check: &str, tol: f64) -> VerificationReport {
        let mut r = VerificationReport::new(claim, check).param("tol", tol);
        r.samples = self.count;
        r.observed = self.worst;
        r.bound = tol;
        r.pass = self.violations == 0;
        if self.worst > 0.0 {
            r.witness = Some(self.witness);
        }
        r.notes.push(format!("{} violations", self.violations));
        r
    }
}

fn identity_check<F>(claim: &str, check: &str, n: usize, strategy: &SampleStrategy, tol: f64, err: F) -> VerificationReport
where
    F: Fn(&mut ChaCha8Rng, &[f64], &[f64]) -> f64 + Sync,
{
    fold_samples(
        strategy,
        n,
        Violations::new,
        |acc, rng, _, w, z| {
            let e = err(rng, w, z);
            acc.push(e, tol, w, z);
        },
        Violations::merge,
    )
    .report(claim, check, tol)
}

fn f_scale(w: &[f64], z: &[f64], p: f64) -> f64 {
    let dz: f64 = w.iter().zip(z).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    norm(z).powf(p) + norm(w).powf(p) + p * norm(w).powf(p - 1.0) * dz + f64::MIN_POSITIVE
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale
}

fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> [[f64; 3]; 3] {
    match n {
        1 => [[if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0, 0.0], [0.0; 3], [0.0; 3]],
        2 => {
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            let (s, c) = t.sin_cos();
            [[c, -s, 0.0], [s, c, 0.0], [0.0; 3]]
        }
        _ => {
            let mut q = [0.0; 4];
            let mut r2 = 0.0;
            while r2 < 1e-12 {
                q = [gauss(rng), gauss(rng), gauss(rng), gauss(rng)];
                r2 = q.iter().map(|v| v * v).sum();
            }
            let r = r2.sqrt();
            let [a, b, c, d] = q.map(|v| v / r);
            [
                [a * a + b * b - c * c - d * d, 2.0 * (b * c - a * d), 2.0 * (b * d + a * c)],
                [2.0 * (b * c + a * d), a * a - b * b + c * c - d * d, 2.0 * (c * d - a * b)],
                [2.0 * (b * d - a * c), 2.0 * (c * d + a * b), a * a - b * b - c * c + d * d],
            ]
        }
    }
}

fn rotate(q: &[[f64; 3]; 3], v: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..v.len() {
        out[i] = (0..v.len()).map(|j| q[i][j] * v[j]).sum();
    }
    out
}

/// Randomized pointwise identities for the divergence family in dimension `n`.
pub fn check_divergence_identities(p: Exponent, n: usize, strategy: &SampleStrategy) -> Vec<VerificationReport> {
    let p = p.get();
    let tag = |r: VerificationReport| r.param("p", p).param("n", n as f64);
    let mut out = Vec::new();
    out.push(tag(identity_check("bregman-nonneg", "F_p and H_p nonnegative", n, strategy, 0.0, |_, w, z| {
        let floor = rounding_floor(w, z, p);
        let worst = bregman_f(w, z, p).min(bregman_h(w, z, p));
        if worst < 0.0 {
            -worst / floor
        } else {
            0.0
        }
    })));
    out.push(tag(identity_check("bregman-symmetrized", "H = (F(w,z)+F(z,w))/2", n, strategy, IDENTITY_TOL, |_, w, z| {
        let h = bregman_h(w, z, p);
        let avg = 0.5 * (bregman_f_raw(w, z, p) + bregman_f_raw(z, w, p));
        rel(h, avg, f_scale(w, z, p) + f_scale(z, w, p))
    })));
    out.push(tag(identity_check("bregman-rotation", "F(Qw,Qz) = F(w,z)", n, strategy, IDENTITY_TOL, |rng, w, z| {
        let q = random_rotation(rng, n);
        let qw = rotate(&q, w);
        let qz = rotate(&q, z);
        rel(bregman_f_raw(&qw[..n], &qz[..n], p), bregman_f_raw(w, z, p), f_scale(w, z, p))
    })));
    out.push(tag(identity_check(
        "signed-remainder-antisymmetry",
        "F_<k>(-w,-z) = -F_<k>(w,z)",
        n,
        strategy,
        IDENTITY_TOL,
        |_, w, z| {
            let a = remainder_f_signed(w, z, p).expect("p > 1");
            let mw: Vec<f64> = w.iter().map(|v| -v).collect();
            let mz: Vec<f64> = z.iter().map(|v| -v).collect();
            let b = remainder_f_signed(&mw, &mz, p).expect("p > 1");
            let diff = norm(&a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>());
            diff / f_scale(w, z, p)
        },
    )));
    out
}

fn arr(v: &[f64]) -> [f64; 2] {
    [v[0], v[1]]
}

/// Randomized pointwise identities of the co-divergence family on R².
pub fn check_codivergence_identities(p: Exponent, strategy: &SampleStrategy) -> Vec<VerificationReport> {
    let p = p.get();
    let tag = |r: VerificationReport| r.param("p", p).param("n", 2.0);
    let mut out = Vec::new();
    out.push(tag(identity_check("codiv-diagonal", "J((a,a),(b,b)) = F(a,b)", 2, strategy, IDENTITY_TOL, |_, w, z| {
        let (a, b) = (w[0], z[0]);
        let j = codivergence_j([a, a], [b, b], p);
        rel(j, bregman_f_raw(&[a], &[b], p), f_scale(&[a], &[b], p))
    })));
    out.push(tag(identity_check("codiv-homogeneity", "J(lw1,mw2;lz1,mz2) = l m^<p-1> J", 2, strategy, IDENTITY_TOL, |rng, w, z| {
        let l = 10f64.powf(rng.gen_range(-2.0..2.0));
        let m = 10f64.powf(rng.gen_range(-2.0..2.0));
        let (w, z) = (arr(w), arr(z));
        let lhs = codivergence_j([l * w[0], m * w[1]], [l * z[0], m * z[1]], p);
        let f = l * m.powf(p - 1.0);
        rel(lhs, f * codivergence_j(w, z, p), f * codivergence_scale(w, z, p) + f64::MIN_POSITIVE)
    })));
    if p == 2.0 {
        out.push(tag(identity_check("codiv-product-p2", "J_2 = (z1-w1)(z2-w2)", 2, strategy, IDENTITY_TOL, |_, w, z| {
            let (w, z) = (arr(w), arr(z));
            rel(codivergence_j(w, z, 2.0), (z[0] - w[0]) * (z[1] - w[1]), codivergence_scale(w, z, 2.0) + f64::MIN_POSITIVE)
        })));
    }
    if p > 2.0 {
        out.push(tag(identity_check("codiv-split-pm", "J = J+ - J-", 2, strategy, IDENTITY_TOL, |_, w, z| {
            let (w, z) = (arr(w), arr(z));
            let s = codivergence_scale(w, z, p) + f64::MIN_POSITIVE;
            rel(codivergence_j(w, z, p), codivergence_j_plus(w, z, p) - codivergence_j_minus(w, z, p), s)
        })));
        out.push(tag(identity_check("codiv-split-pm", "J+(mirror) = J-", 2, strategy, IDENTITY_TOL, |_, w, z| {
            let a = CoDivArgs { w: arr(w), z: arr(z) };
            let m = a.mirrored();
            let s = codivergence_scale(a.w, a.z, p) + f64::MIN_POSITIVE;
            rel(codivergence_j_plus(m.w, m.z, p), codivergence_j_minus(a.w, a.z, p), s)
        })));
        out.push(tag(identity_check("codiv-split-pp", "J+ = J++ - J-+", 2, strategy, IDENTITY_TOL, |_, w, z| {
            let (w, z) = (arr(w), arr(z));
            let s = codivergence_scale(w, z, p) + f64::MIN_POSITIVE;
            rel(codivergence_j_plus(w, z, p), codivergence_j_pp(w, z, p) - codivergence_j_mp(w, z, p), s)
        })));
        out.push(tag(identity_check("codiv-split-pp", "J = (J++ - J-+) - J-", 2, strategy, IDENTITY_TOL, |_, w, z| {
            let (w, z) = (arr(w), arr(z));
            let s = codivergence_scale(w, z, p) + f64::MIN_POSITIVE;
            let split = codivergence_j_pp(w, z, p) - codivergence_j_mp(w, z, p) - codivergence_j_minus(w, z, p);
            rel(codivergence_j(w, z, p), split, s)
        })));
        out.push(tag(identity_check("codiv-split-pp", "J++(-w',-z') = J-+(w,z)", 2, strategy, IDENTITY_TOL, |_, w, z| {
            let (w, z) = (arr(w), arr(z));
            let s = codivergence_scale(w, z, p) + f64::MIN_POSITIVE;
            rel(codivergence_j_pp([-w[0], w[1]], [-z[0], z[1]], p), codivergence_j_mp(w, z, p), s)
        })));
    }
    out
}

/// Signed-power conventions: `0^⟨κ⟩ = 0`, `J_⟨κ⟩(0) = 0` (κ > 1), and the
/// Jacobian against central differences with step `10⁻⁶|z|` (tolerance 10⁻⁶
/// of `|z|^{κ−1}`).
pub fn check_signed_power_convention(kappa: f64, n: usize, strategy: &SampleStrategy) -> Result<VerificationReport> {
    if !(kappa > 1.0) {
        return Err(LabError::param("the Jacobian convention needs κ > 1"));
    }
    let zero = vec![0.0; n];
    let at_zero = signed_power(&zero, kappa)?.iter().all(|v| *v == 0.0)
        && signed_power_jacobian(&zero, kappa)?.iter().all(|v| *v == 0.0);
    let tol = 1e-6;
    let v = fold_samples(
        strategy,
        n,
        Violations::new,
        |acc, _, _, w, _| {
            let r = norm(w);
            if r == 0.0 {
                acc.push(0.0, tol, w, &[]);
                return;
            }
            let jac = signed_power_jacobian(w, kappa).expect("κ > 1 checked");
            let h = 1e-6 * r;
            let mut worst = 0.0f64;
            let mut plus = [0.0; 3];
            let mut minus = [0.0; 3];
            for j in 0..n {
                let mut a = w.to_vec();
                a[j] += h;
                signed_power_into(&a, kappa, &mut plus[..n]);
                a[j] -= 2.0 * h;
                signed_power_into(&a, kappa, &mut minus[..n]);
                for i in 0..n {
                    let fd = (plus[i] - minus[i]) / (2.0 * h);
                    worst = worst.max((fd - jac[(i, j)]).abs());
                }
            }
            acc.push(worst / r.powf(kappa - 1.0), tol, w, &[]);
        },
        Violations::merge,
    );
    let mut r = v.report("signed-power-convention", "zero convention and Jacobian", tol).param("kappa", kappa).param("n", n as f64);
    if !at_zero {
        r.pass = false;
        r.notes.push("0^<k> or J_<k>(0) is not exactly zero".into());
    }
    Ok(r)
}

/// The full pointwise suite: divergence identities for `n ∈ {1,2,3}` and
/// co-divergence identities on R².
pub fn check_pointwise_identities(p: Exponent, strategy: &SampleStrategy) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push(check_signed_power_convention(p.get(), n, strategy).expect("p > 1"));
    }
    for n in 1..=3 {
        out.extend(check_divergence_identities(p, n, strategy));
    }
    out.extend(check_codivergence_identities(p, strategy));
    out
}

/// Smallest normalized leading minor and determinant of the witness Hessian
/// on `count` log-radial points of `(0,∞)²`.
pub fn check_witness_hessian(p: f64, count: u64, seed: u64) -> Result<VerificationReport> {
    if p < 2.0 {
        return Err(LabError::param(format!("Hessian positivity is claimed for p ≥ 2, got {p}")));
    }
    let strategy = SampleStrategy::new(SampleMode::LogRadial, count, seed)?;
    let ext = fold_samples(
        &strategy,
        2,
        Extremes::new,
        |acc, _, _, w, _| {
            let z = [w[0].abs().max(1e-300), w[1].abs().max(1e-300)];
            let [h11, h12, h22] = witness_hessian(z, p);
            let s = norm(&z).powf(p - 2.0);
            let m = (h11 / s).min((h11 * h22 - h12 * h12) / (s * s));
            acc.push(m, &z, &[]);
        },
        Extremes::merge,
    );
    let mut r = VerificationReport::new("witness-hessian", "leading minor and determinant > 0")
        .param("p", p)
        .note("statistic: min over samples of min(H11/|z|^(p-2), det/|z|^(2p-4))");
    r.samples = ext.count;
    r.observed = ext.min;
    r.bound = 0.0;
    r.pass = ext.min > 0.0;
    r.witness = Some(ext.argmin);
    Ok(r)
}

/// Midpoint convexity of `Y^(+)`, `Y^(−)` on `[0,∞)×R` and `Y^(++)` on R².
pub fn check_midpoint_convexity(p: Exponent, count: u64, seed: u64) -> Result<VerificationReport> {
    let p = p.get();
    let strategy = SampleStrategy::new(SampleMode::Mixture, count, seed)?;
    let v = fold_samples(
        &strategy,
        2,
        Violations::new,
        |acc, _, i, a, b| {
            let (variant, a, b) = match i % 3 {
                0 => (YVariant::Plus, [a[0].abs(), a[1]], [b[0].abs(), b[1]]),
                1 => (YVariant::Minus, [a[0].abs(), a[1]], [b[0].abs(), b[1]]),
                _ => (YVariant::PlusPlus, arr(a), arr(b)),
            };
            let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let ya = convexity_witness_y(a, p, variant).expect("global variant");
            let yb = convexity_witness_y(b, p, variant).expect("global variant");
            let ym = convexity_witness_y(m, p, variant).expect("global variant");
            let gap = 0.5 * (ya + yb) - ym;
            let floor = rounding_floor(&a, &b, p);
            acc.push(if gap < 0.0 { -gap / floor } else { 0.0 }, 1.0, &a, &b);
        },
        Violations::merge,
    );
    Ok(v.report("witness-midpoint-convexity", "Y((a+b)/2) <= (Y(a)+Y(b))/2", 1.0).param("p", p))
}

/// Nonnegativity of the split sums and the `Y^(++)` subgradient inequality.
/// Every eighth sample puts `w` exactly on `{w1 = 0, w2 > 0}`.
pub fn check_convexity_suite(p: Exponent, strategy: &SampleStrategy) -> Result<Vec<VerificationReport>> {
    if p.get() <= 2.0 {
        return Err(LabError::param("the convexity suite needs p > 2"));
    }
    let p = p.get();
    let neg_ratio = |v: f64, floor: f64| if v < 0.0 { -v / floor } else { 0.0 };
    let on_axis = |i: u64, w: [f64; 2]| -> [f64; 2] {
        if i % 8 == 7 {
            [0.0, w[1].abs().max(1e-3)]
        } else {
            w
        }
    };
    let tag = |r: VerificationReport| r.param("p", p).param("n", 2.0);
    let mut out = Vec::new();

    let pp = fold_samples(
        strategy,
        2,
        Violations::new,
        |acc, _, i, w, z| {
            let w = on_axis(i, arr(w));
            let z = arr(z);
            let f = bregman_f_raw(&w, &z, p);
            let floor = rounding_floor(&w, &z, p);
            let e = neg_ratio(codivergence_j_pp(w, z, p) + f, floor).max(neg_ratio(codivergence_j_mp(w, z, p) + f, floor));
            acc.push(e, 1.0, &w, &z);
        },
        Violations::merge,
    );
    out.push(tag(pp.report("convexity-split-pp", "J++ + F >= 0 and J-+ + F >= 0 (global)", 1.0)));

    let pm = fold_samples(
        strategy,
        2,
        Violations::new,
        |acc, _, i, w, z| {
            let w = on_axis(i, [w[0].abs(), w[1]]);
            let z = [z[0].abs(), z[1]];
            let f = bregman_f_raw(&w, &z, p);
            let floor = rounding_floor(&w, &z, p);
            let e = neg_ratio(codivergence_j_plus(w, z, p) + f, floor).max(neg_ratio(codivergence_j_minus(w, z, p) + f, floor));
            acc.push(e, 1.0, &w, &z);
        },
        Violations::merge,
    );
    out.push(tag(pm.report("convexity-split-pm", "J+- + F >= 0 for w1, z1 >= 0", 1.0)));

    let sg = fold_samples(
        strategy,
        2,
        Violations::new,
        |acc, _, i, w, z| {
            let w = on_axis(i, arr(w));
            let z = arr(z);
            let y = |v: [f64; 2]| convexity_witness_y(v, p, YVariant::PlusPlus).expect("global variant");
            let d = subgradient_d(w, p).d;
            let gap = y(z) - y(w) - d[0] * (z[0] - w[0]) - d[1] * (z[1] - w[1]);
            acc.push(neg_ratio(gap, rounding_floor(&w, &z, p)), 1.0, &w, &z);
        },
        Violations::merge,
    );
    out.push(tag(sg.report("subgradient-ypp", "Y++(z) >= Y++(w) + d(w).(z-w)", 1.0).note("1/8 of samples on w1 = 0, w2 > 0")));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_vs_g_at_p2_is_exactly_one() {
        let s = SampleStrategy::mixture(20_000, 3);
        let e = estimate_comparability(ComparabilityPair::FvsG, Exponent::new(2.0).unwrap(), 2, &s).unwrap();
        assert!((e.lower - 1.0).abs() < 1e-12 && (e.upper - 1.0).abs() < 1e-12, "{e:?}");
    }

    #[test]
    fn abs_j_rejects_unproved_exponents() {
        let s = SampleStrategy::mixture(100, 1);
        let r = estimate_comparability(ComparabilityPair::AbsJvsG, Exponent::new(2.5).unwrap(), 2, &s);
        assert!(matches!(r, Err(LabError::Parameter(_))));
    }

    #[test]
    fn scan_rejects_excluded_exponents() {
        assert!(counterexample_scan(2.0, &[4]).is_err());
        assert!(counterexample_scan(3.0, &[4]).is_err());
        assert!(counterexample_scan(2.5, &[]).is_err());
    }

    #[test]
    fn reproducible_bit_for_bit() {
        let s = SampleStrategy::mixture(10_000, 99);
        let p = Exponent::new(3.0).unwrap();
        let a = estimate_comparability(ComparabilityPair::FvsHalfpower, p, 3, &s).unwrap();
        let b = estimate_comparability(ComparabilityPair::FvsHalfpower, p, 3, &s).unwrap();
        assert_eq!(a.lower.to_bits(), b.lower.to_bits());
        assert_eq!(a.upper.to_bits(), b.upper.to_bits());
    }

    #[test]
    fn mixture_contains_degenerate_cases() {
        let s = SampleStrategy::mixture(4096, 5);
        let zeros = fold_samples(&s, 2, || 0u64, |acc, _, _, w, z| {
            if w.iter().chain(z).any(|v| *v == 0.0) {
                *acc += 1;
            }
        }, |a, b| a + b);
        assert!(zeros > 100);
    }
}
