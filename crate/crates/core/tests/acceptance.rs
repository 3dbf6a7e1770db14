//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test -p hslab-core --test acceptance`.

use std::f64::consts::PI;
use std::time::Instant;

use hslab_core::campaign::{execute_campaign, CampaignSpec};
use hslab_core::forms::{self, PolarizedPath, QuadratureConfig};
use hslab_core::semigroup::checks;
use hslab_core::verify::{self, ComparabilityPair, SampleMode, SampleStrategy};
use hslab_core::{Exponent, IdentityReport, SemigroupModel, TestFunctionSpec, VerificationReport};

type Outcome = Result<Vec<String>, String>;

struct Tally {
    failures: Vec<String>,
}

impl Tally {
    fn run(&mut self, n: u32, name: &str, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(details) => {
                println!("criterion {n:>2} PASS  {name}  [{secs:.1} s]");
                for d in details {
                    println!("        {d}");
                }
            }
            Err(why) => {
                println!("criterion {n:>2} FAIL  {name}  [{secs:.1} s]");
                println!("        {why}");
                self.failures.push(format!("{n}: {name}"));
            }
        }
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_verifications(rs: &[VerificationReport]) -> Result<(), String> {
    for r in rs {
        ensure(r.pass, || format!("{} / {} {:?}: observed {:e} vs bound {:e}; {:?}", r.claim_id, r.check, r.params, r.observed, r.bound, r.notes))?;
    }
    Ok(())
}

fn identity(r: &IdentityReport) -> Result<String, String> {
    let line = format!(
        "{} / {} {:?}: lhs {:.10e} rhs {:.10e} rel {:.2e} (tol {:.0e}, est {:.1e})",
        r.claim_id, r.check, r.params, r.lhs, r.rhs, r.rel_err, r.tol, r.error_estimate
    );
    ensure(r.pass, || format!("{line}; {:?}", r.notes))?;
    Ok(line)
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<String, String> {
    let rel = (got - want).abs() / want.abs();
    let line = format!("{what}: {got:.10e} vs oracle {want:.10e} (rel {rel:.2e}, tol {tol:.0e})");
    ensure(rel <= tol, || line.clone())?;
    Ok(line)
}

fn e(err: hslab_core::LabError) -> String {
    err.to_string()
}

fn cauchy() -> SemigroupModel {
    SemigroupModel::stable(1.0, 1).unwrap()
}

/// `∫ a e^{−(x−c1)²/2s1²} (b e^{−(x−c2)²/2s2²})^{q} dx`.
fn gaussian_product_integral(a: f64, c1: f64, s1: f64, b: f64, c2: f64, s2: f64, q: f64) -> f64 {
    let tau2 = s2 * s2 / q;
    let s12 = s1 * s1;
    a * b.powf(q) * (2.0 * PI * s12 * tau2 / (s12 + tau2)).sqrt() * (-(c1 - c2).powi(2) / (2.0 * (s12 + tau2))).exp()
}

fn criterion_pointwise() -> Outcome {
    let strategy = SampleStrategy::new(SampleMode::Mixture, 1_000_000, 2024).map_err(e)?;
    let mut details = Vec::new();
    for p in [1.5, 3.0] {
        let rs = verify::check_pointwise_identities(Exponent::new(p).map_err(e)?, &strategy);
        all_verifications(&rs)?;
        let exact: Vec<&VerificationReport> = rs.iter().filter(|r| r.bound == 1e-12).collect();
        let worst = exact.iter().map(|r| r.observed).fold(0.0, f64::max);
        details.push(format!(
            "p = {p}: {} checks x 1e6 samples clean; worst deviation of the {} exact identities {worst:.2e} (tol 1e-12)",
            rs.len(),
            exact.len()
        ));
    }
    Ok(details)
}

fn criterion_inequalities() -> Outcome {
    let strategy = SampleStrategy::new(SampleMode::LogRadial, 100_000, 77).map_err(e)?;
    let degenerate = SampleStrategy::new(SampleMode::AxisDegenerate, 20_000, 78).map_err(e)?;
    let mut details = Vec::new();
    for s in [&strategy, &degenerate] {
        for kappa in [1.5, 3.0] {
            for lambda in [0.0, 0.5, 1.0, 2.0] {
                all_verifications(&verify::check_lemma_a1(kappa, lambda, 2, s).map_err(e)?)?;
            }
        }
        for p in [1.5, 2.0, 3.0, 4.0] {
            let ex = Exponent::new(p).map_err(e)?;
            for pair in [ComparabilityPair::FvsG, ComparabilityPair::HvsG, ComparabilityPair::FvsHalfpower] {
                let est = verify::estimate_comparability(pair, ex, 2, s).map_err(e)?;
                all_verifications(&[verify::comparability_report(&est)])?;
                if s.mode == SampleMode::LogRadial {
                    details.push(format!("{} p = {p}: observed [{:.4}, {:.4}]", pair.name(), est.lower, est.upper));
                }
            }
        }
        for p in [2.0, 3.0, 4.0] {
            let est = verify::estimate_comparability(ComparabilityPair::AbsJvsG, Exponent::new(p).map_err(e)?, 2, s).map_err(e)?;
            all_verifications(&[verify::comparability_report(&est)])?;
            if s.mode == SampleMode::LogRadial {
                details.push(format!("absJ_vs_G p = {p}: observed upper {:.4}", est.upper));
            }
        }
    }
    let est = verify::estimate_comparability(ComparabilityPair::FvsG, Exponent::new(2.0).map_err(e)?, 3, &strategy).map_err(e)?;
    ensure(est.lower == 1.0 && est.upper == 1.0, || format!("F_2/G_2 not identically 1: [{}, {}]", est.lower, est.upper))?;
    details.push("F_2/G_2 = 1 exactly on every sample".into());
    Ok(details)
}

fn criterion_counterexample() -> Outcome {
    let rows = verify::counterexample_scan(2.5, &[4, 8, 16, 32]).map_err(e)?;
    let mut details = Vec::new();
    for r in &rows {
        ensure(r.rel_err <= 1e-10, || format!("k = {}: rel err {:e}", r.k, r.rel_err))?;
        details.push(format!("k = {:>2}: ratio {:.12e}, closed form rel err {:.1e}", r.k, r.ratio, r.rel_err));
    }
    for w in rows.windows(2) {
        let growth = w[1].ratio / w[0].ratio;
        ensure(growth > 1.0, || format!("not increasing between k = {} and {}", w[0].k, w[1].k))?;
        details.push(format!("growth {} -> {}: {growth:.4} (sqrt 2 = {:.4})", w[0].k, w[1].k, 2f64.sqrt()));
    }
    let last = rows[3].ratio / rows[2].ratio;
    ensure((last / 2f64.sqrt() - 1.0).abs() < 0.02, || format!("last doubling grows by {last}, not about sqrt 2"))?;
    Ok(details)
}

fn criterion_convexity() -> Outcome {
    let strategy = SampleStrategy::new(SampleMode::Mixture, 1_000_000, 99).map_err(e)?;
    let mut details = Vec::new();
    for p in [2.5, 3.0, 4.0] {
        let h = verify::check_witness_hessian(p, 100_000, 5).map_err(e)?;
        all_verifications(&[h.clone()])?;
        let suite = verify::check_convexity_suite(Exponent::new(p).map_err(e)?, &strategy).map_err(e)?;
        all_verifications(&suite)?;
        details.push(format!("p = {p}: min normalized Hessian minor {:.3e}; {} split/subgradient checks x 1e6 pairs clean", h.observed, suite.len()));
    }
    Ok(details)
}

fn criterion_semigroup() -> Outcome {
    let mut details = Vec::new();
    let mut models = vec![SemigroupModel::gaussian(1).unwrap(), SemigroupModel::gaussian(2).unwrap()];
    for alpha in [0.5, 1.0, 1.5] {
        for d in [1, 2] {
            models.push(SemigroupModel::stable(alpha, d).unwrap());
        }
    }
    let mut worst = 0.0f64;
    for m in &models {
        for t in [0.01, 1.0] {
            let r = checks::check_normalization(m, t).map_err(e)?;
            identity(&r)?;
            worst = worst.max(r.abs_err);
        }
    }
    details.push(format!("int p_t = 1 on {} models x 2 times, worst |err| {worst:.2e} (tol 1e-6)", models.len()));
    for m in [cauchy(), SemigroupModel::stable(1.5, 1).unwrap(), SemigroupModel::gaussian(1).unwrap()] {
        details.push(identity(&checks::check_chapman_kolmogorov(&m, 0.3, 0.7, 0.9).map_err(e)?)?);
    }
    let p2 = checks::check_p1_p2(&cauchy(), &[1e-3, 0.1, 1.0, 10.0], &[0.5, 1.0, 2.0, 4.0]).map_err(e)?;
    all_verifications(&[p2.clone()])?;
    details.push(format!("p_t/(t nu) at t = 1e-3, |x| >= 0.5: worst |ratio - 1| = {:.2e} (tol 1e-2)", p2.observed));
    let f = TestFunctionSpec::bump(vec![0.3], 0.7, 1.0);
    let stein = checks::stein_maximal_probe(&cauchy(), &f, &[0.0, 0.01, 0.1, 1.0, 10.0], 2.0).map_err(e)?;
    all_verifications(&[stein.clone()])?;
    details.push(format!("Stein probe: ||sup_t|P_t f| ||_2 / ||f||_2 = {:.4} <= 2", stein.observed));
    Ok(details)
}

fn criterion_hardy_stein_p2() -> Outcome {
    let (a, s) = (1.2, 0.8);
    let f = TestFunctionSpec::bump(vec![0.25], s, a);
    let parseval = a * a * s * PI.sqrt();
    let out = forms::verify_hardy_stein(std::slice::from_ref(&f), 2.0, &cauchy(), &QuadratureConfig::default()).map_err(e)?;
    let mut details = vec![identity(&out.identity)?];
    details.push(close("lhs vs Parseval value", out.identity.lhs, parseval, 0.01)?);
    details.push(close("rhs vs Parseval value", out.identity.rhs, parseval, 0.01)?);
    all_verifications(&[out.disintegration.clone()])?;
    details.push(format!("disintegration at {} time nodes: worst deviation {:.2e} of the lhs", out.disintegration.samples, out.disintegration.observed));
    Ok(details)
}

fn criterion_hardy_stein_p3_polarized() -> Outcome {
    let model = cauchy();
    let cfg = QuadratureConfig::default();
    let (c1, s1, a) = (-0.4, 0.8, 1.0);
    let (c2, s2, b) = (0.6, 1.0, 0.9);
    let f = TestFunctionSpec::bump(vec![c1], s1, a);
    let g = TestFunctionSpec::bump(vec![c2], s2, b);
    let mut details = Vec::new();
    let hs = forms::verify_hardy_stein(&[f.clone(), g.clone()], 3.0, &model, &cfg).map_err(e)?;
    details.push(identity(&hs.identity)?);
    all_verifications(&[hs.disintegration])?;
    let mut runs = vec![(2.0, PolarizedPath::Direct), (2.5, PolarizedPath::Split), (3.0, PolarizedPath::Direct)];
    runs.push((3.0, PolarizedPath::Split));
    let mut at3 = Vec::new();
    for (p, path) in runs {
        let out = forms::verify_polarized_hardy_stein(&f, &g, p, &model, &cfg, path).map_err(e)?;
        let oracle = gaussian_product_integral(a, c1, s1, b, c2, s2, p - 1.0);
        details.push(format!("{path:?}: {}", identity(&out.identity)?));
        details.push(close(&format!("p = {p} lhs vs Gaussian closed form"), out.identity.lhs, oracle, 1e-6)?);
        all_verifications(&[out.bound.clone()])?;
        details.push(format!("p = {p}: absolute-integral ratio {:.4} < 1", out.bound.observed));
        if p == 3.0 {
            at3.push(out.identity.rhs);
        }
    }
    details.push(close("p = 3 split route vs direct route", at3[1], at3[0], 1e-3)?);
    Ok(details)
}

fn criterion_pairings() -> Outcome {
    let model = cauchy();
    let cfg = QuadratureConfig::default();
    let u = TestFunctionSpec::band_limited(0.0, 2.0, 1.0, 1.0);
    let v = TestFunctionSpec::band_limited(0.4, 1.5, 0.0, 0.8);
    let mut details = Vec::new();
    for p in [2.5, 3.0] {
        details.push(identity(&forms::check_pairing_single(&u, p, &model, &cfg, 1e-3).map_err(e)?)?);
        details.push(identity(&forms::check_pairing_two_term(&u, &v, p, &model, &cfg, 1e-3).map_err(e)?)?);
        details.push(identity(&forms::check_et_limit(&u, p, &model, &cfg, &[0.2, 0.1, 0.05, 0.025], 5e-3).map_err(e)?)?);
    }
    Ok(details)
}

fn criterion_gaussian_hs() -> Outcome {
    let (a, s) = (1.1, 0.7);
    let f = TestFunctionSpec::bump(vec![0.2], s, a);
    let mut cfg = QuadratureConfig { tol: 5e-3, ..QuadratureConfig::default() };
    cfg.t_max = 1e10;
    let mut details = Vec::new();
    for p in [2.0, 4.0] {
        let out = forms::verify_gaussian_hardy_stein(&f, p, &cfg, 0.5).map_err(e)?;
        details.push(identity(&out.identity)?);
        details.push(close(&format!("p = {p} lhs vs closed form"), out.identity.lhs, a.powf(p) * s * (2.0 * PI / p).sqrt(), 1e-9)?);
        details.push(identity(&out.metafune_spina)?);
    }
    Ok(details)
}

fn criterion_time_derivative() -> Outcome {
    let f = TestFunctionSpec::bump(vec![-0.4], 0.8, 1.0);
    let g = TestFunctionSpec::bump(vec![0.6], 1.0, 0.9);
    let r = forms::verify_time_derivative(&f, &g, 3.0, &cauchy(), 0.5, 0.05, &QuadratureConfig::default()).map_err(e)?;
    let mut details = vec![identity(&r)?];
    details.push(format!(
        "error ratios under step halving: {:.3}, {:.3} (second order: 4); -p E_p = {:.10e}",
        r.extras["err_ratio_1"], r.extras["err_ratio_2"], r.extras["minus_p_form"]
    ));
    Ok(details)
}

fn campaigns() -> Vec<CampaignSpec> {
    let text = r#"
[[campaign]]
kind = "pointwise"
p = [2.5]
samples = 20000

[[campaign]]
kind = "inequalities"
p = [3.0]
samples = 20000
dims = [2]

[[campaign]]
kind = "counterexample"
p = [2.5]
k = [4, 8, 16, 32]

[[campaign]]
kind = "semigroup-checks"
model = { kind = "stable", alpha = 1.5 }
functions = [{ family = "gaussian-bump", center = [0.0], width = 1.0 }]

[[campaign]]
kind = "hardy-stein"
p = [2.0]
model = { kind = "stable", alpha = 1.5 }
functions = [{ family = "gaussian-bump", center = [0.0], width = 1.0 }]
"#;
    let cfg: hslab_core::RunConfig = toml::from_str(text).unwrap();
    cfg.campaign
}

fn serialize_all(seed: u64) -> Result<Vec<String>, String> {
    let q = QuadratureConfig::default();
    campaigns()
        .iter()
        .map(|c| {
            let out = execute_campaign(c, seed, &q).map_err(e)?;
            serde_json::to_string(&out.reports).map_err(|x| x.to_string())
        })
        .collect()
}

fn criterion_determinism() -> Outcome {
    let first = serialize_all(17)?;
    let second = serialize_all(17)?;
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|x| x.to_string())?.install(|| serialize_all(17))?;
    let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().map_err(|x| x.to_string())?.install(|| serialize_all(17))?;
    for (i, body) in first.iter().enumerate() {
        ensure(body == &second[i], || format!("campaign {i} differs between reruns"))?;
        ensure(body == &single[i], || format!("campaign {i} differs on one thread"))?;
        ensure(body == &wide[i], || format!("campaign {i} differs on four threads"))?;
    }
    let other = serialize_all(18)?;
    ensure(other[0] != first[0] || other[1] != first[1], || "the seed has no effect".into())?;
    Ok(vec![format!("{} campaigns byte-identical across reruns and 1/4/default worker threads", first.len())])
}

fn main() {
    let mut tally = Tally { failures: Vec::new() };
    tally.run(1, "pointwise identities, 1e6 samples, 1e-12 relative", criterion_pointwise);
    tally.run(2, "inequalities: rest powers, comparability, |J| <= c G; F_2/G_2 = 1", criterion_inequalities);
    tally.run(3, "counterexample scan p = 2.5: closed form to 1e-10, growth ~ sqrt 2", criterion_counterexample);
    tally.run(4, "convexity: Hessian minors, split sums, subgradient", criterion_convexity);
    tally.run(5, "semigroup: mass 1, Chapman-Kolmogorov, small-time ratio, Stein probe", criterion_semigroup);
    tally.run(6, "Hardy-Stein p = 2 against the Parseval value (1%), disintegration", criterion_hardy_stein_p2);
    tally.run(7, "Hardy-Stein p = 3 (n = 2) and polarized p in {2, 2.5, 3} (1%), bound ratio < 1", criterion_hardy_stein_p3_polarized);
    tally.run(8, "generator pairings (0.1%) and small-time limit (0.5%)", criterion_pairings);
    tally.run(9, "Brownian Hardy-Stein p in {2, 4} (0.5%), fixed-time identity (0.1%)", criterion_gaussian_hs);
    tally.run(10, "time derivative: second order, three-way agreement to 1e-3", criterion_time_derivative);
    tally.run(11, "determinism: byte-identical reports", criterion_determinism);
    if tally.failures.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: {} criteria fail: {}", tally.failures.len(), tally.failures.join(", "));
        std::process::exit(1);
    }
}
