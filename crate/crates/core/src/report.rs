//! Report records and the registry of verified claims.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Outcome of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// An accuracy target was missed; neither a pass nor a counterexample.
    Inconclusive,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Outcome of a randomized or grid-based property campaign. Empirical
/// constants are observed values, never proved ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim_id: String,
    pub check: String,
    pub params: BTreeMap<String, f64>,
    pub samples: u64,
    /// Samples skipped because the reference quantity underflowed.
    pub skipped: u64,
    /// Observed statistic (worst violation, observed constant, ratio...).
    pub observed: f64,
    /// Bound the statistic is compared against.
    pub bound: f64,
    pub pass: bool,
    /// Worst-case input, recorded on failure or for extremal statistics.
    pub witness: Option<Vec<f64>>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(claim_id: &str, check: &str) -> Self {
        VerificationReport {
            claim_id: claim_id.to_string(),
            check: check.to_string(),
            params: BTreeMap::new(),
            samples: 0,
            skipped: 0,
            observed: 0.0,
            bound: 0.0,
            pass: false,
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

/// Contribution of one time band to the right side of a disintegration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeBand {
    pub t_lo: f64,
    pub t_hi: f64,
    pub value: f64,
}

/// Two-sided identity check; `pass ⇔ |lhs − rhs| ≤ tol·(|lhs| + floor)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub claim_id: String,
    pub check: String,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub floor: f64,
    /// Quadrature error estimate of the right side (refinement difference).
    pub error_estimate: f64,
    pub pass: bool,
    pub bands: Vec<TimeBand>,
    pub extras: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl IdentityReport {
    pub fn new(claim_id: &str, check: &str, lhs: f64, rhs: f64, tol: f64, floor: f64) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = abs_err / (lhs.abs() + floor);
        IdentityReport {
            claim_id: claim_id.to_string(),
            check: check.to_string(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol,
            floor,
            error_estimate: 0.0,
            pass: lhs.is_finite() && rhs.is_finite() && abs_err <= tol * (lhs.abs() + floor),
            bands: Vec::new(),
            extras: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    /// Adds a further requirement that must hold for the report to pass.
    pub fn require(mut self, what: &str, ok: bool) -> Self {
        if !ok {
            self.pass = false;
            self.notes.push(format!("requirement failed: {what}"));
        }
        self
    }
}

/// Flat record, one per check, as written to CSV summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub campaign: String,
    pub claim_id: String,
    pub check: String,
    pub inputs_digest: String,
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    pub d: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub verdict: Verdict,
    pub note: String,
}

pub const CSV_HEADER: &str = "claim_id,p,alpha,d,lhs,rhs,abs_err,rel_err,tol,pass";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

impl ReportRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{:e},{:e},{:e},{}",
            self.claim_id,
            opt(self.p),
            opt(self.alpha),
            opt(self.d),
            self.lhs,
            self.rhs,
            self.abs_err,
            self.rel_err,
            self.tol,
            self.verdict.as_str()
        )
    }

    pub fn from_identity(campaign: &str, r: &IdentityReport) -> Self {
        ReportRecord {
            campaign: campaign.to_string(),
            claim_id: r.claim_id.clone(),
            check: r.check.clone(),
            inputs_digest: digest_params(&r.params),
            p: r.params.get("p").copied(),
            alpha: r.params.get("alpha").copied(),
            d: r.params.get("d").copied(),
            lhs: r.lhs,
            rhs: r.rhs,
            abs_err: r.abs_err,
            rel_err: r.rel_err,
            tol: r.tol,
            verdict: Verdict::from_pass(r.pass),
            note: r.notes.join("; "),
        }
    }

    /// For property campaigns `lhs` is the observed statistic and `rhs` the bound.
    pub fn from_verification(campaign: &str, r: &VerificationReport) -> Self {
        let abs_err = (r.observed - r.bound).abs();
        ReportRecord {
            campaign: campaign.to_string(),
            claim_id: r.claim_id.clone(),
            check: r.check.clone(),
            inputs_digest: digest_params(&r.params),
            p: r.params.get("p").or_else(|| r.params.get("kappa")).copied(),
            alpha: r.params.get("alpha").copied(),
            d: r.params.get("d").or_else(|| r.params.get("n")).copied(),
            lhs: r.observed,
            rhs: r.bound,
            abs_err,
            rel_err: abs_err / (r.bound.abs() + f64::MIN_POSITIVE),
            tol: r.params.get("tol").copied().unwrap_or(0.0),
            verdict: Verdict::from_pass(r.pass),
            note: r.notes.join("; "),
        }
    }

    pub fn inconclusive(campaign: &str, claim_id: &str, check: &str, params: &BTreeMap<String, f64>, why: &str) -> Self {
        ReportRecord {
            campaign: campaign.to_string(),
            claim_id: claim_id.to_string(),
            check: check.to_string(),
            inputs_digest: digest_params(params),
            p: params.get("p").copied(),
            alpha: params.get("alpha").copied(),
            d: params.get("d").copied(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tol: params.get("tol").copied().unwrap_or(0.0),
            verdict: Verdict::Inconclusive,
            note: why.to_string(),
        }
    }
}

/// Short SHA-256 digest of the canonical (sorted) parameter list.
pub fn digest_params(params: &BTreeMap<String, f64>) -> String {
    let mut h = Sha256::new();
    for (k, v) in params {
        h.update(k.as_bytes());
        h.update(v.to_bits().to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

/// One entry of the claim registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub statement: &'static str,
    pub module: &'static str,
}

macro_rules! claims {
    ($( $id:literal, $module:literal, $stmt:literal; )*) => {
        &[ $( Claim { id: $id, module: $module, statement: $stmt }, )* ]
    };
}

/// Every implemented claim, keyed by a stable identifier.
pub const CLAIMS: &[Claim] = claims![
    "signed-power-convention", "bregman-core", "0^<k> = 0 and J_<k>(0) = 0; Jacobian matches finite differences";
    "bregman-nonneg", "bregman-core", "F_p >= 0 and H_p >= 0";
    "bregman-symmetrized", "bregman-core", "H_p(w,z) = (F_p(w,z) + F_p(z,w))/2";
    "bregman-rotation", "bregman-core", "F_p(Qw,Qz) = F_p(w,z) for orthogonal Q";
    "signed-remainder-antisymmetry", "bregman-core", "F_<k>(-w,-z) = -F_<k>(w,z)";
    "codiv-diagonal", "bregman-core", "J_p((a,a),(b,b)) = F_p(a,b)";
    "codiv-product-p2", "bregman-core", "J_2(w,z) = (z1-w1)(z2-w2)";
    "codiv-homogeneity", "bregman-core", "J_p((lw1,mw2),(lz1,mz2)) = l m^<p-1> J_p(w,z)";
    "codiv-split-pm", "bregman-core", "J_p = J_p^(+) - J_p^(-) and mirror identity J^(+)(w',z') = J^(-)(w,z)";
    "codiv-split-pp", "bregman-core", "J_p^(+) = J_p^(++) - J_p^(-+) and sign identity J^(++)(-w',-z') = J^(-+)(w,z)";
    "witness-hessian", "property-verifier", "Hessian of z1 z2^(p-1) + |z|^p is positive definite on (0,inf)^2";
    "witness-midpoint-convexity", "property-verifier", "Y^(+), Y^(-) midpoint convex on [0,inf)xR, Y^(++) on R^2";
    "convexity-split-pm", "property-verifier", "J_p^(+-) + F_p >= 0 when w1, z1 >= 0";
    "convexity-split-pp", "property-verifier", "J_p^(++) + F_p >= 0 and J_p^(-+) + F_p >= 0 on R^2";
    "subgradient-ypp", "property-verifier", "Y^(++)(z) >= Y^(++)(w) + d(w).(z-w) for all w, z";
    "comparability-f-g", "property-verifier", "F_p is comparable to G_p";
    "comparability-h-g", "property-verifier", "H_p is comparable to G_p";
    "comparability-halfpower", "property-verifier", "F_p is comparable to |z^<p/2> - w^<p/2>|^2";
    "lemma-A1-restpowers", "property-verifier", "Remainder and difference-of-powers bounds by |z-w|^l (|w| v |z|)^(k-l)";
    "codiv-domination", "property-verifier", "|J_p| <= c_p G_p for p = 2 and p >= 3";
    "codiv-counterexample", "property-verifier", "|J_p|/G_p is unbounded for p in (1,3) minus {2}";
    "levy-exponent", "semigroup-engine", "psi symmetric, psi(0) = 0, psi(xi)/log|xi| grows without bound";
    "levy-density", "semigroup-engine", "nu symmetric, integrates |z|^2 ^ 1, normalized by psi = int (1 - cos) nu";
    "kernel-normalization", "semigroup-engine", "int p_t = 1 (conservativeness)";
    "kernel-symmetry", "semigroup-engine", "p_t(x) = p_t(-x) >= 0 and sup p_t decreases to 0";
    "chapman-kolmogorov", "semigroup-engine", "p_s * p_t = p_(s+t) and P_s P_t f = P_(s+t) f";
    "condition-p1-p2", "semigroup-engine", "p_t/t <= c nu and p_t/t -> nu as t -> 0";
    "semigroup-mass", "semigroup-engine", "int P_t f = int f";
    "semigroup-decay", "semigroup-engine", "sup |P_t f| <= ||f||_p ||p_t||_inf^(1/p)";
    "generator-consistency", "semigroup-engine", "L P_t f equals the time derivative of P_t f; L = Laplacian for the Gaussian model";
    "stein-maximal", "semigroup-engine", "||sup_t |P_t f| ||_p <= p/(p-1) ||f||_p (grid necessary condition)";
    "form-parseval", "forms-hardy-stein", "E_2[u] = (2 pi)^-1 int psi |u^|^2";
    "form-sandwich", "forms-hardy-stein", "4(p-1)/p^2 E[u^<p/2>] <= E_p[u] <= 2 E[u^<p/2>]";
    "form-et-limit", "forms-hardy-stein", "E^(t)(u, u^<p-1>) -> E_p[u] as t -> 0";
    "pairing-single", "forms-hardy-stein", "E_p[u] = -<Lu, u^<p-1>>";
    "pairing-two-term", "forms-hardy-stein", "p E_p(u,v) = -<Lu, v^<p-1>> - <Lv, (p-1) u |v|^(p-2)>";
    "polarized-form", "forms-hardy-stein", "E_p(u,u) = E_p[u]; E_2(u,v) is the bilinear Dirichlet form; E_p(u,v) != E_p(v,u) in general";
    "hardy-stein", "forms-hardy-stein", "int |F|^p = int_0^inf int int F_p(P_t F(x), P_t F(y)) nu dx dy dt";
    "hardy-stein-disintegration", "forms-hardy-stein", "partial time integrals over [s,inf) equal int |P_s F|^p";
    "polarized-hardy-stein", "forms-hardy-stein", "int f g^<p-1> = int_0^inf int int J_p(P_t(f,g)(x), P_t(f,g)(y)) nu dx dy dt";
    "thm-polarized-bound", "forms-hardy-stein", "int int int |J_p| nu <= (1 + 2^(p/2)) ||f||_p ||g||_p^(p-1)";
    "time-derivative", "forms-hardy-stein", "d/dt int P_t f (P_t g)^<p-1> = -p E_p(P_t f, P_t g) = generator pairing";
    "gaussian-hs", "forms-hardy-stein", "int |f|^p = p(p-1) int_0^inf int |P_t f|^(p-2) |grad P_t f|^2 (Brownian motion, L = Laplacian)";
    "metafune-spina", "forms-hardy-stein", "-<Lap u, u^<p-1>> = (p-1) int |u|^(p-2) |grad u|^2";
];

pub fn find_claim(id: &str) -> Option<&'static Claim> {
    CLAIMS.iter().find(|c| c.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_required_ids_and_no_duplicates() {
        for id in ["lemma-A1-restpowers", "thm-polarized-bound", "gaussian-hs"] {
            assert!(find_claim(id).is_some(), "{id}");
        }
        let mut ids: Vec<_> = CLAIMS.iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CLAIMS.len());
    }

    #[test]
    fn identity_pass_rule() {
        let r = IdentityReport::new("hardy-stein", "x", 1.0, 1.005, 0.01, 0.0);
        assert!(r.pass);
        let r = IdentityReport::new("hardy-stein", "x", 1.0, 1.02, 0.01, 0.0);
        assert!(!r.pass);
        let r = IdentityReport::new("hardy-stein", "x", 0.0, 1e-9, 0.01, 1e-6);
        assert!(r.pass);
    }

    #[test]
    fn digest_is_order_independent_and_stable() {
        let mut a = BTreeMap::new();
        a.insert("p".to_string(), 2.5);
        a.insert("alpha".to_string(), 1.0);
        let mut b = BTreeMap::new();
        b.insert("alpha".to_string(), 1.0);
        b.insert("p".to_string(), 2.5);
        assert_eq!(digest_params(&a), digest_params(&b));
        assert_eq!(digest_params(&a).len(), 16);
    }
}
