//! Closed-form elementary functions: signed powers, the Bregman divergence
//! `F_p` and its relatives, the co-divergence `J_p` and its convex splittings.
//!
//! Hot-path functions take plain slices/arrays and an `f64` exponent; the
//! typed wrappers ([`Exponent`], [`BregmanPoint`], [`CoDivArgs`]) validate
//! their invariants once at construction.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Relative size of the rounding floor below which negative divergences are
/// treated as zero.
pub const ROUNDING_FLOOR: f64 = 1e-12;

/// Exponent `p > 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Exponent(f64);

impl Exponent {
    /// Any `p > 1` (divergence operations).
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 {
            Ok(Exponent(p))
        } else {
            Err(LabError::param(format!("exponent must satisfy p > 1, got {p}")))
        }
    }

    /// `p ≥ 2` (co-divergence operations).
    pub fn for_codivergence(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 2.0 {
            Ok(Exponent(p))
        } else {
            Err(LabError::param(format!("co-divergence needs p ≥ 2, got {p}")))
        }
    }

    /// `p > 2` (splittings `J^(±)`, `J^(±±)`, subgradient).
    pub fn for_splitting(p: f64) -> Result<Self> {
        if p.is_finite() && p > 2.0 {
            Ok(Exponent(p))
        } else {
            Err(LabError::param(format!("splittings need p > 2, got {p}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Heaviside step with the mandatory convention `1(0) = 1/2`.
#[inline]
pub fn heaviside(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else if a < 0.0 {
        0.0
    } else {
        0.5
    }
}

#[inline]
fn pos(a: f64) -> f64 {
    a.max(0.0)
}

#[inline]
fn neg(a: f64) -> f64 {
    (-a).max(0.0)
}

/// `a^e` for `a ≥ 0` with `0^e = 0` for every `e` (including `e ≤ 0`, where it
/// only ever multiplies a vanishing factor).
#[inline]
fn pow0(a: f64, e: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a.powf(e)
    }
}

/// Scalar signed power `a^⟨κ⟩ = |a|^κ sign(a)`, with `0^⟨κ⟩ = 0`.
#[inline]
pub fn spow(a: f64, kappa: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a.abs().powf(kappa).copysign(a)
    }
}

#[inline]
pub fn norm(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_kappa(kappa: f64, min: f64) -> Result<()> {
    if kappa.is_finite() && kappa > min {
        Ok(())
    } else {
        Err(LabError::param(format!("κ must exceed {min}, got {kappa}")))
    }
}

/// Vector signed power `z^⟨κ⟩ = |z|^{κ−1} z`, zero at `z = 0`.
pub fn signed_power(z: &[f64], kappa: f64) -> Result<Vec<f64>> {
    check_kappa(kappa, 0.0)?;
    let mut out = z.to_vec();
    signed_power_into(z, kappa, &mut out);
    Ok(out)
}

/// Allocation-free signed power; `kappa > 0` is the caller's responsibility.
#[inline]
pub fn signed_power_into(z: &[f64], kappa: f64, out: &mut [f64]) {
    let r = norm(z);
    if r == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let s = r.powf(kappa - 1.0);
    for (o, v) in out.iter_mut().zip(z) {
        *o = s * v;
    }
}

/// Jacobi matrix of `z ↦ z^⟨κ⟩`: `|z|^{κ−1}((κ−1) ẑ⊗ẑ + Id)`, zero at `z = 0`.
pub fn signed_power_jacobian(z: &[f64], kappa: f64) -> Result<DMatrix<f64>> {
    check_kappa(kappa, 1.0)?;
    let n = z.len();
    let r = norm(z);
    if r == 0.0 {
        return Ok(DMatrix::zeros(n, n));
    }
    let s = r.powf(kappa - 1.0);
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let outer = (kappa - 1.0) * z[i] * z[j] / (r * r);
        s * (outer + if i == j { 1.0 } else { 0.0 })
    }))
}

/// Rounding floor `1e-12·(1 + |z|^p + |w|^p)`.
#[inline]
pub fn rounding_floor(w: &[f64], z: &[f64], p: f64) -> f64 {
    ROUNDING_FLOOR * (1.0 + norm(z).powf(p) + norm(w).powf(p))
}

#[inline]
fn clamp_floor(v: f64, floor: f64) -> f64 {
    if v < 0.0 && v >= -floor {
        0.0
    } else {
        v
    }
}

/// `(1+v)^e − 1 − e·v` for `v > −1`, without cancellation near `v = 0`.
#[inline]
pub fn pow_remainder(v: f64, e: f64) -> f64 {
    if v.abs() < 0.25 {
        // Σ_{k≥2} C(e,k) v^k
        let mut c = e * (e - 1.0) / 2.0;
        let mut vk = v * v;
        let mut acc = 0.0;
        for k in 2..40 {
            let term = c * vk;
            acc += term;
            if term.abs() <= 1e-18 * acc.abs() {
                break;
            }
            let kf = k as f64;
            c *= (e - kf) / (kf + 1.0);
            vk *= v;
        }
        acc
    } else {
        (1.0 + v).powf(e) - 1.0 - e * v
    }
}

/// `(1+v)^e − 1` for `v > −1`, without cancellation near `v = 0`.
#[inline]
fn pow_diff(v: f64, e: f64) -> f64 {
    (e * v.ln_1p()).exp_m1()
}

/// Unclamped `F_p(w,z) = |z|^p − |w|^p − p w^⟨p−1⟩·(z−w)`, evaluated as
/// `|w|^p [φ(u) + (p/2)|d|²/|w|²]` with `d = z − w`, `u = (|z|² − |w|²)/|w|²`
/// and `φ(u) = (1+u)^{p/2} − 1 − (p/2)u`, which keeps full relative accuracy
/// near the diagonal (and is exact at `p = 2`).
#[inline]
pub fn bregman_f_raw(w: &[f64], z: &[f64], p: f64) -> f64 {
    let a2: f64 = w.iter().map(|v| v * v).sum();
    let d2: f64 = w.iter().zip(z).map(|(a, b)| (b - a) * (b - a)).sum();
    if p == 2.0 {
        return d2;
    }
    if a2 == 0.0 {
        return pow0(norm(z), p);
    }
    let wd: f64 = w.iter().zip(z).map(|(a, b)| a * (b - a)).sum();
    let b2: f64 = z.iter().map(|v| v * v).sum();
    if b2 > 4.0 * a2 || b2 < 0.25 * a2 {
        // away from the sphere |z| = |w| the direct form has no cancellation
        return pow0(b2.sqrt(), p) - a2.powf(0.5 * p) - p * a2.powf(0.5 * p - 1.0) * wd;
    }
    let q = d2 / a2;
    let u = (2.0 * wd / a2 + q).max(-1.0);
    a2.powf(0.5 * p) * (pow_remainder(u, 0.5 * p) + 0.5 * p * q)
}

/// Bregman divergence `F_p(w,z)`; tiny negative rounding values are clamped
/// to 0, genuine violations are returned unchanged.
#[inline]
pub fn bregman_f(w: &[f64], z: &[f64], p: f64) -> f64 {
    clamp_floor(bregman_f_raw(w, z, p), rounding_floor(w, z, p))
}

/// Symmetrized divergence `H_p = (p/2)(z−w)·(z^⟨p−1⟩ − w^⟨p−1⟩)`, evaluated
/// as `(p/2)[|z|^{p−2}|d|² + (|z|^{p−2} − |w|^{p−2}) w·d]` with the power
/// difference formed without cancellation.
#[inline]
pub fn bregman_h(w: &[f64], z: &[f64], p: f64) -> f64 {
    let a2: f64 = w.iter().map(|v| v * v).sum();
    let d2: f64 = w.iter().zip(z).map(|(a, b)| (b - a) * (b - a)).sum();
    if p != 2.0 && a2 > 0.0 {
        let b2: f64 = z.iter().map(|v| v * v).sum();
        if b2 > 4.0 * a2 || b2 < 0.25 * a2 {
            // away from the sphere |z| = |w| the direct product has no cancellation
            let (nw, nz) = (a2.sqrt(), b2.sqrt());
            let (cw, cz) = (pow0(nw, p - 2.0), pow0(nz, p - 2.0));
            let v: f64 = w.iter().zip(z).map(|(a, b)| (b - a) * (cz * b - cw * a)).sum();
            return clamp_floor(0.5 * p * v, rounding_floor(w, z, p));
        }
        if a2.max(b2) < 1e-200 {
            // degree-p homogeneity keeps the ratios representable
            let s = a2.max(b2).sqrt();
            let ws: Vec<f64> = w.iter().map(|v| v / s).collect();
            let zs: Vec<f64> = z.iter().map(|v| v / s).collect();
            return bregman_h(&ws, &zs, p) * s.powf(p);
        }
    }
    let v = if p == 2.0 {
        d2
    } else if a2 == 0.0 {
        0.5 * p * pow0(norm(z), p)
    } else {
        let b2: f64 = z.iter().map(|v| v * v).sum();
        if b2 == 0.0 {
            return 0.5 * p * a2.powf(0.5 * p);
        }
        let wd: f64 = w.iter().zip(z).map(|(a, b)| a * (b - a)).sum();
        let u = (2.0 * wd / a2 + d2 / a2).max(-1.0);
        let first = pow0(b2, 0.5 * (p - 2.0)) * d2;
        let second = a2.powf(0.5 * (p - 2.0)) * pow_diff(u, 0.5 * (p - 2.0)) * wd;
        0.5 * p * (first + second)
    };
    clamp_floor(v, rounding_floor(w, z, p))
}

/// Comparison function `G_p = |z−w|²(|w|∨|z|)^{p−2}`; 0 when `w = z = 0`.
#[inline]
pub fn comparison_g(w: &[f64], z: &[f64], p: f64) -> f64 {
    let m = norm(w).max(norm(z));
    if m == 0.0 {
        return 0.0;
    }
    let d2: f64 = w.iter().zip(z).map(|(a, b)| (b - a) * (b - a)).sum();
    d2 * m.powf(p - 2.0)
}

/// Vector Taylor remainder `F_⟨κ⟩(w,z) = z^⟨κ⟩ − w^⟨κ⟩ − J_⟨κ⟩(w)(z−w)`.
pub fn remainder_f_signed(w: &[f64], z: &[f64], kappa: f64) -> Result<Vec<f64>> {
    check_kappa(kappa, 1.0)?;
    if w.len() != z.len() {
        return Err(LabError::param("w and z must have equal dimension"));
    }
    let zk = signed_power(z, kappa)?;
    let wk = signed_power(w, kappa)?;
    let rw = norm(w);
    let mut out: Vec<f64> = zk.iter().zip(&wk).map(|(a, b)| a - b).collect();
    if rw > 0.0 {
        let s = rw.powf(kappa - 1.0);
        let d: Vec<f64> = z.iter().zip(w).map(|(a, b)| a - b).collect();
        let proj = (kappa - 1.0) * dot(w, &d) / (rw * rw);
        for i in 0..out.len() {
            out[i] -= s * (proj * w[i] + d[i]);
        }
    }
    Ok(out)
}

/// A pair `(w, z)` of finite points of equal dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BregmanPoint {
    pub w: Vec<f64>,
    pub z: Vec<f64>,
}

impl BregmanPoint {
    pub fn new(w: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if w.is_empty() || w.len() != z.len() {
            return Err(LabError::param("w and z must be nonempty with equal dimension"));
        }
        if w.iter().chain(&z).any(|v| !v.is_finite()) {
            return Err(LabError::param("coordinates must be finite"));
        }
        Ok(BregmanPoint { w, z })
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn f(&self, p: Exponent) -> f64 {
        bregman_f(&self.w, &self.z, p.get())
    }

    pub fn h(&self, p: Exponent) -> f64 {
        bregman_h(&self.w, &self.z, p.get())
    }

    pub fn g(&self, p: Exponent) -> f64 {
        comparison_g(&self.w, &self.z, p.get())
    }
}

/// Arguments of the co-divergence: first coordinates play the "f" role,
/// second coordinates the "g" role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoDivArgs {
    pub w: [f64; 2],
    pub z: [f64; 2],
}

impl CoDivArgs {
    pub fn new(w: [f64; 2], z: [f64; 2]) -> Result<Self> {
        if w.iter().chain(&z).any(|v| !v.is_finite()) {
            return Err(LabError::param("coordinates must be finite"));
        }
        Ok(CoDivArgs { w, z })
    }

    /// `(w1, −w2), (z1, −z2)`.
    pub fn mirrored(&self) -> Self {
        CoDivArgs {
            w: [self.w[0], -self.w[1]],
            z: [self.z[0], -self.z[1]],
        }
    }

    pub fn swapped(&self) -> Self {
        CoDivArgs { w: self.z, z: self.w }
    }

    pub fn j(&self, p: Exponent) -> f64 {
        codivergence_j(self.w, self.z, p.get())
    }

    pub fn f(&self, p: Exponent) -> f64 {
        bregman_f(&self.w, &self.z, p.get())
    }
}

/// Co-divergence `J_p(w,z)`: Taylor remainder of `z1·z2^⟨p−1⟩`. Defined for
/// any `p > 1` with `w2 ≠ 0` or `p ≥ 2`; the theory uses `p ≥ 2`.
///
/// Evaluated as `(z1−w1)(z2^⟨p−1⟩ − w2^⟨p−1⟩) + w1·r(w2,z2)`, where `r` is the
/// scalar remainder of `a ↦ a^⟨p−1⟩`, so that it stays accurate near the
/// diagonal (exact product form at `p = 2`).
#[inline]
pub fn codivergence_j(w: [f64; 2], z: [f64; 2], p: f64) -> f64 {
    let [w1, w2] = w;
    let [z1, z2] = z;
    let k = p - 1.0;
    // the ratio form breaks down only when (z2−w2)/w2 overflows
    let (delta, r) = if w2 != 0.0 && z2 / w2 > 0.0 && z2 / w2 < 1e100 {
        let v = (z2 - w2) / w2;
        let base = spow(w2, k);
        (base * pow_diff(v, k), base * pow_remainder(v, k))
    } else {
        let delta = spow(z2, k) - spow(w2, k);
        // slope of a^⟨k⟩ at w2; at w2 = 0 it is 1 for k = 1 and 0 for k > 1
        let slope = if k == 1.0 { 1.0 } else { k * pow0(w2.abs(), k - 1.0) };
        (delta, delta - slope * (z2 - w2))
    };
    (z1 - w1) * delta + w1 * r
}

/// `J_p^(+)`: Taylor remainder of `z1·((z2)_+)^{p−1}`.
#[inline]
pub fn codivergence_j_plus(w: [f64; 2], z: [f64; 2], p: f64) -> f64 {
    let [w1, w2] = w;
    let [z1, z2] = z;
    let a = pow0(pos(w2), p - 1.0);
    z1 * pow0(pos(z2), p - 1.0) - w1 * a - a * (z1 - w1) - (p - 1.0) * w1 * pow0(pos(w2), p - 2.0) * (z2 - w2)
}

/// `J_p^(−)`: Taylor remainder of `z1·((z2)_−)^{p−1}`.
#[inline]
pub fn codivergence_j_minus(w: [f64; 2], z: [f64; 2], p: f64) -> f64 {
    let [w1, w2] = w;
    let [z1, z2] = z;
    let a = pow0(neg(w2), p - 1.0);
    z1 * pow0(neg(z2), p - 1.0) - w1 * a - a * (z1 - w1) + (p - 1.0) * w1 * pow0(neg(w2), p - 2.0) * (z2 - w2)
}

/// `J_p^(++)`: quasi-remainder of `(z1)_+((z2)_+)^{p−1}` with `1(0) = 1/2`.
#[inline]
pub fn codivergence_j_pp(w: [f64; 2], z: [f64; 2], p: f64) -> f64 {
    let [w1, w2] = w;
    let [z1, z2] = z;
    let a = pow0(pos(w2), p - 1.0);
    pos(z1) * pow0(pos(z2), p - 1.0)
        - pos(w1) * a
        - heaviside(w1) * a * (z1 - w1)
        - (p - 1.0) * pos(w1) * pow0(pos(w2), p - 2.0) * (z2 - w2)
}

/// `J_p^(−+)`: quasi-remainder of `(z1)_−((z2)_+)^{p−1}` with `1(0) = 1/2`.
#[inline]
pub fn codivergence_j_mp(w: [f64; 2], z: [f64; 2], p: f64) -> f64 {
    let [w1, w2] = w;
    let [z1, z2] = z;
    let a = pow0(pos(w2), p - 1.0);
    neg(z1) * pow0(pos(z2), p - 1.0) - neg(w1) * a + heaviside(-w1) * a * (z1 - w1)
        - (p - 1.0) * neg(w1) * pow0(pos(w2), p - 2.0) * (z2 - w2)
}

/// Natural magnitude of the terms entering `J_p(w,z)`:
/// `(|w1|∨|z1|)(|w2|∨|z2|)^{p−1}`; used to normalize rounding errors.
#[inline]
pub fn codivergence_scale(w: [f64; 2], z: [f64; 2], p: f64) -> f64 {
    w[0].abs().max(z[0].abs()) * pow0(w[1].abs().max(z[1].abs()), p - 1.0)
}

/// Which convexity witness `Y` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YVariant {
    /// `z1 z2^{p−1} + |z|^p` on the closed quadrant.
    Plain,
    /// `z1 ((z2)_+)^{p−1} + |z|^p`.
    Plus,
    /// `z1 ((z2)_−)^{p−1} + |z|^p`.
    Minus,
    /// `(z1)_+ ((z2)_+)^{p−1} + |z|^p`.
    PlusPlus,
}

/// Convexity witness `Y(z)` for the selected variant.
pub fn convexity_witness_y(z: [f64; 2], p: f64, variant: YVariant) -> Result<f64> {
    let [z1, z2] = z;
    let r = norm(&z).powf(p);
    let first = match variant {
        YVariant::Plain => {
            if z1 < 0.0 || z2 < 0.0 {
                return Err(LabError::param(format!(
                    "plain witness is defined on [0,∞)², got ({z1}, {z2})"
                )));
            }
            z1 * pow0(z2, p - 1.0)
        }
        YVariant::Plus => z1 * pow0(pos(z2), p - 1.0),
        YVariant::Minus => z1 * pow0(neg(z2), p - 1.0),
        YVariant::PlusPlus => pos(z1) * pow0(pos(z2), p - 1.0),
    };
    Ok(first + r)
}

/// Closed-form Hessian entries `(H11, H12, H22)` of the plain witness on `(0,∞)²`.
pub fn witness_hessian(z: [f64; 2], p: f64) -> [f64; 3] {
    let [z1, z2] = z;
    let r = norm(&z);
    let rp2 = r.powf(p - 2.0);
    let rp4 = r.powf(p - 4.0);
    let h11 = p * rp2 + p * (p - 2.0) * z1 * z1 * rp4;
    let h12 = (p - 1.0) * z2.powf(p - 2.0) + p * (p - 2.0) * z1 * z2 * rp4;
    let h22 = (p - 1.0) * (p - 2.0) * z1 * z2.powf(p - 3.0) + p * rp2 + p * (p - 2.0) * z2 * z2 * rp4;
    [h11, h12, h22]
}

/// Subgradient `d(w)` of `Y^(++)` at `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubgradientVector {
    pub d: [f64; 2],
}

/// `d(w) = (1(w1)((w2)_+)^{p−1}, (p−1)(w1)_+((w2)_+)^{p−2}) + p·w^⟨p−1⟩`.
pub fn subgradient_d(w: [f64; 2], p: f64) -> SubgradientVector {
    let [w1, w2] = w;
    let mut sp = [0.0; 2];
    signed_power_into(&w, p - 1.0, &mut sp);
    let d1 = heaviside(w1) * pow0(pos(w2), p - 1.0) + p * sp[0];
    let d2 = (p - 1.0) * pos(w1) * pow0(pos(w2), p - 2.0) + p * sp[1];
    SubgradientVector { d: [d1, d2] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn signed_power_examples() {
        assert_eq!(signed_power(&[0.0, 0.0], 3.0).unwrap(), vec![0.0, 0.0]);
        let v = signed_power(&[3.0, 4.0], 2.0).unwrap();
        assert!(close(v[0], 15.0, 1e-15) && close(v[1], 20.0, 1e-15));
        assert!(close(signed_power(&[-2.0], 3.0).unwrap()[0], -8.0, 1e-15));
        assert!(signed_power(&[1.0], 0.0).is_err());
        assert!(signed_power(&[1.0], -1.0).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let j0 = signed_power_jacobian(&[0.0, 0.0], 3.0).unwrap();
        assert!(j0.iter().all(|v| *v == 0.0));
        let j1 = signed_power_jacobian(&[2.0], 2.0).unwrap();
        assert!(close(j1[(0, 0)], 4.0, 1e-15));
        let j2 = signed_power_jacobian(&[1.0, 0.0], 3.0).unwrap();
        assert!(close(j2[(0, 0)], 3.0, 1e-15));
        assert!(close(j2[(1, 1)], 1.0, 1e-15));
        assert_eq!(j2[(0, 1)], 0.0);
        assert!(signed_power_jacobian(&[1.0], 1.0).is_err());
    }

    #[test]
    fn divergence_examples() {
        assert!(close(bregman_f(&[1.0, 0.0], &[0.0, 1.0], 2.0), 2.0, 1e-15));
        assert!(close(bregman_f(&[0.0, 0.0], &[2.0, 0.0], 3.0), 8.0, 1e-15));
        assert!(close(bregman_f(&[1.0, 0.0], &[0.0, 0.0], 3.0), 2.0, 1e-15));
        assert!(close(bregman_f(&[1.0], &[2.0], 3.0), 4.0, 1e-15));
        assert_eq!(bregman_h(&[1.5, -2.0], &[1.5, -2.0], 3.0), 0.0);
        assert!(close(bregman_h(&[1.0, 0.0], &[0.0, 1.0], 2.0), 2.0, 1e-15));
        assert!(close(bregman_h(&[1.0], &[2.0], 3.0), 4.5, 1e-15));
        let sym = 0.5 * (bregman_f(&[1.0], &[2.0], 3.0) + bregman_f(&[2.0], &[1.0], 3.0));
        assert!(close(sym, 4.5, 1e-15));
    }

    #[test]
    fn comparison_examples() {
        assert!(close(comparison_g(&[1.0, 2.0], &[-1.0, 0.5], 2.0), 4.0 + 2.25, 1e-15));
        let g = comparison_g(&[1.0, 0.25], &[1.0, 0.5], 2.5);
        assert!(close(g, (1.0 / 16.0) * 1.25f64.powf(0.25), 1e-15));
        assert_eq!(comparison_g(&[0.0, 0.0], &[0.0, 0.0], 1.5), 0.0);
    }

    #[test]
    fn signed_remainder_examples() {
        assert!(remainder_f_signed(&[1.0, 2.0], &[1.0, 2.0], 2.5)
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1e-15));
        assert!(close(remainder_f_signed(&[1.0], &[2.0], 2.0).unwrap()[0], 1.0, 1e-15));
        let a = remainder_f_signed(&[1.0], &[2.0], 3.0).unwrap()[0];
        let b = remainder_f_signed(&[-1.0], &[-2.0], 3.0).unwrap()[0];
        assert!(close(a, -b, 1e-15) && a != 0.0);
    }

    #[test]
    fn codivergence_examples() {
        assert!(close(codivergence_j([1.0, 2.0], [3.0, 4.0], 2.0), 4.0, 1e-15));
        assert_eq!(codivergence_j([0.7, -1.3], [0.7, -1.3], 3.0), 0.0);
        assert!(close(codivergence_j([1.0, 1.0], [2.0, 2.0], 3.0), 4.0, 1e-15));
        let k = 4.0;
        let j = codivergence_j([1.0, 1.0 / k], [1.0, 2.0 / k], 2.5);
        assert!(close(j.abs(), (2f64.powf(1.5) - 2.5).abs() / k.powf(1.5), 1e-14));
    }

    #[test]
    fn splitting_examples() {
        let (w, z) = ([0.3, -0.8], [0.3, -0.8]);
        assert_eq!(codivergence_j_plus(w, z, 3.0), 0.0);
        assert_eq!(codivergence_j_minus(w, z, 3.0), 0.0);
        assert_eq!(codivergence_j_pp(w, z, 3.0), 0.0);
        assert_eq!(codivergence_j_mp(w, z, 3.0), 0.0);
        assert_eq!(codivergence_j_minus([1.0, 1.0], [1.0, 2.0], 3.0), 0.0);
        assert_eq!(heaviside(0.0), 0.5);
        assert_eq!(heaviside(2.0), 1.0);
        assert_eq!(heaviside(-2.0), 0.0);
    }

    #[test]
    fn witness_examples() {
        for v in [YVariant::Plain, YVariant::Plus, YVariant::Minus, YVariant::PlusPlus] {
            assert_eq!(convexity_witness_y([0.0, 0.0], 3.0, v).unwrap(), 0.0);
        }
        let y = convexity_witness_y([1.0, 1.0], 3.0, YVariant::Plain).unwrap();
        assert!(close(y, 1.0 + 2f64.powf(1.5), 1e-15));
        let y = convexity_witness_y([1.0, -1.0], 3.0, YVariant::Plus).unwrap();
        assert!(close(y, 2f64.powf(1.5), 1e-15));
        assert!(convexity_witness_y([-1.0, 1.0], 3.0, YVariant::Plain).is_err());
    }

    #[test]
    fn subgradient_examples() {
        assert_eq!(subgradient_d([0.0, 0.0], 3.0).d, [0.0, 0.0]);
        let d = subgradient_d([0.0, 1.0], 3.0).d;
        assert!(close(d[0], 0.5, 1e-15) && close(d[1], 3.0, 1e-15));
    }

    #[test]
    fn exponent_validation() {
        assert!(Exponent::new(1.0).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(Exponent::for_codivergence(1.9).is_err());
        assert!(Exponent::for_splitting(2.0).is_err());
        assert!(Exponent::for_splitting(2.5).is_ok());
    }
}
