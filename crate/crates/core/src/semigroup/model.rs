//! Gaussian and symmetric α-stable models: exponent, Lévy density, kernel.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::{bessel_j0, one_minus_j0};
use crate::error::{LabError, Result};
use crate::quad::{geometric_breaks, gl16, integrate_panels, uniform_breaks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Brownian motion at twice the usual speed: `ψ(ξ) = |ξ|²`, `L = Δ`.
    Gaussian,
    /// Isotropic α-stable: `ψ(ξ) = |ξ|^α`.
    Stable,
}

/// Model parameters as written in a run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_dim")]
    pub d: usize,
}

fn default_dim() -> usize {
    1
}

impl ModelSpec {
    pub fn build(&self) -> Result<SemigroupModel> {
        match self.kind {
            ModelKind::Gaussian => {
                if self.alpha.is_some_and(|a| a != 2.0) {
                    return Err(LabError::param("the gaussian kind takes no stability index"));
                }
                SemigroupModel::gaussian(self.d)
            }
            ModelKind::Stable => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| LabError::param("the stable kind needs a stability index `alpha`"))?;
                SemigroupModel::stable(alpha, self.d)
            }
        }
    }
}

/// Driving semigroup on `R^d`, `d ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemigroupModel {
    pub kind: ModelKind,
    /// Stability index; 2 for the Gaussian model.
    pub alpha: f64,
    pub d: usize,
    /// Normalizing constant `c(d,α)` of `ν(x) = c|x|^{−d−α}` (0 for Gaussian).
    c_nu: f64,
}

/// Upper bound on spectral/contour nodes for one kernel evaluation.
const NODE_BUDGET: usize = 400_000;

impl SemigroupModel {
    pub fn gaussian(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(SemigroupModel {
            kind: ModelKind::Gaussian,
            alpha: 2.0,
            d,
            c_nu: 0.0,
        })
    }

    /// Stable model; `c(d,α)` comes from radial quadrature of
    /// `∫(1 − cos x₁) |x|^{−d−α} dx`, so that `ψ(ξ) = ∫(1 − cos ξ·x) ν(x) dx`.
    pub fn stable(alpha: f64, d: usize) -> Result<Self> {
        check_dim(d)?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(LabError::param(format!(
                "stability index must lie in (0, 2), got {alpha} (use the gaussian kind for α = 2)"
            )));
        }
        Ok(SemigroupModel {
            kind: ModelKind::Stable,
            alpha,
            d,
            c_nu: 1.0 / cosine_moment(d, alpha),
        })
    }

    pub fn is_stable(&self) -> bool {
        self.kind == ModelKind::Stable
    }

    /// `ψ` as a function of `|ξ|`.
    #[inline]
    pub fn psi_radial(&self, r: f64) -> f64 {
        match self.kind {
            ModelKind::Gaussian => r * r,
            ModelKind::Stable => {
                if r == 0.0 {
                    0.0
                } else {
                    r.abs().powf(self.alpha)
                }
            }
        }
    }

    /// Lévy–Khinchine exponent `ψ(ξ)`.
    pub fn levy_exponent(&self, xi: &[f64]) -> Result<f64> {
        self.check_point(xi)?;
        Ok(self.psi_radial(crate::bregman::norm(xi)))
    }

    /// `c(d,α)`.
    pub fn levy_constant(&self) -> Result<f64> {
        match self.kind {
            ModelKind::Gaussian => Err(LabError::Unsupported(
                "the Gaussian model has no jump part".into(),
            )),
            ModelKind::Stable => Ok(self.c_nu),
        }
    }

    /// `ν(x) = c(d,α)|x|^{−d−α}`.
    pub fn levy_density(&self, x: &[f64]) -> Result<f64> {
        let c = self.levy_constant()?;
        self.check_point(x)?;
        let r = crate::bregman::norm(x);
        if r == 0.0 {
            return Err(LabError::Singularity("Lévy density is singular at x = 0".into()));
        }
        Ok(c * r.powf(-(self.d as f64) - self.alpha))
    }

    /// Natural length scale `t^{1/α}` of `p_t`.
    pub fn length_scale(&self, t: f64) -> f64 {
        match self.kind {
            ModelKind::Gaussian => (2.0 * t).sqrt(),
            ModelKind::Stable => t.powf(1.0 / self.alpha),
        }
    }

    /// Transition density `p_t(x)`.
    pub fn kernel_density(&self, t: f64, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.kernel_radial(t, crate::bregman::norm(x))
    }

    /// Transition density as a function of `|x|`.
    pub fn kernel_radial(&self, t: f64, r: f64) -> Result<f64> {
        check_time(t)?;
        let r = r.abs();
        let d = self.d as f64;
        match self.kind {
            ModelKind::Gaussian => Ok((4.0 * PI * t).powf(-0.5 * d) * (-r * r / (4.0 * t)).exp()),
            ModelKind::Stable if self.alpha == 1.0 => Ok(match self.d {
                1 => t / (PI * (t * t + r * r)),
                _ => t / (2.0 * PI * (t * t + r * r).powf(1.5)),
            }),
            ModelKind::Stable => {
                let s = t.powf(1.0 / self.alpha);
                let y = r / s;
                let unit = match self.d {
                    1 => stable_unit_density_1d(self.alpha, y)?,
                    _ => stable_unit_density_2d(self.alpha, y)?,
                };
                Ok(unit * s.powf(-d))
            }
        }
    }

    /// `sup_x p_t(x) = p_t(0)`.
    pub fn kernel_sup(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let a = self.alpha;
        Ok(match self.d {
            1 => libm::tgamma(1.0 + 1.0 / a) / (PI * t.powf(1.0 / a)),
            _ => libm::tgamma(2.0 / a) / (2.0 * PI * a * t.powf(2.0 / a)),
        })
    }

    /// Mass of `p_t` outside the ball of radius `r` (closed forms, or the
    /// large-|x| series of the stable density integrated term by term).
    pub fn tail_mass(&self, t: f64, r: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match (self.kind, self.d) {
            (ModelKind::Gaussian, 1) => libm::erfc(r / (2.0 * t.sqrt())),
            (ModelKind::Gaussian, _) => (-r * r / (4.0 * t)).exp(),
            (ModelKind::Stable, 1) if self.alpha == 1.0 => 1.0 - 2.0 / PI * (r / t).atan(),
            (ModelKind::Stable, _) if self.alpha == 1.0 => t / (t * t + r * r).sqrt(),
            (ModelKind::Stable, _) => {
                let y = r / t.powf(1.0 / self.alpha);
                let surface = if self.d == 1 { 2.0 } else { 2.0 * PI };
                // convergent for α < 1, asymptotic for α > 1: stop at the smallest term
                let mut acc = 0.0;
                let mut last = f64::INFINITY;
                for k in 1..=60 {
                    let kf = k as f64;
                    let half = 0.5 * kf * self.alpha;
                    if (half - half.round()).abs() < 1e-12 {
                        continue;
                    }
                    let term = far_field_coefficient(self.alpha, self.d, k) * surface * y.powf(-kf * self.alpha) / (kf * self.alpha);
                    if term.abs() > last {
                        break;
                    }
                    acc += term;
                    last = term.abs();
                    if last < 1e-17 * acc.abs() {
                        break;
                    }
                }
                acc
            }
        })
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(LabError::param(format!(
                "point has dimension {}, model has d = {}",
                x.len(),
                self.d
            )));
        }
        Ok(())
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        Err(LabError::param(format!("dimension must be 1 or 2, got {d}")))
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(LabError::param(format!("time must be positive, got {t}")))
    }
}

/// Coefficient `a_k` of the far-field expansion
/// `p_1(x) ~ Σ_k a_k |x|^{−kα−d}` of the unit stable density.
pub fn far_field_coefficient(alpha: f64, d: usize, k: usize) -> f64 {
    let kf = k as f64;
    let d = d as f64;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let log_mag = kf * alpha * 2f64.ln() + libm::lgamma(kf * alpha / 2.0 + 1.0) + libm::lgamma((kf * alpha + d) / 2.0)
        - libm::lgamma(kf + 1.0);
    sign * (PI * kf * alpha / 2.0).sin() * log_mag.exp() / PI.powf(d / 2.0 + 1.0)
}

/// `∫_{R^d}(1 − cos x₁)|x|^{−d−α} dx` by radial quadrature.
fn cosine_moment(d: usize, alpha: f64) -> f64 {
    let rule = gl16();
    // (0, a] by the Taylor model of the integrand, graded panels up to 1, then
    // uniform panels of width π/4 up to L
    let a: f64 = 1e-4;
    let (c2, c4) = if d == 1 { (0.5, -1.0 / 24.0) } else { (0.25, -1.0 / 64.0) };
    let head = c2 * a.powf(2.0 - alpha) / (2.0 - alpha) + c4 * a.powf(4.0 - alpha) / (4.0 - alpha);
    let mut breaks = geometric_breaks(a, 1.0, 2.0);
    if d == 1 {
        let big_l = 2.0 * PI * 400.0;
        breaks.extend(uniform_breaks(1.0, big_l, FRAC_PI_4).into_iter().skip(1));
        let body = integrate_panels(&breaks, rule, |r| 2.0 * (0.5 * r).sin().powi(2) * r.powf(-1.0 - alpha));
        // ∫_L^∞ r^{−β} = L^{1−β}/(β−1); ∫_L^∞ cos r · r^{−β} ≈ β L^{−β−1} at L ∈ 2πZ
        let beta = 1.0 + alpha;
        let tail = big_l.powf(-alpha) / alpha - beta * big_l.powf(-beta - 1.0);
        2.0 * (head + body + tail)
    } else {
        // L − π/4 ∈ πZ kills the leading boundary term of the J0 tail
        let big_l = FRAC_PI_4 + 640.0 * PI;
        breaks.extend(uniform_breaks(1.0, big_l, FRAC_PI_4).into_iter().skip(1));
        let body = integrate_panels(&breaks, rule, |r| one_minus_j0(r) * r.powf(-1.0 - alpha));
        let tail = big_l.powf(-alpha) / alpha;
        2.0 * PI * (head + body + tail)
    }
}

/// Reference value `c(d,α) = α 2^{α−1} Γ((d+α)/2) / (π^{d/2} Γ(1−α/2))`.
pub fn stable_constant_closed_form(d: usize, alpha: f64) -> f64 {
    let d = d as f64;
    alpha * 2f64.powf(alpha - 1.0) * libm::tgamma((d + alpha) / 2.0)
        / (PI.powf(d / 2.0) * libm::tgamma(1.0 - alpha / 2.0))
}

/// Unit (t = 1) stable density on R, by Fourier inversion along the rotated
/// ray `ξ = s e^{iθ}`, `θ = min(π/2, π/(3α))`, where the integrand decays
/// exponentially instead of oscillating.
pub fn stable_unit_density_1d(alpha: f64, y: f64) -> Result<f64> {
    let y = y.abs();
    if y == 0.0 {
        return Ok(libm::tgamma(1.0 + 1.0 / alpha) / PI);
    }
    let theta = (PI / 2.0).min(PI / (3.0 * alpha));
    let rot = Complex64::from_polar(1.0, theta);
    let rot_a = Complex64::from_polar(1.0, alpha * theta);
    let ca = (alpha * theta).cos();
    let (st, ct) = theta.sin_cos();
    let integrand = |s: f64| -> Complex64 {
        if s == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let sa = s.powf(alpha);
        (-(rot_a * sa) + Complex64::i() * rot * (y * s)).exp()
    };
    let decay = |s: f64| s.powf(alpha) * ca + y * s * st;
    let freq = |s: f64| y * ct + alpha * s.powf(alpha - 1.0) * (alpha * theta).sin();
    let s_char = (1.0f64).min(1.0 / y);
    let rule = gl16();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut a = 0.0;
    let mut b = 1e-12 * s_char;
    let mut panels = 0usize;
    loop {
        acc += Complex64::new(
            rule.integrate(a, b, |s| integrand(s).re),
            rule.integrate(a, b, |s| integrand(s).im),
        );
        panels += 1;
        if decay(b) > 45.0 {
            break;
        }
        if panels * 16 > NODE_BUDGET {
            return Err(LabError::Accuracy {
                achieved: (-decay(b)).exp(),
                target: 1e-12,
                context: format!("stable density α = {alpha}, y = {y}"),
            });
        }
        a = b;
        let grow = if b < s_char { b } else { (0.5 * b).min(1.5 / freq(b).max(1e-300)).max(0.05 * s_char) };
        b = a + grow;
    }
    Ok((rot * acc).re / PI)
}

/// Sum of the far-field series `Σ a_k y^{−kα−d}` (convergent for α < 1).
pub fn far_field_density(alpha: f64, d: usize, y: f64) -> f64 {
    let mut acc = 0.0;
    for k in 1..=200 {
        let half = 0.5 * k as f64 * alpha;
        if (half - half.round()).abs() < 1e-12 {
            continue;
        }
        let term = far_field_coefficient(alpha, d, k) * y.powf(-(k as f64) * alpha - d as f64);
        acc += term;
        if term.abs() < 1e-18 * acc.abs() {
            break;
        }
    }
    acc
}

/// Unit stable density on R² by Hankel inversion
/// `(1/2π)∫ e^{−ρ^α} J0(ρ r) ρ dρ`; the far-field series takes over for
/// α < 1 at `r ≥ 3`, where the slowly damped transform would need too many nodes.
pub fn stable_unit_density_2d(alpha: f64, r: f64) -> Result<f64> {
    let r = r.abs();
    if r == 0.0 {
        return Ok(libm::tgamma(2.0 / alpha) / (2.0 * PI * alpha));
    }
    if alpha < 1.0 && r >= 3.0 {
        return Ok(far_field_density(alpha, 2, r));
    }
    let rho_max = 45f64.powf(1.0 / alpha);
    let width = (1.0 / r).min(rho_max / 64.0);
    let n = (rho_max / width).ceil() as usize;
    if n * 16 > NODE_BUDGET {
        return Err(LabError::Accuracy {
            achieved: f64::NAN,
            target: 1e-8,
            context: format!("Hankel inversion α = {alpha}, r = {r} exceeds the node budget"),
        });
    }
    let mut breaks = vec![0.0];
    let mut x = 1e-10 * rho_max.min(1.0);
    while x < width {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.extend(uniform_breaks(width, rho_max, width));
    let v = integrate_panels(&breaks, gl16(), |rho| (-rho.powf(alpha)).exp() * bessel_j0(rho * r) * rho);
    Ok(v / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_matches_gamma_formula() {
        for d in [1, 2] {
            for alpha in [0.5, 1.0, 1.5] {
                let m = SemigroupModel::stable(alpha, d).unwrap();
                let c = m.levy_constant().unwrap();
                let reference = stable_constant_closed_form(d, alpha);
                assert!((c / reference - 1.0).abs() < 1e-8, "d={d} α={alpha}: {c} vs {reference}");
            }
        }
        assert!((stable_constant_closed_form(1, 1.0) - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn unit_density_matches_reference_values() {
        // reference: independent adaptive quadrature of (1/π)∫e^{−s^α}cos(sy)ds
        let cases = [
            (0.5, 0.3, 0.25973159710686045),
            (0.5, 1.0, 0.08610714768852712),
            (0.5, 3.0, 0.02379919301777758),
            (1.5, 0.0, 0.28735275145749706),
            (1.5, 0.3, 0.2779993059101122),
            (1.5, 1.0, 0.20203815960878227),
            (1.5, 3.0, 0.031509423617231455),
            (1.5, 10.0, 0.0010477760439139925),
        ];
        for (a, y, v) in cases {
            let got = stable_unit_density_1d(a, y).unwrap();
            assert!((got - v).abs() < 1e-9, "α={a} y={y}: {got} vs {v}");
        }
    }

    #[test]
    fn gaussian_kernel_example() {
        let m = SemigroupModel::gaussian(1).unwrap();
        let v = m.kernel_density(1.0 / (4.0 * PI), &[0.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(m.levy_density(&[1.0]).is_err());
        assert!(m.kernel_density(0.0, &[1.0]).is_err());
    }

    #[test]
    fn cauchy_kernel_example() {
        let m = SemigroupModel::stable(1.0, 1).unwrap();
        assert!((m.kernel_density(1.0, &[0.0]).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((m.kernel_sup(1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(matches!(m.levy_density(&[0.0]), Err(LabError::Singularity(_))));
        let nu = m.levy_density(&[2.0]).unwrap();
        assert!((nu - 1.0 / (4.0 * PI)).abs() < 1e-10);
    }

    #[test]
    fn far_field_series_matches_inversion() {
        for y in [3.0, 6.0] {
            let a = far_field_density(0.5, 1, y);
            let b = stable_unit_density_1d(0.5, y).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let a = far_field_density(0.5, 2, 3.0);
        // Hankel inversion just below the switch-over radius
        let b = stable_unit_density_2d(0.5, 2.999_999_9).unwrap();
        assert!((a - b).abs() < 1e-6 * b.abs().max(1e-3), "{a} vs {b}");
    }

    #[test]
    fn far_field_leading_term_is_levy_density() {
        for d in [1, 2] {
            for alpha in [0.5, 1.5] {
                let a1 = far_field_coefficient(alpha, d, 1);
                assert!((a1 / stable_constant_closed_form(d, alpha) - 1.0).abs() < 1e-12);
            }
        }
    }
}
