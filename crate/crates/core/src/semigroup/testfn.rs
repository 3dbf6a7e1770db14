//! Test functions with closed-form Fourier transforms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quad::integrate_real_line;

/// Family of test inputs; every member lies in `L^p` for all `p > 1`.
///
/// Fourier convention: `f̂(ξ) = ∫ f(x) e^{−iξ·x} dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum TestFunctionSpec {
    /// `a·exp(−|x−c|²/(2σ²))`.
    GaussianBump {
        center: Vec<f64>,
        width: f64,
        #[serde(default = "one")]
        weight: f64,
    },
    /// `Σ_k a_k exp(−|x−c_k|²/(2σ_k²))`; the empty mixture is the zero function.
    GaussianMixture {
        #[serde(default)]
        dim: Option<usize>,
        centers: Vec<Vec<f64>>,
        widths: Vec<f64>,
        weights: Vec<f64>,
    },
    /// `a·sinc⁴(Ω(x−c)/4)·cos(k₀(x−c))` on R, `sinc u = sin u / u`;
    /// its transform is supported in `|ξ ∓ k₀| ≤ Ω`.
    BandLimited {
        center: f64,
        cutoff: f64,
        #[serde(default)]
        frequency: f64,
        #[serde(default = "one")]
        weight: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// Shape of a single atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Bump { width: f64 },
    Packet { cutoff: f64, frequency: f64 },
}

/// One summand `a·φ(x − c)` of a test function.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub center: Vec<f64>,
    pub weight: f64,
    pub shape: Shape,
}

/// Cubic cardinal B-spline on [−2, 2].
fn cubic_bspline(u: f64) -> f64 {
    let u = u.abs();
    if u <= 1.0 {
        2.0 / 3.0 - u * u + 0.5 * u * u * u
    } else if u <= 2.0 {
        (2.0 - u).powi(3) / 6.0
    } else {
        0.0
    }
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

impl Atom {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.shape {
            Shape::Bump { width } => {
                let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
                self.weight * (-0.5 * r2 / (width * width)).exp()
            }
            Shape::Packet { cutoff, frequency } => {
                let y = x[0] - self.center[0];
                self.weight * sinc(0.25 * cutoff * y).powi(4) * (frequency * y).cos()
            }
        }
    }

    /// Radial, real transform `A(ρ)` of the atom recentred at the origin,
    /// so that `atom(x) = (2π)^{−d} ∫ A(|ξ|) e^{iξ·(x−c)} dξ`.
    pub fn fourier_amplitude(&self, rho: f64) -> f64 {
        let d = self.dim() as i32;
        match self.shape {
            Shape::Bump { width } => {
                self.weight * (2.0 * PI * width * width).powf(0.5 * d as f64) * (-0.5 * width * width * rho * rho).exp()
            }
            Shape::Packet { cutoff, frequency } => {
                self.weight * (2.0 * PI / cutoff)
                    * (cubic_bspline(2.0 * (rho - frequency) / cutoff) + cubic_bspline(2.0 * (rho + frequency) / cutoff))
            }
        }
    }

    /// Frequency beyond which the transform is below `e^{−40}` of its peak
    /// (exactly zero for packets).
    pub fn frequency_cutoff(&self) -> f64 {
        match self.shape {
            Shape::Bump { width } => 80f64.sqrt() / width,
            Shape::Packet { cutoff, frequency } => frequency + cutoff,
        }
    }

    /// Points where the transform has a kink (packets only).
    pub fn frequency_kinks(&self) -> Vec<f64> {
        match self.shape {
            Shape::Bump { .. } => Vec::new(),
            Shape::Packet { cutoff, frequency } => {
                let mut v = Vec::new();
                for s in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                    for k0 in [frequency, -frequency] {
                        let k = k0 + s * cutoff;
                        if k > 0.0 {
                            v.push(k);
                        }
                    }
                }
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
        }
    }

    /// Spatial resolution scale.
    pub fn resolution_scale(&self) -> f64 {
        match self.shape {
            Shape::Bump { width } => width,
            Shape::Packet { cutoff, frequency } => 1.0 / (frequency + cutoff),
        }
    }

    /// Spatial decay scale (beyond `30×` this the atom is negligible).
    pub fn decay_scale(&self) -> f64 {
        match self.shape {
            Shape::Bump { width } => width,
            Shape::Packet { cutoff, .. } => 2.0 / cutoff,
        }
    }
}

impl TestFunctionSpec {
    pub fn bump(center: Vec<f64>, width: f64, weight: f64) -> Self {
        TestFunctionSpec::GaussianBump { center, width, weight }
    }

    pub fn zero(d: usize) -> Self {
        TestFunctionSpec::GaussianMixture {
            dim: Some(d),
            centers: Vec::new(),
            widths: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn band_limited(center: f64, cutoff: f64, frequency: f64, weight: f64) -> Self {
        TestFunctionSpec::BandLimited {
            center,
            cutoff,
            frequency,
            weight,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            TestFunctionSpec::GaussianBump { .. } => "gaussian-bump",
            TestFunctionSpec::GaussianMixture { .. } => "gaussian-mixture",
            TestFunctionSpec::BandLimited { .. } => "band-limited",
        }
    }

    /// Checks the parameters and returns the spatial dimension.
    pub fn validate(&self) -> Result<usize> {
        match self {
            TestFunctionSpec::GaussianBump { center, width, weight } => {
                check_dim(center.len())?;
                check_positive("width", *width)?;
                check_finite("weight", *weight)?;
                Ok(center.len())
            }
            TestFunctionSpec::GaussianMixture {
                dim,
                centers,
                widths,
                weights,
            } => {
                if centers.len() != widths.len() || centers.len() != weights.len() {
                    return Err(LabError::param("mixture needs equally many centers, widths and weights"));
                }
                let d = match (dim, centers.first()) {
                    (_, Some(c)) => c.len(),
                    (Some(d), None) => *d,
                    (None, None) => 1,
                };
                check_dim(d)?;
                if dim.is_some_and(|k| k != d) || centers.iter().any(|c| c.len() != d) {
                    return Err(LabError::param("mixture centers must share one dimension"));
                }
                for (&w, &a) in widths.iter().zip(weights) {
                    check_positive("width", w)?;
                    check_finite("weight", a)?;
                }
                Ok(d)
            }
            TestFunctionSpec::BandLimited {
                center,
                cutoff,
                frequency,
                weight,
            } => {
                check_finite("center", *center)?;
                check_positive("cutoff", *cutoff)?;
                if !(frequency.is_finite() && *frequency >= 0.0) {
                    return Err(LabError::param("frequency must be finite and nonnegative"));
                }
                check_finite("weight", *weight)?;
                Ok(1)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunctionSpec::GaussianBump { center, .. } => center.len(),
            TestFunctionSpec::GaussianMixture { dim, centers, .. } => {
                centers.first().map(|c| c.len()).or(*dim).unwrap_or(1)
            }
            TestFunctionSpec::BandLimited { .. } => 1,
        }
    }

    pub fn atoms(&self) -> Vec<Atom> {
        match self {
            TestFunctionSpec::GaussianBump { center, width, weight } => vec![Atom {
                center: center.clone(),
                weight: *weight,
                shape: Shape::Bump { width: *width },
            }],
            TestFunctionSpec::GaussianMixture {
                centers,
                widths,
                weights,
                ..
            } => centers
                .iter()
                .zip(widths)
                .zip(weights)
                .map(|((c, &w), &a)| Atom {
                    center: c.clone(),
                    weight: a,
                    shape: Shape::Bump { width: w },
                })
                .collect(),
            TestFunctionSpec::BandLimited {
                center,
                cutoff,
                frequency,
                weight,
            } => vec![Atom {
                center: vec![*center],
                weight: *weight,
                shape: Shape::Packet {
                    cutoff: *cutoff,
                    frequency: *frequency,
                },
            }],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.atoms().iter().all(|a| a.weight == 0.0)
    }

    pub fn is_gaussian_family(&self) -> bool {
        !matches!(self, TestFunctionSpec::BandLimited { .. })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.atoms().iter().map(|a| a.eval(x)).sum()
    }

    /// `∫ f = f̂(0)`.
    pub fn mass(&self) -> f64 {
        self.atoms().iter().map(|a| a.fourier_amplitude(0.0)).sum()
    }

    /// `(f₊, f₋)` with `f = f₊ − f₋`, both made of nonnegative bumps.
    pub fn sign_split(&self) -> Result<(TestFunctionSpec, TestFunctionSpec)> {
        if !self.is_gaussian_family() {
            return Err(LabError::Unsupported("sign splitting needs a Gaussian-family function".into()));
        }
        let d = self.dim();
        let mut parts = [(Vec::new(), Vec::new(), Vec::new()), (Vec::new(), Vec::new(), Vec::new())];
        for a in self.atoms() {
            let Shape::Bump { width } = a.shape else { unreachable!() };
            let slot = if a.weight >= 0.0 { 0 } else { 1 };
            parts[slot].0.push(a.center.clone());
            parts[slot].1.push(width);
            parts[slot].2.push(a.weight.abs());
        }
        let [pos, neg] = parts;
        let mk = |(centers, widths, weights)| TestFunctionSpec::GaussianMixture {
            dim: Some(d),
            centers,
            widths,
            weights,
        };
        Ok((mk(pos), mk(neg)))
    }

    /// Largest `|c|` over the atom centres.
    pub fn extent(&self) -> f64 {
        self.atoms()
            .iter()
            .map(|a| crate::bregman::norm(&a.center))
            .fold(0.0, f64::max)
    }

    pub fn resolution_scale(&self) -> f64 {
        self.atoms().iter().map(Atom::resolution_scale).fold(f64::INFINITY, f64::min)
    }

    pub fn decay_scale(&self) -> f64 {
        self.atoms().iter().map(Atom::decay_scale).fold(0.0, f64::max)
    }

    /// `‖f‖_p^p` by quadrature.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        let atoms = self.atoms();
        if atoms.is_empty() {
            return 0.0;
        }
        let splits: Vec<f64> = atoms.iter().map(|a| a.center[0]).collect();
        let scale = self.decay_scale().max(self.resolution_scale());
        let panels = 64 + (8.0 * self.extent() / self.resolution_scale()).ceil() as usize;
        let panels = panels.min(4096);
        match self.dim() {
            1 => integrate_real_line(0.0, scale, &splits, panels, |x| self.eval(&[x]).abs().powf(p)),
            _ => {
                let ys: Vec<f64> = atoms.iter().map(|a| a.center[1]).collect();
                integrate_real_line(0.0, scale, &splits, panels, |x| {
                    integrate_real_line(0.0, scale, &ys, panels, |y| self.eval(&[x, y]).abs().powf(p))
                })
            }
        }
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_norm_pow(p).powf(1.0 / p)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        Err(LabError::param(format!("test functions live on R or R², got d = {d}")))
    }
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LabError::param(format!("{what} must be positive, got {v}")))
    }
}

fn check_finite(what: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(LabError::param(format!("{what} must be finite")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_real_line;

    #[test]
    fn packet_transform_inverts() {
        let f = TestFunctionSpec::band_limited(0.3, 2.0, 1.5, 1.2);
        let atom = &f.atoms()[0];
        let kinks = atom.frequency_kinks();
        for x in [0.3, 0.9, -2.0, 5.0] {
            let mut breaks = vec![0.0];
            breaks.extend(kinks.iter().copied());
            let mut v = 0.0;
            for w in breaks.windows(2) {
                v += crate::quad::integrate_panels(&crate::quad::uniform_breaks(w[0], w[1], 0.05), crate::quad::gl16(), |k| {
                    atom.fourier_amplitude(k) * (k * (x - 0.3)).cos()
                });
            }
            v /= PI;
            assert!((v - f.eval(&[x])).abs() < 1e-12, "x = {x}: {v} vs {}", f.eval(&[x]));
        }
    }

    #[test]
    fn bump_mass_and_norms() {
        let f = TestFunctionSpec::bump(vec![0.5], 0.7, 2.0);
        assert!((f.mass() - 2.0 * 0.7 * (2.0 * PI).sqrt()).abs() < 1e-14);
        // ‖f‖_2² = a² σ √π
        let n2 = f.lp_norm_pow(2.0);
        assert!((n2 - 4.0 * 0.7 * PI.sqrt()).abs() < 1e-12, "{n2}");
        let g = TestFunctionSpec::bump(vec![0.0, 1.0], 0.5, 1.0);
        assert!((g.lp_norm_pow(2.0) - PI * 0.25).abs() < 1e-10);
        let packet = TestFunctionSpec::band_limited(0.0, 2.0, 0.0, 1.0);
        let direct = integrate_real_line(0.0, 8.0, &[0.0], 8192, |x| packet.eval(&[x]));
        assert!((direct - packet.mass()).abs() < 1e-9, "{direct} vs {}", packet.mass());
    }

    #[test]
    fn validation_and_split() {
        assert!(TestFunctionSpec::bump(vec![0.0], -1.0, 1.0).validate().is_err());
        assert!(TestFunctionSpec::bump(vec![0.0; 3], 1.0, 1.0).validate().is_err());
        assert_eq!(TestFunctionSpec::zero(2).validate().unwrap(), 2);
        let f = TestFunctionSpec::GaussianMixture {
            dim: None,
            centers: vec![vec![-1.0], vec![1.0]],
            widths: vec![1.0, 0.5],
            weights: vec![1.0, -2.0],
        };
        let (p, n) = f.sign_split().unwrap();
        for x in [-1.0, 0.0, 0.7] {
            assert!((p.eval(&[x]) - n.eval(&[x]) - f.eval(&[x])).abs() < 1e-15);
            assert!(p.eval(&[x]) >= 0.0 && n.eval(&[x]) >= 0.0);
        }
        assert!(TestFunctionSpec::band_limited(0.0, 1.0, 0.0, 1.0).sign_split().is_err());
    }
}
