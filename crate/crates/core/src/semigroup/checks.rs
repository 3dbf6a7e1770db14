//! Numerical checks of the standing assumptions and basic semigroup facts.

use std::f64::consts::PI;

use super::model::SemigroupModel;
use super::spectral::{apply_generator, Action, SpectralField};
use super::testfn::TestFunctionSpec;
use crate::error::{LabError, Result};
use crate::quad::{geometric_breaks, gl16, integrate_half_line, integrate_panels, integrate_real_line, uniform_breaks};
use crate::report::{IdentityReport, VerificationReport};

fn model_params(r: VerificationReport, m: &SemigroupModel) -> VerificationReport {
    r.param("alpha", m.alpha).param("d", m.d as f64)
}

fn model_params_id(r: IdentityReport, m: &SemigroupModel) -> IdentityReport {
    r.param("alpha", m.alpha).param("d", m.d as f64)
}

/// Breakpoints covering `[c − w, c + w]`: uniform panels of width `fine` on
/// the core `[c − core, c + core]`, geometric growth outside.
fn window_breaks(c: f64, core: f64, fine: f64, w: f64, extra: &[f64]) -> Vec<f64> {
    let mut b = uniform_breaks(c - core, c + core, fine);
    if w > core * 1.0001 {
        for x in geometric_breaks(core, w, 1.25).into_iter().skip(1) {
            b.push(c + x);
            b.push(c - x);
        }
    }
    b.extend(extra.iter().copied().filter(|&e| (e - c).abs() < w));
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    b
}

/// `ψ(0) = 0`, `ψ(−ξ) = ψ(ξ)`, and `ψ(ξ)/log|ξ|` increasing along
/// `|ξ| ∈ {10², 10⁴, 10⁶}` (Hartman–Wintner probe).
pub fn check_levy_exponent(model: &SemigroupModel) -> Result<VerificationReport> {
    let d = model.d;
    let mut e = vec![0.0; d];
    let zero = model.levy_exponent(&e)?;
    let mut sym = 0.0f64;
    for (i, r) in [0.3, 1.0, 2.0, 7.5].into_iter().enumerate() {
        e[0] = r;
        if d == 2 {
            e[1] = 0.5 * r * (i as f64 - 1.5);
        }
        let minus: Vec<f64> = e.iter().map(|v| -v).collect();
        sym = sym.max((model.levy_exponent(&e)? - model.levy_exponent(&minus)?).abs());
    }
    let probes: Vec<f64> = [1e2, 1e4, 1e6].iter().map(|&r| model.psi_radial(r) / f64::ln(r)).collect();
    let increasing = probes.windows(2).all(|w| w[1] > w[0]);
    let pass = zero == 0.0 && sym == 0.0 && increasing;
    Ok(model_params(VerificationReport::new("levy-exponent", "exponent-probe"), model)
        .note(format!("psi/log at 1e2, 1e4, 1e6: {:.6e}, {:.6e}, {:.6e}", probes[0], probes[1], probes[2]))
        .with(|r| {
            r.samples = 7;
            r.observed = probes[2];
            r.bound = probes[0];
            r.pass = pass;
        }))
}

/// Symmetry of `ν` on sample points, `∫(|z|² ∧ 1)ν` by quadrature against
/// its closed value.
pub fn check_levy_density(model: &SemigroupModel) -> Result<VerificationReport> {
    let c = model.levy_constant()?;
    let (a, d) = (model.alpha, model.d);
    let mut sym = 0.0f64;
    for r in [0.1, 0.5, 1.0, 3.0, 20.0] {
        let x: Vec<f64> = (0..d).map(|k| r * (1.0 - 0.3 * k as f64)).collect();
        let mx: Vec<f64> = x.iter().map(|v| -v).collect();
        sym = sym.max((model.levy_density(&x)? - model.levy_density(&mx)?).abs());
    }
    let surface = if d == 1 { 2.0 } else { 2.0 * PI };
    let radial = |r: f64| if r <= 1.0 { r * r } else { 1.0 } * r.powf(-1.0 - a) * c * surface;
    let inner = integrate_panels(&geometric_breaks(1e-14, 1.0, 1.5), gl16(), radial);
    let inner = inner + c * surface * 1e-14f64.powf(2.0 - a) / (2.0 - a);
    let outer = integrate_half_line(1.0, 1e12, |s| radial(1.0 + s)) + c * surface * (1e12f64 + 1.0).powf(-a) / a;
    let quad = inner + outer;
    let closed = c * surface * (1.0 / (2.0 - a) + 1.0 / a);
    let rel = (quad - closed).abs() / closed;
    let pass = sym == 0.0 && quad.is_finite() && rel < 1e-6;
    Ok(model_params(VerificationReport::new("levy-density", "integrability"), model)
        .param("c", c)
        .note(format!("int (|z|^2 ^ 1) nu = {quad:.12e} (closed {closed:.12e})"))
        .with(|r| {
            r.samples = 5;
            r.observed = rel;
            r.bound = 1e-6;
            r.pass = pass;
        }))
}

/// `∫p_t = 1` by radial quadrature plus the exact or series tail mass.
pub fn check_normalization(model: &SemigroupModel, t: f64) -> Result<IdentityReport> {
    let ell = model.length_scale(t);
    let big_r = 20.0 * ell;
    let breaks = uniform_breaks(0.0, big_r, 0.25 * ell);
    let mut err = None;
    let body = integrate_panels(&breaks, gl16(), |r| {
        let v = match model.kernel_radial(t, r) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        if model.d == 1 {
            2.0 * v
        } else {
            2.0 * PI * r * v
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let total = body + model.tail_mass(t, big_r)?;
    Ok(model_params_id(IdentityReport::new("kernel-normalization", "mass-one", total, 1.0, 1e-6, 0.0), model).param("t", t))
}

/// `p_t(x) = p_t(−x) ≥ 0` on the points and `sup p_t` nonincreasing to 0
/// along the times.
pub fn check_kernel_symmetry(model: &SemigroupModel, times: &[f64], radii: &[f64]) -> Result<VerificationReport> {
    let mut worst_asym = 0.0f64;
    let mut min_val = f64::INFINITY;
    let mut n = 0u64;
    for &t in times {
        for &r in radii {
            let x: Vec<f64> = (0..model.d).map(|k| r / (1.0 + k as f64)).collect();
            let mx: Vec<f64> = x.iter().map(|v| -v).collect();
            let (a, b) = (model.kernel_density(t, &x)?, model.kernel_density(t, &mx)?);
            worst_asym = worst_asym.max((a - b).abs());
            min_val = min_val.min(a.min(b));
            n += 2;
        }
    }
    let mut sups = Vec::new();
    for &t in times {
        sups.push(model.kernel_sup(t)?);
    }
    let monotone = sups.windows(2).all(|w| w[1] <= w[0]);
    let pass = worst_asym == 0.0 && min_val >= 0.0 && monotone;
    Ok(model_params(VerificationReport::new("kernel-symmetry", "symmetry-positivity"), model)
        .note(format!("min p_t = {min_val:.3e}; sup p_t at the last time = {:.3e}", sups.last().copied().unwrap_or(0.0)))
        .with(|r| {
            r.samples = n;
            r.observed = worst_asym;
            r.bound = 0.0;
            r.pass = pass;
        }))
}

/// Chapman–Kolmogorov `∫p_s(x−y)p_t(y)dy = p_{s+t}(x)` on R.
pub fn check_chapman_kolmogorov(model: &SemigroupModel, s: f64, t: f64, x: f64) -> Result<IdentityReport> {
    if model.d != 1 {
        return Err(LabError::Unsupported("Chapman–Kolmogorov quadrature is one-dimensional".into()));
    }
    let scale = model.length_scale(s).min(model.length_scale(t));
    let mut err = None;
    let mut k = |tt: f64, r: f64| match model.kernel_radial(tt, r) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    };
    let lhs = integrate_real_line(0.5 * x, scale, &[0.0, x], 256, |y| k(s, x - y) * k(t, y));
    if let Some(e) = err {
        return Err(e);
    }
    let rhs = model.kernel_radial(s + t, x)?;
    Ok(model_params_id(IdentityReport::new("chapman-kolmogorov", "kernel-convolution", lhs, rhs, 1e-6, 1.0), model)
        .param("s", s)
        .param("t", t)
        .param("x", x))
}

/// (P1)/(P2): `p_t(x)/(tν(x))` bounded over the grid, within 1% of 1 at the
/// smallest time for `|x| ≥ 0.5`, and decreasing in `t` over the last three times.
pub fn check_p1_p2(model: &SemigroupModel, times: &[f64], radii: &[f64]) -> Result<VerificationReport> {
    if !model.is_stable() {
        return Err(LabError::Unsupported("(P1)/(P2) concern jump kernels".into()));
    }
    if times.is_empty() || radii.is_empty() {
        return Err(LabError::param("empty time or space grid"));
    }
    let mut times = times.to_vec();
    times.sort_by(f64::total_cmp);
    let mut sup_ratio = 0.0f64;
    let mut worst_small_t = 0.0f64;
    let mut decreasing = true;
    let mut n = 0u64;
    for &r in radii {
        let x: Vec<f64> = std::iter::once(r).chain(std::iter::repeat(0.0)).take(model.d).collect();
        let nu = model.levy_density(&x)?;
        let mut ratios = Vec::with_capacity(times.len());
        for &t in &times {
            let q = model.kernel_density(t, &x)? / (t * nu);
            sup_ratio = sup_ratio.max(q);
            ratios.push(q);
            n += 1;
        }
        if r.abs() >= 0.5 {
            worst_small_t = worst_small_t.max((ratios[0] - 1.0).abs());
        }
        let tail = &ratios[ratios.len().saturating_sub(3)..];
        decreasing &= tail.windows(2).all(|w| w[1] <= w[0]);
    }
    let pass = sup_ratio.is_finite() && worst_small_t <= 0.01 && decreasing;
    Ok(model_params(VerificationReport::new("condition-p1-p2", "small-time-ratio"), model)
        .param("t_min", times[0])
        .param("tol", 0.01)
        .note(format!("observed sup p_t/(t nu) = {sup_ratio:.6e}; large-t ratios decreasing: {decreasing}"))
        .with(|r| {
            r.samples = n;
            r.observed = worst_small_t;
            r.bound = 0.01;
            r.pass = pass;
        }))
}

/// Integral of `P_t f` over R: quadrature on a window plus the far field
/// `(∫f)·P(|X_t| > R)`.
pub fn check_semigroup_mass(model: &SemigroupModel, f: &TestFunctionSpec, t: f64) -> Result<IdentityReport> {
    let d = one_dim(model, f)?;
    let ell = model.length_scale(t);
    let w = f.extent() + 200.0 * (f.decay_scale() + ell);
    let field = SpectralField::new(model, f, t, Action::Semigroup, w + f.extent())?;
    let core = f.extent() + 10.0 * (f.decay_scale() + ell);
    let fine = 0.5 * f.resolution_scale().min(ell);
    let centers: Vec<f64> = f.atoms().iter().map(|a| a.center[0]).collect();
    let body = integrate_panels(&window_breaks(0.0, core, fine, w, &centers), gl16(), |x| field.eval(&[x]));
    let mass = f.mass();
    let lhs = body + mass * model.tail_mass(t, w)?;
    Ok(model_params_id(IdentityReport::new("semigroup-mass", "mass-conservation", lhs, mass, 1e-6, 1.0), model)
        .param("d", d as f64)
        .param("t", t))
}

/// `sup|P_t f| ≤ ‖f‖_p ‖p_t‖_∞^{1/p}` along increasing times, with the
/// bound decreasing.
pub fn check_decay(model: &SemigroupModel, f: &TestFunctionSpec, p: f64, times: &[f64]) -> Result<VerificationReport> {
    one_dim(model, f)?;
    let norm = f.lp_norm(p);
    let mut worst = f64::NEG_INFINITY;
    let mut bounds = Vec::new();
    for &t in times {
        let ell = model.length_scale(t);
        let half = f.extent() + 3.0 * (f.decay_scale() + ell);
        let field = SpectralField::new(model, f, t, Action::Semigroup, 2.0 * half)?;
        let h = 2.0 * half / 400.0;
        let sup = field.eval_grid(-half, h, 401).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = norm * model.kernel_sup(t)?.powf(1.0 / p);
        worst = worst.max(sup / bound);
        bounds.push(bound);
    }
    let decreasing = bounds.windows(2).all(|w| w[1] < w[0]);
    Ok(model_params(VerificationReport::new("semigroup-decay", "sup-bound"), model)
        .param("p", p)
        .note(format!("bound at the last time {:.3e}", bounds.last().copied().unwrap_or(0.0)))
        .with(|r| {
            r.samples = times.len() as u64;
            r.observed = worst;
            r.bound = 1.0;
            r.pass = worst <= 1.0 && decreasing;
        }))
}

/// Finite-difference consistency of the generator: forward differences
/// `(P_{t+h}f − P_t f)/h` converge to `L P_t f` at first order and central
/// differences at second order. `observed` is the forward-difference error
/// ratio between successive halvings (ideal 2).
pub fn check_generator_consistency(
    model: &SemigroupModel,
    f: &TestFunctionSpec,
    t: f64,
    x: f64,
    h0: f64,
) -> Result<VerificationReport> {
    one_dim(model, f)?;
    let reach = (x.abs() + f.extent()) * 2.0 + 10.0;
    let eval = |s: f64| -> Result<f64> { Ok(SpectralField::new(model, f, s, Action::Semigroup, reach)?.eval(&[x])) };
    let lu = apply_generator(model, f, t, &[x])?;
    let u = eval(t)?;
    let mut fwd = Vec::new();
    let mut cen = Vec::new();
    for k in 0..3 {
        let h = h0 / f64::powi(2.0, k);
        let up = eval(t + h)?;
        fwd.push(((up - u) / h - lu).abs());
        if t - h > 0.0 {
            cen.push(((up - eval(t - h)?) / (2.0 * h) - lu).abs());
        }
    }
    let fwd_ratio = fwd[1] / fwd[2];
    let mut r = model_params(VerificationReport::new("generator-consistency", "difference-quotients"), model)
        .param("t", t)
        .param("x", x)
        .param("h", h0)
        .note(format!("L P_t f = {lu:.12e}; forward errors {:.3e} {:.3e} {:.3e}", fwd[0], fwd[1], fwd[2]));
    let mut pass = (1.6..=2.4).contains(&fwd_ratio);
    if cen.len() == 3 {
        let cen_ratio = cen[1] / cen[2];
        r = r.note(format!("central error ratio {cen_ratio:.3}"));
        pass &= cen_ratio > 3.0 || cen[2] < 1e-10 * lu.abs().max(1.0);
    }
    r.samples = 6;
    r.observed = fwd_ratio;
    r.bound = 2.0;
    r.pass = pass;
    Ok(r)
}

/// Under the Gaussian model `L` is the Laplacian: compare the spectral
/// generator with a sixth-order finite-difference second derivative.
pub fn check_gaussian_laplacian(f: &TestFunctionSpec, points: &[f64]) -> Result<VerificationReport> {
    let model = SemigroupModel::gaussian(1)?;
    let h = 0.02 * f.resolution_scale();
    let mut worst = 0.0f64;
    for &x in points {
        let v = |k: f64| f.eval(&[x + k * h]);
        let d2 = (2.0 * v(-3.0) - 27.0 * v(-2.0) + 270.0 * v(-1.0) - 490.0 * v(0.0) + 270.0 * v(1.0) - 27.0 * v(2.0)
            + 2.0 * v(3.0))
            / (180.0 * h * h);
        let l = apply_generator(&model, f, 0.0, &[x])?;
        worst = worst.max((l - d2).abs());
    }
    Ok(model_params(VerificationReport::new("generator-consistency", "laplacian"), &model)
        .param("tol", 1e-6)
        .with(|r| {
            r.samples = points.len() as u64;
            r.observed = worst;
            r.bound = 1e-6;
            r.pass = worst <= 1e-6;
        }))
}

/// Spectral `P_t f(x)` against direct quadrature of `∫f(y)p_t(x−y)dy`.
pub fn check_spectral_physical(model: &SemigroupModel, f: &TestFunctionSpec, t: f64, points: &[f64]) -> Result<VerificationReport> {
    one_dim(model, f)?;
    let reach = points.iter().fold(0.0f64, |m, x| m.max(x.abs())) + f.extent() + 1.0;
    let field = SpectralField::new(model, f, t, Action::Semigroup, reach)?;
    let centers: Vec<f64> = f.atoms().iter().map(|a| a.center[0]).collect();
    let mut worst = 0.0f64;
    for &x in points {
        let mut splits = centers.clone();
        splits.push(x);
        let mut err = None;
        let direct = integrate_real_line(x, model.length_scale(t), &splits, 512, |y| match model.kernel_radial(t, x - y) {
            Ok(k) => f.eval(&[y]) * k,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        worst = worst.max((direct - field.eval(&[x])).abs());
    }
    Ok(model_params(VerificationReport::new("chapman-kolmogorov", "spectral-vs-physical"), model)
        .param("t", t)
        .param("tol", 1e-5)
        .with(|r| {
            r.samples = points.len() as u64;
            r.observed = worst;
            r.bound = 1e-5;
            r.pass = worst <= 1e-5;
        }))
}

/// Semigroup property `P_s(P_t f) = P_{s+t} f`, the outer convolution done
/// by quadrature in physical space over a window of half-width `W` around
/// `x`; the neglected far part is bounded by `sup|P_t f|·P(|X_s| > W)`.
pub fn check_semigroup_property(
    model: &SemigroupModel,
    f: &TestFunctionSpec,
    s: f64,
    t: f64,
    points: &[f64],
) -> Result<VerificationReport> {
    one_dim(model, f)?;
    let ell = model.length_scale(s).min(model.length_scale(t));
    let w = 400.0 * (model.length_scale(s) + f.decay_scale());
    let reach = w + points.iter().fold(0.0f64, |m, x| m.max(x.abs())) + f.extent();
    let inner = SpectralField::new(model, f, t, Action::Semigroup, reach)?;
    let outer = SpectralField::new(model, f, s + t, Action::Semigroup, reach)?;
    let centers: Vec<f64> = f.atoms().iter().map(|a| a.center[0]).collect();
    let sup = (0..=200)
        .map(|i| inner.eval(&[-reach + 2.0 * reach * i as f64 / 200.0]).abs())
        .fold(0.0, f64::max);
    let neglected = sup * model.tail_mass(s, w)?;
    let mut worst = 0.0f64;
    for &x in points {
        let core = 10.0 * (f.decay_scale() + model.length_scale(s)) + f.extent() + x.abs();
        let breaks = window_breaks(x, core, 0.5 * ell.min(f.resolution_scale()), w, &centers);
        let mut err = None;
        let conv = integrate_panels(&breaks, gl16(), |y| match model.kernel_radial(s, x - y) {
            Ok(k) => inner.eval(&[y]) * k,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        worst = worst.max((conv - outer.eval(&[x])).abs());
    }
    Ok(model_params(VerificationReport::new("chapman-kolmogorov", "semigroup-property"), model)
        .param("s", s)
        .param("t", t)
        .param("tol", 1e-6)
        .note(format!("neglected far-field bound {neglected:.3e}"))
        .with(|r| {
            r.samples = points.len() as u64;
            r.observed = worst;
            r.bound = 1e-6;
            r.pass = worst <= 1e-6;
        }))
}

/// Stein maximal probe: `g(x) = max_{t ∈ grid}|P_t f(x)|` must satisfy
/// `‖g‖_p ≤ p/(p−1)‖f‖_p`. `g` is evaluated at Gauss nodes over a window
/// large enough for every time in the grid; truncation can only lower `‖g‖_p`,
/// so this is a necessary-condition check.
pub fn stein_maximal_probe(model: &SemigroupModel, f: &TestFunctionSpec, times: &[f64], p: f64) -> Result<VerificationReport> {
    one_dim(model, f)?;
    if p <= 1.0 {
        return Err(LabError::param("Stein's inequality needs p > 1"));
    }
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let ell_max = model.length_scale(t_max.max(1e-300));
    let w = f.extent() + 40.0 * (f.decay_scale() + ell_max);
    let core = f.extent() + 4.0 * f.decay_scale();
    let centers: Vec<f64> = f.atoms().iter().map(|a| a.center[0]).collect();
    let breaks = window_breaks(0.0, core, 0.5 * f.resolution_scale(), w, &centers);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for b in breaks.windows(2) {
        gl16().push_mapped(b[0], b[1], &mut xs, &mut ws);
    }
    let mut g = vec![0.0f64; xs.len()];
    for &t in times {
        let field = SpectralField::new(model, f, t, Action::Semigroup, 2.0 * w)?;
        for (gi, &x) in g.iter_mut().zip(&xs) {
            *gi = gi.max(field.eval(&[x]).abs());
        }
    }
    let g_norm = g.iter().zip(&ws).map(|(v, w)| w * v.powf(p)).sum::<f64>().powf(1.0 / p);
    let f_norm = f.lp_norm(p);
    let bound = p / (p - 1.0) * f_norm;
    let contains_zero = times.contains(&0.0);
    let dominates = !contains_zero || xs.iter().zip(&g).all(|(x, v)| *v >= f.eval(&[*x]).abs());
    Ok(model_params(VerificationReport::new("stein-maximal", "maximal-norm"), model)
        .param("p", p)
        .param("t_max", t_max)
        .note(format!("||g||_p = {g_norm:.9e}, ||f||_p = {f_norm:.9e}"))
        .with(|r| {
            r.samples = (xs.len() * times.len()) as u64;
            r.observed = g_norm / f_norm;
            r.bound = p / (p - 1.0);
            r.pass = g_norm <= bound && dominates;
        }))
}

fn one_dim(model: &SemigroupModel, f: &TestFunctionSpec) -> Result<usize> {
    let d = f.validate()?;
    if d != model.d {
        return Err(LabError::param("function and model dimensions differ"));
    }
    if d != 1 {
        return Err(LabError::Unsupported("this check runs on R only".into()));
    }
    Ok(d)
}

trait With: Sized {
    fn with(mut self, f: impl FnOnce(&mut Self)) -> Self {
        f(&mut self);
        self
    }
}

impl With for VerificationReport {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_all_models() {
        let mut models = vec![SemigroupModel::gaussian(1).unwrap(), SemigroupModel::gaussian(2).unwrap()];
        for d in [1, 2] {
            for a in [0.5, 1.0, 1.5] {
                models.push(SemigroupModel::stable(a, d).unwrap());
            }
        }
        for m in &models {
            for t in [0.01, 1.0] {
                let r = check_normalization(m, t).unwrap();
                assert!(r.pass, "{m:?} t={t}: {}", r.lhs);
            }
        }
    }

    #[test]
    fn cauchy_chapman_kolmogorov_and_p2() {
        let m = SemigroupModel::stable(1.0, 1).unwrap();
        assert!(check_chapman_kolmogorov(&m, 0.3, 0.7, 1.1).unwrap().pass);
        let r = check_p1_p2(&m, &[1e-3, 0.1, 1.0, 10.0, 100.0], &[0.5, 1.0, 2.0]).unwrap();
        assert!(r.pass, "{r:?}");
        let g = SemigroupModel::gaussian(1).unwrap();
        assert!(check_p1_p2(&g, &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn stein_with_zero_time_dominates() {
        let m = SemigroupModel::stable(1.0, 1).unwrap();
        let f = TestFunctionSpec::bump(vec![0.0], 1.0, 1.0);
        let r = stein_maximal_probe(&m, &f, &[0.0], 2.0).unwrap();
        assert!(r.pass && (r.observed - 1.0).abs() < 1e-6, "{r:?}");
    }
}
