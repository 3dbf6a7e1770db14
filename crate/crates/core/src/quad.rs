//! Quadrature building blocks: Gauss–Legendre rules, composite panels,
//! real-line integration, zeta functions and polynomial extrapolation.

use std::sync::OnceLock;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over [a, b].
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Push mapped nodes and weights of [a, b] onto the given buffers.
    pub fn push_mapped(&self, a: f64, b: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            xs.push(mid + half * x);
            ws.push(w * half);
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 8-point rule.
pub fn gl8() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(8))
}

/// Shared 16-point rule.
pub fn gl16() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(16))
}

/// Composite rule over consecutive breakpoints.
pub fn integrate_panels(
    breaks: &[f64],
    rule: &GaussLegendre,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    breaks
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .sum()
}

/// Breakpoints `lo, lo*q^-1, ...` growing geometrically from `lo` up to `hi`.
pub fn geometric_breaks(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && ratio > 1.0);
    let mut v = vec![lo];
    let mut x = lo;
    while x * ratio < hi {
        x *= ratio;
        v.push(x);
    }
    v.push(hi);
    v
}

/// Uniform breakpoints on [a, b] with panel width at most `width`.
pub fn uniform_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = (((b - a) / width).ceil() as usize).max(1);
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Integral over [0, ∞) graded towards 0 (geometric panels from `scale·1e-14`)
/// and towards infinity (geometric panels up to `scale·far`).
pub fn integrate_half_line(scale: f64, far: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let rule = gl16();
    let mut breaks = vec![0.0];
    breaks.extend(geometric_breaks(scale * 1e-14, scale * far, 1.6));
    integrate_panels(&breaks, rule, &mut f)
}

/// Integral over R via x = c + λ·tan θ, θ ∈ (-π/2, π/2), which turns
/// algebraic tails into bounded integrands; `splits` are extra breakpoints.
pub fn integrate_real_line(
    center: f64,
    scale: f64,
    splits: &[f64],
    panels: usize,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut thetas: Vec<f64> = (0..=panels)
        .map(|i| -half_pi + std::f64::consts::PI * i as f64 / panels as f64)
        .collect();
    for &s in splits {
        thetas.push(((s - center) / scale).atan());
    }
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thetas.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let rule = gl16();
    let mut acc = 0.0;
    for w in thetas.windows(2) {
        acc += rule.integrate(w[0], w[1], |th| {
            let c = th.cos();
            let x = center + scale * th.tan();
            if c == 0.0 {
                0.0
            } else {
                f(x) * scale / (c * c)
            }
        });
    }
    acc
}

const BERNOULLI_2K: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (a+k)^{-s}, analytically continued in s ≠ 1,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(a > 0.0, "Hurwitz zeta needs a > 0");
    assert!((s - 1.0).abs() > 1e-12, "zeta pole at s = 1");
    let n_direct = 12usize;
    let mut sum = 0.0;
    for k in 0..n_direct {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + n_direct as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) / (2j)!
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI_2K.iter().enumerate() {
        let jj = (j + 1) as f64;
        sum += b / fact * rising * x.powf(-s - 2.0 * jj + 1.0);
        rising *= (s + 2.0 * jj - 1.0) * (s + 2.0 * jj);
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
    }
    sum
}

/// Riemann zeta ζ(s) for real s ≠ 1.
pub fn riemann_zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// Polynomial extrapolation to x = 0 (Neville) through the points (xs, ys).
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut p = ys.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

/// Composite Simpson weights for `n` equally spaced nodes (n odd) with step `h`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd node count ≥ 3");
    (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 8, 16, 33] {
            let r = GaussLegendre::new(n);
            let deg = 2 * n - 1;
            let got = r.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n}");
            let wsum: f64 = r.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zeta_known_values() {
        assert!((riemann_zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(0.0) + 0.5).abs() < 1e-14);
        assert!((riemann_zeta(-1.0) + 1.0 / 12.0).abs() < 1e-14);
        assert!(riemann_zeta(-2.0).abs() < 1e-12);
        // ζ(1/2) = -1.4603545088095868
        assert!((riemann_zeta(0.5) + 1.460_354_508_809_586_8).abs() < 1e-13);
        // ζ(s, a) - ζ(s, a+1) = a^{-s}
        let d = hurwitz_zeta(1.5, 3.0) - hurwitz_zeta(1.5, 4.0);
        assert!((d - 3f64.powf(-1.5)).abs() < 1e-14);
    }

    #[test]
    fn real_line_integrates_cauchy_density() {
        let v = integrate_real_line(0.3, 1.0, &[], 16, |x| {
            1.0 / (std::f64::consts::PI * (1.0 + x * x))
        });
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn extrapolation_recovers_polynomial_intercept() {
        let xs = [0.2, 0.1, 0.05, 0.025];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 2.0 * x - x * x + 0.5 * x * x * x).collect();
        assert!((extrapolate_to_zero(&xs, &ys) - 3.0).abs() < 1e-12);
    }
}
