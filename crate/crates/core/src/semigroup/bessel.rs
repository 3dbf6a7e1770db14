//! Bessel function `J0` for the radial (d = 2) transforms.

/// `J0(z)`: periodic trapezoid rule on `(1/2π)∫cos(z sin θ)dθ` (spectrally
/// accurate, 64 nodes folded by symmetry) for `|z| ≤ 25`; Hankel asymptotic
/// expansion beyond.
pub fn bessel_j0(z: f64) -> f64 {
    let z = z.abs();
    if z <= 25.0 {
        const M: usize = 64;
        let mut acc = 2.0 + 2.0 * z.cos();
        for j in 1..M / 4 {
            let th = std::f64::consts::TAU * j as f64 / M as f64;
            acc += 4.0 * (z * th.sin()).cos();
        }
        acc / M as f64
    } else {
        // P ~ Σ(−1)^k a_{2k} z^{−2k}, Q ~ −Σ(−1)^k a_{2k+1} z^{−2k−1},
        // a_k = Π_{j=1..k}(2j−1)² / (k! 8^k).
        let mut a = 1.0;
        let mut p = 0.0;
        let mut q = 0.0;
        let mut zpow = 1.0;
        for k in 0..24 {
            if k > 0 {
                let kf = k as f64;
                a *= (2.0 * kf - 1.0).powi(2) / (kf * 8.0);
                zpow *= z;
            }
            let term = a / zpow;
            match k % 4 {
                0 => p += term,
                1 => q -= term,
                2 => p -= term,
                _ => q += term,
            }
            if term < 1e-17 {
                break;
            }
        }
        let chi = z - std::f64::consts::FRAC_PI_4;
        (2.0 / (std::f64::consts::PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// `1 − J0(z)` without cancellation for small `z`.
pub fn one_minus_j0(z: f64) -> f64 {
    let z = z.abs();
    if z < 0.5 {
        // Σ_{k≥1} (−1)^{k+1} (z/2)^{2k} / (k!)²
        let x = 0.25 * z * z;
        let mut term = x;
        let mut acc = 0.0;
        for k in 1..12 {
            acc += term;
            let kf = (k + 1) as f64;
            term *= -x / (kf * kf);
        }
        acc
    } else {
        1.0 - bessel_j0(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_reference_values() {
        // reference values from an independent double-precision library
        let cases = [
            (0.5, 0.938469807240813),
            (1.0, 0.7651976865579665),
            (5.0, -0.1775967713143383),
            (10.0, -0.24593576445134832),
            (24.9, 0.08324596835301536),
            (25.1, 0.10827567149994938),
            (30.0, -0.08636798358104031),
            (100.0, 0.01998585030422333),
        ];
        for (z, v) in cases {
            assert!((bessel_j0(z) - v).abs() < 1e-14, "z = {z}: {} vs {v}", bessel_j0(z));
        }
        assert_eq!(bessel_j0(0.0), 1.0);
        let z = 0.49;
        assert!((one_minus_j0(z) - (1.0 - bessel_j0(z))).abs() < 1e-15);
    }
}
