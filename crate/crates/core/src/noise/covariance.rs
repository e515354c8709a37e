use crate::scalar::Real;

/// Covariance of the one-step Gaussian increment `(δΨ̂_n, δ∂ₜΨ̂_n)`.
///
/// Entries are complex second moments `E[a b̄]`; for `n ≠ 0` the increment is
/// circular so these determine its law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCovariance<T> {
    pub psi: T,
    pub cross: T,
    pub psit: T,
}

/// Below this value of `h|n|` the closed forms are replaced by series.
const SERIES_CUTOFF: f64 = 1e-4;

/// Closed-form covariance accumulated over one step of length `h` by the
/// kernels `sin(τ|n|)/|n|` (position) and `cos(τ|n|)` (velocity):
///
/// ```text
/// psi   = φ̂² ∫₀ʰ sin²(τk)/k² dτ = φ̂² (h/2 − sin(2hk)/(4k)) / k²
/// cross = φ̂² ∫₀ʰ sin(τk)cos(τk)/k dτ = φ̂² sin²(hk) / (2k²)
/// psit  = φ̂² ∫₀ʰ cos²(τk) dτ = φ̂² (h/2 + sin(2hk)/(4k))
/// ```
///
/// with `k = |n|` and the limits `h³/3`, `h²/2`, `h` at `k = 0`.
pub fn mode_covariance<T: Real>(abs_freq: T, h: T, phi: T) -> ModeCovariance<T> {
    let k = abs_freq;
    let x = h * k;
    let phi2 = phi * phi;
    let (psi, cross, psit) = if x < T::lit(SERIES_CUTOFF) {
        let k2 = k * k;
        let h2 = h * h;
        (
            h * h2 * (T::lit(1.0 / 3.0) - k2 * h2 / T::lit(15.0) + T::lit(2.0 / 315.0) * k2 * k2 * h2 * h2),
            h2 * (T::lit(0.5) - k2 * h2 / T::lit(6.0) + k2 * k2 * h2 * h2 / T::lit(45.0)),
            h * (T::one() - k2 * h2 / T::lit(3.0) + k2 * k2 * h2 * h2 / T::lit(15.0)),
        )
    } else {
        let s2 = (T::lit(2.0) * x).sin() / (T::lit(4.0) * k);
        let half = h * T::lit(0.5);
        let sx = x.sin();
        ((half - s2) / (k * k), sx * sx / (T::lit(2.0) * k * k), half + s2)
    };
    ModeCovariance { psi: phi2 * psi, cross: phi2 * cross, psit: phi2 * psit }
}

impl<T: Real> ModeCovariance<T> {
    /// Lower Cholesky factor `(l11, l21, l22)`; semidefinite inputs give a
    /// zero pivot instead of NaN.
    pub fn cholesky(&self) -> (T, T, T) {
        let l11 = self.psi.max(T::zero()).sqrt();
        let l21 = if l11 > T::zero() { self.cross / l11 } else { T::zero() };
        let l22 = (self.psit - l21 * l21).max(T::zero()).sqrt();
        (l11, l21, l22)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson on the defining integrals.
    fn quadrature(k: f64, h: f64) -> (f64, f64, f64) {
        let n = 20_000;
        let dx = h / n as f64;
        let s = |t: f64| if k == 0.0 { t } else { (k * t).sin() / k };
        let cfun = |t: f64| (k * t).cos();
        let mut acc = (0.0, 0.0, 0.0);
        for i in 0..=n {
            let t = i as f64 * dx;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc.0 += w * s(t) * s(t);
            acc.1 += w * s(t) * cfun(t);
            acc.2 += w * cfun(t) * cfun(t);
        }
        (acc.0 * dx / 3.0, acc.1 * dx / 3.0, acc.2 * dx / 3.0)
    }

    #[test]
    fn zero_mode_unit_step() {
        let c = mode_covariance(0.0f64, 1.0, 1.0);
        assert!((c.psi - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.cross - 0.5).abs() < 1e-15);
        assert!((c.psit - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_mode_position_variance() {
        for h in [0.01, 0.3, 1.0, 2.5] {
            let c = mode_covariance(1.0f64, h, 1.0);
            assert!((c.psi - (h / 2.0 - (2.0 * h).sin() / 4.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_numerical_quadrature() {
        for &k in &[0.0, 1.0, 2f64.sqrt(), 4.0, 13.0] {
            for &h in &[1e-3, 0.1, 1.0] {
                let c = mode_covariance(k, h, 0.7);
                let (a, b, d) = quadrature(k, h);
                let scale = 0.49;
                assert!((c.psi - scale * a).abs() < 1e-12 * (1.0 + a), "k={k} h={h}");
                assert!((c.cross - scale * b).abs() < 1e-12 * (1.0 + b));
                assert!((c.psit - scale * d).abs() < 1e-12 * (1.0 + d));
            }
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        for k in [0.5f64, 3.0] {
            let h = 0.99e-4 / k;
            let h2 = 1.01e-4 / k;
            let (a, b) = (mode_covariance(k, h, 1.0), mode_covariance(k, h2, 1.0));
            let r = (h2 / h).powi(3);
            assert!((b.psi / a.psi / r - 1.0).abs() < 1e-6);
            // relative accuracy of the series against the closed form at the seam
            let closed = (h / 2.0 - (2.0 * h * k).sin() / (4.0 * k)) / (k * k);
            assert!((a.psi - closed).abs() < 1e-6 * closed);
        }
    }

    #[test]
    fn white_noise_scaling() {
        for h in [1e-2, 1e-4, 1e-6, 1e-8] {
            let c = mode_covariance(3.0f64, h, 2.0);
            assert!((c.psit / h - 4.0).abs() < 10.0 * h);
            assert!(c.psi < 2.0 * h * h * h && c.cross < 3.0 * h * h);
        }
    }

    #[test]
    fn cholesky_reconstructs() {
        let c = mode_covariance(2.0f64, 0.37, 1.3);
        let (a, b, d) = c.cholesky();
        assert!((a * a - c.psi).abs() < 1e-15);
        assert!((a * b - c.cross).abs() < 1e-15);
        assert!((b * b + d * d - c.psit).abs() < 1e-14);
        let z = mode_covariance(2.0f64, 0.37, 0.0).cholesky();
        assert_eq!(z, (0.0, 0.0, 0.0));
    }
}
