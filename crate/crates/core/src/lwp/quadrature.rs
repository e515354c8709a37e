/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `∫₀ʰ f(σ) dσ` by 16-point Gauss–Legendre on panels of width at most
/// `panel`.
pub(crate) fn integrate(h: f64, panel: f64, rule: &(Vec<f64>, Vec<f64>), f: impl Fn(f64) -> f64) -> f64 {
    let panels = (h / panel).ceil().max(1.0) as usize;
    let w = h / panels as f64;
    let mut acc = 0.0;
    for j in 0..panels {
        let mid = (j as f64 + 0.5) * w;
        for (x, c) in rule.0.iter().zip(&rule.1) {
            acc += c * f(mid + 0.5 * w * x);
        }
    }
    0.5 * w * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let rule = gauss_legendre(16);
        assert!((rule.1.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in 0..32 {
            let got: f64 = rule.0.iter().zip(&rule.1).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
            assert!((got - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn oscillatory_integral() {
        let rule = gauss_legendre(16);
        let k = 40.0;
        let got = integrate(1.0, 0.5 / k * 4.0, &rule, |s| (k * s).sin() * s);
        let exact = ((k).sin() - k * k.cos()) / (k * k);
        assert!((got - exact).abs() < 1e-14);
    }
}
