//! Small least-squares and sample-moment helpers.

use crate::scalar::Real;

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Classical OLS standard error of the slope (zero for two points).
    pub slope_stderr: T,
    pub n: usize,
}

/// `None` when fewer than two points or all `x` coincide.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> Option<LinearFit<T>> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let nf = T::lit(n as f64);
    let mx = x[..n].iter().fold(T::zero(), |a, &b| a + b) / nf;
    let my = y[..n].iter().fold(T::zero(), |a, &b| a + b) / nf;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for i in 0..n {
        sxx = sxx + (x[i] - mx) * (x[i] - mx);
        sxy = sxy + (x[i] - mx) * (y[i] - my);
    }
    if !(sxx > T::zero()) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let rss = (0..n).fold(T::zero(), |a, i| {
            let r = y[i] - intercept - slope * x[i];
            a + r * r
        });
        (rss / T::lit((n - 2) as f64) / sxx).sqrt()
    } else {
        T::zero()
    };
    Some(LinearFit { slope, intercept, slope_stderr, n })
}

/// Sample mean and standard error of the mean (zero spread for one sample).
pub fn mean_stderr<T: Real>(xs: &[T]) -> (T, T) {
    let n = xs.len();
    if n == 0 {
        return (T::nan(), T::nan());
    }
    let nf = T::lit(n as f64);
    let mean = xs.iter().fold(T::zero(), |a, &b| a + b) / nf;
    if n == 1 {
        return (mean, T::zero());
    }
    let var = xs.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean)) / T::lit((n - 1) as f64);
    (mean, (var / nf).sqrt())
}
