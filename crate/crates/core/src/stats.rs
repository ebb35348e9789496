//! Small statistics helpers shared by the Monte Carlo harness and the tests.

/// Sample mean; 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased (n−1) sample variance, two-pass for stability.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Root mean squared deviation of `xs` from `target`.
pub fn rmse(xs: &[f64], target: f64) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    (xs.iter().map(|x| (x - target) * (x - target)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Kolmogorov–Smirnov distance between the empirical law of `sample` and a
/// continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs: Vec<f64> = sample.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    sup
}

/// CDF of the Gamma(2, rate) distribution: 1 − e^{−λu}(1 + λu).
pub fn gamma2_cdf(rate: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    1.0 - (-rate * u).exp() * (1.0 + rate * u)
}

/// Least-squares slope of y against x.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// |a − b| measured in units in the last place of the larger magnitude.
pub fn ulp_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let scale = a.abs().max(b.abs());
    let ulp = if scale == 0.0 {
        f64::MIN_POSITIVE
    } else {
        // spacing between consecutive floats at this magnitude
        let bits = scale.to_bits();
        f64::from_bits(bits + 1) - scale
    };
    (a - b).abs() / ulp
}
