//! Deterministic summation and number formatting.

/// Pairwise (tree) sum with a fixed split structure, so the result depends
/// only on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{:.16e}", x)
}

/// Mean and standard error of the mean.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return (0.0, 0.0);
    }
    let mean = pairwise_sum(samples) / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Floor applied to every `ε^{k/7}`-derived tolerance.
pub const TOLERANCE_FLOOR: f64 = 1e-9;

/// `max(scale · ε^{1/7}, floor)`.
pub fn eps_tolerance(scale: f64, epsilon: f64) -> f64 {
    (scale * epsilon.max(0.0).powf(1.0 / 7.0)).max(TOLERANCE_FLOOR)
}

/// Distance from `x` to the nearest element of `targets`.
pub fn distance_to_set(x: f64, targets: &[f64]) -> f64 {
    targets.iter().map(|t| (x - t).abs()).fold(f64::INFINITY, f64::min)
}
