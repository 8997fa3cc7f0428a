/// Wilson score interval for `successes` out of `trials` at normal quantile
/// `z`. Returns `(0, 1)` for an empty sample.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // Rounding can push an endpoint past the point estimate at p = 0 or 1.
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

/// Normal-approximation interval for a mean from exact integer moments.
pub(crate) fn mean_interval(sum: u128, sum_sq: u128, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum as f64 / n as f64;
    if n == 1 {
        return (mean, mean);
    }
    let n128 = n as u128;
    // n * sum_sq - sum^2 is n^2 times the population variance; exact in integers.
    let scaled = n128 * sum_sq - sum * sum;
    let var = scaled as f64 / (n as f64 * (n - 1) as f64);
    let half = z * (var / n as f64).sqrt();
    (mean - half, mean + half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // statsmodels proportion_confint(81, 263, method="wilson").
        let (lo, hi) = wilson_interval(81, 263, 1.959_963_984_540_054);
        assert!((lo - 0.255_288_519_878_274_2).abs() < 1e-12, "{lo}");
        assert!((hi - 0.366_209_576_982_8).abs() < 1e-12, "{hi}");
    }

    #[test]
    fn wilson_edges() {
        assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
        let (lo, hi) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100, 1.96);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.95);
    }

    #[test]
    fn mean_interval_matches_direct() {
        let xs = [3u64, 5, 1, 9, 4, 4, 2];
        let n = xs.len() as u64;
        let sum: u128 = xs.iter().map(|&x| x as u128).sum();
        let sum_sq: u128 = xs.iter().map(|&x| (x * x) as u128).sum();
        let mean = sum as f64 / n as f64;
        let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let (lo, hi) = mean_interval(sum, sum_sq, n, 2.0);
        assert!((hi - lo - 4.0 * (var / n as f64).sqrt()).abs() < 1e-12);
        assert!(((lo + hi) / 2.0 - mean).abs() < 1e-12);
    }
}
