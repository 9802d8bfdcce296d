//! Kolmogorov-Smirnov tests and weighted empirical CDFs.
//!
//! Used by the verification suites (sampler correctness, distributional
//! correctness of updated sample sets) and by the buckling CDF output.

/// Critical coefficient c(alpha) for the KS statistic.
pub fn ks_critical(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// One-sample KS statistic of `data` against a CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> f64 {
    let mut xs = data.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let fx = cdf(x);
        d = d.max(fx - i as f64 / n).max((i + 1) as f64 / n - fx);
    }
    d
}

/// Two-sample KS statistic between unweighted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Two-sample KS statistic between a weighted sample (normalized weights)
/// and an unweighted one.
pub fn ks_two_sample_weighted(values: &[f64], weights: &[f64], other: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let mut wv: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
    wv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut xb = other.to_vec();
    xb.sort_by(f64::total_cmp);
    let nb = xb.len() as f64;
    let (mut i, mut j) = (0usize, 0usize);
    let mut fa = 0.0f64;
    let mut d = 0.0f64;
    while i < wv.len() && j < xb.len() {
        let x = wv[i].0.min(xb[j]);
        while i < wv.len() && wv[i].0 <= x {
            fa += wv[i].1;
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((fa - j as f64 / nb).abs());
    }
    d
}

/// Weighted empirical CDF: `(x, F(x))` at each sample point, ascending,
/// right-continuous, ending at 1 (up to rounding of the weight sum).
pub fn empirical_cdf_weighted(values: &[f64], weights: &[f64]) -> Vec<(f64, f64)> {
    let mut wv: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
    wv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    wv.into_iter()
        .map(|(x, w)| {
            acc += w;
            (x, acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_value_at_one_percent() {
        assert!((ks_critical(0.01) - 1.6276).abs() < 1e-4);
    }

    #[test]
    fn one_sample_uniform_fit() {
        let n = 10_000;
        let data: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_one_sample(&data, |x| x.clamp(0.0, 1.0));
        assert!(d < 1e-3, "stratified uniform sample should fit tightly, d = {d}");
    }

    #[test]
    fn two_sample_identical_is_zero() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
    }

    #[test]
    fn two_sample_disjoint_is_one() {
        let a = [1.0, 2.0];
        let b = [5.0, 6.0];
        assert_eq!(ks_two_sample(&a, &b), 1.0);
    }

    #[test]
    fn weighted_matches_unweighted_for_uniform_weights() {
        let a = [3.0, 1.0, 2.0, 4.0];
        let w = [0.25; 4];
        let b = [1.5, 2.5, 3.5, 0.5];
        let d1 = ks_two_sample_weighted(&a, &w, &b);
        let d2 = ks_two_sample(&a, &b);
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn ecdf_monotone_ends_at_one() {
        let vals = [2.0, 1.0, 5.0, 3.0];
        let w = [0.1, 0.4, 0.3, 0.2];
        let cdf = empirical_cdf_weighted(&vals, &w);
        assert!(cdf.windows(2).all(|p| p[0].1 <= p[1].1 && p[0].0 <= p[1].0));
        assert!((cdf.last().unwrap().1 - 1.0).abs() < 1e-12);
    }
}
