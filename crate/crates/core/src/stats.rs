//! Goodness-of-fit statistics for binned detection data.

#[allow(unused_imports)]
use num_traits::Float;

/// Lanczos approximation (g = 7, 9 terms), accurate to ~1e-13 for x > 0.
fn ln_gamma(x: f64) -> f64 {
    const COEFFICIENTS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection formula
        let pi = core::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_93;
    for (i, &c) in COEFFICIENTS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * core::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized upper incomplete gamma `Q(a, x) = Gamma(a, x) / Gamma(a)`.
///
/// Series expansion below `x < a + 1`, modified Lentz continued fraction
/// above; the split keeps both sides rapidly convergent.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if a <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut term = sum;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit test of observed counts against a probability
/// vector. Adjacent categories are pooled until each pooled expectation
/// reaches `min_expected` counts, the usual validity requirement for the
/// chi-square approximation.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64], min_expected: u64) -> ChiSquareTest {
    assert_eq!(observed.len(), probabilities.len());
    let total: u64 = observed.iter().sum();
    let total_f = total as f64;

    let mut statistic = 0.0;
    let mut bins = 0usize;
    let mut pooled_obs = 0u64;
    let mut pooled_p = 0.0;
    let flush = |obs: u64, p: f64, statistic: &mut f64, bins: &mut usize| {
        let expected = total_f * p;
        if expected > 0.0 {
            let diff = obs as f64 - expected;
            *statistic += diff * diff / expected;
            *bins += 1;
        }
    };
    for (&obs, &p) in observed.iter().zip(probabilities) {
        pooled_obs += obs;
        pooled_p += p;
        if total_f * pooled_p >= min_expected as f64 {
            flush(pooled_obs, pooled_p, &mut statistic, &mut bins);
            pooled_obs = 0;
            pooled_p = 0.0;
        }
    }
    // fold the remainder into one more category
    if pooled_p > 0.0 || pooled_obs > 0 {
        flush(pooled_obs, pooled_p, &mut statistic, &mut bins);
    }

    let dof = bins.saturating_sub(1);
    let p_value = if dof == 0 { 1.0 } else { gamma_q(dof as f64 / 2.0, statistic / 2.0) };
    ChiSquareTest { statistic, dof, p_value }
}

/// Two-sample chi-square identity test on paired count vectors, with the
/// same adjacent pooling rule applied to the combined counts.
pub fn chi_square_two_sample(first: &[u64], second: &[u64], min_combined: u64) -> ChiSquareTest {
    assert_eq!(first.len(), second.len());
    let total_a: u64 = first.iter().sum();
    let total_b: u64 = second.iter().sum();
    let ratio_ab = (total_a as f64 / total_b as f64).sqrt();
    let ratio_ba = 1.0 / ratio_ab;

    let mut statistic = 0.0;
    let mut bins = 0usize;
    let mut pooled_a = 0u64;
    let mut pooled_b = 0u64;
    for (&a, &b) in first.iter().zip(second) {
        pooled_a += a;
        pooled_b += b;
        if pooled_a + pooled_b >= min_combined {
            let diff = pooled_a as f64 * ratio_ba - pooled_b as f64 * ratio_ab;
            statistic += diff * diff / (pooled_a + pooled_b) as f64;
            bins += 1;
            pooled_a = 0;
            pooled_b = 0;
        }
    }
    if pooled_a + pooled_b > 0 {
        let diff = pooled_a as f64 * ratio_ba - pooled_b as f64 * ratio_ab;
        statistic += diff * diff / (pooled_a + pooled_b) as f64;
        bins += 1;
    }

    let dof = bins.saturating_sub(1);
    let p_value = if dof == 0 { 1.0 } else { gamma_q(dof as f64 / 2.0, statistic / 2.0) };
    ChiSquareTest { statistic, dof, p_value }
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
pub fn log_log_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let lx = x.ln();
        let ly = y.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// `|observed - expected|` in units of the binomial standard deviation.
pub fn binomial_z(observed: u64, trials: u64, probability: f64) -> f64 {
    let sigma = (probability * (1.0 - probability) * trials as f64).sqrt();
    if sigma == 0.0 {
        return 0.0;
    }
    (observed as f64 - probability * trials as f64) / sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn ln_gamma_known_values() {
        // Gamma(5) = 24, Gamma(0.5) = sqrt(pi)
        assert!((ln_gamma(5.0) - 24.0f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - core::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        assert!((ln_gamma(1.0)).abs() < 1e-13);
    }

    #[test]
    fn gamma_q_reference_points() {
        // chi-square survival values: dof=1, x=3.841 -> p ~ 0.05
        assert!((gamma_q(0.5, 3.841_458_820_694_124 / 2.0) - 0.05).abs() < 1e-6);
        // dof=4, x=9.487729 -> p ~ 0.05
        assert!((gamma_q(2.0, 9.487_729_036_781_154 / 2.0) - 0.05).abs() < 1e-6);
        assert!((gamma_q(3.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chi_square_gof_matches_reference() {
        // worked example: counts (28, 31, 40, 35) against uniform
        let observed = vec![28u64, 31, 40, 35];
        let probs = vec![0.25; 4];
        let test = chi_square_gof(&observed, &probs, 1);
        assert_eq!(test.dof, 3);
        assert!((test.statistic - 2.417_910_447_761_194).abs() < 1e-10);
        assert!((test.p_value - 0.490_309_306_965_388_3).abs() < 1e-10);
    }

    #[test]
    fn pooling_respects_minimum_expectation() {
        let observed = vec![1u64; 100];
        let probs = vec![0.01; 100];
        let test = chi_square_gof(&observed, &probs, 10);
        // 100 counts at p=0.01 each: pooled into groups of expectation 10
        assert_eq!(test.dof, 9);
        assert!(test.statistic < 1e-12);
        assert!(test.p_value > 0.999);
    }

    #[test]
    fn two_sample_identity_on_identical_counts() {
        let a = vec![40u64, 52, 38, 45];
        let test = chi_square_two_sample(&a, &a, 1);
        assert!(test.statistic < 1e-12);
        assert!(test.p_value > 0.999);
    }

    #[test]
    fn two_sample_detects_gross_mismatch() {
        let a = vec![100u64, 0, 100, 0];
        let b = vec![0u64, 100, 0, 100];
        let test = chi_square_two_sample(&a, &b, 1);
        assert!(test.p_value < 1e-6);
    }

    #[test]
    fn log_log_fit_recovers_power_law() {
        let points: Vec<(f64, f64)> =
            [1.0e4, 1.0e5, 1.0e6].iter().map(|&x| (x, 3.0 * x.powf(-0.5))).collect();
        let (slope, intercept) = log_log_fit(&points);
        assert!((slope - (-0.5)).abs() < 1e-12);
        assert!((intercept - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn binomial_z_is_zero_on_the_mean() {
        assert_eq!(binomial_z(50, 100, 0.5), 0.0);
        assert!((binomial_z(60, 100, 0.5) - 2.0).abs() < 1e-12);
    }
}
