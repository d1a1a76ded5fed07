//! Binomial confidence bounds used by the Monte Carlo verdicts.

use statrs::function::beta::beta_reg;

/// `sqrt(p (1 - p) / n)` at the empirical frequency.
pub fn binomial_stderr(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let p = successes as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Inverse of `x -> I_x(a, b)` by bisection.
fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// One-sided Clopper-Pearson lower bound at confidence `1 - alpha`.
pub fn clopper_pearson_lower(successes: u64, trials: u64, alpha: f64) -> f64 {
    assert!(successes <= trials && trials > 0);
    if successes == 0 {
        return 0.0;
    }
    beta_quantile(successes as f64, (trials - successes + 1) as f64, alpha)
}

/// One-sided Clopper-Pearson upper bound at confidence `1 - alpha`.
pub fn clopper_pearson_upper(successes: u64, trials: u64, alpha: f64) -> f64 {
    assert!(successes <= trials && trials > 0);
    if successes == trials {
        return 1.0;
    }
    beta_quantile((successes + 1) as f64, (trials - successes) as f64, 1.0 - alpha)
}
