//! Binomial and Poisson cumulative distribution functions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use statrs::function::gamma::ln_gamma;

use super::exact::Exact;
use crate::error::{Error, Result};

/// Neumaier-compensated sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn ln_choose(m: u64, i: u64) -> f64 {
    ln_gamma(m as f64 + 1.0) - ln_gamma(i as f64 + 1.0) - ln_gamma((m - i) as f64 + 1.0)
}

/// Largest `m` summed with directly computed coefficients.
const DIRECT_TERMS: u64 = 64;

/// Sum of `P(Binomial(m, p) = i)` over `i` in `range`.
fn binom_mass(m: u64, p: f64, range: std::ops::RangeInclusive<u64>) -> f64 {
    let mut acc = CompensatedSum::default();
    if m <= DIRECT_TERMS {
        let q = 1.0 - p;
        let mut choose = 1.0f64;
        for i in 0..=*range.end() {
            if i >= *range.start() {
                acc.add(choose * p.powi(i as i32) * q.powi((m - i) as i32));
            }
            choose = choose * (m - i) as f64 / (i + 1) as f64;
        }
    } else {
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        for i in range {
            acc.add((ln_choose(m, i) + i as f64 * lp + (m - i) as f64 * lq).exp());
        }
    }
    acc.value()
}

/// `B_{m,p}(k) = P(Binomial(m, p) <= k)`; terms are formed directly for small
/// `m` and in log space beyond. Above the mean the upper tail is summed and
/// complemented.
pub fn binom_cdf(m: u64, p: f64, k: u64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p = {p} not in [0, 1]");
    if k >= m || p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return 0.0;
    }
    if k as f64 >= m as f64 * p {
        (1.0 - binom_mass(m, p, k + 1..=m)).max(0.0)
    } else {
        binom_mass(m, p, 0..=k).min(1.0)
    }
}

/// Exact `B_{m,p}(k)` for rational `p`, returned unreduced.
pub fn binom_cdf_exact(m: u64, p: &BigRational, k: u64) -> Result<Exact> {
    if *p < BigRational::zero() || *p > BigRational::one() {
        return Err(Error::InvalidParameter(format!("p = {p} not in [0, 1]")));
    }
    if k >= m {
        return Ok(Exact::one());
    }
    let a = p.numer().clone();
    let q = p.denom().clone();
    let r = &q - &a;
    // N = r^(m-k) * sum_{i<=k} C(m,i) a^i r^(k-i), accumulated ascending in i
    let mut inner = BigInt::zero();
    let mut a_pow = BigInt::one();
    let mut binom = BigInt::one();
    for i in 0..=k {
        inner = inner * &r + &binom * &a_pow;
        a_pow *= &a;
        binom = binom * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    let num = num_traits::pow(r, (m - k) as usize) * inner;
    let den = num_traits::pow(q, m as usize);
    Ok(Exact::new(num, den))
}

/// `P_lambda(k) = P(Poisson(lambda) <= k)`.
pub fn poisson_cdf(lambda: f64, k: u64) -> f64 {
    assert!(lambda >= 0.0 && lambda.is_finite(), "lambda = {lambda} must be finite and >= 0");
    if lambda == 0.0 {
        return 1.0;
    }
    let ll = lambda.ln();
    let mut acc = CompensatedSum::default();
    for i in 0..=k {
        acc.add((i as f64 * ll - lambda - ln_gamma(i as f64 + 1.0)).exp());
    }
    acc.value().min(1.0)
}

/// `P(Binomial(n, p) >= j)`.
pub fn binom_upper_tail(n: u64, p: f64, j: u64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    1.0 - binom_cdf(n, p, j - 1)
}
