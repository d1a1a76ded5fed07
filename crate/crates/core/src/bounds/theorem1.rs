//! Site and bond parameters of the high-dimensional exploration, and the
//! checks that they land in the supercritical region of mixed percolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{decimal_from_f64, parse_decimal, Exact};
use super::tails::{binom_cdf_exact, poisson_cdf};
use crate::error::{Error, Result};

/// Largest dimension checked by direct evaluation.
pub const DIRECT_LIMIT: u32 = 4000;
/// Guard used when a threshold is compared in floating point.
pub const FLOAT_GUARD: f64 = 1e-12;

/// `(s, b)` thresholds of the main high-dimensional claim.
pub const MAIN_THRESHOLDS: (&str, &str) = ("0.9765", "0.5622");
/// The two threshold pairs for the low-dimensional cases.
pub const TABLE_THRESHOLDS: [(&str, &str); 2] = [("0.9809", "0.5596"), ("0.9708", "0.5806")];

/// Low-dimensional cases: `(d, smallest kappa)`.
pub const TABLE_CASES: [(u32, u32); 11] = [
    (4, 7),
    (5, 8),
    (6, 8),
    (7, 9),
    (8, 9),
    (9, 9),
    (10, 9),
    (11, 9),
    (12, 9),
    (14, 9),
    (16, 9),
];

#[derive(Debug, Clone)]
pub struct BoundParams {
    pub d: u32,
    pub kappa: u32,
    pub t: BigRational,
    pub d_prime: u32,
}

impl BoundParams {
    /// Parameters at `t = c / d`.
    pub fn with_rate(d: u32, kappa: u32, c: &BigRational, d_prime: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be positive".into()));
        }
        let t = c / BigRational::from_integer(BigInt::from(d));
        Self::with_time(d, kappa, t, d_prime)
    }

    pub fn with_time(d: u32, kappa: u32, t: BigRational, d_prime: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("d = {d} must be at least 2")));
        }
        if d_prime < 2 || d_prime > d {
            return Err(Error::InvalidParameter(format!("d' = {d_prime} must satisfy 2 <= d' <= d")));
        }
        if kappa < 2 * d_prime - 1 {
            return Err(Error::InvalidParameter(format!(
                "kappa = {kappa} must be at least 2d' - 1 = {}",
                2 * d_prime - 1
            )));
        }
        if t < BigRational::zero() || t > BigRational::one() {
            return Err(Error::InvalidParameter(format!("t = {t} not in [0, 1]")));
        }
        Ok(Self { d, kappa, t, d_prime })
    }
}

/// Exact `(s, b)` with float views.
#[derive(Debug, Clone)]
pub struct SiteBond {
    pub s: Exact,
    pub b: Exact,
}

impl SiteBond {
    pub fn s_f64(&self) -> f64 {
        self.s.to_f64()
    }

    pub fn b_f64(&self) -> f64 {
        self.b.to_f64()
    }

    /// Strict comparison against decimal thresholds.
    pub fn exceeds(&self, s_min: &BigRational, b_min: &BigRational) -> bool {
        self.s.gt(s_min) && self.b.gt(b_min)
    }
}

/// `s = B_{2d-(2d'-1), t}(kappa-(2d'-1))` and `b = 1 - (1-t)^{floor(d/d')} / s`.
pub fn s_b_of(params: &BoundParams) -> Result<SiteBond> {
    let j = 2 * params.d_prime - 1;
    let m = (2 * params.d - j) as u64;
    let k = (params.kappa - j) as u64;
    let s = binom_cdf_exact(m, &params.t, k)?;
    if s.is_zero() {
        return Err(Error::InvalidParameter("s vanishes; b is undefined".into()));
    }
    let h = (params.d / params.d_prime) as usize;
    let one_minus_t = BigRational::one() - &params.t;
    let miss = Exact::new(
        num_traits::pow(one_minus_t.numer().clone(), h),
        num_traits::pow(one_minus_t.denom().clone(), h),
    );
    let b = Exact::one().sub(&miss.div(&s));
    Ok(SiteBond { s, b })
}

/// The closed-form lower bounds used beyond the direct-check range:
/// `s >= P_{2c}(kappa - 3) - c (1 - e^{-2c}) / floor` and
/// `b >= 1 - exp(-(c/2)(1 - 1/floor)) / s_lower`.
pub fn chen_lower_bounds(c: f64, kappa: u32, floor: u32) -> Result<(f64, f64)> {
    if kappa < 3 || floor == 0 || c <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need kappa >= 3, floor >= 1, c > 0 (got kappa={kappa}, floor={floor}, c={c})"
        )));
    }
    let floor = floor as f64;
    let s_lower = poisson_cdf(2.0 * c, (kappa - 3) as u64) - c * (1.0 - (-2.0 * c).exp()) / floor;
    let b_lower = 1.0 - (-(c / 2.0) * (1.0 - 1.0 / floor)).exp() / s_lower;
    Ok((s_lower, b_lower))
}

/// `lim_{d -> infinity} (s, b)` at `t = c/d`, `d' = 2`.
pub fn poisson_limit(c: f64, kappa: u32) -> (f64, f64) {
    let s = poisson_cdf(2.0 * c, (kappa - 3) as u64);
    (s, 1.0 - (-c / 2.0).exp() / s)
}

/// The universal lower bound `1/(2d - 1)` on the critical time.
pub fn branching_lower_bound(d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    Ok(1.0 / (2.0 * d as f64 - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    Chen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    /// For `chen` rows this is the floor parameter; the row covers all larger `d`.
    pub d: u32,
    pub kappa: u32,
    pub s: f64,
    pub b: f64,
    pub s_threshold: f64,
    pub b_threshold: f64,
    pub method: Method,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub c: String,
    pub rows: Vec<BoundRow>,
    pub all_pass: bool,
}

impl BoundReport {
    fn new(c: String, rows: Vec<BoundRow>) -> Self {
        let all_pass = rows.iter().all(|r| r.pass);
        Self { c, rows, all_pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub const CSV_HEADER: [&'static str; 8] =
        ["d", "kappa", "s", "b", "s_threshold", "b_threshold", "method", "pass"];

    pub fn csv_records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.d.to_string(),
                    r.kappa.to_string(),
                    format!("{:.12}", r.s),
                    format!("{:.12}", r.b),
                    r.s_threshold.to_string(),
                    r.b_threshold.to_string(),
                    match r.method {
                        Method::Direct => "direct",
                        Method::Chen => "chen",
                    }
                    .to_string(),
                    r.pass.to_string(),
                ]
            })
            .collect()
    }
}

fn thresholds(pair: (&str, &str)) -> (BigRational, BigRational) {
    (parse_decimal(pair.0).unwrap(), parse_decimal(pair.1).unwrap())
}

fn row(d: u32, kappa: u32, sb: &SiteBond, thr: (&str, &str), pass: bool) -> BoundRow {
    BoundRow {
        d,
        kappa,
        s: sb.s_f64(),
        b: sb.b_f64(),
        s_threshold: thr.0.parse().unwrap(),
        b_threshold: thr.1.parse().unwrap(),
        method: Method::Direct,
        pass,
    }
}

/// Main high-dimensional sweep at `t = c/d` for every `d` in `d_min..=d_max`:
/// direct exact checks of `s > 0.9765` and `b > 0.5622` for `d <= chen_floor`,
/// and one closed-form row covering every `d > chen_floor` when `d_max` exceeds it.
///
/// Every `d` must satisfy `d > kappa/2` and `kappa >= 10`.
pub fn verify_theorem1(
    c: &str,
    kappa: u32,
    d_min: u32,
    d_max: u32,
    chen_floor: u32,
) -> Result<BoundReport> {
    if kappa < 10 {
        return Err(Error::OutOfRange { d: d_min, kappa });
    }
    if 2 * d_min <= kappa {
        return Err(Error::OutOfRange { d: d_min, kappa });
    }
    if d_max < d_min {
        return Err(Error::InvalidParameter(format!("empty range {d_min}..={d_max}")));
    }
    let c_exact = parse_decimal(c)?;
    let (s_thr, b_thr) = thresholds(MAIN_THRESHOLDS);
    let direct_max = d_max.min(chen_floor);
    let mut rows: Vec<BoundRow> = (d_min..=direct_max)
        .into_par_iter()
        .map(|d| {
            let sb = s_b_of(&BoundParams::with_rate(d, kappa, &c_exact, 2)?)?;
            let pass = sb.exceeds(&s_thr, &b_thr);
            Ok(row(d, kappa, &sb, MAIN_THRESHOLDS, pass))
        })
        .collect::<Result<_>>()?;
    if d_max > chen_floor {
        let c_f = c_exact.to_f64().unwrap();
        let (s_lo, b_lo) = chen_lower_bounds(c_f, kappa, chen_floor)?;
        let s_min: f64 = MAIN_THRESHOLDS.0.parse().unwrap();
        let b_min: f64 = MAIN_THRESHOLDS.1.parse().unwrap();
        rows.push(BoundRow {
            d: chen_floor,
            kappa,
            s: s_lo,
            b: b_lo,
            s_threshold: s_min,
            b_threshold: b_min,
            method: Method::Chen,
            pass: s_lo > s_min + FLOAT_GUARD && b_lo > b_min + FLOAT_GUARD,
        });
    }
    Ok(BoundReport::new(c.to_string(), rows))
}

/// The low-dimensional cases, each `kappa` from the case minimum up to `2d`:
/// `(s, b)` must strictly exceed one of the two threshold pairs.
pub fn verify_theorem1_table(c: &str) -> Result<BoundReport> {
    let c_exact = parse_decimal(c)?;
    let pairs = TABLE_THRESHOLDS.map(thresholds);
    let cases: Vec<(u32, u32)> = TABLE_CASES
        .iter()
        .flat_map(|&(d, k0)| (k0..=2 * d).map(move |k| (d, k)))
        .collect();
    let rows = cases
        .into_par_iter()
        .map(|(d, kappa)| {
            let sb = s_b_of(&BoundParams::with_rate(d, kappa, &c_exact, 2)?)?;
            let hit = pairs.iter().position(|(s, b)| sb.exceeds(s, b));
            let thr = TABLE_THRESHOLDS[hit.unwrap_or(0)];
            Ok(row(d, kappa, &sb, thr, hit.is_some()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport::new(c.to_string(), rows))
}

/// Which check covers `(d, kappa)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Main,
    Table,
}

pub fn classify_case(d: u32, kappa: u32) -> Result<CaseKind> {
    if kappa > 2 * d {
        return Err(Error::OutOfRange { d, kappa });
    }
    if TABLE_CASES.iter().any(|&(dd, k0)| dd == d && kappa >= k0) {
        return Ok(CaseKind::Table);
    }
    if kappa >= 10 && 2 * d > kappa {
        return Ok(CaseKind::Main);
    }
    Err(Error::OutOfRange { d, kappa })
}

/// `(s, b)` at explicit `t`, for callers working in floating point.
pub fn s_b_at(d: u32, kappa: u32, t: f64, d_prime: u32) -> Result<(f64, f64)> {
    let sb = s_b_of(&BoundParams::with_time(d, kappa, decimal_from_f64(t)?, d_prime)?)?;
    Ok((sb.s_f64(), sb.b_f64()))
}
