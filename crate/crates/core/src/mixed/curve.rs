//! Upper bound on the critical curve `s_c(b)` of mixed site-bond percolation
//! on the square lattice, and its comparison with the product criterion
//! `s b >= s_c(1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the site threshold of the square lattice (Wierman, 1995).
pub const WIERMAN_SITE_BOUND: f64 = 0.6795;
/// Numerical estimate of the site threshold of the square lattice (Ziff, 1992).
/// Nonrigorous; used only for sensitivity checks.
pub const ZIFF_SITE_ESTIMATE: f64 = 0.5927;

/// Bond thresholds of `Z^d` for `d = 2..=6`: exact for `d = 2`, numerical
/// estimates otherwise (Wang et al., 2013 for `d = 3`; Grassberger, 2003 for
/// `d >= 4`). Nonrigorous reference values.
pub const BOND_THRESHOLD_ESTIMATES: [(usize, f64); 5] =
    [(2, 0.5), (3, 0.248_811_82), (4, 0.160_131_4), (5, 0.118_171_8), (6, 0.094_201_9)];

/// Reference bond threshold of `Z^d`, when housed.
pub fn bond_threshold_estimate(d: usize) -> Option<f64> {
    BOND_THRESHOLD_ESTIMATES.iter().find(|&&(k, _)| k == d).map(|&(_, p)| p)
}

/// Closed-form bound `exp(-(2/3)(b - 1/2 + (1/3) ln((8 - 6b)/5)))`, valid on `[1/2, 1]`.
pub fn sc_upper(b: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&b) {
        return Err(Error::InvalidParameter(format!("b = {b} not in [1/2, 1]")));
    }
    Ok((-(2.0 / 3.0) * (b - 0.5 + ((8.0 - 6.0 * b) / 5.0).ln() / 3.0)).exp())
}

/// Right-hand side of `ds/db = -2 s (1 - b) / (4 - 3 b)`.
fn slope(b: f64, s: f64) -> f64 {
    -2.0 * s * (1.0 - b) / (4.0 - 3.0 * b)
}

fn rk4_step(b: f64, s: f64, h: f64) -> f64 {
    let k1 = slope(b, s);
    let k2 = slope(b + h / 2.0, s + h * k1 / 2.0);
    let k3 = slope(b + h / 2.0, s + h * k2 / 2.0);
    let k4 = slope(b + h, s + h * k3);
    s + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
}

/// Default tolerance on the step-doubling local error estimate.
pub const ODE_LOCAL_TOLERANCE: f64 = 1e-12;

/// Integrates the curve ODE from `s(1/2) = 1` to `b_end` with classical RK4
/// at fixed step `step` (the last step is shortened to land on `b_end`).
///
/// Each step is compared against two half steps; the Richardson estimate
/// `|full - halves| / 15` must stay below `tolerance`. Returns `(b, s)` at
/// every grid node, starting with `(0.5, 1.0)`.
pub fn ode_integrate(b_end: f64, step: f64, tolerance: f64) -> Result<Vec<(f64, f64)>> {
    if !(0.5..=1.0).contains(&b_end) {
        return Err(Error::InvalidParameter(format!("b_end = {b_end} not in [1/2, 1]")));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("step = {step} must be positive")));
    }
    let mut out = vec![(0.5, 1.0)];
    let n = ((b_end - 0.5) / step - 1e-9).ceil().max(0.0) as usize;
    let mut s = 1.0;
    for i in 0..n {
        let b = 0.5 + i as f64 * step;
        let next_b = if i + 1 == n { b_end } else { 0.5 + (i + 1) as f64 * step };
        let h = next_b - b;
        let full = rk4_step(b, s, h);
        let half = rk4_step(b + h / 2.0, rk4_step(b, s, h / 2.0), h / 2.0);
        let estimate = (full - half).abs() / 15.0;
        if estimate > tolerance {
            return Err(Error::StepTooCoarse { estimate, tolerance });
        }
        s = half;
        out.push((next_b, s));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    CorollarySupercritical,
    HammersleySupercritical,
    Both,
    /// Not shown supercritical by either criterion; says nothing about subcriticality.
    Unknown,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::CorollarySupercritical => "corollary-supercritical",
            Region::HammersleySupercritical => "hammersley-supercritical",
            Region::Both => "both",
            Region::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedParams {
    pub s: f64,
    pub b: f64,
}

impl MixedParams {
    pub fn new(s: f64, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidParameter(format!("need s, b in [0, 1], got s={s}, b={b}")));
        }
        Ok(Self { s, b })
    }
}

/// Which supercriticality criteria certify `(s, b)`.
pub fn classify_region(params: MixedParams, site_bound: f64) -> Region {
    let MixedParams { s, b } = params;
    let corollary = b >= 0.5 && s > sc_upper(b).expect("b checked");
    let product = s * b >= site_bound;
    match (corollary, product) {
        (true, true) => Region::Both,
        (true, false) => Region::CorollarySupercritical,
        (false, true) => Region::HammersleySupercritical,
        (false, false) => Region::Unknown,
    }
}

/// Solves `sc_upper(b) = site_bound / b` on `(1/2, 1)` by bisection.
pub fn crossover_solve(site_bound: f64) -> Result<f64> {
    let g = |b: f64| sc_upper(b).expect("in range") - site_bound / b;
    let (mut lo, mut hi) = (0.5, 1.0);
    if g(lo) * g(hi) > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "no sign change on (1/2, 1) for site bound {site_bound}"
        )));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) == (g(lo) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One row of the emitted curve file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub b: f64,
    pub sc_upper: f64,
    pub hammersley_s: f64,
    /// The criterion giving the lower supercritical threshold at this `b`.
    pub region: Region,
}

impl CurvePoint {
    pub const CSV_HEADER: [&'static str; 4] = ["b", "sc_upper", "hammersley_s", "region"];
}

/// Samples the curve on `b_min, b_min + step, ...` up to `b_max` inclusive.
pub fn emit_curve(b_min: f64, b_max: f64, step: f64, site_bound: f64) -> Result<Vec<CurvePoint>> {
    if !(0.5..=1.0).contains(&b_min) || !(0.5..=1.0).contains(&b_max) || b_min > b_max {
        return Err(Error::InvalidParameter(format!(
            "need 1/2 <= b_min <= b_max <= 1, got [{b_min}, {b_max}]"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("step = {step} must be positive")));
    }
    let n = ((b_max - b_min) / step + 1e-9).floor() as usize;
    let mut bs: Vec<f64> = (0..=n).map(|i| b_min + i as f64 * step).collect();
    if b_max - bs[n] > 1e-9 {
        bs.push(b_max);
    }
    bs.into_iter()
        .map(|b| {
            let b = b.min(1.0);
            let sc = sc_upper(b)?;
            let hs = site_bound / b;
            let region = if (sc - hs).abs() <= 1e-12 {
                Region::Both
            } else if sc < hs {
                Region::CorollarySupercritical
            } else {
                Region::HammersleySupercritical
            };
            Ok(CurvePoint { b, sc_upper: sc, hammersley_s: hs, region })
        })
        .collect()
}
