//! The six inequalities behind the three-dimensional comparison with bond
//! percolation in the plane, indexed by the number `|X|` of candidate
//! neighbours.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    /// Number of candidate neighbours.
    pub candidates: u32,
    /// `j` in `P(N >= j)`.
    pub at_least: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Lower bound on `P(N = n)` given `|X| = x`.
///
/// Below `x` activations the vertex has at most `kappa` feasible edges and
/// each candidate edge is an independent `t`-coin; the all-activated case adds
/// the rescue by an out-of-plane clock, which wins with probability at least
/// `2 / (3 + x)`.
fn activation_lower(x: u32, n: u32, t: f64) -> f64 {
    let choose = |a: u32, b: u32| -> f64 { (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64) };
    if n < x {
        choose(x, n) * t.powi(n as i32) * (1.0 - t).powi((x - n) as i32)
    } else {
        let full = t.powi(x as i32 + 2);
        t.powi(x as i32) - full + 2.0 / (3.0 + x as f64) * full
    }
}

fn binom_at_least(x: u32, j: u32, p: f64) -> f64 {
    let choose = |a: u32, b: u32| -> f64 { (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64) };
    (j..=x).map(|n| choose(x, n) * p.powi(n as i32) * (1.0 - p).powi((x - n) as i32)).sum()
}

/// Evaluates `P(N >= j) > P(Binomial(|X|, p) >= j)` for `|X| = 3, 2, 1` and
/// `1 <= j <= |X|`, with the left side built from the activation lower bounds.
pub fn verify_theorem3_inequalities(t: f64, p: f64) -> Result<Vec<InequalityVerdict>> {
    if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("need t, p in [0, 1], got t={t}, p={p}")));
    }
    let mut out = Vec::with_capacity(6);
    for x in [3u32, 2, 1] {
        for j in 1..=x {
            let lhs: f64 = (j..=x).map(|n| activation_lower(x, n, t)).sum();
            let rhs = binom_at_least(x, j, p);
            out.push(InequalityVerdict {
                candidates: x,
                at_least: j,
                lhs,
                rhs,
                margin: lhs - rhs,
                holds: lhs > rhs,
            });
        }
    }
    Ok(out)
}
