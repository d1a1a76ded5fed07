//! The two cluster explorations used for comparisons with planar
//! percolation: the projected exploration of `Z^d` onto `Z^d'`, and the
//! in-plane exploration of `Z^3` (or of the matching square lattice) with
//! boundary and spoilt edges.

mod general;
mod planar;
mod tally;
mod trace;

pub use general::{
    explore_general, replay_general, GeneralExploration, GeneralExplorationState, GeneralVertex,
};
pub use planar::{
    explore_planar, replay_planar, PlanarExploration, PlanarExplorationState, PlanarVariant,
    PlanarVertex,
};
pub use tally::{
    dominance_report, planar_context, Count, DominanceReport, DominanceRow, DominanceTally,
    Thresholds, Verdict, BOND_CONTEXT, DOMINANCE_CONFIDENCE, SITE_CONTEXT,
};
pub use trace::{check_decoupling, Bound, DecouplingCheck, Decision, TraceStep, Trace};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexStatus {
    Active,
    Open,
    Closed,
    Useless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// A stop condition was reached.
    Survived,
    /// Every active vertex was treated.
    Died,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Survived => "survived",
            Outcome::Died => "died",
        })
    }
}

/// Stops an exploration once `max_open` vertices are open or an activated
/// vertex lies at sup-distance `radius` from the origin (measured in the
/// target lattice).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_open: usize,
    pub radius: i64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { max_open: 10_000, radius: 200 }
    }
}

impl StopRule {
    pub fn new(max_open: usize, radius: i64) -> Result<Self> {
        if max_open == 0 || radius <= 0 {
            return Err(Error::InvalidParameter(format!(
                "stop rule needs max_open >= 1 and radius >= 1, got {max_open}, {radius}"
            )));
        }
        Ok(Self { max_open, radius })
    }
}

fn sup_norm(p: &[i64]) -> i64 {
    p.iter().map(|c| c.abs()).max().unwrap_or(0)
}

fn check_time(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} not in [0, 1]")));
    }
    Ok(())
}
