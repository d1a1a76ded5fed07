//! The constrained-degree dynamics.
//!
//! Each edge carries a clock `U_e`. Processing edges in increasing clock order,
//! an edge with `U_e <= t` opens iff both endpoints currently have fewer than
//! `kappa` open edges. Clock ties are broken by edge index, which for windows
//! is the canonical edge-id order.

mod local;
mod oracle;
mod theta;

pub use local::LocalDynamics;
pub use oracle::{exact_event_probability, Event, SmallGraph, MAX_ORACLE_EDGES};
pub use theta::{
    cluster_reaches, estimate_theta, estimate_theta_with_threads, theta_curve, ThetaEstimate,
    ThetaEvent,
};

use std::cmp::Ordering;
use std::fmt;

use crate::clocks::ClockField;
use crate::lattice::Window;

/// Edge states at a query time, with per-vertex open degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub t: f64,
    pub kappa: u32,
    open: Vec<bool>,
    degree: Vec<u32>,
}

impl Configuration {
    pub fn is_open(&self, e: usize) -> bool {
        self.open[e]
    }

    pub fn open_edges(&self) -> &[bool] {
        &self.open
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degree[v]
    }

    pub fn num_open(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    /// The configuration at an earlier time `s <= t`, given the same clocks.
    ///
    /// Edges never close, so the state at `s` is the set of edges that had
    /// opened by `s`.
    pub fn at_time(&self, s: f64, clocks: &[f64], edges: &[[u32; 2]]) -> Configuration {
        debug_assert!(s <= self.t);
        let mut degree = vec![0; self.degree.len()];
        let open: Vec<bool> = self
            .open
            .iter()
            .zip(clocks)
            .map(|(&o, &u)| o && u <= s)
            .collect();
        for (e, _) in open.iter().enumerate().filter(|(_, &o)| o) {
            let [a, b] = edges[e];
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        Configuration { t: s, kappa: self.kappa, open, degree }
    }
}

#[inline]
fn clock_order(clocks: &[f64], a: usize, b: usize) -> Ordering {
    clocks[a].total_cmp(&clocks[b]).then(a.cmp(&b))
}

/// Runs the dynamics on an explicit edge list up to time `t`.
///
/// `clocks[e]` is the clock of edge `e`; ties are broken by edge index.
pub fn evolve_edges(
    num_vertices: usize,
    edges: &[[u32; 2]],
    clocks: &[f64],
    kappa: u32,
    t: f64,
) -> Configuration {
    assert_eq!(edges.len(), clocks.len());
    let mut feasible: Vec<usize> = (0..edges.len()).filter(|&e| clocks[e] <= t).collect();
    feasible.sort_unstable_by(|&a, &b| clock_order(clocks, a, b));
    let mut open = vec![false; edges.len()];
    let mut degree = vec![0u32; num_vertices];
    for e in feasible {
        let [a, b] = edges[e];
        let (a, b) = (a as usize, b as usize);
        if degree[a] < kappa && degree[b] < kappa {
            open[e] = true;
            degree[a] += 1;
            degree[b] += 1;
        }
    }
    Configuration { t, kappa, open, degree }
}

/// Clocks of every edge of a window.
pub fn window_clocks(window: &Window, field: &ClockField) -> Vec<f64> {
    window.edge_keys().iter().map(|&k| field.clock_of_key(k)).collect()
}

/// The configuration `omega(t)` restricted to a window.
pub fn evolve(window: &Window, kappa: u32, field: &ClockField, t: f64) -> Configuration {
    let clocks = window_clocks(window, field);
    evolve_edges(window.num_vertices(), window.edge_list(), &clocks, kappa, t)
}

/// A violation of the dynamics found by [`verify_replay`].
#[derive(Debug, Clone, PartialEq)]
pub enum ReplayViolation {
    OpenButInfeasible { edge: usize },
    OpenedAtSaturatedVertex { edge: usize, vertex: usize },
    FeasibleButBlockedWithoutReason { edge: usize },
    DegreeMismatch { vertex: usize },
}

impl fmt::Display for ReplayViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Re-plays the clock history and checks that `config` obeys the rule:
/// open edges are feasible, every open edge found both endpoints below
/// `kappa` at its clock time, every closed feasible edge found one endpoint
/// saturated, and degrees never exceed `kappa`.
pub fn verify_replay(
    num_vertices: usize,
    edges: &[[u32; 2]],
    clocks: &[f64],
    config: &Configuration,
) -> Result<(), ReplayViolation> {
    let kappa = config.kappa;
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| clock_order(clocks, a, b));
    let mut degree = vec![0u32; num_vertices];
    for e in order {
        let [a, b] = edges[e];
        let (a, b) = (a as usize, b as usize);
        if config.is_open(e) {
            if clocks[e] > config.t {
                return Err(ReplayViolation::OpenButInfeasible { edge: e });
            }
            for v in [a, b] {
                if degree[v] >= kappa {
                    return Err(ReplayViolation::OpenedAtSaturatedVertex { edge: e, vertex: v });
                }
            }
            degree[a] += 1;
            degree[b] += 1;
        } else if clocks[e] <= config.t && degree[a] < kappa && degree[b] < kappa {
            return Err(ReplayViolation::FeasibleButBlockedWithoutReason { edge: e });
        }
    }
    for v in 0..num_vertices {
        if degree[v] != config.degree(v) || degree[v] > kappa {
            return Err(ReplayViolation::DegreeMismatch { vertex: v });
        }
    }
    Ok(())
}
