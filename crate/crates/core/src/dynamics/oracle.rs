//! Exact event probabilities on tiny graphs by enumeration.
//!
//! Conditioned on the set `S` of feasible edges, the relative order of their
//! clocks is a uniform random permutation of `S`. Summing over `S` with weight
//! `t^|S| (1-t)^(|E|-|S|)` and averaging over the `|S|!` orders gives the law
//! of the configuration at time `t` exactly.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORACLE_EDGES: usize = 10;

/// An explicit small undirected graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallGraph {
    pub name: String,
    pub num_vertices: usize,
    pub edges: Vec<[u32; 2]>,
}

impl SmallGraph {
    pub fn new(name: impl Into<String>, num_vertices: usize, edges: Vec<[u32; 2]>) -> Result<Self> {
        for &[a, b] in &edges {
            if a == b || a as usize >= num_vertices || b as usize >= num_vertices {
                return Err(Error::InvalidParameter(format!("bad edge ({a}, {b})")));
            }
        }
        Ok(Self { name: name.into(), num_vertices, edges })
    }

    /// Named test graphs: `path2` (a-b-c), `path3`, `star3`, `cycle4`,
    /// `grid2x3` (two unit squares sharing a side), `k4`.
    pub fn named(name: &str) -> Result<Self> {
        let (n, edges): (usize, Vec<[u32; 2]>) = match name {
            "path2" => (3, vec![[0, 1], [1, 2]]),
            "path3" => (4, vec![[0, 1], [1, 2], [2, 3]]),
            "star3" => (4, vec![[0, 1], [0, 2], [0, 3]]),
            "cycle4" => (4, vec![[0, 1], [1, 2], [2, 3], [3, 0]]),
            "grid2x3" => (6, vec![[0, 1], [1, 2], [3, 4], [4, 5], [0, 3], [1, 4], [2, 5]]),
            "k4" => (4, vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]),
            _ => return Err(Error::InvalidParameter(format!("unknown graph `{name}`"))),
        };
        Self::new(name, n, edges)
    }

    pub fn max_degree(&self) -> u32 {
        let mut deg = vec![0u32; self.num_vertices];
        for &[a, b] in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }
}

/// Events on a configuration of a [`SmallGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Event {
    EdgeOpen(usize),
    Connected(u32, u32),
}

impl Event {
    pub fn holds(&self, graph: &SmallGraph, open: &[bool]) -> bool {
        match *self {
            Event::EdgeOpen(e) => open[e],
            Event::Connected(a, b) => {
                let mut seen = vec![false; graph.num_vertices];
                let mut stack = vec![a];
                seen[a as usize] = true;
                while let Some(v) = stack.pop() {
                    if v == b {
                        return true;
                    }
                    for (e, &[x, y]) in graph.edges.iter().enumerate() {
                        if !open[e] {
                            continue;
                        }
                        let w = if x == v { y } else if y == v { x } else { continue };
                        if !seen[w as usize] {
                            seen[w as usize] = true;
                            stack.push(w);
                        }
                    }
                }
                false
            }
        }
    }

    fn validate(&self, graph: &SmallGraph) -> Result<()> {
        match *self {
            Event::EdgeOpen(e) if e >= graph.edges.len() => {
                Err(Error::InvalidParameter(format!("edge {e} not in graph")))
            }
            Event::Connected(a, b)
                if a as usize >= graph.num_vertices || b as usize >= graph.num_vertices =>
            {
                Err(Error::InvalidParameter(format!("vertex pair ({a}, {b}) not in graph")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::EdgeOpen(e) => write!(f, "edge:{e}"),
            Event::Connected(a, b) => write!(f, "connect:{a}-{b}"),
        }
    }
}

impl FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown event `{s}` (expected edge:<i> or connect:<a>-<b>)"));
        if let Some(e) = s.strip_prefix("edge:") {
            return e.parse().map(Event::EdgeOpen).map_err(|_| bad());
        }
        if let Some(pair) = s.strip_prefix("connect:") {
            let (a, b) = pair.split_once('-').ok_or_else(bad)?;
            return Ok(Event::Connected(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
            ));
        }
        Err(bad())
    }
}

/// Exact `P(event at time t)` for the constrained dynamics on `graph`.
pub fn exact_event_probability(graph: &SmallGraph, kappa: u32, t: f64, event: Event) -> Result<f64> {
    let m = graph.edges.len();
    if m > MAX_ORACLE_EDGES {
        return Err(Error::GraphTooLarge { edges: m, max: MAX_ORACLE_EDGES });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} not in [0, 1]")));
    }
    if kappa == 0 {
        return Err(Error::InvalidParameter("kappa must be positive".into()));
    }
    event.validate(graph)?;
    let mut total = 0.0;
    let mut open = vec![false; m];
    let mut degree = vec![0u32; graph.num_vertices];
    for mask in 0u32..(1 << m) {
        let feasible: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
        let k = feasible.len();
        let weight = t.powi(k as i32) * (1.0 - t).powi((m - k) as i32);
        if weight == 0.0 {
            continue;
        }
        let mut hits = 0u64;
        let mut orders = 0u64;
        for order in feasible.iter().copied().permutations(k) {
            open.fill(false);
            degree.fill(0);
            for e in order {
                let [a, b] = graph.edges[e];
                if degree[a as usize] < kappa && degree[b as usize] < kappa {
                    open[e] = true;
                    degree[a as usize] += 1;
                    degree[b as usize] += 1;
                }
            }
            orders += 1;
            if event.holds(graph, &open) {
                hits += 1;
            }
        }
        total += weight * hits as f64 / orders as f64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn path_two_first_edge() {
        let g = SmallGraph::named("path2").unwrap();
        for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let p = exact_event_probability(&g, 1, t, Event::EdgeOpen(0)).unwrap();
            assert_abs_diff_eq!(p, t - t * t / 2.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(
            exact_event_probability(&g, 1, 0.5, Event::EdgeOpen(0)).unwrap(),
            0.375,
            epsilon = 1e-15
        );
    }

    #[test]
    fn star_at_time_one() {
        let g = SmallGraph::named("star3").unwrap();
        let p = exact_event_probability(&g, 2, 1.0, Event::EdgeOpen(1)).unwrap();
        assert_abs_diff_eq!(p, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn unconstrained_marginal_is_t() {
        for name in ["path3", "cycle4", "grid2x3", "k4"] {
            let g = SmallGraph::named(name).unwrap();
            let kappa = g.max_degree();
            for e in 0..g.edges.len() {
                let p = exact_event_probability(&g, kappa, 0.37, Event::EdgeOpen(e)).unwrap();
                assert_abs_diff_eq!(p, 0.37, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn too_large_is_rejected() {
        let edges: Vec<[u32; 2]> = (0..11).map(|i| [i, i + 1]).collect();
        let g = SmallGraph::new("long", 12, edges).unwrap();
        assert_eq!(
            exact_event_probability(&g, 1, 0.5, Event::EdgeOpen(0)),
            Err(Error::GraphTooLarge { edges: 11, max: 10 })
        );
    }

    #[test]
    fn event_parsing() {
        assert_eq!("edge:3".parse::<Event>().unwrap(), Event::EdgeOpen(3));
        assert_eq!("connect:0-2".parse::<Event>().unwrap(), Event::Connected(0, 2));
        assert!("vertex:1".parse::<Event>().is_err());
    }
}
