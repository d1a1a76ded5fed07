use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tally::{planar_context, DominanceTally};
use super::trace::{Bound, Decision, Trace, TraceStep};
use super::{check_time, Outcome, StopRule, VertexStatus};
use crate::clocks::ClockField;
use crate::dynamics::LocalDynamics;
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, LatticeKind, Point};

pub type Site = [i64; 2];

/// The lattice explored in the plane `P`: `Z^3` with `P = Z^2 x {0}`, or the
/// matching square lattice where the diagonals `(x, x+(1,1))` and
/// `(x, x+(1,-1))` play the part of the two vertical edges at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanarVariant {
    Cubic,
    MatchingSquare,
}

impl PlanarVariant {
    pub fn kind(&self) -> LatticeKind {
        match self {
            PlanarVariant::Cubic => LatticeKind::Hypercubic { dim: 3 },
            PlanarVariant::MatchingSquare => LatticeKind::MatchingSquare,
        }
    }

    pub fn degree(&self) -> usize {
        self.kind().degree()
    }

    pub fn embed(&self, p: Site) -> Point {
        match self {
            PlanarVariant::Cubic => vec![p[0], p[1], 0],
            PlanarVariant::MatchingSquare => p.to_vec(),
        }
    }

    /// `E_v`: all edges of `v`, as `(other endpoint, edge)`. The first four
    /// entries are the in-plane edges in the order `+x, -x, +y, -y`.
    pub fn edges(&self, v: Site) -> Vec<(Point, EdgeId)> {
        self.kind().incident(&self.embed(v))
    }

    /// The two edges of `v` that leave the plane (or stand in for those that do).
    pub fn out_of_plane(&self, v: Site) -> [EdgeId; 2] {
        let e = self.edges(v);
        match self {
            PlanarVariant::Cubic => [e[4].1.clone(), e[5].1.clone()],
            PlanarVariant::MatchingSquare => [e[4].1.clone(), e[6].1.clone()],
        }
    }

    pub fn is_out_of_plane(&self, v: Site, e: &EdgeId) -> bool {
        self.out_of_plane(v).contains(e)
    }
}

impl fmt::Display for PlanarVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanarVariant::Cubic => "cubic",
            PlanarVariant::MatchingSquare => "matching-square",
        })
    }
}

impl FromStr for PlanarVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cubic" => Ok(PlanarVariant::Cubic),
            "matching-square" => Ok(PlanarVariant::MatchingSquare),
            _ => Err(Error::Parse(format!("unknown planar variant `{s}`"))),
        }
    }
}

fn site_of(p: &[i64]) -> Site {
    [p[0], p[1]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarVertex {
    pub point: Site,
    pub status: VertexStatus,
    /// `b(v)`: the boundary edge through which `v` was activated.
    pub boundary_edge: Option<EdgeId>,
    pub parent: Option<Site>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarExplorationState {
    pub steps: usize,
    pub vertices: Vec<PlanarVertex>,
    /// Boundary edges with the upper bound `p(e)` known for their clock.
    pub boundary: HashMap<EdgeId, f64>,
    /// Spoilt edges with their revealed clocks.
    pub spoilt: HashMap<EdgeId, f64>,
    #[serde(skip)]
    index: HashMap<Site, usize>,
    #[serde(skip)]
    queue: VecDeque<usize>,
}

impl PlanarExplorationState {
    fn new() -> Self {
        Self {
            steps: 0,
            vertices: Vec::new(),
            boundary: HashMap::new(),
            spoilt: HashMap::new(),
            index: HashMap::new(),
            queue: VecDeque::new(),
        }
    }

    fn activate(&mut self, v: Site, edge: Option<EdgeId>, parent: Option<Site>) {
        self.index.insert(v, self.vertices.len());
        self.queue.push_back(self.vertices.len());
        self.vertices.push(PlanarVertex { point: v, status: VertexStatus::Active, boundary_edge: edge, parent });
    }

    pub fn is_active(&self, v: &Site) -> bool {
        self.index.contains_key(v)
    }

    pub fn get(&self, v: &Site) -> Option<&PlanarVertex> {
        self.index.get(v).map(|&i| &self.vertices[i])
    }

    pub fn count(&self, status: VertexStatus) -> usize {
        self.vertices.iter().filter(|v| v.status == status).count()
    }

    pub fn with_status(&self, status: VertexStatus) -> impl Iterator<Item = &PlanarVertex> {
        self.vertices.iter().filter(move |v| v.status == status)
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarExploration {
    pub state: PlanarExplorationState,
    pub tally: DominanceTally,
    pub outcome: Outcome,
    pub trace: Option<Trace>,
}

/// Explores the in-plane cluster of the origin.
///
/// The oldest untreated active vertex `a` is closed if it has no inactive
/// in-plane neighbour. Otherwise the feasibility of its unspoilt edges is
/// revealed and `Gamma(a)` is the set of inactive in-plane neighbours joined
/// by a feasible edge. With at most `kappa` feasible edges `a` opens and
/// activates `Gamma(a)`. When every edge of `a` is feasible, `a` opens only
/// if the largest clock among its edges to `Gamma(a)`, `b(a)` and its two
/// out-of-plane edges belongs to an out-of-plane edge; the new boundary edges
/// are then known to have clocks below that maximum.
///
/// Requires `kappa >= degree - 1`, the range in which an opened vertex
/// certifies its boundary edge.
///
/// Tallies: for every treated vertex other than the origin with `|X| = k`
/// inactive in-plane neighbours, context `x{k}:n>={j}` records whether at
/// least `j` of them were activated, for `1 <= j <= k`.
pub fn explore_planar(
    variant: PlanarVariant,
    kappa: u32,
    t: f64,
    field: ClockField,
    stop: StopRule,
    record_trace: bool,
) -> Result<PlanarExploration> {
    check_time(t)?;
    let deg = variant.degree();
    if (kappa as usize) + 1 < deg {
        return Err(Error::InvalidParameter(format!(
            "planar exploration needs kappa >= degree - 1 = {}, got {kappa}",
            deg - 1
        )));
    }
    let clock = |e: &EdgeId| field.clock(e);
    let mut state = PlanarExplorationState::new();
    let mut tally = DominanceTally::new();
    let mut trace = record_trace.then(|| Trace::new(variant, kappa, t, field.seed));
    state.activate([0, 0], None, None);
    let mut open = 0usize;

    while let Some(i) = state.queue.pop_front() {
        let step = state.steps;
        state.steps += 1;
        let a = state.vertices[i].point;
        let b_a = state.vertices[i].boundary_edge.clone();
        let edges = variant.edges(a);
        let inactive: Vec<(Site, EdgeId)> = edges[..4]
            .iter()
            .map(|(q, e)| (site_of(q), e.clone()))
            .filter(|(q, _)| !state.is_active(q))
            .collect();

        if let Some(b) = &b_a {
            state.boundary.remove(b);
        }
        let mut record = TraceStep {
            step,
            vertex: a,
            decision: Decision::ClosedIsolated,
            removed_boundary: b_a.clone(),
            revealed: Vec::new(),
            spoilt: Vec::new(),
            added: Vec::new(),
        };

        let mut gamma: Vec<(Site, EdgeId)> = Vec::new();
        let mut bound = t;
        if !inactive.is_empty() {
            record.revealed = edges
                .iter()
                .filter(|(_, e)| !state.spoilt.contains_key(e))
                .map(|(_, e)| (e.clone(), clock(e) <= t))
                .collect();
            gamma = inactive.iter().filter(|(_, e)| clock(e) <= t).cloned().collect();
            let feasible = edges.iter().filter(|(_, e)| clock(e) <= t).count();
            record.decision = if feasible <= kappa as usize {
                Decision::Open
            } else {
                let out = variant.out_of_plane(a);
                let compared = gamma
                    .iter()
                    .map(|(_, e)| e)
                    .chain(b_a.iter())
                    .chain(out.iter())
                    .max_by(|x, y| clock(x).total_cmp(&clock(y)).then_with(|| x.cmp(y)))
                    .expect("out-of-plane edges are always compared");
                if variant.is_out_of_plane(a, compared) {
                    bound = out.iter().map(clock).fold(0.0, f64::max);
                    Decision::OpenRescued
                } else {
                    Decision::ClosedSaturated
                }
            };
        }

        let opened = record.decision.is_open();
        if a != [0, 0] && !inactive.is_empty() {
            let n = if opened { gamma.len() } else { 0 };
            for j in 1..=inactive.len() {
                tally.record(&planar_context(inactive.len(), j), n >= j);
            }
        }
        if !opened {
            gamma.clear();
        }
        for (_, e) in &edges {
            let stays_boundary = gamma.iter().any(|(_, g)| g == e);
            if !stays_boundary && !state.spoilt.contains_key(e) {
                let u = clock(e);
                state.spoilt.insert(e.clone(), u);
                record.spoilt.push((e.clone(), u));
            }
        }

        let mut reached = false;
        if opened {
            state.vertices[i].status = VertexStatus::Open;
            open += 1;
            for (q, e) in gamma {
                state.boundary.insert(e.clone(), bound);
                record.added.push((e.clone(), Bound::Upper(bound)));
                reached |= q[0].abs().max(q[1].abs()) >= stop.radius;
                state.activate(q, Some(e), Some(a));
            }
        } else {
            state.vertices[i].status = VertexStatus::Closed;
        }
        if let Some(tr) = trace.as_mut() {
            tr.steps.push(record);
        }
        if reached || open >= stop.max_open {
            return Ok(PlanarExploration { state, tally, outcome: Outcome::Survived, trace });
        }
    }
    Ok(PlanarExploration { state, tally, outcome: Outcome::Died, trace })
}

/// Open vertices other than the origin whose boundary edge is closed in the
/// infinite-volume constrained configuration on the same clocks, or whose
/// parent is not open.
pub fn replay_planar(
    run: &PlanarExploration,
    variant: PlanarVariant,
    kappa: u32,
    t: f64,
    field: ClockField,
) -> Vec<Site> {
    let mut dynamics = LocalDynamics::new(variant.kind(), field, kappa, t);
    let mut bad = Vec::new();
    for v in run.state.with_status(VertexStatus::Open) {
        if v.point == [0, 0] {
            continue;
        }
        let ok = match (&v.boundary_edge, &v.parent) {
            (Some(e), Some(p)) => {
                run.state.get(p).map(|q| q.status) == Some(VertexStatus::Open) && dynamics.is_open(e)
            }
            _ => false,
        };
        if !ok {
            bad.push(v.point);
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(variant: PlanarVariant, kappa: u32, t: f64, seed: u64, stop: StopRule) -> PlanarExploration {
        explore_planar(variant, kappa, t, ClockField::new(seed), stop, true).unwrap()
    }

    #[test]
    fn out_of_plane_edges() {
        let c = PlanarVariant::Cubic.out_of_plane([2, 3]);
        assert_eq!(c[0], EdgeId::new(vec![2, 3, 0], 2));
        assert_eq!(c[1], EdgeId::new(vec![2, 3, -1], 2));
        let m = PlanarVariant::MatchingSquare.out_of_plane([2, 3]);
        assert_eq!(m[0], EdgeId::new(vec![2, 3], 2));
        assert_eq!(m[1], EdgeId::new(vec![2, 3], 3));
        assert_eq!(PlanarVariant::MatchingSquare.kind().endpoints(&m[1]).1, vec![3, 2]);
    }

    #[test]
    fn time_zero() {
        let r = run(PlanarVariant::Cubic, 5, 0.0, 3, StopRule::default());
        assert_eq!(r.outcome, Outcome::Died);
        assert_eq!(r.state.vertices.len(), 1);
        assert_eq!(r.state.count(VertexStatus::Open), 1);
        assert!(r.state.boundary.is_empty());
    }

    #[test]
    fn soundness_cubic_and_matching() {
        for seed in 0..30 {
            let stop = StopRule::new(10_000, 12).unwrap();
            let r = run(PlanarVariant::Cubic, 5, 0.62, seed, stop);
            assert!(replay_planar(&r, PlanarVariant::Cubic, 5, 0.62, ClockField::new(seed)).is_empty());
            let m = run(PlanarVariant::MatchingSquare, 7, 0.62, seed, stop);
            assert!(replay_planar(&m, PlanarVariant::MatchingSquare, 7, 0.62, ClockField::new(seed)).is_empty());
        }
    }

    #[test]
    fn time_one_rescues_with_out_of_plane_bounds() {
        let mut rescued = 0;
        for seed in 0..20 {
            let r = run(PlanarVariant::Cubic, 5, 1.0, seed, StopRule::new(2_000, 30).unwrap());
            let tr = r.trace.as_ref().unwrap();
            assert!(tr.steps.iter().all(|s| s.decision != Decision::Open));
            rescued += tr.steps.iter().filter(|s| s.decision == Decision::OpenRescued).count();
            assert!(r.state.boundary.values().all(|&p| p <= 1.0));
            assert!(replay_planar(&r, PlanarVariant::Cubic, 5, 1.0, ClockField::new(seed)).is_empty());
        }
        assert!(rescued > 0);
    }

    #[test]
    fn boundary_edges_point_to_untreated_vertices() {
        let r = run(PlanarVariant::Cubic, 5, 0.62, 5, StopRule::new(300, 200).unwrap());
        for e in r.state.boundary.keys() {
            let (x, y) = PlanarVariant::Cubic.kind().endpoints(e);
            let statuses: Vec<_> = [x, y].iter().map(|p| r.state.get(&site_of(p)).unwrap().status).collect();
            assert!(statuses.contains(&VertexStatus::Open) && statuses.contains(&VertexStatus::Active));
        }
    }

    #[test]
    fn rejects_kappa_below_degree_minus_one() {
        assert!(explore_planar(PlanarVariant::Cubic, 4, 0.6, ClockField::new(0), StopRule::default(), false).is_err());
        assert!(explore_planar(PlanarVariant::MatchingSquare, 6, 0.6, ClockField::new(0), StopRule::default(), false).is_err());
    }

    #[test]
    fn variant_names() {
        for v in [PlanarVariant::Cubic, PlanarVariant::MatchingSquare] {
            assert_eq!(v.to_string().parse::<PlanarVariant>().unwrap(), v);
        }
    }
}
