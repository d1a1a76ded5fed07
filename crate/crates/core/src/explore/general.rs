use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::tally::{DominanceTally, BOND_CONTEXT, SITE_CONTEXT};
use super::{check_time, sup_norm, Outcome, StopRule, VertexStatus};
use crate::clocks::ClockField;
use crate::dynamics::LocalDynamics;
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, LatticeKind, Point, ProjectionMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralVertex {
    pub point: Point,
    pub status: VertexStatus,
    /// The feasible edge through which the vertex was activated.
    pub activating_edge: Option<EdgeId>,
    pub parent: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralExplorationState {
    pub steps: usize,
    /// Active vertices in activation order.
    pub vertices: Vec<GeneralVertex>,
    #[serde(skip)]
    index: HashMap<Point, usize>,
    #[serde(skip)]
    images: HashSet<Point>,
    #[serde(skip)]
    queue: VecDeque<usize>,
}

impl GeneralExplorationState {
    fn new() -> Self {
        Self {
            steps: 0,
            vertices: Vec::new(),
            index: HashMap::new(),
            images: HashSet::new(),
            queue: VecDeque::new(),
        }
    }

    fn activate(&mut self, map: &ProjectionMap, v: Point, edge: Option<EdgeId>, parent: Option<Point>) {
        let image = map.project(&v);
        assert!(self.images.insert(image), "projection not injective on the active set at {v:?}");
        self.index.insert(v.clone(), self.vertices.len());
        self.queue.push_back(self.vertices.len());
        self.vertices.push(GeneralVertex { point: v, status: VertexStatus::Active, activating_edge: edge, parent });
    }

    pub fn count(&self, status: VertexStatus) -> usize {
        self.vertices.iter().filter(|v| v.status == status).count()
    }

    pub fn with_status(&self, status: VertexStatus) -> impl Iterator<Item = &GeneralVertex> {
        self.vertices.iter().filter(move |v| v.status == status)
    }

    pub fn get(&self, p: &[i64]) -> Option<&GeneralVertex> {
        self.index.get(p).map(|&i| &self.vertices[i])
    }

    /// Untreated active vertices remaining in the queue.
    pub fn pending(&self) -> usize {
        self.queue.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralExploration {
    pub state: GeneralExplorationState,
    pub tally: DominanceTally,
    pub outcome: Outcome,
}

/// Explores the cluster of the origin in `Z^d` under the constrained dynamics,
/// activating at most one preimage of each point of `Z^d'`.
///
/// Step 1 treats the oldest untreated active vertex `a`: useless if
/// `project(a)` has no neighbour outside the projected active set, open if it
/// has at most `kappa` feasible edges, closed otherwise. Step 2 scans, for
/// each target neighbour of a newly opened vertex that is not yet projected,
/// the fibre edges in ascending coordinate order and activates the endpoint
/// of the first feasible one.
///
/// Tallies: context `site` counts non-useless treatments and openings,
/// context `bond` counts scanned target neighbours and activations.
pub fn explore_general(
    map: &ProjectionMap,
    kappa: u32,
    t: f64,
    field: ClockField,
    stop: StopRule,
) -> Result<GeneralExploration> {
    check_time(t)?;
    let d = map.source_dim();
    if kappa == 0 || kappa as usize > 2 * d {
        return Err(Error::InvalidParameter(format!("need 1 <= kappa <= 2d = {}, got {kappa}", 2 * d)));
    }
    let kind = LatticeKind::Hypercubic { dim: d };
    let feasible = |e: &EdgeId| field.clock(e) <= t;

    let mut state = GeneralExplorationState::new();
    let mut tally = DominanceTally::new();
    state.activate(map, vec![0; d], None, None);
    let mut open = 0usize;

    while let Some(i) = state.queue.pop_front() {
        state.steps += 1;
        let a = state.vertices[i].point.clone();
        let image = map.project(&a);
        let fresh: Vec<Point> = map
            .target_neighbors(&image)
            .into_iter()
            .filter(|q| !state.images.contains(q))
            .collect();
        if fresh.is_empty() {
            state.vertices[i].status = VertexStatus::Useless;
            continue;
        }
        let feasible_edges = kind.incident(&a).iter().filter(|(_, e)| feasible(e)).count();
        let opens = feasible_edges <= kappa as usize;
        tally.record(SITE_CONTEXT, opens);
        if !opens {
            state.vertices[i].status = VertexStatus::Closed;
            continue;
        }
        state.vertices[i].status = VertexStatus::Open;
        open += 1;

        let mut reached = false;
        for target in fresh {
            let hit = map.fiber_edges(&a, &target)?.into_iter().find(|(_, e)| feasible(e));
            tally.record(BOND_CONTEXT, hit.is_some());
            if let Some((v, e)) = hit {
                reached |= sup_norm(&target) >= stop.radius;
                state.activate(map, v, Some(e), Some(a.clone()));
            }
        }
        state.steps += 1;
        if reached || open >= stop.max_open {
            return Ok(GeneralExploration { state, tally, outcome: Outcome::Survived });
        }
    }
    Ok(GeneralExploration { state, tally, outcome: Outcome::Died })
}

/// Checks a finished exploration against the infinite-volume dynamics on the
/// same clocks. Returns the open vertices whose connection to the origin is
/// not confirmed: too many feasible edges, an activating edge that is closed,
/// or a parent that is not open.
pub fn replay_general(
    run: &GeneralExploration,
    kappa: u32,
    t: f64,
    field: ClockField,
) -> Vec<Point> {
    let d = run.state.vertices[0].point.len();
    let kind = LatticeKind::Hypercubic { dim: d };
    let mut dynamics = LocalDynamics::new(kind, field, kappa, t);
    let mut bad = Vec::new();
    for v in run.state.with_status(VertexStatus::Open) {
        let feasible = kind.incident(&v.point).iter().filter(|(_, e)| field.clock(e) <= t).count();
        let linked = match (&v.activating_edge, &v.parent) {
            (None, None) => v.point.iter().all(|&c| c == 0),
            (Some(e), Some(p)) => {
                let (x, y) = kind.endpoints(e);
                let joins = (x == v.point && &y == p) || (&x == p && y == v.point);
                joins
                    && run.state.get(p).map(|q| q.status) == Some(VertexStatus::Open)
                    && dynamics.is_open(e)
            }
            _ => false,
        };
        if feasible > kappa as usize || !linked {
            bad.push(v.point.clone());
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(d: usize, kappa: u32, t: f64, seed: u64, stop: StopRule) -> GeneralExploration {
        let map = ProjectionMap::new(d, 2).unwrap();
        explore_general(&map, kappa, t, ClockField::new(seed), stop).unwrap()
    }

    #[test]
    fn time_zero_dies_at_the_origin() {
        let r = run(4, 4, 0.0, 1, StopRule::default());
        assert_eq!(r.outcome, Outcome::Died);
        assert_eq!(r.state.count(VertexStatus::Open), 1);
        assert_eq!(r.state.vertices.len(), 1);
        assert_eq!(r.tally.get(BOND_CONTEXT).successes, 0);
        assert_eq!(r.tally.get(BOND_CONTEXT).trials, 4);
    }

    #[test]
    fn time_one_fills_the_target_window() {
        let r = run(4, 8, 1.0, 2, StopRule::new(1_000_000, 6).unwrap());
        assert_eq!(r.outcome, Outcome::Survived);
        assert_eq!(r.state.count(VertexStatus::Closed), 0);
        let t = r.tally.get(BOND_CONTEXT);
        assert_eq!(t.trials, t.successes);
    }

    #[test]
    fn projection_stays_injective_and_runs_are_sound() {
        for seed in 0..20 {
            let r = run(10, 10, 0.17, seed, StopRule::new(500, 200).unwrap());
            let images: HashSet<Point> = r
                .state
                .vertices
                .iter()
                .map(|v| ProjectionMap::new(10, 2).unwrap().project(&v.point))
                .collect();
            assert_eq!(images.len(), r.state.vertices.len());
            assert!(replay_general(&r, 10, 0.17, ClockField::new(seed)).is_empty());
            let done = r.state.pending() == 0;
            assert_eq!(r.outcome == Outcome::Died, done);
        }
    }

    #[test]
    fn sets_partition_the_active_set() {
        let r = run(6, 6, 0.3, 9, StopRule::new(200, 50).unwrap());
        let total: usize = [VertexStatus::Active, VertexStatus::Open, VertexStatus::Closed, VertexStatus::Useless]
            .iter()
            .map(|&s| r.state.count(s))
            .sum();
        assert_eq!(total, r.state.vertices.len());
    }

    #[test]
    fn deterministic() {
        let a = run(10, 10, 0.17, 77, StopRule::new(300, 200).unwrap());
        let b = run(10, 10, 0.17, 77, StopRule::new(300, 200).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_parameters() {
        let map = ProjectionMap::new(3, 2).unwrap();
        assert!(explore_general(&map, 7, 0.5, ClockField::new(0), StopRule::default()).is_err());
        assert!(explore_general(&map, 3, 1.5, ClockField::new(0), StopRule::default()).is_err());
    }
}
