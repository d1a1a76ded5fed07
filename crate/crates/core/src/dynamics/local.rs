use std::collections::HashMap;

use crate::clocks::ClockField;
use crate::lattice::{EdgeId, LatticeKind};

/// Infinite-volume evaluation of `omega(t)` on `Z^d` or the matching square
/// lattice.
///
/// The state of an edge depends only on edges reachable from it by paths of
/// strictly decreasing clocks, which are almost surely finite, so the state is
/// computed exactly by recursion on earlier adjacent edges. Results are memoized.
pub struct LocalDynamics {
    kind: LatticeKind,
    field: ClockField,
    kappa: u32,
    t: f64,
    memo: HashMap<EdgeId, bool>,
}

impl LocalDynamics {
    pub fn new(kind: LatticeKind, field: ClockField, kappa: u32, t: f64) -> Self {
        Self { kind, field, kappa, t, memo: HashMap::new() }
    }

    pub fn clock(&self, e: &EdgeId) -> f64 {
        self.field.clock(e)
    }

    /// Number of edge states computed so far.
    pub fn evaluated(&self) -> usize {
        self.memo.len()
    }

    pub fn is_open(&mut self, e: &EdgeId) -> bool {
        if let Some(&s) = self.memo.get(e) {
            return s;
        }
        let u = self.field.clock(e);
        let state = u <= self.t && {
            let (a, b) = self.kind.endpoints(e);
            self.below_cap_before(&a, e, u) && self.below_cap_before(&b, e, u)
        };
        self.memo.insert(e.clone(), state);
        state
    }

    /// Whether `v` has fewer than `kappa` open edges that precede `e` in clock order.
    fn below_cap_before(&mut self, v: &[i64], e: &EdgeId, u: f64) -> bool {
        let mut earlier: Vec<(f64, EdgeId)> = self
            .kind
            .incident(v)
            .into_iter()
            .map(|(_, f)| (self.field.clock(&f), f))
            .filter(|(uf, f)| f != e && (*uf < u || (*uf == u && f < e)))
            .collect();
        if earlier.len() < self.kappa as usize {
            return true;
        }
        earlier.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut count = 0;
        for (_, f) in earlier {
            if self.is_open(&f) {
                count += 1;
                if count >= self.kappa {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, window_clocks};
    use crate::lattice::{Boundary, LatticeSpec, Window};

    /// Away from the window boundary the local evaluation must agree with the
    /// windowed run whenever the decreasing-clock dependency set stays inside.
    #[test]
    fn agrees_with_window_in_the_bulk() {
        let spec = LatticeSpec::hypercubic(2, Boundary::FreeBox, 30).unwrap();
        let w = Window::new(spec);
        for seed in 0..5 {
            let field = ClockField::new(seed);
            let _ = window_clocks(&w, &field);
            let c = evolve(&w, 3, &field, 0.7);
            let mut local = LocalDynamics::new(spec.kind, field, 3, 0.7);
            for e in 0..w.num_edges() {
                let id = w.edge_id(e);
                if id.base.iter().all(|c| c.abs() <= 3) {
                    assert_eq!(local.is_open(id), c.is_open(e), "seed {seed} edge {id}");
                }
            }
        }
    }

    #[test]
    fn unconstrained_reduces_to_feasibility() {
        let field = ClockField::new(3);
        let kind = LatticeKind::Hypercubic { dim: 3 };
        let mut local = LocalDynamics::new(kind, field, 6, 0.5);
        for x in -3..3 {
            let e = EdgeId::new(vec![x, 1, -x], (x.rem_euclid(3)) as u8);
            assert_eq!(local.is_open(&e), field.clock(&e) <= 0.5);
        }
    }
}
