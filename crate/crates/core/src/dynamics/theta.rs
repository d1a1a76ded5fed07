//! Monte Carlo estimation of finite-window percolation probabilities.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evolve_edges, window_clocks};
use crate::clocks::{derive_seed, ClockField};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeSpec, Window};
use crate::stats::binomial_stderr;

/// The finite-window proxy for `0 <-> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaEvent {
    /// Free box: the origin connects to the outer face of the box.
    OriginToBoundary,
    /// Torus: the cluster of the origin wraps around.
    WrapAround,
}

impl ThetaEvent {
    pub fn for_boundary(b: Boundary) -> Self {
        match b {
            Boundary::FreeBox => ThetaEvent::OriginToBoundary,
            Boundary::Torus => ThetaEvent::WrapAround,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ThetaEvent::OriginToBoundary => "origin-to-boundary",
            ThetaEvent::WrapAround => "wrap-around",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub spec: LatticeSpec,
    pub kappa: u32,
    pub t: f64,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
    pub event: ThetaEvent,
}

impl ThetaEstimate {
    pub(crate) fn from_counts(
        spec: LatticeSpec,
        kappa: u32,
        t: f64,
        samples: u64,
        hits: u64,
        seed: u64,
    ) -> Self {
        let estimate = hits as f64 / samples as f64;
        Self {
            spec,
            kappa,
            t,
            samples,
            hits,
            estimate,
            stderr: binomial_stderr(hits, samples),
            seed,
            event: ThetaEvent::for_boundary(spec.boundary),
        }
    }

    pub const CSV_HEADER: [&'static str; 9] =
        ["spec", "kappa", "t", "n", "samples", "estimate", "stderr", "seed", "boundary_mode"];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            format!("{}/{}", self.spec.kind, self.spec.boundary),
            self.kappa.to_string(),
            self.t.to_string(),
            self.spec.radius.to_string(),
            self.samples.to_string(),
            self.estimate.to_string(),
            self.stderr.to_string(),
            self.seed.to_string(),
            self.event.label().to_string(),
        ]
    }
}

/// Whether the cluster of the origin realizes `event` given open edges.
pub fn cluster_reaches(window: &Window, open: &[bool], event: ThetaEvent) -> bool {
    let n = window.num_vertices();
    let dim = window.spec.kind.dim();
    let origin = window.origin();
    let steps: Vec<Vec<i64>> = (0..window.spec.kind.num_dirs())
        .map(|d| window.spec.kind.direction(d))
        .collect();
    let mut seen = vec![false; n];
    // unwrapped coordinates, only used on the torus
    let mut lifted = match event {
        ThetaEvent::WrapAround => vec![0i64; n * dim],
        ThetaEvent::OriginToBoundary => Vec::new(),
    };
    let mut queue = VecDeque::new();
    seen[origin] = true;
    queue.push_back(origin);
    while let Some(v) = queue.pop_front() {
        if event == ThetaEvent::OriginToBoundary && window.on_boundary(v) {
            return true;
        }
        for adj in window.adjacent(v) {
            if !open[adj.edge as usize] {
                continue;
            }
            let w = adj.vertex as usize;
            if event == ThetaEvent::WrapAround {
                let step = &steps[adj.dir as usize];
                let next: Vec<i64> = (0..dim)
                    .map(|i| lifted[v * dim + i] + adj.sign as i64 * step[i])
                    .collect();
                if seen[w] {
                    if lifted[w * dim..(w + 1) * dim] != next[..] {
                        return true;
                    }
                    continue;
                }
                lifted[w * dim..(w + 1) * dim].copy_from_slice(&next);
            } else if seen[w] {
                continue;
            }
            seen[w] = true;
            queue.push_back(w);
        }
    }
    false
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {x} not in [0, 1]")))
    }
}

fn sample_hits(window: &Window, kappa: u32, grid: &[f64], seed: u64, index: u64) -> Vec<bool> {
    let field = ClockField::new(derive_seed(seed, index));
    let clocks = window_clocks(window, &field);
    let t_max = grid.last().copied().unwrap_or(0.0);
    let late = evolve_edges(window.num_vertices(), window.edge_list(), &clocks, kappa, t_max);
    let event = ThetaEvent::for_boundary(window.spec.boundary);
    grid.iter()
        .map(|&t| {
            let open: Vec<bool> = late
                .open_edges()
                .iter()
                .zip(&clocks)
                .map(|(&o, &u)| o && u <= t)
                .collect();
            cluster_reaches(window, &open, event)
        })
        .collect()
}

fn run_grid(spec: LatticeSpec, kappa: u32, grid: &[f64], samples: u64, seed: u64) -> Vec<u64> {
    let window = Window::new(spec);
    (0..samples)
        .into_par_iter()
        .map(|i| sample_hits(&window, kappa, grid, seed, i))
        .fold(
            || vec![0u64; grid.len()],
            |mut acc, hits| {
                for (a, h) in acc.iter_mut().zip(hits) {
                    *a += h as u64;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; grid.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Estimates the window proxy of `theta(t)`; sample `i` uses clocks seeded by
/// `derive_seed(seed, i)`, so the result does not depend on the thread count.
pub fn estimate_theta(
    spec: LatticeSpec,
    kappa: u32,
    t: f64,
    samples: u64,
    seed: u64,
) -> Result<ThetaEstimate> {
    Ok(theta_curve(spec, kappa, &[t], samples, seed)?.remove(0))
}

/// [`estimate_theta`] on a dedicated pool of `threads` workers.
pub fn estimate_theta_with_threads(
    spec: LatticeSpec,
    kappa: u32,
    t: f64,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<ThetaEstimate> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    pool.install(|| estimate_theta(spec, kappa, t, samples, seed))
}

/// One estimate per grid point, using common clocks across the grid.
pub fn theta_curve(
    spec: LatticeSpec,
    kappa: u32,
    grid: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<ThetaEstimate>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    if kappa == 0 {
        return Err(Error::InvalidParameter("kappa must be positive".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty t-grid".into()));
    }
    for &t in grid {
        check_unit("t", t)?;
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("t-grid must be sorted".into()));
    }
    let hits = run_grid(spec, kappa, grid, samples, seed);
    Ok(grid
        .iter()
        .zip(hits)
        .map(|(&t, h)| ThetaEstimate::from_counts(spec, kappa, t, samples, h, seed))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_zero() {
        let spec = LatticeSpec::hypercubic(2, Boundary::FreeBox, 5).unwrap();
        let est = estimate_theta(spec, 2, 0.0, 50, 1).unwrap();
        assert_eq!(est.hits, 0);
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn time_one_unconstrained_always_connects() {
        for boundary in [Boundary::FreeBox, Boundary::Torus] {
            let spec = LatticeSpec::hypercubic(2, boundary, 4).unwrap();
            assert_eq!(estimate_theta(spec, 4, 1.0, 20, 3).unwrap().hits, 20);
        }
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let spec = LatticeSpec::hypercubic(2, Boundary::Torus, 6).unwrap();
        let a = estimate_theta_with_threads(spec, 3, 0.7, 300, 42, 1).unwrap();
        let b = estimate_theta_with_threads(spec, 3, 0.7, 300, 42, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn common_clock_curve_is_monotone() {
        let spec = LatticeSpec::hypercubic(2, Boundary::FreeBox, 20).unwrap();
        let c = theta_curve(spec, 4, &[0.25, 0.5, 0.75], 300, 9).unwrap();
        assert!(c[0].hits <= c[1].hits && c[1].hits <= c[2].hits);
    }

    #[test]
    fn rejects_bad_input() {
        let spec = LatticeSpec::hypercubic(2, Boundary::FreeBox, 3).unwrap();
        assert!(estimate_theta(spec, 2, 0.5, 0, 1).is_err());
        assert!(theta_curve(spec, 2, &[0.5, 0.4], 10, 1).is_err());
        assert!(estimate_theta(spec, 2, 1.5, 10, 1).is_err());
    }

    #[test]
    fn wrap_detection() {
        let w = Window::new(LatticeSpec::hypercubic(2, Boundary::Torus, 1).unwrap());
        let mut open = vec![false; w.num_edges()];
        // the horizontal ring through the origin
        for v in 0..w.num_vertices() {
            let p = w.point(v);
            if p[1] == 0 {
                for adj in w.adjacent(v) {
                    if adj.dir == 0 {
                        open[adj.edge as usize] = true;
                    }
                }
            }
        }
        assert!(cluster_reaches(&w, &open, ThetaEvent::WrapAround));
        let mut single = vec![false; w.num_edges()];
        single[w.adjacent(w.origin())[0].edge as usize] = true;
        assert!(!cluster_reaches(&w, &single, ThetaEvent::WrapAround));
    }
}
