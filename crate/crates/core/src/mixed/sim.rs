//! Monte Carlo for mixed site-bond percolation on `Z^d'`: the crossing
//! probability `theta_n(s, b) = P(0 <-> dB_{n+1})` on the L1 ball and the
//! pivotal sums entering Russo's formula.
//!
//! A path from the origin to the sphere must use open bonds and open interior
//! sites; the origin and the sphere vertex it reaches are exempt. Site and
//! bond uniforms are keyed by coordinates, so estimates at different `s`,
//! `b` or `n` with the same seed use common random numbers.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::MixedParams;
use crate::clocks::{absorb, derive_seed, edge_key, ClockField};
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, LatticeKind, Point};
use crate::stats::binomial_stderr;

/// The L1 ball of radius `n + 1` in `Z^dim` with the bonds between its points.
#[derive(Debug, Clone)]
pub struct Ball {
    pub dim: usize,
    pub n: u32,
    pub points: Vec<Point>,
    /// Point lies on the sphere `|x|_1 = n + 1`.
    pub sphere: Vec<bool>,
    pub bonds: Vec<[u32; 2]>,
    adj: Vec<Vec<(u32, u32)>>,
    site_keys: Vec<u64>,
    bond_keys: Vec<u64>,
}

fn site_key(p: &[i64]) -> u64 {
    p.iter().fold(0x5173_0000_u64 ^ p.len() as u64, |h, &c| absorb(h, c as u64))
}

impl Ball {
    pub fn new(dim: usize, n: u32) -> Result<Self> {
        if dim < 1 || n < 1 {
            return Err(Error::InvalidParameter(format!("need dim >= 1 and n >= 1, got {dim}, {n}")));
        }
        let r = n as i64 + 1;
        let mut points = vec![vec![]];
        for _ in 0..dim {
            points = points
                .into_iter()
                .flat_map(|p: Point| {
                    let used: i64 = p.iter().map(|c| c.abs()).sum();
                    (-(r - used)..=(r - used)).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        points.sort();
        let index: HashMap<Point, u32> = points.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
        let kind = LatticeKind::Hypercubic { dim };
        let mut bonds = Vec::new();
        let mut bond_keys = Vec::new();
        let mut adj = vec![Vec::new(); points.len()];
        for (i, p) in points.iter().enumerate() {
            for dir in 0..dim {
                let e = EdgeId::new(p.clone(), dir as u8);
                let (_, q) = kind.endpoints(&e);
                if let Some(&j) = index.get(&q) {
                    let k = bonds.len() as u32;
                    bonds.push([i as u32, j]);
                    bond_keys.push(edge_key(&e) ^ 0xb0d0_0000_0000_0000);
                    adj[i].push((j, k));
                    adj[j as usize].push((i as u32, k));
                }
            }
        }
        let sphere = points.iter().map(|p| p.iter().map(|c| c.abs()).sum::<i64>() == r).collect();
        let site_keys = points.iter().map(|p| site_key(p)).collect();
        Ok(Self { dim, n, points, sphere, bonds, adj, site_keys, bond_keys })
    }

    pub fn origin(&self) -> u32 {
        self.points.binary_search(&vec![0; self.dim]).expect("origin in ball") as u32
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_bonds(&self) -> usize {
        self.bonds.len()
    }

    fn site_uniform(&self, field: &ClockField, v: u32) -> f64 {
        field.clock_of_key(self.site_keys[v as usize])
    }

    fn bond_uniform(&self, field: &ClockField, e: u32) -> f64 {
        field.clock_of_key(self.bond_keys[e as usize])
    }
}

/// Reusable BFS buffers with generation stamps.
struct Scratch {
    stamp: Vec<u32>,
    parent: Vec<(u32, u32)>,
    generation: u32,
    queue: VecDeque<u32>,
}

impl Scratch {
    fn new(size: usize) -> Self {
        Self { stamp: vec![0; size], parent: vec![(u32::MAX, u32::MAX); size], generation: 0, queue: VecDeque::new() }
    }

    fn reset(&mut self) {
        self.generation += 1;
        self.queue.clear();
    }

    fn seen(&self, v: u32) -> bool {
        self.stamp[v as usize] == self.generation
    }

    fn mark(&mut self, v: u32, parent: (u32, u32)) {
        self.stamp[v as usize] = self.generation;
        self.parent[v as usize] = parent;
    }
}

/// BFS from the origin; returns the sphere vertex reached, if any.
fn connect(
    ball: &Ball,
    scratch: &mut Scratch,
    site_open: &mut dyn FnMut(u32) -> bool,
    bond_open: &mut dyn FnMut(u32) -> bool,
) -> Option<u32> {
    scratch.reset();
    let o = ball.origin();
    scratch.mark(o, (u32::MAX, u32::MAX));
    scratch.queue.push_back(o);
    while let Some(v) = scratch.queue.pop_front() {
        for &(w, e) in &ball.adj[v as usize] {
            if scratch.seen(w) || !bond_open(e) {
                continue;
            }
            if ball.sphere[w as usize] {
                scratch.mark(w, (v, e));
                return Some(w);
            }
            if site_open(w) {
                scratch.mark(w, (v, e));
                scratch.queue.push_back(w);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedThetaEstimate {
    pub s: f64,
    pub b: f64,
    pub n: u32,
    pub dim: usize,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl MixedThetaEstimate {
    pub const CSV_HEADER: [&'static str; 8] = ["s", "b", "n", "dim", "samples", "estimate", "stderr", "seed"];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.s.to_string(),
            self.b.to_string(),
            self.n.to_string(),
            self.dim.to_string(),
            self.samples.to_string(),
            self.estimate.to_string(),
            self.stderr.to_string(),
            self.seed.to_string(),
        ]
    }
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    Ok(())
}

/// Estimates `theta_n(s, b)` on `Z^dim`.
pub fn theta_n_mixed(params: MixedParams, n: u32, samples: u64, seed: u64, dim: usize) -> Result<MixedThetaEstimate> {
    check_samples(samples)?;
    let ball = Ball::new(dim, n)?;
    let MixedParams { s, b } = params;
    let hits = (0..samples)
        .into_par_iter()
        .fold(
            || (Scratch::new(ball.num_points()), 0u64),
            |(mut scratch, hits), i| {
                let field = ClockField::new(derive_seed(seed, i));
                let hit = connect(
                    &ball,
                    &mut scratch,
                    &mut |v| ball.site_uniform(&field, v) < s,
                    &mut |e| ball.bond_uniform(&field, e) < b,
                )
                .is_some();
                (scratch, hits + hit as u64)
            },
        )
        .map(|(_, h)| h)
        .sum::<u64>();
    Ok(MixedThetaEstimate {
        s,
        b,
        n,
        dim,
        samples,
        hits,
        estimate: hits as f64 / samples as f64,
        stderr: binomial_stderr(hits, samples),
        seed,
    })
}

/// Numbers of pivotal interior sites and pivotal bonds for `0 <-> dB_{n+1}`
/// in one configuration.
fn pivotal_counts(ball: &Ball, site: &mut [bool], bond: &mut [bool], scratch: &mut Scratch) -> (bool, u64, u64) {
    let o = ball.origin();
    let holds = |site: &[bool], bond: &[bool], scratch: &mut Scratch| {
        connect(ball, scratch, &mut |v| site[v as usize], &mut |e| bond[e as usize])
    };
    match holds(site, bond, scratch) {
        Some(end) => {
            // Only elements of one open crossing can be pivotal.
            let (mut path_sites, mut path_bonds) = (Vec::new(), Vec::new());
            let mut v = end;
            while v != o {
                let (p, e) = scratch.parent[v as usize];
                path_bonds.push(e);
                if p != o {
                    path_sites.push(p);
                }
                v = p;
            }
            let mut sites = 0;
            for x in path_sites {
                site[x as usize] = false;
                sites += holds(site, bond, scratch).is_none() as u64;
                site[x as usize] = true;
            }
            let mut bonds = 0;
            for e in path_bonds {
                bond[e as usize] = false;
                bonds += holds(site, bond, scratch).is_none() as u64;
                bond[e as usize] = true;
            }
            (true, sites, bonds)
        }
        None => {
            let in_cluster: Vec<bool> = (0..ball.num_points() as u32).map(|v| scratch.seen(v)).collect();
            // Vertices joined to the sphere through open bonds and open interior sites.
            let mut to_sphere = ball.sphere.clone();
            let mut queue: VecDeque<u32> = (0..ball.num_points() as u32).filter(|&v| ball.sphere[v as usize]).collect();
            while let Some(v) = queue.pop_front() {
                for &(w, e) in &ball.adj[v as usize] {
                    let w_ = w as usize;
                    if !to_sphere[w_] && bond[e as usize] && site[w_] && w != o && !ball.sphere[w_] {
                        to_sphere[w_] = true;
                        queue.push_back(w);
                    }
                }
            }
            let mut sites = 0;
            for x in 0..ball.num_points() {
                if x as u32 == o || ball.sphere[x] || site[x] {
                    continue;
                }
                let touches = |target: &[bool]| {
                    ball.adj[x].iter().any(|&(w, e)| bond[e as usize] && target[w as usize])
                };
                sites += (touches(&in_cluster) && touches(&to_sphere)) as u64;
            }
            let mut bonds = 0;
            for (k, &[u, v]) in ball.bonds.iter().enumerate() {
                if bond[k] {
                    continue;
                }
                let (u, v) = (u as usize, v as usize);
                bonds += ((in_cluster[u] && to_sphere[v]) || (in_cluster[v] && to_sphere[u])) as u64;
            }
            (false, sites, bonds)
        }
    }
}

/// Integer moment sums of per-sample quantities `(hit, site, bond, fd)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Moments {
    n: i128,
    h: i128,
    x: i128,
    y: i128,
    f: i128,
    xx: i128,
    yy: i128,
    ff: i128,
    xy: i128,
    xf: i128,
}

impl Moments {
    fn push(mut self, h: i128, x: i128, y: i128, f: i128) -> Self {
        self.n += 1;
        self.h += h;
        self.x += x;
        self.y += y;
        self.f += f;
        self.xx += x * x;
        self.yy += y * y;
        self.ff += f * f;
        self.xy += x * y;
        self.xf += x * f;
        self
    }

    fn add(self, o: Self) -> Self {
        Self {
            n: self.n + o.n,
            h: self.h + o.h,
            x: self.x + o.x,
            y: self.y + o.y,
            f: self.f + o.f,
            xx: self.xx + o.xx,
            yy: self.yy + o.yy,
            ff: self.ff + o.ff,
            xy: self.xy + o.xy,
            xf: self.xf + o.xf,
        }
    }

    fn mean(&self, s: i128) -> f64 {
        s as f64 / self.n as f64
    }

    /// Sample covariance of two quantities from their sums and cross sum.
    fn cov(&self, a: i128, b: i128, ab: i128) -> f64 {
        let n = self.n as f64;
        if self.n < 2 {
            return 0.0;
        }
        (ab as f64 - a as f64 * b as f64 / n) / (n - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotalityEstimate {
    pub s: f64,
    pub b: f64,
    pub n: u32,
    pub samples: u64,
    pub seed: u64,
    pub theta: f64,
    /// Estimate of the expected number of pivotal sites, `d theta_n / ds`.
    pub site_mass: f64,
    pub site_stderr: f64,
    /// Estimate of the expected number of pivotal bonds, `d theta_n / db`.
    pub bond_mass: f64,
    pub bond_stderr: f64,
    /// `(4 - 3b) / (2 s (1 - b))`.
    pub ratio_factor: f64,
    /// Mean of `sites - ratio_factor * bonds` per sample; the comparison
    /// inequality says its expectation is at most zero.
    pub ratio_excess: f64,
    pub ratio_excess_stderr: f64,
}

impl PivotalityEstimate {
    /// The comparison inequality holds within `z` standard errors.
    pub fn ratio_holds(&self, z: f64) -> bool {
        self.ratio_excess <= z * self.ratio_excess_stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RussoCheck {
    pub pivotality: PivotalityEstimate,
    pub eps: f64,
    /// `(theta_n(s + eps, b) - theta_n(s - eps, b)) / (2 eps)` on the same samples.
    pub finite_difference: f64,
    pub finite_difference_stderr: f64,
    /// Mean per-sample difference between the finite difference and the
    /// number of pivotal sites.
    pub discrepancy: f64,
    pub discrepancy_stderr: f64,
}

impl RussoCheck {
    pub fn agrees(&self, z: f64) -> bool {
        self.discrepancy.abs() <= z * self.discrepancy_stderr
    }
}

pub fn ratio_factor(params: MixedParams) -> f64 {
    (4.0 - 3.0 * params.b) / (2.0 * params.s * (1.0 - params.b))
}

fn russo_moments(params: MixedParams, n: u32, eps: Option<f64>, samples: u64, seed: u64) -> Result<Moments> {
    check_samples(samples)?;
    let ball = Ball::new(2, n)?;
    let MixedParams { s, b } = params;
    let m = (0..samples)
        .into_par_iter()
        .fold(
            || (Scratch::new(ball.num_points()), Moments::default()),
            |(mut scratch, m), i| {
                let field = ClockField::new(derive_seed(seed, i));
                let su: Vec<f64> = (0..ball.num_points() as u32).map(|v| ball.site_uniform(&field, v)).collect();
                let mut bond: Vec<bool> = (0..ball.num_bonds() as u32).map(|e| ball.bond_uniform(&field, e) < b).collect();
                let mut site: Vec<bool> = su.iter().map(|&u| u < s).collect();
                let (h, x, y) = pivotal_counts(&ball, &mut site, &mut bond, &mut scratch);
                let f = match eps {
                    Some(eps) => {
                        let mut at = |level: f64| {
                            connect(&ball, &mut scratch, &mut |v| su[v as usize] < level, &mut |e| bond[e as usize])
                                .is_some() as i128
                        };
                        at(s + eps) - at(s - eps)
                    }
                    None => 0,
                };
                (scratch, m.push(h as i128, x as i128, y as i128, f))
            },
        )
        .map(|(_, m)| m)
        .reduce(Moments::default, Moments::add);
    Ok(m)
}

fn pivotality_from(params: MixedParams, n: u32, samples: u64, seed: u64, m: &Moments) -> PivotalityEstimate {
    let k = ratio_factor(params);
    let count = m.n as f64;
    let (vx, vy, cxy) = (m.cov(m.x, m.x, m.xx), m.cov(m.y, m.y, m.yy), m.cov(m.x, m.y, m.xy));
    PivotalityEstimate {
        s: params.s,
        b: params.b,
        n,
        samples,
        seed,
        theta: m.mean(m.h),
        site_mass: m.mean(m.x),
        site_stderr: (vx / count).sqrt(),
        bond_mass: m.mean(m.y),
        bond_stderr: (vy / count).sqrt(),
        ratio_factor: k,
        ratio_excess: m.mean(m.x) - k * m.mean(m.y),
        ratio_excess_stderr: ((vx - 2.0 * k * cxy + k * k * vy).max(0.0) / count).sqrt(),
    }
}

/// Monte Carlo estimates of the pivotal sums `sum_x P(x pivotal)` over
/// interior sites and `sum_e P(e pivotal)` over bonds, on `Z^2`.
pub fn pivotality_estimate(params: MixedParams, n: u32, samples: u64, seed: u64) -> Result<PivotalityEstimate> {
    let m = russo_moments(params, n, None, samples, seed)?;
    Ok(pivotality_from(params, n, samples, seed, &m))
}

/// Pivotal sums together with a central finite difference of `theta_n` in
/// `s`, all computed on the same samples.
pub fn russo_check(params: MixedParams, n: u32, eps: f64, samples: u64, seed: u64) -> Result<RussoCheck> {
    if !(eps > 0.0) || params.s - eps < 0.0 || params.s + eps > 1.0 {
        return Err(Error::InvalidParameter(format!("need 0 < eps and s +- eps in [0, 1], got eps = {eps}")));
    }
    let m = russo_moments(params, n, Some(eps), samples, seed)?;
    let count = m.n as f64;
    let c = 1.0 / (2.0 * eps);
    let (vf, vx, cxf) = (m.cov(m.f, m.f, m.ff), m.cov(m.x, m.x, m.xx), m.cov(m.x, m.f, m.xf));
    Ok(RussoCheck {
        pivotality: pivotality_from(params, n, samples, seed, &m),
        eps,
        finite_difference: c * m.mean(m.f),
        finite_difference_stderr: (c * c * vf / count).sqrt(),
        discrepancy: c * m.mean(m.f) - m.mean(m.x),
        discrepancy_stderr: ((c * c * vf - 2.0 * c * cxf + vx).max(0.0) / count).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: f64, b: f64) -> MixedParams {
        MixedParams::new(s, b).unwrap()
    }

    #[test]
    fn ball_shape() {
        let ball = Ball::new(2, 1).unwrap();
        assert_eq!(ball.num_points(), 13);
        assert_eq!(ball.sphere.iter().filter(|&&x| x).count(), 8);
        assert_eq!(ball.num_bonds(), 16);
        assert_eq!(ball.points[ball.origin() as usize], vec![0, 0]);
        assert_eq!(Ball::new(3, 1).unwrap().num_points(), 25);
    }

    #[test]
    fn everything_open() {
        let e = theta_n_mixed(p(1.0, 1.0), 5, 100, 1, 2).unwrap();
        assert_eq!(e.hits, 100);
        let e = theta_n_mixed(p(1.0, 1.0), 3, 20, 1, 3).unwrap();
        assert_eq!(e.estimate, 1.0);
        let piv = pivotality_estimate(p(1.0, 1.0), 3, 50, 2).unwrap();
        assert_eq!((piv.site_mass, piv.bond_mass), (0.0, 0.0));
    }

    #[test]
    fn origin_is_exempt() {
        // Every crossing passes through an interior site.
        let e = theta_n_mixed(p(0.0, 1.0), 1, 100, 3, 2).unwrap();
        assert_eq!(e.hits, 0);
        let e = theta_n_mixed(p(1.0, 0.0), 1, 100, 3, 2).unwrap();
        assert_eq!(e.hits, 0);
    }

    #[test]
    fn common_random_numbers_are_monotone() {
        let seed = 41;
        let lo = theta_n_mixed(p(0.8, 0.6), 6, 4000, seed, 2).unwrap();
        let hi_s = theta_n_mixed(p(0.9, 0.6), 6, 4000, seed, 2).unwrap();
        let hi_b = theta_n_mixed(p(0.8, 0.7), 6, 4000, seed, 2).unwrap();
        let far = theta_n_mixed(p(0.8, 0.6), 10, 4000, seed, 2).unwrap();
        assert!(hi_s.hits >= lo.hits && hi_b.hits >= lo.hits && far.hits <= lo.hits);
    }

    /// Exact `theta_1` and pivotal sums on `Z^2` by enumerating all
    /// `2^(4 + 16)` configurations.
    fn exact_n1(s: f64, b: f64) -> (f64, f64, f64) {
        let ball = Ball::new(2, 1).unwrap();
        let interior: Vec<usize> = (0..13).filter(|&v| !ball.sphere[v] && v as u32 != ball.origin()).collect();
        let mut scratch = Scratch::new(13);
        let (mut theta, mut ds, mut db) = (0.0, 0.0, 0.0);
        for mask in 0u32..(1 << 20) {
            let mut site = vec![true; 13];
            for (k, &v) in interior.iter().enumerate() {
                site[v] = mask >> k & 1 == 1;
            }
            let mut bond: Vec<bool> = (0..16).map(|k| mask >> (4 + k) & 1 == 1).collect();
            let open_sites = (mask & 0xf).count_ones() as i32;
            let open_bonds = (mask >> 4).count_ones() as i32;
            let w = s.powi(open_sites) * (1.0 - s).powi(4 - open_sites) * b.powi(open_bonds) * (1.0 - b).powi(16 - open_bonds);
            let (h, x, y) = pivotal_counts(&ball, &mut site, &mut bond, &mut scratch);
            theta += w * h as u8 as f64;
            ds += w * x as f64;
            db += w * y as f64;
        }
        (theta, ds, db)
    }

    #[test]
    fn pivotal_sums_match_exact_derivatives() {
        let (s, b, h) = (0.7, 0.6, 1e-5);
        let (_, ds, db) = exact_n1(s, b);
        let fd_s = (exact_n1(s + h, b).0 - exact_n1(s - h, b).0) / (2.0 * h);
        let fd_b = (exact_n1(s, b + h).0 - exact_n1(s, b - h).0) / (2.0 * h);
        assert!((ds - fd_s).abs() < 1e-6, "{ds} {fd_s}");
        assert!((db - fd_b).abs() < 1e-6, "{db} {fd_b}");
        let piv = pivotality_estimate(p(s, b), 1, 100_000, 5).unwrap();
        assert!((piv.site_mass - ds).abs() <= 4.0 * piv.site_stderr);
        assert!((piv.bond_mass - db).abs() <= 4.0 * piv.bond_stderr);
    }

    #[test]
    fn deterministic() {
        let a = russo_check(p(0.9, 0.6), 3, 0.01, 2000, 9).unwrap();
        let b = russo_check(p(0.9, 0.6), 3, 0.01, 2000, 9).unwrap();
        assert_eq!(a, b);
        assert!(russo_check(p(0.995, 0.6), 3, 0.01, 10, 9).is_err());
    }
}
