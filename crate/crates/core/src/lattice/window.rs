use super::{Boundary, EdgeId, LatticeSpec, Point};
use crate::clocks::edge_key;

/// One adjacency entry of a materialized window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adjacent {
    pub vertex: u32,
    pub edge: u32,
    pub dir: u8,
    /// `+1` when the step follows the positive direction `dir`.
    pub sign: i8,
}

/// A materialized finite window: vertices indexed in mixed radix, edges listed
/// in canonical order (base vertex index, then direction).
#[derive(Debug, Clone)]
pub struct Window {
    pub spec: LatticeSpec,
    num_vertices: usize,
    edges: Vec<[u32; 2]>,
    edge_ids: Vec<EdgeId>,
    edge_keys: Vec<u64>,
    offsets: Vec<usize>,
    adjacency: Vec<Adjacent>,
}

impl Window {
    pub fn new(spec: LatticeSpec) -> Self {
        let dim = spec.kind.dim();
        let side = spec.side() as usize;
        let num_vertices = side.pow(dim as u32);
        let ndirs = spec.kind.num_dirs();
        let mut edges = Vec::with_capacity(num_vertices * ndirs);
        let mut edge_ids = Vec::with_capacity(num_vertices * ndirs);
        let mut lists: Vec<Vec<Adjacent>> = vec![Vec::new(); num_vertices];
        let steps: Vec<Point> = (0..ndirs).map(|d| spec.kind.direction(d)).collect();
        let r = spec.radius as i64;
        for v in 0..num_vertices {
            let p = point_of(v, dim, side, r);
            for (dir, step) in steps.iter().enumerate() {
                let mut q: Point = p.iter().zip(step).map(|(a, b)| a + b).collect();
                match spec.boundary {
                    Boundary::FreeBox => {
                        if !spec.contains(&q) {
                            continue;
                        }
                    }
                    Boundary::Torus => {
                        for c in q.iter_mut() {
                            *c = (*c + r).rem_euclid(side as i64) - r;
                        }
                    }
                }
                let w = index_of(&q, side, r);
                let idx = edges.len() as u32;
                edges.push([v as u32, w as u32]);
                edge_ids.push(EdgeId::new(p.clone(), dir as u8));
                lists[v].push(Adjacent { vertex: w as u32, edge: idx, dir: dir as u8, sign: 1 });
                lists[w].push(Adjacent { vertex: v as u32, edge: idx, dir: dir as u8, sign: -1 });
            }
        }
        let mut offsets = Vec::with_capacity(num_vertices + 1);
        let mut adjacency = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for l in lists {
            adjacency.extend(l);
            offsets.push(adjacency.len());
        }
        let edge_keys = edge_ids.iter().map(edge_key).collect();
        Self { spec, num_vertices, edges, edge_ids, edge_keys, offsets, adjacency }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, e: usize) -> [u32; 2] {
        self.edges[e]
    }

    pub fn edge_id(&self, e: usize) -> &EdgeId {
        &self.edge_ids[e]
    }

    pub fn edge_keys(&self) -> &[u64] {
        &self.edge_keys
    }

    pub fn adjacent(&self, v: usize) -> &[Adjacent] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn point(&self, v: usize) -> Point {
        point_of(v, self.spec.kind.dim(), self.spec.side() as usize, self.spec.radius as i64)
    }

    pub fn index(&self, p: &[i64]) -> Option<usize> {
        self.spec
            .contains(p)
            .then(|| index_of(p, self.spec.side() as usize, self.spec.radius as i64))
    }

    pub fn origin(&self) -> usize {
        index_of(&vec![0; self.spec.kind.dim()], self.spec.side() as usize, self.spec.radius as i64)
    }

    /// True on the outer face of the box (sup-norm equal to the radius).
    pub fn on_boundary(&self, v: usize) -> bool {
        let r = self.spec.radius as i64;
        self.point(v).iter().any(|c| c.abs() == r)
    }

    /// Edges as plain endpoint pairs, for the generic dynamics.
    pub fn edge_list(&self) -> &[[u32; 2]] {
        &self.edges
    }
}

fn point_of(mut v: usize, dim: usize, side: usize, r: i64) -> Point {
    let mut p = vec![0; dim];
    for c in p.iter_mut().rev() {
        *c = (v % side) as i64 - r;
        v /= side;
    }
    p
}

fn index_of(p: &[i64], side: usize, r: i64) -> usize {
    p.iter().fold(0, |acc, &c| acc * side + (c + r) as usize)
}
