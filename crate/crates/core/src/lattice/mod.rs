//! Lattice geometry: hypercubic lattices and the matching graph of the square
//! lattice, finite windows with canonical edge indexing, and the projections
//! used to map a `d`-dimensional exploration onto a lower-dimensional lattice.

mod projection;
mod window;

pub use projection::ProjectionMap;
pub use window::Window;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point. Coordinates are signed and unbounded.
pub type Point = Vec<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    /// `Z^d` with nearest-neighbour edges.
    Hypercubic { dim: usize },
    /// `Z^2` with edges between points at sup-distance one.
    MatchingSquare,
}

const MATCHING_DIRS: [[i64; 2]; 4] = [[1, 0], [0, 1], [1, 1], [1, -1]];

impl LatticeKind {
    pub fn dim(&self) -> usize {
        match self {
            LatticeKind::Hypercubic { dim } => *dim,
            LatticeKind::MatchingSquare => 2,
        }
    }

    /// Number of positive edge directions; every vertex has twice as many edges.
    pub fn num_dirs(&self) -> usize {
        match self {
            LatticeKind::Hypercubic { dim } => *dim,
            LatticeKind::MatchingSquare => 4,
        }
    }

    pub fn degree(&self) -> usize {
        2 * self.num_dirs()
    }

    /// Displacement of the positive direction `dir`.
    pub fn direction(&self, dir: usize) -> Point {
        match self {
            LatticeKind::Hypercubic { dim } => {
                let mut v = vec![0; *dim];
                v[dir] = 1;
                v
            }
            LatticeKind::MatchingSquare => MATCHING_DIRS[dir].to_vec(),
        }
    }

    /// The edges of `v` in the infinite lattice, as `(other endpoint, edge)`.
    ///
    /// Order: for each positive direction, the forward edge then the backward edge.
    pub fn incident(&self, v: &[i64]) -> Vec<(Point, EdgeId)> {
        let mut out = Vec::with_capacity(self.degree());
        for dir in 0..self.num_dirs() {
            let step = self.direction(dir);
            let fwd: Point = v.iter().zip(&step).map(|(a, b)| a + b).collect();
            let bwd: Point = v.iter().zip(&step).map(|(a, b)| a - b).collect();
            out.push((fwd, EdgeId::new(v.to_vec(), dir as u8)));
            out.push((bwd.clone(), EdgeId::new(bwd, dir as u8)));
        }
        out
    }

    /// Both endpoints of an edge of the infinite lattice.
    pub fn endpoints(&self, e: &EdgeId) -> (Point, Point) {
        let step = self.direction(e.dir as usize);
        let other = e.base.iter().zip(&step).map(|(a, b)| a + b).collect();
        (e.base.clone(), other)
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeKind::Hypercubic { dim } => write!(f, "hypercubic:{dim}"),
            LatticeKind::MatchingSquare => write!(f, "matching-square"),
        }
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "matching-square" {
            return Ok(LatticeKind::MatchingSquare);
        }
        let dim = s
            .strip_prefix("hypercubic:")
            .or_else(|| s.strip_prefix('Z'))
            .ok_or_else(|| Error::Parse(format!("unknown lattice `{s}`")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("lattice dimension in `{s}`: {e}")))?;
        if dim == 0 {
            return Err(Error::InvalidParameter("lattice dimension must be positive".into()));
        }
        Ok(LatticeKind::Hypercubic { dim })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Edges leaving the window are absent.
    FreeBox,
    /// Opposite faces are identified.
    Torus,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::FreeBox => "free-box",
            Boundary::Torus => "torus",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free-box" | "box" => Ok(Boundary::FreeBox),
            "torus" => Ok(Boundary::Torus),
            _ => Err(Error::Parse(format!("unknown boundary `{s}`"))),
        }
    }
}

/// A finite window: the sup-norm ball of radius `radius` (side `2 radius + 1`),
/// either with free boundary or wrapped into a torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub boundary: Boundary,
    pub radius: u32,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, boundary: Boundary, radius: u32) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidParameter("window radius must be positive".into()));
        }
        if kind.dim() == 0 {
            return Err(Error::InvalidParameter("lattice dimension must be positive".into()));
        }
        Ok(Self { kind, boundary, radius })
    }

    pub fn hypercubic(dim: usize, boundary: Boundary, radius: u32) -> Result<Self> {
        Self::new(LatticeKind::Hypercubic { dim }, boundary, radius)
    }

    pub fn side(&self) -> i64 {
        2 * self.radius as i64 + 1
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let r = self.radius as i64;
        v.len() == self.kind.dim() && v.iter().all(|c| (-r..=r).contains(c))
    }

    fn wrap(&self, c: i64) -> i64 {
        let r = self.radius as i64;
        (c + r).rem_euclid(self.side()) - r
    }

    fn check(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.kind.dim() {
            return Err(Error::DimensionMismatch {
                vertex: v.to_vec(),
                got: v.len(),
                expected: self.kind.dim(),
            });
        }
        if !self.contains(v) {
            return Err(Error::VertexOutsideWindow(v.to_vec()));
        }
        Ok(())
    }

    /// Neighbours of `v` inside the window with their canonical edge ids.
    ///
    /// On a torus this always has `degree` entries; on a free box, edges with an
    /// endpoint outside the window are dropped.
    pub fn neighbors(&self, v: &[i64]) -> Result<Vec<(Point, EdgeId)>> {
        self.check(v)?;
        let mut out = Vec::with_capacity(self.kind.degree());
        for (w, e) in self.kind.incident(v) {
            match self.boundary {
                Boundary::FreeBox => {
                    if self.contains(&w) {
                        out.push((w, e));
                    }
                }
                Boundary::Torus => {
                    let w: Point = w.iter().map(|&c| self.wrap(c)).collect();
                    let base = e.base.iter().map(|&c| self.wrap(c)).collect();
                    out.push((w, EdgeId::new(base, e.dir)));
                }
            }
        }
        Ok(out)
    }

    /// Endpoints of a window edge.
    pub fn endpoints(&self, e: &EdgeId) -> Result<(Point, Point)> {
        self.check(&e.base)?;
        if e.dir as usize >= self.kind.num_dirs() {
            return Err(Error::InvalidParameter(format!("direction {} out of range", e.dir)));
        }
        let (a, b) = self.kind.endpoints(e);
        match self.boundary {
            Boundary::FreeBox => {
                if !self.contains(&b) {
                    return Err(Error::VertexOutsideWindow(b));
                }
                Ok((a, b))
            }
            Boundary::Torus => Ok((a, b.iter().map(|&c| self.wrap(c)).collect())),
        }
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.kind, self.boundary, self.radius)
    }
}

/// Canonical edge key: the base endpoint and a positive direction index; the
/// other endpoint is `base + direction(dir)` (wrapped on a torus).
///
/// For the infinite lattice and free boxes the base is the lexicographically
/// smaller endpoint. The derived ordering is the tie-break order for clocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId {
    pub base: Point,
    pub dir: u8,
}

impl EdgeId {
    pub fn new(base: Point, dir: u8) -> Self {
        Self { base, dir }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.base.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "+{}", self.dir)
    }
}

impl FromStr for EdgeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, dir) = s
            .rsplit_once('+')
            .ok_or_else(|| Error::Parse(format!("edge `{s}` lacks a direction")))?;
        let base = parse_point(base)?;
        let dir = dir.parse().map_err(|_| Error::Parse(format!("bad direction in `{s}`")))?;
        Ok(EdgeId { base, dir })
    }
}

pub fn format_point(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_point(s: &str) -> Result<Point> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad coordinate `{c}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        let z3 = LatticeSpec::hypercubic(3, Boundary::Torus, 2).unwrap();
        assert_eq!(z3.neighbors(&[1, -2, 0]).unwrap().len(), 6);
        let m = LatticeSpec::new(LatticeKind::MatchingSquare, Boundary::Torus, 2).unwrap();
        assert_eq!(m.neighbors(&[2, 2]).unwrap().len(), 8);
        assert_eq!(LatticeKind::MatchingSquare.degree(), 8);
    }

    #[test]
    fn free_box_corner() {
        let sq = LatticeSpec::hypercubic(2, Boundary::FreeBox, 1).unwrap();
        let nb = sq.neighbors(&[1, 1]).unwrap();
        assert_eq!(nb.len(), 2);
        let pts: Vec<_> = nb.into_iter().map(|(p, _)| p).collect();
        assert!(pts.contains(&vec![0, 1]) && pts.contains(&vec![1, 0]));
    }

    #[test]
    fn outside_vertex_is_rejected() {
        let sq = LatticeSpec::hypercubic(2, Boundary::FreeBox, 1).unwrap();
        assert_eq!(
            sq.neighbors(&[2, 0]),
            Err(Error::VertexOutsideWindow(vec![2, 0]))
        );
        assert!(matches!(sq.neighbors(&[0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn torus_wraps() {
        let sq = LatticeSpec::hypercubic(2, Boundary::Torus, 1).unwrap();
        let nb = sq.neighbors(&[1, 0]).unwrap();
        assert!(nb.iter().any(|(p, e)| p == &vec![-1, 0] && e == &EdgeId::new(vec![1, 0], 0)));
    }

    #[test]
    fn parse_display() {
        assert_eq!("hypercubic:3".parse::<LatticeKind>().unwrap(), LatticeKind::Hypercubic { dim: 3 });
        assert_eq!("Z2".parse::<LatticeKind>().unwrap(), LatticeKind::Hypercubic { dim: 2 });
        let e = EdgeId::new(vec![-1, 2, 0], 2);
        assert_eq!(e.to_string().parse::<EdgeId>().unwrap(), e);
    }
}
