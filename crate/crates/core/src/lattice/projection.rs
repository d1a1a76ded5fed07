use serde::{Deserialize, Serialize};

use super::{EdgeId, Point};
use crate::error::{Error, Result};

/// Linear map `Z^d -> Z^{d'}` summing the coordinates of each group.
///
/// Every group has `floor(d / d')` coordinates and groups are disjoint.
/// Coordinates in no group are ignored by the map and never scanned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionMap {
    source_dim: usize,
    groups: Vec<Vec<usize>>,
}

impl ProjectionMap {
    /// Default grouping.
    ///
    /// For `d' = 2`: the first `floor(d/2)` coordinates map east/west and the
    /// last `floor(d/2)` map north/south (the middle one is unused for odd `d`).
    /// For `d' > 2`: consecutive blocks `[i w, (i + 1) w)` with `w = floor(d/d')`.
    pub fn new(source_dim: usize, target_dim: usize) -> Result<Self> {
        if target_dim < 1 || source_dim < target_dim {
            return Err(Error::InvalidParameter(format!(
                "projection needs 1 <= d' <= d, got d={source_dim}, d'={target_dim}"
            )));
        }
        let w = source_dim / target_dim;
        let groups = if target_dim == 2 {
            vec![(0..w).collect(), (source_dim - w..source_dim).collect()]
        } else {
            (0..target_dim).map(|i| (i * w..(i + 1) * w).collect()).collect()
        };
        Self::with_groups(source_dim, groups)
    }

    pub fn with_groups(source_dim: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidParameter("projection needs at least one group".into()));
        }
        let w = source_dim / groups.len();
        let mut seen = vec![false; source_dim];
        for g in &groups {
            if g.len() != w || w == 0 {
                return Err(Error::InvalidParameter(format!(
                    "every group must hold floor(d/d') = {w} coordinates"
                )));
            }
            for &j in g {
                if j >= source_dim || seen[j] {
                    return Err(Error::InvalidParameter(format!(
                        "coordinate {j} is out of range or assigned twice"
                    )));
                }
                seen[j] = true;
            }
            if g.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::InvalidParameter("group coordinates must ascend".into()));
            }
        }
        Ok(Self { source_dim, groups })
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.groups.len()
    }

    /// Edges per target direction, `floor(d/d')`.
    pub fn fiber_size(&self) -> usize {
        self.groups[0].len()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Group holding source coordinate `j`, if any.
    pub fn group_of(&self, j: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&j))
    }

    pub fn project(&self, v: &[i64]) -> Point {
        self.groups.iter().map(|g| g.iter().map(|&j| v[j]).sum()).collect()
    }

    /// Target directions in scan order: `+e_0, -e_0, +e_1, -e_1, ...`.
    pub fn target_directions(&self) -> impl Iterator<Item = (usize, i64)> {
        (0..self.target_dim()).flat_map(|i| [(i, 1), (i, -1)])
    }

    /// Neighbours of a target point in scan order.
    pub fn target_neighbors(&self, p: &[i64]) -> Vec<Point> {
        self.target_directions()
            .map(|(i, s)| {
                let mut q = p.to_vec();
                q[i] += s;
                q
            })
            .collect()
    }

    /// The `floor(d/d')` edges from `o` whose other endpoint projects to `target`,
    /// in ascending coordinate order, each with that endpoint.
    pub fn fiber_edges(&self, o: &[i64], target: &[i64]) -> Result<Vec<(Point, EdgeId)>> {
        if o.len() != self.source_dim {
            return Err(Error::DimensionMismatch {
                vertex: o.to_vec(),
                got: o.len(),
                expected: self.source_dim,
            });
        }
        let base = self.project(o);
        if target.len() != base.len() {
            return Err(Error::NotANeighbour(target.to_vec()));
        }
        let diff: Vec<i64> = target.iter().zip(&base).map(|(a, b)| a - b).collect();
        let mut nonzero = diff.iter().enumerate().filter(|(_, &x)| x != 0);
        let (group, sign) = match (nonzero.next(), nonzero.next()) {
            (Some((i, &s)), None) if s.abs() == 1 => (i, s),
            _ => return Err(Error::NotANeighbour(target.to_vec())),
        };
        Ok(self.groups[group]
            .iter()
            .map(|&j| {
                let mut w = o.to_vec();
                w[j] += sign;
                let edge = if sign > 0 {
                    EdgeId::new(o.to_vec(), j as u8)
                } else {
                    EdgeId::new(w.clone(), j as u8)
                };
                (w, edge)
            })
            .collect())
    }
}
