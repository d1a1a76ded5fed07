//! Line-oriented record of a planar exploration and the structural check of
//! the information it reveals.
//!
//! ```text
//! # planar-trace variant=cubic kappa=5 t=0.62 seed=7
//! <step>\t<x,y>\t<decision>\tb=<edge|->\trevealed=<edge:0|1;...>\tspoilt=<edge@u;...>\tboundary=<edge<=p;...>
//! ```
//! Empty lists are written `-`. A boundary entry `edge>=p` expresses a lower
//! bound; the exploration never produces one.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::planar::{PlanarVariant, Site};
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    /// No inactive in-plane neighbour.
    ClosedIsolated,
    /// Every edge feasible and the largest compared clock is in the plane.
    ClosedSaturated,
    Open,
    OpenRescued,
}

impl Decision {
    pub fn is_open(&self) -> bool {
        matches!(self, Decision::Open | Decision::OpenRescued)
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::ClosedIsolated => "closed-isolated",
            Decision::ClosedSaturated => "closed-saturated",
            Decision::Open => "open",
            Decision::OpenRescued => "open-rescued",
        })
    }
}

impl FromStr for Decision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "closed-isolated" => Decision::ClosedIsolated,
            "closed-saturated" => Decision::ClosedSaturated,
            "open" => Decision::Open,
            "open-rescued" => Decision::OpenRescued,
            _ => return Err(Error::Parse(format!("unknown decision `{s}`"))),
        })
    }
}

/// What is known about the clock of a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    Upper(f64),
    Lower(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub vertex: Site,
    pub decision: Decision,
    pub removed_boundary: Option<EdgeId>,
    /// Feasibility bits revealed at this step.
    pub revealed: Vec<(EdgeId, bool)>,
    /// Edges spoilt at this step with their clocks.
    pub spoilt: Vec<(EdgeId, f64)>,
    /// Edges added to the boundary with the knowledge attached to them.
    pub added: Vec<(EdgeId, Bound)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub variant: PlanarVariant,
    pub kappa: u32,
    pub t: f64,
    pub seed: u64,
    pub steps: Vec<TraceStep>,
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    if items.is_empty() {
        "-".into()
    } else {
        items.iter().map(f).collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# planar-trace variant={} kappa={} t={} seed={}", self.variant, self.kappa, self.t, self.seed)?;
        for s in &self.steps {
            writeln!(
                f,
                "{}\t{},{}\t{}\tb={}\trevealed={}\tspoilt={}\tboundary={}",
                s.step,
                s.vertex[0],
                s.vertex[1],
                s.decision,
                s.removed_boundary.as_ref().map_or("-".to_string(), |e| e.to_string()),
                join(&s.revealed, |(e, b)| format!("{e}:{}", *b as u8)),
                join(&s.spoilt, |(e, u)| format!("{e}@{u}")),
                join(&s.added, |(e, b)| match b {
                    Bound::Upper(p) => format!("{e}<={p}"),
                    Bound::Lower(p) => format!("{e}>={p}"),
                }),
            )?;
        }
        Ok(())
    }
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedTrace { line, reason: reason.into() }
}

fn field<'a>(line: usize, raw: &'a str, key: &str) -> Result<&'a str> {
    raw.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| malformed(line, format!("expected `{key}=`, found `{raw}`")))
}

fn entries(raw: &str) -> Vec<&str> {
    if raw == "-" {
        Vec::new()
    } else {
        raw.split(';').collect()
    }
}

impl Trace {
    pub fn new(variant: PlanarVariant, kappa: u32, t: f64, seed: u64) -> Self {
        Self { variant, kappa, t, seed, steps: Vec::new() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| malformed(1, "empty trace"))?;
        let rest = header
            .strip_prefix("# planar-trace")
            .ok_or_else(|| malformed(1, "missing `# planar-trace` header"))?;
        let mut kv = HashMap::new();
        for tok in rest.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| malformed(1, format!("bad header token `{tok}`")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| malformed(1, format!("header lacks `{k}`")));
        let num = |k: &str, v: &str| malformed(1, format!("bad `{k}` value `{v}`"));
        let mut trace = Trace::new(
            get("variant")?.parse().map_err(|_| malformed(1, "bad variant"))?,
            get("kappa")?.parse().map_err(|_| num("kappa", get("kappa").unwrap_or("")))?,
            get("t")?.parse().map_err(|_| num("t", get("t").unwrap_or("")))?,
            get("seed")?.parse().map_err(|_| num("seed", get("seed").unwrap_or("")))?,
        );
        for (i, line) in lines {
            let ln = i + 1;
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 7 {
                return Err(malformed(ln, format!("expected 7 tab-separated fields, found {}", cols.len())));
            }
            let edge = |s: &str| s.parse::<EdgeId>().map_err(|e| malformed(ln, e.to_string()));
            let float = |s: &str| s.parse::<f64>().map_err(|_| malformed(ln, format!("bad number `{s}`")));
            let step = cols[0].parse().map_err(|_| malformed(ln, "bad step index"))?;
            let v: Vec<i64> = crate::lattice::parse_point(cols[1]).map_err(|e| malformed(ln, e.to_string()))?;
            if v.len() != 2 {
                return Err(malformed(ln, "vertex must have two coordinates"));
            }
            let decision = cols[2].parse().map_err(|e: Error| malformed(ln, e.to_string()))?;
            let b = field(ln, cols[3], "b")?;
            let removed_boundary = if b == "-" { None } else { Some(edge(b)?) };
            let revealed = entries(field(ln, cols[4], "revealed")?)
                .into_iter()
                .map(|r| {
                    let (e, bit) = r.rsplit_once(':').ok_or_else(|| malformed(ln, format!("bad revealed entry `{r}`")))?;
                    let bit = match bit {
                        "0" => false,
                        "1" => true,
                        _ => return Err(malformed(ln, format!("bad feasibility bit `{bit}`"))),
                    };
                    Ok((edge(e)?, bit))
                })
                .collect::<Result<_>>()?;
            let spoilt = entries(field(ln, cols[5], "spoilt")?)
                .into_iter()
                .map(|r| {
                    let (e, u) = r.split_once('@').ok_or_else(|| malformed(ln, format!("spoilt edge `{r}` lacks its clock")))?;
                    Ok((edge(e)?, float(u)?))
                })
                .collect::<Result<_>>()?;
            let added = entries(field(ln, cols[6], "boundary")?)
                .into_iter()
                .map(|r| {
                    if let Some((e, p)) = r.split_once("<=") {
                        Ok((edge(e)?, Bound::Upper(float(p)?)))
                    } else if let Some((e, p)) = r.split_once(">=") {
                        Ok((edge(e)?, Bound::Lower(float(p)?)))
                    } else {
                        Err(malformed(ln, format!("bad boundary entry `{r}`")))
                    }
                })
                .collect::<Result<_>>()?;
            trace.steps.push(TraceStep { step, vertex: [v[0], v[1]], decision, removed_boundary, revealed, spoilt, added });
        }
        Ok(trace)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingCheck {
    pub ok: bool,
    /// Steps checked before the first violation (all steps when `ok`).
    pub steps_checked: usize,
    /// `(step, reason)` for the first violating step.
    pub violations: Vec<(usize, String)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Seen {
    Untreated,
    Open,
    Closed,
}

/// Replays a trace and checks at every step that boundary components are
/// stars centred at open vertices, that each boundary edge carries only an
/// upper bound `p(e) <= t` (equal to `t`, or to the largest out-of-plane
/// clock after a rescue), that every spoilt edge comes with its clock, and
/// that every edge of a treated vertex is spoilt or boundary.
pub fn check_decoupling(text: &str) -> Result<DecouplingCheck> {
    let trace = Trace::parse(text)?;
    Ok(trace.check())
}

impl Trace {
    pub fn check(&self) -> DecouplingCheck {
        let mut checker = Checker {
            variant: self.variant,
            t: self.t,
            seen: HashMap::from([([0, 0], Seen::Untreated)]),
            boundary: HashMap::new(),
            spoilt: HashMap::new(),
        };
        for (k, s) in self.steps.iter().enumerate() {
            if let Err(reason) = checker.step(s) {
                return DecouplingCheck { ok: false, steps_checked: k, violations: vec![(s.step, reason)] };
            }
        }
        DecouplingCheck { ok: true, steps_checked: self.steps.len(), violations: Vec::new() }
    }
}

struct Checker {
    variant: PlanarVariant,
    t: f64,
    seen: HashMap<Site, Seen>,
    /// Boundary edge -> (centre, leaf).
    boundary: HashMap<EdgeId, (Site, Site)>,
    spoilt: HashMap<EdgeId, f64>,
}

impl Checker {
    fn step(&mut self, s: &TraceStep) -> std::result::Result<(), String> {
        let a = s.vertex;
        if self.seen.get(&a) != Some(&Seen::Untreated) {
            return Err(format!("vertex {},{} is not an untreated active vertex", a[0], a[1]));
        }
        let incident: Vec<(Point, EdgeId)> = self.variant.edges(a);
        let is_incident = |e: &EdgeId| incident.iter().any(|(_, f)| f == e);

        let held: Vec<EdgeId> = self.boundary.iter().filter(|(_, &(_, leaf))| leaf == a).map(|(e, _)| e.clone()).collect();
        match (&s.removed_boundary, held.as_slice()) {
            (None, []) => {}
            (Some(b), [h]) if b == h => {
                self.boundary.remove(b);
            }
            _ => return Err(format!("removed boundary edge does not match the boundary edges {held:?} of the vertex")),
        }
        for (e, _) in &s.revealed {
            if !is_incident(e) || self.spoilt.contains_key(e) {
                return Err(format!("revealed edge {e} is not an unspoilt edge of the vertex"));
            }
        }
        for (e, u) in &s.spoilt {
            if !is_incident(e) || self.spoilt.contains_key(e) || self.boundary.contains_key(e) {
                return Err(format!("spoilt edge {e} is foreign, already spoilt or still boundary"));
            }
            if !(0.0..=1.0).contains(u) {
                return Err(format!("spoilt edge {e} has clock {u} outside [0, 1]"));
            }
            self.spoilt.insert(e.clone(), *u);
        }
        let expected = match s.decision {
            Decision::OpenRescued => {
                let out = self.variant.out_of_plane(a);
                let clocks: Option<Vec<f64>> = out.iter().map(|e| self.spoilt.get(e).copied()).collect();
                match clocks {
                    Some(c) => c.into_iter().fold(0.0, f64::max),
                    None => return Err("rescue without revealed out-of-plane clocks".into()),
                }
            }
            _ => self.t,
        };
        if !s.decision.is_open() && !s.added.is_empty() {
            return Err("closed vertex added boundary edges".into());
        }
        for (e, bound) in &s.added {
            let p = match bound {
                Bound::Upper(p) => *p,
                Bound::Lower(_) => return Err(format!("boundary edge {e} carries a lower bound")),
            };
            if p > self.t || p != expected {
                return Err(format!("boundary edge {e} has bound {p}, expected {expected} <= t = {}", self.t));
            }
            let leaf = incident
                .iter()
                .take(4)
                .find(|(_, f)| f == e)
                .map(|(q, _)| [q[0], q[1]])
                .ok_or_else(|| format!("boundary edge {e} is not an in-plane edge of the vertex"))?;
            if self.seen.contains_key(&leaf) || self.spoilt.contains_key(e) || self.boundary.contains_key(e) {
                return Err(format!("boundary edge {e} leads to an active vertex or was already explored"));
            }
            self.boundary.insert(e.clone(), (a, leaf));
            self.seen.insert(leaf, Seen::Untreated);
        }
        self.seen.insert(a, if s.decision.is_open() { Seen::Open } else { Seen::Closed });
        for (_, e) in &incident {
            if !self.spoilt.contains_key(e) && !self.boundary.contains_key(e) {
                return Err(format!("edge {e} of a treated vertex is neither spoilt nor boundary"));
            }
        }
        let mut leaves = HashMap::new();
        for (e, (centre, leaf)) in &self.boundary {
            if self.seen.get(centre) != Some(&Seen::Open) {
                return Err(format!("boundary edge {e} is not centred at an open vertex"));
            }
            if self.seen.get(leaf) != Some(&Seen::Untreated) || leaves.insert(*leaf, e).is_some() {
                return Err(format!("boundary edge {e} does not end at a distinct untreated vertex"));
            }
        }
        Ok(())
    }
}
