use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::bounds::binom_upper_tail;
use crate::error::{Error, Result};
use crate::stats::clopper_pearson_lower;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Count {
    pub trials: u64,
    pub successes: u64,
}

/// Per-context trial and success counts. Merging is a plain sum, so tallies
/// from parallel runs combine in any order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceTally {
    pub contexts: BTreeMap<String, Count>,
}

impl DominanceTally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, context: &str, success: bool) {
        let c = self.contexts.entry(context.to_string()).or_default();
        c.trials += 1;
        c.successes += success as u64;
    }

    pub fn get(&self, context: &str) -> Count {
        self.contexts.get(context).copied().unwrap_or_default()
    }

    pub fn merge(mut self, other: &DominanceTally) -> Self {
        for (k, c) in &other.contexts {
            let e = self.contexts.entry(k.clone()).or_default();
            e.trials += c.trials;
            e.successes += c.successes;
        }
        self
    }

    pub fn total_trials(&self) -> u64 {
        self.contexts.values().map(|c| c.trials).sum()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["context", "trials", "successes"])?;
        for (k, c) in &self.contexts {
            out.write_record([k.clone(), c.trials.to_string(), c.successes.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["context", "trials", "successes"] {
            return Err(Error::Parse(format!("unexpected tally header {headers:?}")));
        }
        let mut t = DominanceTally::new();
        for rec in rd.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<u64> {
                rec[i].parse().map_err(|_| Error::Parse(format!("bad count `{}`", &rec[i])))
            };
            let c = Count { trials: num(1)?, successes: num(2)? };
            if c.successes > c.trials {
                return Err(Error::Parse(format!("context `{}` has more successes than trials", &rec[0])));
            }
            t = t.merge(&DominanceTally { contexts: [(rec[0].to_string(), c)].into() });
        }
        Ok(t)
    }
}

/// Context name for "at least `j` of `x` candidate neighbours activated".
pub fn planar_context(x: usize, j: usize) -> String {
    format!("x{x}:n>={j}")
}

pub const SITE_CONTEXT: &str = "site";
pub const BOND_CONTEXT: &str = "bond";

/// Thresholds the tallied frequencies are compared with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Thresholds {
    /// Site and bond parameters of the dominated mixed percolation.
    General { s: f64, b: f64 },
    /// Parameter of the dominated Bernoulli family; context `x{k}:n>={j}`
    /// is compared with `P(Bin(k, p) >= j)`.
    Planar { p: f64 },
}

impl Thresholds {
    fn targets(&self) -> Vec<(String, f64)> {
        match *self {
            Thresholds::General { s, b } => {
                vec![(SITE_CONTEXT.into(), s), (BOND_CONTEXT.into(), b)]
            }
            Thresholds::Planar { p } => (1..=3)
                .flat_map(|k| (1..=k).map(move |j| (planar_context(k, j), binom_upper_tail(k as u64, p, j as u64))))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Pass,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceRow {
    pub context: String,
    pub trials: u64,
    pub successes: u64,
    pub frequency: f64,
    pub lower_bound: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub confidence: f64,
    pub rows: Vec<DominanceRow>,
}

impl DominanceReport {
    pub const CSV_HEADER: [&'static str; 7] =
        ["context", "trials", "successes", "frequency", "lower_bound", "threshold", "verdict"];

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn csv_records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.context.clone(),
                    r.trials.to_string(),
                    r.successes.to_string(),
                    r.frequency.to_string(),
                    r.lower_bound.to_string(),
                    r.threshold.to_string(),
                    r.verdict.to_string(),
                ]
            })
            .collect()
    }
}

pub const DOMINANCE_CONFIDENCE: f64 = 0.99;

/// One-sided Clopper-Pearson verdicts at 99% confidence. A frequency below
/// its threshold is reported as inconclusive, never as a failure.
pub fn dominance_report(tally: &DominanceTally, thresholds: Thresholds) -> Result<DominanceReport> {
    let rows = thresholds
        .targets()
        .into_iter()
        .map(|(context, threshold)| {
            let c = tally.get(&context);
            if c.trials == 0 {
                return Err(Error::EmptyTally(context));
            }
            let lower_bound = clopper_pearson_lower(c.successes, c.trials, 1.0 - DOMINANCE_CONFIDENCE);
            Ok(DominanceRow {
                frequency: c.successes as f64 / c.trials as f64,
                verdict: if lower_bound > threshold { Verdict::Pass } else { Verdict::Inconclusive },
                context,
                trials: c.trials,
                successes: c.successes,
                lower_bound,
                threshold,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DominanceReport { confidence: DOMINANCE_CONFIDENCE, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tally(pairs: &[(&str, u64, u64)]) -> DominanceTally {
        DominanceTally {
            contexts: pairs
                .iter()
                .map(|&(k, n, s)| (k.to_string(), Count { trials: n, successes: s }))
                .collect(),
        }
    }

    #[test]
    fn merge_is_commutative_and_associative() {
        let a = tally(&[("site", 3, 2)]);
        let b = tally(&[("site", 5, 5), ("bond", 2, 1)]);
        let c = tally(&[("bond", 1, 0)]);
        assert_eq!(a.clone().merge(&b), b.clone().merge(&a));
        assert_eq!(a.clone().merge(&b).merge(&c), a.merge(&b.merge(&c)));
    }

    #[test]
    fn csv_round_trip() {
        let t = tally(&[("site", 10, 9), ("x2:n>=1", 4, 3)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(DominanceTally::read_csv(buf.as_slice()).unwrap(), t);
        assert!(DominanceTally::read_csv("context,trials,successes\nsite,1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn verdicts() {
        let t = tally(&[("site", 100_000, 99_900), ("bond", 100_000, 50_000)]);
        let r = dominance_report(&t, Thresholds::General { s: 0.9765, b: 0.5622 }).unwrap();
        assert_eq!(r.rows[0].verdict, Verdict::Pass);
        assert_eq!(r.rows[1].verdict, Verdict::Inconclusive);
        assert!(!r.all_pass());
        assert!(r.rows[0].lower_bound < 0.999);
    }

    #[test]
    fn empty_context_is_an_error() {
        let t = tally(&[("site", 10, 10)]);
        assert_eq!(
            dominance_report(&t, Thresholds::General { s: 0.5, b: 0.5 }),
            Err(Error::EmptyTally("bond".into()))
        );
    }

    #[test]
    fn planar_targets() {
        let targets = Thresholds::Planar { p: 0.5 }.targets();
        assert_eq!(targets.len(), 6);
        let get = |k: &str| targets.iter().find(|(c, _)| c == k).unwrap().1;
        assert!((get("x1:n>=1") - 0.5).abs() < 1e-15);
        assert!((get("x3:n>=2") - 0.5).abs() < 1e-15);
        assert!((get("x3:n>=3") - 0.125).abs() < 1e-15);
        assert!((get("x2:n>=1") - 0.75).abs() < 1e-15);
    }
}
