use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dynamics::Event;
use crate::explore::PlanarVariant;
use crate::lattice::{Boundary, LatticeKind};
use crate::mixed::WIERMAN_SITE_BOUND;

/// Constrained-degree percolation: bounds, simulation and exploration.
#[derive(Debug, Parser)]
#[command(name = "cdperc", version, args_override_self = true)]
#[command(after_help = "Global options (any position): --threads N, --out-dir DIR, --config FILE, --no-artifacts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Analytic site/bond bounds.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// The mixed-percolation region curve.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Monte Carlo estimates.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Exploration processes.
    #[command(subcommand)]
    Explore(ExploreCmd),
    /// Exact event probability on a small graph.
    Oracle(OracleArgs),
    /// Dominance verdicts from a tally file.
    Dominance(DominanceArgs),
    /// Re-run an artifact and compare results.
    Report(ReportArgs),
}

impl Command {
    /// Dashed subcommand path, used for artifact file names.
    pub fn name(&self) -> String {
        let (group, sub) = match self {
            Command::Bounds(c) => ("bounds", Some(c.name())),
            Command::Curve(c) => ("curve", Some(c.name())),
            Command::Simulate(c) => ("simulate", Some(c.name())),
            Command::Explore(c) => ("explore", Some(c.name())),
            Command::Oracle(_) => ("oracle", None),
            Command::Dominance(_) => ("dominance", None),
            Command::Report(_) => ("report", None),
        };
        match sub {
            Some(s) => format!("{group}-{s}"),
            None => group.to_string(),
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsCmd {
    /// Sweep of (s, b) at t = c/d against the main thresholds.
    VerifyTheorem1(VerifyArgs),
    /// Low-dimensional cases against the two table threshold pairs.
    Table(RateArgs),
    /// Closed-form lower bounds valid for every d above a floor.
    Chen(ChenArgs),
    /// Limits of (s, b) as d grows with t = c/d.
    Limit(LimitArgs),
    /// (s, b) at one (d, kappa) and a rate c or time t.
    SB(SbArgs),
    /// The six planar comparison inequalities.
    Theorem3(Theorem3Args),
    /// Lower bound on the number of feasible-edge ancestors in Z^d.
    Branching(BranchingArgs),
    /// P(Bin(m, p) <= k).
    Binom(BinomArgs),
    /// P(Poisson(lambda) <= k).
    Poisson(PoissonArgs),
}

impl BoundsCmd {
    fn name(&self) -> &'static str {
        match self {
            BoundsCmd::VerifyTheorem1(_) => "verify-theorem1",
            BoundsCmd::Table(_) => "table",
            BoundsCmd::Chen(_) => "chen",
            BoundsCmd::Limit(_) => "limit",
            BoundsCmd::SB(_) => "s-b",
            BoundsCmd::Theorem3(_) => "theorem3",
            BoundsCmd::Branching(_) => "branching",
            BoundsCmd::Binom(_) => "binom",
            BoundsCmd::Poisson(_) => "poisson",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Rate c in t = c/d, as a decimal.
    #[arg(long, default_value = "1.7")]
    pub c: String,
    #[arg(long, default_value_t = 10)]
    pub kappa: u32,
    /// Defaults to the smallest d with 2d > kappa.
    #[arg(long)]
    pub d_min: Option<u32>,
    #[arg(long, default_value_t = 4000)]
    pub d_max: u32,
    /// Largest d checked directly; larger d use the closed-form bound.
    #[arg(long, default_value_t = 4000)]
    pub chen_floor: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    #[arg(long, default_value = "1.7")]
    pub c: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ChenArgs {
    #[arg(long, default_value_t = 1.7)]
    pub c: f64,
    #[arg(long, default_value_t = 10)]
    pub kappa: u32,
    #[arg(long, default_value_t = 4000)]
    pub floor: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct LimitArgs {
    #[arg(long, default_value_t = 1.7)]
    pub c: f64,
    #[arg(long, default_value_t = 10)]
    pub kappa: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct SbArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub kappa: u32,
    /// Rate c, t = c/d.
    #[arg(long, conflicts_with = "t", default_value = "1.7")]
    pub c: String,
    /// Time t, as a decimal.
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub d_prime: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct Theorem3Args {
    #[arg(long, default_value_t = 0.62)]
    pub t: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct BranchingArgs {
    #[arg(long)]
    pub d: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct BinomArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub k: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct PoissonArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub k: u64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveCmd {
    /// Sample (b, sc_upper, hammersley_s, region) on a b-grid.
    Emit(EmitArgs),
    /// Integrate the curve ODE from b = 1/2.
    Ode(OdeArgs),
    /// The b where the two supercriticality criteria cross.
    Crossover(SiteBoundArgs),
    /// Region of one (s, b).
    Classify(ClassifyArgs),
}

impl CurveCmd {
    fn name(&self) -> &'static str {
        match self {
            CurveCmd::Emit(_) => "emit",
            CurveCmd::Ode(_) => "ode",
            CurveCmd::Crossover(_) => "crossover",
            CurveCmd::Classify(_) => "classify",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EmitArgs {
    #[arg(long, default_value_t = 0.5)]
    pub b_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b_max: f64,
    #[arg(long, default_value_t = 0.005)]
    pub step: f64,
    /// Rigorous upper bound on the site threshold of Z^2.
    #[arg(long, default_value_t = WIERMAN_SITE_BOUND)]
    pub site_bound: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct OdeArgs {
    #[arg(long, default_value_t = 1.0)]
    pub b_end: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
    #[arg(long, default_value_t = crate::mixed::ODE_LOCAL_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SiteBoundArgs {
    #[arg(long, default_value_t = WIERMAN_SITE_BOUND)]
    pub site_bound: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long, default_value_t = WIERMAN_SITE_BOUND)]
    pub site_bound: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulateCmd {
    /// theta(t) on a finite window, common clocks across the t-grid.
    Theta(ThetaArgs),
    /// theta_n of mixed percolation on the L1 ball.
    Mixed(MixedArgs),
    /// Pivotality masses against a finite difference.
    Russo(RussoArgs),
}

impl SimulateCmd {
    fn name(&self) -> &'static str {
        match self {
            SimulateCmd::Theta(_) => "theta",
            SimulateCmd::Mixed(_) => "mixed",
            SimulateCmd::Russo(_) => "russo",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ThetaArgs {
    /// `Z<d>`, `hypercubic:<d>` or `matching-square`.
    #[arg(long, default_value = "Z2")]
    pub lattice: LatticeKind,
    #[arg(long, default_value = "torus")]
    pub boundary: Boundary,
    #[arg(long, default_value_t = 20)]
    pub radius: u32,
    #[arg(long)]
    pub kappa: u32,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct MixedArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub b: f64,
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct RussoArgs {
    #[arg(long, default_value_t = 0.9)]
    pub s: f64,
    #[arg(long, default_value_t = 0.6)]
    pub b: f64,
    #[arg(long, default_value_t = 6)]
    pub n: u32,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Agreement window in standard errors.
    #[arg(long, default_value_t = 3.0)]
    pub z: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExploreCmd {
    /// Projected exploration in Z^d.
    General(GeneralArgs),
    /// In-plane exploration of the cubic or matching-square lattice.
    Planar(PlanarArgs),
    /// Check a planar trace file step by step.
    CheckTrace(CheckTraceArgs),
}

impl ExploreCmd {
    fn name(&self) -> &'static str {
        match self {
            ExploreCmd::General(_) => "general",
            ExploreCmd::Planar(_) => "planar",
            ExploreCmd::CheckTrace(_) => "check-trace",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RunArgs {
    #[arg(long, default_value_t = 100)]
    pub runs: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_open: usize,
    #[arg(long, default_value_t = 200)]
    pub radius: i64,
    /// Write the merged dominance tally as CSV.
    #[arg(long)]
    pub tally_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GeneralArgs {
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    #[arg(long, default_value_t = 10)]
    pub kappa: u32,
    /// Time; defaults to c/d.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 1.7)]
    pub c: f64,
    #[arg(long, default_value_t = 2)]
    pub d_prime: usize,
    /// Site threshold for the dominance verdicts.
    #[arg(long, default_value_t = 0.9765)]
    pub s: f64,
    /// Bond threshold for the dominance verdicts.
    #[arg(long, default_value_t = 0.5622)]
    pub b: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct PlanarArgs {
    #[arg(long, default_value = "cubic")]
    pub variant: PlanarVariant,
    /// Defaults to degree - 1.
    #[arg(long)]
    pub kappa: Option<u32>,
    #[arg(long, default_value_t = 0.62)]
    pub t: f64,
    /// Bernoulli parameter for the dominance verdicts.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    /// Write the trace of the first run.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckTraceArgs {
    pub path: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    /// path2, path3, star3, cycle4, grid2x3 or k4.
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub kappa: u32,
    #[arg(long)]
    pub t: f64,
    /// `edge:<i>` or `connect:<a>-<b>`.
    #[arg(long)]
    pub event: Event,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TallyMode {
    General,
    Planar,
}

#[derive(Debug, Args, Serialize)]
pub struct DominanceArgs {
    #[arg(long)]
    pub tally: PathBuf,
    #[arg(long, value_enum)]
    pub mode: TallyMode,
    #[arg(long, default_value_t = 0.9765)]
    pub s: f64,
    #[arg(long, default_value_t = 0.5622)]
    pub b: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub replay: PathBuf,
}
