use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::args::*;
use super::{Output, Table};
use crate::bounds::{
    binom_cdf, branching_lower_bound, chen_lower_bounds, parse_decimal, poisson_cdf, poisson_limit,
    s_b_of, verify_theorem1, verify_theorem1_table, verify_theorem3_inequalities, BoundParams,
    BoundReport, FLOAT_GUARD, MAIN_THRESHOLDS,
};
use crate::clocks::{derive_seed, ClockField};
use crate::dynamics::{exact_event_probability, theta_curve, SmallGraph, ThetaEstimate};
use crate::error::{Error, Result};
use crate::explore::{
    check_decoupling, dominance_report, explore_general, explore_planar, replay_general,
    replay_planar, DominanceReport, DominanceTally, Outcome, StopRule, Thresholds, VertexStatus,
};
use crate::lattice::{format_point, LatticeSpec, ProjectionMap};
use crate::mixed::{
    classify_region, crossover_solve, emit_curve, ode_integrate, russo_check, sc_upper,
    theta_n_mixed, CurvePoint, MixedParams, MixedThetaEstimate,
};

fn plain(result: Value, summary: String) -> Output {
    Output { result, table: None, summary, failed: false }
}

pub fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Bounds(c) => bounds(c),
        Command::Curve(c) => curve(c),
        Command::Simulate(c) => simulate(c),
        Command::Explore(c) => explore(c),
        Command::Oracle(a) => oracle(a),
        Command::Dominance(a) => dominance(a),
        Command::Report(_) => Err(Error::InvalidParameter("report is handled by the runner".into())),
    }
}

fn bound_report(report: BoundReport) -> Result<Output> {
    let mut summary = format!(
        "{} rows at c = {}: {}\n",
        report.rows.len(),
        report.c,
        if report.all_pass { "all PASS" } else { "FAIL" }
    );
    for r in report.failures() {
        let _ = writeln!(summary, "FAIL d={} kappa={} s={:.12} b={:.12}", r.d, r.kappa, r.s, r.b);
    }
    Ok(Output {
        table: Some(Table::new(&BoundReport::CSV_HEADER, report.csv_records())),
        failed: !report.all_pass,
        result: serde_json::to_value(&report)?,
        summary,
    })
}

fn bounds(cmd: &BoundsCmd) -> Result<Output> {
    match cmd {
        BoundsCmd::VerifyTheorem1(a) => {
            let d_min = a.d_min.unwrap_or(a.kappa / 2 + 1);
            bound_report(verify_theorem1(&a.c, a.kappa, d_min, a.d_max, a.chen_floor)?)
        }
        BoundsCmd::Table(a) => bound_report(verify_theorem1_table(&a.c)?),
        BoundsCmd::Chen(a) => {
            let (s, b) = chen_lower_bounds(a.c, a.kappa, a.floor)?;
            let s_min: f64 = MAIN_THRESHOLDS.0.parse().unwrap();
            let b_min: f64 = MAIN_THRESHOLDS.1.parse().unwrap();
            let pass = s > s_min + FLOAT_GUARD && b > b_min + FLOAT_GUARD;
            Ok(Output {
                result: json!({ "s": s, "b": b, "s_threshold": s_min, "b_threshold": b_min, "pass": pass }),
                table: None,
                summary: format!(
                    "d > {}: s >= {s:.10}, b >= {b:.10} ({})\n",
                    a.floor,
                    if pass { "PASS" } else { "FAIL" }
                ),
                failed: !pass,
            })
        }
        BoundsCmd::Limit(a) => {
            let (s, b) = poisson_limit(a.c, a.kappa);
            Ok(plain(json!({ "s": s, "b": b }), format!("s -> {s:.10}, b -> {b:.10}\n")))
        }
        BoundsCmd::SB(a) => {
            let params = match &a.t {
                Some(t) => BoundParams::with_time(a.d, a.kappa, parse_decimal(t)?, a.d_prime)?,
                None => BoundParams::with_rate(a.d, a.kappa, &parse_decimal(&a.c)?, a.d_prime)?,
            };
            let sb = s_b_of(&params)?;
            let (s, b) = (sb.s_f64(), sb.b_f64());
            Ok(plain(json!({ "s": s, "b": b }), format!("s = {s:.15}\nb = {b:.15}\n")))
        }
        BoundsCmd::Theorem3(a) => {
            let verdicts = verify_theorem3_inequalities(a.t, a.p)?;
            let mut summary = String::new();
            let rows = verdicts
                .iter()
                .map(|v| {
                    let _ = writeln!(
                        summary,
                        "|X|={} j={}: {:.6} > {:.6} {}",
                        v.candidates,
                        v.at_least,
                        v.lhs,
                        v.rhs,
                        if v.holds { "PASS" } else { "FAIL" }
                    );
                    vec![
                        v.candidates.to_string(),
                        v.at_least.to_string(),
                        v.lhs.to_string(),
                        v.rhs.to_string(),
                        v.margin.to_string(),
                        v.holds.to_string(),
                    ]
                })
                .collect();
            Ok(Output {
                failed: verdicts.iter().any(|v| !v.holds),
                result: serde_json::to_value(&verdicts)?,
                table: Some(Table::new(&["candidates", "at_least", "lhs", "rhs", "margin", "holds"], rows)),
                summary,
            })
        }
        BoundsCmd::Branching(a) => {
            let v = branching_lower_bound(a.d)?;
            Ok(plain(json!({ "d": a.d, "bound": v }), format!("{v}\n")))
        }
        BoundsCmd::Binom(a) => {
            if !(0.0..=1.0).contains(&a.p) {
                return Err(Error::InvalidParameter(format!("p = {} not in [0, 1]", a.p)));
            }
            let v = binom_cdf(a.m, a.p, a.k);
            Ok(plain(json!({ "value": v }), format!("{v}\n")))
        }
        BoundsCmd::Poisson(a) => {
            if !(a.lambda >= 0.0) {
                return Err(Error::InvalidParameter(format!("lambda = {} must be non-negative", a.lambda)));
            }
            let v = poisson_cdf(a.lambda, a.k);
            Ok(plain(json!({ "value": v }), format!("{v}\n")))
        }
    }
}

fn curve(cmd: &CurveCmd) -> Result<Output> {
    match cmd {
        CurveCmd::Emit(a) => {
            let points = emit_curve(a.b_min, a.b_max, a.step, a.site_bound)?;
            let rows = points
                .iter()
                .map(|p| vec![p.b.to_string(), p.sc_upper.to_string(), p.hammersley_s.to_string(), p.region.to_string()])
                .collect();
            Ok(Output {
                summary: format!("{} curve points on [{}, {}]\n", points.len(), a.b_min, a.b_max),
                result: serde_json::to_value(&points)?,
                table: Some(Table::new(&CurvePoint::CSV_HEADER, rows)),
                failed: false,
            })
        }
        CurveCmd::Ode(a) => {
            let path = ode_integrate(a.b_end, a.step, a.tolerance)?;
            let mut max_err: f64 = 0.0;
            let mut rows = Vec::with_capacity(path.len());
            for &(b, s) in &path {
                let exact = sc_upper(b)?;
                max_err = max_err.max((s - exact).abs());
                rows.push(vec![b.to_string(), s.to_string(), exact.to_string()]);
            }
            let &(b_end, s_end) = path.last().expect("non-empty path");
            Ok(Output {
                result: json!({ "b_end": b_end, "s_end": s_end, "steps": path.len() - 1, "max_abs_error": max_err }),
                table: Some(Table::new(&["b", "ode", "closed_form"], rows)),
                summary: format!("s({b_end}) = {s_end:.15}, max |ode - closed form| = {max_err:.3e}\n"),
                failed: false,
            })
        }
        CurveCmd::Crossover(a) => {
            let b = crossover_solve(a.site_bound)?;
            Ok(plain(json!({ "b": b, "s": a.site_bound / b }), format!("{b:.12}\n")))
        }
        CurveCmd::Classify(a) => {
            let region = classify_region(MixedParams::new(a.s, a.b)?, a.site_bound);
            Ok(plain(json!({ "region": region }), format!("{region}\n")))
        }
    }
}

fn simulate(cmd: &SimulateCmd) -> Result<Output> {
    match cmd {
        SimulateCmd::Theta(a) => {
            let spec = LatticeSpec::new(a.lattice, a.boundary, a.radius)?;
            if a.t.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidParameter("t-grid must be sorted".into()));
            }
            let est = theta_curve(spec, a.kappa, &a.t, a.samples, a.seed)?;
            let mut summary = String::new();
            for e in &est {
                let _ = writeln!(summary, "t={}: theta = {:.6} +- {:.6}", e.t, e.estimate, e.stderr);
            }
            Ok(Output {
                table: Some(Table::new(&ThetaEstimate::CSV_HEADER, est.iter().map(|e| e.csv_record()).collect())),
                result: serde_json::to_value(&est)?,
                summary,
                failed: false,
            })
        }
        SimulateCmd::Mixed(a) => {
            let params = MixedParams::new(a.s, a.b)?;
            let est = a
                .n
                .iter()
                .map(|&n| theta_n_mixed(params, n, a.samples, a.seed, a.dim))
                .collect::<Result<Vec<_>>>()?;
            let mut summary = String::new();
            for e in &est {
                let _ = writeln!(summary, "n={}: theta_n = {:.6} +- {:.6}", e.n, e.estimate, e.stderr);
            }
            Ok(Output {
                table: Some(Table::new(
                    &MixedThetaEstimate::CSV_HEADER,
                    est.iter().map(|e| e.csv_record()).collect(),
                )),
                result: serde_json::to_value(&est)?,
                summary,
                failed: false,
            })
        }
        SimulateCmd::Russo(a) => {
            let check = russo_check(MixedParams::new(a.s, a.b)?, a.n, a.eps, a.samples, a.seed)?;
            let agrees = check.agrees(a.z);
            let p = &check.pivotality;
            let summary = format!(
                "pivotal sites {:.5} +- {:.5}, finite difference {:.5} +- {:.5}: {}\n\
                 pivotal bonds {:.5} +- {:.5}, ratio excess {:.5} +- {:.5}\n",
                p.site_mass,
                p.site_stderr,
                check.finite_difference,
                check.finite_difference_stderr,
                if agrees { "PASS" } else { "FAIL" },
                p.bond_mass,
                p.bond_stderr,
                p.ratio_excess,
                p.ratio_excess_stderr,
            );
            let mut result = serde_json::to_value(&check)?;
            result["agrees"] = json!(agrees);
            Ok(Output { result, table: None, summary, failed: !agrees })
        }
    }
}

fn write_tally(path: &Path, tally: &DominanceTally) -> Result<()> {
    tally.write_csv(fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
}

struct RunSummary {
    survived: u64,
    open: u64,
    violations: Vec<String>,
}

fn explore_output(kind: &str, runs: u64, tally: DominanceTally, s: RunSummary, report: DominanceReport) -> Result<Output> {
    let failed = !s.violations.is_empty();
    let mut summary = format!(
        "{kind}: {runs} runs, {} survived, {} open vertices, {} replay violations\n",
        s.survived,
        s.open,
        s.violations.len()
    );
    for v in s.violations.iter().take(10) {
        let _ = writeln!(summary, "violation: {v}");
    }
    for r in &report.rows {
        let _ = writeln!(
            summary,
            "{}: {}/{} = {:.5} (lower {:.5}) vs {:.5} {}",
            r.context, r.successes, r.trials, r.frequency, r.lower_bound, r.threshold, r.verdict
        );
    }
    Ok(Output {
        result: json!({
            "runs": runs,
            "survived": s.survived,
            "open_vertices": s.open,
            "replay_violations": s.violations,
            "tally": tally,
            "dominance": report,
        }),
        table: Some(Table::new(&DominanceReport::CSV_HEADER, report.csv_records())),
        summary,
        failed,
    })
}

fn explore(cmd: &ExploreCmd) -> Result<Output> {
    match cmd {
        ExploreCmd::General(a) => {
            let t = a.t.unwrap_or(a.c / a.d as f64);
            let map = ProjectionMap::new(a.d, a.d_prime)?;
            let stop = StopRule::new(a.run.max_open, a.run.radius)?;
            let runs = (0..a.run.runs)
                .into_par_iter()
                .map(|i| {
                    let field = ClockField::new(derive_seed(a.run.seed, i));
                    let run = explore_general(&map, a.kappa, t, field, stop)?;
                    let bad = replay_general(&run, a.kappa, t, field);
                    Ok((run.outcome, run.state.count(VertexStatus::Open), run.tally, i, bad))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut tally = DominanceTally::new();
            let mut s = RunSummary { survived: 0, open: 0, violations: Vec::new() };
            for (outcome, open, t, i, bad) in runs {
                s.survived += (outcome == Outcome::Survived) as u64;
                s.open += open as u64;
                tally = tally.merge(&t);
                s.violations.extend(bad.iter().map(|p| format!("run {i} vertex {}", format_point(p))));
            }
            if let Some(path) = &a.run.tally_out {
                write_tally(path, &tally)?;
            }
            let report = dominance_report(&tally, Thresholds::General { s: a.s, b: a.b })?;
            explore_output("general", a.run.runs, tally, s, report)
        }
        ExploreCmd::Planar(a) => {
            let kappa = a.kappa.unwrap_or(a.variant.degree() as u32 - 1);
            let stop = StopRule::new(a.run.max_open, a.run.radius)?;
            let runs = (0..a.run.runs)
                .into_par_iter()
                .map(|i| {
                    let field = ClockField::new(derive_seed(a.run.seed, i));
                    let run = explore_planar(a.variant, kappa, a.t, field, stop, i == 0 && a.trace_out.is_some())?;
                    let bad = replay_planar(&run, a.variant, kappa, a.t, field);
                    Ok((run, i, bad))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut tally = DominanceTally::new();
            let mut s = RunSummary { survived: 0, open: 0, violations: Vec::new() };
            for (run, i, bad) in runs {
                s.survived += (run.outcome == Outcome::Survived) as u64;
                s.open += run.state.count(VertexStatus::Open) as u64;
                tally = tally.merge(&run.tally);
                s.violations.extend(bad.iter().map(|p| format!("run {i} vertex {}", format_point(p))));
                if let (Some(path), Some(trace)) = (&a.trace_out, &run.trace) {
                    fs::write(path, trace.to_string()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                }
            }
            if let Some(path) = &a.run.tally_out {
                write_tally(path, &tally)?;
            }
            let report = dominance_report(&tally, Thresholds::Planar { p: a.p })?;
            explore_output(&format!("planar {}", a.variant), a.run.runs, tally, s, report)
        }
        ExploreCmd::CheckTrace(a) => {
            let text = fs::read_to_string(&a.path).map_err(|e| Error::Io(format!("{}: {e}", a.path.display())))?;
            let check = check_decoupling(&text)?;
            let mut summary = format!(
                "{}: {} steps checked\n",
                if check.ok { "ok" } else { "VIOLATION" },
                check.steps_checked
            );
            for (step, reason) in &check.violations {
                let _ = writeln!(summary, "step {step}: {reason}");
            }
            Ok(Output { failed: !check.ok, result: serde_json::to_value(&check)?, table: None, summary })
        }
    }
}

fn oracle(a: &OracleArgs) -> Result<Output> {
    let graph = SmallGraph::named(&a.graph)?;
    let p = exact_event_probability(&graph, a.kappa, a.t, a.event)?;
    Ok(plain(json!({ "probability": p }), format!("{p}\n")))
}

fn dominance(a: &DominanceArgs) -> Result<Output> {
    let file = fs::File::open(&a.tally).map_err(|e| Error::Io(format!("{}: {e}", a.tally.display())))?;
    let tally = DominanceTally::read_csv(file)?;
    let thresholds = match a.mode {
        TallyMode::General => Thresholds::General { s: a.s, b: a.b },
        TallyMode::Planar => Thresholds::Planar { p: a.p },
    };
    let report = dominance_report(&tally, thresholds)?;
    let mut summary = String::new();
    for r in &report.rows {
        let _ = writeln!(
            summary,
            "{}: {:.5} (lower {:.5}) vs {:.5} {}",
            r.context, r.frequency, r.lower_bound, r.threshold, r.verdict
        );
    }
    Ok(Output {
        table: Some(Table::new(&DominanceReport::CSV_HEADER, report.csv_records())),
        result: serde_json::to_value(&report)?,
        summary,
        failed: false,
    })
}
