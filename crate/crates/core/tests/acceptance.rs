//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cdperc::bounds::{
    chen_lower_bounds, poisson_cdf, poisson_limit, verify_theorem1, verify_theorem1_table,
    verify_theorem3_inequalities,
};
use cdperc::clocks::{derive_seed, keyed_uniform, ClockField};
use cdperc::dynamics::{evolve, evolve_edges, exact_event_probability, window_clocks, Event, SmallGraph};
use cdperc::explore::{
    dominance_report, explore_general, explore_planar, replay_general, replay_planar,
    DominanceTally, Outcome, PlanarVariant, StopRule, Thresholds,
};
use cdperc::lattice::{Boundary, LatticeSpec, ProjectionMap, Window};
use cdperc::mixed::{crossover_solve, ode_integrate, russo_check, sc_upper, theta_n_mixed, MixedParams};
use cdperc::stats::clopper_pearson_lower;
use rayon::prelude::*;

const SWEEP_BUDGET: Duration = Duration::from_secs(60);
const FLOAT_GUARD: f64 = 1e-12;
const LIMIT_TOL: f64 = 1e-4;
const ODE_TOL: f64 = 1e-8;
const ORACLE_SAMPLES: u64 = 1_000_000;
const ORACLE_Z: f64 = 4.0;
const CLOSED_FORM_TOL: f64 = 1e-12;
const EXPLORATION_RUNS: u64 = 100;
const DOMINANCE_MIN_TRIALS: u64 = 100_000;
const ALPHA: f64 = 0.01;
const SURVIVAL_RUNS: u64 = 200;
const SURVIVAL_FLOOR: f64 = 0.5;
const RUSSO_Z: f64 = 3.0;

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Check {
    Check { pass, detail }
}

fn sweep() -> Check {
    let t0 = Instant::now();
    let main = verify_theorem1("1.7", 10, 6, 4000, 4000).unwrap();
    let table = verify_theorem1_table("1.7").unwrap();
    let elapsed = t0.elapsed();
    let rows_ok = main.rows.len() == 3995 && main.rows.iter().all(|r| (6..=4000).contains(&r.d));
    let worst_s = main.rows.iter().map(|r| r.s).fold(1.0, f64::min);
    let worst_b = main.rows.iter().map(|r| r.b).fold(1.0, f64::min);
    check(
        main.all_pass && table.all_pass && rows_ok && elapsed <= SWEEP_BUDGET,
        format!(
            "{} main rows (min s {worst_s:.6}, min b {worst_b:.6}), {} table rows, {} failures, {:.1}s",
            main.rows.len(),
            table.rows.len(),
            main.failures().count() + table.failures().count(),
            elapsed.as_secs_f64()
        ),
    )
}

fn chen() -> Check {
    let (s, b) = chen_lower_bounds(1.7, 10, 4000).unwrap();
    check(
        s > 0.9765 + FLOAT_GUARD && b > 0.5622 + FLOAT_GUARD,
        format!("s_lower {s:.10} > 0.9765, b_lower {b:.10} > 0.5622"),
    )
}

/// Poisson CDF by direct summation, independent of the library.
fn poisson_oracle(lambda: f64, k: u64) -> f64 {
    let mut term = (-lambda).exp();
    let mut sum = term;
    for i in 1..=k {
        term *= lambda / i as f64;
        sum += term;
    }
    sum
}

fn poisson_limits() -> Check {
    let p = poisson_oracle(3.4, 7);
    let b = 1.0 - (-0.85f64).exp() / p;
    let (s_lib, b_lib) = poisson_limit(1.7, 10);
    let agree = (poisson_cdf(3.4, 7) - p).abs() < 1e-14 && (s_lib - p).abs() < 1e-14 && (b_lib - b).abs() < 1e-14;
    check(
        (p - 0.9770).abs() <= LIMIT_TOL && (b - 0.5625).abs() <= LIMIT_TOL && agree,
        format!("P_3.4(7) = {p:.6}, 1 - e^-0.85 / P_3.4(7) = {b:.6}"),
    )
}

fn closed_form(b: f64) -> f64 {
    (-(2.0 / 3.0) * (b - 0.5 + ((8.0 - 6.0 * b) / 5.0).ln() / 3.0)).exp()
}

fn curve() -> Check {
    let at_half = sc_upper(0.5).unwrap();
    let path = ode_integrate(1.0, 1e-4, 1e-12).unwrap();
    let ode_err = path.iter().map(|&(b, s)| (s - closed_form(b)).abs()).fold(0.0, f64::max);
    let lib_err = (0..=500)
        .map(|i| 0.5 + i as f64 * 1e-3)
        .map(|b| (sc_upper(b).unwrap() - closed_form(b)).abs())
        .fold(0.0, f64::max);
    let gates = [(0.5622, 0.9765), (0.5596, 0.9809), (0.5806, 0.9708)];
    let gate_vals: Vec<f64> = gates.iter().map(|&(b, _)| sc_upper(b).unwrap()).collect();
    let gates_ok = gates.iter().zip(&gate_vals).all(|(&(_, s), &v)| v < s);
    check(
        at_half == 1.0 && ode_err <= ODE_TOL && lib_err <= 1e-15 && gates_ok,
        format!(
            "sc_upper(0.5) = {at_half}, max |ode - closed form| = {ode_err:.2e} over {} steps, gates {:.4} {:.4} {:.4}",
            path.len() - 1,
            gate_vals[0],
            gate_vals[1],
            gate_vals[2]
        ),
    )
}

fn crossover() -> Check {
    let b = crossover_solve(0.6795).unwrap();
    let residual = (closed_form(b) - 0.6795 / b).abs();
    check((0.73..=0.75).contains(&b) && residual < 1e-9, format!("b* = {b:.10}, residual {residual:.1e}"))
}

fn planar_inequalities() -> Check {
    let at = verify_theorem3_inequalities(0.62, 0.5).unwrap();
    let control = verify_theorem3_inequalities(0.62, 0.53).unwrap();
    let single = control.iter().find(|v| v.candidates == 1).unwrap();
    // With one candidate the left side is t - t^3 / 2.
    let lhs1 = 0.62 - 0.62f64.powi(3) / 2.0;
    let oracle_ok = (single.lhs - lhs1).abs() < 1e-15 && lhs1 < 0.53;
    let min_margin = at.iter().map(|v| v.margin).fold(f64::INFINITY, f64::min);
    check(
        at.len() == 6 && at.iter().all(|v| v.holds) && !single.holds && oracle_ok,
        format!("six hold at (0.62, 0.5), min margin {min_margin:.6}; |X|=1 at p=0.53: {lhs1:.6} < 0.53"),
    )
}

const ORACLE_GRAPHS: [&str; 5] = ["path2", "path3", "star3", "cycle4", "grid2x3"];
const ORACLE_TIMES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

fn events(g: &SmallGraph) -> Vec<Event> {
    let mut ev: Vec<Event> = (0..g.edges.len()).map(Event::EdgeOpen).collect();
    ev.push(Event::Connected(0, g.num_vertices as u32 - 1));
    ev
}

fn within(freq: f64, p: f64, n: u64, z: f64) -> bool {
    if p <= 0.0 || p >= 1.0 {
        return freq == p;
    }
    (freq - p).abs() <= z * (p * (1.0 - p) / n as f64).sqrt()
}

/// Hit counts per (kappa, t, event) over `ORACLE_SAMPLES` clock draws, one
/// draw shared by every (kappa, t).
fn monte_carlo_counts(g: &SmallGraph, ev: &[Event], seed: u64) -> Vec<u64> {
    let m = g.edges.len();
    let cells = 4 * ORACLE_TIMES.len() * ev.len();
    (0..ORACLE_SAMPLES)
        .into_par_iter()
        .fold(
            || vec![0u64; cells],
            |mut acc, i| {
                let s = derive_seed(seed, i);
                let clocks: Vec<f64> = (0..m as u64).map(|e| keyed_uniform(s, [e])).collect();
                for kappa in 1..=4u32 {
                    for (ti, &t) in ORACLE_TIMES.iter().enumerate() {
                        let conf = evolve_edges(g.num_vertices, &g.edges, &clocks, kappa, t);
                        for (ei, e) in ev.iter().enumerate() {
                            let idx = ((kappa as usize - 1) * ORACLE_TIMES.len() + ti) * ev.len() + ei;
                            acc[idx] += e.holds(g, conf.open_edges()) as u64;
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0u64; cells], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

fn oracle_equivalence() -> Check {
    let mut cases = 0;
    let mut bad = Vec::new();
    let mut worst_z: f64 = 0.0;
    for (gi, name) in ORACLE_GRAPHS.iter().enumerate() {
        let g = SmallGraph::named(name).unwrap();
        assert!(g.edges.len() <= 8);
        let ev = events(&g);
        let counts = monte_carlo_counts(&g, &ev, 1000 + gi as u64);
        for kappa in 1..=4u32 {
            for (ti, &t) in ORACLE_TIMES.iter().enumerate() {
                cases += 1;
                for (ei, e) in ev.iter().enumerate() {
                    let idx = ((kappa as usize - 1) * ORACLE_TIMES.len() + ti) * ev.len() + ei;
                    let freq = counts[idx] as f64 / ORACLE_SAMPLES as f64;
                    let p = exact_event_probability(&g, kappa, t, *e).unwrap();
                    if p > 0.0 && p < 1.0 {
                        worst_z = worst_z.max((freq - p).abs() / (p * (1.0 - p) / ORACLE_SAMPLES as f64).sqrt());
                    }
                    if !within(freq, p, ORACLE_SAMPLES, ORACLE_Z) {
                        bad.push(format!("{name} kappa={kappa} t={t} {e}: {freq} vs {p}"));
                    }
                }
            }
        }
    }
    let path2 = SmallGraph::named("path2").unwrap();
    let spot_path = (0..=20).map(|i| i as f64 / 20.0).all(|t| {
        let p = exact_event_probability(&path2, 1, t, Event::EdgeOpen(0)).unwrap();
        (p - (t - t * t / 2.0)).abs() <= CLOSED_FORM_TOL
    });
    let star = SmallGraph::named("star3").unwrap();
    let spot_star = (0..3).all(|e| {
        let p = exact_event_probability(&star, 2, 1.0, Event::EdgeOpen(e)).unwrap();
        (p - 2.0 / 3.0).abs() <= CLOSED_FORM_TOL
    });
    check(
        bad.is_empty() && spot_path && spot_star,
        format!(
            "{cases} cases, {} mismatches, worst |z| = {worst_z:.2}; path2 t - t^2/2 {}; star3 2/3 {}{}",
            bad.len(),
            if spot_path { "ok" } else { "off" },
            if spot_star { "ok" } else { "off" },
            bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    )
}

/// `P(event)` under independent Bernoulli(t) edges, by subset enumeration.
fn bernoulli_oracle(g: &SmallGraph, t: f64, e: Event) -> f64 {
    let m = g.edges.len();
    (0u32..1 << m)
        .map(|mask| {
            let open: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
            let k = mask.count_ones() as i32;
            if e.holds(g, &open) {
                t.powi(k) * (1.0 - t).powi(m as i32 - k)
            } else {
                0.0
            }
        })
        .sum()
}

fn bernoulli_reduction() -> Check {
    let mut exact_ok = true;
    for name in ["path3", "star3", "cycle4", "grid2x3", "k4"] {
        let g = SmallGraph::named(name).unwrap();
        let kappa = g.max_degree();
        for t in [0.1, 0.25, 0.5, 0.75, 0.9] {
            for e in events(&g) {
                let p = exact_event_probability(&g, kappa, t, e).unwrap();
                exact_ok &= (p - bernoulli_oracle(&g, t, e)).abs() <= CLOSED_FORM_TOL;
            }
        }
    }
    let spec = LatticeSpec::hypercubic(2, Boundary::Torus, 4).unwrap();
    let window = Window::new(spec);
    let samples = 20_000u64;
    let t = 0.4;
    let (identical, open_total) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let field = ClockField::new(derive_seed(77, i));
            let conf = evolve(&window, 4, &field, t);
            let clocks = window_clocks(&window, &field);
            let same = clocks.iter().enumerate().all(|(e, &u)| conf.is_open(e) == (u <= t));
            (same as u64, conf.num_open() as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples * window.num_edges() as u64;
    let freq = open_total as f64 / n as f64;
    // Edges within a sample are independent, so the pooled frequency is binomial.
    let sim_ok = identical == samples && within(freq, t, n, ORACLE_Z);
    check(
        exact_ok && sim_ok,
        format!(
            "oracle = independent enumeration at kappa = max degree: {}; Z^2 torus kappa=4: {identical}/{samples} samples identical to {{U <= t}}, marginal {freq:.5} vs {t}",
            if exact_ok { "ok" } else { "off" }
        ),
    )
}

struct ExplorationSummary {
    violations: usize,
    tally: DominanceTally,
    survived: u64,
    seconds: f64,
}

fn run_general(runs: u64, seed: u64, stop: StopRule) -> ExplorationSummary {
    let t0 = Instant::now();
    let map = ProjectionMap::new(10, 2).unwrap();
    let results: Vec<_> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let f = ClockField::new(derive_seed(seed, i));
            let r = explore_general(&map, 10, 0.17, f, stop).unwrap();
            let bad = replay_general(&r, 10, 0.17, f).len();
            (bad, r.tally, r.outcome == Outcome::Survived)
        })
        .collect();
    summarize(results, t0)
}

fn run_planar(runs: u64, seed: u64, stop: StopRule) -> ExplorationSummary {
    let t0 = Instant::now();
    let results: Vec<_> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let f = ClockField::new(derive_seed(seed, i));
            let r = explore_planar(PlanarVariant::Cubic, 5, 0.62, f, stop, false).unwrap();
            let bad = replay_planar(&r, PlanarVariant::Cubic, 5, 0.62, f).len();
            (bad, r.tally, r.outcome == Outcome::Survived)
        })
        .collect();
    summarize(results, t0)
}

fn summarize(results: Vec<(usize, DominanceTally, bool)>, t0: Instant) -> ExplorationSummary {
    let mut s = ExplorationSummary { violations: 0, tally: DominanceTally::new(), survived: 0, seconds: 0.0 };
    for (bad, tally, survived) in results {
        s.violations += bad;
        s.tally = s.tally.merge(&tally);
        s.survived += survived as u64;
    }
    s.seconds = t0.elapsed().as_secs_f64();
    s
}

fn exploration(general: &ExplorationSummary, planar: &ExplorationSummary) -> Check {
    check(
        general.violations == 0 && planar.violations == 0,
        format!(
            "{EXPLORATION_RUNS} runs each: general d=10 kappa=10 t=0.17 {} violations ({:.1}s), planar cubic kappa=5 t=0.62 {} violations ({:.1}s)",
            general.violations, general.seconds, planar.violations, planar.seconds
        ),
    )
}

fn dominance(general: &ExplorationSummary, planar: &ExplorationSummary) -> Check {
    let g = dominance_report(&general.tally, Thresholds::General { s: 0.9765, b: 0.5622 }).unwrap();
    let p = dominance_report(&planar.tally, Thresholds::Planar { p: 0.5 }).unwrap();
    let tallies_ok =
        general.tally.total_trials() >= DOMINANCE_MIN_TRIALS && planar.tally.total_trials() >= DOMINANCE_MIN_TRIALS;
    let verdicts: Vec<String> = g
        .rows
        .iter()
        .chain(&p.rows)
        .map(|r| format!("{} {:.4}>{:.4}", r.context, r.lower_bound, r.threshold))
        .collect();

    let stop = |n| StopRule::new(usize::MAX, n).unwrap();
    let mut survival = Vec::new();
    let mut survival_ok = true;
    for n in [10i64, 20, 40] {
        let gs = run_general(SURVIVAL_RUNS, 300 + n as u64, stop(n)).survived;
        let ps = run_planar(SURVIVAL_RUNS, 400 + n as u64, stop(n)).survived;
        let mixed = theta_n_mixed(MixedParams::new(0.9765, 0.5622).unwrap(), n as u32, 500, 500 + n as u64, 2).unwrap();
        for (hits, trials) in [(gs, SURVIVAL_RUNS), (ps, SURVIVAL_RUNS), (mixed.hits, mixed.samples)] {
            survival_ok &= clopper_pearson_lower(hits, trials, ALPHA) > SURVIVAL_FLOOR;
        }
        survival.push(format!("n={n}: {gs}/{SURVIVAL_RUNS}, {ps}/{SURVIVAL_RUNS}, {}/{}", mixed.hits, mixed.samples));
    }
    check(
        tallies_ok && g.all_pass() && p.all_pass() && survival_ok,
        format!(
            "trials {} / {}; {}; survival (general, planar, mixed) {}",
            general.tally.total_trials(),
            planar.tally.total_trials(),
            verdicts.join(", "),
            survival.join("; ")
        ),
    )
}

fn russo() -> Check {
    let params = MixedParams::new(0.9, 0.6).unwrap();
    let r = russo_check(params, 6, 0.01, 100_000, 11).unwrap();
    let p = &r.pivotality;
    let factor = (4.0 - 3.0 * 0.6) / (2.0 * 0.9 * 0.4);
    check(
        r.agrees(RUSSO_Z) && p.ratio_holds(RUSSO_Z) && (p.ratio_factor - factor).abs() < 1e-12,
        format!(
            "pivotal sites {:.4} vs finite difference {:.4} (discrepancy {:.4} +- {:.4}); ratio excess {:.4} +- {:.4}",
            p.site_mass, r.finite_difference, r.discrepancy, r.discrepancy_stderr, p.ratio_excess, p.ratio_excess_stderr
        ),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |name: &str, o: Check| {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as u32;
    };
    report("bound sweep", sweep());
    report("closed-form extension", chen());
    report("poisson limits", poisson_limits());
    report("region curve", curve());
    report("crossover", crossover());
    report("planar inequalities", planar_inequalities());
    report("oracle equivalence", oracle_equivalence());
    report("bernoulli reduction", bernoulli_reduction());
    let general = run_general(EXPLORATION_RUNS, 1, StopRule::new(1500, 200).unwrap());
    let planar = run_planar(EXPLORATION_RUNS, 2, StopRule::new(2000, 200).unwrap());
    report("exploration soundness", exploration(&general, &planar));
    report("dominance tallies", dominance(&general, &planar));
    report("russo formula", russo());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
