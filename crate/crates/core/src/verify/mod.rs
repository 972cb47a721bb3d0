//! Seeded experiments that check the solvers against exhaustive oracles and
//! measure coreset error, Lipschitz slack and approximation ratios.
//!
//! Every experiment is a pure function of its parameters and seed; trials
//! run in parallel but are merged in trial order.

pub mod generate;
pub mod oracle;

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::coreset::{build_coreset, build_rings, seed_solution, CoresetConfig};
use crate::error::{Error, Result};
use crate::fair::{solve_wfao, FairnessSpec};
use crate::flow::{evaluate_g, solve_mcf, solve_mcfo, wcost_m, CostMatrix, FlowNetwork, RingProbe};
use crate::model::{solution_violations, Instance, WeightedClientSet};
use crate::rng::{derive_seed, substream, tag};
use crate::solver::{
    brute_force_ckmo, candidate_facility_sets, solve_ckmo, CkmSolverConfig, SolveConfig,
};

use generate::{
    generate_instance, random_fairness, random_network, tiny_instance, GeneratorParams,
};

/// Facility-set limit used by the oracle-backed experiments.
pub const ORACLE_SUBSET_LIMIT: u128 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub p90: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p: f64| {
            if sorted.is_empty() {
                0.0
            } else {
                sorted[((sorted.len() - 1) as f64 * p).round() as usize]
            }
        };
        let mean = if sorted.is_empty() {
            0.0
        } else {
            sorted.iter().sum::<f64>() / sorted.len() as f64
        };
        Self {
            count: sorted.len(),
            min: sorted.first().copied().unwrap_or(0.0),
            max: sorted.last().copied().unwrap_or(0.0),
            mean,
            median: q(0.5),
            p90: q(0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub trials: usize,
    pub trial_seeds: Vec<u64>,
    pub measurements: Vec<f64>,
    pub summary: Summary,
    /// Per-trial bound on the measurement, if any.
    pub threshold: Option<f64>,
    /// Fraction of trials with measurement ≤ threshold.
    pub within_threshold: Option<f64>,
    /// Fraction of trials that must be within the threshold.
    pub required_fraction: Option<f64>,
    pub passed: bool,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    fn new(id: &str, params: serde_json::Value, seed: u64, trial_seeds: Vec<u64>) -> Self {
        Self {
            id: id.to_string(),
            params,
            seed,
            trials: trial_seeds.len(),
            trial_seeds,
            measurements: Vec::new(),
            summary: Summary::of(&[]),
            threshold: None,
            within_threshold: None,
            required_fraction: None,
            passed: false,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Sets the measurements and decides `passed`: no failures and, if a
    /// threshold is set, enough trials within it.
    fn finish(mut self, measurements: Vec<f64>) -> Self {
        self.summary = Summary::of(&measurements);
        if let Some(t) = self.threshold {
            let ok = measurements.iter().filter(|&&x| x <= t).count();
            self.within_threshold = Some(if measurements.is_empty() {
                1.0
            } else {
                ok as f64 / measurements.len() as f64
            });
        }
        self.measurements = measurements;
        let enough = match (self.within_threshold, self.required_fraction) {
            (Some(w), Some(r)) => w >= r,
            (Some(w), None) => w >= 1.0,
            _ => true,
        };
        self.passed = enough && self.failures.is_empty();
        self
    }

    /// One `trial,seed,value` row per trial.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["trial", "seed", "value"])?;
        for (i, (s, v)) in self.trial_seeds.iter().zip(&self.measurements).enumerate() {
            w.write_record([i.to_string(), s.to_string(), format!("{v:.12e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn trial_seeds(seed: u64, trials: usize) -> Vec<u64> {
    (0..trials)
        .map(|t| derive_seed(seed, &[tag::TRIAL, t as u64]))
        .collect()
}

/// Random capacitated networks (≤ `max_nodes` nodes, capacities ≤
/// `max_capacity`): the flow solver must match exhaustive enumeration and
/// leave no negative residual cycle. Measurement: |solver − oracle|.
pub fn mcf_oracle_sweep(
    trials: usize,
    max_nodes: usize,
    max_arcs: usize,
    max_capacity: u64,
    seed: u64,
) -> ExperimentReport {
    let seeds = trial_seeds(seed, trials);
    let params =
        json!({ "max_nodes": max_nodes, "max_arcs": max_arcs, "max_capacity": max_capacity });
    let mut report = ExperimentReport::new("mcf-oracle", params, seed, seeds.clone());
    let results: Vec<(f64, Option<String>, bool)> = seeds
        .par_iter()
        .map(|&s| {
            let net = random_network(max_nodes, max_arcs, max_capacity, &mut substream(s, &[]));
            let truth = oracle::exhaustive_flow(&net);
            match (solve_mcf(&net), truth) {
                (Ok(r), Some((best, _))) => {
                    let mut problems = r.violations(&net);
                    if r.has_negative_residual_cycle(&net) {
                        problems.push("negative residual cycle".to_string());
                    }
                    if r.cost != best {
                        problems.push(format!("cost {} but optimum {best}", r.cost));
                    }
                    let msg = (!problems.is_empty())
                        .then(|| format!("seed {s}: {} in {}", problems.join(", "), to_json(&net)));
                    ((r.cost - best).abs(), msg, true)
                }
                (Err(Error::Infeasible(_)), None) => (0.0, None, false),
                (Ok(r), None) => (
                    f64::INFINITY,
                    Some(format!(
                        "seed {s}: solver found cost {} on an infeasible network",
                        r.cost
                    )),
                    true,
                ),
                (Err(e), _) => (
                    f64::INFINITY,
                    Some(format!("seed {s}: {e} in {}", to_json(&net))),
                    true,
                ),
            }
        })
        .collect();
    let feasible = results.iter().filter(|r| r.2).count();
    report
        .notes
        .push(format!("{feasible} of {trials} networks feasible"));
    report.failures = results.iter().filter_map(|r| r.1.clone()).collect();
    report.finish(results.into_iter().map(|r| r.0).collect())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_default()
}

struct TinyMcfo {
    capacities: Vec<u64>,
    demands: Vec<u64>,
    costs: Vec<Vec<f64>>,
}

fn tiny_mcfo<R: Rng>(rng: &mut R) -> TinyMcfo {
    let rows = rng.gen_range(1..=4);
    let cols = rng.gen_range(1..=3);
    TinyMcfo {
        capacities: (0..cols).map(|_| rng.gen_range(0..=3)).collect(),
        demands: (0..rows).map(|_| rng.gen_range(0..=2)).collect(),
        costs: (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| {
                        if rng.gen_bool(0.1) {
                            f64::INFINITY
                        } else {
                            rng.gen_range(0..=9) as f64
                        }
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Random tiny bipartite instances, every outlier budget from 0 to the
/// total demand: the dummy-facility reduction must equal exhaustive search,
/// agree with a plain flow at `m = 0`, and never get costlier as `m` grows.
/// Measurement: largest |solver − oracle| over the budgets of one trial.
pub fn mcfo_consistency_check(trials: usize, seed: u64) -> ExperimentReport {
    let seeds = trial_seeds(seed, trials);
    let mut report = ExperimentReport::new(
        "mcfo-consistency",
        json!({ "rows": 4, "cols": 3 }),
        seed,
        seeds.clone(),
    );
    let results: Vec<(f64, Vec<String>)> = seeds
        .par_iter()
        .map(|&s| {
            let inst = tiny_mcfo(&mut substream(s, &[]));
            let rows = inst.demands.len();
            let cols = inst.capacities.len();
            let matrix = CostMatrix::from_fn(rows, cols, |r, c| inst.costs[r][c]);
            let total: u64 = inst.demands.iter().sum();
            let mut problems = Vec::new();
            let mut worst = 0.0f64;
            let mut previous = f64::INFINITY;
            for m in 0..=total {
                let got = match solve_mcfo(&inst.capacities, &inst.demands, &matrix, m) {
                    Ok(r) => Some(r.cost),
                    Err(Error::Infeasible(_)) => None,
                    Err(e) => {
                        problems.push(format!("seed {s}, m = {m}: {e}"));
                        continue;
                    }
                };
                let want = oracle::exhaustive_mcfo(&inst.capacities, &inst.demands, &inst.costs, m);
                if got != want {
                    problems.push(format!(
                        "seed {s}, m = {m}: solver {got:?}, oracle {want:?}"
                    ));
                    worst = f64::INFINITY;
                } else if let (Some(g), Some(w)) = (got, want) {
                    worst = worst.max((g - w).abs());
                }
                let value = got.unwrap_or(f64::INFINITY);
                if value > previous {
                    problems.push(format!(
                        "seed {s}: cost rises from {previous} to {value} at m = {m}"
                    ));
                }
                previous = value;
                if m == 0 {
                    let plain = plain_flow_cost(&inst);
                    if plain != got {
                        problems.push(format!(
                            "seed {s}: m = 0 gives {got:?} but plain flow {plain:?}"
                        ));
                    }
                }
            }
            (worst, problems)
        })
        .collect();
    report.failures = results.iter().flat_map(|r| r.1.clone()).collect();
    report.finish(results.into_iter().map(|r| r.0).collect())
}

fn plain_flow_cost(inst: &TinyMcfo) -> Option<f64> {
    let mut net = FlowNetwork::new();
    let rows = inst.demands.len();
    for &w in &inst.demands {
        net.add_node(w as i64, 0);
    }
    for &u in &inst.capacities {
        net.add_node(0, u);
    }
    for r in 0..rows {
        for (f, &c) in inst.costs[r].iter().enumerate() {
            if c.is_finite() {
                net.add_arc(r, rows + f, c, None);
            }
        }
    }
    solve_mcf(&net).ok().map(|r| r.cost)
}

/// Largest relative error `|wcost_m(W,F) − cost_m(C,F)| / cost_m(C,F)`
/// over every candidate facility set `F`, with exact values for `C`
/// precomputed in `truth`.
fn max_relative_error(
    instance: &Instance,
    weights: &WeightedClientSet,
    truth: &[(Vec<usize>, Option<f64>)],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (f, exact) in truth {
        let approx = wcost_m(instance, weights, f, instance.m)?.map(|s| s.cost);
        let err = match (exact, approx) {
            (Some(e), Some(a)) if *e > 0.0 => (a - e).abs() / e,
            (Some(_), Some(a)) => {
                if a == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        worst = worst.max(err);
    }
    Ok(worst)
}

fn exact_costs(instance: &Instance) -> Result<Vec<(Vec<usize>, Option<f64>)>> {
    let sets: Vec<Vec<usize>> = candidate_facility_sets(instance).collect();
    sets.into_par_iter()
        .map(|f| {
            let v = crate::flow::cost_m(instance, &f, instance.m)?.map(|s| s.cost);
            Ok((f, v))
        })
        .collect()
}

/// One fixed instance drawn from `params`; each trial builds a coreset with
/// its own seed. Measurement: max-over-F relative error; threshold `ε`.
pub fn coreset_error_experiment(
    params: &GeneratorParams,
    epsilon: f64,
    s_override: Option<usize>,
    trials: usize,
    required_fraction: f64,
    seed: u64,
) -> Result<ExperimentReport> {
    let instance = generate_instance(params, seed);
    let truth = exact_costs(&instance)?;
    let seeds = trial_seeds(seed, trials);
    let config = CoresetConfig {
        s_override,
        ..CoresetConfig::default()
    };
    let mut report = ExperimentReport::new(
        "coreset-error",
        json!({ "generator": params, "epsilon": epsilon, "s_override": s_override }),
        seed,
        seeds.clone(),
    );
    let errors: Vec<(f64, usize, bool)> = seeds
        .par_iter()
        .map(|&s| {
            let coreset = build_coreset(&instance, epsilon, &config, s)?;
            let exact = coreset.is_exact();
            Ok((
                max_relative_error(&instance, &coreset.weights, &truth)?,
                coreset.meta.support_size,
                exact,
            ))
        })
        .collect::<Result<_>>()?;
    let sampled = errors.iter().filter(|e| !e.2).count();
    report.notes.push(format!(
        "{sampled} of {trials} trials subsampled at least one ring"
    ));
    let support = Summary::of(&errors.iter().map(|e| e.1 as f64).collect::<Vec<_>>());
    report.notes.push(format!(
        "coreset support size: mean {:.1}, max {}",
        support.mean, support.max
    ));
    report
        .notes
        .push(format!("{} candidate facility sets per trial", truth.len()));
    report.threshold = Some(epsilon);
    report.required_fraction = Some(required_fraction);
    Ok(report.finish(errors.into_iter().map(|e| e.0).collect()))
}

/// Mean coreset error for each sample size in `sizes` on one fixed
/// instance. Measurement per size: the mean error. Passes when the means
/// rise at most `allowed_inversions` times.
pub fn coreset_error_trend(
    params: &GeneratorParams,
    epsilon: f64,
    sizes: &[usize],
    trials: usize,
    allowed_inversions: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut means = Vec::new();
    for &s in sizes {
        let r = coreset_error_experiment(params, epsilon, Some(s), trials, 0.0, seed)?;
        means.push(r.summary.mean);
    }
    let inversions = means.windows(2).filter(|w| w[1] > w[0]).count();
    let mut report = ExperimentReport::new(
        "coreset-trend",
        json!({ "generator": params, "epsilon": epsilon, "sizes": sizes, "trials": trials }),
        seed,
        sizes.iter().map(|&s| s as u64).collect(),
    );
    report.notes.push(format!(
        "{inversions} trend inversions (allowed {allowed_inversions})"
    ));
    if inversions > allowed_inversions {
        report
            .failures
            .push(format!("mean error rises {inversions} times: {means:?}"));
    }
    Ok(report.finish(means))
}

/// Perturbs single ring coordinates of `g(v)` and checks
/// `|g(v + δ e_c) − g(v)| ≤ δ · radius + 1e-9`. Measurement per pair: the
/// change divided by `δ · radius` (0 when `δ = 0` or radius 0 and no change).
pub fn lipschitz_check(
    instance: &Instance,
    facilities: &[usize],
    ring: &RingProbe,
    radius: f64,
    trials: usize,
    max_value: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    let seeds = trial_seeds(seed, trials);
    let mut report = ExperimentReport::new(
        "lipschitz",
        json!({ "facilities": facilities, "ring_center": ring.center_point, "ring_size": ring.members.len(), "radius": radius, "max_value": max_value }),
        seed,
        seeds.clone(),
    );
    let results: Vec<(f64, Option<String>)> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = substream(s, &[tag::PERTURB]);
            let v: Vec<u64> = ring
                .members
                .iter()
                .map(|_| rng.gen_range(0..=max_value))
                .collect();
            let c = rng.gen_range(0..ring.members.len());
            let delta = rng.gen_range(0..=max_value);
            let mut w = v.clone();
            w[c] += delta;
            let a = evaluate_g(instance, facilities, ring, &v)?;
            let b = evaluate_g(instance, facilities, ring, &w)?;
            let change = (b - a).abs();
            let bound = delta as f64 * radius;
            let slack = if bound > 0.0 {
                change / bound
            } else if change > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            let msg = (change > bound + 1e-9).then(|| {
                format!(
                    "v = {v:?}, client {}, delta {delta}: |g change| {change} > {bound}",
                    ring.members[c]
                )
            });
            Ok((slack, msg))
        })
        .collect::<Result<_>>()?;
    report.failures = results.iter().filter_map(|r| r.1.clone()).collect();
    Ok(report.finish(results.into_iter().map(|r| r.0).collect()))
}

/// Lipschitz checks over `instances` random instances, each with a random
/// feasible facility set and a random nonempty ring of its seed solution.
pub fn lipschitz_experiment(
    params: &GeneratorParams,
    instances: usize,
    pairs: usize,
    max_value: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    let seeds = trial_seeds(seed, instances);
    let mut all = Vec::new();
    let mut failures = Vec::new();
    for &s in &seeds {
        let instance = generate_instance(params, s);
        let seed_sol = seed_solution(
            &instance,
            CoresetConfig::default().zeta,
            &Default::default(),
        );
        let rings = build_rings(&instance, &seed_sol);
        let mut rng = substream(s, &[tag::PERTURB]);
        let ring = rings.rings.choose(&mut rng).expect("at least one ring");
        let feasible: Vec<Vec<usize>> = candidate_facility_sets(&instance)
            .filter(|f| instance.capacity_of(f) + instance.m >= instance.n() as u64)
            .collect();
        let facilities = feasible.choose(&mut rng).expect("feasible instance");
        let probe = RingProbe {
            center_point: ring.center,
            members: ring.members.clone(),
        };
        let r = lipschitz_check(
            &instance,
            facilities,
            &probe,
            ring.radius,
            pairs,
            max_value,
            s,
        )?;
        all.extend(r.measurements);
        failures.extend(
            r.failures
                .into_iter()
                .map(|f| format!("instance seed {s}: {f}")),
        );
    }
    let mut report = ExperimentReport::new(
        "lipschitz-sweep",
        json!({ "generator": params, "instances": instances, "pairs": pairs, "max_value": max_value }),
        seed,
        seeds,
    );
    report.failures = failures;
    report
        .notes
        .push(format!("{} perturbation pairs", all.len()));
    Ok(report.finish(all))
}

fn exact_solve_config(s_override: Option<usize>) -> SolveConfig {
    SolveConfig {
        coreset: CoresetConfig {
            s_override,
            ..CoresetConfig::default()
        },
        ckm: CkmSolverConfig::default(),
        ..SolveConfig::default()
    }
}

/// `solve_ckmo` with the exact plug-in against the brute-force optimum on
/// instances drawn from `params` (one per trial). Measurement: cost / OPT;
/// threshold `(1+ε)/(1−ε)`.
pub fn ratio_experiment(
    params: &GeneratorParams,
    epsilon: f64,
    s_override: Option<usize>,
    trials: usize,
    required_fraction: f64,
    seed: u64,
) -> Result<ExperimentReport> {
    let seeds = trial_seeds(seed, trials);
    let config = exact_solve_config(s_override);
    let mut report = ExperimentReport::new(
        "approximation-ratio",
        json!({ "generator": params, "epsilon": epsilon, "s_override": s_override }),
        seed,
        seeds.clone(),
    );
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    let mut sampled = 0;
    for &s in &seeds {
        let instance = generate_instance(params, s);
        let opt = brute_force_ckmo(&instance, ORACLE_SUBSET_LIMIT)?.cost;
        let out = solve_ckmo(&instance, epsilon, &config, derive_seed(s, &[tag::CORESET]))?;
        check_outcome(&instance, &out, s, &mut failures);
        if out
            .report
            .attempts
            .iter()
            .any(|a| a.coreset.rings.iter().any(|r| r.sampled < r.population))
        {
            sampled += 1;
        }
        ratios.push(ratio(out.solution.cost, opt));
    }
    report.notes.push(format!(
        "{sampled} of {trials} trials subsampled at least one ring"
    ));
    report.threshold = Some((1.0 + epsilon) / (1.0 - epsilon));
    report.required_fraction = Some(required_fraction);
    report.failures = failures;
    Ok(report.finish(ratios))
}

fn ratio(cost: f64, opt: f64) -> f64 {
    if opt > 0.0 {
        cost / opt
    } else if cost == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn check_outcome(
    instance: &Instance,
    out: &crate::solver::SolveOutcome,
    seed: u64,
    failures: &mut Vec<String>,
) {
    let violations = solution_violations(
        instance,
        &instance.unit_weights(),
        instance.m,
        &out.solution,
    );
    if !violations.is_empty() {
        failures.push(format!("seed {seed}: invalid solution: {violations:?}"));
    }
    if !out.report.guess_bound_respected() {
        failures.push(format!("seed {seed}: guess count exceeds the bound"));
    }
}

/// Tiny instances where no ring is subsampled: the exact pipeline must hit
/// the brute-force optimum exactly. Measurement: |cost − OPT|.
pub fn exactness_experiment(trials: usize, seed: u64) -> Result<ExperimentReport> {
    let seeds = trial_seeds(seed, trials);
    let config = exact_solve_config(None);
    let mut report = ExperimentReport::new(
        "no-sampling-exactness",
        json!({ "max_n": 12, "max_facilities": 5, "max_k": 2, "max_m": 2 }),
        seed,
        seeds.clone(),
    );
    let results: Vec<(f64, Vec<String>)> = seeds
        .par_iter()
        .map(|&s| {
            let instance = small_instance(s);
            let opt = brute_force_ckmo(&instance, ORACLE_SUBSET_LIMIT)?;
            let out = solve_ckmo(&instance, 0.5, &config, s)?;
            let mut failures = Vec::new();
            check_outcome(&instance, &out, s, &mut failures);
            if out
                .report
                .attempts
                .iter()
                .any(|a| a.coreset.rings.iter().any(|r| r.sampled < r.population))
            {
                failures.push(format!("seed {s}: a ring was subsampled"));
            }
            if out.solution.cost != opt.cost {
                failures.push(format!(
                    "seed {s}: pipeline {} but optimum {}",
                    out.solution.cost, opt.cost
                ));
            }
            Ok(((out.solution.cost - opt.cost).abs(), failures))
        })
        .collect::<Result<_>>()?;
    report.failures = results.iter().flat_map(|r| r.1.clone()).collect();
    Ok(report.finish(results.into_iter().map(|r| r.0).collect()))
}

/// Instances with `n ≤ 12`, `|𝓕| ≤ 5`, `k ≤ 2`, `m ≤ 2`; planted geometry on
/// even seeds, integer metrics on odd ones.
pub fn small_instance(seed: u64) -> Instance {
    let mut rng = substream(seed, &[tag::GENERATOR, 1]);
    let n = rng.gen_range(3..=12);
    let nf = rng.gen_range(1..=5);
    let k = rng.gen_range(1..=2);
    let m = rng.gen_range(0..=2u64.min(n as u64));
    if seed.is_multiple_of(2) {
        let mut params = GeneratorParams::new(n, nf, k, m);
        params.planted_outliers = rng.gen_bool(0.5);
        if rng.gen_bool(0.5) {
            params.capacity = generate::CapacityMode::Heterogeneous;
        }
        generate_instance(&params, seed)
    } else {
        tiny_instance(n, nf, k, m, 6, seed)
    }
}

/// Tiny fair instances (≤ 8 clients, 2 groups, ≤ 2 facilities, weights
/// ≤ 2): branch-and-bound against exhaustive assignment search, plus
/// integrality and fairness validation of every output. Measurement:
/// |solver − oracle|.
pub fn wfao_experiment(trials: usize, seed: u64) -> Result<ExperimentReport> {
    let seeds = trial_seeds(seed, trials);
    let mut report = ExperimentReport::new(
        "wfao-oracle",
        json!({ "max_clients": 8, "groups": 2, "max_facilities": 2, "max_weight": 2 }),
        seed,
        seeds.clone(),
    );
    let results: Vec<(f64, Vec<String>, bool)> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = substream(s, &[tag::GENERATOR, 2]);
            let n = rng.gen_range(2..=8);
            let nf = rng.gen_range(1..=2);
            let mut instance =
                tiny_instance(n, nf, nf, rng.gen_range(0..=2u64.min(n as u64)), 6, s);
            let spec = random_fairness(&instance, 2, &mut rng);
            let weights: WeightedClientSet = (0..n).map(|c| (c, rng.gen_range(1..=2))).collect();
            // Usually leave room for the heavier weights as well.
            while rng.gen_bool(0.8)
                && instance.capacities.iter().sum::<u64>() + instance.m < weights.total_weight()
            {
                let f = rng.gen_range(0..nf);
                instance.capacities[f] += 1;
            }
            let open: Vec<usize> = (0..nf).collect();
            let support = weights.support();
            let want = oracle::exhaustive_fair(
                &instance,
                &support,
                &open,
                &spec.group_of,
                &spec.alpha,
                &spec.beta,
                &spec.m_vec,
            );
            let got = solve_wfao(
                &instance,
                &weights,
                &open,
                &spec,
                &spec.m_vec,
                crate::fair::DEFAULT_COLUMN_LIMIT,
            );
            let mut failures = Vec::new();
            let diff = match (&got, want) {
                (Ok(sol), Some(w)) => {
                    let mut v = solution_violations(&instance, &weights, instance.m, sol);
                    v.extend(crate::fair::fairness_violations(&spec, sol));
                    if !v.is_empty() {
                        failures.push(format!("seed {s}: {v:?}"));
                    }
                    if sol.cost != w {
                        failures.push(format!("seed {s}: solver {} but oracle {w}", sol.cost));
                    }
                    (sol.cost - w).abs()
                }
                (Err(Error::Infeasible(_)), None) => 0.0,
                (Ok(sol), None) => {
                    failures.push(format!(
                        "seed {s}: solver {} on an instance the oracle finds infeasible",
                        sol.cost
                    ));
                    f64::INFINITY
                }
                (Err(e), _) => {
                    failures.push(format!("seed {s}: {e} (oracle {want:?})"));
                    f64::INFINITY
                }
            };
            // One group with α = β = 1 must reproduce the plain weighted cost.
            let single = FairnessSpec::single_group(n, instance.m);
            let fair = solve_wfao(
                &instance,
                &weights,
                &open,
                &single,
                &[instance.m],
                crate::fair::DEFAULT_COLUMN_LIMIT,
            );
            let plain = wcost_m(&instance, &weights, &open, instance.m)?;
            match (fair, plain) {
                (Ok(a), Some(b)) if a.cost == b.cost => {}
                (Err(Error::Infeasible(_)), None) => {}
                (a, b) => failures.push(format!(
                    "seed {s}: single group gives {:?} but weighted cost {:?}",
                    a.map(|x| x.cost).ok(),
                    b.map(|x| x.cost)
                )),
            }
            Ok((diff, failures, want.is_some()))
        })
        .collect::<Result<_>>()?;
    let feasible = results.iter().filter(|r| r.2).count();
    report
        .notes
        .push(format!("{feasible} of {trials} instances feasible"));
    report.failures = results.iter().flat_map(|r| r.1.clone()).collect();
    Ok(report.finish(results.into_iter().map(|r| r.0).collect()))
}
