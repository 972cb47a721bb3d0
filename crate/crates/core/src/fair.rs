//! (α, β)-fair k-median with outliers.
//!
//! Clients carry group labels. Every open facility must receive between a
//! `β_g` and an `α_g` share of its load from group `g`, and each group has
//! its own outlier budget. For a fixed facility set the optimal integral
//! assignment is found by branch-and-bound over the group-by-facility load
//! matrix `y`, where each group's column is priced by an exact flow that
//! realises those loads integrally.

use std::collections::BTreeMap;
use std::time::Instant;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::coreset::{build_coreset_with, check_epsilon};
use crate::error::{Error, Result};
use crate::flow::{solve_mcfo, CostMatrix};
use crate::model::{Assignment, Instance, Solution, Violation, WeightedClientSet};
use crate::solver::{
    check_guess_limit, enumerate_guesses, guess_bound, residual_weights, run_attempts, run_guesses,
    search_facility_sets, AttemptReport, OutlierGuess, RunReport, SolveConfig, SolveOutcome,
};

/// Most load columns enumerated per group before giving up.
pub const DEFAULT_COLUMN_LIMIT: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessSpec {
    /// Group label of every client index.
    pub group_of: Vec<usize>,
    pub alpha: Vec<Ratio<u64>>,
    pub beta: Vec<Ratio<u64>>,
    /// Outlier budget per group.
    pub m_vec: Vec<u64>,
}

impl FairnessSpec {
    /// One group holding every client, with `α = β = 1`.
    pub fn single_group(n: usize, m: u64) -> Self {
        Self {
            group_of: vec![0; n],
            alpha: vec![Ratio::from_integer(1)],
            beta: vec![Ratio::from_integer(1)],
            m_vec: vec![m],
        }
    }

    pub fn num_groups(&self) -> usize {
        self.alpha.len()
    }

    pub fn total_outliers(&self) -> u64 {
        self.m_vec.iter().sum()
    }

    pub fn violations(&self, instance: &Instance) -> Vec<Violation> {
        let mut out = Vec::new();
        let l = self.num_groups();
        if self.beta.len() != l || self.m_vec.len() != l {
            out.push(Violation::Shape(format!(
                "alpha, beta and m_vec have lengths {}, {}, {}",
                l,
                self.beta.len(),
                self.m_vec.len()
            )));
            return out;
        }
        if self.group_of.len() != instance.n() {
            out.push(Violation::Shape(format!(
                "{} group labels for {} clients",
                self.group_of.len(),
                instance.n()
            )));
        }
        for (c, &g) in self.group_of.iter().enumerate() {
            if g >= l {
                out.push(Violation::Shape(format!(
                    "client {c} has group {g} but there are {l} groups"
                )));
            }
        }
        let one = Ratio::from_integer(1);
        for g in 0..l {
            if self.alpha[g] > one || self.beta[g] > one {
                out.push(Violation::Shape(format!(
                    "group {g}: alpha and beta must lie in [0, 1]"
                )));
            }
            if self.beta[g] > self.alpha[g] {
                out.push(Violation::Shape(format!("group {g}: beta exceeds alpha")));
            }
            let size = self.group_of.iter().filter(|&&h| h == g).count() as u64;
            if self.m_vec[g] > size {
                out.push(Violation::Shape(format!(
                    "group {g}: outlier budget {} exceeds group size {size}",
                    self.m_vec[g]
                )));
            }
        }
        if self.total_outliers() != instance.m {
            out.push(Violation::Shape(format!(
                "per-group budgets sum to {} but m = {}",
                self.total_outliers(),
                instance.m
            )));
        }
        out
    }

    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let v = self.violations(instance);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(v))
        }
    }
}

/// `r · load ≤ x`.
fn above(r: Ratio<u64>, load: u64, x: u64) -> bool {
    (*r.numer() as u128) * (load as u128) <= (*r.denom() as u128) * (x as u128)
}

/// `r · load ≥ x`.
fn below(r: Ratio<u64>, load: u64, x: u64) -> bool {
    (*r.numer() as u128) * (load as u128) >= (*r.denom() as u128) * (x as u128)
}

/// Fairness and per-group outlier violations of `solution`.
pub fn fairness_violations(spec: &FairnessSpec, solution: &Solution) -> Vec<Violation> {
    let l = spec.num_groups();
    let mut loads: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for a in &solution.assignment {
        loads.entry(a.facility).or_insert_with(|| vec![0; l])[spec.group_of[a.client]] += a.amount;
    }
    let mut out = Vec::new();
    for (&f, by_group) in &loads {
        let load: u64 = by_group.iter().sum();
        for (g, &y) in by_group.iter().enumerate() {
            if !(above(spec.beta[g], load, y) && below(spec.alpha[g], load, y)) {
                out.push(Violation::Fairness {
                    facility: f,
                    group: g,
                    load,
                    group_load: y,
                });
            }
        }
    }
    let mut dropped = vec![0u64; l];
    for (&c, &o) in &solution.outliers {
        dropped[spec.group_of[c]] += o;
    }
    for (g, &o) in dropped.iter().enumerate() {
        if o > spec.m_vec[g] {
            out.push(Violation::GroupOutliersExceeded {
                group: g,
                outliers: o,
                budget: spec.m_vec[g],
            });
        }
    }
    out
}

struct Column {
    loads: Vec<u64>,
    cost: f64,
}

/// Every load vector for one group priced by an exact flow, cheapest first.
fn group_columns(
    instance: &Instance,
    support: &[(usize, u64)],
    open: &[usize],
    budget: u64,
    limit: u64,
) -> Result<Vec<Column>> {
    let total: u64 = support.iter().map(|&(_, w)| w).sum();
    let ranges: Vec<u64> = open
        .iter()
        .map(|&f| instance.capacities[f].min(total))
        .collect();
    let count = ranges
        .iter()
        .fold(1u128, |a, &r| a.saturating_mul(r as u128 + 1));
    if count > limit as u128 {
        return Err(Error::LimitExceeded(format!(
            "{count} load columns for one group exceed the limit of {limit}"
        )));
    }
    let demands: Vec<u64> = support.iter().map(|&(_, w)| w).collect();
    let costs = CostMatrix::from_fn(support.len(), open.len(), |r, c| {
        instance.unit_cost(support[r].0, open[c])
    });
    let mut out = Vec::new();
    if open.is_empty() {
        if total <= budget {
            out.push(Column {
                loads: Vec::new(),
                cost: 0.0,
            });
        }
        return Ok(out);
    }
    for loads in ranges.iter().map(|&r| 0..=r).multi_cartesian_product() {
        let served: u64 = loads.iter().sum();
        if served > total || served + budget < total {
            continue;
        }
        let r = solve_mcfo(&loads, &demands, &costs, total - served)?;
        out.push(Column {
            loads,
            cost: r.cost,
        });
    }
    out.sort_by(|a, b| {
        a.cost
            .total_cmp(&b.cost)
            .then_with(|| a.loads.cmp(&b.loads))
    });
    Ok(out)
}

struct Search<'a> {
    spec: &'a FairnessSpec,
    caps: Vec<u64>,
    columns: Vec<Vec<Column>>,
    /// Cheapest column cost of groups `g..`.
    rest_min: Vec<f64>,
    /// Largest possible column load per facility over groups `g..`.
    rest_load: Vec<Vec<u64>>,
    chosen: Vec<usize>,
    loads: Vec<Vec<u64>>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    fn dfs(&mut self, g: usize, cost: f64) {
        let l = self.columns.len();
        if g == l {
            if self.feasible_final() && self.best.as_ref().is_none_or(|b| cost < b.0) {
                self.best = Some((cost, self.chosen.clone()));
            }
            return;
        }
        for i in 0..self.columns[g].len() {
            let c = &self.columns[g][i];
            let total = cost + c.cost + self.rest_min[g + 1];
            if let Some((b, _)) = &self.best {
                if total >= *b {
                    break;
                }
            }
            let loads = c.loads.clone();
            let fits = loads
                .iter()
                .enumerate()
                .all(|(f, &y)| self.loads[f].iter().sum::<u64>() + y <= self.caps[f]);
            if !fits {
                continue;
            }
            for (f, &y) in loads.iter().enumerate() {
                self.loads[f][g] = y;
            }
            if self.feasible_partial(g) {
                self.chosen.push(i);
                let c = self.columns[g][i].cost;
                self.dfs(g + 1, cost + c);
                self.chosen.pop();
            }
            for f in 0..loads.len() {
                self.loads[f][g] = 0;
            }
        }
    }

    /// Lower shares can only break as loads grow; upper shares must be
    /// reachable with the loads the remaining groups could still add.
    fn feasible_partial(&self, g: usize) -> bool {
        for (f, by_group) in self.loads.iter().enumerate() {
            let load: u64 = by_group.iter().sum();
            let reach = load + self.rest_load[g + 1][f];
            for (h, &y) in by_group.iter().enumerate().take(g + 1) {
                if !above(self.spec.beta[h], load, y) || !below(self.spec.alpha[h], reach, y) {
                    return false;
                }
            }
        }
        true
    }

    fn feasible_final(&self) -> bool {
        self.loads.iter().all(|by_group| {
            let load: u64 = by_group.iter().sum();
            by_group.iter().enumerate().all(|(h, &y)| {
                above(self.spec.beta[h], load, y) && below(self.spec.alpha[h], load, y)
            })
        })
    }
}

/// Optimal fair integral assignment of `weights` to the facility set
/// `open` with per-group outlier budgets `budgets`.
pub fn solve_wfao(
    instance: &Instance,
    weights: &WeightedClientSet,
    open: &[usize],
    spec: &FairnessSpec,
    budgets: &[u64],
    column_limit: u64,
) -> Result<Solution> {
    let (assignment, outliers) = wfao_core(instance, weights, open, spec, budgets, column_limit)?;
    Ok(Solution::from_parts(
        instance,
        open.to_vec(),
        assignment,
        outliers,
    ))
}

type WfaoParts = (Vec<Assignment>, BTreeMap<usize, u64>);

fn wfao_core(
    instance: &Instance,
    weights: &WeightedClientSet,
    open: &[usize],
    spec: &FairnessSpec,
    budgets: &[u64],
    column_limit: u64,
) -> Result<WfaoParts> {
    let l = spec.num_groups();
    let mut open = open.to_vec();
    open.sort_unstable();
    open.dedup();
    let mut supports: Vec<Vec<(usize, u64)>> = vec![Vec::new(); l];
    for (c, w) in weights.support() {
        supports[spec.group_of[c]].push((c, w));
    }
    let columns: Vec<Vec<Column>> = (0..l)
        .map(|g| group_columns(instance, &supports[g], &open, budgets[g], column_limit))
        .collect::<Result<_>>()?;
    if columns.iter().any(Vec::is_empty) {
        return Err(Error::Infeasible(
            "some group cannot meet its outlier budget".to_string(),
        ));
    }
    let mut rest_min = vec![0.0; l + 1];
    let mut rest_load = vec![vec![0u64; open.len()]; l + 1];
    for g in (0..l).rev() {
        rest_min[g] = rest_min[g + 1] + columns[g][0].cost;
        for f in 0..open.len() {
            let most = columns[g].iter().map(|c| c.loads[f]).max().unwrap_or(0);
            rest_load[g][f] = rest_load[g + 1][f] + most;
        }
    }
    let mut search = Search {
        spec,
        caps: open.iter().map(|&f| instance.capacities[f]).collect(),
        columns,
        rest_min,
        rest_load,
        chosen: Vec::new(),
        loads: vec![vec![0; l]; open.len()],
        best: None,
    };
    search.dfs(0, 0.0);
    let (_, chosen) = search.best.ok_or_else(|| {
        Error::Infeasible("no load matrix satisfies the fairness constraints".to_string())
    })?;

    let mut assignment = Vec::new();
    let mut outliers = BTreeMap::new();
    for (g, &i) in chosen.iter().enumerate() {
        let support = &supports[g];
        let column = &search.columns[g][i];
        let demands: Vec<u64> = support.iter().map(|&(_, w)| w).collect();
        let costs = CostMatrix::from_fn(support.len(), open.len(), |r, c| {
            instance.unit_cost(support[r].0, open[c])
        });
        let total: u64 = demands.iter().sum();
        let served: u64 = column.loads.iter().sum();
        let r = solve_mcfo(&column.loads, &demands, &costs, total - served)?;
        for (row, col, amount) in r.amounts {
            assignment.push(Assignment {
                client: support[row].0,
                facility: open[col],
                amount,
            });
        }
        for (row, &o) in r.outliers.iter().enumerate() {
            if o > 0 {
                outliers.insert(support[row].0, o);
            }
        }
    }
    Ok((assignment, outliers))
}

/// Fair coreset: rings are sampled separately per group, so every group
/// keeps its exact total weight and every sample keeps its label.
pub fn build_fair_coreset(
    instance: &Instance,
    spec: &FairnessSpec,
    epsilon: f64,
    config: &crate::coreset::CoresetConfig,
    rng_seed: u64,
) -> Result<crate::coreset::Coreset> {
    spec.validate(instance)?;
    let distinct = spec
        .group_of
        .iter()
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let groups = (distinct > 1).then_some(spec.group_of.as_slice());
    build_coreset_with(instance, epsilon, config, rng_seed, groups)
}

/// Per-group weight totals.
pub fn group_totals(spec: &FairnessSpec, weights: &WeightedClientSet) -> Vec<u64> {
    let mut out = vec![0; spec.num_groups()];
    for (c, w) in weights.iter() {
        out[spec.group_of[c]] += w;
    }
    out
}

/// Outlier guesses with at most `m_g` units inside each group `g`. Fairness
/// can forbid dropping the full budget, so smaller totals are tried too.
pub fn enumerate_fair_guesses<'a>(
    spec: &'a FairnessSpec,
    weights: &'a WeightedClientSet,
) -> impl Iterator<Item = OutlierGuess> + 'a {
    let per_group: Vec<Vec<OutlierGuess>> = (0..spec.num_groups())
        .map(|g| {
            let part: WeightedClientSet = weights
                .iter()
                .filter(|&(c, _)| spec.group_of[c] == g)
                .collect();
            (0..=spec.m_vec[g])
                .flat_map(|t| enumerate_guesses(&part, t))
                .collect()
        })
        .collect();
    per_group
        .into_iter()
        .multi_cartesian_product()
        .map(|parts| {
            let mut pairs: Vec<(usize, u64)> = parts
                .into_iter()
                .flat_map(|g| g.clients.into_iter().zip(g.amounts))
                .collect();
            pairs.sort_unstable();
            let (clients, amounts) = pairs.into_iter().unzip();
            OutlierGuess { clients, amounts }
        })
}

/// Product over groups of `C(|W_g|, ≤m_g) · m_g^{m_g}`; it also covers the
/// guesses whose total stays below `m_g`.
pub fn fair_guess_bound(spec: &FairnessSpec, weights: &WeightedClientSet) -> u128 {
    (0..spec.num_groups())
        .map(|g| {
            let size = weights
                .iter()
                .filter(|&(c, w)| w > 0 && spec.group_of[c] == g)
                .count();
            guess_bound(size, spec.m_vec[g])
        })
        .fold(1u128, |a, b| a.saturating_mul(b))
}

/// Fair counterpart of [`crate::solver::solve_ckmo`]: per-group guesses on
/// a fair coreset, a fair plug-in on each residual with no outliers, and
/// exact fair evaluation of each candidate on the original clients.
pub fn solve_fair_ckmo(
    instance: &Instance,
    spec: &FairnessSpec,
    epsilon: f64,
    config: &SolveConfig,
    seed: u64,
    column_limit: u64,
) -> Result<SolveOutcome> {
    instance.validate()?;
    spec.validate(instance)?;
    check_epsilon(epsilon)?;
    let started = Instant::now();
    let unit = instance.unit_weights();
    let zeros = vec![0u64; spec.num_groups()];
    let evaluate = |f: &[usize]| fair_value(instance, &unit, f, spec, &spec.m_vec, column_limit);

    let (facilities, attempts, chosen) = run_attempts(config, seed, |attempt_seed| {
        let coreset = build_fair_coreset(instance, spec, epsilon, &config.coreset, attempt_seed)?;
        let weights = &coreset.weights;
        let count = enumerate_fair_guesses(spec, weights).count() as u64;
        check_guess_limit(count, config)?;
        let plugin = |g: &OutlierGuess| {
            let residual = residual_weights(weights, g);
            search_facility_sets(instance, &config.ckm, None, |f| {
                fair_value(instance, &residual, f, spec, &zeros, column_limit)
            })
            .map(Some)
        };
        let run = run_guesses(
            enumerate_fair_guesses(spec, weights),
            &plugin,
            &evaluate,
            config,
            started,
        )?;
        let bound = fair_guess_bound(spec, weights);
        let report = AttemptReport {
            seed: attempt_seed,
            guess_bound: bound,
            within_bound: count as u128 <= bound,
            coreset: coreset.meta,
            guess_count: count,
            guesses: run.records,
            best_cost: run.best.as_ref().map(|b| b.0),
            partial: run.partial,
        };
        Ok((run.best.map(|b| b.1), report))
    })?;
    let partial = attempts.iter().any(|a| a.partial);
    let solution = solve_wfao(
        instance,
        &unit,
        &facilities,
        spec,
        &spec.m_vec,
        column_limit,
    )?;
    let report = RunReport {
        epsilon,
        plugin: config.ckm.mode,
        gamma_declared: config.ckm.gamma_declared,
        attempts,
        chosen_attempt: chosen,
        partial,
        elapsed: started.elapsed(),
    };
    Ok(SolveOutcome { solution, report })
}

/// Fair assignment cost plus opening costs; `None` when infeasible.
fn fair_value(
    instance: &Instance,
    weights: &WeightedClientSet,
    open: &[usize],
    spec: &FairnessSpec,
    budgets: &[u64],
    column_limit: u64,
) -> Result<Option<f64>> {
    match solve_wfao(instance, weights, open, spec, budgets, column_limit) {
        Ok(s) => Ok(Some(s.cost)),
        Err(Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Exact fair optimum over every candidate facility set.
pub fn brute_force_fair(
    instance: &Instance,
    spec: &FairnessSpec,
    subset_limit: u128,
    column_limit: u64,
) -> Result<Solution> {
    instance.validate()?;
    spec.validate(instance)?;
    let config = crate::solver::CkmSolverConfig {
        exact_subset_limit: subset_limit,
        ..Default::default()
    };
    let unit = instance.unit_weights();
    let best = search_facility_sets(instance, &config, None, |f| {
        fair_value(instance, &unit, f, spec, &spec.m_vec, column_limit)
    })?;
    solve_wfao(
        instance,
        &unit,
        &best.facilities,
        spec,
        &spec.m_vec,
        column_limit,
    )
}
