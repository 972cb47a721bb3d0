//! Outlier-guess enumeration on a coreset and the end-to-end solve.
//!
//! For every way of placing `m` units of outlier weight on at most `m`
//! coreset points, the residual weighted instance is solved without
//! outliers by a pluggable capacitated k-median solver. Each facility set
//! found this way is then scored on the original clients with an exact
//! outlier-aware assignment, and the cheapest one wins.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coreset::{build_coreset, CoresetConfig, CoresetMeta};
use crate::error::{Error, Result};
use crate::flow::{cost_m, solve_mcfo, CostMatrix};
use crate::model::{Instance, Solution, WeightedClientSet};
use crate::numeric::{binomial, compensated_sum};
use crate::rng::{derive_seed, tag};

/// Outlier weight `amounts[i]` placed on coreset client `clients[i]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutlierGuess {
    pub clients: Vec<usize>,
    pub amounts: Vec<u64>,
}

impl OutlierGuess {
    pub fn empty() -> Self {
        Self {
            clients: Vec::new(),
            amounts: Vec::new(),
        }
    }

    pub fn total(&self) -> u64 {
        self.amounts.iter().sum()
    }
}

/// Lexicographically smallest `z` with `1 ≤ z_i ≤ caps[i]` and `Σ z = m`.
fn first_composition(caps: &[u64], m: u64) -> Option<Vec<u64>> {
    let t = caps.len() as u64;
    if t > m || caps.iter().sum::<u64>() < m {
        return None;
    }
    let mut z = Vec::with_capacity(caps.len());
    let mut left = m;
    for i in 0..caps.len() {
        let suffix: u64 = caps[i + 1..].iter().sum();
        let v = left.saturating_sub(suffix).max(1);
        z.push(v);
        left -= v;
    }
    Some(z)
}

/// Advances `z` to the next composition in lexicographic order.
fn next_composition(z: &mut [u64], caps: &[u64]) -> bool {
    let t = z.len();
    for i in (0..t.saturating_sub(1)).rev() {
        if z[i] >= caps[i] {
            continue;
        }
        let rest = match z[i + 1..].iter().sum::<u64>().checked_sub(1) {
            Some(r) => r,
            None => continue,
        };
        let slots = (t - i - 1) as u64;
        let room: u64 = caps[i + 1..].iter().sum();
        if rest >= slots && rest <= room {
            z[i] += 1;
            if let Some(tail) = first_composition(&caps[i + 1..], rest) {
                z[i + 1..].copy_from_slice(&tail);
                return true;
            }
            z[i] -= 1;
        }
    }
    false
}

/// Lazy enumeration of outlier guesses: subsets `T` of the support by
/// increasing size and in lexicographic order, and for each `T` all
/// compositions of `m` into `|T|` positive parts with `z_i ≤ min(m, w_i)`.
pub struct GuessIter {
    support: Vec<(usize, u64)>,
    m: u64,
    size: usize,
    combo: Vec<usize>,
    caps: Vec<u64>,
    z: Option<Vec<u64>>,
    emitted_empty: bool,
    done: bool,
}

impl GuessIter {
    pub fn new(weights: &WeightedClientSet, m: u64) -> Self {
        let support = weights.support();
        let done = m > 0 && support.is_empty();
        Self {
            support,
            m,
            size: 0,
            combo: Vec::new(),
            caps: Vec::new(),
            z: None,
            emitted_empty: false,
            done,
        }
    }

    fn advance_combo(&mut self) -> bool {
        let n = self.support.len();
        let t = self.size;
        if t == 0 || self.combo.is_empty() {
            return false;
        }
        let mut i = t;
        while i > 0 {
            i -= 1;
            if self.combo[i] < n - t + i {
                self.combo[i] += 1;
                for j in i + 1..t {
                    self.combo[j] = self.combo[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    fn start_size(&mut self, size: usize) -> bool {
        if size == 0 || size > self.support.len() || size as u64 > self.m {
            return false;
        }
        self.size = size;
        self.combo = (0..size).collect();
        true
    }

    fn load_combo(&mut self) -> bool {
        self.caps = self
            .combo
            .iter()
            .map(|&i| self.support[i].1.min(self.m))
            .collect();
        self.z = first_composition(&self.caps, self.m);
        self.z.is_some()
    }

    fn current(&self) -> OutlierGuess {
        OutlierGuess {
            clients: self.combo.iter().map(|&i| self.support[i].0).collect(),
            amounts: self.z.clone().expect("current composition"),
        }
    }
}

impl Iterator for GuessIter {
    type Item = OutlierGuess;

    fn next(&mut self) -> Option<OutlierGuess> {
        if self.done {
            return None;
        }
        if self.m == 0 {
            self.done = true;
            return (!std::mem::replace(&mut self.emitted_empty, true)).then(OutlierGuess::empty);
        }
        if let Some(z) = self.z.as_mut() {
            if next_composition(z, &self.caps) {
                return Some(self.current());
            }
            self.z = None;
        }
        loop {
            let moved = if self.size == 0 {
                self.start_size(1)
            } else {
                self.advance_combo() || self.start_size(self.size + 1)
            };
            if !moved {
                self.done = true;
                return None;
            }
            if self.load_combo() {
                return Some(self.current());
            }
        }
    }
}

pub fn enumerate_guesses(weights: &WeightedClientSet, m: u64) -> GuessIter {
    GuessIter::new(weights, m)
}

/// `C(|W|, ≤m) · m^m`, saturating; `0^0 = 1`.
pub fn guess_bound(support_size: usize, m: u64) -> u128 {
    let subsets: u128 = (0..=m)
        .map(|t| binomial(support_size as u64, t))
        .fold(0u128, |a, b| a.saturating_add(b));
    let mut pow: u128 = 1;
    for _ in 0..m {
        pow = pow.saturating_mul(m as u128);
    }
    subsets.saturating_mul(pow)
}

/// `W_{T,z}`: weights with the guessed outlier amounts removed.
pub fn residual_weights(weights: &WeightedClientSet, guess: &OutlierGuess) -> WeightedClientSet {
    let mut out = weights.clone();
    for (&c, &z) in guess.clients.iter().zip(&guess.amounts) {
        let w = out.weight(c);
        assert!(z <= w, "guess removes {z} from client {c} of weight {w}");
        out.set(c, w - z);
    }
    out.support().into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PluginMode {
    Exact,
    LocalSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CkmSolverConfig {
    pub mode: PluginMode,
    /// Most candidate facility sets the exact plug-in will enumerate.
    pub exact_subset_limit: u128,
    pub ls_max_iterations: usize,
    /// Relative improvement a local-search swap must achieve.
    pub ls_improvement: f64,
    /// Approximation factor reported for the plug-in.
    pub gamma_declared: f64,
}

impl Default for CkmSolverConfig {
    fn default() -> Self {
        Self {
            mode: PluginMode::Exact,
            exact_subset_limit: 1_000_000,
            ls_max_iterations: 1_000,
            ls_improvement: 1e-6,
            gamma_declared: 1.0,
        }
    }
}

impl CkmSolverConfig {
    pub fn local_search() -> Self {
        Self {
            mode: PluginMode::LocalSearch,
            ..Self::default()
        }
    }
}

/// Facility sets worth trying: all `min(k, |𝓕|)`-subsets when opening is
/// free (more facilities never hurt), otherwise every subset of size at
/// most `k`. Lexicographic order within each size.
pub fn candidate_facility_sets(instance: &Instance) -> impl Iterator<Item = Vec<usize>> {
    let nf = instance.num_facilities();
    let k = instance.k.min(nf);
    let lo = if instance.has_opening_costs() { 0 } else { k };
    (lo..=k).flat_map(move |size| (0..nf).combinations(size))
}

pub fn candidate_count(instance: &Instance) -> u128 {
    let nf = instance.num_facilities() as u64;
    let k = (instance.k as u64).min(nf);
    let lo = if instance.has_opening_costs() { 0 } else { k };
    (lo..=k)
        .map(|s| binomial(nf, s))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Optimal cost of serving `support` from `open` with at most `m` units
/// dropped, including opening costs; `None` when capacity is short.
pub(crate) fn assignment_value(
    instance: &Instance,
    support: &[(usize, u64)],
    open: &[usize],
    m: u64,
) -> Result<Option<f64>> {
    let total: u64 = support.iter().map(|&(_, w)| w).sum();
    if instance.capacity_of(open) < total.saturating_sub(m) {
        return Ok(None);
    }
    let demands: Vec<u64> = support.iter().map(|&(_, w)| w).collect();
    let caps: Vec<u64> = open.iter().map(|&f| instance.capacities[f]).collect();
    let costs = CostMatrix::from_fn(support.len(), open.len(), |r, c| {
        instance.unit_cost(support[r].0, open[c])
    });
    match solve_mcfo(&caps, &demands, &costs, m) {
        Ok(r) => Ok(Some(r.cost + instance.opening_cost_of(open))),
        Err(Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn better(a: (f64, &[usize]), b: (f64, &[usize])) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Facility set chosen by a capacitated k-median plug-in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WckmResult {
    pub facilities: Vec<usize>,
    pub cost: f64,
}

/// Weighted capacitated k-median without outliers on `weights`.
pub fn solve_wckm(
    instance: &Instance,
    weights: &WeightedClientSet,
    config: &CkmSolverConfig,
) -> Result<WckmResult> {
    let support = weights.support();
    let lower = |open: &[usize]| uncapacitated_bound(instance, &support, open);
    search_facility_sets(instance, config, Some(&lower), |open| {
        assignment_value(instance, &support, open, 0)
    })
    .map_err(|e| match e {
        Error::Infeasible(_) => Error::Infeasible(format!(
            "no facility set of size at most {} can serve weight {}",
            instance.k,
            weights.total_weight()
        )),
        e => e,
    })
}

/// `Σ w(c) · min_{f∈F} d(c,f)^z` plus opening costs: the cost with
/// capacities ignored, a lower bound on any outlier-free assignment.
pub(crate) fn uncapacitated_bound(
    instance: &Instance,
    support: &[(usize, u64)],
    open: &[usize],
) -> f64 {
    let assign = compensated_sum(support.iter().map(|&(c, w)| {
        let d = open
            .iter()
            .map(|&f| instance.unit_cost(c, f))
            .fold(f64::INFINITY, f64::min);
        if w == 0 {
            0.0
        } else {
            w as f64 * d
        }
    }));
    assign + instance.opening_cost_of(open)
}

pub(crate) type LowerBound<'a> = dyn Fn(&[usize]) -> f64 + 'a;

/// Runs the configured plug-in over facility sets scored by `eval`
/// (`None` marks an infeasible set). The exact plug-in skips sets whose
/// `lower` bound already exceeds the best cost found.
pub(crate) fn search_facility_sets<E>(
    instance: &Instance,
    config: &CkmSolverConfig,
    lower: Option<&LowerBound<'_>>,
    eval: E,
) -> Result<WckmResult>
where
    E: Fn(&[usize]) -> Result<Option<f64>>,
{
    match config.mode {
        PluginMode::Exact => exact_search(instance, config, lower, eval),
        PluginMode::LocalSearch => local_search(instance, config, eval),
    }
}

fn exact_search<E>(
    instance: &Instance,
    config: &CkmSolverConfig,
    lower: Option<&LowerBound<'_>>,
    eval: E,
) -> Result<WckmResult>
where
    E: Fn(&[usize]) -> Result<Option<f64>>,
{
    let count = candidate_count(instance);
    if count > config.exact_subset_limit {
        return Err(Error::LimitExceeded(format!(
            "exact plug-in would enumerate {count} facility sets (limit {})",
            config.exact_subset_limit
        )));
    }
    let mut best: Option<WckmResult> = None;
    for open in candidate_facility_sets(instance) {
        if let (Some(b), Some(lower)) = (&best, lower) {
            if lower(&open) > b.cost * (1.0 + 1e-12) {
                continue;
            }
        }
        if let Some(cost) = eval(&open)? {
            let replace = match &best {
                None => true,
                Some(b) => better((cost, &open), (b.cost, &b.facilities)),
            };
            if replace {
                best = Some(WckmResult {
                    facilities: open,
                    cost,
                });
            }
        }
    }
    best.ok_or_else(|| Error::Infeasible("no feasible facility set".to_string()))
}

/// Single-swap local search from the `k` largest capacities; with opening
/// costs, closing a facility is also a move.
fn local_search<E>(instance: &Instance, config: &CkmSolverConfig, eval: E) -> Result<WckmResult>
where
    E: Fn(&[usize]) -> Result<Option<f64>>,
{
    let nf = instance.num_facilities();
    let k = instance.k.min(nf);
    let mut order: Vec<usize> = (0..nf).collect();
    order.sort_by(|&a, &b| {
        instance.capacities[b]
            .cmp(&instance.capacities[a])
            .then(a.cmp(&b))
    });
    let mut open: Vec<usize> = order[..k].to_vec();
    open.sort_unstable();
    let Some(mut cost) = eval(&open)? else {
        return Err(Error::Infeasible(format!(
            "local search start (the {k} largest capacities) is infeasible"
        )));
    };
    let threshold = 1.0 - config.ls_improvement;
    for _ in 0..config.ls_max_iterations {
        let mut moved = false;
        'scan: for slot in 0..open.len() {
            let mut moves: Vec<Vec<usize>> = (0..nf)
                .filter(|g| !open.contains(g))
                .map(|g| {
                    let mut trial = open.clone();
                    trial[slot] = g;
                    trial.sort_unstable();
                    trial
                })
                .collect();
            if instance.has_opening_costs() {
                let mut trial = open.clone();
                trial.remove(slot);
                moves.push(trial);
            }
            for trial in moves {
                if let Some(c) = eval(&trial)? {
                    if c < threshold * cost {
                        open = trial;
                        cost = c;
                        moved = true;
                        break 'scan;
                    }
                }
            }
        }
        if !moved {
            break;
        }
    }
    Ok(WckmResult {
        facilities: open,
        cost,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub coreset: CoresetConfig,
    pub ckm: CkmSolverConfig,
    /// Refuse runs that would enumerate more guesses than this.
    pub max_guesses: Option<u64>,
    /// Stop between guess batches once this much time has passed.
    pub timeout: Option<Duration>,
    /// Extra attempts with derived seeds; the cheapest result is kept.
    pub retries: u32,
    /// Guesses evaluated per parallel batch.
    pub batch_size: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            coreset: CoresetConfig::default(),
            ckm: CkmSolverConfig::default(),
            max_guesses: None,
            timeout: None,
            retries: 0,
            batch_size: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessRecord {
    pub clients: Vec<usize>,
    pub amounts: Vec<u64>,
    /// Facility set returned by the plug-in; absent if it found none.
    pub facilities: Option<Vec<usize>>,
    /// Plug-in cost on the residual weights.
    pub residual_cost: Option<f64>,
    /// Cost of `facilities` on the original clients.
    pub cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttemptReport {
    pub seed: u64,
    pub coreset: CoresetMeta,
    pub guess_count: u64,
    #[serde(serialize_with = "wide_count")]
    pub guess_bound: u128,
    /// `guess_count ≤ guess_bound`.
    pub within_bound: bool,
    pub guesses: Vec<GuessRecord>,
    pub best_cost: Option<f64>,
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub epsilon: f64,
    pub plugin: PluginMode,
    pub gamma_declared: f64,
    pub attempts: Vec<AttemptReport>,
    /// Index into `attempts` of the returned solution.
    pub chosen_attempt: usize,
    pub partial: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RunReport {
    /// True when every attempt stayed within the guess-count bound.
    pub fn guess_bound_respected(&self) -> bool {
        self.attempts
            .iter()
            .all(|a| a.within_bound && (a.guess_count as u128) <= a.guess_bound)
    }
}

/// A count as a JSON number when it fits in `u64`, else as a decimal string.
fn wide_count<S: serde::Serializer>(value: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    match u64::try_from(*value) {
        Ok(v) => s.serialize_u64(v),
        Err(_) => s.serialize_str(&value.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub report: RunReport,
}

pub(crate) type Plugin<'a> = dyn Fn(&OutlierGuess) -> Result<Option<WckmResult>> + Sync + 'a;
pub(crate) type Evaluator<'a> = dyn Fn(&[usize]) -> Result<Option<f64>> + Sync + 'a;

/// Outcome of evaluating one stream of guesses.
pub(crate) struct GuessRun {
    pub best: Option<(f64, Vec<usize>)>,
    pub records: Vec<GuessRecord>,
    pub partial: bool,
}

/// Solves every guess with `plugin` and scores each distinct facility set
/// once with `evaluate`, in parallel batches merged in guess order.
pub(crate) fn run_guesses(
    guesses: impl Iterator<Item = OutlierGuess>,
    plugin: &Plugin<'_>,
    evaluate: &Evaluator<'_>,
    config: &SolveConfig,
    started: Instant,
) -> Result<GuessRun> {
    let mut values: BTreeMap<Vec<usize>, Option<f64>> = BTreeMap::new();
    let mut records = Vec::new();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut partial = false;
    let mut guesses = guesses.peekable();
    while guesses.peek().is_some() {
        if let Some(limit) = config.timeout {
            if started.elapsed() >= limit {
                partial = true;
                break;
            }
        }
        let batch: Vec<OutlierGuess> = guesses.by_ref().take(config.batch_size.max(1)).collect();
        let solved: Vec<Result<Option<WckmResult>>> = batch
            .par_iter()
            .map(|g| match plugin(g) {
                Err(Error::Infeasible(_)) => Ok(None),
                r => r,
            })
            .collect();
        let solved: Vec<Option<WckmResult>> = solved.into_iter().collect::<Result<_>>()?;
        let fresh: Vec<Vec<usize>> = solved
            .iter()
            .flatten()
            .map(|r| r.facilities.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .filter(|f| !values.contains_key(f))
            .collect();
        let scored: Vec<Result<Option<f64>>> = fresh.par_iter().map(|f| evaluate(f)).collect();
        for (f, v) in fresh.into_iter().zip(scored) {
            values.insert(f, v?);
        }
        for (g, r) in batch.into_iter().zip(solved) {
            let cost = r.as_ref().and_then(|r| values[&r.facilities]);
            if let (Some(r), Some(c)) = (&r, cost) {
                let replace = match &best {
                    None => true,
                    Some((bc, bf)) => better((c, &r.facilities), (*bc, bf)),
                };
                if replace {
                    best = Some((c, r.facilities.clone()));
                }
            }
            records.push(GuessRecord {
                clients: g.clients,
                amounts: g.amounts,
                residual_cost: r.as_ref().map(|r| r.cost),
                facilities: r.map(|r| r.facilities),
                cost,
            });
        }
    }
    Ok(GuessRun {
        best,
        records,
        partial,
    })
}

pub(crate) fn check_guess_limit(count: u64, config: &SolveConfig) -> Result<()> {
    match config.max_guesses {
        Some(limit) if count > limit => Err(Error::LimitExceeded(format!(
            "{count} outlier guesses exceed the limit of {limit}"
        ))),
        _ => Ok(()),
    }
}

fn run_attempt(
    instance: &Instance,
    epsilon: f64,
    config: &SolveConfig,
    seed: u64,
    started: Instant,
) -> Result<(Option<Vec<usize>>, AttemptReport)> {
    let coreset = build_coreset(instance, epsilon, &config.coreset, seed)?;
    let weights = &coreset.weights;
    let m = instance.m;
    let bound = guess_bound(weights.support().len(), m);
    let count = enumerate_guesses(weights, m).count() as u64;
    check_guess_limit(count, config)?;
    let support = instance.unit_weights().support();
    let plugin = |g: &OutlierGuess| {
        solve_wckm(instance, &residual_weights(weights, g), &config.ckm).map(Some)
    };
    let evaluate = |f: &[usize]| assignment_value(instance, &support, f, m);
    let run = run_guesses(
        enumerate_guesses(weights, m),
        &plugin,
        &evaluate,
        config,
        started,
    )?;
    let report = AttemptReport {
        seed,
        coreset: coreset.meta,
        guess_count: count,
        guess_bound: bound,
        within_bound: count as u128 <= bound,
        guesses: run.records,
        best_cost: run.best.as_ref().map(|b| b.0),
        partial: run.partial,
    };
    Ok((run.best.map(|b| b.1), report))
}

/// Runs `attempt` with the base seed and then with derived seeds, keeping
/// the cheapest facility set.
pub(crate) fn run_attempts<A>(
    config: &SolveConfig,
    seed: u64,
    mut attempt: A,
) -> Result<(Vec<usize>, Vec<AttemptReport>, usize)>
where
    A: FnMut(u64) -> Result<(Option<Vec<usize>>, AttemptReport)>,
{
    let mut attempts = Vec::new();
    let mut best: Option<(f64, Vec<usize>, usize)> = None;
    for i in 0..=config.retries {
        let attempt_seed = if i == 0 {
            seed
        } else {
            derive_seed(seed, &[tag::RETRY, i as u64])
        };
        let (facilities, report) = attempt(attempt_seed)?;
        if let (Some(f), Some(c)) = (facilities, report.best_cost) {
            let replace = match &best {
                None => true,
                Some((bc, bf, _)) => better((c, &f), (*bc, bf)),
            };
            if replace {
                best = Some((c, f, i as usize));
            }
        }
        let stop = report.partial;
        attempts.push(report);
        if stop {
            break;
        }
    }
    let partial = attempts.iter().any(|a| a.partial);
    match best {
        Some((_, f, chosen)) => Ok((f, attempts, chosen)),
        None if partial => Err(Error::Infeasible(
            "timed out before any feasible facility set was found".to_string(),
        )),
        None => Err(Error::Infeasible(
            "no outlier guess led to a feasible facility set".to_string(),
        )),
    }
}

/// Coreset, guess enumeration, plug-in solve, and exact re-evaluation on
/// the original clients. Attempt `i > 0` uses a seed derived from `seed`.
pub fn solve_ckmo(
    instance: &Instance,
    epsilon: f64,
    config: &SolveConfig,
    seed: u64,
) -> Result<SolveOutcome> {
    instance.validate()?;
    let started = Instant::now();
    let (facilities, attempts, chosen) = run_attempts(config, seed, |attempt_seed| {
        run_attempt(instance, epsilon, config, attempt_seed, started)
    })?;
    let partial = attempts.iter().any(|a| a.partial);
    let solution = cost_m(instance, &facilities, instance.m)?
        .ok_or_else(|| Error::Infeasible("chosen facility set lost feasibility".to_string()))?;
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

/// Exact optimum by trying every candidate facility set with an optimal
/// outlier-aware assignment.
pub fn brute_force_ckmo(instance: &Instance, subset_limit: u128) -> Result<Solution> {
    instance.validate()?;
    let count = candidate_count(instance);
    if count > subset_limit {
        return Err(Error::LimitExceeded(format!(
            "brute force would enumerate {count} facility sets (limit {subset_limit})"
        )));
    }
    let support = instance.unit_weights().support();
    let sets: Vec<Vec<usize>> = candidate_facility_sets(instance).collect();
    let values: Vec<Result<Option<f64>>> = sets
        .par_iter()
        .map(|f| assignment_value(instance, &support, f, instance.m))
        .collect();
    let mut best: Option<(f64, &Vec<usize>)> = None;
    for (f, v) in sets.iter().zip(values) {
        if let Some(c) = v? {
            if best.is_none_or(|(bc, bf)| better((c, f), (bc, bf))) {
                best = Some((c, f));
            }
        }
    }
    let (_, open) =
        best.ok_or_else(|| Error::Infeasible("no feasible facility set".to_string()))?;
    cost_m(instance, open, instance.m)?
        .ok_or_else(|| Error::Infeasible("no feasible facility set".to_string()))
}

/// Extracts `(T, z)` from a weighted solution's outlier amounts.
pub fn guess_from_solution(solution: &Solution) -> OutlierGuess {
    OutlierGuess {
        clients: solution.outliers.keys().copied().collect(),
        amounts: solution.outliers.values().copied().collect(),
    }
}

/// Total cost of serving `weights` from `open`, for reporting.
pub fn weighted_cost(
    instance: &Instance,
    weights: &WeightedClientSet,
    open: &[usize],
    m: u64,
) -> Result<Option<f64>> {
    assignment_value(instance, &weights.support(), open, m)
}
