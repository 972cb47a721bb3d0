//! Ring-sampling coreset construction.
//!
//! A constant-factor `(k+m)`-median solution on the instance with a
//! facility co-located at every client seeds the construction. Each seed
//! cluster is cut into geometric rings around its center, and rings larger
//! than the sample size `s` are replaced by `s` uniformly sampled clients
//! carrying the ring's total weight.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, WeightedClientSet};
use crate::numeric::{compensated_sum, power};
use crate::rng::{substream, tag};

/// Above this many client x candidate pairs the seed search computes
/// distances on demand instead of caching them.
pub const DEFAULT_TABLE_LIMIT: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetConfig {
    /// Constant `a` in the sample size.
    pub a: f64,
    /// Approximation factor assumed for the seed solution.
    pub zeta: f64,
    /// Force the per-ring sample size.
    pub s_override: Option<usize>,
    /// Upper clamp on the per-ring sample size.
    pub s_max: Option<usize>,
    pub seed_search: SeedSearchConfig,
}

impl Default for CoresetConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            zeta: 5.0,
            s_override: None,
            s_max: None,
            seed_search: SeedSearchConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSearchConfig {
    pub max_swaps: usize,
    pub table_limit: usize,
}

impl Default for SeedSearchConfig {
    fn default() -> Self {
        Self {
            max_swaps: 10_000,
            table_limit: DEFAULT_TABLE_LIMIT,
        }
    }
}

/// Uncapacitated `(k+m)`-median solution over candidates `𝓕 ∪ C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSolution {
    /// Open centers as metric point indices, ascending.
    pub centers: Vec<usize>,
    /// Position in `centers` for every client.
    pub cluster_of: Vec<usize>,
    pub seed_cost: f64,
    pub zeta: f64,
}

impl SeedSolution {
    /// Recomputes `Σ_c d(c, center(c))^z`.
    pub fn recompute_cost(&self, instance: &Instance) -> f64 {
        compensated_sum(self.cluster_of.iter().enumerate().map(|(c, &i)| {
            power(
                instance
                    .metric
                    .distance(instance.clients[c], self.centers[i]),
                instance.z,
            )
        }))
    }
}

enum SeedCosts<'a> {
    Table {
        cols: usize,
        data: Vec<f64>,
    },
    OnDemand {
        instance: &'a Instance,
        candidates: &'a [usize],
    },
}

impl SeedCosts<'_> {
    #[inline]
    fn get(&self, client: usize, cand: usize) -> f64 {
        match self {
            SeedCosts::Table { cols, data } => data[client * cols + cand],
            SeedCosts::OnDemand {
                instance,
                candidates,
            } => power(
                instance
                    .metric
                    .distance(instance.clients[client], candidates[cand]),
                instance.z,
            ),
        }
    }
}

/// Local search with single swaps for `(k+m)`-median on `𝓕 ∪ C`, started
/// from a greedy farthest-point selection. A swap is taken only when it
/// improves the cost by a factor `1 − 1/(10(k+m))`.
pub fn seed_solution(instance: &Instance, zeta: f64, config: &SeedSearchConfig) -> SeedSolution {
    let n = instance.n();
    let mut candidates: Vec<usize> = instance
        .facilities
        .iter()
        .chain(&instance.clients)
        .copied()
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    let p = (instance.k + instance.m as usize).max(1);

    if n == 0 {
        return SeedSolution {
            centers: Vec::new(),
            cluster_of: Vec::new(),
            seed_cost: 0.0,
            zeta,
        };
    }
    if n <= p {
        let mut centers = instance.clients.clone();
        centers.sort_unstable();
        let cluster_of = instance
            .clients
            .iter()
            .map(|c| centers.binary_search(c).expect("client is a center"))
            .collect();
        return SeedSolution {
            centers,
            cluster_of,
            seed_cost: 0.0,
            zeta,
        };
    }

    let cols = candidates.len();
    let costs = if n.saturating_mul(cols) <= config.table_limit {
        let mut data = Vec::with_capacity(n * cols);
        for &c in &instance.clients {
            for &q in &candidates {
                data.push(power(instance.metric.distance(c, q), instance.z));
            }
        }
        SeedCosts::Table { cols, data }
    } else {
        SeedCosts::OnDemand {
            instance,
            candidates: &candidates,
        }
    };
    let cand_of_point = |pt: usize| candidates.binary_search(&pt).expect("candidate point");

    // Greedy start: best single median, then farthest clients.
    let first = (0..cols)
        .map(|q| (compensated_sum((0..n).map(|c| costs.get(c, q))), q))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, q)| q)
        .unwrap_or(0);
    let mut open = vec![first];
    let mut nearest: Vec<f64> = (0..n).map(|c| costs.get(c, first)).collect();
    while open.len() < p {
        let (far, d) =
            nearest.iter().enumerate().fold(
                (0, -1.0),
                |best, (c, &d)| if d > best.1 { (c, d) } else { best },
            );
        if d <= 0.0 {
            break;
        }
        let q = cand_of_point(instance.clients[far]);
        open.push(q);
        for (c, best) in nearest.iter_mut().enumerate() {
            *best = best.min(costs.get(c, q));
        }
    }

    let total = |open: &[usize]| -> f64 {
        compensated_sum((0..n).map(|c| {
            open.iter()
                .map(|&q| costs.get(c, q))
                .fold(f64::INFINITY, f64::min)
        }))
    };
    let mut current = total(&open);
    let factor = 1.0 - 1.0 / (10.0 * p as f64);
    let mut swaps = 0;
    'search: while current > 0.0 && swaps < config.max_swaps {
        // Nearest and second-nearest open center per client.
        let mut best1 = vec![(f64::INFINITY, usize::MAX); n];
        let mut best2 = vec![f64::INFINITY; n];
        for c in 0..n {
            for (slot, &q) in open.iter().enumerate() {
                let d = costs.get(c, q);
                if d < best1[c].0 {
                    best2[c] = best1[c].0;
                    best1[c] = (d, slot);
                } else if d < best2[c] {
                    best2[c] = d;
                }
            }
        }
        for slot in 0..open.len() {
            for q in 0..cols {
                if open.contains(&q) {
                    continue;
                }
                let candidate = compensated_sum((0..n).map(|c| {
                    let kept = if best1[c].1 == slot {
                        best2[c]
                    } else {
                        best1[c].0
                    };
                    kept.min(costs.get(c, q))
                }));
                if candidate < factor * current {
                    open[slot] = q;
                    current = total(&open);
                    swaps += 1;
                    continue 'search;
                }
            }
        }
        break;
    }

    let mut centers: Vec<usize> = open.iter().map(|&q| candidates[q]).collect();
    centers.sort_unstable();
    let cluster_of: Vec<usize> = (0..n)
        .map(|c| {
            let mut best = (f64::INFINITY, 0);
            for (i, &pt) in centers.iter().enumerate() {
                let d = costs.get(c, cand_of_point(pt));
                if d < best.0 {
                    best = (d, i);
                }
            }
            best.1
        })
        .collect();
    let mut seed = SeedSolution {
        centers,
        cluster_of,
        seed_cost: 0.0,
        zeta,
    };
    seed.seed_cost = seed.recompute_cost(instance);
    seed
}

/// Clients of one seed cluster at a given distance level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    /// Center as a metric point index.
    pub center: usize,
    /// Position of the center in [`SeedSolution::centers`].
    pub cluster: usize,
    pub level: u32,
    /// `2^level · R` (0 in the degenerate zero-cost case).
    pub radius: f64,
    /// Member client indices, ascending.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingPartition {
    /// Base radius `R`.
    pub base_radius: f64,
    /// Highest level `ψ`.
    pub max_level: u32,
    /// Nonempty rings ordered by (cluster, level).
    pub rings: Vec<Ring>,
}

/// Level of a client at distance `d` from its center: 0 inside the closed
/// ball of radius `R`, otherwise the smallest `j` with `d ≤ 2^j R`.
pub fn ring_level(d: f64, base_radius: f64, max_level: u32) -> u32 {
    let mut j = 0;
    let mut radius = base_radius;
    while d > radius && j < max_level {
        j += 1;
        radius *= 2.0;
    }
    j
}

/// Cuts every seed cluster into rings.
///
/// `R = (cost_0 / (ζ n))^{1/z}` and `ψ = ⌈log₂(ζ n)⌉`, so every client lies
/// within `2^ψ R` of its center. A zero-cost seed yields one level-0 ring of
/// radius 0 per cluster.
pub fn build_rings(instance: &Instance, seed: &SeedSolution) -> RingPartition {
    let n = instance.n();
    let k = seed.centers.len();
    let mut buckets: Vec<Vec<Vec<usize>>> = vec![Vec::new(); k];
    let (base_radius, max_level) = if seed.seed_cost > 0.0 {
        let scale = seed.zeta * n as f64;
        let r = (seed.seed_cost / scale).powf(1.0 / instance.z);
        (r, scale.log2().ceil().max(0.0) as u32)
    } else {
        (0.0, 0)
    };
    for (c, &cluster) in seed.cluster_of.iter().enumerate() {
        let level = if seed.seed_cost > 0.0 {
            let d = instance
                .metric
                .distance(instance.clients[c], seed.centers[cluster]);
            ring_level(d, base_radius, max_level)
        } else {
            0
        } as usize;
        let levels = &mut buckets[cluster];
        if levels.len() <= level {
            levels.resize(level + 1, Vec::new());
        }
        levels[level].push(c);
    }
    let mut rings = Vec::new();
    for (cluster, levels) in buckets.into_iter().enumerate() {
        for (level, members) in levels.into_iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            rings.push(Ring {
                center: seed.centers[cluster],
                cluster,
                level: level as u32,
                radius: base_radius * 2f64.powi(level as i32),
                members,
            });
        }
    }
    RingPartition {
        base_radius,
        max_level,
        rings,
    }
}

/// Sampled ring members with the nominal weight `population / picks.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSample {
    /// Chosen clients in sampling order.
    pub picks: Vec<usize>,
    /// Ring size `N`.
    pub population: u64,
}

impl RingSample {
    /// Nominal weight as `(numerator, denominator)`.
    pub fn nominal_weight(&self) -> (u64, u64) {
        (self.population, self.picks.len() as u64)
    }
}

/// Keeps the whole ring when it has at most `s` members, otherwise draws
/// `s` distinct members uniformly (partial Fisher–Yates over the members in
/// ascending client order).
pub fn sample_ring<R: Rng + ?Sized>(members: &[usize], s: usize, rng: &mut R) -> RingSample {
    let mut pool = members.to_vec();
    pool.sort_unstable();
    let population = pool.len() as u64;
    if pool.len() <= s {
        return RingSample {
            picks: pool,
            population,
        };
    }
    for i in 0..s {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(s);
    RingSample {
        picks: pool,
        population,
    }
}

/// Rounds nominal weights `N/s` down and hands the remainder `N mod s` out
/// as +1 to the earliest picks, preserving the ring total exactly.
pub fn integralize(sample: &RingSample) -> WeightedClientSet {
    let s = sample.picks.len() as u64;
    let mut out = WeightedClientSet::new();
    if s == 0 {
        return out;
    }
    let base = sample.population / s;
    let extra = sample.population % s;
    for (i, &c) in sample.picks.iter().enumerate() {
        out.add(c, base + u64::from((i as u64) < extra));
    }
    out
}

/// Per-ring census entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingCensus {
    pub center: usize,
    pub level: u32,
    pub radius: f64,
    pub population: u64,
    pub sampled: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetMeta {
    pub epsilon: f64,
    pub a: f64,
    pub zeta: f64,
    /// `a ζ² / ε³ · (m + k ln n)`.
    pub s_nominal: f64,
    pub s_effective: usize,
    pub base_radius: f64,
    pub max_level: u32,
    pub seed_cost: f64,
    pub seed_centers: Vec<usize>,
    pub rng_seed: u64,
    pub support_size: usize,
    pub total_weight: u64,
    pub rings: Vec<RingCensus>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coreset {
    pub weights: WeightedClientSet,
    pub meta: CoresetMeta,
}

impl Coreset {
    /// True when no ring was subsampled, so `W` is `C` with unit weights.
    pub fn is_exact(&self) -> bool {
        self.meta.rings.iter().all(|r| r.population == r.sampled)
    }
}

/// `s = a ζ² / ε³ · (m + k ln n)`.
pub fn nominal_sample_size(instance: &Instance, epsilon: f64, config: &CoresetConfig) -> f64 {
    let n = instance.n().max(1) as f64;
    config.a * config.zeta * config.zeta / epsilon.powi(3)
        * (instance.m as f64 + instance.k as f64 * n.ln())
}

/// Effective sample size: the override if set, else `⌈s⌉` clamped to
/// `[1, min(n, s_max)]`.
pub fn effective_sample_size(instance: &Instance, epsilon: f64, config: &CoresetConfig) -> usize {
    if let Some(s) = config.s_override {
        return s.max(1);
    }
    let nominal = nominal_sample_size(instance, epsilon, config).ceil();
    let mut s = if nominal >= usize::MAX as f64 {
        usize::MAX
    } else {
        nominal as usize
    };
    s = s.min(instance.n());
    if let Some(max) = config.s_max {
        s = s.min(max);
    }
    s.max(1)
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )))
    }
}

/// Seed, rings, per-ring sampling and integralization. The returned weight
/// set has total weight exactly `n`.
pub fn build_coreset(
    instance: &Instance,
    epsilon: f64,
    config: &CoresetConfig,
    rng_seed: u64,
) -> Result<Coreset> {
    build_coreset_with(instance, epsilon, config, rng_seed, None)
}

/// As [`build_coreset`], optionally sampling each ring separately per
/// group label (`group_of[c]` for client `c`).
pub(crate) fn build_coreset_with(
    instance: &Instance,
    epsilon: f64,
    config: &CoresetConfig,
    rng_seed: u64,
    group_of: Option<&[usize]>,
) -> Result<Coreset> {
    check_epsilon(epsilon)?;
    let seed = seed_solution(instance, config.zeta, &config.seed_search);
    let partition = build_rings(instance, &seed);
    let s = effective_sample_size(instance, epsilon, config);

    let mut weights = WeightedClientSet::new();
    let mut census = Vec::new();
    for ring in &partition.rings {
        let strata: Vec<(Option<usize>, Vec<usize>)> = match group_of {
            None => vec![(None, ring.members.clone())],
            Some(groups) => {
                let mut by_group: std::collections::BTreeMap<usize, Vec<usize>> =
                    std::collections::BTreeMap::new();
                for &c in &ring.members {
                    by_group.entry(groups[c]).or_default().push(c);
                }
                by_group.into_iter().map(|(g, m)| (Some(g), m)).collect()
            }
        };
        for (group, members) in strata {
            let mut tags = vec![
                tag::CORESET,
                tag::RING,
                ring.center as u64,
                ring.level as u64,
            ];
            if let Some(g) = group {
                tags.push(g as u64);
            }
            let mut rng = substream(rng_seed, &tags);
            let sample = sample_ring(&members, s, &mut rng);
            let part = integralize(&sample);
            census.push(RingCensus {
                center: ring.center,
                level: ring.level,
                radius: ring.radius,
                population: sample.population,
                sampled: sample.picks.len() as u64,
                group,
            });
            weights.extend(&part);
        }
    }
    let meta = CoresetMeta {
        epsilon,
        a: config.a,
        zeta: config.zeta,
        s_nominal: nominal_sample_size(instance, epsilon, config),
        s_effective: s,
        base_radius: partition.base_radius,
        max_level: partition.max_level,
        seed_cost: seed.seed_cost,
        seed_centers: seed.centers.clone(),
        rng_seed,
        support_size: weights.support().len(),
        total_weight: weights.total_weight(),
        rings: census,
    };
    Ok(Coreset { weights, meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MetricSpace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line_instance(xs: &[f64], facilities: &[f64], k: usize, m: u64) -> Instance {
        let mut pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        pts.extend(facilities.iter().map(|&x| vec![x]));
        let n = xs.len();
        let fac: Vec<usize> = (n..n + facilities.len()).collect();
        let caps = vec![n as u64; fac.len()];
        Instance::new(MetricSpace::Points(pts), (0..n).collect(), fac, caps, k, m)
    }

    #[test]
    fn few_clients_get_colocated_seeds() {
        let inst = line_instance(&[0.0, 3.0, 8.0], &[1.0], 2, 1);
        let seed = seed_solution(&inst, 5.0, &SeedSearchConfig::default());
        assert_eq!(seed.seed_cost, 0.0);
        assert_eq!(seed.centers, vec![0, 1, 2]);
    }

    #[test]
    fn single_median_on_a_line() {
        // k + m = 1, clients {0, 2, 10}: the optimum opens at 2 for cost 10.
        let inst = line_instance(&[0.0, 2.0, 10.0], &[], 1, 0);
        let seed = seed_solution(&inst, 5.0, &SeedSearchConfig::default());
        assert!(seed.seed_cost <= 5.0 * 10.0);
        assert_eq!(seed.seed_cost, 10.0);
        assert_eq!(seed.centers, vec![1]);
    }

    #[test]
    fn ring_boundaries_are_closed() {
        assert_eq!(ring_level(0.0, 1.0, 5), 0);
        assert_eq!(ring_level(1.0, 1.0, 5), 0);
        assert_eq!(ring_level(1.0 + 1e-12, 1.0, 5), 1);
        assert_eq!(ring_level(2.0, 1.0, 5), 1);
        assert_eq!(ring_level(2.0 + 1e-12, 1.0, 5), 2);
        assert_eq!(ring_level(1e9, 1.0, 5), 5);
    }

    #[test]
    fn small_rings_pass_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sample = sample_ring(&[5, 2, 9], 5, &mut rng);
        assert_eq!(sample.picks, vec![2, 5, 9]);
        let w = integralize(&sample);
        assert_eq!(w.support(), vec![(2, 1), (5, 1), (9, 1)]);
    }

    #[test]
    fn exact_division_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let members: Vec<usize> = (0..10).collect();
        let sample = sample_ring(&members, 5, &mut rng);
        let mut picks = sample.picks.clone();
        picks.sort_unstable();
        picks.dedup();
        assert_eq!(picks.len(), 5);
        assert_eq!(sample.nominal_weight(), (10, 5));
        let w = integralize(&sample);
        assert!(w.iter().all(|(_, x)| x == 2));
        assert_eq!(w.total_weight(), 10);
    }

    #[test]
    fn remainder_goes_to_earliest_picks() {
        let sample = RingSample {
            picks: vec![7, 3, 4, 1, 0],
            population: 11,
        };
        let w = integralize(&sample);
        assert_eq!(w.weight(7), 3);
        for c in [3, 4, 1, 0] {
            assert_eq!(w.weight(c), 2);
        }
        assert_eq!(w.total_weight(), 11);
    }

    #[test]
    fn zero_cost_seed_gives_single_rings() {
        let inst = line_instance(&[0.0, 0.0, 5.0], &[0.0], 1, 1);
        // Three clients, two centers needed; clients 0 and 1 coincide.
        let seed = seed_solution(&inst, 5.0, &SeedSearchConfig::default());
        assert_eq!(seed.seed_cost, 0.0);
        let rings = build_rings(&inst, &seed);
        assert!(rings.rings.iter().all(|r| r.level == 0 && r.radius == 0.0));
        let total: usize = rings.rings.iter().map(|r| r.members.len()).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn epsilon_is_checked() {
        let inst = line_instance(&[0.0, 1.0], &[0.5], 1, 0);
        assert!(build_coreset(&inst, 1.0, &CoresetConfig::default(), 0).is_err());
        assert!(build_coreset(&inst, 0.0, &CoresetConfig::default(), 0).is_err());
    }
}
