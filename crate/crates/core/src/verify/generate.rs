//! Seeded random instances and flow networks.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fair::FairnessSpec;
use crate::flow::FlowNetwork;
use crate::model::{Instance, MetricSpace};
use crate::rng::{substream, tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityMode {
    /// Every facility gets the same capacity.
    Uniform,
    /// Random capacities; the `k` largest are fixed to the target total.
    Heterogeneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub num_facilities: usize,
    /// Dimension of the ambient space.
    pub dim: usize,
    pub k: usize,
    pub m: u64,
    /// Number of planted clusters; 0 draws clients uniformly.
    pub clusters: usize,
    /// Half-width of the box around each planted center.
    pub spread: f64,
    /// Place the `m` last clients far away from the unit square.
    pub planted_outliers: bool,
    pub capacity: CapacityMode,
    /// Largest allowed `Σ top-k capacities − (n − m)`.
    pub max_margin: u64,
}

impl GeneratorParams {
    pub fn new(n: usize, num_facilities: usize, k: usize, m: u64) -> Self {
        Self {
            n,
            num_facilities,
            dim: 2,
            k,
            m,
            clusters: k,
            spread: 0.1,
            planted_outliers: true,
            capacity: CapacityMode::Uniform,
            max_margin: 2,
        }
    }
}

/// Clients are points `0..n`, facilities are points `n..n+|𝓕|` in
/// `dim`-dimensional space. Capacities are tight: the `k` largest sum to
/// `n − m + margin` with `margin ≤ max_margin`.
pub fn generate_instance(params: &GeneratorParams, seed: u64) -> Instance {
    let mut rng = substream(seed, &[tag::GENERATOR]);
    let n = params.n;
    let dim = params.dim.max(1);
    let centers: Vec<Vec<f64>> = (0..params.clusters)
        .map(|_| (0..dim).map(|_| rng.gen()).collect())
        .collect();
    let planted = if params.planted_outliers {
        params.m as usize
    } else {
        0
    };
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + params.num_facilities);
    for c in 0..n {
        if c + planted >= n {
            // A random direction, 3 to 5 units from the middle of the cube.
            let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            let r = 3.0 + 2.0 * rng.gen::<f64>();
            points.push(dir.iter().map(|x| 0.5 + r * x / norm).collect());
        } else if centers.is_empty() {
            points.push((0..dim).map(|_| rng.gen()).collect());
        } else {
            let center = &centers[rng.gen_range(0..centers.len())];
            let s = params.spread;
            points.push(center.iter().map(|x| x + rng.gen_range(-s..=s)).collect());
        }
    }
    for _ in 0..params.num_facilities {
        points.push((0..dim).map(|_| rng.gen()).collect());
    }
    let capacities = tight_capacities(params, &mut rng);
    Instance::new(
        MetricSpace::Points(points),
        (0..n).collect(),
        (n..n + params.num_facilities).collect(),
        capacities,
        params.k,
        params.m,
    )
}

fn tight_capacities<R: Rng>(params: &GeneratorParams, rng: &mut R) -> Vec<u64> {
    let nf = params.num_facilities;
    let k = params.k.min(nf).max(1);
    let need = (params.n as u64).saturating_sub(params.m);
    match params.capacity {
        CapacityMode::Uniform => {
            // The smallest uniform capacity that is feasible, bumped while
            // the margin allows.
            let mut u = need.div_ceil(k as u64).max(1);
            while (u + 1) * k as u64 - need <= params.max_margin && rng.gen_bool(0.5) {
                u += 1;
            }
            vec![u; nf]
        }
        CapacityMode::Heterogeneous => {
            let target = need + rng.gen_range(0..=params.max_margin);
            // Split the target over k facilities, each at least 1.
            let mut cuts: Vec<u64> = (0..k - 1).map(|_| rng.gen_range(0..=target)).collect();
            cuts.sort_unstable();
            let mut top = Vec::with_capacity(k);
            let mut prev = 0;
            for &c in cuts.iter().chain(std::iter::once(&target)) {
                top.push(c - prev);
                prev = c;
            }
            for u in top.iter_mut() {
                *u = (*u).max(1);
            }
            let smallest = *top.iter().min().unwrap_or(&1);
            let mut caps = top;
            caps.extend((k..nf).map(|_| rng.gen_range(1..=smallest.max(1))));
            caps.shuffle(rng);
            caps
        }
    }
}

/// A random metric on `size` points with integer distances: shortest paths
/// over random integer edge weights in `1..=max_weight`.
pub fn integer_metric<R: Rng>(size: usize, max_weight: u32, rng: &mut R) -> MetricSpace {
    let mut d = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in i + 1..size {
            let w = rng.gen_range(1..=max_weight) as f64;
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for via in 0..size {
        for i in 0..size {
            for j in 0..size {
                let alt = d[i][via] + d[via][j];
                if alt < d[i][j] {
                    d[i][j] = alt;
                }
            }
        }
    }
    MetricSpace::Matrix(d)
}

/// A tiny instance on an integer metric with generous capacities drawn in
/// `1..=max_capacity`, adjusted so the instance is feasible.
pub fn tiny_instance(
    n: usize,
    num_facilities: usize,
    k: usize,
    m: u64,
    max_capacity: u64,
    seed: u64,
) -> Instance {
    let mut rng = substream(seed, &[tag::GENERATOR]);
    let metric = integer_metric(n + num_facilities, 9, &mut rng);
    let mut caps: Vec<u64> = (0..num_facilities)
        .map(|_| rng.gen_range(1..=max_capacity))
        .collect();
    let need = (n as u64).saturating_sub(m);
    let k_eff = k.min(num_facilities);
    loop {
        let mut sorted = caps.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if sorted.iter().take(k_eff).sum::<u64>() >= need {
            break;
        }
        let i = rng.gen_range(0..num_facilities);
        caps[i] += 1;
    }
    Instance::new(
        metric,
        (0..n).collect(),
        (n..n + num_facilities).collect(),
        caps,
        k,
        m,
    )
}

/// Random groups, shares and per-group budgets for `instance`, with
/// `β_g ≤ 1/ℓ ≤ α_g` so that balanced clusters stay admissible.
pub fn random_fairness<R: Rng>(instance: &Instance, groups: usize, rng: &mut R) -> FairnessSpec {
    let n = instance.n();
    let mut group_of: Vec<usize> = (0..n).map(|c| c % groups).collect();
    group_of.shuffle(rng);
    let shares = [
        Ratio::new(0, 1),
        Ratio::new(0, 1),
        Ratio::new(1, 4),
        Ratio::new(1, 3),
        Ratio::new(1, 2),
    ];
    let uppers = [
        Ratio::new(1, 2),
        Ratio::new(2, 3),
        Ratio::new(3, 4),
        Ratio::new(1, 1),
        Ratio::new(1, 1),
    ];
    let mut beta = Vec::new();
    let mut alpha = Vec::new();
    let even = Ratio::new(1u64, groups as u64);
    for _ in 0..groups {
        beta.push(
            *shares
                .iter()
                .filter(|&&b| b <= even)
                .copied()
                .collect::<Vec<_>>()
                .choose(rng)
                .unwrap(),
        );
        alpha.push(
            *uppers
                .iter()
                .filter(|&&a| a >= even)
                .copied()
                .collect::<Vec<_>>()
                .choose(rng)
                .unwrap(),
        );
    }
    let mut m_vec = vec![0u64; groups];
    for _ in 0..instance.m {
        let candidates: Vec<usize> = (0..groups)
            .filter(|&g| m_vec[g] < group_of.iter().filter(|&&h| h == g).count() as u64)
            .collect();
        m_vec[*candidates.choose(rng).expect("budget fits")] += 1;
    }
    FairnessSpec {
        group_of,
        alpha,
        beta,
        m_vec,
    }
}

/// A random network on at most `max_nodes` nodes whose arcs all have
/// capacities in `1..=max_capacity` and integer costs in `0..=9`. Demands
/// are balanced so that a feasible flow usually exists.
pub fn random_network<R: Rng>(
    max_nodes: usize,
    max_arcs: usize,
    max_capacity: u64,
    rng: &mut R,
) -> FlowNetwork {
    let n = rng.gen_range(2..=max_nodes.max(2));
    let mut net = FlowNetwork::new();
    let mut demands = vec![0i64; n];
    let units = rng.gen_range(1..=3);
    for _ in 0..units {
        let s = rng.gen_range(0..n);
        let t = (s + rng.gen_range(1..n)) % n;
        demands[s] += 1;
        demands[t] -= 1;
    }
    for &d in &demands {
        // Some receivers only offer optional sink capacity.
        if d < 0 && rng.gen_bool(0.3) {
            net.add_node(0, d.unsigned_abs() + rng.gen_range(0..=1));
        } else {
            net.add_node(d, rng.gen_range(0..=1) * u64::from(rng.gen_bool(0.2)));
        }
    }
    let arcs = rng.gen_range(1..=max_arcs);
    for _ in 0..arcs {
        let from = rng.gen_range(0..n);
        let to = (from + rng.gen_range(1..n)) % n;
        let cost = rng.gen_range(0..=9) as f64;
        net.add_arc(from, to, cost, Some(rng.gen_range(1..=max_capacity)));
    }
    net
}
