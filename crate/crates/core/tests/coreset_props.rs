use std::collections::BTreeMap;

use proptest::prelude::*;

use ckmo::coreset::{build_coreset, build_rings, sample_ring, seed_solution, CoresetConfig};
use ckmo::flow::{cost_m, wcost_m};
use ckmo::rng::substream;
use ckmo::verify::generate::{generate_instance, GeneratorParams};

fn params(n: usize, dim: usize) -> GeneratorParams {
    let mut p = GeneratorParams::new(n, 5, 2, 2);
    p.dim = dim;
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rings_partition_the_clients(seed in any::<u64>(), n in 3usize..40, dim in 1usize..5) {
        let inst = generate_instance(&params(n, dim), seed);
        let seed_sol = seed_solution(&inst, 5.0, &Default::default());
        let rings = build_rings(&inst, &seed_sol);
        let mut seen = vec![0; n];
        for ring in &rings.rings {
            for &c in &ring.members {
                seen[c] += 1;
                prop_assert_eq!(seed_sol.cluster_of[c], ring.cluster);
                let d = inst.metric.distance(inst.clients[c], ring.center);
                prop_assert!(d <= ring.radius * (1.0 + 1e-12), "client {} at {} outside ring radius {}", c, d, ring.radius);
            }
        }
        prop_assert!(seen.iter().all(|&s| s == 1));
    }

    #[test]
    fn weight_is_conserved_per_ring_and_overall(
        seed in any::<u64>(),
        n in 3usize..50,
        s in 1usize..6,
    ) {
        let inst = generate_instance(&params(n, 3), seed);
        let config = CoresetConfig { s_override: Some(s), ..CoresetConfig::default() };
        let coreset = build_coreset(&inst, 0.5, &config, seed).unwrap();
        prop_assert_eq!(coreset.weights.total_weight(), n as u64);
        prop_assert_eq!(coreset.meta.total_weight, n as u64);
        let seed_sol = seed_solution(&inst, 5.0, &Default::default());
        let rings = build_rings(&inst, &seed_sol);
        prop_assert_eq!(rings.rings.len(), coreset.meta.rings.len());
        for ring in &rings.rings {
            let total: u64 = ring.members.iter().map(|&c| coreset.weights.weight(c)).sum();
            prop_assert_eq!(total, ring.members.len() as u64);
            let support = ring.members.iter().filter(|&&c| coreset.weights.weight(c) > 0).count();
            prop_assert_eq!(support, ring.members.len().min(s));
        }
    }

    #[test]
    fn same_seed_same_coreset(seed in any::<u64>(), n in 3usize..40) {
        let inst = generate_instance(&params(n, 4), seed);
        let config = CoresetConfig { s_override: Some(3), ..CoresetConfig::default() };
        let a = build_coreset(&inst, 0.5, &config, seed).unwrap();
        let b = build_coreset(&inst, 0.5, &config, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn unsampled_coresets_are_exact(seed in any::<u64>(), n in 3usize..16) {
        let inst = generate_instance(&params(n, 2), seed);
        let coreset = build_coreset(&inst, 0.5, &CoresetConfig::default(), seed).unwrap();
        prop_assert!(coreset.is_exact());
        for mask in 1u32..32 {
            let f: Vec<usize> = (0..5).filter(|i| mask & (1 << i) != 0).collect();
            if f.len() > 2 {
                continue;
            }
            let w = wcost_m(&inst, &coreset.weights, &f, 2).unwrap().map(|s| s.cost);
            let c = cost_m(&inst, &f, 2).unwrap().map(|s| s.cost);
            prop_assert_eq!(w, c);
        }
    }
}

#[test]
fn small_ring_passes_through() {
    let mut rng = substream(1, &[]);
    let s = sample_ring(&[4, 7, 9], 5, &mut rng);
    assert_eq!(s.picks, vec![4, 7, 9]);
    let (num, den) = s.nominal_weight();
    assert_eq!(num, den);
}

#[test]
fn exact_division() {
    let members: Vec<usize> = (0..10).collect();
    let s = sample_ring(&members, 5, &mut substream(2, &[]));
    let w = ckmo::coreset::integralize(&s);
    assert_eq!(w.len(), 5);
    assert!(w.iter().all(|(_, x)| x == 2));
    assert_eq!(w.total_weight(), 10);
}

/// Every member's expected sampled weight is 1: over many draws, the mean
/// nominal weight `N/s` per member stays within a few standard errors.
#[test]
fn sampling_is_unbiased() {
    let members: Vec<usize> = (0..12).collect();
    let s = 5;
    let draws = 20_000;
    let mut weight: BTreeMap<usize, f64> = BTreeMap::new();
    let mut rng = substream(99, &[]);
    for _ in 0..draws {
        let sample = sample_ring(&members, s, &mut rng);
        let (num, den) = sample.nominal_weight();
        for c in sample.picks {
            *weight.entry(c).or_insert(0.0) += num as f64 / den as f64;
        }
    }
    // Per draw the weight is N/s with probability s/N: variance N/s - 1.
    let p = s as f64 / members.len() as f64;
    let sd = ((1.0 / p - 1.0) / draws as f64).sqrt();
    for c in &members {
        let mean = weight.get(c).copied().unwrap_or(0.0) / draws as f64;
        assert!(
            (mean - 1.0).abs() < 5.0 * sd,
            "client {c}: mean weight {mean}"
        );
    }
}

#[test]
fn integral_weights_keep_unbiased_totals() {
    let members: Vec<usize> = (0..7).collect();
    for seed in 0..200 {
        let sample = sample_ring(&members, 3, &mut substream(seed, &[]));
        let w = ckmo::coreset::integralize(&sample);
        assert_eq!(w.total_weight(), 7);
        // First N mod s picks get one extra unit.
        let weights: Vec<u64> = sample.picks.iter().map(|&c| w.weight(c)).collect();
        assert_eq!(weights, vec![3, 2, 2]);
    }
}
