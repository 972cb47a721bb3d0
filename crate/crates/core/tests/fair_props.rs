use std::collections::BTreeMap;

use rand::Rng;

use ckmo::coreset::CoresetConfig;
use ckmo::fair::{
    brute_force_fair, build_fair_coreset, fairness_violations, solve_fair_ckmo, solve_wfao,
    FairnessSpec, DEFAULT_COLUMN_LIMIT,
};
use ckmo::model::solution_violations;
use ckmo::rng::substream;
use ckmo::solver::SolveConfig;
use ckmo::verify::generate::{generate_instance, random_fairness, tiny_instance, GeneratorParams};
use ckmo::verify::oracle::exhaustive_fair;
use ckmo::{Error, Instance, WeightedClientSet};

fn fair_case(seed: u64) -> (Instance, FairnessSpec, WeightedClientSet) {
    let mut rng = substream(seed, &[11]);
    let n = rng.gen_range(2..=6);
    let m = rng.gen_range(0..=2u64.min(n as u64));
    let inst = tiny_instance(n, 2, 2, m, 4, seed);
    let spec = random_fairness(&inst, 2, &mut rng);
    let weights: WeightedClientSet = (0..n).map(|c| (c, rng.gen_range(1..=2))).collect();
    (inst, spec, weights)
}

#[test]
fn two_groups_one_facility() {
    use num_rational::Ratio;
    let points = vec![vec![1.0], vec![2.0], vec![3.0], vec![5.0], vec![0.0]];
    let inst = Instance::new(
        ckmo::MetricSpace::Points(points),
        vec![0, 1, 2, 3],
        vec![4],
        vec![2],
        1,
        2,
    );
    let half = Ratio::new(1, 2);
    let spec = FairnessSpec {
        group_of: vec![0, 0, 1, 1],
        alpha: vec![half; 2],
        beta: vec![half; 2],
        m_vec: vec![1, 1],
    };
    let sol = solve_wfao(
        &inst,
        &inst.unit_weights(),
        &[0],
        &spec,
        &spec.m_vec,
        DEFAULT_COLUMN_LIMIT,
    )
    .unwrap();
    assert_eq!(sol.cost, 4.0);
    assert_eq!(sol.outliers, BTreeMap::from([(1, 1), (3, 1)]));
}

#[test]
fn assignments_are_integral_fair_and_optimal() {
    let mut feasible = 0;
    for seed in 0..150 {
        let (inst, spec, weights) = fair_case(seed);
        let open = [0, 1];
        let oracle = exhaustive_fair(
            &inst,
            &weights.support(),
            &open,
            &spec.group_of,
            &spec.alpha,
            &spec.beta,
            &spec.m_vec,
        );
        match solve_wfao(
            &inst,
            &weights,
            &open,
            &spec,
            &spec.m_vec,
            DEFAULT_COLUMN_LIMIT,
        ) {
            Ok(sol) => {
                feasible += 1;
                let best = oracle.expect("oracle agrees on feasibility");
                assert!(
                    (sol.cost - best).abs() <= 1e-9 * best.max(1.0),
                    "seed {seed}"
                );
                assert!(fairness_violations(&spec, &sol).is_empty(), "seed {seed}");
                let v = solution_violations(&inst, &weights, inst.m, &sol);
                assert!(v.is_empty(), "seed {seed}: {v:?}");
            }
            Err(Error::Infeasible(_)) => assert!(oracle.is_none(), "seed {seed}"),
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
    assert!(feasible > 30);
}

/// Cheapest fractional assignment of one group's clients (in steps of 1/2)
/// that gives facility `f` exactly `loads[f]` and drops at most `budget`.
fn fractional_best(
    inst: &Instance,
    clients: &[(usize, u64)],
    open: &[usize],
    loads: &[u64],
    budget: u64,
) -> f64 {
    let half_loads: Vec<u64> = loads.iter().map(|l| 2 * l).collect();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        inst: &Instance,
        clients: &[(usize, u64)],
        open: &[usize],
        left: &mut Vec<u64>,
        dropped: u64,
        budget: u64,
        cost: f64,
        best: &mut f64,
    ) {
        if i == clients.len() {
            if left.iter().all(|&l| l == 0) && dropped <= 2 * budget {
                *best = best.min(cost);
            }
            return;
        }
        let halves = 2 * clients[i].1;
        // Split `halves` over the open facilities plus an outlier slot.
        #[allow(clippy::too_many_arguments)]
        fn split(
            j: usize,
            rest: u64,
            i: usize,
            inst: &Instance,
            clients: &[(usize, u64)],
            open: &[usize],
            left: &mut Vec<u64>,
            dropped: u64,
            budget: u64,
            cost: f64,
            best: &mut f64,
        ) {
            let c = clients[i].0;
            if j == open.len() {
                rec(
                    i + 1,
                    inst,
                    clients,
                    open,
                    left,
                    dropped + rest,
                    budget,
                    cost,
                    best,
                );
                return;
            }
            for x in 0..=rest.min(left[j]) {
                left[j] -= x;
                let step = x as f64 / 2.0 * inst.unit_cost(c, open[j]);
                split(
                    j + 1,
                    rest - x,
                    i,
                    inst,
                    clients,
                    open,
                    left,
                    dropped,
                    budget,
                    cost + step,
                    best,
                );
                left[j] += x;
            }
        }
        split(
            0, halves, i, inst, clients, open, left, dropped, budget, cost, best,
        );
    }
    let mut best = f64::INFINITY;
    rec(
        0,
        inst,
        clients,
        open,
        &mut half_loads.clone(),
        0,
        budget,
        0.0,
        &mut best,
    );
    best
}

#[test]
fn flow_rounding_loses_nothing_against_fractional_assignments() {
    let mut checked = 0;
    for seed in 0..80 {
        let (inst, spec, weights) = fair_case(seed);
        let open = vec![0, 1];
        let Ok(sol) = solve_wfao(
            &inst,
            &weights,
            &open,
            &spec,
            &spec.m_vec,
            DEFAULT_COLUMN_LIMIT,
        ) else {
            continue;
        };
        for g in 0..spec.num_groups() {
            let members: Vec<(usize, u64)> = weights
                .iter()
                .filter(|&(c, _)| spec.group_of[c] == g)
                .collect();
            let loads: Vec<u64> = open
                .iter()
                .map(|&f| {
                    sol.assignment
                        .iter()
                        .filter(|a| a.facility == f && spec.group_of[a.client] == g)
                        .map(|a| a.amount)
                        .sum()
                })
                .collect();
            let integral: f64 = sol
                .assignment
                .iter()
                .filter(|a| spec.group_of[a.client] == g)
                .map(|a| a.amount as f64 * inst.unit_cost(a.client, a.facility))
                .sum();
            let fractional = fractional_best(&inst, &members, &open, &loads, spec.m_vec[g]);
            assert!(
                (integral - fractional).abs() <= 1e-9 * integral.max(1.0),
                "seed {seed}, group {g}: {integral} vs {fractional}"
            );
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn fair_pipeline_matches_brute_force_without_sampling() {
    let mut feasible = 0;
    for seed in 0..40 {
        let inst = tiny_instance(6, 3, 2, 1 + seed % 2, 4, seed);
        let spec = random_fairness(&inst, 2, &mut substream(seed, &[12]));
        let brute = brute_force_fair(&inst, &spec, 100_000, DEFAULT_COLUMN_LIMIT);
        let solved = solve_fair_ckmo(
            &inst,
            &spec,
            0.5,
            &SolveConfig::default(),
            seed,
            DEFAULT_COLUMN_LIMIT,
        );
        match (brute, solved) {
            (Ok(b), Ok(s)) => {
                feasible += 1;
                assert_eq!(b.cost, s.solution.cost, "seed {seed}");
                assert!(fairness_violations(&spec, &s.solution).is_empty());
                assert!(s.report.guess_bound_respected());
            }
            (Err(Error::Infeasible(_)), Err(Error::Infeasible(_))) => {}
            (b, s) => panic!(
                "seed {seed}: brute {:?} vs pipeline {:?}",
                b.map(|b| b.cost),
                s.map(|s| s.solution.cost)
            ),
        }
    }
    assert!(feasible > 10);
}

#[test]
fn single_group_reduces_to_plain_pipeline() {
    for seed in 0..10 {
        let inst = generate_instance(&GeneratorParams::new(10, 3, 2, 1), seed);
        let spec = FairnessSpec::single_group(inst.n(), inst.m);
        let fair = solve_fair_ckmo(
            &inst,
            &spec,
            0.5,
            &SolveConfig::default(),
            0,
            DEFAULT_COLUMN_LIMIT,
        )
        .unwrap();
        let plain = ckmo::solver::solve_ckmo(&inst, 0.5, &SolveConfig::default(), 0).unwrap();
        assert!(
            (fair.solution.cost - plain.solution.cost).abs() <= 1e-9 * plain.solution.cost.max(1.0)
        );
    }
}

#[test]
fn fair_coreset_keeps_labels_and_group_totals() {
    for seed in 0..20 {
        let mut params = GeneratorParams::new(40, 3, 2, 2);
        params.dim = 3;
        let inst = generate_instance(&params, seed);
        let spec = random_fairness(&inst, 3, &mut substream(seed, &[13]));
        let config = CoresetConfig {
            s_override: Some(2),
            ..CoresetConfig::default()
        };
        let coreset = build_fair_coreset(&inst, &spec, 0.5, &config, seed).unwrap();
        let mut per_group = vec![0u64; 3];
        for (c, w) in coreset.weights.iter() {
            per_group[spec.group_of[c]] += w;
        }
        let sizes: Vec<u64> = (0..3)
            .map(|g| spec.group_of.iter().filter(|&&h| h == g).count() as u64)
            .collect();
        assert_eq!(per_group, sizes);
        for r in &coreset.meta.rings {
            assert!(r.group.is_some());
            assert!(r.sampled <= r.population.min(2));
        }
    }
}
