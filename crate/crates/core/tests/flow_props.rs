use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ckmo::flow::{cost_m, solve_mcf, solve_mcfo, CostMatrix};
use ckmo::verify::generate::{random_network, tiny_instance};
use ckmo::verify::oracle::{exhaustive_flow, exhaustive_mcfo};

fn bipartite() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, Vec<Vec<f64>>)> {
    (1usize..5, 1usize..4).prop_flat_map(|(rows, cols)| {
        (
            proptest::collection::vec(0u64..4, cols),
            proptest::collection::vec(0u64..3, rows),
            proptest::collection::vec(proptest::collection::vec(0u32..10, cols), rows),
        )
            .prop_map(|(caps, demands, costs)| {
                let costs = costs
                    .into_iter()
                    .map(|r| r.into_iter().map(f64::from).collect())
                    .collect();
                (caps, demands, costs)
            })
    })
}

fn matrix(costs: &[Vec<f64>], cols: usize) -> CostMatrix {
    CostMatrix::from_fn(costs.len(), cols, |r, c| costs[r][c])
}

#[test]
fn one_facility_two_clients() {
    let costs = CostMatrix::new(2, 1, vec![1.0, 4.0]);
    let r = solve_mcfo(&[1], &[1, 1], &costs, 1).unwrap();
    assert_eq!(r.cost, 1.0);
    assert_eq!(r.outliers, vec![0, 1]);
}

proptest! {
    #[test]
    fn flows_are_optimal_integral_and_certified(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(6, 10, 3, &mut rng);
        match (solve_mcf(&net), exhaustive_flow(&net)) {
            (Ok(r), Some((best, _))) => {
                prop_assert!(r.violations(&net).is_empty(), "{:?}", r.violations(&net));
                prop_assert!(!r.has_negative_residual_cycle(&net));
                prop_assert_eq!(r.cost, best);
            }
            (Err(ckmo::Error::Infeasible(_)), None) => {}
            (r, o) => prop_assert!(false, "solver {:?} vs oracle {:?}", r.map(|r| r.cost), o.map(|o| o.0)),
        }
    }

    #[test]
    fn outlier_flow_matches_oracle_and_dummy_identity((caps, demands, costs) in bipartite()) {
        let total: u64 = demands.iter().sum();
        let m_costs = matrix(&costs, caps.len());
        let mut previous = f64::INFINITY;
        for m in 0..=total {
            let solved = solve_mcfo(&caps, &demands, &m_costs, m);
            let oracle = exhaustive_mcfo(&caps, &demands, &costs, m);
            match (solved, oracle) {
                (Ok(r), Some(best)) => {
                    prop_assert_eq!(r.cost, best);
                    // OPT(MCFO) = OPT(augmented MCF) - dropped * D.
                    let dropped = m.min(total) as f64;
                    prop_assert!((r.augmented_cost - dropped * r.dummy_cost - best).abs() <= 1e-9);
                    prop_assert!(r.total_outliers() <= m);
                    prop_assert!(r.cost <= previous);
                    previous = r.cost;
                }
                (Err(ckmo::Error::Infeasible(_)), None) => {}
                (r, o) => prop_assert!(false, "m = {}: {:?} vs {:?}", m, r.map(|r| r.cost), o),
            }
        }
        let all = solve_mcfo(&caps, &demands, &m_costs, total).unwrap();
        prop_assert_eq!(all.cost, 0.0);
    }

    #[test]
    fn more_facilities_never_cost_more(seed in 0u64..10_000, m in 0u64..3) {
        let inst = tiny_instance(6, 4, 4, m, 3, seed);
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        for mask in 1u32..16 {
            subsets.push((0..4).filter(|f| mask & (1 << f) != 0).collect());
        }
        for small in &subsets {
            for large in &subsets {
                if !small.iter().all(|f| large.contains(f)) {
                    continue;
                }
                if let Some(s) = cost_m(&inst, small, m).unwrap() {
                    let l = cost_m(&inst, large, m).unwrap().expect("superset stays feasible");
                    prop_assert!(l.cost <= s.cost + 1e-9, "{:?}: {} > {:?}: {}", large, l.cost, small, s.cost);
                }
            }
        }
    }
}
