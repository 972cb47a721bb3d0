use std::collections::BTreeMap;

use proptest::prelude::*;

use ckmo::flow::cost_m;
use ckmo::model::{solution_violations, Assignment};
use ckmo::{evaluate_cost, Instance, MetricSpace, Solution};

fn line_instance(
    xs: &[f64],
    facilities: &[f64],
    caps: &[u64],
    k: usize,
    m: u64,
    z: f64,
) -> Instance {
    let mut points: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    points.extend(facilities.iter().map(|&x| vec![x]));
    let n = xs.len();
    Instance::new(
        MetricSpace::Points(points),
        (0..n).collect(),
        (n..n + facilities.len()).collect(),
        caps.to_vec(),
        k,
        m,
    )
    .with_z(z)
}

#[test]
fn outlier_is_the_farthest_client() {
    let inst = line_instance(&[1.0, 2.0, 5.0], &[0.0], &[3], 1, 1, 1.0);
    let sol = cost_m(&inst, &[0], 1).unwrap().unwrap();
    assert_eq!(sol.cost, 3.0);
    assert_eq!(sol.outliers, BTreeMap::from([(2, 1)]));
}

#[test]
fn squared_distance() {
    let inst = line_instance(&[3.0], &[0.0], &[1], 1, 0, 2.0);
    let sol = Solution::from_parts(
        &inst,
        vec![0],
        vec![Assignment {
            client: 0,
            facility: 0,
            amount: 1,
        }],
        BTreeMap::new(),
    );
    assert_eq!(evaluate_cost(&inst, &sol).unwrap(), 9.0);
}

fn arb_instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<u64>, u64, f64)> {
    (
        2usize..8,
        1usize..4,
        0u64..3,
        prop_oneof![Just(1.0), Just(2.0), Just(1.5)],
    )
        .prop_flat_map(|(n, nf, m, z)| {
            (
                proptest::collection::vec(-10.0f64..10.0, n),
                proptest::collection::vec(-10.0f64..10.0, nf),
                proptest::collection::vec(1u64..6, nf),
                Just(m.min(n as u64)),
                Just(z),
            )
        })
}

proptest! {
    #[test]
    fn cost_is_invariant_under_client_permutation(
        (xs, fs, caps, m, z) in arb_instance(),
        rotate in 0usize..8,
    ) {
        let nf = fs.len();
        let total: u64 = caps.iter().sum();
        prop_assume!(total + m >= xs.len() as u64);
        let inst = line_instance(&xs, &fs, &caps, nf, m, z);
        let all: Vec<usize> = (0..nf).collect();
        let sol = cost_m(&inst, &all, m).unwrap().unwrap();

        let n = xs.len();
        let shift = rotate % n;
        // Client c moves to position (c + shift) % n.
        let mut permuted_x = vec![0.0; n];
        for c in 0..n {
            permuted_x[(c + shift) % n] = xs[c];
        }
        let permuted = line_instance(&permuted_x, &fs, &caps, nf, m, z);
        let moved = Solution::from_parts(
            &permuted,
            sol.open.clone(),
            sol.assignment.iter().map(|a| Assignment { client: (a.client + shift) % n, ..*a }).collect(),
            sol.outliers.iter().map(|(&c, &o)| ((c + shift) % n, o)).collect(),
        );
        let a = evaluate_cost(&inst, &sol).unwrap();
        let b = evaluate_cost(&permuted, &moved).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn scaling_distances_scales_cost_by_lambda_to_z(
        (xs, fs, caps, m, z) in arb_instance(),
        lambda in 0.1f64..10.0,
        opening in 0.0f64..5.0,
    ) {
        let nf = fs.len();
        prop_assume!(caps.iter().sum::<u64>() + m >= xs.len() as u64);
        let inst = line_instance(&xs, &fs, &caps, nf, m, z).with_opening_costs(vec![opening; nf]);
        let all: Vec<usize> = (0..nf).collect();
        let sol = cost_m(&inst, &all, m).unwrap().unwrap();
        let scale = |v: &[f64]| v.iter().map(|x| x * lambda).collect::<Vec<_>>();
        let scaled = line_instance(&scale(&xs), &scale(&fs), &caps, nf, m, z).with_opening_costs(vec![opening; nf]);
        let moved = Solution::from_parts(&scaled, sol.open.clone(), sol.assignment.clone(), sol.outliers.clone());
        let expected = sol.assignment_cost * lambda.powf(z);
        prop_assert!((moved.assignment_cost - expected).abs() <= 1e-9 * expected.max(1.0));
        prop_assert_eq!(scaled.opening_cost_of(&moved.open), inst.opening_cost_of(&sol.open));
    }

    #[test]
    fn no_outliers_means_every_client_is_fully_served(
        (xs, fs, caps, _m, z) in arb_instance(),
    ) {
        let nf = fs.len();
        prop_assume!(caps.iter().sum::<u64>() >= xs.len() as u64);
        let inst = line_instance(&xs, &fs, &caps, nf, 0, z);
        let all: Vec<usize> = (0..nf).collect();
        let sol = cost_m(&inst, &all, 0).unwrap().unwrap();
        prop_assert!(sol.outliers.is_empty());
        for c in 0..xs.len() {
            let served: u64 = sol.assignment.iter().filter(|a| a.client == c).map(|a| a.amount).sum();
            prop_assert_eq!(served, 1);
        }
        prop_assert!(solution_violations(&inst, &inst.unit_weights(), 0, &sol).is_empty());
    }
}
