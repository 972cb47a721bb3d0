//! The ring-perturbation flow instance `FI(v)` and its optimal cost `g(v)`.
//!
//! Clients of the probed ring carry demand `v_c`, all other clients carry
//! demand 1 and the ring center carries `N − Σ v_c` (possibly negative).
//! Ring clients and the center are joined in both directions, every demand
//! node reaches every open facility, and up to `m` units may go unserved.

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::numeric::{compensated_sum, power};

use super::{solve_mcf, FlowNetwork};

/// A ring to perturb: its center point and its member clients.
#[derive(Debug, Clone, PartialEq)]
pub struct RingProbe {
    pub center_point: usize,
    pub members: Vec<usize>,
}

/// `FI(v)` together with the arcs that lead to the outlier dummy.
#[derive(Debug, Clone)]
pub struct FiNetwork {
    pub network: FlowNetwork,
    pub dummy_arcs: Vec<usize>,
}

pub fn build_fi(
    instance: &Instance,
    facilities: &[usize],
    ring: &RingProbe,
    v: &[u64],
) -> Result<FiNetwork> {
    if v.len() != ring.members.len() {
        return Err(Error::InvalidArgument(format!(
            "demand vector has {} entries for a ring of {}",
            v.len(),
            ring.members.len()
        )));
    }
    let n = instance.n();
    let z = instance.z;
    let metric = &instance.metric;
    let mut demand = vec![1i64; n];
    for (&c, &x) in ring.members.iter().zip(v) {
        demand[c] = x as i64;
    }
    let ring_size = ring.members.len() as i64;
    let center_demand = ring_size - v.iter().sum::<u64>() as i64;

    let mut net = FlowNetwork::new();
    for &d in &demand {
        net.add_node(d, 0);
    }
    let center = net.add_node(center_demand, 0);
    let first_facility = net.nodes.len();
    for &f in facilities {
        net.add_node(0, instance.capacities[f]);
    }
    let dropped = instance.m.min(n as u64);
    let dummy = net.add_node(-(dropped as i64), 0);

    for c in 0..n {
        for (i, &f) in facilities.iter().enumerate() {
            net.add_arc(c, first_facility + i, instance.unit_cost(c, f), None);
        }
    }
    for (i, &f) in facilities.iter().enumerate() {
        let cost = power(
            metric.distance(ring.center_point, instance.facilities[f]),
            z,
        );
        net.add_arc(center, first_facility + i, cost, None);
    }
    for &c in &ring.members {
        let cost = power(metric.distance(instance.clients[c], ring.center_point), z);
        net.add_arc(c, center, cost, None);
        net.add_arc(center, c, cost, None);
    }
    let max_cost = net.arcs.iter().map(|a| a.cost).fold(0.0, f64::max);
    let mut dummy_arcs = Vec::new();
    if dropped > 0 {
        for c in 0..=n {
            let from = if c == n { center } else { c };
            dummy_arcs.push(net.add_arc(from, dummy, max_cost + 1.0, None));
        }
    }
    Ok(FiNetwork {
        network: net,
        dummy_arcs,
    })
}

/// `g(v)`: optimal cost of `FI(v)` excluding the dummy arcs.
pub fn evaluate_g(
    instance: &Instance,
    facilities: &[usize],
    ring: &RingProbe,
    v: &[u64],
) -> Result<f64> {
    let fi = build_fi(instance, facilities, ring, v)?;
    let flow = solve_mcf(&fi.network)?;
    Ok(compensated_sum(
        fi.network
            .arcs
            .iter()
            .zip(&flow.flows)
            .enumerate()
            .filter(|(i, (_, &x))| x > 0 && !fi.dummy_arcs.contains(i))
            .map(|(_, (a, &x))| x as f64 * a.cost),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::cost_m;
    use crate::model::MetricSpace;

    fn instance() -> Instance {
        let pts = [0.0, 1.0, 1.5, 4.0, 9.0, 10.0];
        let metric = MetricSpace::Points(pts.iter().map(|&x| vec![x]).collect());
        Instance::new(metric, vec![0, 1, 2, 3], vec![4, 5], vec![2, 2], 2, 1)
    }

    #[test]
    fn all_ones_recovers_cost_m() {
        let inst = instance();
        let ring = RingProbe {
            center_point: 1,
            members: vec![0, 1, 2],
        };
        let g = evaluate_g(&inst, &[0, 1], &ring, &[1, 1, 1]).unwrap();
        let c = cost_m(&inst, &[0, 1], 1).unwrap().unwrap().cost;
        assert!((g - c).abs() < 1e-12, "{g} vs {c}");
    }

    #[test]
    fn zero_perturbation_is_a_no_op() {
        let inst = instance();
        let ring = RingProbe {
            center_point: 1,
            members: vec![0, 1, 2],
        };
        let a = evaluate_g(&inst, &[0, 1], &ring, &[2, 0, 1]).unwrap();
        let b = evaluate_g(&inst, &[0, 1], &ring, &[2, 0, 1]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let inst = instance();
        let ring = RingProbe {
            center_point: 1,
            members: vec![0, 1],
        };
        assert!(build_fi(&inst, &[0], &ring, &[1]).is_err());
    }
}
