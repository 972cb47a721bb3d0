use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, Solution, WeightedClientSet};
use crate::numeric::compensated_sum;

use super::{solve_mcf, FlowNetwork};

/// Dense client x facility cost table; `f64::INFINITY` marks a missing arc.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "cost matrix shape mismatch");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn max_finite(&self) -> f64 {
        self.data
            .iter()
            .copied()
            .filter(|c| c.is_finite())
            .fold(0.0, f64::max)
    }
}

/// Optimal assignment with at most `m` unserved demand units.
#[derive(Debug, Clone, PartialEq)]
pub struct McfoResult {
    /// `(demand row, facility column, amount)`, sorted.
    pub amounts: Vec<(usize, usize, u64)>,
    /// Unserved amount per demand row.
    pub outliers: Vec<u64>,
    /// Cost of the served demand; no dummy contribution.
    pub cost: f64,
    /// Cost charged per unit routed to the dummy facility.
    pub dummy_cost: f64,
    /// Optimal value of the augmented (dummy-facility) flow problem.
    pub augmented_cost: f64,
}

impl McfoResult {
    pub fn total_outliers(&self) -> u64 {
        self.outliers.iter().sum()
    }
}

/// Minimum-cost flow with outliers via a dummy facility.
///
/// The dummy facility receives exactly `min(m, Σw)` units over arcs of cost
/// `D = max finite cost + 1`, so every feasible augmented flow pays the same
/// constant `min(m, Σw)·D` and the remaining cost is that of an optimal
/// MCFO solution. The reported `cost` sums the served arcs only.
pub fn solve_mcfo(
    capacities: &[u64],
    demands: &[u64],
    costs: &CostMatrix,
    m: u64,
) -> Result<McfoResult> {
    if costs.rows() != demands.len() || costs.cols() != capacities.len() {
        return Err(Error::InvalidArgument(format!(
            "cost matrix is {}x{} but there are {} demand rows and {} facilities",
            costs.rows(),
            costs.cols(),
            demands.len(),
            capacities.len()
        )));
    }
    let total: u64 = demands.iter().sum();
    let capacity: u64 = capacities.iter().sum();
    let must_serve = total.saturating_sub(m);
    if must_serve > capacity {
        return Err(Error::Infeasible(format!(
            "demand {total} minus outliers {m} exceeds capacity {capacity}"
        )));
    }
    let dropped = m.min(total);
    let dummy_cost = costs.max_finite() + 1.0;

    let rows = demands.len();
    let mut net = FlowNetwork::new();
    for &w in demands {
        net.add_node(w as i64, 0);
    }
    for &u in capacities {
        net.add_node(0, u);
    }
    let dummy = net.add_node(-(dropped as i64), 0);
    let mut served_arcs = Vec::new();
    for (r, &w) in demands.iter().enumerate() {
        if w == 0 {
            continue;
        }
        for f in 0..capacities.len() {
            let c = costs.get(r, f);
            if c.is_finite() && capacities[f] > 0 {
                let id = net.add_arc(r, rows + f, c, None);
                served_arcs.push((id, r, f));
            }
        }
        if dropped > 0 {
            net.add_arc(r, dummy, dummy_cost, None);
        }
    }
    let flow = solve_mcf(&net)?;

    let mut amounts = Vec::new();
    let mut served = vec![0u64; rows];
    for &(id, r, f) in &served_arcs {
        let x = flow.flows[id];
        if x > 0 {
            amounts.push((r, f, x));
            served[r] += x;
        }
    }
    amounts.sort_unstable();
    let outliers: Vec<u64> = demands.iter().zip(&served).map(|(w, s)| w - s).collect();
    let cost = compensated_sum(amounts.iter().map(|&(r, f, x)| x as f64 * costs.get(r, f)));
    Ok(McfoResult {
        amounts,
        outliers,
        cost,
        dummy_cost,
        augmented_cost: flow.cost,
    })
}

/// `cost_m(C, F)`: optimal unweighted assignment to the fixed facility set
/// `facilities` with at most `m` outliers. `None` when
/// `Σ_{f∈F} u_f < n − m`.
pub fn cost_m(instance: &Instance, facilities: &[usize], m: u64) -> Result<Option<Solution>> {
    wcost_m(instance, &instance.unit_weights(), facilities, m)
}

/// `wcost_m(W, F)`: the weighted analogue of [`cost_m`]; `None` when
/// `Σ_{f∈F} u_f < w(W) − m`.
pub fn wcost_m(
    instance: &Instance,
    weights: &WeightedClientSet,
    facilities: &[usize],
    m: u64,
) -> Result<Option<Solution>> {
    let mut open = facilities.to_vec();
    open.sort_unstable();
    open.dedup();
    if instance.capacity_of(&open) < weights.total_weight().saturating_sub(m) {
        return Ok(None);
    }
    let support = weights.support();
    let demands: Vec<u64> = support.iter().map(|&(_, w)| w).collect();
    let capacities: Vec<u64> = open.iter().map(|&f| instance.capacities[f]).collect();
    let costs = CostMatrix::from_fn(support.len(), open.len(), |r, c| {
        instance.unit_cost(support[r].0, open[c])
    });
    let result = match solve_mcfo(&capacities, &demands, &costs, m) {
        Ok(r) => r,
        Err(Error::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let assignment = result
        .amounts
        .iter()
        .map(|&(r, c, amount)| Assignment {
            client: support[r].0,
            facility: open[c],
            amount,
        })
        .collect();
    let outliers: BTreeMap<usize, u64> = result
        .outliers
        .iter()
        .enumerate()
        .filter(|&(_, &o)| o > 0)
        .map(|(r, &o)| (support[r].0, o))
        .collect();
    Ok(Some(Solution::from_parts(
        instance, open, assignment, outliers,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{solution_violations, MetricSpace};

    fn line(points: &[f64]) -> MetricSpace {
        MetricSpace::Points(points.iter().map(|&x| vec![x]).collect())
    }

    #[test]
    fn zero_outliers_matches_plain_flow() {
        let costs = CostMatrix::new(2, 2, vec![1.0, 3.0, 2.0, 2.0]);
        let r = solve_mcfo(&[1, 1], &[1, 1], &costs, 0).unwrap();
        assert_eq!(r.cost, 3.0);
        assert_eq!(r.total_outliers(), 0);
    }

    #[test]
    fn single_outlier_drops_the_expensive_client() {
        let costs = CostMatrix::new(2, 1, vec![1.0, 4.0]);
        let r = solve_mcfo(&[1], &[1, 1], &costs, 1).unwrap();
        assert_eq!(r.cost, 1.0);
        assert_eq!(r.outliers, vec![0, 1]);
        assert_eq!(r.augmented_cost - r.dummy_cost, r.cost);
    }

    #[test]
    fn dropping_the_most_expensive_served_unit_is_not_enough() {
        // Full service forces c1 -> B (10) and c2 -> A (1). With one outlier
        // the optimum drops c2 and serves c1 at A for 0, not 1.
        let costs = CostMatrix::new(2, 2, vec![0.0, 10.0, 1.0, 100.0]);
        let full = solve_mcfo(&[1, 1], &[1, 1], &costs, 0).unwrap();
        assert_eq!(full.cost, 11.0);
        let r = solve_mcfo(&[1, 1], &[1, 1], &costs, 1).unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.outliers, vec![0, 1]);
    }

    #[test]
    fn budget_covering_all_demand_costs_nothing() {
        let costs = CostMatrix::new(2, 1, vec![1.0, 4.0]);
        let r = solve_mcfo(&[0], &[2, 1], &costs, 3).unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.total_outliers(), 3);
    }

    #[test]
    fn infeasible_mcfo() {
        let costs = CostMatrix::new(2, 1, vec![1.0, 4.0]);
        assert!(matches!(
            solve_mcfo(&[1], &[1, 1], &costs, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn colocated_clients_cost_zero() {
        let inst = Instance::new(line(&[0.0, 5.0]), vec![0, 1], vec![0, 1], vec![1, 1], 2, 0);
        let sol = cost_m(&inst, &[0, 1], 0).unwrap().unwrap();
        assert_eq!(sol.cost, 0.0);
    }

    #[test]
    fn infinite_sentinel_below_required_capacity() {
        let inst = Instance::new(
            line(&[0.0, 1.0, 2.0, 3.0]),
            vec![0, 1, 2],
            vec![3],
            vec![1],
            1,
            1,
        );
        assert_eq!(cost_m(&inst, &[0], 1).unwrap(), None);
        assert!(cost_m(&inst, &[0], 2).unwrap().is_some());
    }

    #[test]
    fn weighted_forced_split() {
        // One client of weight 5, u = 3, m = 2, distance 1.
        let inst = Instance::new(line(&[0.0, 1.0]), vec![0], vec![1], vec![3], 1, 2);
        let w = WeightedClientSet::from_iter([(0, 5)]);
        let sol = wcost_m(&inst, &w, &[0], 2).unwrap().unwrap();
        assert_eq!(sol.cost, 3.0);
        assert_eq!(sol.total_outliers(), 2);
        assert!(solution_violations(&inst, &w, 2, &sol).is_empty());
    }

    #[test]
    fn unit_weights_agree_with_cost_m() {
        let inst = Instance::new(
            line(&[0.0, 1.0, 2.5, 7.0, 3.0]),
            vec![0, 1, 2, 3],
            vec![4, 0],
            vec![2, 2],
            2,
            1,
        );
        let a = cost_m(&inst, &[0, 1], 1).unwrap().unwrap();
        let b = wcost_m(&inst, &WeightedClientSet::unit(4), &[0, 1], 1)
            .unwrap()
            .unwrap();
        assert_eq!(a, b);
    }
}
