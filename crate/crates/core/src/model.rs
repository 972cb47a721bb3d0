//! Problem data model: metrics, instances, weighted client sets, solutions.
//!
//! Clients and facilities are addressed by their position in
//! [`Instance::clients`] / [`Instance::facilities`] ("client index",
//! "facility index"); both lists hold point indices into the metric.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{approx_eq, compensated_sum, power};

/// Default size up to which explicit matrices get an exhaustive
/// triangle-inequality check.
pub const DEFAULT_TRIANGLE_CHECK_LIMIT: usize = 200;

/// Relative tolerance for recomputed costs.
pub const COST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MetricSpace {
    /// Euclidean points, distances computed on demand.
    Points(Vec<Vec<f64>>),
    /// Explicit symmetric distance matrix.
    Matrix(Vec<Vec<f64>>),
}

impl MetricSpace {
    pub fn len(&self) -> usize {
        match self {
            MetricSpace::Points(p) => p.len(),
            MetricSpace::Matrix(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match self {
            MetricSpace::Points(p) => {
                if i == j {
                    return 0.0;
                }
                p[i].iter()
                    .zip(&p[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            }
            MetricSpace::Matrix(m) => m[i][j],
        }
    }

    /// Metric axioms. Triangle inequality is checked exhaustively only for
    /// matrices of at most `triangle_limit` points.
    pub fn violations(&self, triangle_limit: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        match self {
            MetricSpace::Points(points) => {
                let dim = points.first().map_or(0, Vec::len);
                if dim == 0 && !points.is_empty() {
                    out.push(Violation::Shape("points must have dimension >= 1".into()));
                }
                for (i, p) in points.iter().enumerate() {
                    if p.len() != dim {
                        out.push(Violation::Shape(format!(
                            "point {i} has dimension {} (expected {dim})",
                            p.len()
                        )));
                    }
                    if p.iter().any(|x| !x.is_finite()) {
                        out.push(Violation::Shape(format!(
                            "point {i} has a non-finite coordinate"
                        )));
                    }
                }
            }
            MetricSpace::Matrix(m) => {
                let n = m.len();
                for (i, row) in m.iter().enumerate() {
                    if row.len() != n {
                        out.push(Violation::Shape(format!(
                            "matrix row {i} has length {} (expected {n})",
                            row.len()
                        )));
                    }
                }
                if !out.is_empty() {
                    return out;
                }
                for i in 0..n {
                    if m[i][i] != 0.0 {
                        out.push(Violation::NonzeroDiagonal { point: i });
                    }
                    for j in 0..n {
                        if m[i][j] < 0.0 || !m[i][j].is_finite() {
                            out.push(Violation::NegativeDistance { i, j });
                        }
                        if j > i && m[i][j] != m[j][i] {
                            out.push(Violation::Asymmetric { i, j });
                        }
                    }
                }
                if n <= triangle_limit && out.is_empty() {
                    'outer: for i in 0..n {
                        for j in 0..n {
                            for l in 0..n {
                                if m[i][l] > m[i][j] + m[j][l] + 1e-9 * m[i][l].max(1.0) {
                                    out.push(Violation::Triangle { i, j, l });
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// A capacitated k-median-with-outliers instance, optionally with opening
/// costs and a distance power `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub metric: MetricSpace,
    pub clients: Vec<usize>,
    pub facilities: Vec<usize>,
    /// Capacity per facility index.
    pub capacities: Vec<u64>,
    /// Opening cost per facility index.
    pub opening_costs: Vec<f64>,
    pub k: usize,
    pub m: u64,
    pub z: f64,
}

impl Instance {
    pub fn new(
        metric: MetricSpace,
        clients: Vec<usize>,
        facilities: Vec<usize>,
        capacities: Vec<u64>,
        k: usize,
        m: u64,
    ) -> Self {
        let opening_costs = vec![0.0; facilities.len()];
        Self {
            metric,
            clients,
            facilities,
            capacities,
            opening_costs,
            k,
            m,
            z: 1.0,
        }
    }

    pub fn with_opening_costs(mut self, costs: Vec<f64>) -> Self {
        self.opening_costs = costs;
        self
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z = z;
        self
    }

    pub fn with_outliers(mut self, m: u64) -> Self {
        self.m = m;
        self
    }

    pub fn n(&self) -> usize {
        self.clients.len()
    }

    pub fn num_facilities(&self) -> usize {
        self.facilities.len()
    }

    pub fn has_opening_costs(&self) -> bool {
        self.opening_costs.iter().any(|&o| o != 0.0)
    }

    /// `d(client, facility)`.
    #[inline]
    pub fn distance(&self, client: usize, facility: usize) -> f64 {
        self.metric
            .distance(self.clients[client], self.facilities[facility])
    }

    /// `d(client, facility)^z`, the per-unit assignment cost.
    #[inline]
    pub fn unit_cost(&self, client: usize, facility: usize) -> f64 {
        power(self.distance(client, facility), self.z)
    }

    pub fn opening_cost_of(&self, facilities: &[usize]) -> f64 {
        compensated_sum(facilities.iter().map(|&f| self.opening_costs[f]))
    }

    pub fn capacity_of(&self, facilities: &[usize]) -> u64 {
        facilities.iter().map(|&f| self.capacities[f]).sum()
    }

    /// Sum of the `k` largest capacities.
    pub fn max_capacity(&self) -> u64 {
        let mut caps = self.capacities.clone();
        caps.sort_unstable_by(|a, b| b.cmp(a));
        caps.iter().take(self.k).sum()
    }

    pub fn unit_weights(&self) -> WeightedClientSet {
        WeightedClientSet::unit(self.n())
    }

    pub fn validate(&self) -> Result<()> {
        let report = validate_instance(self);
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(report))
        }
    }
}

/// All violated instance invariants; empty means valid.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    validate_instance_with(instance, DEFAULT_TRIANGLE_CHECK_LIMIT)
}

pub fn validate_instance_with(instance: &Instance, triangle_limit: usize) -> Vec<Violation> {
    let mut out = instance.metric.violations(triangle_limit);
    let size = instance.metric.len();
    for (what, list) in [
        ("client", &instance.clients),
        ("facility", &instance.facilities),
    ] {
        let mut seen = std::collections::BTreeSet::new();
        for &p in list.iter() {
            if p >= size {
                out.push(Violation::IndexOutOfRange {
                    what,
                    index: p,
                    size,
                });
            } else if !seen.insert(p) {
                out.push(Violation::Duplicate { what, point: p });
            }
        }
    }
    let nf = instance.facilities.len();
    if instance.capacities.len() != nf {
        out.push(Violation::Shape(format!(
            "{} capacities for {nf} facilities",
            instance.capacities.len()
        )));
    }
    if instance.opening_costs.len() != nf {
        out.push(Violation::Shape(format!(
            "{} opening costs for {nf} facilities",
            instance.opening_costs.len()
        )));
    } else if instance
        .opening_costs
        .iter()
        .any(|o| *o < 0.0 || !o.is_finite())
    {
        out.push(Violation::Shape(
            "opening costs must be finite and nonnegative".into(),
        ));
    }
    if instance.k == 0 {
        out.push(Violation::ZeroK);
    }
    let n = instance.n() as u64;
    if instance.m > n {
        out.push(Violation::OutlierBudget { m: instance.m, n });
    }
    if instance.z < 1.0 || !instance.z.is_finite() {
        out.push(Violation::Shape(format!(
            "z must be a finite real >= 1, got {}",
            instance.z
        )));
    }
    if instance.capacities.len() == nf && instance.m <= n {
        let capacity = instance.max_capacity();
        let required = n - instance.m;
        if capacity < required {
            out.push(Violation::InsufficientCapacity { capacity, required });
        }
    }
    out
}

/// A violated invariant of an instance or a solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Shape(String),
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    Duplicate {
        what: &'static str,
        point: usize,
    },
    NonzeroDiagonal {
        point: usize,
    },
    NegativeDistance {
        i: usize,
        j: usize,
    },
    Asymmetric {
        i: usize,
        j: usize,
    },
    Triangle {
        i: usize,
        j: usize,
        l: usize,
    },
    ZeroK,
    OutlierBudget {
        m: u64,
        n: u64,
    },
    InsufficientCapacity {
        capacity: u64,
        required: u64,
    },
    TooManyFacilities {
        open: usize,
        k: usize,
    },
    WeightMismatch {
        client: usize,
        assigned: u64,
        outlier: u64,
        weight: u64,
    },
    OutliersExceeded {
        outliers: u64,
        budget: u64,
    },
    CapacityExceeded {
        facility: usize,
        point: usize,
        load: u64,
        capacity: u64,
    },
    ClosedFacility {
        facility: usize,
        point: usize,
    },
    CostMismatch {
        reported: f64,
        recomputed: f64,
    },
    Fairness {
        facility: usize,
        group: usize,
        load: u64,
        group_load: u64,
    },
    GroupOutliersExceeded {
        group: usize,
        outliers: u64,
        budget: u64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            Shape(msg) => write!(f, "{msg}"),
            IndexOutOfRange { what, index, size } => {
                write!(f, "{what} point {index} out of range (metric has {size} points)")
            }
            Duplicate { what, point } => write!(f, "duplicate {what} point {point}"),
            NonzeroDiagonal { point } => write!(f, "d({point},{point}) != 0"),
            NegativeDistance { i, j } => write!(f, "d({i},{j}) is negative or not finite"),
            Asymmetric { i, j } => write!(f, "symmetry violated: d({i},{j}) != d({j},{i})"),
            Triangle { i, j, l } => {
                write!(f, "triangle inequality violated: d({i},{l}) > d({i},{j}) + d({j},{l})")
            }
            ZeroK => write!(f, "k must be at least 1"),
            OutlierBudget { m, n } => write!(f, "outlier budget m = {m} exceeds n = {n}"),
            InsufficientCapacity { capacity, required } => write!(
                f,
                "infeasible: k largest capacities sum to {capacity} < n - m = {required}"
            ),
            TooManyFacilities { open, k } => write!(f, "{open} open facilities exceed k = {k}"),
            WeightMismatch { client, assigned, outlier, weight } => write!(
                f,
                "client {client}: assigned {assigned} + outlier {outlier} != weight {weight}"
            ),
            OutliersExceeded { outliers, budget } => {
                write!(f, "outlier amount {outliers} exceeds budget {budget}")
            }
            CapacityExceeded { facility, point, load, capacity } => write!(
                f,
                "capacity exceeded at facility {facility} (point {point}): load {load} > capacity {capacity}"
            ),
            ClosedFacility { facility, point } => {
                write!(f, "assignment to facility {facility} (point {point}) which is not open")
            }
            CostMismatch { reported, recomputed } => {
                write!(f, "reported cost {reported} != recomputed {recomputed}")
            }
            Fairness { facility, group, load, group_load } => write!(
                f,
                "fairness violated at facility {facility}: group {group} has {group_load} of {load}"
            ),
            GroupOutliersExceeded { group, outliers, budget } => {
                write!(f, "group {group} outlier weight {outliers} exceeds budget {budget}")
            }
        }
    }
}

/// Integer weights on client indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedClientSet {
    entries: BTreeMap<usize, u64>,
    total: u64,
}

impl WeightedClientSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every client `0..n` with weight 1.
    pub fn unit(n: usize) -> Self {
        Self {
            entries: (0..n).map(|c| (c, 1)).collect(),
            total: n as u64,
        }
    }

    pub fn set(&mut self, client: usize, weight: u64) {
        let old = self.entries.insert(client, weight).unwrap_or(0);
        self.total = self.total - old + weight;
    }

    pub fn add(&mut self, client: usize, weight: u64) {
        *self.entries.entry(client).or_insert(0) += weight;
        self.total += weight;
    }

    pub fn weight(&self, client: usize) -> u64 {
        self.entries.get(&client).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    /// Number of entries, including zero-weight ones.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.entries.iter().map(|(&c, &w)| (c, w))
    }

    /// Clients with positive weight, ascending.
    pub fn support(&self) -> Vec<(usize, u64)> {
        self.iter().filter(|&(_, w)| w > 0).collect()
    }

    pub fn extend(&mut self, other: &WeightedClientSet) {
        for (c, w) in other.iter() {
            self.add(c, w);
        }
    }
}

impl FromIterator<(usize, u64)> for WeightedClientSet {
    fn from_iter<I: IntoIterator<Item = (usize, u64)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (c, w) in iter {
            out.add(c, w);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub client: usize,
    pub facility: usize,
    pub amount: u64,
}

/// Open facilities, integral assignment amounts and outlier amounts.
///
/// `cost` includes opening costs; `assignment_cost` is the distance term only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub open: Vec<usize>,
    pub assignment: Vec<Assignment>,
    pub outliers: BTreeMap<usize, u64>,
    pub assignment_cost: f64,
    pub cost: f64,
}

impl Solution {
    /// Builds a solution, sorting its parts and computing its cost.
    pub fn from_parts(
        instance: &Instance,
        mut open: Vec<usize>,
        mut assignment: Vec<Assignment>,
        outliers: BTreeMap<usize, u64>,
    ) -> Self {
        open.sort_unstable();
        open.dedup();
        assignment.retain(|a| a.amount > 0);
        assignment.sort_unstable();
        let outliers = outliers.into_iter().filter(|&(_, a)| a > 0).collect();
        let assignment_cost = assignment_cost(instance, &assignment);
        let cost = assignment_cost + instance.opening_cost_of(&open);
        Self {
            open,
            assignment,
            outliers,
            assignment_cost,
            cost,
        }
    }

    pub fn total_outliers(&self) -> u64 {
        self.outliers.values().sum()
    }

    pub fn load(&self, facility: usize) -> u64 {
        self.assignment
            .iter()
            .filter(|a| a.facility == facility)
            .map(|a| a.amount)
            .sum()
    }
}

/// `Σ σ(c,f)·d(c,f)^z` in canonical (sorted) order.
pub fn assignment_cost(instance: &Instance, assignment: &[Assignment]) -> f64 {
    let mut sorted: Vec<&Assignment> = assignment.iter().collect();
    sorted.sort_unstable();
    compensated_sum(
        sorted
            .into_iter()
            .map(|a| a.amount as f64 * instance.unit_cost(a.client, a.facility)),
    )
}

/// Violated solution invariants for clients weighted by `weights` and
/// outlier budget `m`.
pub fn solution_violations(
    instance: &Instance,
    weights: &WeightedClientSet,
    m: u64,
    solution: &Solution,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let nf = instance.num_facilities();
    let n = instance.n();
    if solution.open.len() > instance.k {
        out.push(Violation::TooManyFacilities {
            open: solution.open.len(),
            k: instance.k,
        });
    }
    for &f in &solution.open {
        if f >= nf {
            out.push(Violation::IndexOutOfRange {
                what: "facility",
                index: f,
                size: nf,
            });
        }
    }
    let mut assigned: BTreeMap<usize, u64> = BTreeMap::new();
    let mut loads: BTreeMap<usize, u64> = BTreeMap::new();
    for a in &solution.assignment {
        if a.client >= n {
            out.push(Violation::IndexOutOfRange {
                what: "client",
                index: a.client,
                size: n,
            });
            continue;
        }
        if a.facility >= nf {
            out.push(Violation::IndexOutOfRange {
                what: "facility",
                index: a.facility,
                size: nf,
            });
            continue;
        }
        *assigned.entry(a.client).or_insert(0) += a.amount;
        *loads.entry(a.facility).or_insert(0) += a.amount;
    }
    if !out.is_empty() {
        return out;
    }
    for (&f, &load) in &loads {
        if load > 0 && !solution.open.contains(&f) {
            out.push(Violation::ClosedFacility {
                facility: f,
                point: instance.facilities[f],
            });
        }
        if load > instance.capacities[f] {
            out.push(Violation::CapacityExceeded {
                facility: f,
                point: instance.facilities[f],
                load,
                capacity: instance.capacities[f],
            });
        }
    }
    let mut clients: std::collections::BTreeSet<usize> = weights.iter().map(|(c, _)| c).collect();
    clients.extend(assigned.keys().copied());
    clients.extend(solution.outliers.keys().copied());
    for c in clients {
        let a = assigned.get(&c).copied().unwrap_or(0);
        let o = solution.outliers.get(&c).copied().unwrap_or(0);
        let w = weights.weight(c);
        if a + o != w {
            out.push(Violation::WeightMismatch {
                client: c,
                assigned: a,
                outlier: o,
                weight: w,
            });
        }
    }
    let total_out = solution.total_outliers();
    if total_out > m {
        out.push(Violation::OutliersExceeded {
            outliers: total_out,
            budget: m,
        });
    }
    let recomputed =
        assignment_cost(instance, &solution.assignment) + instance.opening_cost_of(&solution.open);
    if !approx_eq(recomputed, solution.cost, COST_TOLERANCE) {
        out.push(Violation::CostMismatch {
            reported: solution.cost,
            recomputed,
        });
    }
    out
}

/// Cost of an unweighted solution, `Σ σ(c,f)·d(c,f)^z + Σ_{f∈F} o_f`.
///
/// Fails with [`Error::InvalidSolution`] when any solution invariant is
/// violated (other than a stale `cost` field, which is ignored here).
pub fn evaluate_cost(instance: &Instance, solution: &Solution) -> Result<f64> {
    evaluate_weighted_cost(instance, &instance.unit_weights(), instance.m, solution)
}

pub fn evaluate_weighted_cost(
    instance: &Instance,
    weights: &WeightedClientSet,
    m: u64,
    solution: &Solution,
) -> Result<f64> {
    let violations: Vec<_> = solution_violations(instance, weights, m, solution)
        .into_iter()
        .filter(|v| !matches!(v, Violation::CostMismatch { .. }))
        .collect();
    if !violations.is_empty() {
        return Err(Error::InvalidSolution(violations));
    }
    Ok(assignment_cost(instance, &solution.assignment) + instance.opening_cost_of(&solution.open))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> MetricSpace {
        MetricSpace::Points(points.iter().map(|&x| vec![x]).collect())
    }

    fn single(client: usize, facility: usize, amount: u64) -> Assignment {
        Assignment {
            client,
            facility,
            amount,
        }
    }

    #[test]
    fn colocated_client_costs_zero() {
        let inst = Instance::new(line(&[0.0]), vec![0], vec![0], vec![1], 1, 0);
        let sol = Solution::from_parts(&inst, vec![0], vec![single(0, 0, 1)], BTreeMap::new());
        assert_eq!(evaluate_cost(&inst, &sol).unwrap(), 0.0);
    }

    #[test]
    fn squared_distance_term() {
        let inst = Instance::new(line(&[0.0, 3.0]), vec![0], vec![1], vec![1], 1, 0).with_z(2.0);
        let sol = Solution::from_parts(&inst, vec![0], vec![single(0, 0, 1)], BTreeMap::new());
        assert_eq!(evaluate_cost(&inst, &sol).unwrap(), 9.0);
    }

    #[test]
    fn best_single_outlier_is_the_farthest() {
        // Clients at distances 1, 2, 5 from one capacity-3 facility, m = 1.
        let inst = Instance::new(
            line(&[0.0, 1.0, 2.0, 5.0]),
            vec![1, 2, 3],
            vec![0],
            vec![3],
            1,
            1,
        );
        let mut best = f64::INFINITY;
        for dropped in 0..3 {
            let assignment = (0..3)
                .filter(|&c| c != dropped)
                .map(|c| single(c, 0, 1))
                .collect();
            let outliers = BTreeMap::from([(dropped, 1)]);
            let sol = Solution::from_parts(&inst, vec![0], assignment, outliers);
            best = best.min(evaluate_cost(&inst, &sol).unwrap());
        }
        assert_eq!(best, 3.0);
    }

    #[test]
    fn invalid_solutions_are_rejected() {
        let inst = Instance::new(line(&[0.0, 1.0, 2.0]), vec![1, 2], vec![0], vec![1], 1, 0);
        let sol = Solution::from_parts(
            &inst,
            vec![0],
            vec![single(0, 0, 1), single(1, 0, 1)],
            BTreeMap::new(),
        );
        let err = evaluate_cost(&inst, &sol).unwrap_err();
        assert!(err.to_string().contains("capacity exceeded"), "{err}");
    }

    #[test]
    fn opening_costs_are_charged_once() {
        let inst = Instance::new(line(&[0.0, 2.0]), vec![1], vec![0], vec![1], 1, 0)
            .with_opening_costs(vec![1.5]);
        let sol = Solution::from_parts(&inst, vec![0], vec![single(0, 0, 1)], BTreeMap::new());
        assert_eq!(evaluate_cost(&inst, &sol).unwrap(), 3.5);
    }

    #[test]
    fn valid_euclidean_instance_has_empty_report() {
        let inst = Instance::new(line(&[0.0, 1.0, 4.0]), vec![0, 1], vec![2], vec![2], 1, 0);
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn asymmetric_matrix_is_reported() {
        let metric = MetricSpace::Matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        let inst = Instance::new(metric, vec![0], vec![1], vec![1], 1, 0);
        let report = validate_instance(&inst);
        assert!(
            report.contains(&Violation::Asymmetric { i: 0, j: 1 }),
            "{report:?}"
        );
    }

    #[test]
    fn triangle_violation_is_reported() {
        let metric = MetricSpace::Matrix(vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ]);
        let inst = Instance::new(metric, vec![0, 1], vec![2], vec![2], 1, 0);
        assert!(validate_instance(&inst)
            .iter()
            .any(|v| matches!(v, Violation::Triangle { .. })));
    }

    #[test]
    fn insufficient_capacity_is_reported() {
        // Capacities {1,1}, k = 1, n = 3, m = 1: best capacity 1 = n - m - 1.
        let inst = Instance::new(
            line(&[0.0, 1.0, 2.0, 3.0, 4.0]),
            vec![0, 1, 2],
            vec![3, 4],
            vec![1, 1],
            1,
            1,
        );
        let report = validate_instance(&inst);
        assert_eq!(
            report,
            vec![Violation::InsufficientCapacity {
                capacity: 1,
                required: 2
            }]
        );
    }

    #[test]
    fn weighted_set_tracks_total() {
        let mut w = WeightedClientSet::new();
        w.add(3, 2);
        w.set(1, 5);
        w.set(3, 0);
        assert_eq!(w.total_weight(), 5);
        assert_eq!(w.support(), vec![(1, 5)]);
        assert_eq!(w.len(), 2);
    }
}
