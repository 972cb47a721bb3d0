//! Integral minimum-cost flow and the outlier (MCFO) reduction built on it.
//!
//! Node demands follow the "positive = must send, negative = must receive"
//! convention. A node may additionally absorb up to `sink_capacity` units
//! of inflow without being required to; facilities are modelled that way.

mod mcfo;
mod probe;

pub use mcfo::{cost_m, solve_mcfo, wcost_m, CostMatrix, McfoResult};
pub use probe::{build_fi, evaluate_g, RingProbe};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FlowNode {
    pub demand: i64,
    #[serde(default)]
    pub sink_capacity: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub cost: f64,
    /// `None` is unbounded.
    pub capacity: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowNetwork {
    pub nodes: Vec<FlowNode>,
    pub arcs: Vec<FlowArc>,
}

impl FlowNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, demand: i64, sink_capacity: u64) -> usize {
        self.nodes.push(FlowNode {
            demand,
            sink_capacity,
        });
        self.nodes.len() - 1
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cost: f64, capacity: Option<u64>) -> usize {
        self.arcs.push(FlowArc {
            from,
            to,
            cost,
            capacity,
        });
        self.arcs.len() - 1
    }

    /// Total demand that must leave its node.
    pub fn total_supply(&self) -> u64 {
        self.nodes
            .iter()
            .filter(|n| n.demand > 0)
            .map(|n| n.demand as u64)
            .sum()
    }

    /// Total inflow that nodes require.
    pub fn total_required_inflow(&self) -> u64 {
        self.nodes
            .iter()
            .filter(|n| n.demand < 0)
            .map(|n| n.demand.unsigned_abs())
            .sum()
    }

    fn check(&self) -> Result<()> {
        let n = self.nodes.len();
        for (i, a) in self.arcs.iter().enumerate() {
            if a.from >= n || a.to >= n {
                return Err(Error::InvalidNetwork(format!(
                    "arc {i} references a missing node"
                )));
            }
            if a.cost < 0.0 || !a.cost.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "arc {i} has cost {} (costs must be finite and nonnegative)",
                    a.cost
                )));
            }
        }
        Ok(())
    }
}

/// An integral flow: per-arc amounts, per-node absorbed inflow, total cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    pub flows: Vec<u64>,
    /// Inflow taken by each node's optional sink capacity.
    pub absorbed: Vec<u64>,
    pub cost: f64,
}

impl FlowResult {
    /// Conservation and capacity violations, as messages.
    pub fn violations(&self, network: &FlowNetwork) -> Vec<String> {
        let mut out = Vec::new();
        let n = network.nodes.len();
        if self.flows.len() != network.arcs.len() || self.absorbed.len() != n {
            out.push("result shape does not match network".to_string());
            return out;
        }
        let mut net = vec![0i128; n];
        for (i, (a, &x)) in network.arcs.iter().zip(&self.flows).enumerate() {
            if let Some(cap) = a.capacity {
                if x > cap {
                    out.push(format!("arc {i} carries {x} > capacity {cap}"));
                }
            }
            net[a.from] += x as i128;
            net[a.to] -= x as i128;
        }
        for (v, node) in network.nodes.iter().enumerate() {
            if self.absorbed[v] > node.sink_capacity {
                out.push(format!(
                    "node {v} absorbs {} > {}",
                    self.absorbed[v], node.sink_capacity
                ));
            }
            let balance = net[v] + self.absorbed[v] as i128;
            if balance != node.demand as i128 {
                out.push(format!(
                    "node {v}: net outflow {balance} != demand {}",
                    node.demand
                ));
            }
        }
        let recomputed = arc_cost(network, &self.flows);
        if (recomputed - self.cost).abs() > 1e-9 * recomputed.abs().max(1.0) {
            out.push(format!("cost {} != recomputed {recomputed}", self.cost));
        }
        out
    }

    /// True when the residual graph of this flow contains a cycle of
    /// negative cost, i.e. the flow is not optimal.
    pub fn has_negative_residual_cycle(&self, network: &FlowNetwork) -> bool {
        // Residual arcs over the original nodes plus one virtual sink that
        // models the optional absorption capacities.
        let n = network.nodes.len();
        let sink = n;
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for (a, &x) in network.arcs.iter().zip(&self.flows) {
            if a.capacity.is_none_or(|c| x < c) {
                edges.push((a.from, a.to, a.cost));
            }
            if x > 0 {
                edges.push((a.to, a.from, -a.cost));
            }
        }
        for (v, node) in network.nodes.iter().enumerate() {
            if self.absorbed[v] < node.sink_capacity {
                edges.push((v, sink, 0.0));
            }
            if self.absorbed[v] > 0 {
                edges.push((sink, v, 0.0));
            }
        }
        let scale = network.arcs.iter().map(|a| a.cost).fold(1.0, f64::max);
        let tol = 1e-9 * scale;
        let mut dist = vec![0.0f64; n + 1];
        for _ in 0..=n {
            let mut changed = false;
            for &(u, v, c) in &edges {
                if dist[u] + c < dist[v] - tol {
                    dist[v] = dist[u] + c;
                    changed = true;
                }
            }
            if !changed {
                return false;
            }
        }
        true
    }
}

pub(crate) fn arc_cost(network: &FlowNetwork, flows: &[u64]) -> f64 {
    compensated_sum(
        network
            .arcs
            .iter()
            .zip(flows)
            .filter(|(_, &x)| x > 0)
            .map(|(a, &x)| x as f64 * a.cost),
    )
}

/// Minimum-cost integral flow by successive shortest augmenting paths with
/// node potentials.
///
/// Every positive demand is sent in full and every negative demand is met
/// exactly; optional sink capacities absorb the rest.
pub fn solve_mcf(network: &FlowNetwork) -> Result<FlowResult> {
    network.check()?;
    let supply = network.total_supply();
    let required = network.total_required_inflow();
    let optional: u64 = network.nodes.iter().map(|n| n.sink_capacity).sum();
    if supply < required {
        return Err(Error::Infeasible(format!(
            "required inflow {required} exceeds total supply {supply}"
        )));
    }
    if supply - required > optional {
        return Err(Error::Infeasible(format!(
            "supply {supply} exceeds required inflow {required} plus sink capacity {optional}"
        )));
    }

    let n = network.nodes.len();
    let (source, t_required, t_optional, target) = (n, n + 1, n + 2, n + 3);
    let mut graph = Residual::new(n + 4);
    let unbounded = supply.max(1);
    let arc_ids: Vec<usize> = network
        .arcs
        .iter()
        .map(|a| {
            graph.add(
                a.from,
                a.to,
                a.capacity.unwrap_or(unbounded).min(unbounded),
                a.cost,
            )
        })
        .collect();
    let mut sink_ids = vec![usize::MAX; n];
    for (v, node) in network.nodes.iter().enumerate() {
        if node.demand > 0 {
            graph.add(source, v, node.demand as u64, 0.0);
        } else if node.demand < 0 {
            graph.add(v, t_required, node.demand.unsigned_abs(), 0.0);
        }
        if node.sink_capacity > 0 {
            sink_ids[v] = graph.add(v, t_optional, node.sink_capacity, 0.0);
        }
    }
    graph.add(t_required, target, required, 0.0);
    graph.add(t_optional, target, supply - required, 0.0);

    let sent = graph.min_cost_flow(source, target, supply);
    if sent < supply {
        return Err(Error::Infeasible(format!(
            "only {sent} of {supply} units can be routed under the arc capacities"
        )));
    }

    let flows: Vec<u64> = arc_ids.iter().map(|&e| graph.flow(e)).collect();
    let absorbed = sink_ids
        .iter()
        .map(|&e| if e == usize::MAX { 0 } else { graph.flow(e) })
        .collect();
    let cost = arc_cost(network, &flows);
    Ok(FlowResult {
        flows,
        absorbed,
        cost,
    })
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    to: usize,
    cap: u64,
    cost: f64,
}

/// Residual graph stored as paired forward/backward edges.
struct Residual {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    original_cap: Vec<u64>,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Residual {
    fn new(n: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            original_cap: Vec::new(),
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: u64, cost: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        self.original_cap.push(cap);
        id
    }

    fn flow(&self, id: usize) -> u64 {
        self.edges[id ^ 1].cap
    }

    fn min_cost_flow(&mut self, s: usize, t: usize, limit: u64) -> u64 {
        let n = self.adj.len();
        let mut potential = vec![0.0f64; n];
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        let mut sent = 0u64;
        while sent < limit {
            dist.iter_mut().for_each(|d| *d = f64::INFINITY);
            parent.iter_mut().for_each(|p| *p = usize::MAX);
            done.iter_mut().for_each(|d| *d = false);
            dist[s] = 0.0;
            heap.push(Entry(0.0, s));
            while let Some(Entry(d, u)) = heap.pop() {
                if done[u] {
                    continue;
                }
                done[u] = true;
                if u == t {
                    break;
                }
                for &e in &self.adj[u] {
                    let edge = self.edges[e];
                    if edge.cap == 0 || done[edge.to] {
                        continue;
                    }
                    let reduced = (edge.cost + potential[u] - potential[edge.to]).max(0.0);
                    let nd = d + reduced;
                    if nd < dist[edge.to] {
                        dist[edge.to] = nd;
                        parent[edge.to] = e;
                        heap.push(Entry(nd, edge.to));
                    }
                }
            }
            if !done[t] {
                break;
            }
            // Unsettled nodes are at least dist[t] away, which keeps the
            // reduced costs nonnegative.
            let reach = dist[t];
            for v in 0..n {
                potential[v] += if done[v] { dist[v] } else { reach };
            }
            heap.clear();
            let mut push = limit - sent;
            let mut v = t;
            while v != s {
                let e = parent[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = parent[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            sent += push;
        }
        debug_assert!(self.original_cap.len() * 2 == self.edges.len());
        sent
    }
}
