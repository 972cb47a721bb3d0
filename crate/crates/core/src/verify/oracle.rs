//! Exhaustive reference solvers for tiny inputs.
//!
//! Nothing here calls into the flow, coreset or solver modules: every
//! optimum is found by plain enumeration of integral decisions.

use num_rational::Ratio;

use crate::flow::FlowNetwork;
use crate::model::Instance;

/// Cheapest integral flow by enumerating every arc amount. All arcs must
/// be capacitated. `None` when no feasible flow exists.
pub fn exhaustive_flow(network: &FlowNetwork) -> Option<(f64, Vec<u64>)> {
    let n = network.nodes.len();
    let caps: Vec<u64> = network
        .arcs
        .iter()
        .map(|a| {
            a.capacity
                .expect("exhaustive enumeration needs capacitated arcs")
        })
        .collect();
    // Arc index after which a node's balance is final.
    let mut settle_at: Vec<Vec<usize>> = vec![Vec::new(); network.arcs.len() + 1];
    for v in 0..n {
        let last = network
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.from == v || a.to == v)
            .map(|(i, _)| i + 1)
            .max()
            .unwrap_or(0);
        settle_at[last].push(v);
    }
    let node_ok = |v: usize, net_out: i64| {
        let absorbed = network.nodes[v].demand - net_out;
        absorbed >= 0 && absorbed as u64 <= network.nodes[v].sink_capacity
    };
    if !settle_at[0].iter().all(|&v| node_ok(v, 0)) {
        return None;
    }

    struct State<'a> {
        network: &'a FlowNetwork,
        caps: Vec<u64>,
        settle_at: Vec<Vec<usize>>,
        flows: Vec<u64>,
        net_out: Vec<i64>,
        best: Option<(f64, Vec<u64>)>,
    }

    fn dfs(s: &mut State<'_>, i: usize, cost: f64, node_ok: &dyn Fn(usize, i64) -> bool) {
        if let Some((b, _)) = &s.best {
            if cost >= *b {
                return;
            }
        }
        if i == s.flows.len() {
            s.best = Some((cost, s.flows.clone()));
            return;
        }
        let arc = s.network.arcs[i];
        for x in 0..=s.caps[i] {
            s.flows[i] = x;
            s.net_out[arc.from] += x as i64;
            s.net_out[arc.to] -= x as i64;
            let ok = s.settle_at[i + 1].iter().all(|&v| node_ok(v, s.net_out[v]));
            if ok {
                dfs(s, i + 1, cost + x as f64 * arc.cost, node_ok);
            }
            s.net_out[arc.from] -= x as i64;
            s.net_out[arc.to] += x as i64;
        }
        s.flows[i] = 0;
    }

    let mut state = State {
        network,
        caps,
        settle_at,
        flows: vec![0; network.arcs.len()],
        net_out: vec![0; n],
        best: None,
    };
    dfs(&mut state, 0, 0.0, &node_ok);
    state.best
}

/// Cheapest assignment of row demands to column capacities leaving at most
/// `m` units unserved. `costs[r][f] = ∞` forbids a pair.
pub fn exhaustive_mcfo(
    capacities: &[u64],
    demands: &[u64],
    costs: &[Vec<f64>],
    m: u64,
) -> Option<f64> {
    let rows = demands.len();
    let total: u64 = demands.iter().sum();
    let mut best: Option<f64> = None;
    let mut left = capacities.to_vec();

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        r: usize,
        f: usize,
        row_left: u64,
        served: u64,
        cost: f64,
        ctx: (&[u64], &[Vec<f64>], u64, u64),
        left: &mut Vec<u64>,
        best: &mut Option<f64>,
    ) {
        let (demands, costs, total, m) = ctx;
        if best.is_some_and(|b| cost >= b) {
            return;
        }
        let rows = demands.len();
        if r == rows {
            if served + m >= total {
                *best = Some(cost);
            }
            return;
        }
        let cols = left.len();
        if f == cols {
            let next = demands.get(r + 1).copied().unwrap_or(0);
            dfs(r + 1, 0, next, served, cost, ctx, left, best);
            return;
        }
        let c = costs[r][f];
        let most = if c.is_finite() {
            row_left.min(left[f])
        } else {
            0
        };
        for x in 0..=most {
            left[f] -= x;
            let step = if x == 0 { 0.0 } else { x as f64 * c };
            dfs(
                r,
                f + 1,
                row_left - x,
                served + x,
                cost + step,
                ctx,
                left,
                best,
            );
            left[f] += x;
        }
    }

    if rows == 0 {
        return Some(0.0);
    }
    dfs(
        0,
        0,
        demands[0],
        0,
        0.0,
        (demands, costs, total, m),
        &mut left,
        &mut best,
    );
    best
}

fn unit_cost(instance: &Instance, client: usize, facility: usize) -> f64 {
    let d = instance
        .metric
        .distance(instance.clients[client], instance.facilities[facility]);
    if instance.z == 1.0 {
        d
    } else {
        d.powf(instance.z)
    }
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&x| x + 1);
            for i in start..n {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// CkMO optimum by enumerating facility sets of size at most `k`, outlier
/// sets of size at most `m`, and every capacity-respecting assignment of
/// the remaining clients. Intended for `n ≤ 8`.
pub fn exhaustive_ckmo(instance: &Instance) -> Option<f64> {
    let n = instance.n();
    let nf = instance.num_facilities();
    let mut best: Option<f64> = None;
    for open in subsets_up_to(nf, instance.k) {
        let opening: f64 = open.iter().map(|&f| instance.opening_costs[f]).sum();
        for dropped in subsets_up_to(n, instance.m as usize) {
            let served: Vec<usize> = (0..n).filter(|c| !dropped.contains(c)).collect();
            if !served.is_empty() && open.is_empty() {
                continue;
            }
            let mut left: Vec<u64> = open.iter().map(|&f| instance.capacities[f]).collect();
            assign_all(instance, &served, &open, 0, opening, &mut left, &mut best);
        }
    }
    best
}

fn assign_all(
    instance: &Instance,
    served: &[usize],
    open: &[usize],
    i: usize,
    cost: f64,
    left: &mut [u64],
    best: &mut Option<f64>,
) {
    if best.is_some_and(|b| cost >= b) {
        return;
    }
    if i == served.len() {
        *best = Some(cost);
        return;
    }
    for (slot, &f) in open.iter().enumerate() {
        if left[slot] == 0 {
            continue;
        }
        left[slot] -= 1;
        assign_all(
            instance,
            served,
            open,
            i + 1,
            cost + unit_cost(instance, served[i], f),
            left,
            best,
        );
        left[slot] += 1;
    }
}

/// Cheapest fair integral assignment of weighted clients to `open`.
///
/// Every client splits its weight over the open facilities and an outlier
/// slot; group outlier budgets, capacities and the `β ≤ share ≤ α`
/// constraints (exact rationals) are enforced. Opening costs are included.
#[allow(clippy::too_many_arguments)]
pub fn exhaustive_fair(
    instance: &Instance,
    weights: &[(usize, u64)],
    open: &[usize],
    group_of: &[usize],
    alpha: &[Ratio<u64>],
    beta: &[Ratio<u64>],
    budgets: &[u64],
) -> Option<f64> {
    let groups = alpha.len();
    let opening: f64 = open.iter().map(|&f| instance.opening_costs[f]).sum();

    struct Ctx<'a> {
        instance: &'a Instance,
        weights: &'a [(usize, u64)],
        open: &'a [usize],
        group_of: &'a [usize],
        alpha: &'a [Ratio<u64>],
        beta: &'a [Ratio<u64>],
        loads: Vec<Vec<u64>>,
        dropped: Vec<u64>,
        budgets: &'a [u64],
        best: Option<f64>,
    }

    fn fair(ctx: &Ctx<'_>) -> bool {
        ctx.loads.iter().all(|by_group| {
            let load: u128 = by_group.iter().map(|&y| y as u128).sum();
            by_group.iter().enumerate().all(|(g, &y)| {
                let y = y as u128;
                let (bn, bd) = (*ctx.beta[g].numer() as u128, *ctx.beta[g].denom() as u128);
                let (an, ad) = (*ctx.alpha[g].numer() as u128, *ctx.alpha[g].denom() as u128);
                bn * load <= bd * y && ad * y <= an * load
            })
        })
    }

    fn client(ctx: &mut Ctx<'_>, i: usize, cost: f64) {
        if ctx.best.is_some_and(|b| cost >= b) {
            return;
        }
        if i == ctx.weights.len() {
            if fair(ctx) {
                ctx.best = Some(cost);
            }
            return;
        }
        let (c, w) = ctx.weights[i];
        split(ctx, i, c, w, 0, cost);
    }

    fn split(ctx: &mut Ctx<'_>, i: usize, c: usize, rest: u64, slot: usize, cost: f64) {
        let g = ctx.group_of[c];
        if slot == ctx.open.len() {
            // Whatever is left is dropped.
            if ctx.dropped[g] + rest <= ctx.budgets[g] {
                ctx.dropped[g] += rest;
                client(ctx, i + 1, cost);
                ctx.dropped[g] -= rest;
            }
            return;
        }
        let f = ctx.open[slot];
        let used: u64 = ctx.loads[slot].iter().sum();
        let room = ctx.instance.capacities[f].saturating_sub(used);
        let unit = unit_cost(ctx.instance, c, f);
        for x in 0..=rest.min(room) {
            ctx.loads[slot][g] += x;
            split(ctx, i, c, rest - x, slot + 1, cost + x as f64 * unit);
            ctx.loads[slot][g] -= x;
        }
    }

    let mut ctx = Ctx {
        instance,
        weights,
        open,
        group_of,
        alpha,
        beta,
        loads: vec![vec![0; groups]; open.len()],
        dropped: vec![0; groups],
        budgets,
        best: None,
    };
    client(&mut ctx, 0, opening);
    ctx.best
}
