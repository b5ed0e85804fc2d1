use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};

/// Directed arc with integer capacity and cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
    pub cost: i64,
}

/// Integer network with a designated source and sink and optional node
/// balances (positive = supply, negative = demand).
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    nodes: usize,
    arcs: Vec<Arc>,
    source: usize,
    sink: usize,
    balances: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Result<Self> {
        if source >= nodes || sink >= nodes || source == sink {
            return Err(Error::invalid(format!("bad source/sink {source}/{sink} for {nodes} nodes")));
        }
        Ok(FlowNetwork { nodes, arcs: Vec::new(), source, sink, balances: vec![0; nodes] })
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: i64, cost: i64) -> Result<usize> {
        if from >= self.nodes || to >= self.nodes {
            return Err(Error::invalid(format!("arc {from}->{to} outside {} nodes", self.nodes)));
        }
        if from == to {
            return Err(Error::invalid(format!("self-loop at node {from}")));
        }
        if capacity < 0 {
            return Err(Error::invalid(format!("negative capacity on arc {from}->{to}")));
        }
        self.arcs.push(Arc { from, to, capacity, cost });
        Ok(self.arcs.len() - 1)
    }

    pub fn set_balance(&mut self, node: usize, balance: i64) {
        self.balances[node] = balance;
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn balances(&self) -> &[i64] {
        &self.balances
    }
}

/// Residual graph with paired edges: edge `2a` is arc `a`, `2a + 1` its reverse.
struct Residual {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
}

impl Residual {
    fn new(nodes: usize) -> Self {
        Residual { adj: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new(), cost: Vec::new() }
    }

    fn add(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let e = self.to.len();
        self.adj[from].push(e);
        self.to.push(to);
        self.cap.push(cap);
        self.cost.push(cost);
        self.adj[to].push(e + 1);
        self.to.push(from);
        self.cap.push(0);
        self.cost.push(-cost);
        e
    }

    fn from_network(net: &FlowNetwork, extra_nodes: usize) -> Self {
        let mut r = Residual::new(net.nodes + extra_nodes);
        for a in &net.arcs {
            r.add(a.from, a.to, a.capacity, a.cost);
        }
        r
    }

    fn flow(&self, e: usize) -> i64 {
        self.cap[e ^ 1]
    }
}

/// Result of a maximum-flow computation.
#[derive(Clone, Debug)]
pub struct MaxFlow {
    pub value: i64,
    /// Flow on each arc of the input network, by arc index.
    pub flows: Vec<i64>,
    /// Source side of a minimum cut: nodes reachable from the source in the
    /// final residual network. The cut capacity equals `value`.
    pub source_side: Vec<bool>,
}

/// Maximum flow from source to sink (Dinic). Node balances are ignored.
pub fn max_flow(net: &FlowNetwork) -> MaxFlow {
    let mut r = Residual::from_network(net, 0);
    let n = net.nodes;
    let (s, t) = (net.source, net.sink);
    let mut value = 0i64;
    loop {
        let level = bfs_levels(&r, s);
        if level[t] == usize::MAX {
            break;
        }
        let mut next = vec![0usize; n];
        loop {
            let pushed = dinic_dfs(&mut r, &level, &mut next, s, t, i64::MAX);
            if pushed == 0 {
                break;
            }
            value += pushed;
        }
    }
    let level = bfs_levels(&r, s);
    MaxFlow {
        value,
        flows: (0..net.arcs.len()).map(|a| r.flow(2 * a)).collect(),
        source_side: level.iter().map(|&l| l != usize::MAX).collect(),
    }
}

fn bfs_levels(r: &Residual, s: usize) -> Vec<usize> {
    let mut level = vec![usize::MAX; r.adj.len()];
    level[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &e in &r.adj[u] {
            let v = r.to[e];
            if r.cap[e] > 0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    level
}

fn dinic_dfs(r: &mut Residual, level: &[usize], next: &mut [usize], u: usize, t: usize, limit: i64) -> i64 {
    if u == t {
        return limit;
    }
    while next[u] < r.adj[u].len() {
        let e = r.adj[u][next[u]];
        let v = r.to[e];
        if r.cap[e] > 0 && level[v] == level[u] + 1 {
            let pushed = dinic_dfs(r, level, next, v, t, limit.min(r.cap[e]));
            if pushed > 0 {
                r.cap[e] -= pushed;
                r.cap[e ^ 1] += pushed;
                return pushed;
            }
        }
        next[u] += 1;
    }
    0
}

/// Optimal integral flow with its dual certificate.
#[derive(Clone, Debug)]
pub struct MinCostFlow {
    /// Flow on each arc of the input network, by arc index.
    pub flows: Vec<i64>,
    pub cost: i64,
    /// Node potentials `pi` such that `cost + pi[from] - pi[to] >= 0` on every
    /// arc with residual capacity and `<= 0` on every arc carrying flow.
    pub potentials: Vec<i64>,
}

impl MinCostFlow {
    pub fn reduced_cost(&self, arc: &Arc) -> i64 {
        arc.cost + self.potentials[arc.from] - self.potentials[arc.to]
    }

    /// Checks complementary slackness against `net`.
    pub fn certifies(&self, net: &FlowNetwork) -> bool {
        net.arcs.iter().zip(&self.flows).all(|(a, &f)| {
            let rc = self.reduced_cost(a);
            (f == a.capacity || rc >= 0) && (f == 0 || rc <= 0)
        })
    }
}

/// Minimum-cost flow shipping `value` units from source to sink while also
/// meeting the node balances.
///
/// Successive shortest augmenting paths with node potentials; initial
/// potentials come from Bellman-Ford when some cost is negative. Among shortest
/// paths the lowest-index node is settled first, so results are reproducible.
///
/// Returns `Ok(None)` when the requested flow is infeasible and an error for a
/// malformed network (balances not summing to zero, negative cycle).
pub fn min_cost_flow(net: &FlowNetwork, value: i64) -> Result<Option<MinCostFlow>> {
    if value < 0 {
        return Err(Error::invalid("negative flow value"));
    }
    let n = net.nodes;
    let mut balance = net.balances.clone();
    balance[net.source] += value;
    balance[net.sink] -= value;
    if balance.iter().sum::<i64>() != 0 {
        return Err(Error::invalid("node balances do not sum to zero"));
    }
    let (ss, tt) = (n, n + 1);
    let mut r = Residual::from_network(net, 2);
    let mut required = 0i64;
    for (v, &b) in balance.iter().enumerate() {
        if b > 0 {
            r.add(ss, v, b, 0);
            required += b;
        } else if b < 0 {
            r.add(v, tt, -b, 0);
        }
    }

    let total = n + 2;
    let mut pi = vec![0i64; total];
    if net.arcs.iter().any(|a| a.cost < 0 && a.capacity > 0) {
        pi = bellman_ford_potentials(&r)?;
    }

    let mut shipped = 0i64;
    let mut dist = vec![i64::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut done = vec![false; total];
    while shipped < required {
        dist.fill(i64::MAX);
        parent.fill(usize::MAX);
        done.fill(false);
        dist[ss] = 0;
        let mut heap = BinaryHeap::from([Reverse((0i64, ss))]);
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == tt {
                break;
            }
            for &e in &r.adj[u] {
                if r.cap[e] == 0 {
                    continue;
                }
                let v = r.to[e];
                let nd = d + r.cost[e] + pi[u] - pi[v];
                if nd < dist[v] {
                    dist[v] = nd;
                    parent[v] = e;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if !done[tt] {
            return Ok(None);
        }
        let cap_d = dist[tt];
        for v in 0..total {
            pi[v] += if done[v] { dist[v] } else { cap_d };
        }
        let mut push = required - shipped;
        let mut v = tt;
        while v != ss {
            let e = parent[v];
            push = push.min(r.cap[e]);
            v = r.to[e ^ 1];
        }
        let mut v = tt;
        while v != ss {
            let e = parent[v];
            r.cap[e] -= push;
            r.cap[e ^ 1] += push;
            v = r.to[e ^ 1];
        }
        shipped += push;
    }

    let flows: Vec<i64> = (0..net.arcs.len()).map(|a| r.flow(2 * a)).collect();
    let cost = net.arcs.iter().zip(&flows).map(|(a, f)| a.cost * f).sum();
    pi.truncate(n);
    Ok(Some(MinCostFlow { flows, cost, potentials: pi }))
}

/// Potentials with nonnegative reduced costs on all residual edges, from a
/// virtual root joined to every node at cost zero.
fn bellman_ford_potentials(r: &Residual) -> Result<Vec<i64>> {
    let n = r.adj.len();
    let mut d = vec![0i64; n];
    let mut in_queue = vec![true; n];
    let mut relaxations = vec![0usize; n];
    let mut queue: VecDeque<usize> = (0..n).collect();
    while let Some(u) = queue.pop_front() {
        in_queue[u] = false;
        for &e in &r.adj[u] {
            if r.cap[e] == 0 {
                continue;
            }
            let v = r.to[e];
            if d[u] + r.cost[e] < d[v] {
                d[v] = d[u] + r.cost[e];
                relaxations[v] += 1;
                if relaxations[v] > n {
                    return Err(Error::invalid("network contains a negative-cost cycle"));
                }
                if !in_queue[v] {
                    in_queue[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn transport(costs: [[i64; 2]; 2]) -> FlowNetwork {
        // 0 = source, 1..=2 rows, 3..=4 columns, 5 = sink
        let mut net = FlowNetwork::new(6, 0, 5).unwrap();
        for i in 0..2 {
            net.add_arc(0, 1 + i, 1, 0).unwrap();
            net.add_arc(3 + i, 5, 1, 0).unwrap();
        }
        for i in 0..2 {
            for j in 0..2 {
                net.add_arc(1 + i, 3 + j, 1, costs[i][j]).unwrap();
            }
        }
        net
    }

    #[test]
    fn single_arc_max_flow() {
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        net.add_arc(0, 1, 5, 0).unwrap();
        let mf = max_flow(&net);
        assert_eq!(mf.value, 5);
        assert_eq!(mf.flows, vec![5]);
        assert_eq!(mf.source_side, vec![true, false]);
    }

    #[test]
    fn parallel_paths_max_flow() {
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        net.add_arc(0, 1, 2, 0).unwrap();
        net.add_arc(1, 3, 9, 0).unwrap();
        net.add_arc(0, 2, 3, 0).unwrap();
        net.add_arc(2, 3, 9, 0).unwrap();
        assert_eq!(max_flow(&net).value, 5);
    }

    #[test]
    fn bipartite_max_flow() {
        assert_eq!(max_flow(&transport([[0, 0], [0, 0]])).value, 2);
    }

    #[test]
    fn cut_capacity_matches_value() {
        let mut net = FlowNetwork::new(5, 0, 4).unwrap();
        for (u, v, c) in [(0, 1, 3), (0, 2, 2), (1, 2, 1), (1, 3, 2), (2, 3, 2), (3, 4, 3), (2, 4, 1)] {
            net.add_arc(u, v, c, 0).unwrap();
        }
        let mf = max_flow(&net);
        let cut: i64 = net
            .arcs()
            .iter()
            .filter(|a| mf.source_side[a.from] && !mf.source_side[a.to])
            .map(|a| a.capacity)
            .sum();
        assert_eq!(cut, mf.value);
        assert_eq!(mf.value, 4);
    }

    #[test]
    fn one_path_cost() {
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        net.add_arc(0, 1, 4, 3).unwrap();
        let r = min_cost_flow(&net, 2).unwrap().unwrap();
        assert_eq!(r.cost, 6);
        assert!(r.certifies(&net));
    }

    #[test]
    fn diagonal_transportation() {
        let net = transport([[0, 1], [1, 0]]);
        let r = min_cost_flow(&net, 2).unwrap().unwrap();
        assert_eq!(r.cost, 0);
        // arcs 4..8 are (r0,c0),(r0,c1),(r1,c0),(r1,c1)
        assert_eq!(&r.flows[4..8], &[1, 0, 0, 1]);
        assert!(r.certifies(&net));
    }

    #[test]
    fn off_diagonal_transportation() {
        let net = transport([[0, 1], [0, 5]]);
        let r = min_cost_flow(&net, 2).unwrap().unwrap();
        assert_eq!(r.cost, 1);
        assert_eq!(&r.flows[4..8], &[0, 1, 1, 0]);
    }

    #[test]
    fn infeasible_value_reported() {
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        net.add_arc(0, 1, 1, 0).unwrap();
        assert!(min_cost_flow(&net, 2).unwrap().is_none());
    }

    #[test]
    fn negative_costs_use_initial_potentials() {
        let mut net = FlowNetwork::new(3, 0, 2).unwrap();
        net.add_arc(0, 1, 2, -4).unwrap();
        net.add_arc(1, 2, 2, 1).unwrap();
        net.add_arc(0, 2, 2, -1).unwrap();
        let r = min_cost_flow(&net, 3).unwrap().unwrap();
        assert_eq!(r.cost, 2 * -3 + -1);
        assert!(r.certifies(&net));
    }

    #[test]
    fn negative_cycle_rejected() {
        let mut net = FlowNetwork::new(3, 0, 2).unwrap();
        net.add_arc(0, 1, 1, -1).unwrap();
        net.add_arc(1, 0, 1, -1).unwrap();
        net.add_arc(1, 2, 1, 0).unwrap();
        assert!(min_cost_flow(&net, 1).is_err());
    }

    #[test]
    fn balances_are_met() {
        // supplies at 1 and 2, demand at 3; nothing through source/sink
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        net.add_arc(1, 3, 5, 2).unwrap();
        net.add_arc(2, 3, 5, 1).unwrap();
        net.set_balance(1, 2);
        net.set_balance(2, 1);
        net.set_balance(3, -3);
        let r = min_cost_flow(&net, 0).unwrap().unwrap();
        assert_eq!(r.flows, vec![2, 1]);
        assert_eq!(r.cost, 5);
    }

    #[test]
    fn malformed_networks() {
        assert!(FlowNetwork::new(2, 0, 0).is_err());
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        assert!(net.add_arc(0, 0, 1, 0).is_err());
        assert!(net.add_arc(0, 1, -1, 0).is_err());
        assert!(net.add_arc(0, 2, 1, 0).is_err());
    }
}
