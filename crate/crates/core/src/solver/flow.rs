//! Successive-shortest-paths min-cost flow on the m x n bipartite graph.
//!
//! Supplies and demands are atom multiplicities; every augmentation moves an
//! integer number of atoms, so the optimum is integral without any rounding
//! step. Dijkstra runs on reduced costs kept nonnegative by Johnson
//! potentials; the initial potentials absorb negative cost entries.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{CompressedFlow, CostMatrix, SolverError};

struct Edge {
    to: usize,
    remaining: u64,
    cost: f64,
}

struct Network {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: u64, cost: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, remaining: cap, cost });
        self.edges.push(Edge { to: from, remaining: 0, cost: -cost });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Distances are finite by construction; ties resolve by node id so
        // runs are reproducible.
        self.dist
            .total_cmp(&other.dist)
            .then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Integral minimum-cost transport between multiplicity vectors.
pub fn solve_compressed(
    src_mult: &[u64],
    dst_mult: &[u64],
    cost: &CostMatrix,
) -> Result<CompressedFlow, SolverError> {
    let (m, n) = (src_mult.len(), dst_mult.len());
    if cost.rows() != m || cost.cols() != n {
        return Err(SolverError::CostShapeMismatch {
            rows: cost.rows(),
            cols: cost.cols(),
            expected_rows: m,
            expected_cols: n,
        });
    }
    if let Some((row, col)) = cost.first_non_finite() {
        return Err(SolverError::NonFinite { row, col });
    }
    let supply: u64 = src_mult.iter().sum();
    let demand: u64 = dst_mult.iter().sum();
    if supply != demand {
        return Err(SolverError::Unbalanced { supply, demand });
    }

    // Nodes: source, m left, n right, sink.
    let source = 0usize;
    let left = |i: usize| 1 + i;
    let right = |j: usize| 1 + m + j;
    let sink = 1 + m + n;
    let nodes = m + n + 2;

    let mut net = Network::new(nodes);
    for (i, &mult) in src_mult.iter().enumerate() {
        net.add_edge(source, left(i), mult, 0.0);
    }
    let mut cell_edges = vec![0usize; m * n];
    for i in 0..m {
        for j in 0..n {
            cell_edges[i * n + j] = net.add_edge(left(i), right(j), src_mult[i], cost.get(i, j));
        }
    }
    for (j, &mult) in dst_mult.iter().enumerate() {
        net.add_edge(right(j), sink, mult, 0.0);
    }

    // Initial potentials are exact shortest distances in the all-forward
    // residual graph, so reduced costs start nonnegative even when cost
    // entries are negative.
    let mut phi = vec![0.0f64; nodes];
    for j in 0..n {
        phi[right(j)] = (0..m).map(|i| cost.get(i, j)).fold(f64::INFINITY, f64::min);
    }
    phi[sink] = (0..n).map(|j| phi[right(j)]).fold(f64::INFINITY, f64::min);

    let mut pushed = 0u64;
    let mut dist = vec![0.0f64; nodes];
    let mut parent_edge = vec![usize::MAX; nodes];
    while pushed < supply {
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        parent_edge.iter_mut().for_each(|p| *p = usize::MAX);
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(HeapEntry { dist: 0.0, node: source }));
        while let Some(Reverse(HeapEntry { dist: d, node: u })) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &eid in &net.adj[u] {
                let e = &net.edges[eid];
                if e.remaining == 0 {
                    continue;
                }
                // Clamp rounding residue; exact arithmetic would give >= 0.
                let reduced = (e.cost + phi[u] - phi[e.to]).max(0.0);
                let candidate = d + reduced;
                if candidate < dist[e.to] {
                    dist[e.to] = candidate;
                    parent_edge[e.to] = eid;
                    heap.push(Reverse(HeapEntry { dist: candidate, node: e.to }));
                }
            }
        }
        assert!(
            dist[sink].is_finite(),
            "balanced instance always admits an augmenting path"
        );

        for (v, d) in dist.iter().enumerate() {
            if d.is_finite() {
                phi[v] += d;
            }
        }

        let mut bottleneck = u64::MAX;
        let mut v = sink;
        while v != source {
            let eid = parent_edge[v];
            bottleneck = bottleneck.min(net.edges[eid].remaining);
            v = net.edges[eid ^ 1].to;
        }
        let mut v = sink;
        while v != source {
            let eid = parent_edge[v];
            net.edges[eid].remaining -= bottleneck;
            net.edges[eid ^ 1].remaining += bottleneck;
            v = net.edges[eid ^ 1].to;
        }
        pushed += bottleneck;
    }

    let mut entries = Vec::new();
    for i in 0..m {
        for j in 0..n {
            let eid = cell_edges[i * n + j];
            let units = src_mult[i] - net.edges[eid].remaining;
            if units > 0 {
                entries.push((i, j, units));
            }
        }
    }
    let total: f64 = entries
        .iter()
        .map(|&(i, j, units)| units as f64 * cost.get(i, j))
        .sum();
    let exact_cost = cost.is_integral().then(|| {
        entries
            .iter()
            .map(|&(i, j, units)| units as i128 * cost.get(i, j) as i128)
            .sum()
    });
    Ok(CompressedFlow {
        entries,
        cost: total,
        exact_cost,
    })
}
