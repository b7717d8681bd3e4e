use std::collections::VecDeque;

use super::{PathfindError, XHopGrid};

struct Arc {
    to: usize,
    cap: i32,
    cost: i32,
}

struct Network {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(n: usize) -> Self {
        Network { arcs: Vec::new(), adj: vec![Vec::new(); n] }
    }

    fn add(&mut self, a: usize, b: usize, cap: i32, cost: i32) {
        self.adj[a].push(self.arcs.len());
        self.arcs.push(Arc { to: b, cap, cost });
        self.adj[b].push(self.arcs.len());
        self.arcs.push(Arc { to: a, cap: 0, cost: -cost });
    }
}

/// Edmonds–Karp max-flow with unit capacities on directed links.
pub fn max_flow(n: usize, links: &[(usize, usize)], s: usize, t: usize) -> usize {
    let mut net = Network::new(n);
    for &(a, b) in links {
        net.add(a, b, 1, 0);
    }
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        let mut queue = VecDeque::from([s]);
        let mut seen = vec![false; n];
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &net.adj[v] {
                let x = net.arcs[e].to;
                if net.arcs[e].cap > 0 && !seen[x] {
                    seen[x] = true;
                    prev[x] = e;
                    queue.push_back(x);
                }
            }
        }
        if !seen[t] || s == t {
            return flow;
        }
        let mut v = t;
        while v != s {
            let e = prev[v];
            net.arcs[e].cap -= 1;
            net.arcs[e ^ 1].cap += 1;
            v = net.arcs[e ^ 1].to;
        }
        flow += 1;
    }
}

/// Minimum total hop count of n0 link-disjoint paths from s to t
/// (successive shortest paths with Bellman–Ford).
fn min_cost_paths(mut net: Network, s: usize, t: usize, n0: usize) -> Option<usize> {
    let n = net.adj.len();
    let mut total = 0i64;
    for _ in 0..n0 {
        let mut dist = vec![i64::MAX; n];
        let mut prev = vec![usize::MAX; n];
        let mut in_queue = vec![false; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            in_queue[v] = false;
            for &e in &net.adj[v] {
                let a = &net.arcs[e];
                if a.cap > 0 && dist[v] + (a.cost as i64) < dist[a.to] {
                    dist[a.to] = dist[v] + a.cost as i64;
                    prev[a.to] = e;
                    if !in_queue[a.to] {
                        in_queue[a.to] = true;
                        queue.push_back(a.to);
                    }
                }
            }
        }
        if dist[t] == i64::MAX {
            return None;
        }
        total += dist[t];
        let mut v = t;
        while v != s {
            let e = prev[v];
            net.arcs[e].cap -= 1;
            net.arcs[e ^ 1].cap += 1;
            v = net.arcs[e ^ 1].to;
        }
    }
    Some(total as usize)
}

/// Total link count of independent per-Bob trees: for each Bob, n0 shortest
/// link-disjoint paths with no sharing across Bobs.
pub fn baseline_link_count(grid: &XHopGrid, n0: usize) -> Result<usize, PathfindError> {
    let mut total = 0;
    for &b in &grid.bobs {
        let mut net = Network::new(grid.len());
        for v in 0..grid.len() {
            if !grid.alive(v) || (grid.is_terminal(v) && v != grid.alice) {
                continue;
            }
            for (x, _) in grid.neighbors(v) {
                if x == grid.alice || (grid.bobs.contains(&x) && x != b) {
                    continue;
                }
                net.add(v, x, 1, 1);
            }
        }
        let id = grid.real[grid.assigned[b].unwrap_or(0)].id;
        total += min_cost_paths(net, grid.alice, b, n0).ok_or(PathfindError::PathfindFailure { bob: id, n0 })?;
    }
    Ok(total)
}
