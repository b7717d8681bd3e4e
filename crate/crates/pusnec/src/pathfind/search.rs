use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use rand::Rng;
use serde::Serialize;

use super::{GraphNode, MulticastGraph, PathfindError, Role, XHopGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathfindOptions {
    /// Link-disjoint paths per Bob.
    pub n0: usize,
    /// Charlie indegree must stay below k.
    pub k: usize,
    /// Acyclicity repairs allowed per path before giving up.
    pub max_retries: usize,
}

impl Default for PathfindOptions {
    fn default() -> Self {
        PathfindOptions { n0: 5, k: 3, max_retries: 25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathfindReport {
    /// Bob indices (designation order) in the order the main flow added them.
    pub selection_order: Vec<usize>,
    /// Rounds in which several Bobs tied on link count.
    pub ties: usize,
    pub total_links: usize,
    pub n1: usize,
}

/// Lexicographic path cost: new links, hops, direction changes, length.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost {
    new: u32,
    hops: u32,
    turns: u32,
    len: f64,
}

impl Cost {
    const ZERO: Cost = Cost { new: 0, hops: 0, turns: 0, len: 0.0 };
}

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.new, self.hops, self.turns).cmp(&(o.new, o.hops, o.turns)).then(self.len.total_cmp(&o.len))
    }
}

const START: usize = 8;

struct BobSearch<'a> {
    grid: &'a XHopGrid,
    links: HashSet<(usize, usize)>,
    indeg: Vec<usize>,
    taboo: HashSet<(usize, usize)>,
    banned: HashSet<(usize, usize)>,
    target: usize,
    k: usize,
}

struct Tree {
    dist: Vec<Option<Cost>>,
    prev: Vec<usize>,
}

impl<'a> BobSearch<'a> {
    /// Whether a → b may be traversed, and if so whether it is a new link.
    fn step(&self, a: usize, b: usize, avoid: &[bool]) -> Option<bool> {
        let g = self.grid;
        if b == g.alice || avoid[b] || g.bobs.contains(&a) {
            return None;
        }
        if g.bobs.contains(&b) && b != self.target {
            return None;
        }
        if self.links.contains(&(b, a)) || self.taboo.contains(&(a, b)) || self.banned.contains(&(a, b)) {
            return None;
        }
        let new = !self.links.contains(&(a, b));
        if new && g.role(b) == Role::Charlie && self.indeg[b] + 1 >= self.k {
            return None;
        }
        Some(new)
    }

    fn dijkstra(&self, src: usize, stop: Option<usize>, avoid: &[bool]) -> Tree {
        let g = self.grid;
        let states = g.len() * 9;
        let mut dist: Vec<Option<Cost>> = vec![None; states];
        let mut prev = vec![usize::MAX; states];
        let mut done = vec![false; states];
        let mut heap = BinaryHeap::new();
        dist[src * 9 + START] = Some(Cost::ZERO);
        heap.push(Reverse((Cost::ZERO, src * 9 + START)));
        while let Some(Reverse((c, s))) = heap.pop() {
            if done[s] {
                continue;
            }
            done[s] = true;
            let (v, d) = (s / 9, s % 9);
            if Some(v) == stop {
                break;
            }
            if v != src && g.is_terminal(v) {
                continue;
            }
            for (x, dx) in g.neighbors(v) {
                let Some(new) = self.step(v, x, avoid) else { continue };
                let nc = Cost {
                    new: c.new + new as u32,
                    hops: c.hops + 1,
                    turns: c.turns + (d != START && d != dx) as u32,
                    len: c.len + g.position(v).dist(&g.position(x)),
                };
                let t = x * 9 + dx;
                if dist[t].is_none_or(|old| nc < old) {
                    dist[t] = Some(nc);
                    prev[t] = s;
                    heap.push(Reverse((nc, t)));
                }
            }
        }
        Tree { dist, prev }
    }

    fn extract(&self, tree: &Tree, v: usize) -> Option<Vec<usize>> {
        let best = (0..9).filter_map(|d| tree.dist[v * 9 + d].map(|c| (c, v * 9 + d))).min()?;
        let mut s = best.1;
        let mut path = vec![v];
        while s % 9 != START {
            s = tree.prev[s];
            path.push(s / 9);
        }
        path.reverse();
        Some(path)
    }

    fn cost_of(&self, path: &[usize]) -> Cost {
        let g = self.grid;
        let mut c = Cost::ZERO;
        let mut last_dir = None;
        for w in path.windows(2) {
            let (a, b) = (g.coords(w[0]), g.coords(w[1]));
            let dir = (b.0 - a.0, b.1 - a.1);
            c.new += !self.links.contains(&(w[0], w[1])) as u32;
            c.hops += 1;
            c.turns += last_dir.is_some_and(|l| l != dir) as u32;
            c.len += g.position(w[0]).dist(&g.position(w[1]));
            last_dir = Some(dir);
        }
        c
    }

    fn graph_nodes(&self) -> Vec<bool> {
        let mut on = vec![false; self.grid.len()];
        on[self.grid.alice] = true;
        for &(a, b) in &self.links {
            on[a] = true;
            on[b] = true;
        }
        on
    }

    /// One upstream path: support nodes on the surrounding rings of the Bob,
    /// a cheapest path from Alice to each, then on to the Bob.
    fn find_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<usize>> {
        let g = self.grid;
        let none = vec![false; g.len()];
        let from_alice = self.dijkstra(g.alice, None, &none);
        let on = self.graph_nodes();
        let max_r = g.width.max(g.height) as i64;
        let mut cands: Vec<(Cost, Vec<usize>)> = Vec::new();
        let mut first_hit = None;
        for r in 1..=max_r {
            if first_hit.is_some_and(|f| r > f + 1) {
                break;
            }
            for s in g.ring(self.target, r) {
                if !on[s] || (s != g.alice && g.is_terminal(s)) {
                    continue;
                }
                let Some(head) = self.extract(&from_alice, s) else { continue };
                let mut avoid = vec![false; g.len()];
                for &v in &head[..head.len() - 1] {
                    avoid[v] = true;
                }
                let tail_tree = self.dijkstra(s, Some(self.target), &avoid);
                let Some(tail) = self.extract(&tail_tree, self.target) else { continue };
                let mut path = head;
                path.extend_from_slice(&tail[1..]);
                cands.push((self.cost_of(&path), path));
            }
            if !cands.is_empty() && first_hit.is_none() {
                first_hit = Some(r);
            }
        }
        if cands.is_empty() {
            return self.extract(&from_alice, self.target);
        }
        let best = cands.iter().map(|c| c.0).min()?;
        let ties: Vec<Vec<usize>> = cands.into_iter().filter(|c| c.0 == best).map(|c| c.1).collect();
        Some(ties[rng.random_range(0..ties.len())].clone())
    }

    /// First new link of the path that closes a cycle with the current graph.
    fn cycle_link(&self, path: &[usize]) -> Option<(usize, usize)> {
        let mut adj = vec![Vec::new(); self.grid.len()];
        for &(a, b) in &self.links {
            adj[a].push(b);
        }
        for w in path.windows(2) {
            adj[w[0]].push(w[1]);
        }
        let reaches = |from: usize, to: usize| {
            let mut seen = vec![false; adj.len()];
            let mut stack = vec![from];
            while let Some(v) = stack.pop() {
                if v == to {
                    return true;
                }
                if !std::mem::replace(&mut seen[v], true) {
                    stack.extend(adj[v].iter().copied());
                }
            }
            false
        };
        path.windows(2).map(|w| (w[0], w[1])).find(|&(a, b)| !self.links.contains(&(a, b)) && reaches(b, a))
    }

    fn accept(&mut self, path: &[usize]) {
        for w in path.windows(2) {
            let l = (w[0], w[1]);
            if self.links.insert(l) {
                self.indeg[l.1] += 1;
            }
            self.taboo.insert(l);
        }
    }
}

fn indegrees(n: usize, links: &BTreeSet<(usize, usize)>) -> Vec<usize> {
    let mut indeg = vec![0; n];
    for &(_, b) in links {
        indeg[b] += 1;
    }
    indeg
}

/// Upstream search of n0 link-disjoint paths from Alice to one Bob on top
/// of an established graph. Links already in the graph cost nothing; the
/// Bob's own earlier paths are kept on a taboo list.
pub fn rapus<R: Rng + ?Sized>(
    grid: &XHopGrid,
    established: &BTreeSet<(usize, usize)>,
    bob: usize,
    opts: &PathfindOptions,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>, PathfindError> {
    let fail = || PathfindError::PathfindFailure { bob: grid.real[grid.assigned[bob].unwrap_or(0)].id, n0: opts.n0 };
    let mut s = BobSearch {
        grid,
        links: established.iter().copied().collect(),
        indeg: indegrees(grid.len(), established),
        taboo: HashSet::new(),
        banned: HashSet::new(),
        target: bob,
        k: opts.k,
    };
    let mut paths = Vec::with_capacity(opts.n0);
    for _ in 0..opts.n0 {
        let mut retries = 0;
        loop {
            let path = s.find_path(rng).ok_or_else(fail)?;
            if let Some(l) = s.cycle_link(&path) {
                s.banned.insert(l);
                retries += 1;
                if retries > opts.max_retries {
                    return Err(fail());
                }
                continue;
            }
            s.accept(&path);
            paths.push(path);
            break;
        }
    }
    Ok(paths)
}

/// Build the multicast graph Bob by Bob, each round adding the Bob whose
/// paths give the smallest total link count.
pub fn multicast_pathfind<R: Rng + ?Sized>(
    grid: &XHopGrid,
    opts: &PathfindOptions,
    rng: &mut R,
) -> Result<(MulticastGraph, PathfindReport), PathfindError> {
    if opts.n0 == 0 || opts.k < 2 {
        return Err(PathfindError::InvalidInput("need n0 >= 1 and k >= 2".into()));
    }
    let mut links: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut remaining: Vec<usize> = (0..grid.bobs.len()).collect();
    let mut found: Vec<Option<Vec<Vec<usize>>>> = vec![None; grid.bobs.len()];
    let mut order = Vec::new();
    let mut ties = 0;
    while !remaining.is_empty() {
        let mut cands = Vec::new();
        let mut last_err = None;
        for &t in &remaining {
            match rapus(grid, &links, grid.bobs[t], opts, rng) {
                Ok(paths) => {
                    let mut all = links.clone();
                    all.extend(paths.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1]))));
                    cands.push((all.len(), t, paths, all));
                }
                Err(e) => last_err = Some(e),
            }
        }
        if cands.is_empty() {
            return Err(last_err.unwrap_or_else(|| PathfindError::InvalidInput("no bobs".into())));
        }
        let best = cands.iter().map(|c| c.0).min().unwrap_or(0);
        let mut best_cands: Vec<_> = cands.into_iter().filter(|c| c.0 == best).collect();
        if best_cands.len() > 1 {
            ties += 1;
        }
        let pick = best_cands.swap_remove(rng.random_range(0..best_cands.len()));
        let (_, t, paths, all) = pick;
        links = all;
        found[t] = Some(paths);
        order.push(t);
        remaining.retain(|&x| x != t);
    }

    let mut used: BTreeSet<usize> = BTreeSet::from([grid.alice]);
    used.extend(grid.bobs.iter().copied());
    for &(a, b) in &links {
        used.insert(a);
        used.insert(b);
    }
    let index: std::collections::BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let nodes = used.iter().map(|&v| GraphNode { id: v, pos: grid.position(v), role: grid.role(v) }).collect();
    let graph = MulticastGraph {
        nodes,
        links: links.iter().map(|&(a, b)| (index[&a], index[&b])).collect(),
        alice: index[&grid.alice],
        bobs: grid.bobs.iter().map(|b| index[b]).collect(),
        paths: found
            .into_iter()
            .map(|p| p.unwrap_or_default().into_iter().map(|path| path.iter().map(|v| index[v]).collect()).collect())
            .collect(),
        n0: opts.n0,
    };
    let report = PathfindReport { selection_order: order, ties, total_links: graph.links.len(), n1: graph.n1() };
    Ok((graph, report))
}
