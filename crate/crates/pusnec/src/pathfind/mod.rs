//! X-hop grids and upstream multicast path search.
//!
//! A grid is a square lattice in (u, v) coordinates drawn rotated by 45°, so
//! each relay links to its four diagonal neighbours (the X pattern). Alice and
//! the Bobs sit on grid nodes and additionally link to their four
//! (u, v)-diagonal neighbours, giving them up to eight links.

mod flow;
mod io;
mod search;
mod smooth;

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

pub use flow::{baseline_link_count, max_flow};
pub use io::{read_graph, write_graph};
pub use search::{multicast_pathfind, rapus, PathfindOptions, PathfindReport};
pub use smooth::map_to_real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathfindError {
    #[error("bob {bob} cannot be reached with {n0} link-disjoint paths")]
    PathfindFailure { bob: usize, n0: usize },
    #[error("alice and bob {bob} are disconnected in the grid")]
    Disconnected { bob: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("graph parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn dist(&self, o: &Point) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Role {
    Alice,
    Charlie,
    Bob,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Alice => "alice",
            Role::Charlie => "charlie",
            Role::Bob => "bob",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealNode {
    pub id: usize,
    pub pos: Point,
}

/// Lattice offsets: the four grid links, then the four extra links of
/// Alice and the Bobs.
pub(crate) const DIRS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

#[derive(Debug, Clone)]
pub struct XHopGrid {
    pub width: usize,
    pub height: usize,
    pub grid_constant: f64,
    pub origin: Point,
    /// Real node assigned to each virtual node; None marks a removed node.
    pub assigned: Vec<Option<usize>>,
    pub real: Vec<RealNode>,
    pub alice: usize,
    /// Bobs in increasing snapped distance from Alice.
    pub bobs: Vec<usize>,
}

impl XHopGrid {
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self, v: usize) -> (i64, i64) {
        ((v % self.width) as i64, (v / self.width) as i64)
    }

    pub fn index(&self, u: i64, v: i64) -> Option<usize> {
        (u >= 0 && v >= 0 && (u as usize) < self.width && (v as usize) < self.height)
            .then(|| v as usize * self.width + u as usize)
    }

    /// Virtual position of a lattice node.
    pub fn position(&self, v: usize) -> Point {
        let (u, w) = self.coords(v);
        let s = self.grid_constant / std::f64::consts::SQRT_2;
        Point { x: self.origin.x + (u - w) as f64 * s, y: self.origin.y + (u + w) as f64 * s }
    }

    pub fn alive(&self, v: usize) -> bool {
        self.assigned[v].is_some()
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        v == self.alice || self.bobs.contains(&v)
    }

    pub fn role(&self, v: usize) -> Role {
        if v == self.alice {
            Role::Alice
        } else if self.bobs.contains(&v) {
            Role::Bob
        } else {
            Role::Charlie
        }
    }

    /// Live neighbours with the direction index used to reach them.
    pub fn neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        let (u, w) = self.coords(v);
        let mut out = Vec::with_capacity(8);
        for (d, &(du, dw)) in DIRS.iter().enumerate() {
            let Some(x) = self.index(u + du, w + dw) else { continue };
            if !self.alive(x) {
                continue;
            }
            let extra = d >= 4;
            if extra && !(self.is_terminal(v) || self.is_terminal(x)) {
                continue;
            }
            out.push((x, d));
        }
        out
    }

    /// Chebyshev ring of radius r around v in lattice coordinates.
    pub fn ring(&self, v: usize, r: i64) -> Vec<usize> {
        let (u, w) = self.coords(v);
        let mut out = Vec::new();
        for dw in -r..=r {
            for du in -r..=r {
                if du.abs().max(dw.abs()) != r {
                    continue;
                }
                if let Some(x) = self.index(u + du, w + dw) {
                    if self.alive(x) {
                        out.push(x);
                    }
                }
            }
        }
        out
    }

    pub fn live_link_count(&self) -> usize {
        (0..self.len()).filter(|&v| self.alive(v)).map(|v| self.neighbors(v).len()).sum::<usize>() / 2
    }

    fn connected(&self, a: usize, b: usize) -> bool {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(v) = queue.pop_front() {
            if v == b {
                return true;
            }
            for (x, _) in self.neighbors(v) {
                if !seen[x] {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
        }
        false
    }
}

/// Lay a grid over the area spanned by Alice and the Bobs (plus `margin`
/// lattice steps), snap the terminals and assign each remaining virtual node
/// the nearest unassigned real node within one grid constant.
pub fn build_grid(
    real: &[RealNode],
    alice: usize,
    bobs: &[usize],
    grid_constant: f64,
    margin: usize,
) -> Result<XHopGrid, PathfindError> {
    let find = |id: usize| {
        real.iter().position(|r| r.id == id).ok_or_else(|| PathfindError::InvalidInput(format!("unknown node id {id}")))
    };
    if bobs.is_empty() {
        return Err(PathfindError::InvalidInput("at least one bob is required".into()));
    }
    if grid_constant <= 0.0 {
        return Err(PathfindError::InvalidInput("grid constant must be positive".into()));
    }
    let alice_idx = find(alice)?;
    let bob_idx: Vec<usize> = bobs.iter().map(|&b| find(b)).collect::<Result<_, _>>()?;
    let s = grid_constant / std::f64::consts::SQRT_2;
    let to_uv = |p: &Point| ((p.x + p.y) / (2.0 * s), (p.y - p.x) / (2.0 * s));
    let terminals: Vec<(f64, f64)> =
        std::iter::once(alice_idx).chain(bob_idx.iter().copied()).map(|i| to_uv(&real[i].pos)).collect();
    let m = margin as f64;
    let umin = terminals.iter().map(|t| t.0).fold(f64::INFINITY, f64::min).floor() - m;
    let vmin = terminals.iter().map(|t| t.1).fold(f64::INFINITY, f64::min).floor() - m;
    let umax = terminals.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max).ceil() + m;
    let vmax = terminals.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max).ceil() + m;
    let width = (umax - umin) as usize + 1;
    let height = (vmax - vmin) as usize + 1;
    let origin = Point { x: (umin - vmin) * s, y: (umin + vmin) * s };
    let mut grid = XHopGrid {
        width,
        height,
        grid_constant,
        origin,
        assigned: vec![None; width * height],
        real: real.to_vec(),
        alice: 0,
        bobs: Vec::new(),
    };
    let mut taken = vec![false; real.len()];
    let snap = |grid: &XHopGrid, p: &Point| -> Option<usize> {
        (0..grid.len())
            .filter(|&v| grid.assigned[v].is_none())
            .min_by(|&a, &b| grid.position(a).dist(p).total_cmp(&grid.position(b).dist(p)))
    };
    let a = snap(&grid, &real[alice_idx].pos).ok_or_else(|| PathfindError::InvalidInput("empty grid".into()))?;
    grid.assigned[a] = Some(alice_idx);
    grid.alice = a;
    taken[alice_idx] = true;
    let mut snapped = Vec::new();
    for &bi in &bob_idx {
        let b = snap(&grid, &real[bi].pos).ok_or_else(|| PathfindError::InvalidInput("grid too small".into()))?;
        grid.assigned[b] = Some(bi);
        taken[bi] = true;
        snapped.push((b, real[bi].id));
    }
    for v in 0..grid.len() {
        if grid.assigned[v].is_some() {
            continue;
        }
        let p = grid.position(v);
        let best = (0..real.len())
            .filter(|&i| !taken[i] && real[i].pos.dist(&p) <= grid_constant)
            .min_by(|&i, &j| real[i].pos.dist(&p).total_cmp(&real[j].pos.dist(&p)));
        if let Some(i) = best {
            grid.assigned[v] = Some(i);
            taken[i] = true;
        }
    }
    let apos = grid.position(a);
    snapped.sort_by(|x, y| grid.position(x.0).dist(&apos).total_cmp(&grid.position(y.0).dist(&apos)));
    grid.bobs = snapped.iter().map(|x| x.0).collect();
    for &(b, id) in &snapped {
        if !grid.connected(a, b) {
            return Err(PathfindError::Disconnected { bob: id });
        }
    }
    Ok(grid)
}

/// Fully populated width × height grid with real nodes on the lattice points.
pub fn synthetic_grid(
    width: usize,
    height: usize,
    alice: (usize, usize),
    bobs: &[(usize, usize)],
) -> Result<XHopGrid, PathfindError> {
    let s = 1.0 / std::f64::consts::SQRT_2;
    let mut real = Vec::with_capacity(width * height);
    for v in 0..height {
        for u in 0..width {
            let pos = Point { x: (u as f64 - v as f64) * s, y: (u as f64 + v as f64) * s };
            real.push(RealNode { id: v * width + u, pos });
        }
    }
    let id = |(u, v): (usize, usize)| v * width + u;
    let mut distinct = BTreeSet::from([id(alice)]);
    if bobs.iter().any(|&b| !distinct.insert(id(b))) || alice.0 >= width || alice.1 >= height {
        return Err(PathfindError::InvalidInput("terminals must be distinct lattice points".into()));
    }
    let bob_ids: Vec<usize> = bobs.iter().map(|&b| id(b)).collect();
    let grid = build_grid(&real, id(alice), &bob_ids, 1.0, 0)?;
    if grid.width != width || grid.height != height {
        // terminals do not span the full lattice: rebuild with explicit bounds
        let mut g = grid;
        g.width = width;
        g.height = height;
        g.origin = Point { x: 0.0, y: 0.0 };
        g.assigned = (0..width * height).map(Some).collect();
        g.alice = id(alice);
        let apos = g.position(g.alice);
        let mut bs = bob_ids.clone();
        bs.sort_by(|&x, &y| g.position(x).dist(&apos).total_cmp(&g.position(y).dist(&apos)));
        g.bobs = bs;
        return Ok(g);
    }
    Ok(grid)
}

/// Random distinct terminal placement on a width × height lattice, keeping
/// every terminal at least `spacing` lattice steps (Chebyshev) from the others.
pub fn random_terminals<R: Rng + ?Sized>(
    width: usize,
    height: usize,
    count: usize,
    spacing: usize,
    inset: usize,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        let u = rng.random_range(inset..width - inset);
        let v = rng.random_range(inset..height - inset);
        let far =
            out.iter().all(|&(a, b)| (a as i64 - u as i64).abs().max((b as i64 - v as i64).abs()) >= spacing as i64);
        if (far || attempts > 10_000) && !out.contains(&(u, v)) {
            out.push((u, v));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphNode {
    pub id: usize,
    pub pos: Point,
    pub role: Role,
}

/// Directed multicast graph with per-Bob path annotations. Paths are node
/// sequences from Alice to the Bob, indices into `nodes`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MulticastGraph {
    pub nodes: Vec<GraphNode>,
    pub links: Vec<(usize, usize)>,
    pub alice: usize,
    pub bobs: Vec<usize>,
    pub paths: Vec<Vec<Vec<usize>>>,
    pub n0: usize,
}

impl MulticastGraph {
    pub fn out_degree(&self, v: usize) -> usize {
        self.links.iter().filter(|l| l.0 == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.links.iter().filter(|l| l.1 == v).count()
    }

    /// Alice's used out-degree.
    pub fn n1(&self) -> usize {
        self.out_degree(self.alice)
    }

    pub fn max_charlie_indegree(&self) -> usize {
        (0..self.nodes.len())
            .filter(|&v| self.nodes[v].role == Role::Charlie)
            .map(|v| self.in_degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Topological order of the nodes, or None if the graph has a cycle.
    pub fn topo_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut out = vec![Vec::new(); n];
        for &(a, b) in &self.links {
            indeg[b] += 1;
            out[a].push(b);
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &x in &out[v] {
                indeg[x] -= 1;
                if indeg[x] == 0 {
                    queue.push_back(x);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Max-flow value from Alice to each Bob over all links, and over that
    /// Bob's own path links only.
    pub fn flow_certificate(&self) -> Vec<(usize, usize)> {
        self.bobs
            .iter()
            .enumerate()
            .map(|(t, &b)| {
                let own: BTreeSet<(usize, usize)> =
                    self.paths[t].iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1]))).collect();
                let own: Vec<(usize, usize)> = own.into_iter().collect();
                (
                    max_flow(self.nodes.len(), &self.links, self.alice, b),
                    max_flow(self.nodes.len(), &own, self.alice, b),
                )
            })
            .collect()
    }

    /// Check the structural invariants: link-disjoint paths per Bob, Charlie
    /// indegree below k, terminals never intermediate, acyclic.
    pub fn validate(&self, k: usize) -> Result<(), String> {
        let links: BTreeSet<(usize, usize)> = self.links.iter().copied().collect();
        if links.len() != self.links.len() {
            return Err("duplicate link".into());
        }
        if self.links.iter().any(|&(a, b)| links.contains(&(b, a))) {
            return Err("link used in both directions".into());
        }
        for (t, paths) in self.paths.iter().enumerate() {
            if paths.len() != self.n0 {
                return Err(format!("bob {t} has {} paths", paths.len()));
            }
            let mut used = BTreeSet::new();
            for p in paths {
                if p.first() != Some(&self.alice) || p.last() != Some(&self.bobs[t]) {
                    return Err(format!("bob {t}: path endpoints"));
                }
                for w in p.windows(2) {
                    if !links.contains(&(w[0], w[1])) {
                        return Err(format!("bob {t}: path link missing from graph"));
                    }
                    if !used.insert((w[0], w[1])) {
                        return Err(format!("bob {t}: paths share a link"));
                    }
                }
                if p[1..p.len() - 1].iter().any(|&v| self.nodes[v].role != Role::Charlie) {
                    return Err(format!("bob {t}: terminal used as relay"));
                }
            }
        }
        if self.max_charlie_indegree() >= k {
            return Err("charlie indegree bound violated".into());
        }
        if self.topo_order().is_none() {
            return Err("graph has a cycle".into());
        }
        Ok(())
    }
}
