use std::collections::BTreeSet;

use super::{MulticastGraph, Point, Role, XHopGrid};

fn chain_length(pts: &[Point]) -> f64 {
    pts.windows(2).map(|w| w[0].dist(&w[1])).sum()
}

/// Replace virtual nodes by their real nodes, then straighten branch-free
/// relay chains: each maximal run of Charlies with one input and one output
/// is re-selected from the real nodes nearest to evenly spaced points on the
/// segment between its two end junctions, when that shortens the chain.
pub fn map_to_real(grid: &XHopGrid, virt: &MulticastGraph) -> MulticastGraph {
    let mut g = virt.clone();
    let mut real_of = vec![usize::MAX; g.nodes.len()];
    for (i, n) in g.nodes.iter_mut().enumerate() {
        let r = grid.assigned[n.id].expect("graph uses live grid nodes");
        real_of[i] = r;
        n.id = grid.real[r].id;
        n.pos = grid.real[r].pos;
    }
    let nn = g.nodes.len();
    let mut ins = vec![Vec::new(); nn];
    let mut outs = vec![Vec::new(); nn];
    for &(a, b) in &g.links {
        outs[a].push(b);
        ins[b].push(a);
    }
    let is_simple: Vec<bool> =
        (0..nn).map(|v| g.nodes[v].role == Role::Charlie && ins[v].len() == 1 && outs[v].len() == 1).collect();
    let simple = |v: usize| is_simple[v];
    let mut in_use: BTreeSet<usize> = real_of.iter().copied().collect();
    let mut visited = vec![false; nn];
    for start in 0..nn {
        if visited[start] || !simple(start) || simple(ins[start][0]) {
            continue;
        }
        let mut chain = Vec::new();
        let mut v = start;
        while simple(v) && !visited[v] {
            visited[v] = true;
            chain.push(v);
            v = outs[v][0];
        }
        let (a, b) = (ins[start][0], v);
        let m = chain.len();
        if m < 2 {
            continue;
        }
        let (pa, pb) = (g.nodes[a].pos, g.nodes[b].pos);
        let mut pick = Vec::with_capacity(m);
        let mut blocked: BTreeSet<usize> = in_use.clone();
        for &c in &chain {
            blocked.remove(&real_of[c]);
        }
        for i in 1..=m {
            let t = i as f64 / (m + 1) as f64;
            let target = Point { x: pa.x + t * (pb.x - pa.x), y: pa.y + t * (pb.y - pa.y) };
            let best = (0..grid.real.len())
                .filter(|r| !blocked.contains(r) && !pick.contains(r))
                .filter(|&r| grid.real[r].pos.dist(&target) <= grid.grid_constant)
                .min_by(|&x, &y| grid.real[x].pos.dist(&target).total_cmp(&grid.real[y].pos.dist(&target)));
            match best {
                Some(r) => pick.push(r),
                None => break,
            }
        }
        if pick.len() != m {
            continue;
        }
        let old: Vec<Point> =
            std::iter::once(pa).chain(chain.iter().map(|&c| g.nodes[c].pos)).chain(std::iter::once(pb)).collect();
        let new: Vec<Point> =
            std::iter::once(pa).chain(pick.iter().map(|&r| grid.real[r].pos)).chain(std::iter::once(pb)).collect();
        if chain_length(&new) + 1e-9 >= chain_length(&old) {
            continue;
        }
        for (&c, &r) in chain.iter().zip(pick.iter()) {
            in_use.remove(&real_of[c]);
            in_use.insert(r);
            real_of[c] = r;
            g.nodes[c].id = grid.real[r].id;
            g.nodes[c].pos = grid.real[r].pos;
        }
    }
    g
}
