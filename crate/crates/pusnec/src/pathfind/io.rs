//! Line-oriented text format for multicast graphs.
//!
//! ```text
//! n0 5
//! node <index> <id> <x> <y> <alice|charlie|bob>
//! link <from> <to>
//! bob <t> <index>
//! path <t> <index> <index> ...
//! ```

use std::fmt::Write;

use super::{GraphNode, MulticastGraph, PathfindError, Point, Role};

pub fn write_graph(g: &MulticastGraph) -> String {
    let mut s = String::from("# pusnec multicast graph\n");
    let _ = writeln!(s, "n0 {}", g.n0);
    for (i, n) in g.nodes.iter().enumerate() {
        let _ = writeln!(s, "node {i} {} {} {} {}", n.id, n.pos.x, n.pos.y, n.role.as_str());
    }
    for &(a, b) in &g.links {
        let _ = writeln!(s, "link {a} {b}");
    }
    for (t, &b) in g.bobs.iter().enumerate() {
        let _ = writeln!(s, "bob {t} {b}");
    }
    for (t, paths) in g.paths.iter().enumerate() {
        for p in paths {
            let nodes: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "path {t} {}", nodes.join(" "));
        }
    }
    s
}

pub fn read_graph(text: &str) -> Result<MulticastGraph, PathfindError> {
    let mut g = MulticastGraph {
        nodes: Vec::new(),
        links: Vec::new(),
        alice: usize::MAX,
        bobs: Vec::new(),
        paths: Vec::new(),
        n0: 0,
    };
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| PathfindError::Parse { line: ln + 1, msg: msg.to_string() };
        let f: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| -> Result<usize, PathfindError> {
            f.get(i).ok_or_else(|| err("missing field"))?.parse().map_err(|_| err("bad integer"))
        };
        let float = |i: usize| -> Result<f64, PathfindError> {
            f.get(i).ok_or_else(|| err("missing field"))?.parse().map_err(|_| err("bad number"))
        };
        match f[0] {
            "n0" => g.n0 = num(1)?,
            "node" => {
                if num(1)? != g.nodes.len() {
                    return Err(err("node indices must be consecutive"));
                }
                let role = match f.get(5).copied() {
                    Some("alice") => Role::Alice,
                    Some("charlie") => Role::Charlie,
                    Some("bob") => Role::Bob,
                    _ => return Err(err("unknown role")),
                };
                if role == Role::Alice {
                    if g.alice != usize::MAX {
                        return Err(err("second alice"));
                    }
                    g.alice = g.nodes.len();
                }
                g.nodes.push(GraphNode { id: num(2)?, pos: Point { x: float(3)?, y: float(4)? }, role });
            }
            "link" => {
                let (a, b) = (num(1)?, num(2)?);
                if a >= g.nodes.len() || b >= g.nodes.len() {
                    return Err(err("link to unknown node"));
                }
                g.links.push((a, b));
            }
            "bob" => {
                if num(1)? != g.bobs.len() {
                    return Err(err("bob indices must be consecutive"));
                }
                let b = num(2)?;
                if g.nodes.get(b).map(|n| n.role) != Some(Role::Bob) {
                    return Err(err("bob entry must name a bob node"));
                }
                g.bobs.push(b);
                g.paths.push(Vec::new());
            }
            "path" => {
                let t = num(1)?;
                let nodes = (2..f.len()).map(num).collect::<Result<Vec<_>, _>>()?;
                if nodes.iter().any(|&v| v >= g.nodes.len()) {
                    return Err(err("path through unknown node"));
                }
                g.paths.get_mut(t).ok_or_else(|| err("path for unknown bob"))?.push(nodes);
            }
            _ => return Err(err("unknown record")),
        }
    }
    if g.alice == usize::MAX {
        return Err(PathfindError::Parse { line: 0, msg: "no alice node".into() });
    }
    Ok(g)
}
