use std::path::PathBuf;

use pusnec::pathfind::{
    baseline_link_count, build_grid, map_to_real, multicast_pathfind, random_terminals, synthetic_grid, write_graph,
    PathfindError, PathfindOptions, PathfindReport, Point, RealNode, XHopGrid,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::manifest::{csv_text, RunManifest};
use crate::{exit_err, Cli, EXIT_CONFIG, EXIT_PATHFIND};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Link-disjoint paths per Bob.
    #[arg(long, default_value_t = 5)]
    pub n0: usize,
    /// Largest allowed Charlie indegree.
    #[arg(long, default_value_t = 2)]
    pub max_indegree: usize,
    #[arg(long, default_value_t = 20)]
    pub width: usize,
    #[arg(long, default_value_t = 20)]
    pub height: usize,
    /// Number of randomly placed Bobs on the synthetic grid.
    #[arg(long, default_value_t = 6)]
    pub bobs: usize,
    /// Minimum Chebyshev spacing between random terminals.
    #[arg(long, default_value_t = 4)]
    pub spacing: usize,
    /// Keep random terminals this far from the grid border.
    #[arg(long, default_value_t = 2)]
    pub inset: usize,
    /// Fixed Alice cell `u,v` on the synthetic grid.
    #[arg(long, value_parser = parse_cell)]
    pub alice_at: Option<(usize, usize)>,
    /// Fixed Bob cell `u,v` (repeatable); requires --alice-at.
    #[arg(long, value_parser = parse_cell)]
    pub bob_at: Vec<(usize, usize)>,
    /// CSV of real nodes (`id,x,y`) instead of the synthetic grid.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// Alice node id (with --nodes).
    #[arg(long)]
    pub alice: Option<usize>,
    /// Bob node ids (with --nodes), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub bob: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub grid_constant: f64,
    #[arg(long, default_value_t = 2)]
    pub margin: usize,
    /// Map the virtual paths back onto the real nodes.
    #[arg(long)]
    pub smooth: bool,
}

fn parse_cell(s: &str) -> Result<(usize, usize), String> {
    let (u, v) = s.split_once(',').ok_or("expected u,v")?;
    Ok((u.trim().parse().map_err(|_| "bad u")?, v.trim().parse().map_err(|_| "bad v")?))
}

#[derive(Debug, Deserialize)]
struct NodeRow {
    id: usize,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize)]
struct CertRow {
    bob: usize,
    node: usize,
    cell_u: i64,
    cell_v: i64,
    paths: usize,
    max_flow: usize,
    own_flow: usize,
}

#[derive(Debug, Serialize)]
struct Stats {
    n0: usize,
    n1: usize,
    total_links: usize,
    max_charlie_indegree: usize,
    baseline_links: usize,
    nodes: usize,
    report: PathfindReport,
}

fn grid_from_args(cli: &Cli, a: &Args) -> anyhow::Result<XHopGrid> {
    let cfg = |e: PathfindError| exit_err(EXIT_CONFIG, e.to_string());
    if let Some(path) = &a.nodes {
        let alice = a.alice.ok_or_else(|| exit_err(EXIT_CONFIG, "--nodes needs --alice"))?;
        let mut rdr = csv::Reader::from_path(path)
            .map_err(|e| exit_err(EXIT_CONFIG, format!("reading {}: {e}", path.display())))?;
        let real = rdr
            .deserialize::<NodeRow>()
            .map(|r| r.map(|r| RealNode { id: r.id, pos: Point { x: r.x, y: r.y } }))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| exit_err(EXIT_CONFIG, format!("{}: {e}", path.display())))?;
        return build_grid(&real, alice, &a.bob, a.grid_constant, a.margin).map_err(cfg);
    }
    let (alice, bobs) = match a.alice_at {
        Some(c) => (c, a.bob_at.clone()),
        None => {
            if !a.bob_at.is_empty() {
                return Err(exit_err(EXIT_CONFIG, "--bob-at needs --alice-at"));
            }
            if a.width <= 2 * a.inset || a.height <= 2 * a.inset {
                return Err(exit_err(EXIT_CONFIG, "grid too small for the terminal inset"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let t = random_terminals(a.width, a.height, a.bobs + 1, a.spacing, a.inset, &mut rng);
            (t[0], t[1..].to_vec())
        }
    };
    synthetic_grid(a.width, a.height, alice, &bobs).map_err(cfg)
}

pub fn run(cli: &Cli, a: &Args, m: &mut RunManifest) -> anyhow::Result<()> {
    if a.n0 == 0 {
        return Err(exit_err(EXIT_CONFIG, "--n0 must be positive"));
    }
    let grid = grid_from_args(cli, a)?;
    let opts = PathfindOptions { n0: a.n0, k: a.max_indegree + 1, ..PathfindOptions::default() };
    // separate stream from terminal placement
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    rng.set_stream(1);
    let (virt, report) = multicast_pathfind(&grid, &opts, &mut rng).map_err(|e| match e {
        PathfindError::PathfindFailure { bob, .. } | PathfindError::Disconnected { bob } => {
            let (u, v) = grid.coords(grid.bobs[bob]);
            exit_err(EXIT_PATHFIND, format!("{e} (bob {bob} at cell {u},{v})"))
        }
        other => exit_err(EXIT_CONFIG, other.to_string()),
    })?;
    let g = if a.smooth { map_to_real(&grid, &virt) } else { virt.clone() };
    let certs: Vec<CertRow> = g
        .flow_certificate()
        .into_iter()
        .enumerate()
        .map(|(t, (flow, own))| {
            let (cell_u, cell_v) = grid.coords(grid.bobs[t]);
            CertRow { bob: t, node: g.bobs[t], cell_u, cell_v, paths: g.paths[t].len(), max_flow: flow, own_flow: own }
        })
        .collect();
    let stats = Stats {
        n0: a.n0,
        n1: g.n1(),
        total_links: g.links.len(),
        max_charlie_indegree: g.max_charlie_indegree(),
        baseline_links: baseline_link_count(&grid, a.n0).unwrap_or(0),
        nodes: g.nodes.len(),
        report,
    };
    m.write(&cli.out, "graph.txt", write_graph(&g))?;
    m.write(&cli.out, "certificate.csv", csv_text(&certs)?)?;
    m.write(&cli.out, "stats.json", serde_json::to_string_pretty(&stats)? + "\n")?;
    println!(
        "{} bobs, n0={}, n1={}, {} links (baseline {}), max Charlie indegree {}, flows {:?}",
        certs.len(),
        a.n0,
        stats.n1,
        stats.total_links,
        stats.baseline_links,
        stats.max_charlie_indegree,
        certs.iter().map(|c| c.max_flow).collect::<Vec<_>>()
    );
    if let Err(msg) = g.validate(opts.k) {
        return Err(exit_err(crate::EXIT_INVARIANT, format!("graph invariant violated: {msg}")));
    }
    Ok(())
}
