//! Monte Carlo multicast simulation: node compromise, erasure and error
//! draws, RLNC transport and per-Bob outer decoding.
//!
//! Every trial draws from its own ChaCha8 stream keyed by (seed, trial), so
//! results do not depend on the order or the number of worker threads. The
//! network realization (compromises, erasures, error positions, coding
//! coefficients) comes from one stream and the message and error payloads
//! from another, which keeps realizations common across code parameters.

mod floor;
mod rs;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::matrix::{self, Mat};
use crate::ffield::{ExtElem, FieldError, GroundField};
use crate::gabidulin::{registry, Codec, CodecSpec, GabError, OuterWord};
use crate::pathfind::{self, MulticastGraph, PathfindError, PathfindOptions, Role};
use crate::rlnc::{self, Packet};
use crate::wiretap::{self, LeakagePoint, WiretapDistribution, WiretapError};

pub use floor::{
    chain_vectors, error_floor_exact, error_floor_experiment, floor_codec_spec, rs_chain_trial, ErrorFloorConfig,
    ErrorFloorReport,
};
pub use rs::RsCodec;

#[derive(Debug, Error)]
pub enum NetsimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("decoding failed")]
    DecodeFailure,
    #[error(transparent)]
    Graph(#[from] PathfindError),
    #[error(transparent)]
    Codec(#[from] GabError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Wiretap(#[from] WiretapError),
    #[error("reading {path}: {msg}")]
    Io { path: String, msg: String },
}

/// Transport graph in topological order.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub roles: Vec<Role>,
    pub links: Vec<(usize, usize)>,
    pub order: Vec<usize>,
    pub alice: usize,
    pub bobs: Vec<usize>,
    pub in_links: Vec<Vec<usize>>,
    pub out_links: Vec<Vec<usize>>,
    /// Links whose destination is a Bob.
    pub last_hop: Vec<bool>,
}

impl Network {
    fn build(
        roles: Vec<Role>,
        links: Vec<(usize, usize)>,
        alice: usize,
        bobs: Vec<usize>,
    ) -> Result<Self, NetsimError> {
        let n = roles.len();
        let mut in_links = vec![Vec::new(); n];
        let mut out_links = vec![Vec::new(); n];
        for (i, &(a, b)) in links.iter().enumerate() {
            if a >= n || b >= n {
                return Err(NetsimError::Config("link endpoint out of range".into()));
            }
            out_links[a].push(i);
            in_links[b].push(i);
        }
        let mut indeg: Vec<usize> = in_links.iter().map(|l| l.len()).collect();
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = stack.pop() {
            order.push(v);
            for &l in out_links[v].iter().rev() {
                let b = links[l].1;
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    stack.push(b);
                }
            }
        }
        if order.len() != n {
            return Err(NetsimError::Config("transport graph has a cycle".into()));
        }
        if roles[alice] != Role::Alice || bobs.iter().any(|&b| roles[b] != Role::Bob) {
            return Err(NetsimError::Config("terminal roles do not match".into()));
        }
        if bobs.iter().any(|&b| !out_links[b].is_empty()) || !in_links[alice].is_empty() {
            return Err(NetsimError::Config("bobs may not forward and alice may not receive".into()));
        }
        let last_hop = links.iter().map(|&(_, b)| roles[b] == Role::Bob).collect();
        Ok(Network { roles, links, order, alice, bobs, in_links, out_links, last_hop })
    }

    pub fn from_graph(g: &MulticastGraph) -> Result<Self, NetsimError> {
        Self::build(g.nodes.iter().map(|n| n.role).collect(), g.links.clone(), g.alice, g.bobs.clone())
    }

    /// n0 node-disjoint chains of η Charlies; the last Charlie of every chain
    /// links to each of the Bobs.
    pub fn disjoint_paths(eta: usize, n0: usize, bobs: usize) -> Self {
        let mut roles = vec![Role::Alice];
        let mut links = Vec::new();
        let mut tails = Vec::new();
        for _ in 0..n0 {
            let mut prev = 0;
            for _ in 0..eta {
                roles.push(Role::Charlie);
                let v = roles.len() - 1;
                links.push((prev, v));
                prev = v;
            }
            tails.push(prev);
        }
        let bob_ids: Vec<usize> = (0..bobs).map(|t| roles.len() + t).collect();
        roles.extend(std::iter::repeat_n(Role::Bob, bobs));
        for &b in &bob_ids {
            for &c in &tails {
                links.push((c, b));
            }
        }
        Self::build(roles, links, 0, bob_ids).expect("disjoint-path graph is well formed")
    }

    pub fn node_count(&self) -> usize {
        self.roles.len()
    }

    pub fn n1(&self) -> usize {
        self.out_links[self.alice].len()
    }

    pub fn max_charlie_indegree(&self) -> usize {
        (0..self.node_count())
            .filter(|&v| self.roles[v] == Role::Charlie)
            .map(|v| self.in_links[v].len())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    #[default]
    RankMetric,
    HammingBaseline,
}

/// Which links the erasure rate ε applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErasureScope {
    #[default]
    LastHop,
    AllLinks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSource {
    File {
        path: String,
    },
    Grid {
        width: usize,
        height: usize,
        bobs: usize,
        #[serde(default = "default_indegree")]
        max_indegree: usize,
        #[serde(default)]
        grid_seed: u64,
    },
    DisjointPaths {
        eta: usize,
        bobs: usize,
    },
}

fn default_indegree() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CodeSource {
    Preset(String),
    Spec(CodecSpec),
}

fn default_l() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub graph: GraphSource,
    pub code: CodeSource,
    /// Interleaving depth applied to preset codes.
    #[serde(default = "default_l")]
    pub l: usize,
    pub gamma: f64,
    pub eps: f64,
    #[serde(default)]
    pub e_l1: f64,
    #[serde(default)]
    pub e_l2: f64,
    #[serde(default)]
    pub eps_n: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub baseline: Baseline,
    #[serde(default)]
    pub erasure_scope: ErasureScope,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), NetsimError> {
        for (name, r) in
            [("gamma", self.gamma), ("eps", self.eps), ("e_l1", self.e_l1), ("e_l2", self.e_l2), ("eps_n", self.eps_n)]
        {
            if !(0.0..=1.0).contains(&r) {
                return Err(NetsimError::Config(format!("{name}={r} outside [0,1]")));
            }
        }
        if self.trials == 0 {
            return Err(NetsimError::Config("trials must be at least 1".into()));
        }
        Ok(())
    }

    /// Trial-count guidance: about ten over the smallest nonzero target rate.
    pub fn trial_warning(&self, target_rate: f64) -> Option<String> {
        let need = (10.0 / target_rate).ceil();
        (target_rate > 0.0 && (self.trials as f64) < need)
            .then(|| format!("{} trials is below the suggested {need} for a rate near {target_rate:e}", self.trials))
    }

    pub fn codec_spec(&self) -> Result<CodecSpec, NetsimError> {
        let spec = match &self.code {
            CodeSource::Preset(id) => registry::lookup(id)?.0.spec(self.l),
            CodeSource::Spec(s) => *s,
        };
        spec.validate(false)?;
        Ok(spec)
    }

    pub fn network(&self, spec: &CodecSpec) -> Result<Network, NetsimError> {
        match &self.graph {
            GraphSource::DisjointPaths { eta, bobs } => Ok(Network::disjoint_paths(*eta, spec.n0, *bobs)),
            GraphSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| NetsimError::Io { path: path.clone(), msg: e.to_string() })?;
                Network::from_graph(&pathfind::read_graph(&text)?)
            }
            GraphSource::Grid { width, height, bobs, max_indegree, grid_seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*grid_seed);
                let terms = pathfind::random_terminals(*width, *height, bobs + 1, 3, 1, &mut rng);
                let grid = pathfind::synthetic_grid(*width, *height, terms[0], &terms[1..])?;
                let opts = PathfindOptions { n0: spec.n0, k: max_indegree + 1, ..PathfindOptions::default() };
                let (g, _) = pathfind::multicast_pathfind(&grid, &opts, &mut rng)?;
                Network::from_graph(&g)
            }
        }
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: Vec<bool>,
    /// Wiretapped rank, computed from erasure-free encoding vectors.
    pub mu: usize,
    /// Rank deficiency n0 − rank at each Bob.
    pub rho: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub trials: u64,
    pub n0: usize,
    pub k: usize,
    pub k0: usize,
    pub fer: f64,
    pub fer_se: f64,
    pub fer_b: Vec<f64>,
    pub fer_b_se: Vec<f64>,
    /// Empirical p(μ) for μ = 0..=n0.
    pub p_mu: Vec<f64>,
    pub plp: f64,
    pub plp_se: f64,
    pub lii: Vec<LeakagePoint>,
    pub mean_rho: Vec<f64>,
}

/// Per-decode wall-clock samples, kept out of [`MetricsReport`] so reports
/// stay bit-reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DecodeTiming {
    pub samples: usize,
    pub mean_us: f64,
    /// Histogram over log2 microsecond buckets: bucket b counts decodes with
    /// 2^b ≤ t < 2^(b+1) μs (bucket 0 also holds t < 1 μs).
    pub histogram: Vec<u64>,
}

impl DecodeTiming {
    fn from_samples(ns: &[u64]) -> Self {
        let mut histogram = vec![0u64; 24];
        for &t in ns {
            let us = (t / 1000).max(1);
            let b = (63 - us.leading_zeros() as usize).min(23);
            histogram[b] += 1;
        }
        let mean_us = if ns.is_empty() { 0.0 } else { ns.iter().sum::<u64>() as f64 / ns.len() as f64 / 1000.0 };
        DecodeTiming { samples: ns.len(), mean_us, histogram }
    }
}

pub fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Per-trial realization independent of the codec.
struct Realization {
    compromised: Vec<bool>,
    node_erased: Vec<bool>,
    link_erased: Vec<bool>,
    link_error: Vec<bool>,
    alice: Mat,
    relays: Vec<Mat>,
}

const PAYLOAD_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

pub struct Simulator {
    net: Network,
    codec: Codec,
    rs: Option<RsCodec>,
    cfg: ScenarioConfig,
}

impl Simulator {
    pub fn new(net: Network, spec: CodecSpec, cfg: ScenarioConfig) -> Result<Self, NetsimError> {
        cfg.validate()?;
        let codec = Codec::new(spec)?;
        if net.n1() < spec.n0 {
            return Err(NetsimError::Config(format!("alice has {} links but n0={}", net.n1(), spec.n0)));
        }
        if net.bobs.iter().any(|&b| net.in_links[b].len() < spec.n0) {
            return Err(NetsimError::Config("a bob has fewer than n0 incoming links".into()));
        }
        let rs = match cfg.baseline {
            Baseline::RankMetric => None,
            Baseline::HammingBaseline => Some(RsCodec::new(GroundField::new(spec.w)?, spec.n0, spec.k)?),
        };
        Ok(Simulator { net, codec, rs, cfg })
    }

    /// Resolve graph and codec from the configuration.
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self, NetsimError> {
        let spec = cfg.codec_spec()?;
        let net = cfg.network(&spec)?;
        Self::new(net, spec, cfg.clone())
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    fn realize(&self, trial: u64) -> Realization {
        let net = &self.net;
        let gf = self.codec.field().ground();
        let c = &self.cfg;
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        rng.set_stream(trial);
        let nn = net.node_count();
        let charlie = |v: usize| net.roles[v] == Role::Charlie;
        let compromised = (0..nn).map(|v| rng.random::<f64>() < c.gamma && charlie(v)).collect();
        let node_erased = (0..nn).map(|v| rng.random::<f64>() < c.eps_n && charlie(v)).collect();
        let link_erased = (0..net.links.len())
            .map(|l| {
                let hit = rng.random::<f64>() < c.eps;
                hit && (c.erasure_scope == ErasureScope::AllLinks || net.last_hop[l])
            })
            .collect();
        let link_error = (0..net.links.len())
            .map(|l| {
                let e1 = rng.random::<f64>() < c.e_l1 && net.last_hop[l];
                let e2 = rng.random::<f64>() < c.e_l2;
                e1 || e2
            })
            .collect();
        let n0 = self.codec.spec().n0;
        let n1 = net.n1();
        let alice = loop {
            let m: Mat = (0..n1).map(|_| (0..n0).map(|_| gf.random(&mut rng)).collect()).collect();
            if matrix::rank(gf, &m) == n0 {
                break m;
            }
        };
        let relays = (0..nn)
            .map(|v| {
                if !charlie(v) {
                    return Vec::new();
                }
                let ins = net.in_links[v].len();
                (0..net.out_links[v].len())
                    .map(|_| {
                        (0..ins)
                            .map(|_| if ins == 1 { gf.random_nonzero(&mut rng) } else { gf.random(&mut rng) })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Realization { compromised, node_erased, link_erased, link_error, alice, relays }
    }

    /// Push packets through the network in topological order. With
    /// `impaired = false` erasures and errors are ignored.
    fn transport<R: Rng>(
        &self,
        real: &Realization,
        alice_packets: Vec<Packet>,
        impaired: bool,
        rng: &mut R,
    ) -> Vec<Packet> {
        let net = &self.net;
        let gf = self.codec.field().ground();
        let n0 = self.codec.spec().n0;
        let plen = alice_packets.first().map_or(0, |p| p.payload.len());
        let mut on_link: Vec<Option<Packet>> = vec![None; net.links.len()];
        let mut alice_packets = Some(alice_packets);
        for &v in &net.order {
            let out = match net.roles[v] {
                Role::Bob => continue,
                Role::Alice => alice_packets.take().unwrap_or_default(),
                Role::Charlie => {
                    let incoming: Vec<Packet> = net.in_links[v]
                        .iter()
                        .map(|&l| on_link[l].clone().unwrap_or_else(|| Packet::tombstone(n0, plen)))
                        .collect();
                    if impaired && real.node_erased[v] {
                        vec![Packet::tombstone(n0, plen); net.out_links[v].len()]
                    } else {
                        rlnc::relay_with(gf, &incoming, &real.relays[v])
                    }
                }
            };
            for (mut p, &l) in out.into_iter().zip(net.out_links[v].iter()) {
                if impaired && real.link_erased[l] {
                    p = Packet::tombstone(n0, plen);
                } else if impaired && real.link_error[l] {
                    rlnc::inject_error(gf, &mut p, rng);
                }
                on_link[l] = Some(p);
            }
        }
        on_link.into_iter().map(|p| p.unwrap_or_else(|| Packet::tombstone(n0, plen))).collect()
    }

    fn wiretapped_rank(&self, real: &Realization) -> usize {
        let n0 = self.codec.spec().n0;
        let gf = self.codec.field().ground();
        let src: Vec<Packet> = real.alice.iter().map(|c| Packet { vector: c.clone(), payload: Vec::new() }).collect();
        let mut unused = ChaCha8Rng::seed_from_u64(0);
        let links = self.transport(real, src, false, &mut unused);
        let tapped: Mat = (0..self.net.node_count())
            .filter(|&v| real.compromised[v])
            .flat_map(|v| self.net.in_links[v].iter().map(|&l| links[l].vector.clone()))
            .collect();
        if tapped.is_empty() {
            0
        } else {
            matrix::rank(gf, &tapped).min(n0)
        }
    }

    fn run_trial_inner(&self, trial: u64, timings: Option<&mut Vec<u64>>) -> TrialOutcome {
        let real = self.realize(trial);
        let mu = self.wiretapped_rank(&real);
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ PAYLOAD_STREAM);
        rng.set_stream(trial);
        let spec = *self.codec.spec();
        let field = self.codec.field();
        let gf = field.ground();
        let (n, l, n0) = (spec.n, spec.l, spec.n0);
        let plen = n * l;

        let (columns, expect): (Vec<Vec<u16>>, Message) = match &self.rs {
            None => {
                let u: Vec<Vec<ExtElem>> =
                    (0..l).map(|_| (0..spec.k0).map(|_| field.random(&mut rng)).collect()).collect();
                let r: Vec<Vec<ExtElem>> =
                    (0..l).map(|_| (0..spec.mu0).map(|_| field.random(&mut rng)).collect()).collect();
                let word = self.codec.encode_message(&u, &r).expect("valid message");
                (rlnc::word_columns(&word, n), Message::Rank(u, r))
            }
            Some(rs) => {
                let msgs: Vec<Vec<u16>> =
                    (0..plen).map(|_| (0..spec.k).map(|_| gf.random(&mut rng)).collect()).collect();
                let words: Vec<Vec<u16>> = msgs.iter().map(|m| rs.encode(m)).collect();
                let cols = (0..n0).map(|j| words.iter().map(|w| w[j]).collect()).collect();
                (cols, Message::Hamming(msgs))
            }
        };
        let src: Vec<Packet> =
            real.alice.iter().map(|c| Packet { vector: c.clone(), payload: rlnc::combine(gf, c, &columns) }).collect();
        let links = self.transport(&real, src, true, &mut rng);

        let mut timings = timings;
        let mut success = Vec::with_capacity(self.net.bobs.len());
        let mut rho = Vec::with_capacity(self.net.bobs.len());
        for &b in &self.net.bobs {
            let received: Vec<Packet> = self.net.in_links[b].iter().map(|&li| links[li].clone()).collect();
            let out = rlnc::bob_invert(gf, &received, n0, plen);
            rho.push(n0 - out.rank);
            let start = Instant::now();
            let ok = match (&expect, &self.rs) {
                (Message::Rank(u, r), _) => {
                    let word = OuterWord::from_column_payloads(&out.columns, l, n);
                    matches!(self.codec.decode(&word, &out.erasure_rows), Ok(d) if &d.u == u && &d.r == r)
                }
                (Message::Hamming(msgs), Some(rs)) => {
                    let erased: Vec<usize> = (0..n0).filter(|j| !out.pivots.contains(j)).collect();
                    msgs.iter().enumerate().all(|(p, m)| {
                        let row: Vec<u16> = out.columns.iter().map(|c| c[p]).collect();
                        rs.decode(&row, &erased).is_ok_and(|d| &d == m)
                    })
                }
                (Message::Hamming(_), None) => false,
            };
            if let Some(t) = timings.as_deref_mut() {
                t.push(start.elapsed().as_nanos() as u64);
            }
            success.push(ok);
        }
        TrialOutcome { success, mu, rho }
    }

    pub fn run_trial(&self, trial: u64) -> TrialOutcome {
        self.run_trial_inner(trial, None)
    }

    fn aggregate(&self, outcomes: &[TrialOutcome]) -> Result<MetricsReport, NetsimError> {
        let spec = self.codec.spec();
        let trials = outcomes.len() as u64;
        let nb = self.net.bobs.len();
        let fails = outcomes.iter().filter(|o| o.success.iter().any(|s| !s)).count();
        let fer = fails as f64 / trials as f64;
        let fer_b: Vec<f64> =
            (0..nb).map(|t| outcomes.iter().filter(|o| !o.success[t]).count() as f64 / trials as f64).collect();
        let mut counts = vec![0u64; spec.n0 + 1];
        for o in outcomes {
            counts[o.mu] += 1;
        }
        let dist = WiretapDistribution::from_counts(&counts);
        let report = wiretap::secrecy_report(&dist, spec.k, spec.k0, (spec.n as u32 * spec.w) as f64)?;
        let mean_rho = (0..nb).map(|t| outcomes.iter().map(|o| o.rho[t] as f64).sum::<f64>() / trials as f64).collect();
        Ok(MetricsReport {
            trials,
            n0: spec.n0,
            k: spec.k,
            k0: spec.k0,
            fer,
            fer_se: binomial_se(fer, trials),
            fer_b_se: fer_b.iter().map(|&p| binomial_se(p, trials)).collect(),
            fer_b,
            plp: report.plp,
            plp_se: binomial_se(report.plp, trials),
            p_mu: dist.p,
            lii: report.points,
            mean_rho,
        })
    }

    pub fn run(&self) -> Result<MetricsReport, NetsimError> {
        let outcomes: Vec<TrialOutcome> = (0..self.cfg.trials).into_par_iter().map(|t| self.run_trial(t)).collect();
        self.aggregate(&outcomes)
    }

    /// Like [`Simulator::run`], also collecting per-decode wall-clock times.
    pub fn run_timed(&self) -> Result<(MetricsReport, DecodeTiming), NetsimError> {
        let results: Vec<(TrialOutcome, Vec<u64>)> = (0..self.cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut ns = Vec::new();
                let o = self.run_trial_inner(t, Some(&mut ns));
                (o, ns)
            })
            .collect();
        let ns: Vec<u64> = results.iter().flat_map(|r| r.1.iter().copied()).collect();
        let outcomes: Vec<TrialOutcome> = results.into_iter().map(|r| r.0).collect();
        Ok((self.aggregate(&outcomes)?, DecodeTiming::from_samples(&ns)))
    }
}

enum Message {
    Rank(Vec<Vec<ExtElem>>, Vec<Vec<ExtElem>>),
    Hamming(Vec<Vec<u16>>),
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MetricsReport, NetsimError> {
    Simulator::from_config(cfg)?.run()
}

/// Standard maximum-distance-separable baseline RS[n_h, k_h] over F_{2^w}.
pub fn hamming_baseline_codec(w: u32, n_h: usize, k_h: usize) -> Result<RsCodec, NetsimError> {
    RsCodec::new(GroundField::new(w)?, n_h, k_h)
}
