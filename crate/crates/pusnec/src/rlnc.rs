//! F_q random linear network coding: source spreading, relay mixing and
//! receiver inversion with rank-deficiency reporting.

use rand::Rng;
use thiserror::Error;

use crate::ffield::matrix::{self, Mat};
use crate::ffield::GroundField;
use crate::gabidulin::OuterWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RlncError {
    #[error("relay indegree {indegree} violates the bound < {k}")]
    IndegreeViolation { indegree: usize, k: usize },
    #[error("not enough outgoing links: n1={n1} < n0={n0}")]
    OutDegree { n1: usize, n0: usize },
}

/// A coded packet: its global encoding vector over the n0 source columns and
/// the ground-field payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub vector: Vec<u16>,
    pub payload: Vec<u16>,
}

impl Packet {
    /// Placeholder for an erased packet.
    pub fn tombstone(n0: usize, payload_len: usize) -> Self {
        Packet { vector: vec![0; n0], payload: vec![0; payload_len] }
    }

    pub fn is_tombstone(&self) -> bool {
        self.vector.iter().all(|&c| c == 0) && self.payload.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpreadMode {
    /// Uniform coefficients, kept as drawn.
    #[default]
    AsDrawn,
    /// Uniform coefficients, redrawn until the n0 × n1 matrix has full rank.
    StrictRank,
    /// Packet j carries column j (requires n1 = n0).
    Identity,
}

fn axpy(gf: &GroundField, acc: &mut [u16], c: u16, x: &[u16]) {
    if c == 0 {
        return;
    }
    for (a, &v) in acc.iter_mut().zip(x.iter()) {
        *a ^= gf.mul(c, v);
    }
}

/// Linear combination Σ_i c_i·x_i of payloads.
pub fn combine(gf: &GroundField, coeffs: &[u16], xs: &[Vec<u16>]) -> Vec<u16> {
    let len = xs.first().map_or(0, |x| x.len());
    let mut out = vec![0u16; len];
    for (&c, x) in coeffs.iter().zip(xs.iter()) {
        axpy(gf, &mut out, c, x);
    }
    out
}

/// Payloads of the n0 columns of an outer word.
pub fn word_columns(word: &OuterWord, n: usize) -> Vec<Vec<u16>> {
    (0..word.n0()).map(|j| word.column_payload(j, n)).collect()
}

/// Source packets: packet j carries Σ_i c_i^(j) x_i.
pub fn alice_spread<R: Rng + ?Sized>(
    gf: &GroundField,
    columns: &[Vec<u16>],
    n1: usize,
    mode: SpreadMode,
    rng: &mut R,
) -> Result<Vec<Packet>, RlncError> {
    let n0 = columns.len();
    if n1 < n0 {
        return Err(RlncError::OutDegree { n1, n0 });
    }
    let vectors: Mat = match mode {
        SpreadMode::Identity => {
            if n1 != n0 {
                return Err(RlncError::OutDegree { n1, n0 });
            }
            matrix::identity(n0)
        }
        SpreadMode::AsDrawn | SpreadMode::StrictRank => loop {
            let v: Mat = (0..n1).map(|_| (0..n0).map(|_| gf.random(rng)).collect()).collect();
            if mode == SpreadMode::AsDrawn || matrix::rank(gf, &v) == n0 {
                break v;
            }
        },
    };
    Ok(vectors
        .into_iter()
        .map(|c| {
            let payload = combine(gf, &c, columns);
            Packet { vector: c, payload }
        })
        .collect())
}

/// Mix incoming packets with an explicit O × I coefficient matrix.
pub fn relay_with(gf: &GroundField, incoming: &[Packet], coeffs: &Mat) -> Vec<Packet> {
    let n0 = incoming.first().map_or(0, |p| p.vector.len());
    let plen = incoming.first().map_or(0, |p| p.payload.len());
    coeffs
        .iter()
        .map(|row| {
            let mut out = Packet::tombstone(n0, plen);
            for (&c, p) in row.iter().zip(incoming.iter()) {
                axpy(gf, &mut out.vector, c, &p.vector);
                axpy(gf, &mut out.payload, c, &p.payload);
            }
            out
        })
        .collect()
}

/// Random relay mixing; indegree must stay below k.
pub fn relay<R: Rng + ?Sized>(
    gf: &GroundField,
    incoming: &[Packet],
    out_degree: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Packet>, RlncError> {
    if incoming.len() >= k {
        return Err(RlncError::IndegreeViolation { indegree: incoming.len(), k });
    }
    let coeffs: Mat = (0..out_degree).map(|_| (0..incoming.len()).map(|_| gf.random(rng)).collect()).collect();
    Ok(relay_with(gf, incoming, &coeffs))
}

/// Add a uniformly random nonzero payload to a packet.
pub fn inject_error<R: Rng + ?Sized>(gf: &GroundField, packet: &mut Packet, rng: &mut R) {
    loop {
        let e: Vec<u16> = packet.payload.iter().map(|_| gf.random(rng)).collect();
        if e.iter().any(|&c| c != 0) {
            for (p, v) in packet.payload.iter_mut().zip(e) {
                *p ^= v;
            }
            return;
        }
    }
}

/// Receiver-side result of Gaussian elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BobOutput {
    /// Estimated source columns ỹ_0..ỹ_{n0-1}.
    pub columns: Vec<Vec<u16>>,
    /// Rank-erasure locations: a basis of the right kernel of the transfer
    /// matrix, as ρ' rows of length n0.
    pub erasure_rows: Mat,
    /// Source columns determined by the received packets.
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Solve payload_j = c_j·ỹ for ỹ. Free variables are set to zero and
/// inconsistent equations are dropped.
pub fn bob_invert(gf: &GroundField, received: &[Packet], n0: usize, payload_len: usize) -> BobOutput {
    let mut aug: Mat = received
        .iter()
        .map(|p| {
            let mut row = p.vector.clone();
            row.extend_from_slice(&p.payload);
            row
        })
        .collect();
    let a: Mat = received.iter().map(|p| p.vector.clone()).collect();
    let pivots = matrix::rref(gf, &mut aug);
    let mut columns = vec![vec![0u16; payload_len]; n0];
    let mut solved = Vec::new();
    for (row, &pc) in pivots.iter().enumerate() {
        if pc >= n0 {
            break;
        }
        columns[pc] = aug[row][n0..].to_vec();
        solved.push(pc);
    }
    let rank = solved.len();
    let erasure_rows = if received.is_empty() { matrix::identity(n0) } else { matrix::kernel(gf, &a, n0) };
    BobOutput { columns, erasure_rows, pivots: solved, rank }
}

/// Transfer matrix whose rows are the encoding vectors of the given packets.
pub fn transfer_matrix(received: &[Packet]) -> Mat {
    received.iter().map(|p| p.vector.clone()).collect()
}

/// Probability that a uniformly random rows × cols matrix over F_q has
/// rank min(rows, cols).
pub fn full_rank_probability(q: f64, rows: usize, cols: usize) -> f64 {
    let (small, big) = if rows <= cols { (rows, cols) } else { (cols, rows) };
    (0..small).map(|i| 1.0 - q.powi(i as i32 - big as i32)).product()
}
