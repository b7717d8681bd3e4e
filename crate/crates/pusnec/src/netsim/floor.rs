//! Finite-field error floor of the Hamming-metric baseline.
//!
//! The transfer matrix is a five-packet chain
//!
//! ```text
//! y0 = x0 + a1 x1,  y1 = x1 + a2 x2,  y2 = x2 + a3 x3,
//! y3 = x3 + a4 x4 + e,  y4 = a5 x4
//! ```
//!
//! padded with identity packets up to n0, with an error e on packet 3. When
//! a5 = 0 the receiver loses x4 and the unresolved component spreads over
//! x0..x3 together with the error, which a symbol-wise code sees as one
//! erasure plus up to four symbol errors, while a rank-metric code sees one
//! rank erasure and one rank error.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ffield::matrix::Mat;
use crate::ffield::{ExtElem, GroundField};
use crate::gabidulin::{Codec, CodecSpec, OuterWord};
use crate::rlnc::{self, Packet};

use super::{NetsimError, RsCodec};

const CHAIN: usize = 5;
const ERROR_PACKET: usize = 3;

/// Rank-metric code for the experiment: Gab[11, 3] on all n0 = 11 columns.
pub fn floor_codec_spec(w: u32) -> CodecSpec {
    CodecSpec { w, n: 11, k: 3, n0: 11, k0: 3, mu0: 0, l: 1 }
}

/// Encoding vector of every received packet.
pub fn chain_vectors(a: [u16; CHAIN], n0: usize) -> Mat {
    let mut m = vec![vec![0u16; n0]; n0];
    for (j, row) in m.iter_mut().enumerate() {
        row[j] = 1;
    }
    for j in 0..CHAIN {
        m[j][j] = if j == CHAIN - 1 { a[CHAIN - 1] } else { 1 };
        if j + 1 < CHAIN {
            m[j][j + 1] = a[j];
        }
    }
    m
}

fn received(gf: &GroundField, a: [u16; CHAIN], columns: &[Vec<u16>], e: &[u16]) -> Vec<Packet> {
    chain_vectors(a, columns.len())
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            let mut payload = rlnc::combine(gf, &c, columns);
            if j == ERROR_PACKET {
                for (p, &v) in payload.iter_mut().zip(e) {
                    *p ^= v;
                }
            }
            Packet { vector: c, payload }
        })
        .collect()
}

/// One baseline transmission of `msgs` (one RS message per payload row);
/// true when every row decodes correctly.
pub fn rs_chain_trial(rs: &RsCodec, a: [u16; CHAIN], e: &[u16], msgs: &[Vec<u16>]) -> bool {
    let gf = rs.field();
    let n0 = rs.n();
    let words: Vec<Vec<u16>> = msgs.iter().map(|m| rs.encode(m)).collect();
    let columns: Vec<Vec<u16>> = (0..n0).map(|j| words.iter().map(|w| w[j]).collect()).collect();
    let out = rlnc::bob_invert(gf, &received(gf, a, &columns, e), n0, msgs.len());
    let erased: Vec<usize> = (0..n0).filter(|j| !out.pivots.contains(j)).collect();
    msgs.iter().enumerate().all(|(p, m)| {
        let row: Vec<u16> = out.columns.iter().map(|c| c[p]).collect();
        rs.decode(&row, &erased).is_ok_and(|d| &d == m)
    })
}

fn gab_chain_trial(codec: &Codec, a: [u16; CHAIN], e: &[u16], u: &[Vec<ExtElem>], r: &[Vec<ExtElem>]) -> bool {
    let spec = codec.spec();
    let gf = codec.field().ground();
    let Ok(word) = codec.encode_message(u, r) else { return false };
    let columns = rlnc::word_columns(&word, spec.n);
    let out = rlnc::bob_invert(gf, &received(gf, a, &columns, e), spec.n0, spec.n * spec.l);
    let y = OuterWord::from_column_payloads(&out.columns, spec.l, spec.n);
    matches!(codec.decode(&y, &out.erasure_rows), Ok(d) if d.u == u && d.r == r)
}

/// Exact baseline frame-failure probability by enumeration over which of
/// a1..a5 vanish. Row p carries the disturbance d_p = e_p + [a5 = 0]·a4·x4,p
/// on symbol 3 and its multiples by a3, a2a3, a1a2a3 on symbols 2, 1, 0;
/// symbol 4 is flagged as an erasure when a5 = 0. A row fails exactly when
/// 2τ + ρ > n0 − k.
pub fn error_floor_exact(q: f64, n0: usize, k: usize, rows: usize, a5_nonzero: bool, with_error: bool) -> f64 {
    let cap = n0 - k;
    let pz = 1.0 / q;
    let mut total = 0.0;
    for mask in 0u32..1 << CHAIN {
        let zero = |i: usize| mask >> (i - 1) & 1 == 1;
        let mut weight = 1.0;
        for i in 1..=CHAIN {
            let p0 = if i == CHAIN && a5_nonzero { 0.0 } else { pz };
            weight *= if zero(i) { p0 } else { 1.0 - p0 };
        }
        if weight == 0.0 {
            continue;
        }
        let rho = zero(5) as usize;
        let p_disturbed = if with_error || (zero(5) && !zero(4)) {
            1.0 - pz
        } else {
            0.0
        };
        let mut tau = 1;
        for i in (1..=3).rev() {
            if zero(i) {
                break;
            }
            tau += 1;
        }
        if 2 * tau + rho > cap {
            total += weight * (1.0 - (1.0 - p_disturbed).powi(rows as i32));
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorFloorConfig {
    pub w: u32,
    pub trials: u64,
    pub seed: u64,
    pub force_a5_nonzero: bool,
    pub zero_error: bool,
}

impl Default for ErrorFloorConfig {
    fn default() -> Self {
        ErrorFloorConfig { w: 8, trials: 100_000, seed: 1, force_a5_nonzero: false, zero_error: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorFloorReport {
    pub q: u32,
    pub trials: u64,
    pub spec: CodecSpec,
    pub baseline_failures: u64,
    pub baseline_rate: f64,
    pub exact: f64,
    /// 99% binomial interval around the exact probability.
    pub ci99: (f64, f64),
    pub rank_failures: u64,
    pub rank_fer: f64,
}

impl ErrorFloorReport {
    pub fn baseline_within_ci(&self) -> bool {
        (self.ci99.0..=self.ci99.1).contains(&self.baseline_rate)
    }
}

pub fn error_floor_experiment(cfg: &ErrorFloorConfig) -> Result<ErrorFloorReport, NetsimError> {
    let spec = floor_codec_spec(cfg.w);
    let codec = Codec::new(spec)?;
    let gf = codec.field().ground().clone();
    let q = gf.q();
    if cfg.trials < 10 * q as u64 {
        return Err(NetsimError::Config(format!("need at least {} trials for q={q}", 10 * q)));
    }
    let rs = RsCodec::new(gf.clone(), spec.n0, spec.k)?;
    let rows = spec.n * spec.l;
    let field = codec.field();
    let (mut base_fail, mut rank_fail) = (0u64, 0u64);
    for t in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(t);
        let mut a = [0u16; CHAIN];
        for (i, ai) in a.iter_mut().enumerate() {
            *ai =
                if i == CHAIN - 1 && cfg.force_a5_nonzero { gf.random_nonzero(&mut rng) } else { gf.random(&mut rng) };
        }
        let e: Vec<u16> = (0..rows).map(|_| if cfg.zero_error { 0 } else { gf.random(&mut rng) }).collect();
        let msgs: Vec<Vec<u16>> = (0..rows).map(|_| (0..spec.k).map(|_| gf.random(&mut rng)).collect()).collect();
        let u: Vec<Vec<ExtElem>> =
            (0..spec.l).map(|_| (0..spec.k0).map(|_| field.random(&mut rng)).collect()).collect();
        let r: Vec<Vec<ExtElem>> =
            (0..spec.l).map(|_| (0..spec.mu0).map(|_| field.random(&mut rng)).collect()).collect();
        if !rs_chain_trial(&rs, a, &e, &msgs) {
            base_fail += 1;
        }
        if !gab_chain_trial(&codec, a, &e, &u, &r) {
            rank_fail += 1;
        }
    }
    let n = cfg.trials as f64;
    let exact = error_floor_exact(q as f64, spec.n0, spec.k, rows, cfg.force_a5_nonzero, !cfg.zero_error);
    let half = 2.5758 * (exact * (1.0 - exact) / n).sqrt();
    Ok(ErrorFloorReport {
        q,
        trials: cfg.trials,
        spec,
        baseline_failures: base_fail,
        baseline_rate: base_fail as f64 / n,
        exact,
        ci99: ((exact - half).max(0.0), exact + half),
        rank_failures: rank_fail,
        rank_fer: rank_fail as f64 / n,
    })
}
