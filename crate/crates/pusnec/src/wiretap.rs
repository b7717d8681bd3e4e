//! Secrecy analytics under a probabilistic node-compromise model.
//!
//! Leakage is expressed in units of log2(q^m) bits, i.e. in message symbols.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::ffield::{matrix, ExtElem, GroundField, NormalBasisField};
use crate::gabidulin::{Codec, CodecSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WiretapError {
    #[error("xi must satisfy 1 <= xi <= {max}, got {xi}")]
    InvalidXi { xi: usize, max: usize },
    #[error("distribution does not sum to one (sum = {0})")]
    NotNormalized(f64),
    #[error("enumeration of {0} messages exceeds the oracle limit")]
    TooLarge(u64),
    #[error("coset structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    MonteCarlo,
    Analytic,
}

/// p(μ) for μ = 0..=n0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WiretapDistribution {
    pub p: Vec<f64>,
    pub source: Provenance,
}

impl WiretapDistribution {
    pub fn new(p: Vec<f64>, source: Provenance) -> Result<Self, WiretapError> {
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 || p.iter().any(|&x| x < 0.0) {
            return Err(WiretapError::NotNormalized(sum));
        }
        Ok(WiretapDistribution { p, source })
    }

    /// Empirical distribution from rank samples, capped at n0.
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let p = counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect();
        WiretapDistribution { p, source: Provenance::MonteCarlo }
    }

    pub fn prob(&self, mu: usize) -> f64 {
        self.p.get(mu).copied().unwrap_or(0.0)
    }

    /// Pr[μ ≥ k].
    pub fn tail(&self, k: usize) -> f64 {
        self.p.iter().skip(k).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakagePoint {
    pub xi: usize,
    pub plp: f64,
    pub i_r: f64,
    pub i_l: f64,
}

/// Ramp leakage I_R, perfect-leakage probability and I_L = I_R + ξ·PLP.
pub fn leakage_indices(dist: &WiretapDistribution, k: usize, xi: usize) -> Result<LeakagePoint, WiretapError> {
    if xi == 0 || xi > k {
        return Err(WiretapError::InvalidXi { xi, max: k });
    }
    let i_r = (k - xi..k).map(|mu| (mu + xi - k) as f64 * dist.prob(mu)).sum();
    let plp = dist.tail(k);
    Ok(LeakagePoint { xi, plp, i_r, i_l: i_r + xi as f64 * plp })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecrecyReport {
    pub k: usize,
    pub plp: f64,
    pub points: Vec<LeakagePoint>,
    /// log2(q^m): bits per unit of leakage.
    pub bits_per_unit: f64,
}

impl SecrecyReport {
    pub fn i_l_bits(&self, xi: usize) -> Option<f64> {
        self.points.iter().find(|p| p.xi == xi).map(|p| p.i_l * self.bits_per_unit)
    }
}

pub fn secrecy_report(
    dist: &WiretapDistribution,
    k: usize,
    k0: usize,
    bits_per_unit: f64,
) -> Result<SecrecyReport, WiretapError> {
    let points = (1..=k0).map(|xi| leakage_indices(dist, k, xi)).collect::<Result<Vec<_>, _>>()?;
    Ok(SecrecyReport { k, plp: dist.tail(k), points, bits_per_unit })
}

fn binom(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Disjoint-path model: n0 paths of η Charlies each, N receivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisjointPathModel {
    pub gamma: f64,
    pub eps: f64,
    pub eta: usize,
    pub n0: usize,
    pub bobs: usize,
}

impl DisjointPathModel {
    /// p(μ): μ of the n0 paths contain at least one compromised Charlie.
    pub fn wiretap_distribution(&self) -> WiretapDistribution {
        let secure = (1.0 - self.gamma).powi(self.eta as i32);
        let p = (0..=self.n0)
            .map(|mu| binom(self.n0, mu) * secure.powi((self.n0 - mu) as i32) * (1.0 - secure).powi(mu as i32))
            .collect();
        WiretapDistribution { p, source: Provenance::Analytic }
    }

    /// Probability that l paths are erased before the last hop.
    pub fn eps1(&self, l: usize) -> f64 {
        let ok = (1.0 - self.eps).powi(self.eta as i32);
        binom(self.n0, l) * ok.powi((self.n0 - l) as i32) * (1.0 - ok).powi(l as i32)
    }

    /// Probability that j of the remaining m last-hop links are erased.
    pub fn eps2(&self, m: usize, j: usize) -> f64 {
        binom(m, j) * (1.0 - self.eps).powi((m - j) as i32) * self.eps.powi(j as i32)
    }

    fn success(&self, k: usize, receivers: usize) -> f64 {
        let red = self.n0 - k;
        (0..=red)
            .map(|l| {
                let inner: f64 = (0..=red - l).map(|j| self.eps2(self.n0 - l, j)).sum();
                self.eps1(l) * inner.powi(receivers as i32)
            })
            .sum()
    }

    /// Frame error rate over all receivers.
    pub fn fer(&self, k: usize) -> f64 {
        1.0 - self.success(k, self.bobs)
    }

    /// Frame error rate of a single receiver.
    pub fn fer_single(&self, k: usize) -> f64 {
        1.0 - self.success(k, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointAnalytics {
    pub dist: WiretapDistribution,
    pub fer: f64,
    pub fer_single: f64,
    pub report: SecrecyReport,
}

pub fn disjoint_path_analytics(
    model: &DisjointPathModel,
    k: usize,
    k0: usize,
    bits_per_unit: f64,
) -> Result<DisjointAnalytics, WiretapError> {
    if !(0.0..=1.0).contains(&model.gamma) || !(0.0..=1.0).contains(&model.eps) || model.eta == 0 {
        return Err(WiretapError::InvalidParameter("rates must lie in [0,1] and eta >= 1".into()));
    }
    if k == 0 || k > model.n0 {
        return Err(WiretapError::InvalidParameter(format!("k={k} outside 1..={}", model.n0)));
    }
    let dist = model.wiretap_distribution();
    let report = secrecy_report(&dist, k, k0, bits_per_unit)?;
    Ok(DisjointAnalytics { fer: model.fer(k), fer_single: model.fer_single(k), dist, report })
}

/// Mutual information between ξ secret symbols and μ tapped independent
/// combinations, for an MRD code with k = k0 + μ0 whose withheld prefix
/// covers the secret (k1 ≥ k0).
pub fn threshold_model_mi(k: usize, mu0: usize, mu: usize, xi: usize) -> Result<f64, WiretapError> {
    let k0 = k.checked_sub(mu0).ok_or_else(|| WiretapError::InvalidParameter("mu0 > k".into()))?;
    if xi == 0 || xi > k0 {
        return Err(WiretapError::InvalidXi { xi, max: k0 });
    }
    let v = if mu <= mu0 {
        0
    } else if mu < k {
        (xi + mu).saturating_sub(k)
    } else {
        xi
    };
    Ok(v as f64)
}

/// Upper bound on the number of enumerated messages.
pub const ORACLE_LIMIT: u64 = 1 << 22;

/// Exhaustive mutual information I(U_S; Z) in bits for every requested index
/// set S of the secret symbols.
///
/// All `k` message symbols (secret and mask) range uniformly over an alphabet
/// of size `alphabet`; `observe` maps a message to Eve's observation.
pub fn toy_mi_oracle<F>(alphabet: u64, k: usize, sets: &[Vec<usize>], observe: F) -> Result<Vec<f64>, WiretapError>
where
    F: Fn(&[u16]) -> Vec<u16>,
{
    let total = alphabet
        .checked_pow(k as u32)
        .filter(|&t| t <= ORACLE_LIMIT)
        .ok_or(WiretapError::TooLarge(alphabet.saturating_pow(k as u32)))?;
    let mut msg = vec![0u16; k];
    let mut z_ids: HashMap<Vec<u16>, u32> = HashMap::new();
    let mut zs = Vec::with_capacity(total as usize);
    let mut msgs = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut t = idx;
        for m in msg.iter_mut() {
            *m = (t % alphabet) as u16;
            t /= alphabet;
        }
        let z = observe(&msg);
        let next = z_ids.len() as u32;
        let id = *z_ids.entry(z).or_insert(next);
        zs.push(id);
        msgs.push(msg.clone());
    }
    let n = total as f64;
    let mut pz: HashMap<u32, f64> = HashMap::new();
    for &z in &zs {
        *pz.entry(z).or_default() += 1.0 / n;
    }
    let mut out = Vec::with_capacity(sets.len());
    for set in sets {
        let mut joint: HashMap<(u64, u32), f64> = HashMap::new();
        let mut ps: HashMap<u64, f64> = HashMap::new();
        for (m, &z) in msgs.iter().zip(zs.iter()) {
            let s = set.iter().fold(0u64, |acc, &i| acc * alphabet + m[i] as u64);
            *joint.entry((s, z)).or_default() += 1.0 / n;
            *ps.entry(s).or_default() += 1.0 / n;
        }
        let mi: f64 = joint.iter().map(|(&(s, z), &p)| p * (p / (ps[&s] * pz[&z])).log2()).sum();
        out.push(mi.max(0.0));
    }
    Ok(out)
}

/// The [3, 2] code over F_4 with generator rows (1, 1, 1) and (1, α, α²).
pub fn rs32_encode(gf: &GroundField, u: &[u16]) -> [u16; 3] {
    let a = gf.alpha_pow(1);
    let a2 = gf.alpha_pow(2);
    [u[0] ^ u[1], u[0] ^ gf.mul(a, u[1]), u[0] ^ gf.mul(a2, u[1])]
}

/// Toy-code table: I(U0; X0), I(U0,U1; X0), I(U0,U1; X0,X1) in bits.
pub fn rs32_table() -> Result<[f64; 3], WiretapError> {
    let gf = GroundField::new(2).expect("F_4");
    let tap1 = toy_mi_oracle(4, 2, &[vec![0], vec![0, 1]], |u| vec![rs32_encode(&gf, u)[0]])?;
    let tap2 = toy_mi_oracle(4, 2, &[vec![0, 1]], |u| rs32_encode(&gf, u)[..2].to_vec())?;
    Ok([tap1[0], tap1[1], tap2[0]])
}

/// Eve's view of a Gabidulin outer word through an F_q wiretap matrix B
/// (μ × n0): z = x·Bᵀ for a single component.
pub fn tap(field: &NormalBasisField, x: &[ExtElem], b: &matrix::Mat) -> Vec<ExtElem> {
    b.iter()
        .map(|row| row.iter().zip(x.iter()).fold(ExtElem::ZERO, |acc, (&c, &xv)| acc + field.scale(xv, c)))
        .collect()
}

/// Exhaustive I(U_S; Z) for a single-component Gabidulin code and wiretap
/// matrix B, in units of log2 q^n.
pub fn gabidulin_mi(codec: &Codec, b: &matrix::Mat, sets: &[Vec<usize>]) -> Result<Vec<f64>, WiretapError> {
    let spec = *codec.spec();
    let field = codec.field();
    let n = field.n();
    let alphabet = (field.q() as u64).pow(n as u32);
    let q = field.q() as u64;
    let observe = |m: &[u16]| -> Vec<u16> {
        let to_elem = |v: u16| {
            let mut c = vec![0u16; n];
            let mut t = v as u64;
            for ci in c.iter_mut() {
                *ci = (t % q) as u16;
                t /= q;
            }
            field.from_coords(&c)
        };
        let u: Vec<ExtElem> = m[..spec.k0].iter().map(|&v| to_elem(v)).collect();
        let r: Vec<ExtElem> = m[spec.k0..].iter().map(|&v| to_elem(v)).collect();
        let x = codec.encode_message(&[u], &[r]).expect("dimensions");
        tap(field, &x.rows[0], b).iter().flat_map(|z| z.coords(n).to_vec()).collect()
    };
    let bits = toy_mi_oracle(alphabet, spec.k, sets, observe)?;
    let unit = (alphabet as f64).log2();
    Ok(bits.into_iter().map(|b| b / unit).collect())
}

/// Result of the coset decomposition of Eve's channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetStructure {
    /// Number of distinct observation supports, as a power of q^n.
    pub class_exponent: usize,
    /// Size of each support, as a power of q^n.
    pub coset_exponent: usize,
}

/// Verify that, for every secret u, the observation z = x·Bᵀ is uniform on a
/// coset of one common subgroup, that the cosets partition the reachable
/// observations, and that their count and size match the rank structure.
pub fn coset_structure_check(codec: &Codec, b: &matrix::Mat) -> Result<CosetStructure, WiretapError> {
    let CodecSpec { k, k0, mu0, .. } = *codec.spec();
    let field = codec.field();
    let n = field.n();
    let q = field.q() as u64;
    let alphabet = q.pow(n as u32);
    let mu = matrix::rank(field.ground(), b);
    if mu != b.len() {
        return Err(WiretapError::InvalidParameter("wiretap matrix must have full row rank".into()));
    }
    let total =
        alphabet.checked_pow(k as u32).filter(|&t| t <= ORACLE_LIMIT).ok_or(WiretapError::TooLarge(u64::MAX))?;
    let to_elem = |mut t: u64| {
        let mut c = vec![0u16; n];
        for ci in c.iter_mut() {
            *ci = (t % q) as u16;
            t /= q;
        }
        field.from_coords(&c)
    };
    let mask_count = alphabet.pow(mu0 as u32);
    let mut supports: HashMap<Vec<Vec<u16>>, u64> = HashMap::new();
    let mut all_z: HashMap<Vec<u16>, u64> = HashMap::new();
    for ui in 0..alphabet.pow(k0 as u32) {
        let u: Vec<ExtElem> = (0..k0).map(|j| to_elem(ui / alphabet.pow(j as u32) % alphabet)).collect();
        let mut hist: HashMap<Vec<u16>, u64> = HashMap::new();
        for ri in 0..mask_count {
            let r: Vec<ExtElem> = (0..mu0).map(|j| to_elem(ri / alphabet.pow(j as u32) % alphabet)).collect();
            let x = codec.encode_message(std::slice::from_ref(&u), &[r]).expect("dimensions");
            let z: Vec<u16> = tap(field, &x.rows[0], b).iter().flat_map(|e| e.coords(n).to_vec()).collect();
            *hist.entry(z.clone()).or_default() += 1;
            *all_z.entry(z).or_default() += 1;
        }
        let first = *hist.values().next().expect("nonempty");
        if hist.values().any(|&c| c != first) {
            return Err(WiretapError::StructureMismatch("conditional distribution is not uniform".into()));
        }
        let mut support: Vec<Vec<u16>> = hist.into_keys().collect();
        support.sort();
        *supports.entry(support).or_default() += 1;
    }
    let classes = supports.len() as u64;
    let size = supports.keys().next().map_or(0, |s| s.len()) as u64;
    let mut union = 0u64;
    for s in supports.keys() {
        if s.len() as u64 != size {
            return Err(WiretapError::StructureMismatch("cosets differ in size".into()));
        }
        union += s.len() as u64;
    }
    if union != all_z.len() as u64 {
        return Err(WiretapError::StructureMismatch("supports overlap".into()));
    }
    let log = |v: u64| -> Option<usize> {
        let mut e = 0;
        let mut t = 1u64;
        while t < v {
            t *= alphabet;
            e += 1;
        }
        (t == v).then_some(e)
    };
    let class_exponent = log(classes).ok_or_else(|| WiretapError::StructureMismatch("class count".into()))?;
    let coset_exponent = log(size).ok_or_else(|| WiretapError::StructureMismatch("coset size".into()))?;
    let expect_classes = mu.min(k) - mu.min(mu0);
    let expect_size = mu.min(mu0);
    if class_exponent != expect_classes || coset_exponent != expect_size {
        return Err(WiretapError::StructureMismatch(format!(
            "expected q^(n·{expect_classes}) classes of size q^(n·{expect_size}), found {class_exponent} and {coset_exponent}"
        )));
    }
    if mu >= k && all_z.len() as u64 != total {
        return Err(WiretapError::StructureMismatch("observation does not determine the message".into()));
    }
    Ok(CosetStructure { class_exponent, coset_exponent })
}
