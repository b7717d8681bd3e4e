//! q-cyclic Gabidulin codes Gab[n, k] over F_{q^n} and their vertically
//! interleaved form iGab[n, k] with l components.
//!
//! A message `[u r]` of k = k0 + μ0 symbols per component is pre-encoded to
//! `f` with `f·G1 = [u r]`, expanded to the length-n word `x' = f·G`, and the
//! last n0 symbols are emitted. The receiver treats the k1 = n - n0 withheld
//! symbols as known erasures and runs error/erasure decoding through the
//! error locator polynomial.

pub mod gra;
pub mod lbma;
pub mod registry;
pub mod serial;

use thiserror::Error;

use crate::ffield::{matrix, ExtElem, FieldError, NormalBasisField};
use crate::linpoly::{linear_map_matrix, minimal_poly, rootspace, LinPoly};

pub use gra::{gra, gra_counted, SharedGra};
pub use lbma::{cps_lbma, lbma, lbma_counted};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GabError {
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    #[error("erasure locations are linearly dependent")]
    InvalidErasures,
    #[error("singular q-Vandermonde system")]
    SingularSystem,
    #[error("locator degree overflow")]
    DegreeOverflow,
    #[error("invalid codec spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Extension-field operation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub add: usize,
    pub mul: usize,
    pub shift: usize,
    pub inv: usize,
}

/// Code parameters. `n = k1 + n0` with k1 withheld symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CodecSpec {
    pub w: u32,
    pub n: usize,
    pub k: usize,
    pub n0: usize,
    pub k0: usize,
    pub mu0: usize,
    pub l: usize,
}

impl CodecSpec {
    pub fn k1(&self) -> usize {
        self.n - self.n0
    }

    /// Redundancy seen on the n0 emitted columns.
    pub fn capability(&self) -> usize {
        self.n0 - self.k
    }

    /// Check the structural invariants. `strict` also demands k1 ≥ k0 so
    /// that the withheld prefix covers the secret message.
    pub fn validate(&self, strict: bool) -> Result<(), GabError> {
        let bad = |m: String| Err(GabError::InvalidSpec(m));
        if self.k != self.k0 + self.mu0 {
            return bad(format!("k={} but k0+mu0={}", self.k, self.k0 + self.mu0));
        }
        if self.k == 0 || self.k > self.n0 || self.n0 > self.n {
            return bad(format!("need 1 <= k <= n0 <= n, got k={} n0={} n={}", self.k, self.n0, self.n));
        }
        if self.l == 0 {
            return bad("interleaving depth must be positive".into());
        }
        if strict && self.k1() < self.k0 {
            return bad(format!("strict mode needs k1 >= k0, got k1={} k0={}", self.k1(), self.k0));
        }
        Ok(())
    }
}

/// l × n0 matrix of emitted symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterWord {
    pub rows: Vec<Vec<ExtElem>>,
}

impl OuterWord {
    pub fn zero(l: usize, n0: usize) -> Self {
        OuterWord { rows: vec![vec![ExtElem::ZERO; n0]; l] }
    }

    pub fn l(&self) -> usize {
        self.rows.len()
    }

    pub fn n0(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Ground-field payload of column j: the coordinates of each row in turn.
    pub fn column_payload(&self, j: usize, n: usize) -> Vec<u16> {
        self.rows.iter().flat_map(|row| row[j].coords(n).iter().copied()).collect()
    }

    pub fn from_column_payloads(payloads: &[Vec<u16>], l: usize, n: usize) -> Self {
        let rows =
            (0..l).map(|i| payloads.iter().map(|p| ExtElem::from_coords(&p[i * n..(i + 1) * n])).collect()).collect();
        OuterWord { rows }
    }
}

/// Output of a successful decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub u: Vec<Vec<ExtElem>>,
    pub r: Vec<Vec<ExtElem>>,
    pub f: Vec<Vec<ExtElem>>,
    /// Full length-n corrected words x', one per component.
    pub full: Vec<Vec<ExtElem>>,
    pub tau: usize,
    pub rho: usize,
}

#[derive(Debug, Clone)]
pub struct Codec {
    spec: CodecSpec,
    field: NormalBasisField,
    /// GRA reduction for the fixed pre-encoding points β^[k-1+i].
    pre: SharedGra,
}

impl Codec {
    pub fn new(spec: CodecSpec) -> Result<Self, GabError> {
        let field = NormalBasisField::new(spec.w, spec.n)?;
        Self::with_field(spec, field)
    }

    pub fn with_field(spec: CodecSpec, field: NormalBasisField) -> Result<Self, GabError> {
        spec.validate(false)?;
        if field.n() != spec.n || field.w() != spec.w {
            return Err(GabError::InvalidSpec("field does not match spec".into()));
        }
        if !field.is_self_dual() {
            return Err(GabError::InvalidSpec("basis is not self-dual".into()));
        }
        let z: Vec<ExtElem> = (0..spec.k).map(|i| field.basis_elem(spec.k - 1 + i)).collect();
        let pre = SharedGra::precompute(&field, &z)?;
        Ok(Codec { spec, field, pre })
    }

    pub fn spec(&self) -> &CodecSpec {
        &self.spec
    }

    pub fn field(&self) -> &NormalBasisField {
        &self.field
    }

    /// G (k × n), G[i][v] = β^[i+v].
    pub fn generator(&self) -> Vec<Vec<ExtElem>> {
        let (n, k) = (self.spec.n, self.spec.k);
        (0..k).map(|i| (0..n).map(|v| self.field.basis_elem((i + v) % n)).collect()).collect()
    }

    /// H ((n-k) × n), H[i][v] = β^[k+i+v].
    pub fn parity_check(&self) -> Vec<Vec<ExtElem>> {
        let (n, k) = (self.spec.n, self.spec.k);
        (0..n - k).map(|i| (0..n).map(|v| self.field.basis_elem((k + i + v) % n)).collect()).collect()
    }

    /// (G1, G2, H): the first k and last n0 columns of G, and H.
    #[allow(clippy::type_complexity)]
    pub fn generator_matrices(&self) -> (Vec<Vec<ExtElem>>, Vec<Vec<ExtElem>>, Vec<Vec<ExtElem>>) {
        let g = self.generator();
        let k = self.spec.k;
        let k1 = self.spec.k1();
        let g1 = g.iter().map(|row| row[..k].to_vec()).collect();
        let g2 = g.iter().map(|row| row[k1..].to_vec()).collect();
        (g1, g2, self.parity_check())
    }

    /// Solve f·G1 = [u r] for one component.
    pub fn pre_encode_component(&self, u: &[ExtElem], r: &[ExtElem]) -> Result<Vec<ExtElem>, GabError> {
        let (k, k0, mu0) = (self.spec.k, self.spec.k0, self.spec.mu0);
        if u.len() != k0 || r.len() != mu0 {
            return Err(GabError::DimensionMismatch(format!(
                "expected {} message and {} mask symbols, got {} and {}",
                k0,
                mu0,
                u.len(),
                r.len()
            )));
        }
        let msg: Vec<ExtElem> = u.iter().chain(r.iter()).copied().collect();
        // Σ_i f_i β^[i+c] = m_c  ⇔  Σ_i β^[k-1+i] f_i^[j] = m_{k-1-j}^[j]
        let s: Vec<ExtElem> = (0..k).map(|j| self.field.qpow(msg[k - 1 - j], j as i64)).collect();
        self.pre.solve(&self.field, &s)
    }

    pub fn pre_encode(&self, u: &[Vec<ExtElem>], r: &[Vec<ExtElem>]) -> Result<Vec<Vec<ExtElem>>, GabError> {
        if u.len() != self.spec.l || r.len() != self.spec.l {
            return Err(GabError::DimensionMismatch("component count differs from l".into()));
        }
        u.iter().zip(r.iter()).map(|(ui, ri)| self.pre_encode_component(ui, ri)).collect()
    }

    /// x' = f·G over the full length n.
    pub fn encode_full_component(&self, f: &[ExtElem]) -> Vec<ExtElem> {
        let n = self.spec.n;
        (0..n)
            .map(|v| {
                f.iter().enumerate().fold(ExtElem::ZERO, |acc, (i, &fi)| acc + self.field.fast_mul(fi, (i + v) % n))
            })
            .collect()
    }

    pub fn encode(&self, f: &[Vec<ExtElem>]) -> Result<OuterWord, GabError> {
        if f.len() != self.spec.l || f.iter().any(|fi| fi.len() != self.spec.k) {
            return Err(GabError::DimensionMismatch("f must be l × k".into()));
        }
        let k1 = self.spec.k1();
        Ok(OuterWord { rows: f.iter().map(|fi| self.encode_full_component(fi)[k1..].to_vec()).collect() })
    }

    pub fn encode_message(&self, u: &[Vec<ExtElem>], r: &[Vec<ExtElem>]) -> Result<OuterWord, GabError> {
        self.encode(&self.pre_encode(u, r)?)
    }

    /// Syndromes s_i = Σ_v y'_v β^[v+k+i], i < n - k.
    fn syndromes(&self, y: &[ExtElem]) -> Vec<ExtElem> {
        let (n, k) = (self.spec.n, self.spec.k);
        (0..n - k)
            .map(|i| {
                y.iter().enumerate().fold(ExtElem::ZERO, |acc, (v, &yv)| acc + self.field.fast_mul(yv, (v + k + i) % n))
            })
            .collect()
    }

    /// Location-vector element qpow(Σ_v b_v β^[v], k).
    fn location_elem(&self, b: &[u16]) -> ExtElem {
        self.field.qpow(self.field.from_coords(b), self.spec.k as i64)
    }

    /// Row vector over F_q recovered from a location element.
    fn location_row(&self, d: ExtElem) -> Vec<u16> {
        let (n, k) = (self.spec.n, self.spec.k);
        (0..n).map(|v| d.0[(v + k) % n]).collect()
    }

    /// Error/erasure decoding. `erasures` holds ρ' location rows over F_q of
    /// length n0; the k1 withheld positions are added as known erasures.
    pub fn decode(&self, received: &OuterWord, erasures: &[Vec<u16>]) -> Result<Decoded, GabError> {
        let f = &self.field;
        let gf = f.ground();
        let CodecSpec { n, k, n0, k0, l, .. } = self.spec;
        let k1 = self.spec.k1();
        let nk = n - k;
        if received.l() != l || received.rows.iter().any(|r| r.len() != n0) {
            return Err(GabError::DimensionMismatch(format!("received word must be {l} × {n0}")));
        }
        if erasures.iter().any(|e| e.len() != n0) {
            return Err(GabError::DimensionMismatch(format!("erasure rows must have length {n0}")));
        }

        // 0. known erasures for the withheld prefix, then the supplied ones
        let mut bhat: matrix::Mat = (0..k1).map(|i| (0..n).map(|v| (v == i) as u16).collect()).collect();
        for e in erasures {
            let mut row = vec![0u16; k1];
            row.extend_from_slice(e);
            bhat.push(row);
        }
        let rho = bhat.len();
        if matrix::rank(gf, &bhat) != rho {
            return Err(GabError::InvalidErasures);
        }
        if rho > nk {
            return Err(GabError::DecodeFailure(format!("{rho} erasures exceed redundancy {nk}")));
        }
        let dhat: Vec<ExtElem> = bhat.iter().map(|b| self.location_elem(b)).collect();
        let (gamma, kept) = minimal_poly(f, &dhat);
        debug_assert_eq!(kept.len(), rho);

        // 1. syndromes, reversed syndromes, erasure-filtered syndromes
        let mut rev = Vec::with_capacity(l);
        let mut filt = Vec::with_capacity(l);
        for row in &received.rows {
            let mut y = vec![ExtElem::ZERO; k1];
            y.extend_from_slice(row);
            let s = self.syndromes(&y);
            let st: Vec<ExtElem> = (0..nk).map(|i| f.qpow(s[nk - 1 - i], i as i64 - (nk as i64 - 1))).collect();
            let sh: Vec<ExtElem> = (0..nk - rho)
                .map(|i| {
                    (0..=rho)
                        .fold(ExtElem::ZERO, |acc, v| acc + f.mul(gamma.coeff(v), f.qpow(st[rho + i - v], v as i64)))
                })
                .collect();
            rev.push(st);
            filt.push(sh);
        }

        // 2. error locator across components
        let lambda = cps_lbma(f, &filt)?;
        let tau = lambda.degree();
        if 2 * tau + rho > nk {
            return Err(GabError::DecodeFailure(format!("τ={tau}, ρ={rho} beyond capability")));
        }
        for sh in &filt {
            let check = lbma::apply_connection(f, &lambda, sh);
            if check.iter().any(|x| !x.is_zero()) {
                return Err(GabError::DecodeFailure("key equation violated".into()));
            }
        }

        // 3. error locations: rootspace of Λ pulled back through the erasure locator
        let mut dloc = Vec::new();
        let mut err_vals: Vec<Vec<ExtElem>> = vec![Vec::new(); l];
        if tau > 0 {
            let roots = rootspace(f, &lambda);
            if roots.len() != tau {
                return Err(GabError::DecodeFailure(format!(
                    "rootspace dimension {} differs from locator degree {}",
                    roots.len(),
                    tau
                )));
            }
            let psi_t = matrix::transpose(&linear_map_matrix(f, &gamma));
            for root in &roots {
                let x = matrix::solve(gf, &psi_t, root.coords(n))
                    .ok_or_else(|| GabError::DecodeFailure("error location outside image".into()))?;
                dloc.push(f.from_coords(&x));
            }
            // 4a–c. error values, shared across components
            let shared = SharedGra::precompute(f, &roots)
                .map_err(|_| GabError::DecodeFailure("dependent error locations".into()))?;
            let back = nk as i64 - 1 - rho as i64;
            for (w, sh) in filt.iter().enumerate() {
                let a = shared.solve(f, &sh[..tau])?;
                err_vals[w] = a.into_iter().map(|x| f.qpow(x, back)).collect();
            }
        }

        // 4d–f. erasure values from the modified reversed syndromes
        let mut era_vals: Vec<Vec<ExtElem>> = vec![Vec::new(); l];
        if rho > 0 {
            let shared = SharedGra::precompute(f, &dhat)?;
            for w in 0..l {
                let st = &rev[w];
                let mut mod_s = Vec::with_capacity(rho);
                for (i, &sti) in st.iter().enumerate().take(rho) {
                    let shift = i as i64 - (nk as i64 - 1);
                    let corr = dloc
                        .iter()
                        .zip(err_vals[w].iter())
                        .fold(ExtElem::ZERO, |acc, (&d, &a)| acc + f.mul(d, f.qpow(a, shift)));
                    mod_s.push(sti - corr);
                }
                let ah = shared.solve(f, &mod_s)?;
                era_vals[w] = ah.into_iter().map(|x| f.qpow(x, nk as i64 - 1)).collect();
            }
        }

        // 5. resolve errata and strip them from the received word
        let brow: Vec<Vec<u16>> = dloc.iter().map(|&d| self.location_row(d)).collect();
        let mut full = Vec::with_capacity(l);
        let mut fs = Vec::with_capacity(l);
        for (w, row) in received.rows.iter().enumerate() {
            let mut x = vec![ExtElem::ZERO; k1];
            x.extend_from_slice(row);
            for (v, xv) in x.iter_mut().enumerate() {
                for (j, b) in brow.iter().enumerate() {
                    *xv -= f.scale(err_vals[w][j], b[v]);
                }
                for (j, b) in bhat.iter().enumerate() {
                    *xv -= f.scale(era_vals[w][j], b[v]);
                }
            }
            // 6. f_i = Σ_v x'_v β^[v+i] by self-duality
            let fi: Vec<ExtElem> = (0..k)
                .map(|i| x.iter().enumerate().fold(ExtElem::ZERO, |acc, (v, &xv)| acc + f.fast_mul(xv, (v + i) % n)))
                .collect();
            if self.encode_full_component(&fi) != x {
                return Err(GabError::DecodeFailure("corrected word is not a codeword".into()));
            }
            full.push(x);
            fs.push(fi);
        }
        let u = full.iter().map(|x| x[..k0].to_vec()).collect();
        let r = full.iter().map(|x| x[k0..k].to_vec()).collect();
        Ok(Decoded { u, r, f: fs, full, tau, rho })
    }

    /// The locator polynomial for a set of error-location rows over F_q of
    /// length n, as the decoder would construct it from a clean syndrome set.
    pub fn locator_for_rows(&self, rows: &[Vec<u16>]) -> LinPoly {
        let d: Vec<ExtElem> = rows.iter().map(|b| self.location_elem(b)).collect();
        minimal_poly(&self.field, &d).0
    }
}

/// Rank over F_q of a vector of extension elements, viewed as an n × len matrix.
pub fn rank_of(field: &NormalBasisField, xs: &[ExtElem]) -> usize {
    let rows: matrix::Mat = xs.iter().map(|x| x.coords(field.n()).to_vec()).collect();
    matrix::rank(field.ground(), &rows)
}
