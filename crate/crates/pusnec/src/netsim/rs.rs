//! Narrow-sense Reed–Solomon baseline over F_q with error and erasure
//! decoding (errata Berlekamp–Massey, Chien search, Forney).

use crate::ffield::GroundField;

use super::NetsimError;

#[derive(Debug, Clone)]
pub struct RsCodec {
    gf: GroundField,
    n: usize,
    k: usize,
    /// Generator polynomial, lowest degree first.
    g: Vec<u16>,
}

fn poly_mul(gf: &GroundField, a: &[u16], b: &[u16]) -> Vec<u16> {
    let mut out = vec![0u16; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= gf.mul(x, y);
        }
    }
    out
}

fn poly_eval(gf: &GroundField, p: &[u16], x: u16) -> u16 {
    p.iter().rev().fold(0, |acc, &c| gf.mul(acc, x) ^ c)
}

fn degree(p: &[u16]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

impl RsCodec {
    pub fn new(gf: GroundField, n: usize, k: usize) -> Result<Self, NetsimError> {
        if k == 0 || k > n || n as u32 > gf.q() - 1 {
            return Err(NetsimError::Config(format!("RS[{n},{k}] needs 1 <= k <= n <= q-1 (q={})", gf.q())));
        }
        let mut g = vec![1u16];
        for i in 1..=n - k {
            g = poly_mul(&gf, &g, &[gf.alpha_pow(i), 1]);
        }
        Ok(RsCodec { gf, n, k, g })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &GroundField {
        &self.gf
    }

    /// Non-systematic encoding c(x) = m(x)·g(x).
    pub fn encode(&self, msg: &[u16]) -> Vec<u16> {
        let mut c = poly_mul(&self.gf, msg, &self.g);
        c.resize(self.n, 0);
        c
    }

    /// Decode with known erasure positions. Fails when 2τ + ρ exceeds n − k
    /// or the corrected word is not a codeword.
    pub fn decode(&self, received: &[u16], erasures: &[usize]) -> Result<Vec<u16>, NetsimError> {
        let gf = &self.gf;
        let fail = || NetsimError::DecodeFailure;
        let d1 = self.n - self.k;
        if received.len() != self.n || erasures.len() > d1 || erasures.iter().any(|&j| j >= self.n) {
            return Err(fail());
        }
        let mut y = received.to_vec();
        for &j in erasures {
            y[j] = 0;
        }
        let s: Vec<u16> = (1..=d1).map(|i| poly_eval(gf, &y, gf.alpha_pow(i))).collect();
        let rho = erasures.len();
        if s.iter().any(|&v| v != 0) || rho > 0 {
            let mut gamma = vec![1u16];
            for &j in erasures {
                gamma = poly_mul(gf, &gamma, &[1, gf.alpha_pow(j)]);
            }
            let mut lambda = gamma.clone();
            let mut b = gamma;
            let mut l = rho;
            for r in rho + 1..=d1 {
                let delta = (0..=l.min(r - 1))
                    .filter(|&i| i < lambda.len())
                    .fold(0u16, |acc, i| acc ^ gf.mul(lambda[i], s[r - 1 - i]));
                let mut xb = vec![0u16];
                xb.extend_from_slice(&b);
                if delta == 0 {
                    b = xb;
                    continue;
                }
                let mut t = lambda.clone();
                t.resize(t.len().max(xb.len()), 0);
                for (ti, &bi) in t.iter_mut().zip(xb.iter()) {
                    *ti ^= gf.mul(delta, bi);
                }
                if 2 * l < r + rho {
                    let dinv = gf.inv(delta).map_err(|_| fail())?;
                    b = lambda.iter().map(|&c| gf.mul(c, dinv)).collect();
                    l = r + rho - l;
                } else {
                    b = xb;
                }
                lambda = t;
            }
            let deg = degree(&lambda).ok_or_else(fail)?;
            lambda.truncate(deg + 1);
            if deg != l || 2 * l > d1 + rho {
                return Err(fail());
            }
            let roots: Vec<usize> = (0..self.n)
                .filter(|&j| {
                    let xinv = gf.inv(gf.alpha_pow(j)).expect("nonzero");
                    poly_eval(gf, &lambda, xinv) == 0
                })
                .collect();
            if roots.len() != deg {
                return Err(fail());
            }
            let mut omega = poly_mul(gf, &s, &lambda);
            omega.truncate(d1);
            let dlambda: Vec<u16> = (1..lambda.len()).map(|i| if i % 2 == 1 { lambda[i] } else { 0 }).collect();
            for &j in &roots {
                let xinv = gf.inv(gf.alpha_pow(j)).expect("nonzero");
                let den = poly_eval(gf, &dlambda, xinv);
                let e = gf.div(poly_eval(gf, &omega, xinv), den).map_err(|_| fail())?;
                y[j] ^= e;
            }
            if (1..=d1).any(|i| poly_eval(gf, &y, gf.alpha_pow(i)) != 0) {
                return Err(fail());
            }
        }
        // divide by g
        let mut rem = y;
        let dg = self.g.len() - 1;
        let mut msg = vec![0u16; self.k];
        for i in (0..self.k).rev() {
            let c = rem[i + dg];
            if c != 0 {
                msg[i] = c;
                for (j, &gj) in self.g.iter().enumerate() {
                    rem[i + j] ^= gf.mul(c, gj);
                }
            }
        }
        if rem.iter().any(|&c| c != 0) {
            return Err(fail());
        }
        Ok(msg)
    }
}
