//! Recursive solver for s_i = Σ_j z_j x_j^[i], i = 0..τ-1.

use super::{GabError, OpCounts};
use crate::ffield::{ExtElem, NormalBasisField};

/// Solve the q-Vandermonde system in O(τ²) operations.
pub fn gra(field: &NormalBasisField, z: &[ExtElem], s: &[ExtElem]) -> Result<Vec<ExtElem>, GabError> {
    gra_counted(field, z, s).map(|(x, _)| x)
}

pub fn gra_counted(
    field: &NormalBasisField,
    z: &[ExtElem],
    s: &[ExtElem],
) -> Result<(Vec<ExtElem>, OpCounts), GabError> {
    let tau = z.len();
    if s.len() != tau {
        return Err(GabError::DimensionMismatch(format!("gra: |z|={} |s|={}", tau, s.len())));
    }
    let mut ops = OpCounts::default();
    if tau == 0 {
        return Ok((Vec::new(), ops));
    }
    let mut a = z.to_vec();
    let mut q = s.to_vec();
    let mut q0 = vec![ExtElem::ZERO; tau];
    let mut rows: Vec<Vec<ExtElem>> = vec![Vec::new(); tau];
    let mut inv = vec![ExtElem::ZERO; tau];
    for v in 0..tau {
        q0[v] = q[0];
        rows[v] = a[v + 1..].to_vec();
        let av_inv = field.inv(a[v]).map_err(|_| GabError::SingularSystem)?;
        ops.inv += 1;
        inv[v] = av_inv;
        if v + 1 == tau {
            break;
        }
        let r = field.mul(a[v], field.qpow(av_inv, -1));
        ops.mul += 1;
        ops.shift += 1;
        for i in 0..q.len() - 1 {
            let t = field.mul(r, field.qpow(q[i + 1], -1));
            q[i] -= t;
            ops.mul += 1;
            ops.add += 1;
            ops.shift += 1;
        }
        q.pop();
        for j in v + 1..tau {
            let t = field.mul(r, field.qpow(a[j], -1));
            a[j] -= t;
            ops.mul += 1;
            ops.add += 1;
            ops.shift += 1;
        }
    }
    let mut x = vec![ExtElem::ZERO; tau];
    for v in (0..tau).rev() {
        let mut acc = q0[v];
        for (off, &aj) in rows[v].iter().enumerate() {
            acc -= field.mul(aj, x[v + 1 + off]);
            ops.mul += 1;
            ops.add += 1;
        }
        x[v] = field.mul(inv[v], acc);
        ops.mul += 1;
    }
    Ok((x, ops))
}

/// Location-only part of the recursion, reusable across interleaved
/// components sharing the same z.
#[derive(Clone, Debug)]
pub struct SharedGra {
    r: Vec<ExtElem>,
    rows: Vec<Vec<ExtElem>>,
    inv: Vec<ExtElem>,
}

impl SharedGra {
    pub fn precompute(field: &NormalBasisField, z: &[ExtElem]) -> Result<Self, GabError> {
        let tau = z.len();
        let mut a = z.to_vec();
        let mut r = Vec::with_capacity(tau);
        let mut rows = Vec::with_capacity(tau);
        let mut inv = Vec::with_capacity(tau);
        for v in 0..tau {
            rows.push(a[v + 1..].to_vec());
            let av_inv = field.inv(a[v]).map_err(|_| GabError::SingularSystem)?;
            inv.push(av_inv);
            if v + 1 == tau {
                break;
            }
            let rv = field.mul(a[v], field.qpow(av_inv, -1));
            for j in v + 1..tau {
                let t = field.mul(rv, field.qpow(a[j], -1));
                a[j] -= t;
            }
            r.push(rv);
        }
        Ok(SharedGra { r, rows, inv })
    }

    pub fn len(&self) -> usize {
        self.inv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv.is_empty()
    }

    pub fn solve(&self, field: &NormalBasisField, s: &[ExtElem]) -> Result<Vec<ExtElem>, GabError> {
        let tau = self.len();
        if s.len() != tau {
            return Err(GabError::DimensionMismatch(format!("shared gra: τ={} |s|={}", tau, s.len())));
        }
        let mut q = s.to_vec();
        let mut q0 = vec![ExtElem::ZERO; tau];
        for v in 0..tau {
            q0[v] = q[0];
            if v + 1 == tau {
                break;
            }
            let rv = self.r[v];
            for i in 0..q.len() - 1 {
                let t = field.mul(rv, field.qpow(q[i + 1], -1));
                q[i] -= t;
            }
            q.pop();
        }
        let mut x = vec![ExtElem::ZERO; tau];
        for v in (0..tau).rev() {
            let mut acc = q0[v];
            for (off, &aj) in self.rows[v].iter().enumerate() {
                acc -= field.mul(aj, x[v + 1 + off]);
            }
            x[v] = field.mul(self.inv[v], acc);
        }
        Ok(x)
    }
}

/// Closed-form operation counts for a system of size τ.
pub fn gra_expected_counts(tau: usize) -> OpCounts {
    if tau == 0 {
        return OpCounts::default();
    }
    let t = tau;
    OpCounts { mul: (3 * t * t + t) / 2 - 1, add: (3 * t * t - 3 * t) / 2, shift: t * t - 1, inv: t }
}
