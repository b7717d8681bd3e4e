//! Shortest F_{q^n}-LFSR synthesis and its interleaved extension.

use super::{GabError, OpCounts};
use crate::ffield::{ExtElem, NormalBasisField};
use crate::linpoly::{symbolic_product, LinPoly};

/// Shortest connection polynomial f' (f'_0 = 1) with
/// Σ_{j=0}^{τ'} f'_j s_{i-j}^[j] = 0 for all τ' ≤ i < |s|.
pub fn lbma(field: &NormalBasisField, s: &[ExtElem]) -> LinPoly {
    lbma_counted(field, s).0
}

pub fn lbma_counted(field: &NormalBasisField, s: &[ExtElem]) -> (LinPoly, OpCounts) {
    let mut ops = OpCounts::default();
    let one = field.one();
    let mut fp = vec![one];
    let mut tp = 0usize;
    let mut f = vec![one];
    let mut t = 0usize;
    let mut r_inv = one;
    let mut h = 1usize;
    for i in 0..s.len() {
        let mut rp = s[i];
        for j in 1..=tp.min(i) {
            rp += field.mul(fp[j], field.qpow(s[i - j], j as i64));
            ops.mul += 1;
            ops.add += 1;
            ops.shift += 1;
        }
        if rp.is_zero() {
            h += 1;
            continue;
        }
        let c = if r_inv == one {
            rp
        } else {
            ops.mul += 1;
            ops.shift += 1;
            field.mul(rp, field.qpow(r_inv, h as i64))
        };
        let mut next = fp.clone();
        next.resize(next.len().max(t + h + 1), ExtElem::ZERO);
        for (j, &fj) in f.iter().enumerate().take(t + 1) {
            let term = if j == 0 {
                c
            } else {
                ops.mul += 1;
                field.mul(c, field.qpow(fj, h as i64))
            };
            if j > 0 {
                ops.shift += 1;
            }
            // positions past τ' are fresh coefficients, not additions
            if j + h <= tp {
                ops.add += 1;
            }
            next[j + h] -= term;
        }
        if tp < t + h {
            let new_len = t + h;
            f = std::mem::replace(&mut fp, next);
            t = tp;
            tp = new_len;
            r_inv = field.inv(rp).expect("nonzero discrepancy");
            ops.inv += 1;
            h = 1;
        } else {
            fp = next;
            h += 1;
        }
    }
    fp.truncate(tp + 1);
    (LinPoly { coeffs: fp }, ops)
}

/// Σ_{j=0}^{τ} λ_j s_{i+τ-j}^[j] for i = 0..|s|-τ.
pub fn apply_connection(field: &NormalBasisField, lambda: &LinPoly, s: &[ExtElem]) -> Vec<ExtElem> {
    let tau = lambda.degree();
    if s.len() < tau {
        return Vec::new();
    }
    (0..s.len() - tau)
        .map(|i| {
            (0..=tau)
                .fold(ExtElem::ZERO, |acc, j| acc + field.mul(lambda.coeff(j), field.qpow(s[i + tau - j], j as i64)))
        })
        .collect()
}

/// LFSR synthesis across interleaved components sharing error locations.
///
/// Each later component is first filtered by the polynomial found so far; if
/// anything is left, the extra locator is composed on the left.
pub fn cps_lbma(field: &NormalBasisField, components: &[Vec<ExtElem>]) -> Result<LinPoly, GabError> {
    let Some(first) = components.first() else {
        return Err(GabError::DimensionMismatch("cps_lbma needs at least one component".into()));
    };
    let len = first.len();
    let mut lambda = lbma(field, first);
    if 2 * lambda.degree() > len {
        return Err(GabError::DecodeFailure(format!(
            "LFSR length {} exceeds half of {} syndromes",
            lambda.degree(),
            len
        )));
    }
    for comp in &components[1..] {
        if comp.len() != len {
            return Err(GabError::DimensionMismatch("component syndrome lengths differ".into()));
        }
        let tau = lambda.degree();
        let modified = apply_connection(field, &lambda, comp);
        if modified.iter().all(|x| x.is_zero()) {
            continue;
        }
        let extra = lbma(field, &modified);
        if 2 * extra.degree() > modified.len() {
            return Err(GabError::DecodeFailure(format!(
                "component LFSR length {} exceeds half of {} filtered syndromes",
                extra.degree(),
                modified.len()
            )));
        }
        lambda = symbolic_product(field, &extra, &lambda).map_err(|_| GabError::DegreeOverflow)?;
        debug_assert!(lambda.degree() >= tau);
    }
    Ok(lambda)
}

/// Worst-case operation counts for a syndrome sequence of length `len` whose
/// shortest LFSR has length τ.
pub fn lbma_max_counts(len: usize, tau: usize) -> OpCounts {
    if tau == 0 {
        return OpCounts { add: 0, mul: 0, shift: len.saturating_sub(1), inv: 0 };
    }
    if 2 * tau < len {
        OpCounts { add: len * tau - tau + 1, mul: len * tau, shift: 2 * len * tau + 1 - 2 * tau * tau - tau, inv: tau }
    } else {
        OpCounts { add: 2 * tau * tau - tau + 1, mul: 2 * tau * tau, shift: 2 * tau * tau, inv: tau }
    }
}
