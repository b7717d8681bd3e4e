#![allow(dead_code)]

use pusnec::ffield::{matrix, ExtElem, GroundField, NormalBasisField};
use pusnec::gabidulin::{Codec, OuterWord};
use rand::Rng;

pub fn random_message<R: Rng>(codec: &Codec, rng: &mut R) -> (Vec<Vec<ExtElem>>, Vec<Vec<ExtElem>>) {
    let s = codec.spec();
    let f = codec.field();
    let u = (0..s.l).map(|_| (0..s.k0).map(|_| f.random(rng)).collect()).collect();
    let r = (0..s.l).map(|_| (0..s.mu0).map(|_| f.random(rng)).collect()).collect();
    (u, r)
}

/// Random full-rank `rows × cols` matrix over F_q.
pub fn random_full_rank<R: Rng>(gf: &GroundField, rows: usize, cols: usize, rng: &mut R) -> matrix::Mat {
    loop {
        let m: matrix::Mat = (0..rows).map(|_| (0..cols).map(|_| gf.random(rng)).collect()).collect();
        if matrix::rank(gf, &m) == rows {
            return m;
        }
    }
}

/// Errata of rank τ + ρ on the n0 emitted columns: a rank-τ error and ρ
/// erasures whose location rows are returned for the decoder.
pub struct Errata {
    pub err_rows: matrix::Mat,
    pub era_rows: matrix::Mat,
}

pub fn random_errata<R: Rng>(gf: &GroundField, n0: usize, tau: usize, rho: usize, rng: &mut R) -> Errata {
    let all = random_full_rank(gf, tau + rho, n0, rng);
    Errata { err_rows: all[..tau].to_vec(), era_rows: all[tau..].to_vec() }
}

/// Add Σ_j a_j·rows_j to each component row with fresh values a_j that are
/// linearly independent over F_q, so the errata keep their full rank.
pub fn corrupt<R: Rng>(field: &NormalBasisField, word: &mut OuterWord, rows: &matrix::Mat, rng: &mut R) {
    for comp in word.rows.iter_mut() {
        let a = loop {
            let a: Vec<ExtElem> = (0..rows.len()).map(|_| field.random_nonzero(rng)).collect();
            if pusnec::gabidulin::rank_of(field, &a) == rows.len() {
                break a;
            }
        };
        for (b, &aj) in rows.iter().zip(&a) {
            for (x, &bv) in comp.iter_mut().zip(b.iter()) {
                *x += field.scale(aj, bv);
            }
        }
    }
}

/// Every element of a small field, in counting order of the coordinates.
pub fn all_elements(field: &NormalBasisField) -> Vec<ExtElem> {
    let (n, q) = (field.n(), field.q() as u64);
    let total = q.pow(n as u32);
    (0..total)
        .map(|mut t| {
            let c: Vec<u16> = (0..n)
                .map(|_| {
                    let d = (t % q) as u16;
                    t /= q;
                    d
                })
                .collect();
            field.from_coords(&c)
        })
        .collect()
}

/// F_q-span of a set of elements, enumerated.
pub fn span(field: &NormalBasisField, gens: &[ExtElem]) -> Vec<ExtElem> {
    let mut out = vec![ExtElem::ZERO];
    for &g in gens {
        let mut next = Vec::new();
        for c in 0..field.q() as u16 {
            let s = field.scale(g, c);
            next.extend(out.iter().map(|&x| x + s));
        }
        next.sort_by_key(|e| e.0);
        next.dedup();
        out = next;
    }
    out
}
