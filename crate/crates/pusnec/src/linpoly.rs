//! Linearized polynomials f(x) = Σ f_i x^[i] over F_{q^n}.

use thiserror::Error;

use crate::ffield::{matrix, ExtElem, NormalBasisField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinPolyError {
    #[error("combined degree {0} exceeds the extension degree {1}")]
    DegreeOverflow(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinPoly {
    pub coeffs: Vec<ExtElem>,
}

impl LinPoly {
    pub fn new(mut coeffs: Vec<ExtElem>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        LinPoly { coeffs }
    }

    /// f(x) = x.
    pub fn identity(field: &NormalBasisField) -> Self {
        LinPoly { coeffs: vec![field.one()] }
    }

    pub fn zero() -> Self {
        LinPoly { coeffs: vec![ExtElem::ZERO] }
    }

    /// q-degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn coeff(&self, i: usize) -> ExtElem {
        self.coeffs.get(i).copied().unwrap_or(ExtElem::ZERO)
    }
}

pub fn eval(field: &NormalBasisField, f: &LinPoly, x: ExtElem) -> ExtElem {
    f.coeffs.iter().enumerate().fold(ExtElem::ZERO, |acc, (i, &c)| acc + field.mul(c, field.qpow(x, i as i64)))
}

/// f(β^[j]) via sparse basis multiplication.
fn eval_basis(field: &NormalBasisField, f: &LinPoly, j: usize) -> ExtElem {
    let n = field.n();
    f.coeffs.iter().enumerate().fold(ExtElem::ZERO, |acc, (v, &c)| acc + field.fast_mul(c, (j + v) % n))
}

/// Matrix of f as an F_q-linear map: row j holds the coordinates of f(β^[j]).
pub fn linear_map_matrix(field: &NormalBasisField, f: &LinPoly) -> matrix::Mat {
    let n = field.n();
    (0..n).map(|j| eval_basis(field, f, j).coords(n).to_vec()).collect()
}

/// Basis of {x : f(x) = 0}.
pub fn rootspace(field: &NormalBasisField, f: &LinPoly) -> Vec<ExtElem> {
    let n = field.n();
    let phi = linear_map_matrix(field, f);
    let phi_t = matrix::transpose(&phi);
    matrix::kernel(field.ground(), &phi_t, n).into_iter().map(|v| field.from_coords(&v)).collect()
}

/// Minimal linearized polynomial (normalized to f_0 = 1) whose rootspace is
/// span(roots), together with the roots that increased the degree.
pub fn minimal_poly(field: &NormalBasisField, roots: &[ExtElem]) -> (LinPoly, Vec<ExtElem>) {
    let mut f = vec![field.one()];
    let mut kept = Vec::new();
    for &d in roots {
        let r = eval(field, &LinPoly { coeffs: f.clone() }, d);
        if r.is_zero() {
            continue;
        }
        let rinv = field.inv(r).expect("nonzero");
        // f ← f − r·(r^{-1})^[1]·f^[1]∘x^[1], so that the new f vanishes at d
        let rp = field.mul(r, field.qpow(rinv, 1));
        let l = f.len() - 1;
        let top = field.mul(rp, field.qpow(f[l], 1));
        f.push(top);
        for j in (1..=l).rev() {
            let t = field.mul(rp, field.qpow(f[j - 1], 1));
            f[j] += t;
        }
        kept.push(d);
    }
    (LinPoly { coeffs: f }, kept)
}

/// h = g ∘ f, i.e. h(x) = g(f(x)).
pub fn symbolic_product(field: &NormalBasisField, g: &LinPoly, f: &LinPoly) -> Result<LinPoly, LinPolyError> {
    let (dg, df) = (g.degree(), f.degree());
    if dg + df > field.n() {
        return Err(LinPolyError::DegreeOverflow(dg + df, field.n()));
    }
    let mut h = vec![ExtElem::ZERO; dg + df + 1];
    for i in 0..=dg {
        let gi = g.coeff(i);
        if gi.is_zero() {
            continue;
        }
        for j in 0..=df {
            h[i + j] += field.mul(gi, field.qpow(f.coeff(j), i as i64));
        }
    }
    Ok(LinPoly::new(h))
}
