//! Arithmetic over F_q (q = 2^w) and over F_{q^n} in a normal-basis
//! representation.
//!
//! Extension elements are coordinate vectors over a self-dual optimal normal
//! basis `β^[0], …, β^[n-1]` obtained from a type-II Gauss period. In this
//! representation the Frobenius map is a cyclic shift, the multiplicative
//! identity is the all-ones vector and the trace is the coordinate sum.

pub mod matrix;

use std::fmt;
use std::ops::{Add, AddAssign, Sub, SubAssign};

use rand::Rng;
use thiserror::Error;

/// Maximum supported extension degree.
pub const MAX_N: usize = 16;
/// Maximum supported ground-field bit width.
pub const MAX_W: u32 = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("no normal basis construction available for (n={n}, w={w})")]
    UnsupportedPair { w: u32, n: usize },
    #[error("division by zero")]
    DivisionByZero,
}

/// Primitive reduction polynomials, indexed by w.
const PRIMITIVE: [u32; 11] =
    [0, 0b11, 0b111, 0b1011, 0b1_0011, 0b10_0101, 0b100_0011, 0b1000_1001, 0x11d, 0x211, 0x409];

/// The ground field F_{2^w}, backed by log/antilog tables.
#[derive(Clone)]
pub struct GroundField {
    w: u32,
    q: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl fmt::Debug for GroundField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})", self.w)
    }
}

impl GroundField {
    pub fn new(w: u32) -> Result<Self, FieldError> {
        if w == 0 || w > MAX_W {
            return Err(FieldError::UnsupportedPair { w, n: 0 });
        }
        let q = 1u32 << w;
        let poly = PRIMITIVE[w as usize];
        let order = (q - 1) as usize;
        let mut exp = vec![0u16; 2 * order + 1];
        let mut log = vec![0u16; q as usize];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & q != 0 {
                x ^= poly;
            }
        }
        assert_eq!(x, 1, "reduction polynomial for w={w} is not primitive");
        for i in order..exp.len() {
            exp[i] = exp[i - order];
        }
        Ok(GroundField { w, q, exp, log })
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Reduction polynomial as a bit mask.
    pub fn poly(&self) -> u32 {
        PRIMITIVE[self.w as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub fn inv(&self, a: u16) -> Result<u16, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let order = (self.q - 1) as usize;
        Ok(self.exp[(order - self.log[a as usize] as usize) % order])
    }

    pub fn div(&self, a: u16, b: u16) -> Result<u16, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u16, e: u64) -> u16 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[a as usize] as u64 * (e % order)) % order;
        self.exp[l as usize]
    }

    /// The primitive element α^i.
    pub fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % (self.q as usize - 1)]
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u16 {
        rng.random_range(0..self.q) as u16
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u16 {
        rng.random_range(1..self.q) as u16
    }
}

/// An element of F_{q^n}: the first `n` coordinates over the normal basis.
/// Unused trailing coordinates are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ExtElem(pub [u16; MAX_N]);

impl ExtElem {
    pub const ZERO: ExtElem = ExtElem([0; MAX_N]);

    pub fn from_coords(c: &[u16]) -> Self {
        assert!(c.len() <= MAX_N);
        let mut e = [0u16; MAX_N];
        e[..c.len()].copy_from_slice(c);
        ExtElem(e)
    }

    pub fn coords(&self, n: usize) -> &[u16] {
        &self.0[..n]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).map_or(0, |p| p + 1);
        write!(f, "E{:?}", &self.0[..last])
    }
}

impl Add for ExtElem {
    type Output = ExtElem;
    #[inline]
    fn add(mut self, rhs: ExtElem) -> ExtElem {
        self += rhs;
        self
    }
}

// characteristic 2: addition and subtraction are both xor
#[allow(clippy::suspicious_op_assign_impl)]
impl AddAssign for ExtElem {
    #[inline]
    fn add_assign(&mut self, rhs: ExtElem) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a ^= *b;
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Sub for ExtElem {
    type Output = ExtElem;
    #[inline]
    fn sub(self, rhs: ExtElem) -> ExtElem {
        self + rhs
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl SubAssign for ExtElem {
    #[inline]
    fn sub_assign(&mut self, rhs: ExtElem) {
        *self += rhs;
    }
}

/// F_{q^n} over a self-dual optimal normal basis.
#[derive(Clone)]
pub struct NormalBasisField {
    ground: GroundField,
    n: usize,
    r: usize,
    t0: Vec<u16>,
    nonzero: Vec<(usize, usize, u16)>,
    /// Nonzero entries with the discrete log of the table value.
    nonzero_log: Vec<(usize, usize, u32)>,
    row_nonzero: Vec<Vec<(usize, u16)>>,
    self_dual: bool,
}

impl fmt::Debug for NormalBasisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NormalBasisField(w={}, n={}, C_T={})", self.ground.w, self.n, self.complexity())
    }
}

fn is_prime(r: usize) -> bool {
    r >= 2 && (2..).take_while(|d| d * d <= r).all(|d| !r.is_multiple_of(d))
}

/// True when q and -1 generate the full unit group of Z_r.
fn generates_units(q: usize, r: usize) -> bool {
    let mut seen = vec![false; r];
    let mut x = 1usize;
    loop {
        if seen[x] {
            break;
        }
        seen[x] = true;
        seen[r - x] = true;
        x = x * q % r;
    }
    (1..r).all(|s| seen[s])
}

/// Build F_{q^n}, q = 2^w, with an optimal self-dual normal basis.
pub fn build_field(w: u32, n: usize) -> Result<NormalBasisField, FieldError> {
    NormalBasisField::new(w, n)
}

impl NormalBasisField {
    /// Construct the field from the type-II Gauss period of order r = 2n + 1.
    ///
    /// The basis element β^[i] is η_{q^i mod r} with η_s = γ^s + γ^{-s} for a
    /// primitive r-th root of unity γ, so β^[i]·β^[j] expands through
    /// η_a·η_b = η_{a+b} + η_{a-b} into a table with entries in {0, 1}.
    pub fn new(w: u32, n: usize) -> Result<Self, FieldError> {
        let unsupported = FieldError::UnsupportedPair { w, n };
        if !(2..=MAX_N).contains(&n) {
            return Err(unsupported);
        }
        let ground = GroundField::new(w).map_err(|_| unsupported.clone())?;
        let r = 2 * n + 1;
        let q = (ground.q() as usize) % r;
        if !is_prime(r) || !generates_units(q, r) {
            return Err(unsupported);
        }
        let mut qpow = vec![1usize; n];
        for i in 1..n {
            qpow[i] = qpow[i - 1] * q % r;
        }
        let is_unit_class = |s: usize| s == 1 || s == r - 1;
        let mut t0 = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                let sum = (qpow[i] + qpow[j]) % r;
                let diff = (qpow[i] + r - qpow[j]) % r;
                let v = is_unit_class(sum) as u16 ^ is_unit_class(diff) as u16;
                t0[i * n + j] = v;
            }
        }
        let mut field = NormalBasisField {
            ground,
            n,
            r,
            t0,
            nonzero: Vec::new(),
            nonzero_log: Vec::new(),
            row_nonzero: vec![Vec::new(); n],
            self_dual: false,
        };
        field.index_table();
        if !field.identity_holds() {
            return Err(FieldError::UnsupportedPair { w, n });
        }
        field.self_dual = field.duality_holds();
        Ok(field)
    }

    fn index_table(&mut self) {
        let n = self.n;
        self.nonzero.clear();
        self.nonzero_log.clear();
        for i in 0..n {
            self.row_nonzero[i].clear();
            for j in 0..n {
                let v = self.t0[i * n + j];
                if v != 0 {
                    self.nonzero.push((i, j, v));
                    self.nonzero_log.push((i, j, self.ground.log[v as usize] as u32));
                    self.row_nonzero[i].push((j, v));
                }
            }
        }
    }

    fn identity_holds(&self) -> bool {
        let one = self.one();
        (0..self.n).all(|j| self.mul(self.basis_elem(j), one) == self.basis_elem(j))
    }

    /// Check Tr(β^[i]·β^[j]) = δ_ij for every pair of basis indices.
    pub fn duality_holds(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let p = self.mul(self.basis_elem(i), self.basis_elem(j));
                let tr = self.trace(p);
                tr == (i == j) as u16
            })
        })
    }

    pub fn ground(&self) -> &GroundField {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> u32 {
        self.ground.w
    }

    pub fn q(&self) -> u32 {
        self.ground.q
    }

    /// The prime r = 2n + 1 of the Gauss period.
    pub fn gauss_period_order(&self) -> usize {
        self.r
    }

    pub fn t0(&self, i: usize, j: usize) -> u16 {
        self.t0[i * self.n + j]
    }

    /// Number of nonzero entries of T0.
    pub fn complexity(&self) -> usize {
        self.nonzero.len()
    }

    pub fn is_optimal(&self) -> bool {
        self.complexity() == 2 * self.n - 1
    }

    pub fn is_self_dual(&self) -> bool {
        self.self_dual
    }

    /// True when every T0 entry lies in {0, 1}.
    pub fn table_is_binary(&self) -> bool {
        self.t0.iter().all(|&v| v <= 1)
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem::ZERO
    }

    pub fn one(&self) -> ExtElem {
        self.scalar(1)
    }

    /// Embed c ∈ F_q as c·1.
    pub fn scalar(&self, c: u16) -> ExtElem {
        let mut e = ExtElem::ZERO;
        e.0[..self.n].fill(c);
        e
    }

    /// β^[j].
    pub fn basis_elem(&self, j: usize) -> ExtElem {
        let mut e = ExtElem::ZERO;
        e.0[j % self.n] = 1;
        e
    }

    pub fn from_coords(&self, c: &[u16]) -> ExtElem {
        assert_eq!(c.len(), self.n);
        ExtElem::from_coords(c)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtElem {
        let mut e = ExtElem::ZERO;
        for c in e.0[..self.n].iter_mut() {
            *c = self.ground.random(rng);
        }
        e
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtElem {
        loop {
            let e = self.random(rng);
            if !e.is_zero() {
                return e;
            }
        }
    }

    /// x^[i] = x^(q^i): a cyclic shift of the coordinates forward by i.
    #[inline]
    pub fn qpow(&self, x: ExtElem, i: i64) -> ExtElem {
        let n = self.n as i64;
        let s = i.rem_euclid(n) as usize;
        if s == 0 {
            return x;
        }
        let mut out = ExtElem::ZERO;
        let n = self.n;
        out.0[s..n].copy_from_slice(&x.0[..n - s]);
        out.0[..s].copy_from_slice(&x.0[n - s..n]);
        out
    }

    /// Multiply by a ground-field scalar.
    #[inline]
    pub fn scale(&self, x: ExtElem, c: u16) -> ExtElem {
        match c {
            0 => ExtElem::ZERO,
            1 => x,
            _ => {
                let mut out = x;
                for v in out.0[..self.n].iter_mut() {
                    *v = self.ground.mul(*v, c);
                }
                out
            }
        }
    }

    #[inline]
    pub fn mul(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        const NONE: u32 = u32::MAX;
        let n = self.n;
        let gf = &self.ground;
        let order = gf.q - 1;
        let mut la = [NONE; 2 * MAX_N];
        let mut lb = [NONE; 2 * MAX_N];
        for i in 0..n {
            if a.0[i] != 0 {
                la[i] = gf.log[a.0[i] as usize] as u32;
                la[i + n] = la[i];
            }
            if b.0[i] != 0 {
                lb[i] = gf.log[b.0[i] as usize] as u32;
                lb[i + n] = lb[i];
            }
        }
        let mut out = ExtElem::ZERO;
        for (v, slot) in out.0[..n].iter_mut().enumerate() {
            let mut acc = 0u16;
            for &(r, c, lt) in &self.nonzero_log {
                let (x, y) = (la[r + v], lb[c + v]);
                if x != NONE && y != NONE {
                    let mut e = x + y + lt;
                    if e >= 2 * order {
                        e -= order;
                    }
                    acc ^= gf.exp[e as usize];
                }
            }
            *slot = acc;
        }
        out
    }

    /// b·β^[j] using only the nonzero entries of T0.
    #[inline]
    pub fn fast_mul(&self, b: ExtElem, j: usize) -> ExtElem {
        let n = self.n;
        let gf = &self.ground;
        let mut b2 = [0u16; 2 * MAX_N];
        b2[..n].copy_from_slice(&b.0[..n]);
        b2[n..2 * n].copy_from_slice(&b.0[..n]);
        let mut out = ExtElem::ZERO;
        for (v, slot) in out.0[..n].iter_mut().enumerate() {
            let row = (j + n - v % n) % n;
            let mut acc = 0u16;
            for &(c, t) in &self.row_nonzero[row] {
                let x = b2[c + v];
                acc ^= if t == 1 { x } else { gf.mul(x, t) };
            }
            *slot = acc;
        }
        out
    }

    /// Tr(x) as a ground-field value.
    pub fn trace(&self, x: ExtElem) -> u16 {
        x.0[..self.n].iter().fold(0, |a, &b| a ^ b)
    }

    pub fn inv(&self, x: ExtElem) -> Result<ExtElem, FieldError> {
        self.inv_counted(x).map(|(y, _)| y)
    }

    /// Itoh inversion; also returns the number of full extension-field
    /// multiplications performed.
    pub fn inv_counted(&self, x: ExtElem) -> Result<(ExtElem, usize), FieldError> {
        if x.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let m = self.n - 1;
        let mut mults = 0;
        // e holds x^{1 + q + … + q^{cur-1}}
        let mut e = x;
        let mut cur = 1usize;
        let top = usize::BITS - 1 - m.leading_zeros();
        for bit in (0..top).rev() {
            e = self.mul(self.qpow(e, cur as i64), e);
            mults += 1;
            cur *= 2;
            if (m >> bit) & 1 == 1 {
                e = self.mul(self.qpow(e, 1), x);
                mults += 1;
                cur += 1;
            }
        }
        debug_assert_eq!(cur, m);
        let z = self.qpow(e, 1);
        let y = self.mul(x, z);
        mults += 1;
        let norm = y.0[0];
        debug_assert!(y.0[..self.n].iter().all(|&c| c == norm));
        let ninv = self.ground.inv(norm)?;
        Ok((self.scale(z, ninv), mults))
    }

    pub fn div(&self, a: ExtElem, b: ExtElem) -> Result<ExtElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, x: ExtElem, mut e: u128) -> ExtElem {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// True when x lies in the ground field (x^q = x).
    pub fn is_scalar(&self, x: ExtElem) -> bool {
        self.qpow(x, 1) == x
    }
}

/// Expected Itoh multiplication count: ⌊log2(n−1)⌋ + Ham(n−1).
pub fn itoh_mult_bound(n: usize) -> usize {
    let m = n - 1;
    (usize::BITS - 1 - m.leading_zeros()) as usize + m.count_ones() as usize
}
