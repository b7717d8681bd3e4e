//! Dense matrices over the ground field F_q.
//!
//! Elimination is Gauss-Jordan with the pivot taken in the lowest column index
//! that still has a nonzero entry, using the first such row.

use super::GroundField;

pub type Mat = Vec<Vec<u16>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![0; cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

pub fn transpose(m: &Mat) -> Mat {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn mat_mul(gf: &GroundField, a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner);
            (0..cols).map(|j| (0..inner).fold(0u16, |acc, t| acc ^ gf.mul(row[t], b[t][j]))).collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat(gf: &GroundField, v: &[u16], m: &Mat) -> Vec<u16> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0u16; cols];
    for (i, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(m[i].iter()) {
            *o ^= gf.mul(c, x);
        }
    }
    out
}

/// Reduce `m` in place to reduced row echelon form and return the pivot
/// columns, one per nonzero row.
pub fn rref(gf: &GroundField, m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = gf.inv(m[r][c]).expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = gf.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                let (src, dst) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, &s) in dst.iter_mut().zip(src.iter()) {
                    *d ^= gf.mul(f, s);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(gf: &GroundField, m: &Mat) -> usize {
    let mut t = m.clone();
    rref(gf, &mut t).len()
}

/// Basis of the right kernel {x : m·x = 0}.
pub fn kernel(gf: &GroundField, m: &Mat, cols: usize) -> Mat {
    let mut t = m.clone();
    let pivots = rref(gf, &mut t);
    let mut basis = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![0u16; cols];
        x[f] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = t[row][f];
        }
        basis.push(x);
    }
    basis
}

/// Solve a·x = b with free variables set to zero. Returns None when the
/// system is inconsistent.
pub fn solve(gf: &GroundField, a: &Mat, b: &[u16]) -> Option<Vec<u16>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Mat = a
        .iter()
        .zip(b.iter())
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let pivots = rref(gf, &mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![0u16; cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][cols];
    }
    Some(x)
}

pub fn inverse(gf: &GroundField, a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut aug: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.extend((0..n).map(|j| (i == j) as u16));
            r
        })
        .collect();
    let pivots = rref(gf, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}
