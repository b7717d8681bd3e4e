use proptest::prelude::*;
use pusnec::ffield::{build_field, itoh_mult_bound, matrix, ExtElem, FieldError, GroundField, NormalBasisField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// F_{2^n} in a polynomial basis modulo an irreducible P, as bit masks.
struct PolyField {
    n: u32,
    p: u32,
}

impl PolyField {
    fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.n & 1 == 1 {
                a ^= self.p;
            }
        }
        acc
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn irreducible(n: u32) -> u32 {
    match n {
        2 => 0b111,
        3 => 0b1011,
        5 => 0b100101,
        6 => 0b1000011,
        9 => 0x211,
        11 => 0x805,
        _ => unreachable!(),
    }
}

/// Search for β in the polynomial-basis field whose conjugates reproduce T0
/// and map the normal-basis field isomorphically onto it.
fn find_isomorphism(f: &NormalBasisField) -> Option<Vec<u32>> {
    let n = f.n() as u32;
    let pf = PolyField { n, p: irreducible(n) };
    'search: for beta in 1..(1u32 << n) {
        let conj: Vec<u32> = (0..n).map(|i| pf.pow(beta, 1 << i)).collect();
        for i in 0..n as usize {
            for j in 0..n as usize {
                let prod = pf.mul(conj[i], conj[j]);
                let mut expect = 0;
                for v in 0..n as usize {
                    if f.t0((i + n as usize - v) % n as usize, (j + n as usize - v) % n as usize) == 1 {
                        expect ^= conj[v];
                    }
                }
                if prod != expect {
                    continue 'search;
                }
            }
        }
        return Some(conj);
    }
    None
}

fn to_poly(f: &NormalBasisField, conj: &[u32], x: ExtElem) -> u32 {
    (0..f.n()).filter(|&i| x.0[i] == 1).fold(0, |acc, i| acc ^ conj[i])
}

#[test]
fn table_iv_pairs_are_optimal_and_self_dual() {
    for (w, n) in [(8, 9), (8, 11), (5, 14), (1, 2), (1, 6), (5, 6), (7, 6)] {
        let f = build_field(w, n).unwrap();
        assert_eq!(f.complexity(), 2 * n - 1, "(w={w}, n={n})");
        assert!(f.is_optimal());
        assert!(f.is_self_dual());
        assert!(f.table_is_binary());
    }
}

#[test]
fn unsupported_pairs_are_rejected() {
    // n = 1 is excluded; 2n+1 = 9 is not prime; 16 ≡ 1 mod 5 so q and -1 miss Z_5^*
    for (w, n) in [(1, 1), (8, 4), (4, 2), (0, 5), (11, 2)] {
        assert!(matches!(build_field(w, n), Err(FieldError::UnsupportedPair { .. })), "(w={w}, n={n})");
    }
}

#[test]
fn tiny_field_matches_polynomial_f4() {
    let f = build_field(1, 2).unwrap();
    let conj = find_isomorphism(&f).expect("an isomorphism exists");
    let pf = PolyField { n: 2, p: 0b111 };
    let all: Vec<ExtElem> = (0..4u16).map(|v| ExtElem::from_coords(&[v & 1, v >> 1])).collect();
    let images: std::collections::HashSet<u32> = all.iter().map(|&x| to_poly(&f, &conj, x)).collect();
    assert_eq!(images.len(), 4);
    for &a in &all {
        for &b in &all {
            assert_eq!(to_poly(&f, &conj, f.mul(a, b)), pf.mul(to_poly(&f, &conj, a), to_poly(&f, &conj, b)));
        }
    }
    // identity found by exhaustive search
    let ids: Vec<ExtElem> = all.iter().copied().filter(|&e| all.iter().all(|&x| f.mul(x, e) == x)).collect();
    assert_eq!(ids, vec![f.one()]);
    // inverse found by exhaustive search
    for &x in all.iter().filter(|x| !x.is_zero()) {
        let brute: Vec<ExtElem> = all.iter().copied().filter(|&y| f.mul(x, y) == f.one()).collect();
        assert_eq!(brute, vec![f.inv(x).unwrap()]);
    }
}

#[test]
fn binary_fields_are_isomorphic_to_polynomial_basis() {
    for n in [3usize, 5, 6, 9, 11] {
        let f = match build_field(1, n) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let conj = find_isomorphism(&f).unwrap_or_else(|| panic!("no isomorphism for n={n}"));
        let pf = PolyField { n: n as u32, p: irreducible(n as u32) };
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..500 {
            let (a, b) = (f.random(&mut rng), f.random(&mut rng));
            assert_eq!(to_poly(&f, &conj, f.mul(a, b)), pf.mul(to_poly(&f, &conj, a), to_poly(&f, &conj, b)));
        }
    }
}

#[test]
fn qpow_is_frobenius() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (w, n) in [(1, 2), (5, 6), (8, 9)] {
        let f = build_field(w, n).unwrap();
        for _ in 0..50 {
            let x = f.random(&mut rng);
            assert_eq!(f.pow(x, f.q() as u128), f.qpow(x, 1));
        }
    }
}

#[test]
fn qpow_shift_examples() {
    let f = build_field(8, 9).unwrap();
    let x = f.from_coords(&[1, 2, 3, 4, 5, 6, 7, 8, 9]);
    assert_eq!(f.qpow(x, 1).coords(9), &[9, 1, 2, 3, 4, 5, 6, 7, 8]);
    assert_eq!(f.qpow(x, 0), x);
    assert_eq!(f.qpow(x, 9), x);
    assert_eq!(f.qpow(f.qpow(x, 4), -4), x);
}

#[test]
fn fast_mul_agrees_with_mul() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (w, n) in [(1, 2), (8, 9), (8, 11), (5, 14)] {
        let f = build_field(w, n).unwrap();
        for _ in 0..1000 {
            let b = f.random(&mut rng);
            for j in 0..n {
                assert_eq!(f.fast_mul(b, j), f.mul(b, f.basis_elem(j)));
            }
        }
        for j in 0..n {
            assert!(f.fast_mul(f.zero(), j).is_zero());
            // β^[0]·β^[j] expands along the T0 rows
            let expect: Vec<u16> = (0..n).map(|v| f.t0((n - v) % n, (j + n - v) % n)).collect();
            assert_eq!(f.fast_mul(f.basis_elem(0), j).coords(n), &expect[..]);
        }
    }
}

#[test]
fn itoh_inversion_counts_and_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (w, n) in [(1, 2), (5, 6), (8, 9), (8, 11), (5, 14)] {
        let f = build_field(w, n).unwrap();
        assert_eq!(f.inv(f.one()).unwrap(), f.one());
        assert_eq!(f.inv(f.zero()), Err(FieldError::DivisionByZero));
        for _ in 0..10_000 / n {
            let x = f.random_nonzero(&mut rng);
            let (y, mults) = f.inv_counted(x).unwrap();
            assert_eq!(f.mul(x, y), f.one());
            assert_eq!(mults, itoh_mult_bound(n));
        }
    }
}

#[test]
fn duality_exhaustive() {
    for (w, n) in [(1, 2), (8, 9), (8, 11), (5, 14)] {
        let f = build_field(w, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut acc = f.zero();
                for v in 0..n as i64 {
                    acc += f.mul(f.qpow(f.basis_elem(i), v), f.qpow(f.basis_elem(j), v));
                }
                let expect = if i == j { f.one() } else { f.zero() };
                assert_eq!(acc, expect, "(i={i}, j={j})");
            }
        }
    }
}

#[test]
fn ground_field_tables_are_total() {
    for w in 1..=10 {
        let g = GroundField::new(w).unwrap();
        for a in 1..g.q() as u16 {
            assert_eq!(g.mul(a, g.inv(a).unwrap()), 1);
        }
    }
}

#[test]
fn matrix_solve_and_kernel() {
    let g = GroundField::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let a: matrix::Mat = (0..4).map(|_| (0..6).map(|_| g.random(&mut rng)).collect()).collect();
        for v in matrix::kernel(&g, &a, 6) {
            assert!(matrix::vec_mat(&g, &v, &matrix::transpose(&a)).iter().all(|&x| x == 0));
        }
        let x: Vec<u16> = (0..6).map(|_| g.random(&mut rng)).collect();
        let b = matrix::vec_mat(&g, &x, &matrix::transpose(&a));
        let sol = matrix::solve(&g, &a, &b).unwrap();
        assert_eq!(matrix::vec_mat(&g, &sol, &matrix::transpose(&a)), b);
        let sq: matrix::Mat = (0..5).map(|_| (0..5).map(|_| g.random(&mut rng)).collect()).collect();
        if let Some(inv) = matrix::inverse(&g, &sq) {
            assert_eq!(matrix::mat_mul(&g, &sq, &inv), matrix::identity(5));
        } else {
            assert!(matrix::rank(&g, &sq) < 5);
        }
    }
}

fn field_strategy() -> impl Strategy<Value = (u32, usize)> {
    prop_oneof![Just((1u32, 2usize)), Just((8, 9)), Just((8, 11)), Just((5, 14)), Just((5, 6))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms_hold((w, n) in field_strategy(), seed in any::<u64>()) {
        let f = build_field(w, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
            prop_assert_eq!(f.mul(a, f.one()), a);
            prop_assert!(f.mul(a, f.zero()).is_zero());
        }
    }

    #[test]
    fn qpow_is_field_automorphism((w, n) in field_strategy(), seed in any::<u64>(), i in 0i64..20) {
        let f = build_field(w, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (f.random(&mut rng), f.random(&mut rng));
        prop_assert_eq!(f.qpow(f.mul(a, b), i), f.mul(f.qpow(a, i), f.qpow(b, i)));
        prop_assert_eq!(f.qpow(a + b, i), f.qpow(a, i) + f.qpow(b, i));
        prop_assert_eq!(f.qpow(a, n as i64), a);
    }

    #[test]
    fn scalars_are_fixed_by_frobenius((w, n) in field_strategy(), c in any::<u16>()) {
        let f = build_field(w, n).unwrap();
        let c = c % f.q() as u16;
        prop_assert!(f.is_scalar(f.scalar(c)));
    }
}
