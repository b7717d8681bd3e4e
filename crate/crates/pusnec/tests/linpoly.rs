mod common;

use common::{all_elements, span};
use proptest::prelude::*;
use pusnec::ffield::{ExtElem, NormalBasisField};
use pusnec::gabidulin::rank_of;
use pusnec::linpoly::{eval, linear_map_matrix, minimal_poly, rootspace, symbolic_product, LinPoly, LinPolyError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_poly<R: Rng>(f: &NormalBasisField, deg: usize, rng: &mut R) -> LinPoly {
    LinPoly::new((0..=deg).map(|_| f.random(rng)).collect())
}

#[test]
fn degree_and_trailing_zeros() {
    let f = NormalBasisField::new(1, 5).unwrap();
    let p = LinPoly::new(vec![f.one(), ExtElem::ZERO, f.one(), ExtElem::ZERO]);
    assert_eq!(p.degree(), 2);
    assert_eq!(p.coeffs.len(), 3);
    assert!(LinPoly::zero().is_zero());
    assert_eq!(LinPoly::identity(&f).degree(), 0);
}

#[test]
fn identity_evaluates_to_argument() {
    let f = NormalBasisField::new(8, 9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let x = f.random(&mut rng);
        assert_eq!(eval(&f, &LinPoly::identity(&f), x), x);
    }
}

#[test]
fn map_matrix_rows_are_basis_images() {
    let f = NormalBasisField::new(8, 11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_poly(&f, 4, &mut rng);
    let m = linear_map_matrix(&f, &p);
    for (j, row) in m.iter().enumerate() {
        assert_eq!(row.as_slice(), eval(&f, &p, f.basis_elem(j)).coords(11));
    }
}

#[test]
fn rootspace_matches_exhaustive_search() {
    for (w, n) in [(1u32, 5usize), (1, 6), (2, 3)] {
        let f = NormalBasisField::new(w, n).unwrap();
        let elems = all_elements(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for deg in 0..n {
            for _ in 0..4 {
                // a polynomial with a known rootspace plus a random one
                let gens: Vec<ExtElem> = (0..deg).map(|_| f.random(&mut rng)).collect();
                for p in [minimal_poly(&f, &gens).0, random_poly(&f, deg, &mut rng)] {
                    let mut zeros: Vec<ExtElem> =
                        elems.iter().copied().filter(|&x| eval(&f, &p, x).is_zero()).collect();
                    zeros.sort_by_key(|e| e.0);
                    let basis = rootspace(&f, &p);
                    assert_eq!(rank_of(&f, &basis), basis.len());
                    for &b in &basis {
                        assert!(eval(&f, &p, b).is_zero());
                    }
                    assert_eq!(span(&f, &basis), zeros, "w={w} n={n} deg={deg}");
                }
            }
        }
    }
}

#[test]
fn minimal_poly_degree_equals_rank() {
    let f = NormalBasisField::new(8, 9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let count = rng.random_range(0..7);
        let mut roots: Vec<ExtElem> = (0..count).map(|_| f.random(&mut rng)).collect();
        // inject F_q-dependencies
        if count >= 2 && rng.random_bool(0.5) {
            let c = f.ground().random(&mut rng);
            roots.push(f.scale(roots[0], c) + roots[1]);
        }
        let (p, kept) = minimal_poly(&f, &roots);
        let r = rank_of(&f, &roots);
        assert_eq!(p.degree(), r);
        assert_eq!(kept.len(), r);
        assert_eq!(p.coeff(0), f.one());
        for &d in &roots {
            assert!(eval(&f, &p, d).is_zero());
        }
    }
}

#[test]
fn symbolic_product_is_composition() {
    let f = NormalBasisField::new(8, 11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..30 {
        let g = random_poly(&f, 3, &mut rng);
        let h = random_poly(&f, 4, &mut rng);
        let gh = symbolic_product(&f, &g, &h).unwrap();
        let x = f.random(&mut rng);
        assert_eq!(eval(&f, &gh, x), eval(&f, &g, eval(&f, &h, x)));
    }
    let big = random_poly(&f, 6, &mut rng);
    assert_eq!(symbolic_product(&f, &big, &big), Err(LinPolyError::DegreeOverflow(12, 11)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_fq_linear(seed in any::<u64>(), c in 0u16..256) {
        let f = NormalBasisField::new(8, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&f, 5, &mut rng);
        let (a, b) = (f.random(&mut rng), f.random(&mut rng));
        prop_assert_eq!(eval(&f, &p, a + b), eval(&f, &p, a) + eval(&f, &p, b));
        prop_assert_eq!(eval(&f, &p, f.scale(a, c)), f.scale(eval(&f, &p, a), c));
    }
}
