use proptest::prelude::*;
use pusnec::ffield::{matrix, GroundField};
use pusnec::rlnc::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_columns<R: Rng>(gf: &GroundField, n0: usize, len: usize, rng: &mut R) -> Vec<Vec<u16>> {
    (0..n0).map(|_| (0..len).map(|_| gf.random(rng)).collect()).collect()
}

fn consistent(gf: &GroundField, p: &Packet, columns: &[Vec<u16>]) -> bool {
    combine(gf, &p.vector, columns) == p.payload
}

#[test]
fn identity_spread_carries_columns() {
    let gf = GroundField::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cols = random_columns(&gf, 4, 6, &mut rng);
    let pk = alice_spread(&gf, &cols, 4, SpreadMode::Identity, &mut rng).unwrap();
    for (j, p) in pk.iter().enumerate() {
        assert_eq!(p.payload, cols[j]);
    }
    assert_eq!(alice_spread(&gf, &cols, 5, SpreadMode::Identity, &mut rng), Err(RlncError::OutDegree { n1: 5, n0: 4 }));
    assert_eq!(alice_spread(&gf, &cols, 3, SpreadMode::AsDrawn, &mut rng), Err(RlncError::OutDegree { n1: 3, n0: 4 }));
}

#[test]
fn strict_spread_has_full_rank() {
    let gf = GroundField::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let cols = random_columns(&gf, 5, 3, &mut rng);
        let pk = alice_spread(&gf, &cols, 6, SpreadMode::StrictRank, &mut rng).unwrap();
        assert_eq!(matrix::rank(&gf, &transfer_matrix(&pk)), 5);
        assert!(pk.iter().all(|p| consistent(&gf, p, &cols)));
    }
}

#[test]
fn relay_respects_indegree_bound() {
    let gf = GroundField::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cols = random_columns(&gf, 3, 4, &mut rng);
    let pk = alice_spread(&gf, &cols, 3, SpreadMode::AsDrawn, &mut rng).unwrap();
    assert_eq!(relay(&gf, &pk, 2, 3, &mut rng), Err(RlncError::IndegreeViolation { indegree: 3, k: 3 }));
    let out = relay(&gf, &pk[..2], 4, 3, &mut rng).unwrap();
    assert_eq!(out.len(), 4);
    assert!(out.iter().all(|p| consistent(&gf, p, &cols)));
}

#[test]
fn bob_recovers_columns_at_full_rank() {
    let gf = GroundField::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cols = random_columns(&gf, 5, 7, &mut rng);
    let pk = alice_spread(&gf, &cols, 7, SpreadMode::StrictRank, &mut rng).unwrap();
    let out = bob_invert(&gf, &pk, 5, 7);
    assert_eq!(out.columns, cols);
    assert_eq!(out.rank, 5);
    assert!(out.erasure_rows.is_empty());
}

#[test]
fn rank_deficiency_becomes_erasure_rows() {
    let gf = GroundField::new(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for lost in 0..=4 {
        let cols = random_columns(&gf, 5, 3, &mut rng);
        let pk = alice_spread(&gf, &cols, 5, SpreadMode::StrictRank, &mut rng).unwrap();
        let out = bob_invert(&gf, &pk[lost..], 5, 3);
        assert_eq!(out.rank, 5 - lost);
        assert_eq!(out.erasure_rows.len(), lost);
        let a = transfer_matrix(&pk[lost..]);
        // erasure rows span the kernel of the transfer matrix
        for b in &out.erasure_rows {
            assert!(a.iter().all(|row| row.iter().zip(b).fold(0, |acc, (&x, &y)| acc ^ gf.mul(x, y)) == 0));
        }
        assert_eq!(matrix::rank(&gf, &out.erasure_rows), lost);
        // the estimate differs from the truth only inside the kernel
        for p in 0..3 {
            let diff: Vec<u16> = (0..5).map(|j| out.columns[j][p] ^ cols[j][p]).collect();
            let mut stacked = out.erasure_rows.clone();
            stacked.push(diff);
            assert_eq!(matrix::rank(&gf, &stacked), lost);
        }
    }
    let none = bob_invert(&gf, &[], 3, 2);
    assert_eq!(none.erasure_rows, matrix::identity(3));
}

#[test]
fn injected_error_breaks_consistency() {
    let gf = GroundField::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cols = random_columns(&gf, 3, 5, &mut rng);
    let mut pk = alice_spread(&gf, &cols, 3, SpreadMode::StrictRank, &mut rng).unwrap();
    inject_error(&gf, &mut pk[1], &mut rng);
    assert!(!consistent(&gf, &pk[1], &cols));
    assert!(Packet::tombstone(3, 2).is_tombstone());
}

/// Count of full-rank 3 × 3 and 2 × 4 matrices over F_2 by enumeration.
#[test]
fn full_rank_probability_exhaustive() {
    let gf = GroundField::new(1).unwrap();
    for (rows, cols) in [(3usize, 3usize), (2, 4), (4, 2), (1, 5)] {
        let bits = rows * cols;
        let full = (0u32..1 << bits)
            .filter(|m| {
                let mat: matrix::Mat =
                    (0..rows).map(|r| (0..cols).map(|c| (m >> (r * cols + c) & 1) as u16).collect()).collect();
                matrix::rank(&gf, &mat) == rows.min(cols)
            })
            .count();
        let exact = full as f64 / (1u64 << bits) as f64;
        assert!((full_rank_probability(2.0, rows, cols) - exact).abs() < 1e-12);
    }
}

#[test]
fn full_rank_probability_monte_carlo() {
    let gf = GroundField::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 20_000;
    let hits = (0..trials)
        .filter(|_| {
            let m: matrix::Mat = (0..5).map(|_| (0..5).map(|_| gf.random(&mut rng)).collect()).collect();
            matrix::rank(&gf, &m) == 5
        })
        .count();
    let p = full_rank_probability(4.0, 5, 5);
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((hits as f64 / trials as f64 - p).abs() < 4.0 * se);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Payloads stay consistent with encoding vectors through arbitrary relay chains.
    #[test]
    fn relaying_preserves_consistency(seed in any::<u64>(), hops in 1usize..6, w in 1u32..=8) {
        let gf = GroundField::new(w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n0 = rng.random_range(1..6);
        let cols = random_columns(&gf, n0, 4, &mut rng);
        let mut pk = alice_spread(&gf, &cols, n0 + 1, SpreadMode::AsDrawn, &mut rng).unwrap();
        for _ in 0..hops {
            let take = rng.random_range(1..=pk.len().min(2));
            let out = rng.random_range(1..4);
            pk = relay(&gf, &pk[..take], out, 3, &mut rng).unwrap();
        }
        prop_assert!(pk.iter().all(|p| consistent(&gf, p, &cols)));
        let out = bob_invert(&gf, &pk, n0, 4);
        prop_assert_eq!(out.rank, matrix::rank(&gf, &transfer_matrix(&pk)));
        prop_assert_eq!(out.rank + out.erasure_rows.len(), n0);
    }
}
