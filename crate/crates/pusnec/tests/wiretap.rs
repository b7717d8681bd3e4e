use proptest::prelude::*;
use pusnec::ffield::matrix;
use pusnec::gabidulin::{Codec, CodecSpec};
use pusnec::wiretap::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn full_rank_binary<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> matrix::Mat {
    let gf = pusnec::ffield::GroundField::new(1).unwrap();
    loop {
        let m: matrix::Mat = (0..rows).map(|_| (0..cols).map(|_| rng.random_range(0..2)).collect()).collect();
        if matrix::rank(&gf, &m) == rows {
            return m;
        }
    }
}

fn subsets(k0: usize) -> Vec<Vec<usize>> {
    (1u32..1 << k0).map(|m| (0..k0).filter(|&i| m >> i & 1 == 1).collect()).collect()
}

/// Without the withheld prefix the code is systematic on the emitted
/// columns, so tapping column 0 exposes u_0 outright.
#[test]
fn unwithheld_secret_leaks_through_systematic_column() {
    let codec = Codec::new(CodecSpec { w: 1, n: 3, k: 2, n0: 3, k0: 2, mu0: 0, l: 1 }).unwrap();
    let mi = gabidulin_mi(&codec, &vec![vec![1, 0, 0]], &[vec![0], vec![1]]).unwrap();
    assert!((mi[0] - 1.0).abs() < TOL && mi[1].abs() < TOL);
    assert!(threshold_model_mi(2, 0, 1, 1).unwrap().abs() < TOL);
}

#[test]
fn toy_code_table() {
    let t = rs32_table().unwrap();
    assert!((t[0] - 0.0).abs() < TOL);
    assert!((t[1] - 2.0).abs() < TOL);
    assert!((t[2] - 4.0).abs() < TOL);
}

#[test]
fn oracle_rejects_large_enumerations() {
    assert!(matches!(toy_mi_oracle(1 << 12, 2, &[vec![0]], |u| u.to_vec()), Err(WiretapError::TooLarge(_))));
    // identity channel leaks everything, constant channel nothing
    let full = toy_mi_oracle(4, 2, &[vec![0], vec![0, 1]], |u| u.to_vec()).unwrap();
    assert!((full[0] - 2.0).abs() < TOL && (full[1] - 4.0).abs() < TOL);
    let none = toy_mi_oracle(4, 2, &[vec![0, 1]], |_| vec![0]).unwrap();
    assert!(none[0].abs() < TOL);
}

/// Exhaustive MI of small binary Gabidulin codes against the threshold model.
#[test]
fn exhaustive_mi_matches_threshold_model() {
    let configs = [
        CodecSpec { w: 1, n: 2, k: 1, n0: 1, k0: 1, mu0: 0, l: 1 },
        CodecSpec { w: 1, n: 3, k: 2, n0: 2, k0: 1, mu0: 1, l: 1 },
        CodecSpec { w: 1, n: 3, k: 1, n0: 2, k0: 1, mu0: 0, l: 1 },
        CodecSpec { w: 1, n: 5, k: 3, n0: 4, k0: 1, mu0: 2, l: 1 },
        CodecSpec { w: 1, n: 5, k: 3, n0: 3, k0: 2, mu0: 1, l: 1 },
        CodecSpec { w: 1, n: 5, k: 2, n0: 3, k0: 2, mu0: 0, l: 1 },
        CodecSpec { w: 1, n: 6, k: 3, n0: 4, k0: 2, mu0: 1, l: 1 },
        CodecSpec { w: 1, n: 6, k: 2, n0: 4, k0: 2, mu0: 0, l: 1 },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for spec in configs {
        let codec = Codec::new(spec).unwrap();
        let sets = subsets(spec.k0);
        for mu in 1..=spec.n0 {
            for _ in 0..2 {
                let b = full_rank_binary(mu, spec.n0, &mut rng);
                let got = gabidulin_mi(&codec, &b, &sets).unwrap();
                for (set, mi) in sets.iter().zip(&got) {
                    let want = threshold_model_mi(spec.k, spec.mu0, mu, set.len()).unwrap();
                    assert!((mi - want).abs() < TOL, "{spec:?} μ={mu} S={set:?}: {mi} vs {want}");
                }
            }
        }
    }
}

#[test]
fn coset_structure_on_tiny_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for spec in [
        CodecSpec { w: 1, n: 3, k: 2, n0: 3, k0: 1, mu0: 1, l: 1 },
        CodecSpec { w: 1, n: 5, k: 3, n0: 4, k0: 1, mu0: 2, l: 1 },
        CodecSpec { w: 1, n: 5, k: 2, n0: 5, k0: 2, mu0: 0, l: 1 },
    ] {
        let codec = Codec::new(spec).unwrap();
        for mu in 1..=spec.n0 {
            let b = full_rank_binary(mu, spec.n0, &mut rng);
            let cs = coset_structure_check(&codec, &b).unwrap();
            assert_eq!(cs.coset_exponent, mu.min(spec.mu0));
            assert_eq!(cs.class_exponent, mu.min(spec.k) - mu.min(spec.mu0));
        }
    }
}

#[test]
fn threshold_model_staircase() {
    // k = 3, μ0 = 0: I = max(0, ξ + μ − 3) below k, ξ at or above
    let rows: [[f64; 5]; 3] = [[0.0, 0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 1.0, 2.0, 2.0], [0.0, 1.0, 2.0, 3.0, 3.0]];
    for (xi, row) in (1..=3).zip(rows) {
        for (mu, &want) in row.iter().enumerate() {
            assert_eq!(threshold_model_mi(3, 0, mu, xi).unwrap(), want);
        }
    }
    assert_eq!(threshold_model_mi(4, 2, 2, 2).unwrap(), 0.0);
    assert_eq!(threshold_model_mi(4, 2, 3, 2).unwrap(), 1.0);
    assert!(matches!(threshold_model_mi(3, 0, 1, 0), Err(WiretapError::InvalidXi { .. })));
    assert!(threshold_model_mi(3, 1, 1, 3).is_err());
}

#[test]
fn leakage_decomposition_matches_threshold_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n0 = rng.random_range(2..10);
        let raw: Vec<f64> = (0..=n0).map(|_| rng.random::<f64>()).collect();
        let sum: f64 = raw.iter().sum();
        let mut p: Vec<f64> = raw.iter().map(|x| x / sum).collect();
        let fix: f64 = 1.0 - p.iter().sum::<f64>();
        p[0] += fix;
        let dist = WiretapDistribution::new(p, Provenance::Analytic).unwrap();
        let k = rng.random_range(1..=n0);
        for xi in 1..=k {
            let pt = leakage_indices(&dist, k, xi).unwrap();
            let avg: f64 = (0..=n0).map(|mu| dist.prob(mu) * threshold_model_mi(k, 0, mu, xi).unwrap()).sum();
            assert!((pt.i_l - avg).abs() < TOL);
            assert!((pt.i_l - (pt.i_r + xi as f64 * pt.plp)).abs() < TOL);
            assert!((pt.plp - dist.tail(k)).abs() < TOL);
        }
        assert!(leakage_indices(&dist, k, 0).is_err());
        assert!(leakage_indices(&dist, k, k + 1).is_err());
    }
    assert!(matches!(
        WiretapDistribution::new(vec![0.5, 0.4], Provenance::Analytic),
        Err(WiretapError::NotNormalized(_))
    ));
}

/// p(μ) by enumerating every compromise pattern of the n0·η Charlies.
fn brute_wiretap(m: &DisjointPathModel) -> Vec<f64> {
    let cells = m.n0 * m.eta;
    let mut p = vec![0.0; m.n0 + 1];
    for mask in 0u32..1 << cells {
        let ones = mask.count_ones() as i32;
        let w = m.gamma.powi(ones) * (1.0 - m.gamma).powi(cells as i32 - ones);
        let mu = (0..m.n0).filter(|&path| (mask >> (path * m.eta)) & ((1 << m.eta) - 1) != 0).count();
        p[mu] += w;
    }
    p
}

/// Frame error rate by enumerating erasures of the η upstream links on each
/// path and of every receiver's last-hop links.
fn brute_fer(m: &DisjointPathModel, k: usize) -> f64 {
    let up = m.n0 * m.eta;
    let last = m.n0 * m.bobs;
    let mut ok = 0.0;
    for mask in 0u64..1 << (up + last) {
        let ones = mask.count_ones() as i32;
        let w = m.eps.powi(ones) * (1.0 - m.eps).powi((up + last) as i32 - ones);
        let alive: Vec<bool> = (0..m.n0).map(|p| (mask >> (p * m.eta)) & ((1 << m.eta) - 1) == 0).collect();
        let all = (0..m.bobs).all(|t| {
            let got = (0..m.n0).filter(|&p| alive[p] && (mask >> (up + t * m.n0 + p)) & 1 == 0).count();
            got >= k
        });
        if all {
            ok += w;
        }
    }
    1.0 - ok
}

#[test]
fn disjoint_model_matches_enumeration() {
    for m in [
        DisjointPathModel { gamma: 0.1, eps: 0.2, eta: 2, n0: 3, bobs: 2 },
        DisjointPathModel { gamma: 0.3, eps: 0.05, eta: 3, n0: 4, bobs: 1 },
        DisjointPathModel { gamma: 0.02, eps: 0.3, eta: 1, n0: 5, bobs: 2 },
    ] {
        let d = m.wiretap_distribution();
        for (a, b) in d.p.iter().zip(brute_wiretap(&m)) {
            assert!((a - b).abs() < TOL);
        }
        for k in 1..=m.n0 {
            assert!((m.fer(k) - brute_fer(&m, k)).abs() < TOL, "{m:?} k={k}");
            let single = DisjointPathModel { bobs: 1, ..m };
            assert!((m.fer_single(k) - brute_fer(&single, k)).abs() < TOL);
        }
    }
}

#[test]
fn analytics_validate_inputs() {
    let m = DisjointPathModel { gamma: 1e-3, eps: 1e-3, eta: 5, n0: 10, bobs: 2 };
    assert!(disjoint_path_analytics(&m, 0, 1, 8.0).is_err());
    assert!(disjoint_path_analytics(&m, 11, 1, 8.0).is_err());
    assert!(disjoint_path_analytics(&DisjointPathModel { gamma: 1.5, ..m }, 3, 1, 8.0).is_err());
    let a = disjoint_path_analytics(&m, 4, 2, 88.0).unwrap();
    assert_eq!(a.report.points.len(), 2);
    assert!((a.report.i_l_bits(2).unwrap() - 88.0 * a.report.points[1].i_l).abs() < TOL);
    assert!(a.report.i_l_bits(3).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// FER grows and leakage shrinks as the code dimension k increases.
    #[test]
    fn tradeoff_monotone(gamma in 0.0f64..0.5, eps in 0.0f64..0.5, eta in 1usize..8, n0 in 1usize..12, bobs in 1usize..4) {
        let m = DisjointPathModel { gamma, eps, eta, n0, bobs };
        let dist = m.wiretap_distribution();
        for k in 1..n0 {
            prop_assert!(m.fer(k) <= m.fer(k + 1) + 1e-12);
            prop_assert!(m.fer_single(k) <= m.fer(k) + 1e-12);
            let a = leakage_indices(&dist, k, 1).unwrap();
            let b = leakage_indices(&dist, k + 1, 1).unwrap();
            prop_assert!(b.i_l <= a.i_l + 1e-12);
            prop_assert!(b.plp <= a.plp + 1e-12);
        }
    }
}
