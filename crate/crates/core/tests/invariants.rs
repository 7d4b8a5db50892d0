mod common;

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use rand::Rng;
use snf_core::family::CosetUnion;
use snf_core::isoperimetry::{diaconis_check, edge_boundary, internal_edges};
use snf_core::perm::factorial;
use snf_core::projection::{coefficient_matrix, evaluate_f1, tau_matrix, verify_identities};
use snf_core::recovery::{inject_error, noised_dictatorship, recover, RecoveryParams};
use snf_core::restriction::{decompose_g, sample_restriction};
use snf_core::rng::stream;
use snf_core::{BooleanFamily, Line, LineKind, PermRank, Permutation};

use common::*;

fn family_from_mask(n: usize, mask: u64) -> BooleanFamily {
    BooleanFamily::from_ranks(n, (0..factorial(n)).filter(|r| mask >> r & 1 == 1)).unwrap()
}

/// `{ρ ∘ σ ∘ π⁻¹ : σ ∈ F}`.
fn relabel(f: &BooleanFamily, rho: &Permutation, pi: &Permutation) -> BooleanFamily {
    let (rho_inv, pi) = (rho.inverse(), pi.clone());
    BooleanFamily::from_predicate(f.n(), |img| {
        let s = Permutation::from_images(img.to_vec()).unwrap();
        let back = rho_inv.compose(&s).unwrap().compose(&pi).unwrap();
        f.contains(&back)
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_roundtrip(n in 1usize..=20, seed in any::<u64>()) {
        let mut rng = stream(seed, 0);
        let r = rng.random_range(0..factorial(n));
        let p = Permutation::unrank(PermRank(r), n).unwrap();
        prop_assert_eq!(p.rank(), PermRank(r));
        let q = Permutation::from_images(p.images().to_vec()).unwrap();
        prop_assert_eq!(q.compose(&q.inverse()).unwrap(), Permutation::identity(n));
    }

    #[test]
    fn identities_hold(n in 4usize..=6, seed in any::<u64>()) {
        let f = random_family_mixed(n, seed, 0);
        let m = coefficient_matrix(&f).unwrap();
        prop_assert!(verify_identities(&m).unwrap().max_violation() <= 1e-9);
        let o = oracle(&f);
        prop_assert!((m.epsilon - o.epsilon).abs() <= 1e-9);
    }

    #[test]
    fn restriction_split_sums_to_f1(n in 4usize..=8, seed in any::<u64>()) {
        let f = random_family_mixed(n, seed, 1);
        let m = coefficient_matrix(&f).unwrap();
        let mut rng = stream(seed, 2);
        let r = sample_restriction(n, &mut rng);
        // A permutation inside the restriction: map X onto Y in order.
        let xs: Vec<usize> = (0..n).filter(|i| r.x >> i & 1 == 1).collect();
        let ys: Vec<usize> = (0..n).filter(|j| r.y >> j & 1 == 1).collect();
        let xc: Vec<usize> = (0..n).filter(|i| r.x >> i & 1 == 0).collect();
        let yc: Vec<usize> = (0..n).filter(|j| r.y >> j & 1 == 0).collect();
        let mut img = vec![0u8; n];
        for (a, b) in xs.iter().zip(&ys).chain(xc.iter().zip(&yc)) {
            img[*a] = *b as u8;
        }
        let p = Permutation::from_images(img).unwrap();
        let (g1, g2) = decompose_g(&m, &r, &p).unwrap();
        prop_assert!((g1 + g2 - evaluate_f1(&m, &p)).abs() < 1e-12);
    }

    #[test]
    fn handshake_at_n4(mask in 0u64..(1 << 24)) {
        let f = family_from_mask(4, mask);
        let set = members(&f);
        let mut internal = 0u64;
        for p in &set {
            for x in 0..4u8 {
                for y in (x + 1)..4 {
                    let q: Vec<u8> = p.iter().map(|&v| if v == x { y } else if v == y { x } else { v }).collect();
                    if set.contains(&q) {
                        internal += 1;
                    }
                }
            }
        }
        prop_assert_eq!(internal % 2, 0);
        let b = edge_boundary(&f).unwrap();
        prop_assert_eq!(internal_edges(&f).unwrap(), (internal / 2) as u128);
        prop_assert_eq!(internal as u128 + b, f.size() as u128 * 6);
    }

    #[test]
    fn boundary_bound_holds(n in 4usize..=5, seed in any::<u64>()) {
        let f = random_family_mixed(n, seed, 3);
        let rep = diaconis_check(&f).unwrap();
        prop_assert!(rep.slack >= -1e-6);
        prop_assert!(rep.consistent);
    }

    #[test]
    fn injection_certificate(seed in any::<u64>(), upsilon in 0.0f64..=0.0625) {
        let f = random_family_mixed(6, seed, 4);
        let inj = inject_error(&f, upsilon, seed).unwrap();
        prop_assert!(inj.certified);
        prop_assert!(inj.sign_correlation * inj.sign_correlation >= upsilon - 1e-12);
        let moved = f.symmetric_difference(&inj.h).unwrap() as f64;
        prop_assert!(moved <= upsilon.sqrt() * 720.0 + 1e-9);
    }
}

#[test]
fn handshake_exhaustive_n3() {
    for mask in 0u64..64 {
        let f = family_from_mask(3, mask);
        assert_eq!(
            2 * internal_edges(&f).unwrap() + edge_boundary(&f).unwrap(),
            f.size() as u128 * 3
        );
        assert_eq!(edge_boundary(&f).unwrap(), boundary(&f) as u128);
    }
}

#[test]
fn symbolic_boundary_matches_explicit() {
    for n in 4..=7 {
        let kinds: &[LineKind] = if n <= 6 {
            &[LineKind::Row, LineKind::Column]
        } else {
            &[LineKind::Row]
        };
        for &kind in kinds {
            for index in 0..n {
                let line = Line { kind, index };
                for mask in 0u32..1 << n {
                    let f = BooleanFamily::dictatorship(n, line, (0..n).filter(|k| mask >> k & 1 == 1)).unwrap();
                    let explicit = f.materialize().unwrap();
                    assert_eq!(
                        edge_boundary(&f).unwrap(),
                        edge_boundary(&explicit).unwrap(),
                        "{line} {mask:b}"
                    );
                }
            }
        }
    }
}

#[test]
fn equality_iff_epsilon_zero_on_coset_unions() {
    let n = 4;
    let cosets: Vec<HashSet<u64>> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            snf_core::perm::enumerate(n)
                .unwrap()
                .filter(|p| p.apply(i) == j)
                .map(|p| p.rank().0)
                .collect()
        })
        .collect();
    let mut seen = HashSet::new();
    for choice in 0u32..1 << (n * n) {
        let mut mask = 0u64;
        for (k, c) in cosets.iter().enumerate() {
            if choice >> k & 1 == 1 {
                for r in c {
                    mask |= 1 << r;
                }
            }
        }
        if !seen.insert(mask) {
            continue;
        }
        let rep = diaconis_check(&family_from_mask(n, mask)).unwrap();
        assert!(rep.consistent, "mask {mask:024b}: {rep:?}");
    }
    assert!(seen.len() > 1000);
}

#[test]
fn recover_is_idempotent() {
    let mut rng = stream(11, 0);
    for (n, line, members) in [(6, Line::row(1), vec![0, 3, 4]), (7, Line::column(5), vec![2, 6])] {
        let base = BooleanFamily::dictatorship(n, line, members).unwrap();
        let f = noised_dictatorship(&base, 0.01, &mut rng).unwrap();
        let g = recover(&f, &RecoveryParams::default()).unwrap().g;
        let again = recover(&g, &RecoveryParams::default()).unwrap();
        assert_eq!(again.g, g);
        assert_eq!(again.symdiff, 0);
    }
}

#[test]
fn complement_equivariance() {
    for (n, members) in [(5usize, vec![1, 2]), (6, vec![0, 2, 5]), (6, vec![4])] {
        for seed in 0..5 {
            let base = BooleanFamily::dictatorship(n, Line::row(seed as usize % n), members.clone()).unwrap();
            let mut rng = stream(12, seed);
            let f = noised_dictatorship(&base, 0.01, &mut rng).unwrap();
            let a = recover(&f, &RecoveryParams::default()).unwrap();
            let b = recover(&f.complement(), &RecoveryParams::default()).unwrap();
            assert_eq!(a.strong_line.line, b.strong_line.line);
            let sa: BTreeSet<usize> = a.members().into_iter().collect();
            let sb: BTreeSet<usize> = b.members().into_iter().collect();
            let all: BTreeSet<usize> = (0..n).collect();
            assert_eq!(&all - &sa, sb, "n = {n}, seed {seed}");
        }
    }
}

#[test]
fn relabeling_equivariance() {
    let n = 6;
    let base = BooleanFamily::dictatorship(n, Line::row(2), [0, 1, 4]).unwrap();
    let mut rng = stream(13, 0);
    let f = noised_dictatorship(&base, 0.01, &mut rng).unwrap();
    let g = recover(&f, &RecoveryParams::default()).unwrap().g;
    for t in 0..20 {
        let mut r = stream(14, t);
        let rho = Permutation::from_images(snf_core::rng::random_images(n, &mut r)).unwrap();
        let pi = Permutation::from_images(snf_core::rng::random_images(n, &mut r)).unwrap();
        let res = recover(&relabel(&f, &rho, &pi), &RecoveryParams::default()).unwrap();
        let line = res.strong_line.line;
        assert_eq!(line, Line::row(pi.apply(2)), "relabeling {t}");
        let expected: BTreeSet<usize> = [0, 1, 4].iter().map(|&j| rho.apply(j)).collect();
        assert_eq!(res.members().into_iter().collect::<BTreeSet<_>>(), expected);
        assert_eq!(res.g.symmetric_difference(&relabel(&g, &rho, &pi)).unwrap(), 0);
    }
}

#[test]
fn tau_matches_coset_counts() {
    let f = random_family_mixed(6, 15, 0);
    let tau = tau_matrix(&f);
    let set = members(&f);
    for i in 0..6 {
        for j in 0..6 {
            let count = set.iter().filter(|p| p[i] as usize == j).count() as f64;
            assert!((tau.get(i, j) - count / 120.0).abs() < 1e-15);
        }
    }
    let cu = CosetUnion::new(6, Line::row(0), [1]).unwrap();
    assert_eq!(cu.size(6), 120);
}
