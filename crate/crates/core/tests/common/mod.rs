//! Independent reference computations shared by the integration tests.
//! Everything here works from definitions, without the library's fast paths.

#![allow(dead_code)]

use std::collections::HashSet;

use rand::Rng;
use snf_core::rng::{stream, SnfRng};
use snf_core::{BooleanFamily, Permutation};

/// All permutations of `0..n` as image vectors, by recursive insertion.
pub fn all_perms(n: usize) -> Vec<Vec<u8>> {
    fn go(prefix: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v as u8);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn members(f: &BooleanFamily) -> HashSet<Vec<u8>> {
    all_perms(f.n())
        .into_iter()
        .filter(|p| f.contains(&Permutation::from_images(p.clone()).unwrap()))
        .collect()
}

/// Each permutation joins with probability `c`.
pub fn random_family(n: usize, c: f64, rng: &mut SnfRng) -> BooleanFamily {
    let total = factorial(n);
    let ranks: Vec<u64> = (0..total).filter(|_| rng.random_bool(c)).collect();
    BooleanFamily::from_ranks(n, ranks).unwrap()
}

/// A random family whose density is itself drawn from `[0.05, 0.95]`.
pub fn random_family_mixed(n: usize, seed: u64, index: u64) -> BooleanFamily {
    let mut rng = stream(seed, index);
    let c = rng.random_range(0.05..0.95);
    random_family(n, c, &mut rng)
}

/// Coefficients from the definition of `τ` and the closed-form entries.
pub struct Oracle {
    pub n: usize,
    pub c: f64,
    pub a: Vec<Vec<f64>>,
    pub epsilon: f64,
}

pub fn oracle(f: &BooleanFamily) -> Oracle {
    let n = f.n();
    let set = members(f);
    let perms = all_perms(n);
    let total = perms.len() as f64;
    let c = set.len() as f64 / total;
    let mut tau = vec![vec![0.0; n]; n];
    for p in &set {
        for i in 0..n {
            tau[i][p[i] as usize] += 1.0;
        }
    }
    let coset = factorial(n - 1) as f64;
    let nf = n as f64;
    let a: Vec<Vec<f64>> = tau
        .iter()
        .map(|row| {
            row.iter()
                .map(|t| {
                    let inner = (2.0 * t / coset - 1.0) / nf;
                    (nf - 1.0) * inner - (nf - 2.0) / nf * (2.0 * c - 1.0)
                })
                .collect()
        })
        .collect();
    let mut err = 0.0;
    for p in &perms {
        let fv = if set.contains(p) { 1.0 } else { -1.0 };
        let f1: f64 = (0..n).map(|i| a[i][p[i] as usize]).sum();
        err += (fv - f1) * (fv - f1);
    }
    Oracle {
        n,
        c,
        a,
        epsilon: err / total,
    }
}

/// Boundary by checking every transposition neighbor `τ ∘ σ` (swap the
/// values `x` and `y` in the image array).
pub fn boundary(f: &BooleanFamily) -> u64 {
    let set = members(f);
    let n = f.n();
    let mut count = 0;
    for p in &set {
        for x in 0..n as u8 {
            for y in (x + 1)..n as u8 {
                let q: Vec<u8> = p
                    .iter()
                    .map(|&v| {
                        if v == x {
                            y
                        } else if v == y {
                            x
                        } else {
                            v
                        }
                    })
                    .collect();
                if !set.contains(&q) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Fraction of permutations selecting exactly one `true` cell.
pub fn good_fraction(l: &[Vec<bool>]) -> f64 {
    let m = l.len();
    let perms = all_perms(m);
    let good = perms
        .iter()
        .filter(|p| (0..m).filter(|&i| l[i][p[i] as usize]).count() == 1)
        .count();
    good as f64 / perms.len() as f64
}

/// Sign of an image vector by counting inversions.
pub fn sign(p: &[u8]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}
