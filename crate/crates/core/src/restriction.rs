//! Random restrictions `(X, Y)`, the split `g = g₁ + g₂`, restriction
//! moments, typicality and partition goodness.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{distance_to_set, eps_tolerance, mean_stderr, pairwise_sum, TOLERANCE_FLOOR};
use crate::perm::{factorial, next_permutation, Permutation, MAX_RANK_N};
use crate::projection::CoefficientMatrix;
use crate::rng::{blocks, random_subset_mask, stream};

/// A pair of equal-size subsets of `[n]`, stored as bitmasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Restriction {
    pub n: usize,
    pub x: u32,
    pub y: u32,
}

fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| mask & (1 << i) != 0)
}

impl Restriction {
    pub fn new(n: usize, x: u32, y: u32) -> Result<Self> {
        if n > MAX_RANK_N {
            return Err(Error::Capacity {
                what: "restrictions",
                n,
                limit: MAX_RANK_N,
            });
        }
        let full = full_mask(n);
        if x & !full != 0 || y & !full != 0 {
            return Err(Error::InvalidParameter {
                name: "restriction",
                reason: format!("masks must lie within [{n}]"),
            });
        }
        if x.count_ones() != y.count_ones() {
            return Err(Error::InvalidParameter {
                name: "restriction",
                reason: format!("|X| = {} but |Y| = {}", x.count_ones(), y.count_ones()),
            });
        }
        Ok(Restriction { n, x, y })
    }

    pub fn size(&self) -> usize {
        self.x.count_ones() as usize
    }

    /// `(X̄, Ȳ)`.
    pub fn complement(&self) -> Restriction {
        let full = full_mask(self.n);
        Restriction {
            n: self.n,
            x: !self.x & full,
            y: !self.y & full,
        }
    }

    /// Whether `π(X) = Y`.
    pub fn contains(&self, images: &[u8]) -> bool {
        bits(self.x).all(|i| self.y & (1 << images[i]) != 0)
    }

    /// Number of permutations in `T_{X,Y}`.
    pub fn coset_size(&self) -> u64 {
        factorial(self.size()) * factorial(self.n - self.size())
    }
}

/// Draws from `R`: each `i` joins `X` with probability 1/2, then `Y` is a
/// uniform subset of size `|X|`.
pub fn sample_restriction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Restriction {
    let mut x = 0u32;
    for i in 0..n {
        if rng.random_bool(0.5) {
            x |= 1 << i;
        }
    }
    let y = random_subset_mask(n, x.count_ones() as usize, rng);
    Restriction { n, x, y }
}

/// `m(X, Y) = (1/|X|) Σ_{i∈X, j∈Y} a_ij`, and 0 for empty `X`.
pub fn restriction_mean(m: &CoefficientMatrix, r: &Restriction) -> f64 {
    let k = r.size();
    if k == 0 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in bits(r.x) {
        for j in bits(r.y) {
            s += m.get(i, j);
        }
    }
    s / k as f64
}

/// Calls `f(restriction, probability)` for every restriction in the support
/// of `R`.
pub fn for_each_restriction(n: usize, mut f: impl FnMut(Restriction, f64)) -> Result<()> {
    if n > 16 {
        return Err(Error::Capacity {
            what: "restriction enumeration",
            n,
            limit: 16,
        });
    }
    let masks_by_size = masks_by_popcount(n);
    let px = 0.5f64.powi(n as i32);
    for x in 0..(1u32 << n) {
        let ys = &masks_by_size[x.count_ones() as usize];
        let w = px / ys.len() as f64;
        for &y in ys {
            f(Restriction { n, x, y }, w);
        }
    }
    Ok(())
}

fn masks_by_popcount(n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new(); n + 1];
    for m in 0..(1u32 << n) {
        out[m.count_ones() as usize].push(m);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactMoments {
    pub mean: f64,
    pub variance: f64,
}

/// `E_R[m]` and `V_R[m]` by summing over every restriction.
pub fn exact_moments(m: &CoefficientMatrix) -> Result<ExactMoments> {
    let mut terms = Vec::new();
    let mut sq = Vec::new();
    for_each_restriction(m.n, |r, w| {
        let v = restriction_mean(m, &r);
        terms.push(w * v);
        sq.push(w * v * v);
    })?;
    let mean = pairwise_sum(&terms);
    Ok(ExactMoments {
        mean,
        variance: pairwise_sum(&sq) - mean * mean,
    })
}

/// Closed-form `E_R[m]` and `V_R[m]` in terms of `c` and `Q = Σ a_ij²`,
/// using that rows and columns of `a` all sum to `2c − 1`.
pub fn closed_form_moments(m: &CoefficientMatrix) -> ExactMoments {
    let n = m.n as f64;
    let s = 2.0 * m.c - 1.0;
    let q = m.sum_sq();
    // E[(Σ_{X×Y} a)² | |X| = k] / k² is a polynomial in k:
    //   q/n² + 2(k−1)(ns² − q)/(n²(n−1)) + (k−1)²(n²s² − 2ns² + q)/(n²(n−1)²)
    let c0 = q / (n * n);
    let c1 = 2.0 * (n * s * s - q) / (n * n * (n - 1.0));
    let c2 = (n * n * s * s - 2.0 * n * s * s + q) / (n * n * (n - 1.0) * (n - 1.0));
    let e_k1 = n / 2.0 - 1.0;
    let e_k1_sq = n * (n + 1.0) / 4.0 - n + 1.0;
    let full = c0 + c1 * e_k1 + c2 * e_k1_sq;
    // Remove the k = 0 term, where m is defined as 0.
    let at_zero = c0 - c1 + c2;
    let second = full - 0.5f64.powi(m.n as i32) * at_zero;
    let mean = s / 2.0;
    ExactMoments {
        mean,
        variance: second - mean * mean,
    }
}

/// `((n+1)(1−ε) − 2(2c−1)²) / (4n(n−1))`: the variance with the `k = 0`
/// term evaluated by the same polynomial as the others.
pub fn variance_polynomial_form(n: usize, c: f64, epsilon: f64) -> f64 {
    let nf = n as f64;
    let s = 2.0 * c - 1.0;
    ((nf + 1.0) * (1.0 - epsilon) - 2.0 * s * s) / (4.0 * nf * (nf - 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub samples: u64,
    pub seed: u64,
    pub mean_hat: f64,
    pub mean_stderr: f64,
    pub mean_expected: f64,
    pub mean_ok: bool,
    pub var_hat: f64,
    pub var_stderr: f64,
    pub var_bound: f64,
    pub var_bound_ok: bool,
}

const SAMPLE_BLOCK: u64 = 4096;

/// Monte Carlo estimate of the moments of `m(X, Y)` under `R`.
pub fn moment_check(m: &CoefficientMatrix, samples: u64, seed: u64) -> Result<MomentReport> {
    if samples < 1000 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("need at least 1000, got {samples}"),
        });
    }
    let n = m.n;
    let parts: Vec<Vec<f64>> = blocks(samples, SAMPLE_BLOCK)
        .into_par_iter()
        .map(|(b, count)| {
            let mut rng = stream(seed, b);
            (0..count)
                .map(|_| restriction_mean(m, &sample_restriction(n, &mut rng)))
                .collect()
        })
        .collect();
    let values: Vec<f64> = parts.into_iter().flatten().collect();
    let (mean_hat, mean_se) = mean_stderr(&values);
    let dev: Vec<f64> = values.iter().map(|v| (v - mean_hat) * (v - mean_hat)).collect();
    let (var_hat, var_se) = mean_stderr(&dev);
    let mean_expected = m.c - 0.5;
    let var_bound = 1.0 / (2.0 * n as f64);
    Ok(MomentReport {
        samples,
        seed,
        mean_hat,
        mean_stderr: mean_se,
        mean_expected,
        mean_ok: (mean_hat - mean_expected).abs() <= 3.0 * mean_se + TOLERANCE_FLOOR,
        var_hat,
        var_stderr: var_se,
        var_bound,
        var_bound_ok: var_hat <= var_bound + 3.0 * var_se,
    })
}

/// `(g₁(π), g₂(π))` with `g₁ = Σ_{i∈X} a_{iπ(i)}` and `g₂` the rest.
pub fn decompose_g(m: &CoefficientMatrix, r: &Restriction, p: &Permutation) -> Result<(f64, f64)> {
    if p.n() != r.n || m.n != r.n {
        return Err(Error::SizeMismatch {
            left: p.n(),
            right: r.n,
        });
    }
    if !r.contains(p.images()) {
        return Err(Error::NotInRestriction);
    }
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for (i, &v) in p.images().iter().enumerate() {
        if r.x & (1 << i) != 0 {
            g1 += m.get(i, v as usize);
        } else {
            g2 += m.get(i, v as usize);
        }
    }
    Ok((g1, g2))
}

/// Tolerances used by the typicality and goodness diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GoodnessParams {
    pub epsilon: f64,
    pub c: f64,
    /// Closeness for partition goodness, `25ε^{1/7}` by default.
    pub tol_center: f64,
    /// Closeness for large and small diagonal entries, `50ε^{1/7}` by default.
    pub tol_large: f64,
}

impl GoodnessParams {
    pub fn new(epsilon: f64, c: f64) -> Self {
        GoodnessParams {
            epsilon,
            c,
            tol_center: eps_tolerance(25.0, epsilon),
            tol_large: eps_tolerance(50.0, epsilon),
        }
    }

    pub fn for_matrix(m: &CoefficientMatrix) -> Self {
        Self::new(m.epsilon, m.c)
    }

    /// `{2c, 2(1−c)}`.
    pub fn large_targets(&self) -> [f64; 2] {
        [2.0 * self.c, 2.0 * (1.0 - self.c)]
    }
}

/// Sums of `f₁` over the bijections `X → Y` and `X̄ → Ȳ`, as two value lists
/// whose pairwise sums are the values of `g(X, Y)`.
fn half_values(m: &CoefficientMatrix, xs: &[usize], ys: &[usize]) -> Vec<f64> {
    let k = xs.len();
    let mut order: Vec<u8> = (0..k as u8).collect();
    let mut out = Vec::with_capacity(factorial(k) as usize);
    loop {
        let s: f64 = xs.iter().zip(&order).map(|(&i, &o)| m.get(i, ys[o as usize])).sum();
        out.push(s);
        if !next_permutation(&mut order) {
            break;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Typicality {
    pub a_ok: bool,
    pub b_ok: bool,
    pub c_ok: bool,
    /// `Pr[|g| not ε^{1/7}-close to 1]` over `T_{X,Y}`.
    pub far_from_boolean: f64,
    pub mean_g1: f64,
    pub mean_g2: f64,
    /// `E[(|g| − 1)²]` over `T_{X,Y}`.
    pub l2_defect: f64,
    pub exact: bool,
}

impl Typicality {
    pub fn all(&self) -> bool {
        self.a_ok && self.b_ok && self.c_ok
    }
}

/// Largest `|T_{X,Y}|` handled by exact enumeration in [`typicality`].
pub const TYPICALITY_EXACT_LIMIT: u64 = 4_000_000;

/// Checks the three typicality properties of `(X, Y)`; sampled with
/// `samples` draws when `T_{X,Y}` is large.
pub fn typicality(m: &CoefficientMatrix, r: &Restriction, samples: u64, seed: u64) -> Typicality {
    let xs: Vec<usize> = bits(r.x).collect();
    let ys: Vec<usize> = bits(r.y).collect();
    let cr = r.complement();
    let xc: Vec<usize> = bits(cr.x).collect();
    let yc: Vec<usize> = bits(cr.y).collect();
    let tol = eps_tolerance(1.0, m.epsilon);
    let far_limit = m.epsilon.max(0.0).powf(4.0 / 7.0);
    let l2_limit = m
        .epsilon
        .max(0.0)
        .powf(6.0 / 7.0)
        .max(TOLERANCE_FLOOR * TOLERANCE_FLOOR);

    let exact = r.coset_size() <= TYPICALITY_EXACT_LIMIT;
    let (far, l2) = if exact {
        let v1 = half_values(m, &xs, &ys);
        let v2 = half_values(m, &xc, &yc);
        let rows: Vec<(f64, f64)> = v1
            .par_iter()
            .map(|&a| {
                let mut far = 0.0;
                let mut sq = Vec::with_capacity(v2.len());
                for &b in &v2 {
                    let d = (a + b).abs() - 1.0;
                    if d.abs() > tol {
                        far += 1.0;
                    }
                    sq.push(d * d);
                }
                (far, pairwise_sum(&sq))
            })
            .collect();
        let total = (v1.len() * v2.len()) as f64;
        let far: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let sq: Vec<f64> = rows.iter().map(|r| r.1).collect();
        (pairwise_sum(&far) / total, pairwise_sum(&sq) / total)
    } else {
        let mut rng = stream(seed, 0);
        let mut far = 0u64;
        let mut sq = Vec::with_capacity(samples as usize);
        let mut ya = ys.clone();
        let mut yb = yc.clone();
        for _ in 0..samples {
            rand::seq::SliceRandom::shuffle(ya.as_mut_slice(), &mut rng);
            rand::seq::SliceRandom::shuffle(yb.as_mut_slice(), &mut rng);
            let g: f64 = xs.iter().zip(&ya).map(|(&i, &j)| m.get(i, j)).sum::<f64>()
                + xc.iter().zip(&yb).map(|(&i, &j)| m.get(i, j)).sum::<f64>();
            let d = g.abs() - 1.0;
            if d.abs() > tol {
                far += 1;
            }
            sq.push(d * d);
        }
        let s = samples.max(1) as f64;
        (far as f64 / s, pairwise_sum(&sq) / s)
    };
    let mean_g1 = if xs.is_empty() { 0.0 } else { restriction_mean(m, r) };
    let mean_g2 = if xc.is_empty() { 0.0 } else { restriction_mean(m, &cr) };
    let center = m.c - 0.5;
    Typicality {
        a_ok: far <= far_limit,
        b_ok: (mean_g1 - center).abs() <= tol && (mean_g2 - center).abs() <= tol,
        c_ok: l2 <= l2_limit,
        far_from_boolean: far,
        mean_g1,
        mean_g2,
        l2_defect: l2,
        exact,
    }
}

/// Whether `X` is a good partition for `π`.
pub fn partition_good(m: &CoefficientMatrix, p: &Permutation, x: u32, params: &GoodnessParams) -> bool {
    let (p1, p2) = partition_sums(m, p.images(), x);
    partition_sums_good(p1, p2, params)
}

fn partition_sums(m: &CoefficientMatrix, images: &[u8], x: u32) -> (f64, f64) {
    let mut p1 = 0.0;
    let mut p2 = 0.0;
    for (i, &v) in images.iter().enumerate() {
        if x & (1 << i) != 0 {
            p1 += m.get(i, v as usize);
        } else {
            p2 += m.get(i, v as usize);
        }
    }
    (p1, p2)
}

fn partition_sums_good(p1: f64, p2: f64, params: &GoodnessParams) -> bool {
    let center = params.c - 0.5;
    let outer = [-params.c - 0.5, 1.5 - params.c];
    let tol = params.tol_center;
    let ok = |a: f64, b: f64| (a - center).abs() <= tol && distance_to_set(b, &outer) <= tol;
    ok(p1, p2) || ok(p2, p1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PermutationGoodness {
    pub fraction: f64,
    pub stderr: f64,
    pub samples: u64,
    pub is_good: bool,
}

/// Fraction of random partitions good for `π`; `partition_samples = 0`
/// enumerates all `2^n` partitions.
pub fn permutation_good(
    m: &CoefficientMatrix,
    p: &Permutation,
    params: &GoodnessParams,
    partition_samples: u64,
    seed: u64,
) -> Result<PermutationGoodness> {
    let n = m.n;
    let images = p.images();
    if partition_samples == 0 {
        if n > MAX_RANK_N {
            return Err(Error::Capacity {
                what: "exact partition enumeration",
                n,
                limit: MAX_RANK_N,
            });
        }
        let total = 1u64 << n;
        let good = (0..total as u32)
            .into_par_iter()
            .filter(|&x| {
                let (p1, p2) = partition_sums(m, images, x);
                partition_sums_good(p1, p2, params)
            })
            .count() as f64;
        let fraction = good / total as f64;
        return Ok(PermutationGoodness {
            fraction,
            stderr: 0.0,
            samples: total,
            is_good: fraction >= 0.8,
        });
    }
    if partition_samples < 100 {
        return Err(Error::InvalidParameter {
            name: "partition_samples",
            reason: format!("need at least 100, got {partition_samples}"),
        });
    }
    let mut rng = stream(seed, 0);
    let hits: Vec<f64> = (0..partition_samples)
        .map(|_| {
            let x = rng.random::<u32>() & full_mask(n);
            let (p1, p2) = partition_sums(m, images, x);
            if partition_sums_good(p1, p2, params) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let (fraction, stderr) = mean_stderr(&hits);
    Ok(PermutationGoodness {
        fraction,
        stderr,
        samples: partition_samples,
        is_good: fraction >= 0.8,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalStructure {
    pub large_count: usize,
    /// Row of the first large entry on the diagonal.
    pub large_position: Option<usize>,
    /// Largest `|a_{iπ(i)}|` among the entries that are not large.
    pub max_small: f64,
    pub conforms: bool,
}

/// Classifies the diagonal `{a_{iπ(i)}}` into large and small entries.
pub fn diagonal_structure(m: &CoefficientMatrix, p: &Permutation, params: &GoodnessParams) -> DiagonalStructure {
    let targets = params.large_targets();
    let mut large_count = 0;
    let mut large_position = None;
    let mut max_small: f64 = 0.0;
    for (i, &v) in p.images().iter().enumerate() {
        let a = m.get(i, v as usize).abs();
        if distance_to_set(a, &targets) <= params.tol_large {
            large_count += 1;
            large_position.get_or_insert(i);
        } else {
            max_small = max_small.max(a);
        }
    }
    DiagonalStructure {
        large_count,
        large_position,
        max_small,
        conforms: large_count == 1 && max_small <= params.tol_large,
    }
}
