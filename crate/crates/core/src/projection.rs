//! The coefficient matrix `a_ij`, evaluation of `f₁`, distance to `U_1`,
//! the `τ` matrix, and least-squares projections onto `U_t`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::BooleanFamily;
use crate::family::RealFunction;
use crate::numeric::{fmt17, mean_stderr, pairwise_sum};
use crate::perm::{factorial, for_each_in_range, map_chunks, Permutation, MAX_DENSE_N};
use crate::rng::{blocks, random_images, stream};

/// Default Monte Carlo sample count for `ε` above the dense limit.
pub const DEFAULT_EPSILON_SAMPLES: u64 = 1_000_000;

const MC_BLOCK: u64 = 8192;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpsilonKind {
    Exact,
    MonteCarlo { stderr: f64, samples: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct EpsilonOptions {
    pub samples: u64,
    pub seed: u64,
}

impl Default for EpsilonOptions {
    fn default() -> Self {
        EpsilonOptions {
            samples: DEFAULT_EPSILON_SAMPLES,
            seed: 0,
        }
    }
}

/// `a_ij = (n−1)⟨f,T_ij⟩ − ((n−2)/n)(2c−1)` together with `c` and `ε`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientMatrix {
    pub n: usize,
    #[serde(serialize_with = "serialize_rows")]
    pub a: Vec<f64>,
    pub c: f64,
    pub epsilon: f64,
    pub epsilon_kind: EpsilonKind,
}

fn serialize_rows<S: serde::Serializer>(a: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let n = (a.len() as f64).sqrt().round() as usize;
    let rows: Vec<&[f64]> = a.chunks(n.max(1)).collect();
    rows.serialize(s)
}

impl CoefficientMatrix {
    /// Builds a matrix from raw entries; `ε` is taken as given.
    pub fn from_entries(n: usize, a: Vec<f64>, c: f64, epsilon: f64, epsilon_kind: EpsilonKind) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::SizeMismatch {
                left: a.len(),
                right: n * n,
            });
        }
        Ok(CoefficientMatrix {
            n,
            a,
            c,
            epsilon,
            epsilon_kind,
        })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn sum_sq(&self) -> f64 {
        let sq: Vec<f64> = self.a.iter().map(|x| x * x).collect();
        pairwise_sum(&sq)
    }

    pub fn transpose(&self) -> CoefficientMatrix {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[j * n + i] = self.a[i * n + j];
            }
        }
        CoefficientMatrix { a, ..self.clone() }
    }

    /// Row-major CSV, 17 significant digits.
    pub fn to_csv(&self) -> String {
        matrix_csv(self.n, &self.a)
    }
}

pub(crate) fn matrix_csv(n: usize, a: &[f64]) -> String {
    let mut out = String::new();
    for row in a.chunks(n) {
        let cells: Vec<String> = row.iter().map(|&x| fmt17(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `τ_ij = |F ∩ T_ij| / (n−1)!`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauMatrix {
    pub n: usize,
    #[serde(serialize_with = "serialize_rows")]
    pub tau: Vec<f64>,
}

impl TauMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.tau[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn to_csv(&self) -> String {
        matrix_csv(self.n, &self.tau)
    }
}

/// `γ = 2c` for `c < 1/2`, `2c − 1` otherwise.
pub fn gamma(c: f64) -> f64 {
    if c < 0.5 {
        2.0 * c
    } else {
        2.0 * c - 1.0
    }
}

pub fn tau_matrix(family: &BooleanFamily) -> TauMatrix {
    let n = family.n();
    let denom = factorial(n - 1) as f64;
    let tau = family.coset_counts().into_iter().map(|k| k as f64 / denom).collect();
    TauMatrix { n, tau }
}

/// `τ_ij = (2(n−2)c + 1)/(2(n−1)) + n/(2(n−1)) · a_ij`.
pub fn tau_from_a(m: &CoefficientMatrix) -> TauMatrix {
    let n = m.n as f64;
    let base = (2.0 * (n - 2.0) * m.c + 1.0) / (2.0 * (n - 1.0));
    let scale = n / (2.0 * (n - 1.0));
    TauMatrix {
        n: m.n,
        tau: m.a.iter().map(|&a| base + scale * a).collect(),
    }
}

/// Entries of the coefficient matrix from `τ` and `c`.
pub(crate) fn entries_from_tau(n: usize, tau: &[f64], c: f64) -> Vec<f64> {
    let nf = n as f64;
    let shift = (nf - 2.0) / nf * (2.0 * c - 1.0);
    tau.iter()
        .map(|&t| {
            let ip = (2.0 * t - 1.0) / nf;
            (nf - 1.0) * ip - shift
        })
        .collect()
}

/// Coefficient matrix with `ε` computed by [`distance_to_u1`].
pub fn coefficient_matrix(family: &BooleanFamily) -> Result<CoefficientMatrix> {
    coefficient_matrix_with(family, EpsilonOptions::default())
}

pub fn coefficient_matrix_with(family: &BooleanFamily, opts: EpsilonOptions) -> Result<CoefficientMatrix> {
    let mut m = coefficient_matrix_only(family);
    let (eps, kind) = epsilon_for(family, &m, opts)?;
    m.epsilon = eps;
    m.epsilon_kind = kind;
    Ok(m)
}

/// Coefficient matrix without computing `ε` (left at 0, kind exact).
pub fn coefficient_matrix_only(family: &BooleanFamily) -> CoefficientMatrix {
    let n = family.n();
    let c = family.density();
    let tau = tau_matrix(family);
    CoefficientMatrix {
        n,
        a: entries_from_tau(n, &tau.tau, c),
        c,
        epsilon: 0.0,
        epsilon_kind: EpsilonKind::Exact,
    }
}

/// `f₁(π) = Σ_i a_{iπ(i)}`.
pub fn evaluate_f1(m: &CoefficientMatrix, p: &Permutation) -> f64 {
    evaluate_f1_images(m, p.images())
}

#[inline]
pub fn evaluate_f1_images(m: &CoefficientMatrix, images: &[u8]) -> f64 {
    images.iter().enumerate().map(|(i, &v)| m.a[i * m.n + v as usize]).sum()
}

/// `ε = E[(f − f₁)²]`.
pub fn distance_to_u1(family: &BooleanFamily) -> Result<(f64, EpsilonKind)> {
    distance_to_u1_with(family, EpsilonOptions::default())
}

pub fn distance_to_u1_with(family: &BooleanFamily, opts: EpsilonOptions) -> Result<(f64, EpsilonKind)> {
    let m = coefficient_matrix_only(family);
    epsilon_for(family, &m, opts)
}

fn epsilon_for(family: &BooleanFamily, m: &CoefficientMatrix, opts: EpsilonOptions) -> Result<(f64, EpsilonKind)> {
    let n = family.n();
    if n <= MAX_DENSE_N {
        let parts = map_chunks(n, |start, end| {
            let mut acc = Vec::with_capacity((end - start) as usize);
            for_each_in_range(n, start, end, |r, p| {
                let f = if family.contains_ranked(r, p) { 1.0 } else { -1.0 };
                let d = f - evaluate_f1_images(m, p);
                acc.push(d * d);
            });
            pairwise_sum(&acc)
        });
        return Ok((pairwise_sum(&parts) / factorial(n) as f64, EpsilonKind::Exact));
    }
    if opts.samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "at least 2 samples are needed for a Monte Carlo estimate".into(),
        });
    }
    let parts: Vec<Vec<f64>> = blocks(opts.samples, MC_BLOCK)
        .into_par_iter()
        .map(|(b, count)| {
            let mut rng = stream(opts.seed, b);
            (0..count)
                .map(|_| {
                    let p = random_images(n, &mut rng);
                    let f = if family.contains_images(&p) { 1.0 } else { -1.0 };
                    let d = f - evaluate_f1_images(m, &p);
                    d * d
                })
                .collect()
        })
        .collect();
    let samples: Vec<f64> = parts.into_iter().flatten().collect();
    let (mean, stderr) = mean_stderr(&samples);
    Ok((
        mean,
        EpsilonKind::MonteCarlo {
            stderr,
            samples: opts.samples,
        },
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    /// `max_i |Σ_j a_ij − (2c−1)|`.
    pub row_sum: f64,
    /// `max_j |Σ_i a_ij − (2c−1)|`.
    pub column_sum: f64,
    /// `|Σ a_ij² − ((n−1)(1−ε) − (n−2)(2c−1)²)|`.
    pub sum_of_squares: f64,
    /// `max |a_ij|`, reported rather than asserted for general `c`.
    pub max_abs_entry: f64,
}

impl IdentityReport {
    pub fn max_violation(&self) -> f64 {
        self.row_sum.max(self.column_sum).max(self.sum_of_squares)
    }
}

pub fn verify_identities(m: &CoefficientMatrix) -> Result<IdentityReport> {
    if m.epsilon_kind != EpsilonKind::Exact {
        return Err(Error::InvalidParameter {
            name: "epsilon_kind",
            reason: "identities need an exact epsilon".into(),
        });
    }
    let n = m.n;
    let s = 2.0 * m.c - 1.0;
    let mut row_sum: f64 = 0.0;
    let mut column_sum: f64 = 0.0;
    for k in 0..n {
        let r = pairwise_sum(m.row(k));
        let col: Vec<f64> = (0..n).map(|i| m.get(i, k)).collect();
        row_sum = row_sum.max((r - s).abs());
        column_sum = column_sum.max((pairwise_sum(&col) - s).abs());
    }
    let nf = n as f64;
    let expected = (nf - 1.0) * (1.0 - m.epsilon) - (nf - 2.0) * s * s;
    Ok(IdentityReport {
        row_sum,
        column_sum,
        sum_of_squares: (m.sum_sq() - expected).abs(),
        max_abs_entry: m.a.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())),
    })
}

/// Index of the ordered `t`-tuples `(I, J)` spanning `U_t`.
struct TupleBasis {
    n: usize,
    t: usize,
    ordered: Vec<Vec<u8>>,
    tuples: Vec<(Vec<u8>, Vec<u8>)>,
}

impl TupleBasis {
    fn new(n: usize, t: usize) -> Self {
        let ordered = ordered_tuples(n, t);
        let mut tuples = Vec::with_capacity(ordered.len() * ordered.len());
        for i in &ordered {
            for j in &ordered {
                tuples.push((i.clone(), j.clone()));
            }
        }
        TupleBasis { n, t, ordered, tuples }
    }

    fn len(&self) -> usize {
        self.tuples.len()
    }

    /// Position of `(I, J)` in the basis.
    fn index(&self, i: &[u8], j: &[u8]) -> usize {
        tuple_index(self.n, i) * self.ordered.len() + tuple_index(self.n, j)
    }

    /// `⟨T_IJ, T_KL⟩ = |T_IJ ∩ T_KL| / n!`.
    fn gram(&self, a: usize, b: usize) -> f64 {
        let (i1, j1) = &self.tuples[a];
        let (i2, j2) = &self.tuples[b];
        let mut map = [u8::MAX; 32];
        let mut used = 0u32;
        let mut fixed = 0usize;
        for (&x, &y) in i1.iter().zip(j1).chain(i2.iter().zip(j2)) {
            if map[x as usize] == u8::MAX {
                if used & (1 << y) != 0 {
                    return 0.0;
                }
                map[x as usize] = y;
                used |= 1 << y;
                fixed += 1;
            } else if map[x as usize] != y {
                return 0.0;
            }
        }
        factorial(self.n - fixed) as f64 / factorial(self.n) as f64
    }

    /// Calls `f(index)` for every basis tuple containing `images`.
    fn for_each_member(&self, images: &[u8], mut f: impl FnMut(usize)) {
        let mut j = vec![0u8; self.t];
        for i in &self.ordered {
            for (k, &x) in i.iter().enumerate() {
                j[k] = images[x as usize];
            }
            f(self.index(i, &j));
        }
    }
}

fn ordered_tuples(n: usize, t: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn rec(n: usize, t: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for x in 0..n as u8 {
            if !cur.contains(&x) {
                cur.push(x);
                rec(n, t, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, t, &mut cur, &mut out);
    out
}

fn tuple_index(n: usize, tuple: &[u8]) -> usize {
    // Matches the enumeration order of `ordered_tuples`.
    let mut idx = 0usize;
    let mut avail: Vec<u8> = (0..n as u8).collect();
    for (k, &x) in tuple.iter().enumerate() {
        let pos = avail.iter().position(|&v| v == x).expect("distinct entries");
        let remaining = n - k - 1;
        let mut block = 1usize;
        for r in 0..(tuple.len() - k - 1) {
            block *= remaining - r;
        }
        idx += pos * block;
        avail.remove(pos);
    }
    idx
}

/// Ridge added to the Gram matrix of the spanning set.
pub const PROJECTION_RIDGE: f64 = 1e-12;

/// Least-squares projection of `f` onto `U_t = span{T_IJ : |I| = |J| = t}`.
pub fn project_ut(f: &RealFunction, t: usize) -> Result<RealFunction> {
    let n = f.n();
    if t > 2 {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("projection supports t ≤ 2, got {t}"),
        });
    }
    if t == 2 && n > 7 {
        return Err(Error::Capacity {
            what: "U_2 projection",
            n,
            limit: 7,
        });
    }
    if t == 0 || t >= n {
        if t == 0 {
            return RealFunction::constant(n, f.mean());
        }
        return Ok(f.clone());
    }
    let basis = TupleBasis::new(n, t);
    let size = basis.len();
    let nfact = factorial(n) as f64;

    let parts = map_chunks(n, |start, end| {
        let mut b = vec![0.0; size];
        for_each_in_range(n, start, end, |r, p| {
            let v = f.values()[r as usize];
            basis.for_each_member(p, |k| b[k] += v);
        });
        b
    });
    let mut rhs = DVector::zeros(size);
    for k in 0..size {
        let col: Vec<f64> = parts.iter().map(|b| b[k]).collect();
        rhs[k] = pairwise_sum(&col) / nfact;
    }

    let gram = DMatrix::from_fn(size, size, |a, b| {
        basis.gram(a, b) + if a == b { PROJECTION_RIDGE } else { 0.0 }
    });
    let coeffs = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::InvalidParameter {
                name: "gram",
                reason: e.to_string(),
            })?,
    };

    RealFunction::from_fn(n, |_, p| {
        let mut acc = 0.0;
        basis.for_each_member(p, |k| acc += coeffs[k]);
        acc
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Degree {
    Exactly(usize),
    AboveTwo,
}

/// Smallest `t ≤ 2` with `‖f − P_t f‖₂ ≤ tol`.
pub fn degree(f: &RealFunction, tol: Option<f64>) -> Result<Degree> {
    let n = f.n();
    if n > 7 {
        return Err(Error::Capacity {
            what: "degree",
            n,
            limit: 7,
        });
    }
    let tol = tol.unwrap_or(1e-6 * f.norm_sq().sqrt());
    for t in 0..=2 {
        let proj = project_ut(f, t)?;
        if f.sub(&proj)?.norm_sq().sqrt() <= tol {
            return Ok(Degree::Exactly(t));
        }
    }
    Ok(Degree::AboveTwo)
}

/// Materializes `f₁ = Σ a_ij T_ij` as a dense function.
pub fn f1_function(m: &CoefficientMatrix) -> Result<RealFunction> {
    RealFunction::from_fn(m.n, |_, p| evaluate_f1_images(m, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Line;
    use crate::perm::enumerate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_family(n: usize, rng: &mut ChaCha8Rng) -> BooleanFamily {
        let p: f64 = rng.random_range(0.05..0.95);
        let ranks: Vec<u64> = (0..factorial(n)).filter(|_| rng.random_bool(p)).collect();
        BooleanFamily::from_ranks(n, ranks).unwrap()
    }

    #[test]
    fn half_dictatorship_entries_at_n4() {
        let f = BooleanFamily::dictatorship(4, Line::row(0), [0, 1]).unwrap();
        let m = coefficient_matrix(&f).unwrap();
        for j in 0..4 {
            let sign = if j < 2 { 1.0 } else { -1.0 };
            assert!((m.get(0, j) - sign * 0.75).abs() < 1e-12);
            for i in 1..4 {
                assert!((m.get(i, j) + sign * 0.25).abs() < 1e-12);
            }
        }
        assert!(m.epsilon.abs() < 1e-12);
        assert!((m.sum_sq() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_families() {
        for n in 3..=6 {
            let e = coefficient_matrix(&BooleanFamily::empty(n).unwrap()).unwrap();
            let f = coefficient_matrix(&BooleanFamily::full(n).unwrap()).unwrap();
            for k in 0..n * n {
                assert!((e.a[k] + 1.0 / n as f64).abs() < 1e-12);
                assert!((f.a[k] - 1.0 / n as f64).abs() < 1e-12);
            }
            assert!(e.epsilon.abs() < 1e-12);
            assert!((e.sum_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn f1_equals_f_on_dictatorships() {
        let f = BooleanFamily::dictatorship(4, Line::column(2), [1, 3]).unwrap();
        let m = coefficient_matrix(&f).unwrap();
        for p in enumerate(4).unwrap() {
            let want = if f.contains(&p) { 1.0 } else { -1.0 };
            assert!((evaluate_f1(&m, &p) - want).abs() < 1e-12);
        }
        let zero = CoefficientMatrix::from_entries(4, vec![0.0; 16], 0.5, 0.0, EpsilonKind::Exact).unwrap();
        assert_eq!(evaluate_f1(&zero, &Permutation::identity(4)), 0.0);
    }

    #[test]
    fn mean_of_f1_is_2c_minus_1() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_family(5, &mut rng);
        let m = coefficient_matrix(&f).unwrap();
        let g = f1_function(&m).unwrap();
        assert!((g.mean() - (2.0 * f.density() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn alternating_group_is_orthogonal() {
        let f = BooleanFamily::from_predicate(4, |p| crate::perm::sign_of(p) == 1).unwrap();
        let (eps, kind) = distance_to_u1(&f).unwrap();
        assert_eq!(kind, EpsilonKind::Exact);
        assert!((eps - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identities_on_random_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 4..=6 {
            for _ in 0..5 {
                let f = random_family(n, &mut rng);
                let m = coefficient_matrix(&f).unwrap();
                let rep = verify_identities(&m).unwrap();
                assert!(rep.max_violation() < 1e-9, "{rep:?}");
                let f1 = f1_function(&m).unwrap();
                assert!((f1.norm_sq() + m.epsilon - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn complement_negates_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_family(5, &mut rng);
        let m = coefficient_matrix(&f).unwrap();
        let mc = coefficient_matrix(&f.complement()).unwrap();
        for k in 0..25 {
            assert!((m.a[k] + mc.a[k]).abs() < 1e-12);
        }
        assert!((m.epsilon - mc.epsilon).abs() < 1e-12);
    }

    #[test]
    fn tau_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [4, 5, 6] {
            let f = random_family(n, &mut rng);
            let m = coefficient_matrix_only(&f);
            let t1 = tau_matrix(&f);
            let t2 = tau_from_a(&m);
            for k in 0..n * n {
                assert!((t1.tau[k] - t2.tau[k]).abs() < 1e-9);
                assert!((t1.tau[k] - (m.a[k] / 2.0 + m.c)).abs() <= 2.0 / n as f64 + 1e-12);
            }
            for i in 0..n {
                let s: f64 = t1.row(i).iter().sum();
                assert!((s - m.c * n as f64).abs() < 1e-9);
            }
        }
        let t = tau_matrix(&BooleanFamily::dictatorship(5, Line::row(0), [0]).unwrap());
        assert_eq!(t.get(0, 0), 1.0);
        assert_eq!(t.get(0, 3), 0.0);
        assert!((t.get(2, 1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_epsilon_above_dense_limit() {
        let f = BooleanFamily::dictatorship(10, Line::row(3), [0, 4, 7]).unwrap();
        let (eps, kind) = distance_to_u1_with(&f, EpsilonOptions { samples: 2000, seed: 1 }).unwrap();
        assert!(eps < 1e-20);
        assert!(matches!(kind, EpsilonKind::MonteCarlo { samples: 2000, .. }));
    }

    #[test]
    fn tuple_index_is_enumeration_order() {
        for t in 1..=3 {
            for (k, tup) in ordered_tuples(5, t).iter().enumerate() {
                assert_eq!(tuple_index(5, tup), k);
            }
        }
    }

    #[test]
    fn projection_matches_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let fam = random_family(5, &mut rng);
        let f = RealFunction::signed_indicator(&fam).unwrap();
        let p = project_ut(&f, 1).unwrap();
        let m = coefficient_matrix(&fam).unwrap();
        let q = f1_function(&m).unwrap();
        for (a, b) in p.values().iter().zip(q.values()) {
            assert!((a - b).abs() < 1e-8);
        }
        let pp = project_ut(&p, 1).unwrap();
        for (a, b) in p.values().iter().zip(pp.values()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn sign_projects_to_zero() {
        let sgn = RealFunction::sign_function(4).unwrap();
        let p = project_ut(&sgn, 1).unwrap();
        assert!(p.values().iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn degrees() {
        assert_eq!(
            degree(&RealFunction::constant(5, 2.0).unwrap(), None).unwrap(),
            Degree::Exactly(0)
        );
        let t11 = RealFunction::coset_indicator(5, 0, 0).unwrap();
        assert_eq!(degree(&t11, None).unwrap(), Degree::Exactly(1));
        let t2 = RealFunction::tuple_coset_indicator(5, &[0, 1], &[0, 1]).unwrap();
        assert_eq!(degree(&t2, None).unwrap(), Degree::Exactly(2));
        assert_eq!(
            degree(&RealFunction::sign_function(5).unwrap(), None).unwrap(),
            Degree::AboveTwo
        );
    }
}
