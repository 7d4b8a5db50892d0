//! 0/1 permanents and good-diagonal counting on large/small indicator
//! matrices.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::factorial;
use crate::rng::stream;

/// Largest size for which permanents are computed exactly.
pub const MAX_EXACT_M: usize = 14;

/// Square boolean matrix with one `u64` bitmask per row (`m ≤ 64`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    m: usize,
    rows: Vec<u64>,
}

impl BoolMatrix {
    pub fn new(m: usize) -> Self {
        assert!(m <= 64, "BoolMatrix supports m ≤ 64");
        BoolMatrix { m, rows: vec![0; m] }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut out = BoolMatrix::new(m);
        for i in 0..m {
            for j in 0..m {
                if f(i, j) {
                    out.rows[i] |= 1 << j;
                }
            }
        }
        out
    }

    /// Row-major bits, `bits >> (i·m + j) & 1` for entry `(i, j)`.
    pub fn from_bits(m: usize, bits: u64) -> Self {
        Self::from_fn(m, |i, j| bits >> (i * m + j) & 1 == 1)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn row_mask(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn column_count(&self, j: usize) -> usize {
        self.rows.iter().filter(|r| *r >> j & 1 == 1).count()
    }

    fn full_mask(&self) -> u64 {
        if self.m == 64 {
            u64::MAX
        } else {
            (1u64 << self.m) - 1
        }
    }

    /// Entrywise complement.
    pub fn complement(&self) -> BoolMatrix {
        let full = self.full_mask();
        BoolMatrix {
            m: self.m,
            rows: self.rows.iter().map(|r| !r & full).collect(),
        }
    }

    pub fn transpose(&self) -> BoolMatrix {
        BoolMatrix::from_fn(self.m, |i, j| self.get(j, i))
    }

    /// The submatrix on rows `xs` and columns `ys`, in the given orders.
    pub fn submatrix(&self, xs: &[usize], ys: &[usize]) -> BoolMatrix {
        assert_eq!(xs.len(), ys.len());
        BoolMatrix::from_fn(xs.len(), |a, b| self.get(xs[a], ys[b]))
    }

    /// Removes row `i` and column `j`.
    pub fn minor(&self, i: usize, j: usize) -> BoolMatrix {
        let xs: Vec<usize> = (0..self.m).filter(|&r| r != i).collect();
        let ys: Vec<usize> = (0..self.m).filter(|&c| c != j).collect();
        self.submatrix(&xs, &ys)
    }
}

/// Permanent of a 0/1 matrix by Ryser's formula over a Gray code,
/// `perm(A) = (−1)^m Σ_S (−1)^{|S|} Π_i Σ_{j∈S} a_ij`.
pub fn permanent(a: &BoolMatrix) -> Result<u128> {
    let m = a.size();
    if m > MAX_EXACT_M {
        return Err(Error::Capacity {
            what: "exact permanent",
            n: m,
            limit: MAX_EXACT_M,
        });
    }
    if m == 0 {
        return Ok(1);
    }
    let mut sums = vec![0i64; m];
    let mut total: i128 = 0;
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << m) {
        let col = k.trailing_zeros() as usize;
        gray ^= 1 << col;
        let added = gray >> col & 1 == 1;
        for (i, s) in sums.iter_mut().enumerate() {
            if a.get(i, col) {
                *s += if added { 1 } else { -1 };
            }
        }
        let mut prod: i128 = 1;
        for &s in &sums {
            prod *= s as i128;
            if prod == 0 {
                break;
            }
        }
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if m % 2 == 1 {
        total = -total;
    }
    Ok(total as u128)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagonalFraction {
    pub value: f64,
    pub stderr: f64,
    pub exact: bool,
}

/// Number of generalized diagonals of `large` with exactly one large entry:
/// `Σ_{(i,j) large} perm(small with row i and column j removed)`.
pub fn good_diagonal_count(large: &BoolMatrix) -> Result<u128> {
    let m = large.size();
    if m > MAX_EXACT_M {
        return Err(Error::Capacity {
            what: "exact diagonal count",
            n: m,
            limit: MAX_EXACT_M,
        });
    }
    let small = large.complement();
    let mut total = 0u128;
    for i in 0..m {
        for j in 0..m {
            if large.get(i, j) {
                total += permanent(&small.minor(i, j))?;
            }
        }
    }
    Ok(total)
}

/// Fraction of generalized diagonals with exactly one large entry; exact up
/// to [`MAX_EXACT_M`], sampled with `samples` draws above.
pub fn good_diagonal_fraction(large: &BoolMatrix, samples: u64, seed: u64) -> DiagonalFraction {
    let m = large.size();
    if m == 0 {
        return DiagonalFraction {
            value: 0.0,
            stderr: 0.0,
            exact: true,
        };
    }
    if m <= MAX_EXACT_M {
        let count = good_diagonal_count(large).expect("within exact limit");
        return DiagonalFraction {
            value: count as f64 / factorial(m) as f64,
            stderr: 0.0,
            exact: true,
        };
    }
    good_diagonal_fraction_sampled(large, samples, seed)
}

/// Monte Carlo estimate of the good-diagonal fraction.
pub fn good_diagonal_fraction_sampled(large: &BoolMatrix, samples: u64, seed: u64) -> DiagonalFraction {
    let m = large.size();
    let mut rng = stream(seed, m as u64);
    let mut order: Vec<usize> = (0..m).collect();
    let mut good = 0u64;
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let hits = order.iter().enumerate().filter(|&(i, &j)| large.get(i, j)).count();
        if hits == 1 {
            good += 1;
        }
    }
    let s = samples.max(1) as f64;
    let p = good as f64 / s;
    DiagonalFraction {
        value: p,
        stderr: (p * (1.0 - p) / s).sqrt(),
        exact: false,
    }
}

/// Fraction of the diagonals through `(i, j)` that are good.
pub fn good_fraction_through(large: &BoolMatrix, i: usize, j: usize, samples: u64, seed: u64) -> DiagonalFraction {
    let minor = large.minor(i, j);
    if large.get(i, j) {
        let m = minor.size();
        if m <= MAX_EXACT_M {
            let count = permanent(&minor.complement()).expect("within exact limit");
            return DiagonalFraction {
                value: count as f64 / factorial(m) as f64,
                stderr: 0.0,
                exact: true,
            };
        }
        let mut rng = stream(seed, m as u64);
        let mut order: Vec<usize> = (0..m).collect();
        let mut good = 0u64;
        for _ in 0..samples {
            order.shuffle(&mut rng);
            if !order.iter().enumerate().any(|(a, &b)| minor.get(a, b)) {
                good += 1;
            }
        }
        let s = samples.max(1) as f64;
        let p = good as f64 / s;
        DiagonalFraction {
            value: p,
            stderr: (p * (1.0 - p) / s).sqrt(),
            exact: false,
        }
    } else {
        good_diagonal_fraction(&minor, samples, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_permanent(a: &BoolMatrix) -> u128 {
        let m = a.size();
        crate::perm::enumerate(m)
            .unwrap()
            .filter(|p| (0..m).all(|i| a.get(i, p.apply(i))))
            .count() as u128
    }

    #[test]
    fn permanent_of_all_ones_is_factorial() {
        for m in 0..=10 {
            let a = BoolMatrix::from_fn(m, |_, _| true);
            assert_eq!(permanent(&a).unwrap(), factorial(m) as u128);
        }
        assert_eq!(permanent(&BoolMatrix::from_fn(5, |i, j| i == j)).unwrap(), 1);
        assert_eq!(permanent(&BoolMatrix::new(5)).unwrap(), 0);
    }

    #[test]
    fn permanent_matches_enumeration() {
        let mut rng = stream(1, 0);
        for m in 1..=7 {
            for _ in 0..20 {
                let a = BoolMatrix::from_fn(m, |_, _| rand::Rng::random_bool(&mut rng, 0.6));
                assert_eq!(permanent(&a).unwrap(), brute_permanent(&a));
            }
        }
    }

    #[test]
    fn permanent_counts_derangements() {
        // Derangements of 14: 32071101049.
        let a = BoolMatrix::from_fn(14, |i, j| i != j);
        assert_eq!(permanent(&a).unwrap(), 32_071_101_049);
        assert!(permanent(&BoolMatrix::new(15)).is_err());
    }

    #[test]
    fn simple_fractions() {
        let one = BoolMatrix::from_fn(6, |i, j| i == 0 && j == 0);
        assert!((good_diagonal_fraction(&one, 0, 0).value - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(good_diagonal_fraction(&BoolMatrix::new(6), 0, 0).value, 0.0);
        let row = BoolMatrix::from_fn(6, |i, _| i == 2);
        assert_eq!(good_diagonal_fraction(&row, 0, 0).value, 1.0);
        assert_eq!(good_fraction_through(&row, 2, 4, 0, 0).value, 1.0);
        assert_eq!(good_fraction_through(&one, 1, 1, 0, 0).value, 1.0 / 5.0);
    }

    #[test]
    fn sampled_fraction_is_close() {
        let row = BoolMatrix::from_fn(20, |i, j| i == 0 || (i == 3 && j == 7));
        let est = good_diagonal_fraction(&row, 20_000, 3);
        assert!(!est.exact);
        assert!((est.value - (1.0 - 1.0 / 20.0)).abs() < 4.0 * est.stderr.max(1e-3));
    }
}
