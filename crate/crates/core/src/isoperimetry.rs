//! Edge boundaries in the transposition Cayley graph, the isoperimetric
//! bound `|∂A| ≥ (1 − c) n |A|`, its stability chain, and the
//! lexicographic-segment scanner.
//!
//! Neighbors are `τ ∘ σ` for transpositions `τ`, matching
//! [`Permutation::transposition_neighbors`](crate::perm::Permutation::transposition_neighbors).

use std::collections::{BTreeSet, HashSet};

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{BooleanFamily, Repr};
use crate::numeric::fmt17;
use crate::perm::{
    check_dense_n, factorial, for_each_in_range, for_each_transposition_neighbor, map_chunks, rank_of, unrank_into,
};
use crate::projection::{distance_to_u1_with, EpsilonKind, EpsilonOptions};
use crate::recovery::{recover, RecoveryParams, RecoveryResult};
use crate::rng::stream;

/// Degree of every vertex, `n(n − 1)/2`.
pub fn degree(n: usize) -> u64 {
    (n * n.saturating_sub(1) / 2) as u64
}

/// Number of edges between `F` and its complement.
///
/// Exact symbolic dictatorships use `|F|(n − |S|)`; exceptions are applied
/// one vertex at a time, so symbolic families work up to the rank limit.
pub fn edge_boundary(family: &BooleanFamily) -> Result<u128> {
    let n = family.n();
    match family.repr() {
        Repr::Explicit(bits) => {
            let deg = degree(n);
            let parts = map_chunks(n, |start, end| {
                let mut acc = 0u64;
                for_each_in_range(n, start, end, |r, p| {
                    if bits.get(r as usize) {
                        let mut inside = 0u64;
                        for_each_transposition_neighbor(p, |q| {
                            if bits.get(rank_of(q) as usize) {
                                inside += 1;
                            }
                        });
                        acc += deg - inside;
                    }
                });
                acc
            });
            Ok(parts.into_iter().map(u128::from).sum())
        }
        Repr::Symbolic(s) => {
            let cosets = &s.cosets;
            let base = cosets.size(n) as u128 * (n - cosets.members().len()) as u128;
            if s.added.is_empty() && s.removed.is_empty() {
                return Ok(base);
            }
            // Toggle exceptions into the bare coset union one at a time.
            let deg = degree(n) as i128;
            let mut toggled: HashSet<u64> = HashSet::new();
            let mut boundary = base as i128;
            let mut buf = vec![0u8; n];
            for &r in s.removed.iter().chain(s.added.iter()) {
                unrank_into(r, &mut buf);
                let mut inside = 0i128;
                for_each_transposition_neighbor(&buf, |q| {
                    let in_current = cosets.contains(q) ^ toggled.contains(&rank_of(q));
                    if in_current {
                        inside += 1;
                    }
                });
                if cosets.contains(&buf) {
                    boundary -= deg - 2 * inside;
                } else {
                    boundary += deg - 2 * inside;
                }
                toggled.insert(r);
            }
            Ok(boundary as u128)
        }
    }
}

/// Edges with both ends in `F`.
pub fn internal_edges(family: &BooleanFamily) -> Result<u128> {
    let total = family.size() as u128 * degree(family.n()) as u128;
    Ok((total - edge_boundary(family)?) / 2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub n: usize,
    pub size: u64,
    pub boundary: u128,
    /// `(1 − c) n |F|`.
    pub bound: f64,
    pub slack: f64,
    /// Defined by `|∂F| = (1 − c + δ₀) n |F|`; 0 for the empty family.
    pub delta0: f64,
    /// `|∂F| = (1 − c) n |F|`, decided in integers.
    pub equality: bool,
    pub epsilon: f64,
    pub epsilon_kind: EpsilonKind,
    /// Whether `equality` matches `ε = 0`.
    pub consistent: bool,
}

/// `n!·(|∂F| − (1 − c) n |F|) = n!·|∂F| − (n! − |F|) n |F|`, when it fits.
fn exact_slack(n: usize, size: u64, boundary: u128) -> Option<i128> {
    let total = factorial(n) as i128;
    let lhs = (boundary as i128).checked_mul(total)?;
    let rhs = (total - size as i128)
        .checked_mul(n as i128)?
        .checked_mul(size as i128)?;
    lhs.checked_sub(rhs)
}

pub fn diaconis_check(family: &BooleanFamily) -> Result<BoundaryReport> {
    diaconis_check_with(family, EpsilonOptions::default())
}

pub fn diaconis_check_with(family: &BooleanFamily, opts: EpsilonOptions) -> Result<BoundaryReport> {
    let n = family.n();
    let size = family.size();
    let boundary = edge_boundary(family)?;
    let c = family.density();
    let bound = (1.0 - c) * n as f64 * size as f64;
    let (slack, equality) = match exact_slack(n, size, boundary) {
        Some(num) => (num as f64 / factorial(n) as f64, num == 0),
        None => {
            let s = boundary as f64 - bound;
            (s, s.abs() <= 1e-6)
        }
    };
    let delta0 = if size == 0 {
        0.0
    } else {
        slack / (n as f64 * size as f64)
    };
    let (epsilon, epsilon_kind) = distance_to_u1_with(family, opts)?;
    let eps_zero = match epsilon_kind {
        EpsilonKind::Exact => epsilon <= 1e-9,
        EpsilonKind::MonteCarlo { stderr, .. } => epsilon <= 4.0 * stderr + 1e-9,
    };
    Ok(BoundaryReport {
        n,
        size,
        boundary,
        bound,
        slack,
        delta0,
        equality,
        epsilon,
        epsilon_kind,
        consistent: equality == eps_zero,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoStability {
    pub report: BoundaryReport,
    pub delta0: f64,
    /// `E[(f − f₁)²]` for `f = 2χ − 1`.
    pub eps_signed: f64,
    /// `E[(χ − χ₁)²] = ε/4`.
    pub eps_indicator: f64,
    /// `n/(n − 2) · c · δ₀`, compared against `eps_indicator`.
    pub eps_bound: f64,
    pub chain_ok: bool,
    pub recovery: Option<RecoveryResult>,
    pub recovery_error: Option<String>,
}

/// Boundary report, the stability inequality in the 0/1 convention, and a
/// recovery run.
pub fn iso_stability(family: &BooleanFamily, params: &RecoveryParams) -> Result<IsoStability> {
    let n = family.n();
    if n < 3 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("the stability bound needs n ≥ 3, got {n}"),
        });
    }
    let report = diaconis_check_with(
        family,
        EpsilonOptions {
            samples: params.samples,
            seed: params.seed,
        },
    )?;
    let c = family.density();
    let eps_indicator = report.epsilon / 4.0;
    let eps_bound = n as f64 / (n as f64 - 2.0) * c * report.delta0;
    let (recovery, recovery_error) = match recover(family, params) {
        Ok(r) => (Some(r), None),
        Err(e @ (Error::NoStrongLine { .. } | Error::LineConflict { .. } | Error::MediumValueCluster { .. })) => {
            (None, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    Ok(IsoStability {
        delta0: report.delta0,
        eps_signed: report.epsilon,
        eps_indicator,
        eps_bound,
        chain_ok: eps_indicator <= eps_bound + 1e-9,
        report,
        recovery,
        recovery_error,
    })
}

/// The `k` lexicographically smallest permutations.
pub fn lex_segment(n: usize, k: u64) -> Result<BooleanFamily> {
    let total = factorial(n);
    if k > total {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("must be at most {n}! = {total}, got {k}"),
        });
    }
    BooleanFamily::from_ranks(n, 0..k)
}

/// Neighbor ranks of every vertex, `degree(n)` per vertex.
fn neighbor_table(n: usize) -> Vec<u32> {
    let total = factorial(n);
    let mut out = Vec::with_capacity(total as usize * degree(n) as usize);
    for_each_in_range(n, 0, total, |_, p| {
        for_each_transposition_neighbor(p, |q| out.push(rank_of(q) as u32));
    });
    out
}

/// Boundaries of the lex segments of every size `0..=n!`.
fn lex_boundaries(n: usize, table: &[u32]) -> Vec<u64> {
    let total = factorial(n) as usize;
    let deg = degree(n) as usize;
    let mut out = Vec::with_capacity(total + 1);
    let mut b: i64 = 0;
    out.push(0);
    for v in 0..total {
        // Every earlier vertex is already in the segment.
        let inside = table[v * deg..(v + 1) * deg]
            .iter()
            .filter(|&&w| (w as usize) < v)
            .count() as i64;
        b += deg as i64 - 2 * inside;
        out.push(b as u64);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanMode {
    Exhaustive,
    LocalSearch {
        restarts: usize,
        seed: u64,
        max_iters: usize,
    },
}

impl ScanMode {
    pub fn local_search(seed: u64) -> Self {
        ScanMode::LocalSearch {
            restarts: 64,
            seed,
            max_iters: 10_000,
        }
    }
}

/// Largest `n` for the exhaustive scan (`2^{24}` subsets at `n = 4`).
pub const MAX_EXHAUSTIVE_N: usize = 4;
/// Largest `n` for the local search.
pub const MAX_LOCAL_SEARCH_N: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureRow {
    pub k: u64,
    pub lex_boundary: u64,
    pub best_boundary: u64,
    pub improved: bool,
    /// Ranks of the best family found.
    pub witness: Vec<u64>,
}

pub const CONJECTURE_CSV_HEADER: &str = "# snf-conjecture v1\nk,lex_boundary,best_boundary,improved,witness";

impl ConjectureRow {
    /// CSV line; `witness` names the saved witness file, if any.
    pub fn csv(&self, witness: &str) -> String {
        format!(
            "{},{},{},{},{}",
            self.k, self.lex_boundary, self.best_boundary, self.improved, witness
        )
    }
}

/// Compares lex-segment boundaries against the best families found, for
/// each size in `sizes` (all sizes when empty).
pub fn conjecture_scan(n: usize, sizes: &[u64], mode: ScanMode) -> Result<Vec<ConjectureRow>> {
    let total = factorial(n);
    let sizes: Vec<u64> = if sizes.is_empty() {
        (0..=total).collect()
    } else {
        sizes.to_vec()
    };
    if let Some(&k) = sizes.iter().find(|&&k| k > total) {
        return Err(Error::InvalidParameter {
            name: "sizes",
            reason: format!("size {k} exceeds {n}! = {total}"),
        });
    }
    match mode {
        ScanMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(Error::Capacity {
                    what: "exhaustive conjecture scan",
                    n,
                    limit: MAX_EXHAUSTIVE_N,
                });
            }
            let table = neighbor_table(n);
            let lex = lex_boundaries(n, &table);
            let best = exhaustive_minima(n, &table);
            Ok(sizes
                .iter()
                .map(|&k| {
                    let (b, mask) = best[k as usize];
                    let improved = b < lex[k as usize];
                    ConjectureRow {
                        k,
                        lex_boundary: lex[k as usize],
                        best_boundary: b.min(lex[k as usize]),
                        improved,
                        witness: if improved {
                            (0..total).filter(|&r| mask >> r & 1 == 1).collect()
                        } else {
                            (0..k).collect()
                        },
                    }
                })
                .collect())
        }
        ScanMode::LocalSearch {
            restarts,
            seed,
            max_iters,
        } => {
            if n > MAX_LOCAL_SEARCH_N {
                return Err(Error::Capacity {
                    what: "local-search conjecture scan",
                    n,
                    limit: MAX_LOCAL_SEARCH_N,
                });
            }
            let table = neighbor_table(n);
            let lex = lex_boundaries(n, &table);
            Ok(sizes
                .iter()
                .map(|&k| {
                    let runs: Vec<(u64, Vec<u64>)> = (0..restarts.max(1))
                        .into_par_iter()
                        .map(|r| local_search(n, &table, k, r, seed, max_iters))
                        .collect();
                    let (b, witness) = runs
                        .into_iter()
                        .fold(None::<(u64, Vec<u64>)>, |acc, run| match acc {
                            Some(cur) if cur.0 <= run.0 => Some(cur),
                            _ => Some(run),
                        })
                        .expect("at least one restart");
                    let improved = b < lex[k as usize];
                    ConjectureRow {
                        k,
                        lex_boundary: lex[k as usize],
                        best_boundary: b.min(lex[k as usize]),
                        improved,
                        witness: if improved { witness } else { (0..k).collect() },
                    }
                })
                .collect())
        }
    }
}

/// Minimum boundary and its smallest witness mask for every size, over all
/// `2^{n!}` subsets. Gray-code walks over the low bits, one per prefix.
fn exhaustive_minima(n: usize, table: &[u32]) -> Vec<(u64, u32)> {
    let total = factorial(n) as usize;
    let deg = degree(n) as usize;
    let nb: Vec<u32> = (0..total)
        .map(|v| table[v * deg..(v + 1) * deg].iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let prefix_bits = total.min(6);
    let low_bits = total - prefix_bits;
    let boundary_of = |mask: u32| -> i64 {
        (0..total)
            .filter(|&v| mask >> v & 1 == 1)
            .map(|v| (deg as u32 - (nb[v] & mask).count_ones()) as i64)
            .sum()
    };
    let merge = |mut a: Vec<(u64, u32)>, b: Vec<(u64, u32)>| {
        for (x, y) in a.iter_mut().zip(b) {
            if y < *x {
                *x = y;
            }
        }
        a
    };
    let init = vec![(u64::MAX, u32::MAX); total + 1];
    (0u32..1 << prefix_bits)
        .into_par_iter()
        .map(|prefix| {
            let mut best = init.clone();
            let mut mask = prefix << low_bits;
            let mut b = boundary_of(mask);
            let mut k = mask.count_ones() as usize;
            best[k] = best[k].min((b as u64, mask));
            for step in 1u64..1 << low_bits {
                let v = step.trailing_zeros() as usize;
                let inside = (nb[v] & mask).count_ones() as i64;
                if mask >> v & 1 == 1 {
                    b -= deg as i64 - 2 * inside;
                    k -= 1;
                } else {
                    b += deg as i64 - 2 * inside;
                    k += 1;
                }
                mask ^= 1 << v;
                best[k] = best[k].min((b as u64, mask));
            }
            best
        })
        .reduce(|| init.clone(), merge)
}

/// Swap-move descent from a start of size `k`: restart 0 starts at the lex
/// segment, the others at uniform random subsets.
fn local_search(n: usize, table: &[u32], k: u64, restart: usize, seed: u64, max_iters: usize) -> (u64, Vec<u64>) {
    let total = factorial(n) as usize;
    let deg = degree(n) as usize;
    let k = k as usize;
    let mut member = vec![false; total];
    if restart == 0 {
        member[..k].iter_mut().for_each(|m| *m = true);
    } else {
        let mut rng = stream(seed, ((k as u64) << 16) | restart as u64);
        for v in sample(&mut rng, total, k) {
            member[v] = true;
        }
    }
    let nbrs = |v: usize| &table[v * deg..(v + 1) * deg];
    let mut inside: Vec<usize> = (0..total)
        .map(|v| nbrs(v).iter().filter(|&&w| member[w as usize]).count())
        .collect();
    // Buckets by inside-degree, separately for members and non-members.
    let mut buckets: [Vec<BTreeSet<u32>>; 2] = [vec![BTreeSet::new(); deg + 1], vec![BTreeSet::new(); deg + 1]];
    for v in 0..total {
        buckets[member[v] as usize][inside[v]].insert(v as u32);
    }
    let mut boundary: i64 = (0..total)
        .filter(|&v| member[v])
        .map(|v| (deg - inside[v]) as i64)
        .sum();

    for _ in 0..max_iters {
        if k == 0 || k == total {
            break;
        }
        let lo = (0..=deg)
            .find(|&d| !buckets[1][d].is_empty())
            .expect("non-empty family");
        let hi = (0..=deg)
            .rev()
            .find(|&d| !buckets[0][d].is_empty())
            .expect("non-full family");
        // Swapping x out and y in changes the boundary by 2(in x − in y + [x ~ y]).
        let pick = if hi >= lo + 2 {
            let x = *buckets[1][lo].first().unwrap();
            let y = *buckets[0][hi].first().unwrap();
            Some((x, y))
        } else if hi == lo + 1 {
            let mut found = None;
            'outer: for &x in buckets[1][lo].iter().take(64) {
                for &y in buckets[0][hi].iter().take(64) {
                    if !nbrs(x as usize).contains(&y) {
                        found = Some((x, y));
                        break 'outer;
                    }
                }
            }
            found
        } else {
            None
        };
        let Some((x, y)) = pick else { break };
        let (x, y) = (x as usize, y as usize);
        let adj = nbrs(x).contains(&(y as u32)) as i64;
        boundary += 2 * (inside[x] as i64 - inside[y] as i64 + adj);
        buckets[1][inside[x]].remove(&(x as u32));
        buckets[0][inside[y]].remove(&(y as u32));
        member[x] = false;
        member[y] = true;
        for &w in nbrs(x) {
            let w = w as usize;
            buckets[member[w] as usize][inside[w]].remove(&(w as u32));
            inside[w] -= 1;
            buckets[member[w] as usize][inside[w]].insert(w as u32);
        }
        for &w in nbrs(y) {
            let w = w as usize;
            buckets[member[w] as usize][inside[w]].remove(&(w as u32));
            inside[w] += 1;
            buckets[member[w] as usize][inside[w]].insert(w as u32);
        }
        buckets[0][inside[x]].insert(x as u32);
        buckets[1][inside[y]].insert(y as u32);
    }
    let witness = (0..total as u64).filter(|&v| member[v as usize]).collect();
    (boundary as u64, witness)
}

/// Boundary of an explicit rank set, for cross-checks.
pub fn boundary_of_ranks(n: usize, ranks: &[u64]) -> Result<u64> {
    check_dense_n(n)?;
    let f = BooleanFamily::from_ranks(n, ranks.iter().copied())?;
    Ok(edge_boundary(&f)? as u64)
}

/// CSV rendering of a boundary report.
pub fn boundary_csv(r: &BoundaryReport) -> String {
    format!(
        "# snf-iso v1\nn,size,boundary,bound,slack,delta0,equality,epsilon\n{},{},{},{},{},{},{},{}\n",
        r.n,
        r.size,
        r.boundary,
        fmt17(r.bound),
        fmt17(r.slack),
        fmt17(r.delta0),
        r.equality,
        fmt17(r.epsilon)
    )
}
