//! Large/small classification of coefficient entries, `q`-goodness of
//! restrictions and strong-line detection.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{Line, LineKind};
use crate::numeric::{distance_to_set, eps_tolerance, TOLERANCE_FLOOR};
use crate::permanent::{good_diagonal_fraction, BoolMatrix};
use crate::projection::CoefficientMatrix;
use crate::rng::stream;

/// Classifies `|a_ij|` as large when it is within `threshold` of a target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LargenessClassifier {
    pub epsilon: f64,
    pub c: f64,
    pub threshold: f64,
    pub targets: Vec<f64>,
}

impl LargenessClassifier {
    /// Threshold `50ε^{1/7}` (floored).
    pub fn new(epsilon: f64, c: f64) -> Self {
        Self::with_threshold(epsilon, c, eps_tolerance(50.0, epsilon))
    }

    /// Threshold `50 max(ε, n^{−7/3})^{1/7}`, capped at `η` so that a zero
    /// entry is never large.
    pub fn calibrated(epsilon: f64, c: f64, n: usize) -> Self {
        let eta = c.min(1.0 - c);
        let eps = epsilon.max((n as f64).powf(-7.0 / 3.0));
        let threshold = eps_tolerance(50.0, eps).min(eta);
        Self::with_threshold(epsilon, c, threshold)
    }

    pub fn with_threshold(epsilon: f64, c: f64, threshold: f64) -> Self {
        let mut targets = vec![2.0 * c, 2.0 * (1.0 - c)];
        targets.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        LargenessClassifier {
            epsilon,
            c,
            threshold: threshold.max(TOLERANCE_FLOOR),
            targets,
        }
    }

    pub fn for_matrix(m: &CoefficientMatrix) -> Self {
        Self::calibrated(m.epsilon, m.c, m.n)
    }

    pub fn is_large(&self, a: f64) -> bool {
        distance_to_set(a.abs(), &self.targets) <= self.threshold
    }
}

pub fn classify(m: &CoefficientMatrix, cls: &LargenessClassifier) -> BoolMatrix {
    BoolMatrix::from_fn(m.n, |i, j| cls.is_large(m.get(i, j)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Recursive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrongLineReport {
    pub line: Line,
    /// Fraction of non-large entries on the line.
    pub strength_p: f64,
    /// Measured fraction of bad generalized diagonals of the whole matrix.
    pub q_good: f64,
    pub q_stderr: f64,
    pub method: Method,
    /// Set when the matrix was not `q`-good for `q < 1/50` and the result
    /// comes from the direct scan.
    pub degraded: bool,
    /// Whether the large entries off the line fit the `3ϱm` budget.
    pub bootstrap_ok: bool,
    pub trace: Vec<String>,
}

/// Settings for goodness measurements above the exact permanent limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    pub samples: u64,
    pub seed: u64,
    /// Candidate `Y′` sets tried when full enumeration is too large.
    pub sampled_candidates: usize,
    /// Independent splits whose lines are compared.
    pub splits: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            samples: 4000,
            seed: 0,
            sampled_candidates: 1000,
            splits: 3,
        }
    }
}

/// Fraction of non-large entries of `line` within `(xs, ys)`.
fn line_p(l: &BoolMatrix, line: Line, xs: &[usize], ys: &[usize]) -> f64 {
    let (small, total) = match line.kind {
        LineKind::Row => (ys.iter().filter(|&&j| !l.get(line.index, j)).count(), ys.len()),
        LineKind::Column => (xs.iter().filter(|&&i| !l.get(i, line.index)).count(), xs.len()),
    };
    if total == 0 {
        1.0
    } else {
        small as f64 / total as f64
    }
}

/// Every row and column with its non-large fraction, in tie-break order
/// (smallest fraction, then rows before columns, then lowest index).
pub fn line_candidates(l: &BoolMatrix) -> Vec<(Line, f64)> {
    let m = l.size();
    let all: Vec<usize> = (0..m).collect();
    let mut out: Vec<(Line, f64)> = (0..m)
        .map(Line::row)
        .chain((0..m).map(Line::column))
        .map(|line| (line, line_p(l, line, &all, &all)))
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    out
}

/// Fraction of bad diagonals, with its standard error.
pub fn measure_q(l: &BoolMatrix, opts: &SearchOptions) -> (f64, f64) {
    let f = good_diagonal_fraction(l, opts.samples, opts.seed);
    (1.0 - f.value, f.stderr)
}

/// Scans every row and column for the smallest non-large fraction.
pub fn find_strong_line_direct(l: &BoolMatrix, p_max: f64, opts: &SearchOptions) -> Option<StrongLineReport> {
    let (line, p) = *line_candidates(l).first()?;
    if p > p_max {
        return None;
    }
    let (q, se) = measure_q(l, opts);
    Some(StrongLineReport {
        line,
        strength_p: p,
        q_good: q,
        q_stderr: se,
        method: Method::Direct,
        degraded: false,
        bootstrap_ok: bootstrap_ok(l, line, p, q),
        trace: Vec::new(),
    })
}

/// Large entries off `line` against the `3ϱm` budget, `ϱ = 2q/(1−p)`.
fn bootstrap_ok(l: &BoolMatrix, line: Line, p: f64, q: f64) -> bool {
    let m = l.size() as f64;
    let on_line = match line.kind {
        LineKind::Row => l.row_count(line.index),
        LineKind::Column => l.column_count(line.index),
    };
    let outside = (l.count() - on_line) as f64;
    if p >= 1.0 {
        return false;
    }
    let rho = 2.0 * q / (1.0 - p);
    outside <= 3.0 * rho * m + 1e-9
}

/// Ordered pairs of large entries, one on each line, that share neither a
/// row nor a column.
pub fn conflict_count(l: &BoolMatrix, first: Line, second: Line) -> u64 {
    let m = l.size();
    let entries =
        |line: Line| -> Vec<(usize, usize)> { (0..m).map(|k| line.cell(k)).filter(|&(i, j)| l.get(i, j)).collect() };
    let a = entries(first);
    let b = entries(second);
    let mut count = 0u64;
    for &(i1, j1) in &a {
        for &(i2, j2) in &b {
            if i1 != i2 && j1 != j2 {
                count += 1;
            }
        }
    }
    count
}

struct Search<'a> {
    l: &'a BoolMatrix,
    q: f64,
    opts: SearchOptions,
    trace: Vec<String>,
    calls: u64,
}

impl Search<'_> {
    fn next_seed(&mut self) -> u64 {
        self.calls += 1;
        self.opts
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(self.calls)
    }

    fn q_of(&self, xs: &[usize], ys: &[usize], seed: u64) -> f64 {
        let sub = self.l.submatrix(xs, ys);
        1.0 - good_diagonal_fraction(&sub, self.opts.samples, seed).value
    }

    /// A line of `(xs, ys)` in global indices, or `None`.
    fn find(&mut self, xs: &[usize], ys: &[usize], depth: usize) -> Result<Option<Line>> {
        let m = xs.len();
        if m <= 2 || (m as f64) < 1.0 / (4.0 * self.q) {
            let found = self.base_case(xs, ys);
            self.trace.push(format!(
                "depth {depth}: base case on {m}×{m} -> {}",
                found.map_or("none".to_string(), |l| l.to_string())
            ));
            return Ok(found);
        }
        let mut lines: Vec<Line> = Vec::new();
        for split in 0..self.opts.splits {
            if let Some(line) = self.split_once(xs, ys, depth, split)? {
                lines.push(line);
            }
        }
        if lines.is_empty() {
            return Ok(None);
        }
        // Any two lines derived from q-good halves must coincide unless the
        // conflict count says the restriction cannot be q-good.
        let sub_l = self.l.submatrix(xs, ys);
        let local = |line: Line| -> Line {
            match line.kind {
                LineKind::Row => Line::row(xs.iter().position(|&x| x == line.index).expect("row in X")),
                LineKind::Column => Line::column(ys.iter().position(|&y| y == line.index).expect("column in Y")),
            }
        };
        let pairs = (m * (m - 1)) as u64;
        for a in 0..lines.len() {
            for b in a + 1..lines.len() {
                if lines[a] != lines[b] {
                    let non_conflicting = conflict_count(&sub_l, local(lines[a]), local(lines[b]));
                    if non_conflicting as f64 / pairs as f64 > self.q {
                        return Err(Error::LineConflict {
                            first: lines[a],
                            second: lines[b],
                            non_conflicting,
                            pairs,
                            q: self.q,
                        });
                    }
                }
            }
        }
        let best = lines
            .iter()
            .copied()
            .min_by(|&a, &b| {
                line_p(self.l, a, xs, ys)
                    .total_cmp(&line_p(self.l, b, xs, ys))
                    .then(a.cmp(&b))
            })
            .expect("non-empty");
        self.trace.push(format!(
            "depth {depth}: {} candidate line(s) on {m}×{m}, expanded {best} has p = {:.4}",
            lines.len(),
            line_p(self.l, best, xs, ys)
        ));
        Ok(Some(best))
    }

    /// First 0-strong line of `(xs, ys)`: rows, then columns, lowest index.
    fn base_case(&self, xs: &[usize], ys: &[usize]) -> Option<Line> {
        xs.iter()
            .map(|&i| Line::row(i))
            .chain(ys.iter().map(|&j| Line::column(j)))
            .filter(|&line| line_p(self.l, line, xs, ys) == 0.0)
            .min_by_key(|line| (line.kind, line.index))
    }

    fn split_once(&mut self, xs: &[usize], ys: &[usize], depth: usize, split: usize) -> Result<Option<Line>> {
        let m = xs.len();
        let half = m / 2;
        // Split 1 halves the columns and searches over rows; the others halve
        // the rows and search over columns.
        let transpose = split % 3 == 1;
        let (fixed, other) = if transpose { (ys, xs) } else { (xs, ys) };
        let first: Vec<usize> = if split % 3 == 2 {
            let mut rng = stream(self.opts.seed, 1000 + self.calls + split as u64);
            let mut picked: Vec<usize> = sample(&mut rng, m, half).into_iter().map(|k| fixed[k]).collect();
            picked.sort_unstable();
            picked
        } else {
            fixed[..half].to_vec()
        };
        let rest: Vec<usize> = fixed.iter().copied().filter(|x| !first.contains(x)).collect();

        let candidates = self.candidates(&first, other, transpose);
        let seeds: Vec<u64> = (0..candidates.len()).map(|_| self.next_seed()).collect();
        const BATCH: usize = 32;
        for (batch, seeds) in candidates.chunks(BATCH).zip(seeds.chunks(BATCH)) {
            let results: Vec<Option<bool>> = batch
                .par_iter()
                .zip(seeds)
                .map(|(cand, &seed)| {
                    let comp: Vec<usize> = other.iter().copied().filter(|y| !cand.contains(y)).collect();
                    let (ax, ay, bx, by) = if transpose {
                        (cand.as_slice(), first.as_slice(), comp.as_slice(), rest.as_slice())
                    } else {
                        (first.as_slice(), cand.as_slice(), rest.as_slice(), comp.as_slice())
                    };
                    if self.q_of(ax, ay, seed) <= self.q {
                        Some(true)
                    } else if self.q_of(bx, by, seed ^ 1) <= self.q {
                        Some(false)
                    } else {
                        None
                    }
                })
                .collect();
            for (cand, res) in batch.iter().zip(results) {
                let Some(first_half) = res else { continue };
                let comp: Vec<usize> = other.iter().copied().filter(|y| !cand.contains(y)).collect();
                let (sx, sy) = match (transpose, first_half) {
                    (false, true) => (first.clone(), cand.clone()),
                    (false, false) => (rest.clone(), comp),
                    (true, true) => (cand.clone(), first.clone()),
                    (true, false) => (comp, rest.clone()),
                };
                self.trace.push(format!(
                    "depth {depth}: split {split} keeps a q-good {}×{} half",
                    sx.len(),
                    sy.len()
                ));
                return self.find(&sx, &sy, depth + 1);
            }
        }
        self.trace
            .push(format!("depth {depth}: split {split} found no q-good half"));
        Ok(None)
    }

    /// Candidate partner sets of size `|first|` from `other`, best first by
    /// the large counts they share with `first`.
    fn candidates(&self, first: &[usize], other: &[usize], transpose: bool) -> Vec<Vec<usize>> {
        let k = first.len();
        let score = |y: usize| -> usize {
            first
                .iter()
                .filter(|&&x| if transpose { self.l.get(y, x) } else { self.l.get(x, y) })
                .count()
        };
        let scores: Vec<usize> = other.iter().map(|&y| score(y)).collect();
        let mut order: Vec<usize> = (0..other.len()).collect();
        order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
        let greedy: Vec<usize> = {
            let mut g: Vec<usize> = order[..k].iter().map(|&p| other[p]).collect();
            g.sort_unstable();
            g
        };
        let total_score = |c: &[usize]| -> usize {
            c.iter()
                .map(|y| scores[other.iter().position(|o| o == y).expect("member")])
                .sum()
        };
        let mut out = vec![greedy.clone()];
        if other.len() <= 12 {
            let mut all = Vec::new();
            for mask in 0u32..(1u32 << other.len()) {
                if mask.count_ones() as usize == k {
                    let c: Vec<usize> = (0..other.len())
                        .filter(|&b| mask >> b & 1 == 1)
                        .map(|b| other[b])
                        .collect();
                    if c != greedy {
                        all.push(c);
                    }
                }
            }
            all.sort_by_key(|c| std::cmp::Reverse(total_score(c)));
            out.extend(all);
        } else {
            let mut rng = stream(self.opts.seed, 2000 + self.calls);
            for _ in 0..self.opts.sampled_candidates {
                let mut c: Vec<usize> = sample(&mut rng, other.len(), k).into_iter().map(|p| other[p]).collect();
                c.sort_unstable();
                out.push(c);
            }
        }
        out
    }
}

/// Strong-line detection by recursive halving of `q`-good restrictions.
pub fn find_strong_line_recursive(l: &BoolMatrix, q: f64, opts: &SearchOptions) -> Result<StrongLineReport> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("must lie in (0, 1), got {q}"),
        });
    }
    let (measured, se) = measure_q(l, opts);
    let degraded = |trace: Vec<String>| -> Result<StrongLineReport> {
        match find_strong_line_direct(l, 1.0, opts) {
            Some(mut rep) => {
                rep.degraded = true;
                rep.trace = trace;
                Ok(rep)
            }
            None => Err(Error::NoStrongLine {
                best: None,
                best_p: 1.0,
            }),
        }
    };
    if measured >= 1.0 / 50.0 || measured > q {
        return degraded(vec![format!(
            "measured q = {measured:.6} does not meet the precondition"
        )]);
    }
    let m = l.size();
    let all: Vec<usize> = (0..m).collect();
    let mut search = Search {
        l,
        q,
        opts: *opts,
        trace: Vec::new(),
        calls: 0,
    };
    let found = search.find(&all, &all, 0)?;
    let Some(line) = found else {
        let trace = std::mem::take(&mut search.trace);
        return degraded(trace);
    };
    let p = line_p(l, line, &all, &all);
    Ok(StrongLineReport {
        line,
        strength_p: p,
        q_good: measured,
        q_stderr: se,
        method: Method::Recursive,
        degraded: false,
        bootstrap_ok: bootstrap_ok(l, line, p, measured),
        trace: search.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::BooleanFamily;
    use crate::projection::coefficient_matrix;

    fn planted(m: usize, line: Line) -> BoolMatrix {
        BoolMatrix::from_fn(m, |i, j| line.position(i, j).is_some())
    }

    #[test]
    fn classify_dictatorship() {
        let f = BooleanFamily::dictatorship(4, Line::row(0), [0, 1]).unwrap();
        let m = coefficient_matrix(&f).unwrap();
        let cls = LargenessClassifier::with_threshold(0.0, 0.5, 0.3);
        let l = classify(&m, &cls);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(l.get(i, j), i == 0);
            }
        }
        let all = LargenessClassifier::with_threshold(0.0, 0.5, 2.5);
        assert_eq!(classify(&m, &all).count(), 16);
        let zero =
            CoefficientMatrix::from_entries(4, vec![0.0; 16], 0.5, 0.0, crate::projection::EpsilonKind::Exact).unwrap();
        assert_eq!(classify(&zero, &LargenessClassifier::new(0.0, 0.5)).count(), 0);
    }

    #[test]
    fn direct_scan() {
        let opts = SearchOptions::default();
        let mut l = BoolMatrix::new(10);
        for j in 0..9 {
            l.set(4, j, true);
        }
        let rep = find_strong_line_direct(&l, 0.2, &opts).unwrap();
        assert_eq!(rep.line, Line::row(4));
        assert!((rep.strength_p - 0.1).abs() < 1e-12);
        assert!(find_strong_line_direct(&BoolMatrix::new(10), 0.2, &opts).is_none());
        let col = planted(6, Line::column(2));
        assert_eq!(find_strong_line_direct(&col, 0.0, &opts).unwrap().line, Line::column(2));
    }

    #[test]
    fn recursive_matches_direct_on_plants() {
        let opts = SearchOptions::default();
        for (m, line) in [
            (8, Line::row(3)),
            (12, Line::column(0)),
            (16, Line::column(9)),
            (20, Line::row(19)),
        ] {
            let l = planted(m, line);
            let rec = find_strong_line_recursive(&l, 1.0 / 60.0, &opts).unwrap();
            assert_eq!(rec.line, line, "{:?}", rec.trace);
            assert_eq!(rec.method, Method::Recursive);
            assert!(!rec.degraded);
            assert!(rec.bootstrap_ok);
            assert_eq!(find_strong_line_direct(&l, 0.1, &opts).unwrap().line, line);
        }
    }

    #[test]
    fn base_case_at_small_m() {
        let l = planted(6, Line::row(5));
        let rec = find_strong_line_recursive(&l, 1.0 / 100.0, &SearchOptions::default()).unwrap();
        assert_eq!(rec.line, Line::row(5));
        assert_eq!(rec.strength_p, 0.0);
        assert!(rec.trace[0].contains("base case"));
    }

    #[test]
    fn two_strong_rows_degrade() {
        let m = 10;
        let l = BoolMatrix::from_fn(m, |i, j| (i == 0 || i == 5) && j < 9);
        let rec = find_strong_line_recursive(&l, 1.0 / 60.0, &SearchOptions::default()).unwrap();
        assert!(rec.q_good > 1.0 / 50.0);
        assert!(rec.degraded);
        assert_eq!(rec.method, Method::Direct);
    }

    #[test]
    fn conflict_counts() {
        let m = 5;
        let cross = BoolMatrix::from_fn(m, |i, j| i == 0 || j == 0);
        // t₁ = t₂ = 5 sharing the corner.
        assert_eq!(conflict_count(&cross, Line::row(0), Line::column(0)), 16);
        let rows = BoolMatrix::from_fn(m, |i, j| (i == 1 || i == 2) && j < 3);
        assert_eq!(conflict_count(&rows, Line::row(1), Line::row(2)), 6);
        let single = BoolMatrix::from_fn(m, |i, j| i == 0 && j == 0 || i == 3);
        assert_eq!(conflict_count(&single, Line::row(0), Line::row(3)), 4);
        assert_eq!(conflict_count(&single, Line::row(1), Line::row(3)), 0);
    }
}
