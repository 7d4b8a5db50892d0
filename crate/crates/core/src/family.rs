//! Families of permutations and real-valued functions on `S_n`.
//!
//! A [`BooleanFamily`] is either an explicit bitset over ranks or a symbolic
//! union of 1-cosets `T_ij = {σ : σ(i) = j}` that all sit on one line of the
//! `n × n` grid (same `i`, or same `j`), plus sparse lists of added and
//! removed permutations. Cosets on one line are pairwise disjoint, which keeps
//! every count closed-form.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::perm::{check_dense_n, check_rank_n, factorial, map_chunks, rank_of, unrank_into, PermRank, Permutation};

/// Maximum length of each exception list of a symbolic family.
pub const MAX_EXCEPTIONS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Row,
    Column,
}

/// A row `i` (cosets `T_{i·}`) or column `j` (cosets `T_{·j}`), zero-based.
/// Serialized one-based as its display form, e.g. `"row 2"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    pub kind: LineKind,
    pub index: usize,
}

impl Line {
    pub fn row(index: usize) -> Self {
        Line {
            kind: LineKind::Row,
            index,
        }
    }

    pub fn column(index: usize) -> Self {
        Line {
            kind: LineKind::Column,
            index,
        }
    }

    /// The grid cell at position `k` along this line.
    #[inline]
    pub fn cell(&self, k: usize) -> (usize, usize) {
        match self.kind {
            LineKind::Row => (self.index, k),
            LineKind::Column => (k, self.index),
        }
    }

    /// Position of cell `(i, j)` along this line, if it lies on it.
    #[inline]
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        match self.kind {
            LineKind::Row if i == self.index => Some(j),
            LineKind::Column if j == self.index => Some(i),
            _ => None,
        }
    }
}

impl std::str::FromStr for Line {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter {
            name: "line",
            reason: format!("expected `row k` or `column k` with k ≥ 1, got {s:?}"),
        };
        let (kind, k) = s.trim().split_once(' ').ok_or_else(bad)?;
        let k: usize = k.trim().parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match kind {
            "row" => Ok(Line::row(k - 1)),
            "column" => Ok(Line::column(k - 1)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Line {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Line {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LineKind::Row => write!(f, "row {}", self.index + 1),
            LineKind::Column => write!(f, "column {}", self.index + 1),
        }
    }
}

/// Disjoint union of the 1-cosets on `line` at the listed positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetUnion {
    line: Line,
    members: Vec<usize>,
    mask: u32,
}

impl CosetUnion {
    pub fn new(n: usize, line: Line, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        if line.index >= n {
            return Err(Error::InvalidFamily(format!(
                "line index {} out of range for n = {n}",
                line.index + 1
            )));
        }
        let mut mask = 0u32;
        for m in members {
            if m >= n {
                return Err(Error::InvalidFamily(format!(
                    "coset position {} out of range for n = {n}",
                    m + 1
                )));
            }
            if mask & (1 << m) != 0 {
                return Err(Error::InvalidFamily(format!("coset position {} repeated", m + 1)));
            }
            mask |= 1 << m;
        }
        let members = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
        Ok(CosetUnion { line, members, mask })
    }

    pub fn line(&self) -> Line {
        self.line
    }

    /// Sorted positions along the line.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// The `(i, j)` pairs of the cosets in the union.
    pub fn cosets(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.members.iter().map(move |&k| self.line.cell(k))
    }

    #[inline]
    pub fn contains(&self, images: &[u8]) -> bool {
        let pos = match self.line.kind {
            LineKind::Row => images[self.line.index] as usize,
            LineKind::Column => images
                .iter()
                .position(|&v| v as usize == self.line.index)
                .expect("images is a bijection"),
        };
        self.mask & (1 << pos) != 0
    }

    pub fn size(&self, n: usize) -> u64 {
        self.members.len() as u64 * factorial(n - 1)
    }

    /// `|T_ij ∩ union|` in closed form.
    pub fn coset_count(&self, n: usize, i: usize, j: usize) -> u64 {
        self.cosets().map(|(a, b)| coset_intersection(n, (a, b), (i, j))).sum()
    }
}

/// `|T_ab ∩ T_ij|`.
pub fn coset_intersection(n: usize, (a, b): (usize, usize), (i, j): (usize, usize)) -> u64 {
    match (a == i, b == j) {
        (true, true) => factorial(n - 1),
        (false, false) if n >= 2 => factorial(n - 2),
        _ => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicFamily {
    pub cosets: CosetUnion,
    pub added: BTreeSet<u64>,
    pub removed: BTreeSet<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Repr {
    Explicit(Bitset),
    Symbolic(SymbolicFamily),
}

/// A subset `F ⊂ S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanFamily {
    n: usize,
    repr: Repr,
    size: u64,
}

impl BooleanFamily {
    pub fn explicit(n: usize, bits: Bitset) -> Result<Self> {
        check_dense_n(n)?;
        if bits.len() as u64 != factorial(n) {
            return Err(Error::SizeMismatch {
                left: bits.len(),
                right: factorial(n) as usize,
            });
        }
        let size = bits.count_ones();
        Ok(BooleanFamily {
            n,
            repr: Repr::Explicit(bits),
            size,
        })
    }

    pub fn from_ranks(n: usize, ranks: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_dense_n(n)?;
        let total = factorial(n);
        let mut bits = Bitset::new(total as usize);
        for r in ranks {
            if r >= total {
                return Err(Error::RankOutOfRange {
                    rank: r,
                    n,
                    limit: total,
                });
            }
            bits.set(r as usize, true);
        }
        Self::explicit(n, bits)
    }

    pub fn from_permutations<'a>(n: usize, perms: impl IntoIterator<Item = &'a Permutation>) -> Result<Self> {
        let mut ranks = Vec::new();
        for p in perms {
            if p.n() != n {
                return Err(Error::SizeMismatch { left: p.n(), right: n });
            }
            ranks.push(p.rank().0);
        }
        Self::from_ranks(n, ranks)
    }

    /// Explicit family from a membership predicate on image arrays.
    pub fn from_predicate(n: usize, pred: impl Fn(&[u8]) -> bool + Sync) -> Result<Self> {
        check_dense_n(n)?;
        let parts = map_chunks(n, |start, end| {
            let mut hits = Vec::new();
            crate::perm::for_each_in_range(n, start, end, |r, p| {
                if pred(p) {
                    hits.push(r);
                }
            });
            hits
        });
        Self::from_ranks(n, parts.into_iter().flatten())
    }

    pub fn symbolic(n: usize, cosets: CosetUnion, added: BTreeSet<u64>, removed: BTreeSet<u64>) -> Result<Self> {
        check_rank_n(n)?;
        if added.len() > MAX_EXCEPTIONS || removed.len() > MAX_EXCEPTIONS {
            return Err(Error::InvalidFamily(format!(
                "exception lists are capped at {MAX_EXCEPTIONS} entries"
            )));
        }
        let total = factorial(n);
        let mut buf = vec![0u8; n];
        for &r in &added {
            if r >= total {
                return Err(Error::RankOutOfRange {
                    rank: r,
                    n,
                    limit: total,
                });
            }
            unrank_into(r, &mut buf);
            if cosets.contains(&buf) {
                return Err(Error::InvalidFamily(format!(
                    "added permutation {} already lies in the coset union",
                    Permutation::from_images_unchecked(buf.clone())
                )));
            }
        }
        for &r in &removed {
            if r >= total {
                return Err(Error::RankOutOfRange {
                    rank: r,
                    n,
                    limit: total,
                });
            }
            unrank_into(r, &mut buf);
            if !cosets.contains(&buf) {
                return Err(Error::InvalidFamily(format!(
                    "removed permutation {} is not in the coset union",
                    Permutation::from_images_unchecked(buf.clone())
                )));
            }
        }
        let size = cosets.size(n) + added.len() as u64 - removed.len() as u64;
        Ok(BooleanFamily {
            n,
            repr: Repr::Symbolic(SymbolicFamily { cosets, added, removed }),
            size,
        })
    }

    /// Union of the cosets on `line` at `members`, with no exceptions.
    pub fn dictatorship(n: usize, line: Line, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let cosets = CosetUnion::new(n, line, members)?;
        Self::symbolic(n, cosets, BTreeSet::new(), BTreeSet::new())
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::dictatorship(n, Line::row(0), [])
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::dictatorship(n, Line::row(0), 0..n)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.repr, Repr::Explicit(_))
    }

    /// `|F|`.
    #[inline]
    pub fn size(&self) -> u64 {
        self.size
    }

    /// `c = |F| / n!`.
    pub fn density(&self) -> f64 {
        self.size as f64 / factorial(self.n) as f64
    }

    /// `η = min(c, 1 - c)`.
    pub fn eta(&self) -> f64 {
        let c = self.density();
        c.min(1.0 - c)
    }

    pub fn contains_rank(&self, rank: u64) -> bool {
        match &self.repr {
            Repr::Explicit(bits) => bits.get(rank as usize),
            Repr::Symbolic(s) => {
                let mut buf = vec![0u8; self.n];
                unrank_into(rank, &mut buf);
                self.symbolic_contains(s, rank, &buf)
            }
        }
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.contains_images(p.images())
    }

    pub fn contains_images(&self, images: &[u8]) -> bool {
        match &self.repr {
            Repr::Explicit(bits) => bits.get(rank_of(images) as usize),
            Repr::Symbolic(s) => {
                if s.added.is_empty() && s.removed.is_empty() {
                    s.cosets.contains(images)
                } else {
                    self.symbolic_contains(s, rank_of(images), images)
                }
            }
        }
    }

    /// Membership when both rank and images are already known.
    #[inline]
    pub(crate) fn contains_ranked(&self, rank: u64, images: &[u8]) -> bool {
        match &self.repr {
            Repr::Explicit(bits) => bits.get(rank as usize),
            Repr::Symbolic(s) => self.symbolic_contains(s, rank, images),
        }
    }

    #[inline]
    fn symbolic_contains(&self, s: &SymbolicFamily, rank: u64, images: &[u8]) -> bool {
        if s.cosets.contains(images) {
            !s.removed.contains(&rank)
        } else {
            s.added.contains(&rank)
        }
    }

    /// `|F ∩ T_ij|`.
    pub fn coset_count(&self, i: usize, j: usize) -> u64 {
        match &self.repr {
            Repr::Explicit(_) => self.coset_counts()[i * self.n + j],
            Repr::Symbolic(s) => {
                let mut count = s.cosets.coset_count(self.n, i, j);
                let mut buf = vec![0u8; self.n];
                for &r in &s.added {
                    unrank_into(r, &mut buf);
                    if buf[i] as usize == j {
                        count += 1;
                    }
                }
                for &r in &s.removed {
                    unrank_into(r, &mut buf);
                    if buf[i] as usize == j {
                        count -= 1;
                    }
                }
                count
            }
        }
    }

    /// All `|F ∩ T_ij|`, row-major.
    pub fn coset_counts(&self) -> Vec<u64> {
        let n = self.n;
        match &self.repr {
            Repr::Explicit(bits) => {
                let parts = map_chunks(n, |start, end| {
                    let mut counts = vec![0u64; n * n];
                    crate::perm::for_each_in_range(n, start, end, |r, p| {
                        if bits.get(r as usize) {
                            for (i, &v) in p.iter().enumerate() {
                                counts[i * n + v as usize] += 1;
                            }
                        }
                    });
                    counts
                });
                let mut total = vec![0u64; n * n];
                for part in parts {
                    for (t, c) in total.iter_mut().zip(part) {
                        *t += c;
                    }
                }
                total
            }
            Repr::Symbolic(s) => {
                let mut counts = vec![0u64; n * n];
                for i in 0..n {
                    for j in 0..n {
                        counts[i * n + j] = s.cosets.coset_count(n, i, j);
                    }
                }
                let mut buf = vec![0u8; n];
                for &r in &s.added {
                    unrank_into(r, &mut buf);
                    for (i, &v) in buf.iter().enumerate() {
                        counts[i * n + v as usize] += 1;
                    }
                }
                for &r in &s.removed {
                    unrank_into(r, &mut buf);
                    for (i, &v) in buf.iter().enumerate() {
                        counts[i * n + v as usize] -= 1;
                    }
                }
                counts
            }
        }
    }

    pub fn to_bitset(&self) -> Result<Bitset> {
        match &self.repr {
            Repr::Explicit(bits) => Ok(bits.clone()),
            Repr::Symbolic(_) => {
                check_dense_n(self.n)?;
                let n = self.n;
                let parts = map_chunks(n, |start, end| {
                    let mut hits = Vec::new();
                    crate::perm::for_each_in_range(n, start, end, |r, p| {
                        if self.contains_ranked(r, p) {
                            hits.push(r);
                        }
                    });
                    hits
                });
                let mut bits = Bitset::new(factorial(n) as usize);
                for r in parts.into_iter().flatten() {
                    bits.set(r as usize, true);
                }
                Ok(bits)
            }
        }
    }

    /// Explicit representation of the same set.
    pub fn materialize(&self) -> Result<BooleanFamily> {
        match &self.repr {
            Repr::Explicit(_) => Ok(self.clone()),
            Repr::Symbolic(_) => BooleanFamily::explicit(self.n, self.to_bitset()?),
        }
    }

    /// `S_n \ F`, in the same representation.
    pub fn complement(&self) -> BooleanFamily {
        let n = self.n;
        let size = factorial(n) - self.size;
        let repr = match &self.repr {
            Repr::Explicit(bits) => Repr::Explicit(bits.complement()),
            Repr::Symbolic(s) => {
                let members: Vec<usize> = (0..n).filter(|k| !s.cosets.members().contains(k)).collect();
                Repr::Symbolic(SymbolicFamily {
                    cosets: CosetUnion::new(n, s.cosets.line(), members).expect("valid complement"),
                    added: s.removed.clone(),
                    removed: s.added.clone(),
                })
            }
        };
        BooleanFamily { n, repr, size }
    }

    /// `|F △ G|`.
    pub fn symmetric_difference(&self, other: &BooleanFamily) -> Result<u64> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        match (&self.repr, &other.repr) {
            (Repr::Symbolic(a), Repr::Symbolic(b)) => Ok(symbolic_symdiff(self.n, a, b, self, other)),
            _ => {
                let a = self.to_bitset()?;
                let b = other.to_bitset()?;
                Ok(a.symmetric_difference_len(&b))
            }
        }
    }

    /// The underlying coset union when the family is an exact symbolic
    /// dictatorship with no exceptions.
    pub fn as_dictatorship(&self) -> Option<&CosetUnion> {
        match &self.repr {
            Repr::Symbolic(s) if s.added.is_empty() && s.removed.is_empty() => Some(&s.cosets),
            _ => None,
        }
    }

    pub fn to_file(&self) -> FamilyFile {
        let n = self.n;
        match &self.repr {
            Repr::Explicit(bits) => {
                let mut buf = vec![0u8; n];
                let explicit = bits
                    .iter_ones()
                    .map(|r| {
                        unrank_into(r as u64, &mut buf);
                        buf.iter().map(|&v| v as u64 + 1).collect()
                    })
                    .collect();
                FamilyFile {
                    n,
                    explicit: Some(explicit),
                    ..FamilyFile::default()
                }
            }
            Repr::Symbolic(s) => {
                let to_perms = |set: &BTreeSet<u64>| -> Vec<Vec<u64>> {
                    let mut buf = vec![0u8; n];
                    set.iter()
                        .map(|&r| {
                            unrank_into(r, &mut buf);
                            buf.iter().map(|&v| v as u64 + 1).collect()
                        })
                        .collect()
                };
                let members: Vec<usize> = s.cosets.members().iter().map(|&k| k + 1).collect();
                let line = s.cosets.line();
                let (row, columns, column, rows) = match line.kind {
                    LineKind::Row => (Some(line.index + 1), Some(members), None, None),
                    LineKind::Column => (None, None, Some(line.index + 1), Some(members)),
                };
                FamilyFile {
                    n,
                    explicit: None,
                    row,
                    columns,
                    column,
                    rows,
                    added: Some(to_perms(&s.added)),
                    removed: Some(to_perms(&s.removed)),
                }
            }
        }
    }

    pub fn from_file(file: &FamilyFile) -> Result<Self> {
        let n = file.n;
        if n == 0 {
            return Err(Error::InvalidFamily("field `n`: must be at least 1".into()));
        }
        check_rank_n(n)?;
        let parse_perms = |field: &str, list: &[Vec<u64>]| -> Result<Vec<Permutation>> {
            list.iter()
                .enumerate()
                .map(|(k, raw)| {
                    if raw.len() != n {
                        return Err(Error::NotAPermutation(format!(
                            "field `{field}`, entry {}: length {} but n = {n}",
                            k + 1,
                            raw.len()
                        )));
                    }
                    Permutation::from_one_based(raw).map_err(|e| match e {
                        Error::NotAPermutation(msg) => {
                            Error::NotAPermutation(format!("field `{field}`, entry {}: {msg}", k + 1))
                        }
                        other => other,
                    })
                })
                .collect()
        };
        if let Some(list) = &file.explicit {
            if file.row.is_some() || file.column.is_some() {
                return Err(Error::InvalidFamily(
                    "field `explicit` cannot be combined with `row`/`column`".into(),
                ));
            }
            let perms = parse_perms("explicit", list)?;
            return Self::from_permutations(n, perms.iter());
        }
        let (line, members, field) = match (file.row, file.column) {
            (Some(i), None) => (i, file.columns.clone(), "columns"),
            (None, Some(j)) => (j, file.rows.clone(), "rows"),
            (Some(_), Some(_)) => {
                return Err(Error::InvalidFamily(
                    "fields `row` and `column` are mutually exclusive".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidFamily(
                    "one of the fields `explicit`, `row` or `column` is required".into(),
                ))
            }
        };
        let members = members.ok_or_else(|| Error::InvalidFamily(format!("field `{field}` is required")))?;
        if line == 0 || line > n {
            return Err(Error::InvalidFamily(format!(
                "field `{}`: {line} out of range 1..={n}",
                if field == "columns" { "row" } else { "column" }
            )));
        }
        let mut zero = Vec::with_capacity(members.len());
        for &m in &members {
            if m == 0 || m > n {
                return Err(Error::InvalidFamily(format!(
                    "field `{field}`: {m} out of range 1..={n}"
                )));
            }
            zero.push(m - 1);
        }
        let line = if field == "columns" {
            Line::row(line - 1)
        } else {
            Line::column(line - 1)
        };
        let cosets = CosetUnion::new(n, line, zero).map_err(|e| match e {
            Error::InvalidFamily(msg) => Error::InvalidFamily(format!("field `{field}`: {msg}")),
            other => other,
        })?;
        let added = parse_perms("added", file.added.as_deref().unwrap_or(&[]))?;
        let removed = parse_perms("removed", file.removed.as_deref().unwrap_or(&[]))?;
        let added: BTreeSet<u64> = added.iter().map(|p| p.rank().0).collect();
        let removed: BTreeSet<u64> = removed.iter().map(|p| p.rank().0).collect();
        Self::symbolic(n, cosets, added, removed)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text).map_err(|e| Error::InvalidFamily(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("family serializes")
    }
}

fn symbolic_symdiff(n: usize, a: &SymbolicFamily, b: &SymbolicFamily, fa: &BooleanFamily, fb: &BooleanFamily) -> u64 {
    // |A △ B| where A = CA △ EA, B = CB △ EB: start from the coset unions and
    // correct on the exception permutations.
    let mut inter = 0u64;
    for x in a.cosets.cosets() {
        for y in b.cosets.cosets() {
            inter += coset_intersection(n, x, y);
        }
    }
    let base = a.cosets.size(n) + b.cosets.size(n) - 2 * inter;
    let mut touched: BTreeSet<u64> = BTreeSet::new();
    touched.extend(a.added.iter().chain(&a.removed).chain(&b.added).chain(&b.removed));
    let mut diff = base as i64;
    let mut buf = vec![0u8; n];
    for &r in &touched {
        unrank_into(r, &mut buf);
        let before = a.cosets.contains(&buf) != b.cosets.contains(&buf);
        let after = fa.contains_ranked(r, &buf) != fb.contains_ranked(r, &buf);
        diff += after as i64 - before as i64;
    }
    diff as u64
}

/// On-disk family format, one-based throughout.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub added: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub removed: Option<Vec<Vec<u64>>>,
}

/// A real function on `S_n`, indexed by rank.
#[derive(Clone, Debug, PartialEq)]
pub struct RealFunction {
    n: usize,
    values: Vec<f64>,
}

impl RealFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_dense_n(n)?;
        if values.len() as u64 != factorial(n) {
            return Err(Error::SizeMismatch {
                left: values.len(),
                right: factorial(n) as usize,
            });
        }
        Ok(RealFunction { n, values })
    }

    /// Tabulates `f` over `S_n` in parallel.
    pub fn from_fn(n: usize, f: impl Fn(u64, &[u8]) -> f64 + Sync) -> Result<Self> {
        check_dense_n(n)?;
        let parts = map_chunks(n, |start, end| {
            let mut out = Vec::with_capacity((end - start) as usize);
            crate::perm::for_each_in_range(n, start, end, |r, p| out.push(f(r, p)));
            out
        });
        Ok(RealFunction {
            n,
            values: parts.into_iter().flatten().collect(),
        })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        check_dense_n(n)?;
        Ok(RealFunction {
            n,
            values: vec![value; factorial(n) as usize],
        })
    }

    /// `f = 2χ_F − 1`.
    pub fn signed_indicator(family: &BooleanFamily) -> Result<Self> {
        Self::from_fn(family.n(), |r, p| if family.contains_ranked(r, p) { 1.0 } else { -1.0 })
    }

    /// `χ_F`.
    pub fn indicator(family: &BooleanFamily) -> Result<Self> {
        Self::from_fn(family.n(), |r, p| if family.contains_ranked(r, p) { 1.0 } else { 0.0 })
    }

    pub fn coset_indicator(n: usize, i: usize, j: usize) -> Result<Self> {
        Self::from_fn(n, |_, p| if p[i] as usize == j { 1.0 } else { 0.0 })
    }

    /// Indicator of `T_IJ = {σ : σ(I) = J}` for ordered tuples.
    pub fn tuple_coset_indicator(n: usize, from: &[usize], to: &[usize]) -> Result<Self> {
        if from.len() != to.len() {
            return Err(Error::SizeMismatch {
                left: from.len(),
                right: to.len(),
            });
        }
        Self::from_fn(n, |_, p| {
            if from.iter().zip(to).all(|(&i, &j)| p[i] as usize == j) {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn sign_function(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, p| crate::perm::sign_of(p) as f64)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, rank: PermRank) -> f64 {
        self.values[rank.0 as usize]
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    /// `⟨f, g⟩ = (1/n!) Σ f(π) g(π)`.
    pub fn inner_product(&self, other: &RealFunction) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let prods: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(pairwise_sum(&prods) / prods.len() as f64)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner_product(self).expect("same n")
    }

    /// `⟨f, sgn⟩`.
    pub fn sign_correlation(&self) -> f64 {
        let n = self.n;
        let parts = map_chunks(n, |start, end| {
            let mut acc = Vec::with_capacity((end - start) as usize);
            crate::perm::for_each_in_range(n, start, end, |r, p| {
                acc.push(crate::perm::sign_of(p) as f64 * self.values[r as usize]);
            });
            pairwise_sum(&acc)
        });
        pairwise_sum(&parts) / factorial(n) as f64
    }

    pub fn sub(&self, other: &RealFunction) -> Result<RealFunction> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(RealFunction {
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }
}
