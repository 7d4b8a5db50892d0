//! Permutations of `{0, .., n-1}` with lexicographic ranking.
//!
//! Ranks are Lehmer codes read as mixed-radix numbers, so rank order is the
//! lexicographic order on image arrays. Every bitset in the crate is addressed
//! by this rank.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `n` whose `n!` fits in a `u64` rank.
pub const MAX_RANK_N: usize = 20;
/// Largest `n` for which full enumeration of `S_n` is allowed.
pub const MAX_ENUM_N: usize = 12;
/// Largest `n` for dense per-permutation storage (bitsets, real functions).
pub const MAX_DENSE_N: usize = 9;

const FACTORIALS: [u64; MAX_RANK_N + 1] = {
    let mut table = [1u64; MAX_RANK_N + 1];
    let mut i = 1;
    while i <= MAX_RANK_N {
        table[i] = table[i - 1] * i as u64;
        i += 1;
    }
    table
};

/// `n!` for `n <= 20`.
#[inline]
pub fn factorial(n: usize) -> u64 {
    FACTORIALS[n]
}

pub(crate) fn check_rank_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_RANK_N {
        return Err(Error::Capacity {
            what: "permutation rank",
            n,
            limit: MAX_RANK_N,
        });
    }
    Ok(())
}

pub(crate) fn check_enum_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ENUM_N {
        return Err(Error::Capacity {
            what: "enumeration of S_n",
            n,
            limit: MAX_ENUM_N,
        });
    }
    Ok(())
}

pub(crate) fn check_dense_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_N {
        return Err(Error::Capacity {
            what: "dense storage over S_n",
            n,
            limit: MAX_DENSE_N,
        });
    }
    Ok(())
}

/// Lexicographic index of a permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PermRank(pub u64);

/// A bijection on `{0, .., n-1}` stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // one-based, like the file format
        let parts: Vec<String> = self.images.iter().map(|&v| (v + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    /// Builds a permutation from zero-based images, validating bijectivity.
    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        if n == 0 || n > MAX_RANK_N {
            return Err(Error::NotAPermutation(format!("length {n} outside 1..={MAX_RANK_N}")));
        }
        let mut seen = 0u32;
        for &v in &images {
            if v as usize >= n {
                return Err(Error::NotAPermutation(format!(
                    "value {} out of range for n = {n}",
                    v as usize + 1
                )));
            }
            if seen & (1 << v) != 0 {
                return Err(Error::NotAPermutation(format!("value {} repeated", v as usize + 1)));
            }
            seen |= 1 << v;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from one-based images (the file format).
    pub fn from_one_based(images: &[u64]) -> Result<Self> {
        let n = images.len();
        let mut zero = Vec::with_capacity(n);
        for &v in images {
            if v == 0 || v > n as u64 {
                return Err(Error::NotAPermutation(format!("value {v} out of range 1..={n}")));
            }
            zero.push((v - 1) as u8);
        }
        Self::from_images(zero)
    }

    pub(crate) fn from_images_unchecked(images: Vec<u8>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn images(&self) -> &[u8] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn one_based(&self) -> Vec<u64> {
        self.images.iter().map(|&v| v as u64 + 1).collect()
    }

    pub fn rank(&self) -> PermRank {
        PermRank(rank_of(&self.images))
    }

    pub fn unrank(k: PermRank, n: usize) -> Result<Self> {
        check_rank_n(n)?;
        let limit = factorial(n);
        if k.0 >= limit {
            return Err(Error::RankOutOfRange { rank: k.0, n, limit });
        }
        let mut images = vec![0u8; n];
        unrank_into(k.0, &mut images);
        Ok(Permutation { images })
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        let images = other.images.iter().map(|&b| self.images[b as usize]).collect();
        Ok(Permutation { images })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u8; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize] = i as u8;
        }
        Permutation { images }
    }

    /// +1 for even permutations, -1 for odd.
    pub fn sign(&self) -> i8 {
        sign_of(&self.images)
    }

    /// The transposition swapping `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Permutation {
        let mut p = Permutation::identity(n);
        p.images.swap(a, b);
        p
    }

    /// All `τ ∘ self` for transpositions `τ`, ordered by the swapped value pair.
    ///
    /// Left multiplication by `(x y)` exchanges the values `x` and `y` in the
    /// image array.
    pub fn transposition_neighbors(&self) -> Vec<Permutation> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for_each_transposition_neighbor(&self.images, |nb| out.push(Permutation { images: nb.to_vec() }));
        out
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<u64>::deserialize(d)?;
        Permutation::from_one_based(&raw).map_err(serde::de::Error::custom)
    }
}

/// Lexicographic rank of a zero-based image slice.
pub(crate) fn rank_of(images: &[u8]) -> u64 {
    let n = images.len();
    let mut used = 0u32;
    let mut rank = 0u64;
    for (i, &v) in images.iter().enumerate() {
        let below = (!used & ((1u32 << v) - 1)).count_ones() as u64;
        rank += below * FACTORIALS[n - 1 - i];
        used |= 1 << v;
    }
    rank
}

/// Writes the permutation of lexicographic rank `k` into `out`.
pub(crate) fn unrank_into(mut k: u64, out: &mut [u8]) {
    let n = out.len();
    let mut free = (1u32 << n) - 1;
    for (i, slot) in out.iter_mut().enumerate() {
        let f = FACTORIALS[n - 1 - i];
        let mut digit = (k / f) as u32;
        k %= f;
        // select the digit-th set bit of `free`
        let mut bits = free;
        while digit > 0 {
            bits &= bits - 1;
            digit -= 1;
        }
        let v = bits.trailing_zeros();
        free &= !(1 << v);
        *slot = v as u8;
    }
}

pub(crate) fn sign_of(images: &[u8]) -> i8 {
    let n = images.len();
    let mut seen = 0u32;
    let mut transpositions = 0usize;
    for start in 0..n {
        if seen & (1 << start) != 0 {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while seen & (1 << i) == 0 {
            seen |= 1 << i;
            i = images[i] as usize;
            len += 1;
        }
        transpositions += len - 1;
    }
    if transpositions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Advances `p` to its lexicographic successor; false when `p` was the last.
pub(crate) fn next_permutation(p: &mut [u8]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Calls `f` with every `τ ∘ p`, reusing one scratch buffer.
pub(crate) fn for_each_transposition_neighbor(p: &[u8], mut f: impl FnMut(&[u8])) {
    let n = p.len();
    let mut pos = [0usize; MAX_RANK_N];
    for (i, &v) in p.iter().enumerate() {
        pos[v as usize] = i;
    }
    let mut buf = p.to_vec();
    for x in 0..n {
        for y in (x + 1)..n {
            buf.swap(pos[x], pos[y]);
            f(&buf);
            buf.swap(pos[x], pos[y]);
        }
    }
}

/// Number of ranks each parallel work item covers.
pub(crate) const CHUNK: u64 = 2048;

/// Runs `f(rank, images)` over ranks in `[start, end)` sequentially.
pub fn for_each_in_range(n: usize, start: u64, end: u64, mut f: impl FnMut(u64, &[u8])) {
    if start >= end {
        return;
    }
    let mut buf = vec![0u8; n];
    unrank_into(start, &mut buf);
    let mut r = start;
    loop {
        f(r, &buf);
        r += 1;
        if r >= end || !next_permutation(&mut buf) {
            break;
        }
    }
}

/// Maps fixed rank chunks of `S_n` in parallel and returns the per-chunk
/// results in rank order, so reductions over them are deterministic.
pub(crate) fn map_chunks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let total = factorial(n);
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            f(start, end)
        })
        .collect()
}

/// Iterator over `S_n` in rank order.
pub struct PermIter {
    current: Option<Vec<u8>>,
}

impl Iterator for PermIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.current.as_mut()?;
        let out = Permutation { images: cur.clone() };
        if !next_permutation(cur) {
            self.current = None;
        }
        Some(out)
    }
}

/// All `n!` permutations in rank order.
pub fn enumerate(n: usize) -> Result<PermIter> {
    check_enum_n(n)?;
    Ok(PermIter {
        current: Some((0..n as u8).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn perm(v: &[u8]) -> Permutation {
        Permutation::from_images(v.to_vec()).unwrap()
    }

    #[test]
    fn unrank_endpoints() {
        assert_eq!(Permutation::unrank(PermRank(0), 3).unwrap(), perm(&[0, 1, 2]));
        assert_eq!(Permutation::unrank(PermRank(5), 3).unwrap(), perm(&[2, 1, 0]));
        assert!(matches!(
            Permutation::unrank(PermRank(6), 3),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn rank_roundtrip_exhaustive() {
        for n in 1..=6 {
            for k in 0..factorial(n) {
                let p = Permutation::unrank(PermRank(k), n).unwrap();
                assert_eq!(p.rank(), PermRank(k));
            }
        }
    }

    #[test]
    fn rank_roundtrip_sampled_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 7..=MAX_RANK_N {
            for _ in 0..200 {
                let k = rng.random_range(0..factorial(n));
                let p = Permutation::unrank(PermRank(k), n).unwrap();
                assert_eq!(p.rank().0, k);
            }
        }
    }

    #[test]
    fn enumeration_is_rank_order() {
        for (k, p) in enumerate(5).unwrap().enumerate() {
            assert_eq!(p.rank().0, k as u64);
        }
        assert_eq!(
            enumerate(1).unwrap().collect::<Vec<_>>(),
            vec![Permutation::identity(1)]
        );
        assert_eq!(enumerate(4).unwrap().count(), 24);
        let distinct: HashSet<_> = enumerate(6).unwrap().collect();
        assert_eq!(distinct.len(), 720);
        assert!(enumerate(13).is_err());
    }

    #[test]
    fn composition_convention() {
        let a = perm(&[1, 0, 2]);
        let b = perm(&[0, 2, 1]);
        assert_eq!(a.compose(&b).unwrap(), perm(&[1, 2, 0]));
        let id = Permutation::identity(3);
        assert_eq!(id.compose(&a).unwrap(), a);
        assert_eq!(a.compose(&a.inverse()).unwrap(), id);
        assert!(a.compose(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn sign_values() {
        assert_eq!(Permutation::identity(5).sign(), 1);
        assert_eq!(Permutation::transposition(5, 1, 3).sign(), -1);
        let total: i32 = enumerate(4).unwrap().map(|p| p.sign() as i32).sum();
        assert_eq!(total, 0);
    }

    #[test]
    fn sign_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 8;
        for _ in 0..10_000 {
            let a = Permutation::unrank(PermRank(rng.random_range(0..factorial(n))), n).unwrap();
            let b = Permutation::unrank(PermRank(rng.random_range(0..factorial(n))), n).unwrap();
            assert_eq!(a.compose(&b).unwrap().sign(), a.sign() * b.sign());
        }
    }

    #[test]
    fn neighbors_of_identity_are_transpositions() {
        let nbrs: HashSet<_> = Permutation::identity(3).transposition_neighbors().into_iter().collect();
        let expected: HashSet<_> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(a, b)| Permutation::transposition(3, a, b))
            .collect();
        assert_eq!(nbrs, expected);
    }

    #[test]
    fn transposition_graph_is_regular_and_symmetric() {
        let n = 4;
        for p in enumerate(n).unwrap() {
            let nbrs = p.transposition_neighbors();
            assert_eq!(nbrs.len(), n * (n - 1) / 2);
            let distinct: HashSet<_> = nbrs.iter().cloned().collect();
            assert_eq!(distinct.len(), nbrs.len());
            for q in &nbrs {
                assert!(q.transposition_neighbors().contains(&p));
                // q p^{-1} is a transposition
                let t = q.compose(&p.inverse()).unwrap();
                assert_eq!(
                    t.images().iter().enumerate().filter(|(i, &v)| *i != v as usize).count(),
                    2
                );
            }
        }
    }

    #[test]
    fn conjugation_preserves_neighborhood_of_identity() {
        // vertex-transitivity spot check: conjugating the identity's neighbors
        // by any σ gives the same set
        let id = Permutation::identity(4);
        let base: HashSet<_> = id.transposition_neighbors().into_iter().collect();
        for s in enumerate(4).unwrap() {
            let conj: HashSet<_> = base
                .iter()
                .map(|t| s.compose(t).unwrap().compose(&s.inverse()).unwrap())
                .collect();
            assert_eq!(conj, base);
        }
    }

    #[test]
    fn json_is_one_based() {
        let p = perm(&[1, 0, 2]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,1,3]");
        let back: Permutation = serde_json::from_str("[2,1,3]").unwrap();
        assert_eq!(back, p);
        let err = serde_json::from_str::<Permutation>("[1,1,3]").unwrap_err();
        assert!(err.to_string().contains("not a permutation"));
    }
}
