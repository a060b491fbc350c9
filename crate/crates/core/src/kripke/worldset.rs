use std::fmt;

use smallvec::{smallvec, SmallVec};

/// A subset of the worlds `0..n` of some model, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldSet {
    n: usize,
    words: SmallVec<[u64; 2]>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl WorldSet {
    pub fn empty(n: usize) -> Self {
        WorldSet {
            n,
            words: smallvec![0; word_count(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = WorldSet {
            n,
            words: smallvec![u64::MAX; word_count(n)],
        };
        s.trim();
        s
    }

    pub fn singleton(n: usize, w: usize) -> Self {
        let mut s = WorldSet::empty(n);
        s.insert(w);
        s
    }

    pub fn from_worlds<I: IntoIterator<Item = usize>>(n: usize, worlds: I) -> Self {
        let mut s = WorldSet::empty(n);
        for w in worlds {
            s.insert(w);
        }
        s
    }

    /// Low `n` bits of `mask`; requires `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "mask form needs at most 64 worlds");
        let mut s = WorldSet::empty(n);
        if n > 0 {
            s.words[0] = mask;
            s.trim();
        }
        s
    }

    /// Inverse of [`WorldSet::from_mask`].
    pub fn to_mask(&self) -> u64 {
        assert!(self.n <= 64, "mask form needs at most 64 worlds");
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        let rem = self.n % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Size of the ambient world set.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn contains(&self, w: usize) -> bool {
        w < self.n && self.words[w / 64] >> (w % 64) & 1 == 1
    }

    pub fn insert(&mut self, w: usize) {
        assert!(w < self.n, "world {w} out of range 0..{}", self.n);
        self.words[w / 64] |= 1 << (w % 64);
    }

    pub fn remove(&mut self, w: usize) {
        if w < self.n {
            self.words[w / 64] &= !(1 << (w % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|x| x.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&x| x == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + bit)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    fn check(&self, other: &WorldSet) {
        debug_assert_eq!(self.n, other.n, "world sets of different models");
    }

    pub fn union_with(&mut self, other: &WorldSet) {
        self.check(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &WorldSet) {
        self.check(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &WorldSet) -> WorldSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &WorldSet) -> WorldSet {
        self.check(other);
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        s
    }

    pub fn complement(&self) -> WorldSet {
        let mut s = self.clone();
        for a in s.words.iter_mut() {
            *a = !*a;
        }
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.check(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &WorldSet) -> bool {
        self.check(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
