//! Fixed-capacity vertex sets over `u64` words. Digraph adjacency rows and
//! the embedding engine both live on these: membership, popcount, and
//! intersection-count are single-word operations for hosts up to 64
//! vertices and short loops beyond.

/// A subset of `{0, 1, ..., n-1}` stored as packed bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertSet {
    n: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for VertSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl VertSet {
    /// The empty subset of a ground set of size `n`.
    pub fn empty(n: usize) -> Self {
        VertSet { n, words: vec![0; word_count(n)] }
    }

    /// The full ground set `{0, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    /// Build from an iterator of members.
    pub fn from_iter_n(n: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for v in it {
            s.insert(v);
        }
        s
    }

    /// Size of the ground set (not the subset).
    pub fn capacity(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < self.n);
        self.words[v / 64] |= 1u64 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        debug_assert!(v < self.n);
        self.words[v / 64] &= !(1u64 << (v % 64));
    }

    pub fn contains(&self, v: usize) -> bool {
        debug_assert!(v < self.n);
        self.words[v / 64] >> (v % 64) & 1 == 1
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// |self ∩ other|, without materializing the intersection.
    pub fn intersection_len(&self, other: &VertSet) -> usize {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersection(&self, other: &VertSet) -> VertSet {
        debug_assert_eq!(self.n, other.n);
        VertSet {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn union(&self, other: &VertSet) -> VertSet {
        debug_assert_eq!(self.n, other.n);
        VertSet {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// self \ other.
    pub fn difference(&self, other: &VertSet) -> VertSet {
        debug_assert_eq!(self.n, other.n);
        VertSet {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &VertSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Smallest member, if any.
    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    /// The members as a sorted `Vec`.
    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Raw words, for hosts small enough to live in one `u64`.
    pub fn as_single_word(&self) -> Option<u64> {
        if self.n <= 64 {
            Some(self.words.first().copied().unwrap_or(0))
        } else {
            None
        }
    }
}

impl FromIterator<usize> for VertSet {
    /// Collect with capacity = max member + 1 (empty input gives capacity 0).
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let items: Vec<usize> = iter.into_iter().collect();
        let n = items.iter().max().map_or(0, |&m| m + 1);
        Self::from_iter_n(n, items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops_across_word_boundary() {
        let mut s = VertSet::empty(130);
        for v in [0, 63, 64, 65, 127, 128, 129] {
            s.insert(v);
        }
        assert_eq!(s.len(), 7);
        assert!(s.contains(64));
        assert!(!s.contains(1));
        s.remove(64);
        assert_eq!(s.to_vec(), vec![0, 63, 65, 127, 128, 129]);
        assert_eq!(s.min(), Some(0));
    }

    #[test]
    fn set_algebra() {
        let a = VertSet::from_iter_n(10, [1, 3, 5, 7]);
        let b = VertSet::from_iter_n(10, [3, 4, 5]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3, 5]);
        assert_eq!(a.union(&b).to_vec(), vec![1, 3, 4, 5, 7]);
        assert_eq!(a.difference(&b).to_vec(), vec![1, 7]);
        assert_eq!(a.intersection_len(&b), 2);
        assert!(VertSet::from_iter_n(10, [3, 5]).is_subset_of(&a));
        assert!(!a.is_subset_of(&b));
    }

    #[test]
    fn full_and_empty() {
        let f = VertSet::full(70);
        assert_eq!(f.len(), 70);
        assert!(VertSet::empty(70).is_empty());
        assert_eq!(f.as_single_word(), None);
        assert_eq!(VertSet::full(5).as_single_word(), Some(0b11111));
    }
}
