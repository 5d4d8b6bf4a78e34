//! Small fixed-width bit sets and bit matrices.
//!
//! Used throughout the crate for state sets, cycle encodings, closure rows
//! and the decision table of the poset comparison.

/// A set of indices below a fixed universe size, packed into 64-bit words.
///
/// Two sets over the same universe always have the same word count, so the
/// derived `Ord` (lexicographic on words) is a valid total order for use as
/// a deduplication key.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(universe: usize) -> Self {
        BitSet {
            words: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Self {
        let mut s = BitSet::new(universe);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        match self.words.get(i / 64) {
            Some(w) => w & (1 << (i % 64)) != 0,
            None => false,
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.words.len(), other.words.len());
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.words.len(), other.words.len());
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Iterate set members in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

/// A dense boolean matrix backed by one bit per entry.
#[derive(Clone, Debug)]
pub struct BitMatrix {
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix {
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn set(&mut self, r: usize, c: usize) {
        debug_assert!(c < self.cols);
        self.bits[r * self.words_per_row + c / 64] |= 1 << (c % 64);
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words_per_row + c / 64] & (1 << (c % 64)) != 0
    }

    pub fn row_any(&self, r: usize) -> bool {
        let start = r * self.words_per_row;
        self.bits[start..start + self.words_per_row]
            .iter()
            .any(|w| *w != 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let mut s = BitSet::new(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert!(s.contains(0) && s.contains(64) && s.contains(129));
        assert!(!s.contains(1));
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(s.count_ones(), 3);
    }

    #[test]
    fn matrix_ops() {
        let mut m = BitMatrix::new(3, 70);
        m.set(1, 69);
        assert!(m.get(1, 69));
        assert!(!m.get(1, 68));
        assert!(m.row_any(1));
        assert!(!m.row_any(0));
    }

    proptest! {
        #[test]
        fn union_is_superset(xs in prop::collection::vec(0usize..200, 0..40),
                             ys in prop::collection::vec(0usize..200, 0..40)) {
            let a = BitSet::from_indices(200, xs.iter().copied());
            let b = BitSet::from_indices(200, ys.iter().copied());
            let mut u = a.clone();
            u.union_with(&b);
            prop_assert!(a.is_subset_of(&u));
            prop_assert!(b.is_subset_of(&u));
            prop_assert_eq!(a.intersects(&b), xs.iter().any(|x| ys.contains(x)));
        }
    }
}
