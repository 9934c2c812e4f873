use std::fmt;

/// Largest ground set a [`Subset`] can address.
pub const MAX_ELEMENTS: usize = 64;

/// A set of ground-set indices stored as a 64-bit mask.
///
/// The ground-set size is not stored; operations that need it (such as
/// [`Subset::complement`]) take it as an argument.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `{index}`. Panics if `index >= 64`.
    pub fn singleton(index: usize) -> Self {
        assert!(index < MAX_ELEMENTS, "element index {index} exceeds 63");
        Subset(1 << index)
    }

    /// All indices `0..size`.
    pub fn full(size: usize) -> Self {
        assert!(size <= MAX_ELEMENTS, "ground set of {size} exceeds 64");
        if size == MAX_ELEMENTS {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << size) - 1)
        }
    }

    pub fn contains(self, index: usize) -> bool {
        index < MAX_ELEMENTS && self.0 >> index & 1 == 1
    }

    pub fn insert(&mut self, index: usize) {
        *self = self.union(Subset::singleton(index));
    }

    pub fn remove(&mut self, index: usize) {
        self.0 &= !Subset::singleton(index).0;
    }

    pub fn with(self, index: usize) -> Self {
        self.union(Subset::singleton(index))
    }

    pub const fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub const fn intersection(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    pub const fn difference(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn complement(self, size: usize) -> Self {
        Subset::full(size).difference(self)
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    /// One past the largest index present, or 0 when empty.
    pub const fn bound(self) -> usize {
        MAX_ELEMENTS - self.0.leading_zeros() as usize
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> Indices {
        Indices(self.0)
    }

    /// Every subset of `self`, in increasing bitmask order, from the empty
    /// set up to `self`.
    pub fn subsets(self) -> Submasks {
        Submasks {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Every subset of `self` with exactly `size` members, increasing bitmask
    /// order.
    pub fn subsets_of_size(self, size: usize) -> impl Iterator<Item = Subset> {
        self.subsets().filter(move |s| s.len() == size)
    }

    /// Position of `index` among the members of `self`.
    pub fn rank_of(self, index: usize) -> Option<usize> {
        if !self.contains(index) {
            return None;
        }
        let below = self.0 & ((1u64 << index) - 1);
        Some(below.count_ones() as usize)
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Subset::EMPTY, |acc, i| acc.with(i))
    }
}

impl IntoIterator for Subset {
    type Item = usize;
    type IntoIter = Indices;

    fn into_iter(self) -> Indices {
        self.iter()
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Iterator over the member indices of a [`Subset`].
#[derive(Clone)]
pub struct Indices(u64);

impl Iterator for Indices {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let index = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(index)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Indices {}

/// Iterator over all submasks of a mask, ascending.
#[derive(Clone)]
pub struct Submasks {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Submasks {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let current = self.next?;
        self.next = if current == self.mask {
            None
        } else {
            Some(current.wrapping_sub(self.mask) & self.mask)
        };
        Some(Subset(current))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn submasks_are_ascending_and_complete() {
        let mask = Subset::from_iter([0, 2, 3]);
        let subs: Vec<u64> = mask.subsets().map(Subset::bits).collect();
        assert_eq!(subs, vec![0, 1, 4, 5, 8, 9, 12, 13]);
        assert_eq!(Subset::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn full_set_at_width_limit() {
        assert_eq!(Subset::full(64).len(), 64);
        assert_eq!(Subset::full(0), Subset::EMPTY);
        assert!(Subset::full(64).contains(63));
    }

    #[test]
    fn rank_and_bound() {
        let s = Subset::from_iter([1, 4, 9]);
        assert_eq!(s.rank_of(4), Some(1));
        assert_eq!(s.rank_of(2), None);
        assert_eq!(s.bound(), 10);
        assert_eq!(format!("{s:?}"), "{1, 4, 9}");
    }

    proptest! {
        #[test]
        fn set_algebra_laws(a in any::<u64>(), b in any::<u64>(), m in 1usize..=64) {
            let full = Subset::full(m);
            let a = Subset::from_bits(a).intersection(full);
            let b = Subset::from_bits(b).intersection(full);
            prop_assert_eq!(a.union(b).len() + a.intersection(b).len(), a.len() + b.len());
            prop_assert_eq!(a.difference(b), a.intersection(b.complement(m)));
            prop_assert_eq!(a.complement(m).complement(m), a);
            prop_assert!(a.intersection(b).is_subset_of(a));
            prop_assert_eq!(a.iter().collect::<Subset>(), a);
        }

        #[test]
        fn submask_count_is_power_of_two(a in any::<u16>()) {
            let s = Subset::from_bits(a as u64);
            let subs: Vec<Subset> = s.subsets().collect();
            prop_assert_eq!(subs.len(), 1usize << s.len());
            prop_assert!(subs.iter().all(|f| f.is_subset_of(s)));
            prop_assert!(subs.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
