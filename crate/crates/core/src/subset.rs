//! Bitmask subsets of a ground set `{0, .., n-1}` (printed 1-based).

use std::fmt;

/// Hard cap on the ground-set size of anything materialized as a table.
pub const MAX_GROUND: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        if n >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn pair(i: usize, j: usize) -> Subset {
        Subset((1 << i) | (1 << j))
    }

    /// Builds a subset from 0-based element indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(items: I) -> Subset {
        Subset(items.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    /// Builds a subset from 1-based element labels, rejecting labels outside `1..=n`.
    pub fn from_labels(labels: &[usize], n: usize) -> Option<Subset> {
        let mut bits = 0u32;
        for &l in labels {
            if l == 0 || l > n {
                return None;
            }
            bits |= 1 << (l - 1);
        }
        Some(Subset(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Subset {
        Subset(self.0 & !(1 << i))
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Subset {
        Subset(!self.0 & Subset::full(n).0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    /// Elements in increasing order (0-based).
    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn min_element(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// 1-based labels, for output.
    pub fn labels(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// All submasks of `self`, including `self` and the empty set, in
    /// decreasing numeric order.
    pub fn submasks(self) -> Submasks {
        Submasks {
            full: self.0,
            next: Some(self.0),
        }
    }
}

/// Serialized as the sorted list of 1-based labels.
impl serde::Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.labels())
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, l) in self.labels().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

pub struct Elements(u32);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(i as usize)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Elements {}

pub struct Submasks {
    full: u32,
    next: Option<u32>,
}

impl Iterator for Submasks {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        self.next = if cur == 0 { None } else { Some((cur - 1) & self.full) };
        Some(Subset(cur))
    }
}

/// Subsets of `within` of size `k`, lexicographic in their sorted element lists.
pub fn subsets_of_size(within: Subset, k: usize) -> Vec<Subset> {
    use itertools::Itertools;
    let elems: Vec<usize> = within.iter().collect();
    if k > elems.len() {
        return Vec::new();
    }
    elems.into_iter().combinations(k).map(Subset::from_indices).collect()
}

/// Subsets of `within` with size at most `max_k`, ordered by size and then
/// lexicographically. This is the canonical enumeration order for reports.
pub fn subsets_up_to(within: Subset, max_k: usize) -> Vec<Subset> {
    (0..=max_k.min(within.len()))
        .flat_map(|k| subsets_of_size(within, k))
        .collect()
}
