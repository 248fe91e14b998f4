//! Matroid oracles: uniform, partition, graphic and explicit families, each
//! optionally contracted by a set τ.
//!
//! Indicator tables store 0 at ∅ even though ∅ is independent: tables keep
//! the convention `f(∅) = 0`, and the generating polynomial of `f^(d)` is
//! unaffected for every `d ≥ 1`.

use std::collections::HashSet;

use num_traits::{One, Zero};
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::setfn::SetFunctionTable;
use crate::subset::{Subset, MAX_GROUND};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatroidKind {
    Uniform {
        rank: usize,
    },
    /// Disjoint blocks covering the ground set, each with a capacity.
    Partition {
        blocks: Vec<Subset>,
        caps: Vec<usize>,
    },
    /// Edges are 0-based vertex pairs; self-loops and parallel edges allowed.
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    /// A validated independent family.
    Explicit {
        independent: HashSet<u32>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matroid {
    n: usize,
    kind: MatroidKind,
    contraction: Subset,
}

/// A failure of the independence axioms in an explicit family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AxiomViolation {
    Empty,
    /// `set` is in the family but `missing = set \ {e}` is not.
    NotDownwardClosed {
        set: Subset,
        missing: Subset,
    },
    /// `|smaller| < |larger|` and no `e ∈ larger \ smaller` extends `smaller`.
    Exchange {
        smaller: Subset,
        larger: Subset,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParallelPartition {
    pub loops: Subset,
    /// Parallel classes ordered by their smallest element.
    pub classes: Vec<Subset>,
}

impl ParallelPartition {
    pub fn class_of(&self, x: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(x))
    }

    pub fn non_loops(&self) -> Subset {
        self.classes.iter().fold(Subset::EMPTY, |acc, c| acc.union(*c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableMode {
    Rank,
    Indicator,
}

fn cap(n: usize) -> Result<()> {
    if n > MAX_GROUND {
        return Err(Error::CapExceeded {
            what: "matroid ground set",
            got: n,
            cap: MAX_GROUND,
        });
    }
    Ok(())
}

impl Matroid {
    pub fn uniform(rank: usize, n: usize) -> Result<Self> {
        cap(n)?;
        Ok(Matroid {
            n,
            kind: MatroidKind::Uniform { rank },
            contraction: Subset::EMPTY,
        })
    }

    pub fn partition(n: usize, blocks: Vec<Subset>, caps: Vec<usize>) -> Result<Self> {
        cap(n)?;
        if blocks.len() != caps.len() {
            return Err(Error::DimensionMismatch {
                expected: blocks.len(),
                got: caps.len(),
            });
        }
        let mut seen = Subset::EMPTY;
        for b in &blocks {
            if b.intersects(seen) || !b.is_subset_of(Subset::full(n)) {
                return Err(Error::Malformed(format!(
                    "partition block {b} overlaps or is out of range"
                )));
            }
            seen = seen.union(*b);
        }
        if seen != Subset::full(n) {
            return Err(Error::Malformed("partition blocks do not cover the ground set".into()));
        }
        Ok(Matroid {
            n,
            kind: MatroidKind::Partition { blocks, caps },
            contraction: Subset::EMPTY,
        })
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        cap(edges.len())?;
        if let Some(&(u, v)) = edges.iter().find(|(u, v)| *u >= vertices || *v >= vertices) {
            return Err(Error::Malformed(format!("edge ({u},{v}) references a missing vertex")));
        }
        Ok(Matroid {
            n: edges.len(),
            kind: MatroidKind::Graphic { vertices, edges },
            contraction: Subset::EMPTY,
        })
    }

    /// Complete graph on `k` vertices, edges in lexicographic order.
    pub fn complete_graph(k: usize) -> Result<Self> {
        let edges = (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))).collect();
        Matroid::graphic(k, edges)
    }

    /// An explicit independent family, validated eagerly.
    pub fn explicit(n: usize, family: impl IntoIterator<Item = Subset>) -> Result<Self> {
        cap(n)?;
        let independent: HashSet<u32> = family.into_iter().map(Subset::bits).collect();
        if let Some(bad) = independent.iter().find(|s| **s & !Subset::full(n).bits() != 0) {
            return Err(Error::InvalidSubset {
                subset: Subset(*bad),
                n,
            });
        }
        if let Err(v) = validate_explicit(&independent) {
            return Err(Error::NotAMatroid(format!("{v:?}")));
        }
        Ok(Matroid {
            n,
            kind: MatroidKind::Explicit { independent },
            contraction: Subset::EMPTY,
        })
    }

    /// The explicit matroid whose bases are `bases` (downward closure added).
    pub fn from_bases(n: usize, bases: &[Subset]) -> Result<Self> {
        let mut family = HashSet::new();
        for b in bases {
            for s in b.submasks() {
                family.insert(s);
            }
        }
        Matroid::explicit(n, family)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    pub fn contraction(&self) -> Subset {
        self.contraction
    }

    /// Elements of the (contracted) ground set, in original indexing.
    pub fn ground(&self) -> Subset {
        Subset::full(self.n).difference(self.contraction)
    }

    fn raw_rank(&self, s: Subset) -> usize {
        match &self.kind {
            MatroidKind::Uniform { rank } => s.len().min(*rank),
            MatroidKind::Partition { blocks, caps } => blocks
                .iter()
                .zip(caps)
                .map(|(b, c)| b.intersection(s).len().min(*c))
                .sum(),
            MatroidKind::Graphic { vertices, edges } => {
                let mut forest = UnionFind::<usize>::new(*vertices);
                s.iter().filter(|&e| forest.union(edges[e].0, edges[e].1)).count()
            }
            MatroidKind::Explicit { independent } => {
                let mut basis = Subset::EMPTY;
                for e in s.iter() {
                    if independent.contains(&basis.with(e).bits()) {
                        basis = basis.with(e);
                    }
                }
                basis.len()
            }
        }
    }

    /// `rk(S ∪ τ) − rk(τ)` for `S` inside the contracted ground set.
    pub fn rank(&self, s: Subset) -> Result<usize> {
        if !s.is_subset_of(self.ground()) {
            return Err(Error::InvalidSubset { subset: s, n: self.n });
        }
        Ok(self.rank_unchecked(s))
    }

    pub(crate) fn rank_unchecked(&self, s: Subset) -> usize {
        self.raw_rank(s.union(self.contraction)) - self.raw_rank(self.contraction)
    }

    pub fn full_rank(&self) -> usize {
        self.rank_unchecked(self.ground())
    }

    pub fn is_independent(&self, s: Subset) -> bool {
        s.is_subset_of(self.ground()) && self.rank_unchecked(s) == s.len()
    }

    pub fn contract(&self, tau: Subset) -> Result<Matroid> {
        if !tau.is_subset_of(Subset::full(self.n)) {
            return Err(Error::InvalidSubset { subset: tau, n: self.n });
        }
        let mut m = self.clone();
        m.contraction = m.contraction.union(tau);
        Ok(m)
    }

    /// Loops and parallel classes of the contracted matroid, with the full
    /// pair-rank case table re-verified.
    pub fn parallel_partition(&self) -> Result<ParallelPartition> {
        let ground = self.ground();
        let mut loops = Subset::EMPTY;
        let mut classes: Vec<Subset> = Vec::new();
        for x in ground.iter() {
            if self.rank_unchecked(Subset::singleton(x)) == 0 {
                loops = loops.with(x);
                continue;
            }
            match classes.iter_mut().find(|c| {
                let rep = c.min_element().expect("classes are nonempty");
                self.rank_unchecked(Subset::pair(rep, x)) == 1
            }) {
                Some(c) => *c = c.with(x),
                None => classes.push(Subset::singleton(x)),
            }
        }
        let partition = ParallelPartition { loops, classes };
        let elems: Vec<usize> = ground.iter().collect();
        for (a, &x) in elems.iter().enumerate() {
            for &y in &elems[a + 1..] {
                let expected = match (partition.class_of(x), partition.class_of(y)) {
                    (None, None) => 0,
                    (None, Some(_)) | (Some(_), None) => 1,
                    (Some(i), Some(j)) if i == j => 1,
                    _ => 2,
                };
                let got = self.rank_unchecked(Subset::pair(x, y));
                if got != expected {
                    return Err(Error::NotAMatroid(format!(
                        "rank of {} is {got}, case table requires {expected}",
                        Subset::pair(x, y)
                    )));
                }
            }
        }
        Ok(partition)
    }

    /// Rank or independence-indicator table over the contracted ground set,
    /// re-indexed onto `0..|ground|` in increasing original order.
    pub fn to_setfunction(&self, mode: TableMode) -> Result<SetFunctionTable> {
        let ground: Vec<usize> = self.ground().iter().collect();
        cap(ground.len())?;
        SetFunctionTable::from_fn(ground.len(), |s| {
            let original = Subset::from_indices(s.iter().map(|k| ground[k]));
            let r = self.rank_unchecked(original);
            match mode {
                TableMode::Rank => int(r as i64),
                TableMode::Indicator if r == original.len() => Rational::one(),
                TableMode::Indicator => Rational::zero(),
            }
        })
    }
}

/// Checks nonemptiness, downward closure and the exchange axiom.
pub fn validate_explicit(family: &HashSet<u32>) -> std::result::Result<(), AxiomViolation> {
    if family.is_empty() {
        return Err(AxiomViolation::Empty);
    }
    let mut sets: Vec<Subset> = family.iter().map(|&b| Subset(b)).collect();
    sets.sort_by_key(|s| (s.len(), s.labels()));
    for &s in &sets {
        for e in s.iter() {
            if !family.contains(&s.without(e).bits()) {
                return Err(AxiomViolation::NotDownwardClosed {
                    set: s,
                    missing: s.without(e),
                });
            }
        }
    }
    for &small in &sets {
        for &large in sets.iter().rev() {
            if large.len() <= small.len() {
                break;
            }
            let extends = large
                .difference(small)
                .iter()
                .any(|e| family.contains(&small.with(e).bits()));
            if !extends {
                return Err(AxiomViolation::Exchange {
                    smaller: small,
                    larger: large,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::predicates;

    fn labels(l: &[usize], n: usize) -> Subset {
        Subset::from_labels(l, n).unwrap()
    }

    fn family(sets: &[&[usize]], n: usize) -> HashSet<u32> {
        sets.iter().map(|s| labels(s, n).bits()).collect()
    }

    #[test]
    fn rank_examples() {
        let k4 = Matroid::complete_graph(4).unwrap();
        // edges 12,13,14,23,24,34 -> triangle {12,13,23} is edges 1,2,4
        assert_eq!(k4.rank(labels(&[1, 2, 4], 6)).unwrap(), 2);
        let u24 = Matroid::uniform(2, 4).unwrap();
        assert_eq!(u24.rank(labels(&[1, 2, 3], 4)).unwrap(), 2);
        let u23 = Matroid::from_bases(3, &[Subset(0b011), Subset(0b101), Subset(0b110)])
            .unwrap()
            .contract(labels(&[1], 3))
            .unwrap();
        assert_eq!(u23.rank(labels(&[2, 3], 3)).unwrap(), 1);
        assert!(matches!(u23.rank(labels(&[1, 2], 3)), Err(Error::InvalidSubset { .. })));
    }

    #[test]
    fn contraction_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        assert_eq!(u23.contract(Subset::EMPTY).unwrap(), u23);
        let c = u23.contract(labels(&[1], 3)).unwrap();
        assert_eq!(c.rank(labels(&[2, 3], 3)).unwrap(), 1);
        assert_eq!(c.rank(labels(&[2], 3)).unwrap(), 1);

        let k4 = Matroid::complete_graph(4).unwrap();
        let c = k4.contract(labels(&[1], 6)).unwrap();
        // e13 (edge 2) and e23 (edge 4) become parallel
        assert_eq!(c.rank(labels(&[2, 4], 6)).unwrap(), 1);
        let p = c.parallel_partition().unwrap();
        assert_eq!(p.class_of(1), p.class_of(3));
    }

    #[test]
    fn parallel_partition_examples() {
        let u13 = Matroid::uniform(1, 3).unwrap();
        let p = u13.parallel_partition().unwrap();
        assert_eq!(p.loops, Subset::EMPTY);
        assert_eq!(p.classes, vec![Subset(0b111)]);

        let g = Matroid::graphic(3, vec![(0, 1), (1, 1), (1, 2)]).unwrap();
        let p = g.parallel_partition().unwrap();
        assert_eq!(p.loops, Subset::singleton(1));
        assert_eq!(p.classes.len(), 2);

        let c = Matroid::uniform(2, 3).unwrap().contract(labels(&[1], 3)).unwrap();
        let p = c.parallel_partition().unwrap();
        assert_eq!(p.loops, Subset::EMPTY);
        assert_eq!(p.classes, vec![labels(&[2, 3], 3)]);
    }

    #[test]
    fn to_setfunction_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        let rank = u23.to_setfunction(TableMode::Rank).unwrap();
        let nonempty: Vec<i64> = (1..8)
            .map(|m| rank.get(Subset(m)).to_integer().try_into().unwrap())
            .collect();
        assert_eq!(nonempty, vec![1, 1, 2, 1, 2, 2, 2]);
        let sorted: Vec<i64> = {
            let mut v: Vec<(usize, i64)> = (1..8u32)
                .map(|m| (m.count_ones() as usize, nonempty[m as usize - 1]))
                .collect();
            v.sort();
            v.into_iter().map(|(_, r)| r).collect()
        };
        assert_eq!(sorted, vec![1, 1, 1, 2, 2, 2, 2]);

        let ind = u23.to_setfunction(TableMode::Indicator).unwrap();
        assert!(ind.get(Subset::EMPTY).is_zero());
        let pairs: Vec<Subset> = ind.support().filter(|(s, _)| s.len() == 2).map(|(s, _)| s).collect();
        assert_eq!(pairs.len(), 3);
        assert!(ind.get(Subset(0b111)).is_zero());

        let k4 = Matroid::complete_graph(4)
            .unwrap()
            .to_setfunction(TableMode::Indicator)
            .unwrap();
        assert!(k4.get(labels(&[1, 2, 4], 6)).is_zero());
        assert!(k4.get(labels(&[1, 2, 3], 6)).is_one());

        assert!(matches!(Matroid::uniform(1, 25), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn validate_explicit_examples() {
        assert_eq!(validate_explicit(&family(&[&[], &[1], &[2]], 2)), Ok(()));
        assert_eq!(
            validate_explicit(&family(&[&[], &[1], &[1, 2]], 2)),
            Err(AxiomViolation::NotDownwardClosed {
                set: labels(&[1, 2], 2),
                missing: labels(&[2], 2),
            })
        );
        let u23 = family(&[&[], &[1], &[2], &[3], &[1, 2], &[1, 3], &[2, 3]], 3);
        assert_eq!(validate_explicit(&u23), Ok(()));
        let bad = family(&[&[], &[1], &[2], &[3], &[1, 2]], 3);
        assert!(matches!(validate_explicit(&bad), Err(AxiomViolation::Exchange { .. })));
        assert_eq!(validate_explicit(&HashSet::new()), Err(AxiomViolation::Empty));
        assert!(Matroid::explicit(3, [Subset(0), Subset(0b11)]).is_err());
    }

    fn variants() -> Vec<Matroid> {
        vec![
            Matroid::uniform(2, 5).unwrap(),
            Matroid::uniform(3, 6).unwrap(),
            Matroid::partition(
                6,
                vec![Subset(0b000011), Subset(0b011100), Subset(0b100000)],
                vec![1, 2, 0],
            )
            .unwrap(),
            Matroid::complete_graph(4).unwrap(),
            Matroid::graphic(4, vec![(0, 1), (0, 1), (1, 2), (2, 2), (2, 3), (3, 0), (1, 3)]).unwrap(),
            Matroid::from_bases(
                5,
                &[
                    Subset(0b00011),
                    Subset(0b00101),
                    Subset(0b00110),
                    Subset(0b01001),
                    Subset(0b01010),
                    Subset(0b01100),
                ],
            )
            .unwrap(),
        ]
    }

    #[test]
    fn rank_axioms_exhaustive() {
        for m in variants() {
            let n = m.n();
            for s in 0..1u32 << n {
                let s = Subset(s);
                let r = m.rank(s).unwrap();
                assert!(r <= s.len());
                for i in s.complement(n).iter() {
                    let gain = m.rank(s.with(i)).unwrap() - r;
                    assert!(gain <= 1, "{m:?} {s}");
                }
            }
            let table = m.to_setfunction(TableMode::Rank).unwrap();
            let p = predicates(&table);
            assert!(p.monotone.holds && p.submodular.holds, "{m:?}");
        }
    }

    #[test]
    fn case_table_under_every_contraction() {
        for m in variants() {
            for tau in 0..1u32 << m.n() {
                let c = m.contract(Subset(tau)).unwrap();
                let p = c.parallel_partition().unwrap();
                assert_eq!(p.loops.union(p.non_loops()), c.ground());
            }
        }
    }
}
