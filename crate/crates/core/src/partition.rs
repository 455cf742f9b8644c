//! Equivalence relations on `{0..n-1}` in canonical form.
//!
//! Every point is labelled by the least element of its block, so two
//! partitions are equal exactly when their label vectors are equal.

use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<usize>>", try_from = "Vec<Vec<usize>>")]
pub struct Partition {
    labels: Vec<u8>,
}

impl Partition {
    /// The identity relation `0`.
    pub fn discrete(n: usize) -> Self {
        Partition {
            labels: (0..n).map(|i| i as u8).collect(),
        }
    }

    /// The full relation `1`.
    pub fn total(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
        }
    }

    /// Canonicalizes an arbitrary labelling: points with equal labels share a block.
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut first = std::collections::HashMap::new();
        let labels = labels
            .iter()
            .enumerate()
            .map(|(i, l)| *first.entry(*l).or_insert(i as u8))
            .collect();
        Partition { labels }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut uf = UnionFind::<usize>::new(n);
        let mut seen = vec![false; n];
        for block in blocks {
            for &p in block {
                if p >= n {
                    return Err(Error::OutOfRange { point: p, order: n });
                }
                if seen[p] {
                    return Err(Error::MalformedTable(format!("point {p} appears in two blocks")));
                }
                seen[p] = true;
                uf.union(block[0], p);
            }
        }
        Ok(Self::from_union_find(uf))
    }

    /// The least equivalence containing `pairs`.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut uf = UnionFind::<usize>::new(n);
        for (a, b) in pairs {
            uf.union(a, b);
        }
        Self::from_union_find(uf)
    }

    pub(crate) fn from_union_find(uf: UnionFind<usize>) -> Self {
        Self::from_labels(&uf.into_labeling())
    }

    pub(crate) fn to_union_find(&self) -> UnionFind<usize> {
        let mut uf = UnionFind::new(self.len());
        for (i, &l) in self.labels.iter().enumerate() {
            uf.union(i, l as usize);
        }
        uf
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Least element of the block of `x`.
    #[inline]
    pub fn label(&self, x: usize) -> usize {
        self.labels[x] as usize
    }

    #[inline]
    pub fn related(&self, x: usize, y: usize) -> bool {
        self.labels[x] == self.labels[y]
    }

    pub fn is_discrete(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l as usize == i)
    }

    pub fn is_total(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    pub fn block_count(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|(i, &l)| l as usize == *i)
            .count()
    }

    /// Blocks ordered by their least element; each block sorted.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let index = self.block_index();
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, &b) in index.iter().enumerate() {
            blocks[b].push(i);
        }
        blocks
    }

    /// Maps each point to the position of its block in [`Partition::blocks`].
    pub fn block_index(&self) -> Vec<usize> {
        let mut next = 0;
        let mut of_label = vec![usize::MAX; self.len()];
        self.labels
            .iter()
            .map(|&l| {
                let slot = &mut of_label[l as usize];
                if *slot == usize::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
            .collect()
    }

    /// Pairs `(x, label(x))` with `x` not a block minimum. Their equivalence
    /// closure is `self`.
    pub fn spanning_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(i, &l)| l as usize != *i)
            .map(|(i, &l)| (i, l as usize))
    }

    /// All ordered pairs `(x, y)` with `x ~ y`, including the diagonal.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for block in self.blocks() {
            for &x in &block {
                for &y in &block {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// `self ⊆ other` as relations.
    pub fn leq(&self, other: &Partition) -> bool {
        debug_assert_eq!(self.len(), other.len());
        self.labels
            .iter()
            .enumerate()
            .all(|(i, &l)| other.related(i, l as usize))
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        debug_assert_eq!(self.len(), other.len());
        let pairs: Vec<(u8, u8)> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| (a, b))
            .collect();
        Partition::from_labels(&pairs)
    }

    /// Join in the lattice of equivalences (transitive closure of the union).
    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = self.to_union_find();
        for (a, b) in other.spanning_pairs() {
            uf.union(a, b);
        }
        Self::from_union_find(uf)
    }

    /// Image of the relation on the blocks of `coarse`, given as block indices.
    /// Requires `self` and `coarse` on the same carrier; used for `β/α`.
    pub(crate) fn project(&self, block_of: &[usize], blocks: usize) -> Partition {
        let mut uf = UnionFind::<usize>::new(blocks);
        for (a, b) in self.spanning_pairs() {
            uf.union(block_of[a], block_of[b]);
        }
        Self::from_union_find(uf)
    }

    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels.iter().map(|&l| l as usize)
    }

    /// Parses `"0,2|1,3"`; points not mentioned become singletons.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::discrete(n));
        }
        if text == "1" {
            return Ok(Self::total(n));
        }
        let mut blocks = Vec::new();
        for block in text.split('|') {
            let block: Vec<usize> = block
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::MalformedTable(format!("bad point `{s}` in partition")))
                })
                .collect::<Result<_>>()?;
            if !block.is_empty() {
                blocks.push(block);
            }
        }
        Self::from_blocks(n, &blocks)
    }
}

impl From<Partition> for Vec<Vec<usize>> {
    fn from(p: Partition) -> Self {
        p.blocks()
    }
}

impl TryFrom<Vec<Vec<usize>>> for Partition {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.iter().map(Vec::len).sum();
        Partition::from_blocks(n, &blocks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = self.blocks();
        for (i, block) in blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, p) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_labels_are_block_minima() {
        let p = Partition::from_labels(&[7, 3, 7, 3, 9]);
        assert_eq!(p.labels().collect::<Vec<_>>(), vec![0, 1, 0, 1, 4]);
        assert_eq!(p.blocks(), vec![vec![0, 2], vec![1, 3], vec![4]]);
        assert_eq!(p.to_string(), "0,2|1,3|4");
    }

    #[test]
    fn parse_round_trips() {
        let p = Partition::parse(5, "1,3|0,2").unwrap();
        assert_eq!(p.to_string(), "0,2|1,3|4");
        assert!(Partition::parse(3, "0,1|1,2").is_err());
        assert!(Partition::parse(3, "0,5").is_err());
        assert!(Partition::parse(3, "1").unwrap().is_total());
    }

    #[test]
    fn lattice_basics() {
        let a = Partition::parse(4, "0,1").unwrap();
        let b = Partition::parse(4, "1,2").unwrap();
        assert_eq!(a.join(&b).to_string(), "0,1,2|3");
        assert!(a.meet(&b).is_discrete());
        assert!(a.leq(&a.join(&b)));
        assert!(!a.leq(&b));
        assert_eq!(a.meet(&Partition::total(4)), a);
    }

    fn arb_partition(n: usize) -> impl Strategy<Value = Partition> {
        proptest::collection::vec(0..n, n).prop_map(|l| Partition::from_labels(&l))
    }

    proptest! {
        #[test]
        fn meet_and_join_bound(a in arb_partition(6), b in arb_partition(6)) {
            let m = a.meet(&b);
            let j = a.join(&b);
            prop_assert!(m.leq(&a) && m.leq(&b));
            prop_assert!(a.leq(&j) && b.leq(&j));
            prop_assert_eq!(a.leq(&b), a.meet(&b) == a);
            prop_assert_eq!(a.leq(&b), a.join(&b) == b);
        }

        #[test]
        fn spanning_pairs_regenerate(a in arb_partition(7)) {
            prop_assert_eq!(Partition::from_pairs(7, a.spanning_pairs()), a.clone());
            prop_assert_eq!(Partition::from_blocks(7, &a.blocks()).unwrap(), a);
        }
    }
}
