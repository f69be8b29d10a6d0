//! Small-set representation of node indices as a 64-bit mask.

use std::fmt;

/// Maximum number of nodes a graph may carry.
pub const MAX_NODES: usize = 64;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(pub u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn singleton(i: usize) -> Self {
        NodeSet(1 << i)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn with(self, i: usize) -> Self {
        NodeSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        NodeSet(self.0 & !(1 << i))
    }

    pub fn union(self, other: NodeSet) -> Self {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> Self {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> Self {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: NodeSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> NodeSetIter {
        NodeSetIter(self.0)
    }

    /// All subsets of `self`, in increasing order of their bit patterns.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Subsets of `self` with exactly `k` elements, in lexicographic order of
    /// their sorted element lists.
    pub fn subsets_of_size(self, k: usize) -> Vec<NodeSet> {
        let elems: Vec<usize> = self.iter().collect();
        let mut out = Vec::new();
        if k > elems.len() {
            return out;
        }
        let n = elems.len();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().map(|&i| elems[i]).collect());
            let Some(p) = (0..k).rev().find(|&p| idx[p] < p + n - k) else {
                return out;
            };
            idx[p] += 1;
            for j in p + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = NodeSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl IntoIterator for NodeSet {
    type Item = usize;
    type IntoIter = NodeSetIter;
    fn into_iter(self) -> NodeSetIter {
        self.iter()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct NodeSetIter(u64);

impl Iterator for NodeSetIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for NodeSetIter {}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = NodeSet;
    fn next(&mut self) -> Option<NodeSet> {
        let cur = self.next?;
        // standard submask enumeration in increasing order
        let nxt = (cur | !self.mask).wrapping_add(1) & self.mask;
        self.next = (nxt != 0).then_some(nxt);
        Some(NodeSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_every_submask_once() {
        let s: NodeSet = [1, 3, 4].into_iter().collect();
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset(s)));
        let mut sorted = subs.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
    }

    #[test]
    fn subsets_of_size_are_lexicographic() {
        let s: NodeSet = [0, 2, 5, 7].into_iter().collect();
        let got: Vec<Vec<usize>> = s
            .subsets_of_size(2)
            .into_iter()
            .map(|x| x.iter().collect())
            .collect();
        assert_eq!(
            got,
            vec![
                vec![0, 2],
                vec![0, 5],
                vec![0, 7],
                vec![2, 5],
                vec![2, 7],
                vec![5, 7]
            ]
        );
        assert_eq!(s.subsets_of_size(0), vec![NodeSet::EMPTY]);
        assert_eq!(s.subsets_of_size(4), vec![s]);
        assert!(s.subsets_of_size(5).is_empty());
        assert!(NodeSet::EMPTY.subsets_of_size(1).is_empty());
    }
}
