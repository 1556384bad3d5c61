//! Partitions of a frame's points, minimal filtrations, properness, and the
//! refinement/composition algebra.

use std::collections::HashMap;
use std::hash::Hash;

use crate::bits::BitSet;
use crate::error::Error;
use crate::formula::Formula;
use crate::frame::{Frame, Relation};
use crate::model::{formula_partition, Model};

/// Disjoint nonempty blocks covering `0..n`. Blocks are stored sorted and
/// ordered by their least element, so equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, Error> {
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in b {
                if x >= n {
                    return Err(Error::InvalidPartition(format!("point {x} out of range 0..{n}")));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidPartition(format!("point {x} in two blocks")));
                }
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("point {x} not covered")));
        }
        let mut labels = vec![0; n];
        for (i, b) in blocks.iter().enumerate() {
            for &x in b {
                labels[x] = i;
            }
        }
        Ok(Self::from_labels(&labels))
    }

    /// Groups points with equal labels. Block order is by least member.
    pub fn from_labels<K: Eq + Hash>(labels: &[K]) -> Self {
        let mut index: HashMap<&K, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (x, k) in labels.iter().enumerate() {
            let next = blocks.len();
            let b = *index.entry(k).or_insert(next);
            if b == next {
                blocks.push(Vec::new());
            }
            blocks[b].push(x);
            block_of.push(b);
        }
        // Scanning points in order already yields blocks sorted by least
        // element with sorted members.
        Partition { blocks, block_of }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|x| vec![x]).collect(),
            block_of: (0..n).collect(),
        }
    }

    pub fn single_block(n: usize) -> Self {
        assert!(n >= 1);
        Partition {
            blocks: vec![(0..n).collect()],
            block_of: vec![0; n],
        }
    }

    /// Number of points partitioned.
    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True iff every block of `self` lies inside a block of `coarse`.
    pub fn is_refinement_of(&self, coarse: &Partition) -> Result<bool, Error> {
        is_refinement(self, coarse)
    }

    /// Image of a point set under the block projection.
    pub fn image(&self, set: &BitSet) -> BitSet {
        BitSet::from_iter(self.len(), set.iter().map(|x| self.block_of[x]))
    }
}

fn same_n(a: &Partition, b: &Partition) -> Result<(), Error> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    Ok(())
}

pub fn is_refinement(fine: &Partition, coarse: &Partition) -> Result<bool, Error> {
    same_n(fine, coarse)?;
    Ok(fine.blocks.iter().all(|b| {
        let c = coarse.block_of[b[0]];
        b.iter().all(|&x| coarse.block_of[x] == c)
    }))
}

/// The coarsest common refinement.
pub fn meet(a: &Partition, b: &Partition) -> Result<Partition, Error> {
    same_n(a, b)?;
    let labels: Vec<(usize, usize)> = (0..a.n()).map(|x| (a.block_of[x], b.block_of[x])).collect();
    Ok(Partition::from_labels(&labels))
}

/// Minimal filtration: blocks become points, `U → V` iff some member of `U`
/// sees some member of `V`. Returns the quotient frame and the projection.
pub fn minimal_filtration(frame: &Frame, p: &Partition) -> Result<(Frame, Vec<usize>), Error> {
    if p.n() != frame.n() {
        return Err(Error::SizeMismatch(frame.n(), p.n()));
    }
    let k = p.len();
    let mut rows = vec![BitSet::new(k); k];
    for u in 0..frame.n() {
        let bu = p.block_of[u];
        for v in frame.successors(u).iter() {
            rows[bu].insert(p.block_of[v]);
        }
    }
    let rel = Relation::from_rows(rows);
    Ok((Frame::from_relation(rel)?, p.block_of.clone()))
}

/// Filtrates a model through `p`, which must refine `∼_f`. The new valuation
/// is the image of the old one for each variable of `f`; every subformula of
/// `f` keeps its truth value along the projection.
pub fn filtrate_model(model: &Model, p: &Partition, f: &Formula) -> Result<(Model, Vec<usize>), Error> {
    let agree = formula_partition(model, f);
    if !is_refinement(p, &agree)? {
        return Err(Error::NotAgreeing);
    }
    let (frame, proj) = minimal_filtration(model.frame(), p)?;
    let mut val = std::collections::BTreeMap::new();
    for v in f.vars() {
        val.insert(v, p.image(&model.truth_of_var(v)));
    }
    Ok((Model::new(frame, val)?, proj))
}

/// Properness: whenever one member of `U` sees `V`, every member of `U` does.
/// Equivalently, all members of a block see the same set of blocks.
pub fn is_proper(frame: &Frame, p: &Partition) -> Result<bool, Error> {
    if p.n() != frame.n() {
        return Err(Error::SizeMismatch(frame.n(), p.n()));
    }
    let sees = |u: usize| p.image(frame.successors(u));
    Ok(p.blocks.iter().all(|b| {
        let first = sees(b[0]);
        b[1..].iter().all(|&u| sees(u) == first)
    }))
}

/// Flattens a partition of `a`'s blocks into a partition of points: each
/// block of `over_a` becomes the union of the `a`-blocks it groups.
pub fn compose_partitions(a: &Partition, over_a: &Partition) -> Result<Partition, Error> {
    if over_a.n() != a.len() {
        return Err(Error::SizeMismatch(a.len(), over_a.n()));
    }
    let labels: Vec<usize> = (0..a.n()).map(|x| over_a.block_of[a.block_of[x]]).collect();
    Ok(Partition::from_labels(&labels))
}

/// Restricts `p` to the points of `set`, expressed in the local indices of
/// `set` (ascending order).
pub fn restrict(p: &Partition, set: &[usize]) -> Partition {
    let labels: Vec<usize> = set.iter().map(|&x| p.block_of[x]).collect();
    Partition::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(n: usize, blocks: &[&[usize]]) -> Partition {
        Partition::from_blocks(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    fn chain3() -> Frame {
        Frame::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn cycle3() -> Frame {
        Frame::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Partition::from_blocks(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::from_blocks(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::from_blocks(3, vec![vec![0, 1, 2], vec![]]).is_err());
        assert!(Partition::from_blocks(3, vec![vec![0, 1, 3]]).is_err());
        let p = part(3, &[&[2, 0], &[1]]);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1]]);
        assert_eq!(p.block_of(2), 0);
    }

    #[test]
    fn refinement_and_meet() {
        let a = part(3, &[&[0, 1], &[2]]);
        let b = part(3, &[&[0], &[1, 2]]);
        assert!(is_refinement(&Partition::singletons(3), &a).unwrap());
        assert!(is_refinement(&a, &a).unwrap());
        assert!(!is_refinement(&a, &b).unwrap());
        assert_eq!(meet(&a, &b).unwrap(), Partition::singletons(3));
        assert_eq!(meet(&a, &a).unwrap(), a);
        assert_eq!(meet(&a, &Partition::singletons(3)).unwrap(), Partition::singletons(3));
        assert!(matches!(
            is_refinement(&a, &Partition::singletons(4)),
            Err(Error::SizeMismatch(3, 4))
        ));
        assert!(meet(&a, &Partition::singletons(2)).is_err());
    }

    #[test]
    fn filtration_examples() {
        let f = chain3();
        let (g, proj) = minimal_filtration(&f, &Partition::singletons(3)).unwrap();
        assert_eq!(g, f);
        assert_eq!(proj, vec![0, 1, 2]);

        let (g, _) = minimal_filtration(&f, &Partition::single_block(3)).unwrap();
        assert_eq!(g.n(), 1);
        assert!(g.has_edge(0, 0));
        let empty = Frame::from_edges(2, &[]).unwrap();
        let (g, _) = minimal_filtration(&empty, &Partition::single_block(2)).unwrap();
        assert!(!g.has_edge(0, 0));

        let (g, proj) = minimal_filtration(&f, &part(3, &[&[0, 2], &[1]])).unwrap();
        assert_eq!(proj, vec![0, 1, 0]);
        assert_eq!(g.edges(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn properness_examples() {
        assert!(is_proper(&chain3(), &Partition::singletons(3)).unwrap());
        assert!(!is_proper(&chain3(), &part(3, &[&[0, 1], &[2]])).unwrap());
        assert!(is_proper(&cycle3(), &Partition::single_block(3)).unwrap());
    }

    #[test]
    fn composition_examples() {
        let a = Partition::singletons(3);
        assert_eq!(compose_partitions(&a, &Partition::singletons(3)).unwrap(), a);
        assert_eq!(
            compose_partitions(&a, &Partition::single_block(3)).unwrap(),
            Partition::single_block(3)
        );
        let grouped = part(3, &[&[0, 1], &[2]]);
        assert_eq!(compose_partitions(&a, &grouped).unwrap(), grouped);
        assert!(compose_partitions(&a, &Partition::singletons(2)).is_err());

        let a = part(4, &[&[0, 3], &[1], &[2]]);
        let over = part(3, &[&[0, 2], &[1]]);
        assert_eq!(
            compose_partitions(&a, &over).unwrap(),
            part(4, &[&[0, 2, 3], &[1]])
        );
    }

    #[test]
    fn filtrate_model_rejects_disagreeing_partition() {
        let m = Model::new(chain3(), [(1, BitSet::from_iter(3, [2]))].into()).unwrap();
        let f = Formula::dia(Formula::var(1));
        assert!(matches!(
            filtrate_model(&m, &Partition::single_block(3), &f),
            Err(Error::NotAgreeing)
        ));
        let (m2, proj) = filtrate_model(&m, &Partition::singletons(3), &f).unwrap();
        assert_eq!(m2.frame(), m.frame());
        assert_eq!(proj, vec![0, 1, 2]);
        assert_eq!(m2.truth_of_var(1), BitSet::from_iter(3, [2]));
    }
}
