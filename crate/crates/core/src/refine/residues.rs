//! Loop lengths modulo `k` via reachability in the product graph
//! `points × Z_k`, and the mod-`d` equivalence on a cluster.

use crate::bits::BitSet;
use crate::error::Error;
use crate::frame::Frame;

/// A subgroup of `Z_k`: the residues of loop lengths at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSubgroup {
    k: usize,
    elements: BitSet,
}

impl ResidueSubgroup {
    pub fn modulus(&self) -> usize {
        self.k
    }

    pub fn contains(&self, r: usize) -> bool {
        self.elements.contains(r % self.k)
    }

    pub fn elements(&self) -> Vec<usize> {
        self.elements.to_vec()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.count() == 1
    }

    pub fn least_nonzero(&self) -> Option<usize> {
        self.elements.iter().find(|&r| r != 0)
    }

    /// Contains 0 and is closed under addition and negation mod `k`.
    pub fn is_subgroup(&self) -> bool {
        let k = self.k;
        let els = self.elements();
        self.contains(0)
            && els
                .iter()
                .all(|&a| self.contains((k - a) % k) && els.iter().all(|&b| self.contains(a + b)))
    }
}

/// `{len(α) mod k : α a u-loop}`; the empty loop contributes 0.
pub fn loop_residues(frame: &Frame, u: usize, k: usize) -> Result<ResidueSubgroup, Error> {
    if k == 0 {
        return Err(Error::Precondition("modulus k must be at least 1".into()));
    }
    let n = frame.n();
    if u >= n {
        return Err(Error::PointOutOfRange { point: u, n });
    }
    // state (v, r) ↦ v * k + r
    let mut seen = BitSet::new(n * k);
    seen.insert(u * k);
    let mut stack = vec![(u, 0usize)];
    while let Some((v, r)) = stack.pop() {
        let r2 = (r + 1) % k;
        for w in frame.successors(v).iter() {
            if seen.insert(w * k + r2) {
                stack.push((w, r2));
            }
        }
    }
    let elements = BitSet::from_iter(k, (0..k).filter(|&r| seen.contains(u * k + r)));
    Ok(ResidueSubgroup { k, elements })
}

/// Checks that `cluster` is exactly one mutual-reachability class.
pub(crate) fn check_cluster(frame: &Frame, cluster: &[usize]) -> Result<BitSet, Error> {
    let n = frame.n();
    let &first = cluster.first().ok_or(Error::NotACluster)?;
    for &x in cluster {
        if x >= n {
            return Err(Error::PointOutOfRange { point: x, n });
        }
    }
    let set = BitSet::from_iter(n, cluster.iter().copied());
    let mut scc = frame.relation().reachable_from(first);
    scc.intersect_with(&frame.converse().relation().reachable_from(first));
    if scc != set {
        return Err(Error::NotACluster);
    }
    Ok(set)
}

/// The step `d`: `k` when the residues at the cluster are trivial, otherwise
/// their least nonzero element. `d` divides `k` and every loop length in the
/// cluster.
pub fn choose_d(frame: &Frame, cluster: &[usize], k: usize) -> Result<usize, Error> {
    check_cluster(frame, cluster)?;
    let g = loop_residues(frame, cluster[0], k)?;
    if cfg!(debug_assertions) && cluster.len() > 1 {
        let other = loop_residues(frame, cluster[cluster.len() - 1], k)?;
        debug_assert_eq!(g, other, "loop residues differ inside one cluster");
    }
    Ok(g.least_nonzero().unwrap_or(k))
}

/// Classes of `w ≼_d v` (some `w → v` path of length divisible by `d`) on a
/// cluster, as sorted point lists ordered by least member.
///
/// Fails with [`Error::Internal`] when `d` does not divide every loop length,
/// since `≼_d` is then not an equivalence with residue classes.
pub fn mod_d_partition(frame: &Frame, cluster: &[usize], d: usize) -> Result<Vec<Vec<usize>>, Error> {
    if d == 0 {
        return Err(Error::Precondition("d must be at least 1".into()));
    }
    let inside = check_cluster(frame, cluster)?;
    let n = frame.n();
    let base = cluster[0];
    // residue of every path base → v, which is unique under the precondition
    let mut residue = vec![usize::MAX; n];
    residue[base] = 0;
    let mut stack = vec![base];
    while let Some(v) = stack.pop() {
        let r = (residue[v] + 1) % d;
        for w in frame.successors(v).iter() {
            if !inside.contains(w) {
                continue;
            }
            if residue[w] == usize::MAX {
                residue[w] = r;
                stack.push(w);
            } else if residue[w] != r {
                return Err(Error::Internal(format!(
                    "d = {d} does not divide every loop length of the cluster"
                )));
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); d];
    let mut sorted = cluster.to_vec();
    sorted.sort_unstable();
    for x in sorted {
        classes[residue[x]].push(x);
    }
    classes.retain(|c| !c.is_empty());
    classes.sort_by_key(|c| c[0]);
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reflexive_point() -> Frame {
        Frame::from_edges(1, &[(0, 0)]).unwrap()
    }

    fn cycle(k: usize) -> Frame {
        let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Frame::from_edges(k, &edges).unwrap()
    }

    #[test]
    fn residue_examples() {
        assert_eq!(loop_residues(&reflexive_point(), 0, 3).unwrap().elements(), vec![0, 1, 2]);
        assert_eq!(loop_residues(&cycle(3), 0, 3).unwrap().elements(), vec![0]);
        assert_eq!(loop_residues(&cycle(2), 0, 4).unwrap().elements(), vec![0, 2]);
        let chain = Frame::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(loop_residues(&chain, 0, 5).unwrap().elements(), vec![0]);
        assert!(loop_residues(&chain, 0, 0).is_err());
        assert!(loop_residues(&chain, 3, 2).is_err());
    }

    #[test]
    fn choose_d_examples() {
        assert_eq!(choose_d(&cycle(3), &[0, 1, 2], 3).unwrap(), 3);
        assert_eq!(choose_d(&reflexive_point(), &[0], 3).unwrap(), 1);
        assert_eq!(choose_d(&cycle(2), &[0, 1], 4).unwrap(), 2);
        let chain = Frame::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(choose_d(&chain, &[0, 1], 2), Err(Error::NotACluster));
        assert_eq!(choose_d(&cycle(3), &[0, 1], 2), Err(Error::NotACluster));
        assert_eq!(choose_d(&cycle(3), &[], 2), Err(Error::NotACluster));
    }

    #[test]
    fn mod_d_examples() {
        assert_eq!(mod_d_partition(&cycle(3), &[0, 1, 2], 3).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(mod_d_partition(&reflexive_point(), &[0], 1).unwrap(), vec![vec![0]]);
        assert_eq!(mod_d_partition(&cycle(2), &[0, 1], 2).unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(mod_d_partition(&cycle(6), &[0, 1, 2, 3, 4, 5], 2).unwrap(), vec![vec![0, 2, 4], vec![1, 3, 5]]);
        assert!(matches!(mod_d_partition(&cycle(3), &[0, 1, 2], 2), Err(Error::Internal(_))));
    }
}
