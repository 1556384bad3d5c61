//! Finite Kripke frames, relation algebra over successor bit rows, and the
//! cluster/skeleton/height analysis.

use crate::bits::BitSet;
use crate::error::Error;
use crate::partition::Partition;

/// A binary relation on `0..n`, one successor row per point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<BitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            rows: vec![BitSet::new(n); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Relation::empty(n);
        for x in 0..n {
            r.rows[x].insert(x);
        }
        r
    }

    pub fn universal(n: usize) -> Self {
        Relation {
            rows: vec![BitSet::full(n); n],
        }
    }

    pub fn from_rows(rows: Vec<BitSet>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must have width n");
        Relation { rows }
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, Error> {
        let mut r = Relation::empty(n);
        for &(u, v) in pairs {
            for p in [u, v] {
                if p >= n {
                    return Err(Error::PointOutOfRange { point: p, n });
                }
            }
            r.rows[u].insert(v);
        }
        Ok(r)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, x: usize) -> &BitSet {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        self.rows[u].insert(v);
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |v| (u, v)))
            .collect()
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    pub fn union_with(&mut self, other: &Relation) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.union_with(b);
        }
    }

    /// Relational composition `self ∘ other`: `x` to `z` through some `y`.
    pub fn compose(&self, other: &Relation) -> Result<Relation, Error> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch(self.n(), other.n()));
        }
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, other: &Relation) -> Relation {
        let n = self.n();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = BitSet::new(n);
                for y in row.iter() {
                    out.union_with(&other.rows[y]);
                }
                out
            })
            .collect();
        Relation { rows }
    }

    /// `R^i`, with `R^0 = Id`.
    pub fn power(&self, i: usize) -> Relation {
        // Square-and-multiply; powers of one relation commute.
        let mut acc = Relation::identity(self.n());
        let mut base = self.clone();
        let mut e = i;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose_unchecked(&base);
            }
        }
        acc
    }

    /// `R^{≤m} = Id ∪ R ∪ … ∪ R^m`.
    pub fn bounded_union(&self, m: usize) -> Relation {
        let mut acc = Relation::identity(self.n());
        let mut cur = Relation::identity(self.n());
        for _ in 0..m {
            cur = cur.compose_unchecked(self);
            acc.union_with(&cur);
        }
        acc
    }

    /// Reflexive-transitive closure, by a BFS from every point.
    pub fn rt_closure(&self) -> Relation {
        let n = self.n();
        let rows = (0..n).map(|x| self.reachable_from(x)).collect();
        Relation { rows }
    }

    /// `{y : x R* y}`.
    pub fn reachable_from(&self, x: usize) -> BitSet {
        let n = self.n();
        let mut seen = BitSet::new(n);
        seen.insert(x);
        let mut stack = vec![x];
        while let Some(u) = stack.pop() {
            for v in self.rows[u].iter() {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen
    }

    pub fn is_equivalence(&self) -> bool {
        let n = self.n();
        (0..n).all(|x| self.contains(x, x))
            && self.pairs().iter().all(|&(u, v)| self.contains(v, u))
            && self.compose_unchecked(self).is_subset(self)
    }
}

/// A Kripke frame: points `0..n` (`n ≥ 1`) and an accessibility relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    rel: Relation,
}

impl Frame {
    pub fn from_relation(rel: Relation) -> Result<Self, Error> {
        if rel.n() == 0 {
            return Err(Error::InvalidFrame("a frame needs at least one point".into()));
        }
        Ok(Frame { rel })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, Error> {
        Frame::from_relation(Relation::from_pairs(n, edges)?)
    }

    pub fn n(&self) -> usize {
        self.rel.n()
    }

    pub fn relation(&self) -> &Relation {
        &self.rel
    }

    pub fn successors(&self, x: usize) -> &BitSet {
        self.rel.row(x)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rel.contains(u, v)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.rel.pairs()
    }

    pub fn edge_count(&self) -> usize {
        self.rel.pair_count()
    }

    fn check_point(&self, x: usize) -> Result<(), Error> {
        if x >= self.n() {
            return Err(Error::PointOutOfRange { point: x, n: self.n() });
        }
        Ok(())
    }

    /// Least `m` with `R^{m+1} ⊆ R^{≤m}`. Always exists on finite frames.
    pub fn pretransitivity_index(&self) -> usize {
        let n = self.n();
        let mut upto = Relation::identity(n);
        let mut next = Relation::identity(n);
        let mut m = 0;
        loop {
            next = next.compose_unchecked(&self.rel);
            if next.is_subset(&upto) {
                return m;
            }
            upto.union_with(&next);
            m += 1;
        }
    }

    /// `R^{m+1} ⊆ R^{≤m}`.
    pub fn is_m_transitive(&self, m: usize) -> bool {
        self.rel.power(m + 1).is_subset(&self.rel.bounded_union(m))
    }

    /// `R^n ⊆ R^m`.
    pub fn is_mn_frame(&self, m: usize, n: usize) -> bool {
        self.rel.power(n).is_subset(&self.rel.power(m))
    }

    pub fn cluster_decomposition(&self) -> ClusterDecomposition {
        ClusterDecomposition::of(self)
    }

    /// `F ↾ V` for a nonempty `V`, with the map from new to old indices
    /// (ascending).
    pub fn restriction(&self, set: &BitSet) -> Result<(Frame, Vec<usize>), Error> {
        if set.len() != self.n() {
            return Err(Error::SizeMismatch(self.n(), set.len()));
        }
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let map = set.to_vec();
        let k = map.len();
        let mut local = vec![usize::MAX; self.n()];
        for (i, &x) in map.iter().enumerate() {
            local[x] = i;
        }
        let rows = map
            .iter()
            .map(|&x| {
                let mut row = BitSet::new(k);
                for y in self.rel.row(x).iter() {
                    if local[y] != usize::MAX {
                        row.insert(local[y]);
                    }
                }
                row
            })
            .collect();
        Ok((Frame::from_relation(Relation::from_rows(rows))?, map))
    }

    pub fn restriction_to(&self, points: &[usize]) -> Result<(Frame, Vec<usize>), Error> {
        for &x in points {
            self.check_point(x)?;
        }
        self.restriction(&BitSet::from_iter(self.n(), points.iter().copied()))
    }

    /// The subframe generated by `x`: the restriction to its `R*`-cone.
    pub fn generated_subframe(&self, x: usize) -> Result<(Frame, Vec<usize>), Error> {
        self.check_point(x)?;
        self.restriction(&self.rel.reachable_from(x))
    }

    /// Frame with the relation reversed.
    pub fn converse(&self) -> Frame {
        let n = self.n();
        let mut rel = Relation::empty(n);
        for (u, v) in self.edges() {
            rel.insert(v, u);
        }
        Frame { rel }
    }
}

/// The clusters (mutual `R*`-reachability classes), the skeleton order on
/// them, and point depths.
///
/// Cluster indices follow the partition's block order (by least point).
/// `depth(x)` counts the clusters on the longest skeleton chain starting at
/// `[x]`, so maximal (final) clusters have depth 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterDecomposition {
    pub clusters: Partition,
    /// `skeleton_order[c]` holds every cluster `d` with `c ≤_R d`.
    pub skeleton_order: Vec<BitSet>,
    pub depth: Vec<usize>,
    pub height: usize,
}

impl ClusterDecomposition {
    pub fn of(frame: &Frame) -> Self {
        let n = frame.n();
        let comp = tarjan(frame);
        let clusters = Partition::from_labels(&comp);
        let k = clusters.len();

        // Condensation edges between distinct clusters.
        let mut succ = vec![BitSet::new(k); k];
        for (u, v) in frame.edges() {
            let (cu, cv) = (clusters.block_of(u), clusters.block_of(v));
            if cu != cv {
                succ[cu].insert(cv);
            }
        }

        // Tarjan emits components in reverse topological order; recover an
        // order where successors come first.
        let order = topo_sinks_first(&succ);
        let mut skeleton_order = vec![BitSet::new(k); k];
        let mut cdepth = vec![0usize; k];
        for &c in &order {
            let mut reach = BitSet::new(k);
            reach.insert(c);
            let mut best = 0;
            for d in succ[c].iter() {
                reach.union_with(&skeleton_order[d]);
                best = best.max(cdepth[d]);
            }
            skeleton_order[c] = reach;
            cdepth[c] = best + 1;
        }
        let depth: Vec<usize> = (0..n).map(|x| cdepth[clusters.block_of(x)]).collect();
        let height = cdepth.iter().copied().max().unwrap_or(0);
        ClusterDecomposition {
            clusters,
            skeleton_order,
            depth,
            height,
        }
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, x: usize) -> usize {
        self.clusters.block_of(x)
    }

    pub fn cluster(&self, c: usize) -> &[usize] {
        self.clusters.block(c)
    }

    pub fn max_cluster_size(&self) -> usize {
        self.clusters.max_block_size()
    }

    /// `[c] ≤_R [d]`.
    pub fn le(&self, c: usize, d: usize) -> bool {
        self.skeleton_order[c].contains(d)
    }

    pub fn cluster_depth(&self, c: usize) -> usize {
        self.depth[self.clusters.block(c)[0]]
    }

    /// Points of depth exactly `i`.
    pub fn layer(&self, i: usize) -> Vec<usize> {
        (0..self.depth.len()).filter(|&x| self.depth[x] == i).collect()
    }
}

/// Iterative Tarjan SCC; returns a component id per point.
fn tarjan(frame: &Frame) -> Vec<usize> {
    let n = frame.n();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let succs: Vec<Vec<usize>> = (0..n).map(|x| frame.successors(x).to_vec()).collect();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, pos)) = call.last() {
            if pos < succs[v].len() {
                let w = succs[v][pos];
                if let Some(top) = call.last_mut() {
                    top.1 += 1;
                }
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Topological order of a DAG given by successor rows, sinks first.
fn topo_sinks_first(succ: &[BitSet]) -> Vec<usize> {
    let k = succ.len();
    let mut out_deg: Vec<usize> = succ.iter().map(BitSet::count).collect();
    let mut pred = vec![Vec::new(); k];
    for (c, row) in succ.iter().enumerate() {
        for d in row.iter() {
            pred[d].push(c);
        }
    }
    let mut ready: Vec<usize> = (0..k).filter(|&c| out_deg[c] == 0).collect();
    let mut order = Vec::with_capacity(k);
    while let Some(c) = ready.pop() {
        order.push(c);
        for &p in &pred[c] {
            out_deg[p] -= 1;
            if out_deg[p] == 0 {
                ready.push(p);
            }
        }
    }
    debug_assert_eq!(order.len(), k, "condensation has a cycle");
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Frame {
        Frame::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn cycle3() -> Frame {
        Frame::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn rejects_bad_frames() {
        assert!(Frame::from_edges(0, &[]).is_err());
        assert!(Frame::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn composition_examples() {
        let r = chain3().relation().clone();
        assert_eq!(r.compose(&r).unwrap().pairs(), vec![(0, 2)]);
        assert_eq!(Relation::identity(3).compose(&r).unwrap(), r);
        assert_eq!(Relation::empty(3).compose(&r).unwrap(), Relation::empty(3));
        assert!(r.compose(&Relation::empty(2)).is_err());
    }

    #[test]
    fn power_and_closure_examples() {
        let r = chain3().relation().clone();
        assert_eq!(r.power(3), Relation::empty(3));
        assert_eq!(r.power(0), Relation::identity(3));
        assert_eq!(r.bounded_union(0), Relation::identity(3));
        assert_eq!(cycle3().relation().rt_closure(), Relation::universal(3));
        assert_eq!(cycle3().relation().power(4), *cycle3().relation());
    }

    #[test]
    fn pretransitivity_examples() {
        assert_eq!(Frame::from_edges(3, &[]).unwrap().pretransitivity_index(), 0);
        assert_eq!(Frame::from_edges(1, &[(0, 0)]).unwrap().pretransitivity_index(), 0);
        assert_eq!(chain3().pretransitivity_index(), 2);
        assert_eq!(cycle3().pretransitivity_index(), 2);
        assert!(!chain3().is_m_transitive(1));
        assert!(chain3().is_m_transitive(2));
    }

    #[test]
    fn mn_examples() {
        for m in 0..4 {
            assert!(chain3().is_mn_frame(m, m));
        }
        assert!(!chain3().is_mn_frame(1, 2));
        assert!(cycle3().is_mn_frame(1, 4));
    }

    #[test]
    fn cluster_examples() {
        let d = chain3().cluster_decomposition();
        assert_eq!(d.cluster_count(), 3);
        assert_eq!(d.height, 3);
        assert_eq!(d.depth, vec![3, 2, 1]);
        assert!(d.le(0, 2) && !d.le(2, 0));

        let d = cycle3().cluster_decomposition();
        assert_eq!(d.cluster_count(), 1);
        assert_eq!(d.height, 1);

        let d = Frame::from_edges(2, &[]).unwrap().cluster_decomposition();
        assert_eq!(d.cluster_count(), 2);
        assert_eq!(d.height, 1);
    }

    #[test]
    fn subframe_examples() {
        let (g, map) = chain3().generated_subframe(2).unwrap();
        assert_eq!((g.n(), g.edge_count(), map), (1, 0, vec![2]));
        let (g, _) = chain3().generated_subframe(0).unwrap();
        assert_eq!(g, chain3());
        let (g, _) = cycle3().generated_subframe(1).unwrap();
        assert_eq!(g, cycle3());
        assert!(chain3().generated_subframe(3).is_err());

        let (g, map) = chain3().restriction_to(&[0, 1, 2]).unwrap();
        assert_eq!((g, map), (chain3(), vec![0, 1, 2]));
        let (g, map) = chain3().restriction_to(&[0, 2]).unwrap();
        assert_eq!((g.n(), g.edge_count(), map), (2, 0, vec![0, 2]));
        let (g, map) = cycle3().restriction_to(&[0, 1]).unwrap();
        assert_eq!((g.edges(), map), (vec![(0, 1)], vec![0, 1]));
        assert_eq!(chain3().restriction_to(&[]), Err(Error::EmptySet));
    }
}
