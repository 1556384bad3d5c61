//! Canonical keys for the per-point cluster structures used by the proper
//! refinement: a cluster with its restricted relation, two families of unary
//! predicates, and a designated point.
//!
//! The key is the lexicographically least labelled adjacency encoding over
//! all leaves of an individualization/refinement search tree. Automorphisms
//! found at equal leaves prune sibling subtrees, which keeps symmetric
//! clusters (complete graphs, cycles) cheap.

use crate::bits::BitSet;
use crate::error::Error;

/// Largest carrier accepted by [`omega_signature`] unless overridden.
pub const DEFAULT_CARRIER_CAP: usize = 16;

/// Structure attached to a point `u` of layer `i`: its cluster `C`, `R ↾ C`,
/// for each carrier point the upper blocks it sees (`p_flags`) and its block
/// of the initial partition (`t_flags`), and `u` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaStructure {
    /// Original point indices, ascending.
    pub carrier: Vec<usize>,
    /// Local adjacency: `rel[i]` holds the local indices `i` sees.
    pub rel: Vec<BitSet>,
    pub p_flags: Vec<BitSet>,
    pub t_flags: Vec<usize>,
    /// Local index of the designated point.
    pub designated: usize,
}

impl OmegaStructure {
    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    fn label(&self, v: usize) -> VertexLabel {
        VertexLabel {
            designated: v == self.designated,
            block: self.t_flags[v],
            sees: self.p_flags[v].clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexLabel {
    designated: bool,
    block: usize,
    sees: BitSet,
}

/// Canonical form of an [`OmegaStructure`]: equal iff the structures are
/// isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OmegaKey {
    labels: Vec<VertexLabel>,
    adjacency: Vec<u64>,
}

pub fn omega_signature(s: &OmegaStructure) -> Result<OmegaKey, Error> {
    omega_signature_capped(s, DEFAULT_CARRIER_CAP)
}

pub fn omega_signature_capped(s: &OmegaStructure, cap: usize) -> Result<OmegaKey, Error> {
    let k = s.size();
    if k > cap {
        return Err(Error::CapExceeded {
            what: "cluster size",
            got: k,
            cap,
        });
    }
    if k == 0 || s.designated >= k {
        return Err(Error::Internal("malformed cluster structure".into()));
    }
    let labels: Vec<VertexLabel> = (0..k).map(|v| s.label(v)).collect();
    let mut distinct = labels.clone();
    distinct.sort();
    distinct.dedup();
    let color: Vec<usize> = labels
        .iter()
        .map(|l| distinct.binary_search(l).expect("label present"))
        .collect();

    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); distinct.len()];
    for v in 0..k {
        cells[color[v]].push(v);
    }

    let inverse: Vec<BitSet> = {
        let mut inv = vec![BitSet::new(k); k];
        for u in 0..k {
            for v in s.rel[u].iter() {
                inv[v].insert(u);
            }
        }
        inv
    };
    let mut search = Search {
        rel: &s.rel,
        inverse,
        best: None,
        autos: Vec::new(),
    };
    let root = search.refine(cells);
    search.descend(root, &mut Vec::new());
    let (adjacency, order) = search.best.expect("search reaches a leaf");
    Ok(OmegaKey {
        labels: order.iter().map(|&v| labels[v].clone()).collect(),
        adjacency,
    })
}

struct Search<'a> {
    rel: &'a [BitSet],
    inverse: Vec<BitSet>,
    best: Option<(Vec<u64>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn k(&self) -> usize {
        self.rel.len()
    }

    /// Splits cells by counts of out- and in-neighbours in every cell until
    /// stable. Sub-cells keep the parent's position and are ordered by
    /// signature, so the result is isomorphism-invariant.
    fn refine(&self, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let k = self.k();
        loop {
            let mut cell_of = vec![0usize; k];
            for (i, c) in cells.iter().enumerate() {
                for &v in c {
                    cell_of[v] = i;
                }
            }
            let sig = |v: usize| -> Vec<usize> {
                let mut out = vec![0usize; 2 * cells.len() + 1];
                for w in self.rel[v].iter() {
                    out[2 * cell_of[w]] += 1;
                }
                for w in self.inverse[v].iter() {
                    out[2 * cell_of[w] + 1] += 1;
                }
                out[2 * cells.len()] = self.rel[v].contains(v) as usize;
                out
            };
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
            for c in &cells {
                if c.len() == 1 {
                    next.push(c.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<usize>, usize)> = c.iter().map(|&v| (sig(v), v)).collect();
                keyed.sort();
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                        start = i;
                    }
                }
            }
            if next.len() == cells.len() {
                return next;
            }
            cells = next;
        }
    }

    fn encode(&self, order: &[usize]) -> Vec<u64> {
        let k = self.k();
        let mut bits = BitSet::new(k * k);
        for (i, &u) in order.iter().enumerate() {
            for (j, &v) in order.iter().enumerate() {
                if self.rel[u].contains(v) {
                    bits.insert(i * k + j);
                }
            }
        }
        let mut words = vec![0u64; (k * k).div_ceil(64)];
        for b in bits.iter() {
            // most significant first so that Vec<u64> order is bit-lexicographic
            words[b / 64] |= 1u64 << (63 - b % 64);
        }
        words
    }

    fn descend(&mut self, cells: Vec<Vec<usize>>, fixed: &mut Vec<usize>) {
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            self.leaf(order);
            return;
        };
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cells[target] {
            if !explored.is_empty() && self.same_orbit(v, &explored, fixed) {
                continue;
            }
            explored.push(v);
            let mut child = Vec::with_capacity(cells.len() + 1);
            child.extend_from_slice(&cells[..target]);
            child.push(vec![v]);
            child.push(cells[target].iter().copied().filter(|&w| w != v).collect());
            child.extend_from_slice(&cells[target + 1..]);
            let child = self.refine(child);
            fixed.push(v);
            self.descend(child, fixed);
            fixed.pop();
        }
    }

    fn leaf(&mut self, order: Vec<usize>) {
        let enc = self.encode(&order);
        match &self.best {
            None => self.best = Some((enc, order)),
            Some((b, best_order)) => {
                if enc == *b {
                    let mut gamma = vec![0; order.len()];
                    for (i, &v) in best_order.iter().enumerate() {
                        gamma[v] = order[i];
                    }
                    self.autos.push(gamma);
                } else if enc < *b {
                    self.best = Some((enc, order));
                }
            }
        }
    }

    /// Whether `v` lies in the orbit of an explored vertex under the known
    /// automorphisms that fix every vertex of `fixed`.
    fn same_orbit(&self, v: usize, explored: &[usize], fixed: &[usize]) -> bool {
        let k = self.k();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in &self.autos {
            if fixed.iter().all(|&x| g[x] == x) {
                for x in 0..k {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, g[x]));
                    parent[a] = b;
                }
            }
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&e| find(&mut parent, e) == rv)
    }
}
