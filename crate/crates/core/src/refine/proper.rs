//! Layered proper refinement for finite frames.
//!
//! Layers are processed from the top (depth 1) down. The blocks already
//! fixed above layer `i` act as unary predicates; points of layer `i` are
//! grouped by isomorphism of their cluster structures. The result refines
//! the input partition and is proper.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::bits::BitSet;
use crate::error::Error;
use crate::frame::{ClusterDecomposition, Frame};
use crate::partition::Partition;

use super::canon::{omega_signature_capped, OmegaKey, OmegaStructure, DEFAULT_CARRIER_CAP};

/// Builds the structure of `u` given the block index (among `upper_count`
/// upper blocks) of every point above `u`'s layer.
pub fn omega_structure(
    frame: &Frame,
    decomp: &ClusterDecomposition,
    upper_block: &[Option<usize>],
    upper_count: usize,
    a: &Partition,
    u: usize,
) -> OmegaStructure {
    let carrier = decomp.cluster(decomp.cluster_of(u)).to_vec();
    let k = carrier.len();
    let local: HashMap<usize, usize> = carrier.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut rel = vec![BitSet::new(k); k];
    let mut p_flags = vec![BitSet::new(upper_count); k];
    for (i, &w) in carrier.iter().enumerate() {
        for v in frame.successors(w).iter() {
            if let Some(&j) = local.get(&v) {
                rel[i].insert(j);
            } else if let Some(b) = upper_block[v] {
                p_flags[i].insert(b);
            }
        }
    }
    OmegaStructure {
        t_flags: carrier.iter().map(|&w| a.block_of(w)).collect(),
        designated: local[&u],
        carrier,
        rel,
        p_flags,
    }
}

pub fn proper_refinement(frame: &Frame, a: &Partition) -> Result<Partition, Error> {
    proper_refinement_capped(frame, a, DEFAULT_CARRIER_CAP)
}

pub fn proper_refinement_capped(frame: &Frame, a: &Partition, cap: usize) -> Result<Partition, Error> {
    let n = frame.n();
    if a.n() != n {
        return Err(Error::SizeMismatch(n, a.n()));
    }
    let decomp = frame.cluster_decomposition();
    if decomp.max_cluster_size() > cap {
        return Err(Error::CapExceeded {
            what: "cluster size",
            got: decomp.max_cluster_size(),
            cap,
        });
    }
    // Current equivalence: layers above i grouped, layer i and below singletons.
    let mut labels: Vec<usize> = (0..n).collect();
    for i in 1..=decomp.height {
        let current = Partition::from_labels(&labels);
        let mut upper_block = vec![None; n];
        let mut upper_count = 0;
        for block in current.blocks() {
            if decomp.depth[block[0]] < i {
                for &x in block {
                    upper_block[x] = Some(upper_count);
                }
                upper_count += 1;
            }
        }
        let layer = decomp.layer(i);
        let keys: Vec<OmegaKey> = layer
            .par_iter()
            .map(|&u| {
                let s = omega_structure(frame, &decomp, &upper_block, upper_count, a, u);
                omega_signature_capped(&s, cap)
            })
            .collect::<Result<_, _>>()?;
        let mut class_of: HashMap<&OmegaKey, usize> = HashMap::new();
        for (&u, key) in layer.iter().zip(&keys) {
            let next = class_of.len();
            let c = *class_of.entry(key).or_insert(next);
            // label space: points keep 0..n, layer classes use n + c
            labels[u] = n + c;
        }
        // Fold back to compact labels so the next layer starts from block ids.
        labels = Partition::from_labels(&labels).labels().to_vec();
    }
    Ok(Partition::from_labels(&labels))
}

/// `exp_2^h((N+h+1)(log₂ x + N))`, floored, or `None` past `u64`.
pub fn size_bound(x: usize, height: usize, max_cluster: usize) -> Option<u64> {
    if x == 0 {
        return None;
    }
    let (n, h) = (max_cluster as f64, height as f64);
    let mut v = (n + h + 1.0) * ((x as f64).log2() + n);
    for _ in 0..height {
        if v >= 63.0 {
            return None;
        }
        v = v.exp2();
    }
    if v >= 2f64.powi(63) {
        return None;
    }
    Some(v.floor() as u64)
}

/// The same bound for `x = 2^ℓ`, computed exactly in integers.
pub fn size_bound_pow2(len: usize, height: usize, max_cluster: usize) -> Option<u64> {
    let mut v = (max_cluster as u64 + height as u64 + 1).checked_mul(len as u64 + max_cluster as u64)?;
    for _ in 0..height {
        if v >= 64 {
            return None;
        }
        v = 1u64 << v;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{is_proper, is_refinement};

    #[test]
    fn singletons_stay_singletons() {
        let f = Frame::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b = proper_refinement(&f, &Partition::singletons(3)).unwrap();
        assert_eq!(b, Partition::singletons(3));
    }

    #[test]
    fn isomorphic_reflexive_points_merge() {
        let f = Frame::from_edges(2, &[(0, 0), (1, 1)]).unwrap();
        let b = proper_refinement(&f, &Partition::single_block(2)).unwrap();
        assert_eq!(b, Partition::single_block(2));
        assert!(is_proper(&f, &b).unwrap());
    }

    #[test]
    fn chain_layers_separate() {
        let f = Frame::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let a = Partition::from_blocks(3, vec![vec![0, 1], vec![2]]).unwrap();
        let b = proper_refinement(&f, &a).unwrap();
        assert_eq!(b, Partition::singletons(3));
        assert!(is_proper(&f, &b).unwrap());
        assert!(is_refinement(&b, &a).unwrap());
    }

    #[test]
    fn symmetric_fan_collapses() {
        // root 0 sees four reflexive leaves; leaves merge, root alone.
        let f = Frame::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 1), (2, 2), (3, 3), (4, 4)]).unwrap();
        let b = proper_refinement(&f, &Partition::single_block(5)).unwrap();
        assert_eq!(b.blocks(), &[vec![0], vec![1, 2, 3, 4]]);
        assert!(is_proper(&f, &b).unwrap());
    }

    #[test]
    fn cap_is_reported() {
        let edges: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let f = Frame::from_edges(5, &edges).unwrap();
        assert!(matches!(
            proper_refinement_capped(&f, &Partition::single_block(5), 4),
            Err(Error::CapExceeded { got: 5, cap: 4, .. })
        ));
    }

    #[test]
    fn bounds() {
        // h = 1, N = 1, x = 1: 2^((1+1+1)(0+1)) = 8
        assert_eq!(size_bound(1, 1, 1), Some(8));
        assert_eq!(size_bound_pow2(0, 1, 1), Some(8));
        assert_eq!(size_bound_pow2(2, 1, 1), Some(1 << 9));
        assert_eq!(size_bound_pow2(3, 2, 2), None);
        assert_eq!(size_bound(4, 1, 1), size_bound_pow2(2, 1, 1));
    }
}
