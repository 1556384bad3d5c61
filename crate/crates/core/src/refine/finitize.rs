//! Cluster finitization: refinements of a partition whose filtration keeps
//! the skeleton and the frame class while bounding every cluster.

use crate::error::Error;
use crate::frame::Frame;
use crate::partition::{meet, Partition};

use super::residues::{choose_d, mod_d_partition};

/// Refinement for `(m,n)`-frames, `n > m`. Inside each cluster the points are
/// split by path length modulo the cluster's step `d | n−m` and by `a`, so
/// every filtrated cluster has at most `(n−m)·|a|` points and the
/// filtration is again an `(m,n)`-frame.
pub fn finitize_clusters_mn(frame: &Frame, a: &Partition, m: usize, n: usize) -> Result<Partition, Error> {
    if a.n() != frame.n() {
        return Err(Error::SizeMismatch(frame.n(), a.n()));
    }
    if n <= m {
        return Err(Error::Precondition(format!("(m,n) = ({m},{n}) needs n > m")));
    }
    if !frame.is_mn_frame(m, n) {
        return Err(Error::Precondition(format!("frame is not an ({m},{n})-frame")));
    }
    let k = n - m;
    let decomp = frame.cluster_decomposition();
    let mut residue_class = vec![0usize; frame.n()];
    for cluster in decomp.clusters.blocks() {
        let d = choose_d(frame, cluster, k)?;
        for (i, class) in mod_d_partition(frame, cluster, d)?.iter().enumerate() {
            for &x in class {
                residue_class[x] = i;
            }
        }
    }
    let labels: Vec<(usize, usize, usize)> = (0..frame.n())
        .map(|x| (decomp.cluster_of(x), residue_class[x], a.block_of(x)))
        .collect();
    Ok(Partition::from_labels(&labels))
}

/// Refinement for m-transitive frames: `a` intersected with the cluster
/// partition. Filtrated clusters have at most `|a|` points and the filtration
/// stays m-transitive.
pub fn finitize_clusters_pretrans(frame: &Frame, a: &Partition, m: usize) -> Result<Partition, Error> {
    if a.n() != frame.n() {
        return Err(Error::SizeMismatch(frame.n(), a.n()));
    }
    if !frame.is_m_transitive(m) {
        return Err(Error::Precondition(format!("frame is not {m}-transitive")));
    }
    meet(a, &frame.cluster_decomposition().clusters)
}
