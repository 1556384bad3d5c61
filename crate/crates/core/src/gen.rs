//! Seeded random instances: cluster-tower frames (arbitrary, m-transitive,
//! `(m,n)`), formulas, valuations, and partitions.
//!
//! Uniform random digraphs almost never have interesting clusters, so frames
//! are built as towers: clusters are placed on layers and lower layers are
//! reached through cross edges only.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitSet;
use crate::formula::Formula;
use crate::frame::{Frame, Relation};
use crate::model::Model;
use crate::partition::Partition;

#[derive(Clone, Copy, Debug)]
pub struct TowerShape {
    pub max_height: usize,
    pub max_clusters_per_layer: usize,
    pub max_cluster_size: usize,
    pub max_points: usize,
}

impl Default for TowerShape {
    fn default() -> Self {
        TowerShape {
            max_height: 3,
            max_clusters_per_layer: 3,
            max_cluster_size: 4,
            max_points: 30,
        }
    }
}

/// Cluster sizes per layer, top layer (depth 1) first.
fn layer_plan<R: Rng>(rng: &mut R, shape: &TowerShape) -> Vec<Vec<usize>> {
    let height = rng.gen_range(1..=shape.max_height.max(1));
    let mut budget = shape.max_points.max(1);
    let mut layers = Vec::new();
    for _ in 0..height {
        if budget == 0 {
            break;
        }
        let count = rng.gen_range(1..=shape.max_clusters_per_layer.max(1));
        let mut sizes = Vec::new();
        for _ in 0..count {
            if budget == 0 {
                break;
            }
            let s = rng.gen_range(1..=shape.max_cluster_size.max(1).min(budget));
            budget -= s;
            sizes.push(s);
        }
        layers.push(sizes);
    }
    layers
}

struct Layout {
    /// clusters[layer][j] = points of that cluster
    clusters: Vec<Vec<Vec<usize>>>,
    n: usize,
}

fn layout(plan: &[Vec<usize>]) -> Layout {
    let mut next = 0;
    let clusters = plan
        .iter()
        .map(|sizes| {
            sizes
                .iter()
                .map(|&s| {
                    let pts: Vec<usize> = (next..next + s).collect();
                    next += s;
                    pts
                })
                .collect()
        })
        .collect();
    Layout { clusters, n: next }
}

/// `(layer, index, targets)` for one cluster; targets are `(layer, index)`.
type CrossLinks = (usize, usize, Vec<(usize, usize)>);

/// Picks, for every cluster below the top layer, a nonempty set of target
/// clusters on lower depths including at least one on the layer right above.
fn cross_targets<R: Rng>(rng: &mut R, lay: &Layout) -> Vec<Vec<CrossLinks>> {
    let mut out = Vec::new();
    for (i, layer) in lay.clusters.iter().enumerate() {
        let mut row = Vec::new();
        for j in 0..layer.len() {
            let mut targets = Vec::new();
            if i > 0 {
                targets.push((i - 1, rng.gen_range(0..lay.clusters[i - 1].len())));
                for (li, lower) in lay.clusters[..i].iter().enumerate() {
                    for lj in 0..lower.len() {
                        if rng.gen_bool(0.3) && !targets.contains(&(li, lj)) {
                            targets.push((li, lj));
                        }
                    }
                }
            }
            row.push((i, j, targets));
        }
        out.push(row);
    }
    out
}

/// An arbitrary cluster tower: strongly connected clusters (a random cycle
/// plus extra edges), some reflexive singletons, sparse cross edges.
pub fn random_tower<R: Rng>(rng: &mut R, shape: &TowerShape) -> Frame {
    let plan = layer_plan(rng, shape);
    let lay = layout(&plan);
    let mut rel = Relation::empty(lay.n);
    for layer in &lay.clusters {
        for c in layer {
            if c.len() == 1 {
                if rng.gen_bool(0.5) {
                    rel.insert(c[0], c[0]);
                }
                continue;
            }
            let mut order = c.clone();
            order.shuffle(rng);
            for w in 0..order.len() {
                rel.insert(order[w], order[(w + 1) % order.len()]);
            }
            let density = rng.gen_range(0.0..0.6);
            for &u in c {
                for &v in c {
                    if rng.gen_bool(density) {
                        rel.insert(u, v);
                    }
                }
            }
        }
    }
    for row in cross_targets(rng, &lay) {
        for (i, j, targets) in row {
            let src = &lay.clusters[i][j];
            for (li, lj) in targets {
                let dst = &lay.clusters[li][lj];
                rel.insert(*src.choose(rng).unwrap(), *dst.choose(rng).unwrap());
                for &u in src {
                    for &v in dst {
                        if rng.gen_bool(0.15) {
                            rel.insert(u, v);
                        }
                    }
                }
            }
        }
    }
    Frame::from_relation(rel).expect("tower has points")
}

/// Adds `R^{m+1} \ R^{≤m}` to `R` until the frame is m-transitive (for
/// `m ≥ 1`); for `m = 0` keeps only loops. The closure `R*` is unchanged, so
/// clusters and skeleton survive.
pub fn repair_pretrans(frame: &Frame, m: usize) -> Frame {
    let n = frame.n();
    if m == 0 {
        let mut rel = Relation::empty(n);
        for x in 0..n {
            if frame.has_edge(x, x) {
                rel.insert(x, x);
            }
        }
        return Frame::from_relation(rel).expect("nonempty");
    }
    let mut rel = frame.relation().clone();
    loop {
        let upto = rel.bounded_union(m);
        let next = rel.power(m + 1);
        let mut added = false;
        for (u, v) in next.pairs() {
            if !upto.contains(u, v) {
                rel.insert(u, v);
                added = true;
            }
        }
        if !added {
            return Frame::from_relation(rel).expect("nonempty");
        }
    }
}

pub fn random_pretrans_frame<R: Rng>(rng: &mut R, m: usize, shape: &TowerShape) -> Frame {
    let f = repair_pretrans(&random_tower(rng, shape), m);
    debug_assert!(f.is_m_transitive(m));
    f
}

fn divisors(k: usize) -> Vec<usize> {
    (1..=k).filter(|&d| k.is_multiple_of(d)).collect()
}

/// An `(m,n)`-frame (`n > m ≥ 1`) built from periodic clusters: the points
/// of a cluster fall into `c | n−m` phases, every point of phase `r` sees
/// every point of phase `r+1 mod c`. Cross edges are complete between
/// linked clusters and closed under composition. Sometimes a small uniform
/// random frame is drawn instead and kept if it is in the class.
pub fn random_mn_frame<R: Rng>(rng: &mut R, m: usize, n: usize, shape: &TowerShape) -> Frame {
    assert!(n > m && m >= 1, "periodic towers need n > m >= 1");
    if rng.gen_bool(0.25) {
        for _ in 0..200 {
            let pts = rng.gen_range(1..=shape.max_points.clamp(1, 5));
            let density = rng.gen_range(0.1..0.7);
            let mut rel = Relation::empty(pts);
            for u in 0..pts {
                for v in 0..pts {
                    if rng.gen_bool(density) {
                        rel.insert(u, v);
                    }
                }
            }
            let f = Frame::from_relation(rel).expect("nonempty");
            if f.is_mn_frame(m, n) {
                return f;
            }
        }
    }
    let k = n - m;
    let periods = divisors(k);
    let plan = layer_plan(rng, shape);
    let lay = layout(&plan);
    let mut rel = Relation::empty(lay.n);
    for layer in &lay.clusters {
        for c in layer {
            if c.len() == 1 && rng.gen_bool(0.3) {
                continue; // irreflexive singleton
            }
            let fitting: Vec<usize> = periods.iter().copied().filter(|&p| p <= c.len()).collect();
            let period = *fitting.choose(rng).unwrap();
            let mut pts = c.clone();
            pts.shuffle(rng);
            let phase: Vec<usize> = (0..pts.len())
                .map(|i| if i < period { i } else { rng.gen_range(0..period) })
                .collect();
            for (a, &u) in pts.iter().enumerate() {
                for (b, &v) in pts.iter().enumerate() {
                    if phase[b] == (phase[a] + 1) % period {
                        rel.insert(u, v);
                    }
                }
            }
        }
    }
    // cluster-level reachability, closed transitively
    let flat: Vec<(usize, usize)> = lay
        .clusters
        .iter()
        .enumerate()
        .flat_map(|(i, l)| (0..l.len()).map(move |j| (i, j)))
        .collect();
    let id = |i: usize, j: usize| flat.iter().position(|&p| p == (i, j)).unwrap();
    let kc = flat.len();
    let mut reach = vec![BitSet::new(kc); kc];
    for row in cross_targets(rng, &lay) {
        for (i, j, targets) in row {
            for (li, lj) in targets {
                reach[id(i, j)].insert(id(li, lj));
            }
        }
    }
    // targets always have smaller ids, so one ascending pass closes
    for c in 0..kc {
        let targets: Vec<usize> = reach[c].to_vec();
        for t in targets {
            let via = reach[t].clone();
            reach[c].union_with(&via);
        }
    }
    for c in 0..kc {
        let (i, j) = flat[c];
        for t in reach[c].iter() {
            let (ti, tj) = flat[t];
            for &u in &lay.clusters[i][j] {
                for &v in &lay.clusters[ti][tj] {
                    rel.insert(u, v);
                }
            }
        }
    }
    let f = Frame::from_relation(rel).expect("nonempty");
    debug_assert!(f.is_mn_frame(m, n), "periodic tower left the class");
    f
}

/// A random formula with at most `max_nodes` tree nodes over `p1..p_vars`.
pub fn random_formula<R: Rng>(rng: &mut R, vars: u32, max_nodes: usize) -> Formula {
    let budget = rng.gen_range(1..=max_nodes.max(1));
    formula_with_budget(rng, vars.max(1), budget)
}

fn formula_with_budget<R: Rng>(rng: &mut R, vars: u32, budget: usize) -> Formula {
    if budget <= 1 {
        return match rng.gen_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bot,
            _ => Formula::Var(rng.gen_range(1..=vars)),
        };
    }
    if budget == 2 || rng.gen_bool(0.45) {
        let inner = formula_with_budget(rng, vars, budget - 1);
        return match rng.gen_range(0..3) {
            0 => Formula::not(inner),
            1 => Formula::dia(inner),
            _ => Formula::boxed(inner),
        };
    }
    let left = rng.gen_range(1..budget - 1);
    let a = formula_with_budget(rng, vars, left);
    let b = formula_with_budget(rng, vars, budget - 1 - left);
    match rng.gen_range(0..4) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::imp(a, b),
        _ => Formula::iff(a, b),
    }
}

/// Random valuation of `p1..p_vars`.
pub fn random_model<R: Rng>(rng: &mut R, frame: Frame, vars: u32) -> Model {
    let n = frame.n();
    let val: BTreeMap<u32, BitSet> = (1..=vars)
        .map(|v| {
            let density = rng.gen_range(0.0..1.0);
            (v, BitSet::from_iter(n, (0..n).filter(|_| rng.gen_bool(density))))
        })
        .collect();
    Model::new(frame, val).expect("valuation fits")
}

/// Random partition of `0..n` into at most `max_blocks` labels.
pub fn random_partition<R: Rng>(rng: &mut R, n: usize, max_blocks: usize) -> Partition {
    let k = rng.gen_range(1..=max_blocks.max(1));
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Partition::from_labels(&labels)
}

/// Random refinement of `p`: each block is split by random sub-labels.
pub fn random_refinement<R: Rng>(rng: &mut R, p: &Partition, max_split: usize) -> Partition {
    let split = rng.gen_range(1..=max_split.max(1));
    let labels: Vec<(usize, usize)> = (0..p.n())
        .map(|x| (p.block_of(x), rng.gen_range(0..split)))
        .collect();
    Partition::from_labels(&labels)
}

/// Uniform random frame on `n` points with edge probability `density`.
pub fn random_frame<R: Rng>(rng: &mut R, n: usize, density: f64) -> Frame {
    let mut rel = Relation::empty(n);
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(density) {
                rel.insert(u, v);
            }
        }
    }
    Frame::from_relation(rel).expect("n >= 1")
}
