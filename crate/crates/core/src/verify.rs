//! Seeded randomized invariant suites, shared by the `verify` subcommand.
//!
//! Every case draws from its own RNG stream (seed and case index), so cases
//! run in parallel and reports are identical across runs.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::formula::{build_bh, glivenko_translate, mn_axiom, pretrans_axiom};
use crate::frame::Frame;
use crate::gen::{self, TowerShape};
use crate::model::{formula_partition, truth_sets};
use crate::oracle::{frame_valid, Caps};
use crate::partition::{filtrate_model, is_proper, is_refinement, minimal_filtration, Partition};
use crate::refine::{finitize_clusters_mn, finitize_clusters_pretrans, proper_refinement, size_bound};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Filtration,
    Proper,
    Finitize,
    Definability,
    Glivenko,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Filtration,
        Suite::Proper,
        Suite::Finitize,
        Suite::Definability,
        Suite::Glivenko,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Filtration => "filtration",
            Suite::Proper => "proper",
            Suite::Finitize => "finitize",
            Suite::Definability => "definability",
            Suite::Glivenko => "glivenko",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub seed: u64,
    pub failures: usize,
    /// The first few failure messages, in case order.
    pub examples: Vec<String>,
    pub passed: bool,
}

/// Independent RNG stream for one case.
pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub fn run_suite(suite: Suite, cases: usize, seed: u64) -> SuiteReport {
    let check: fn(&mut ChaCha8Rng) -> Result<(), String> = match suite {
        Suite::Filtration => filtration_case,
        Suite::Proper => proper_case,
        Suite::Finitize => finitize_case,
        Suite::Definability => definability_case,
        Suite::Glivenko => glivenko_case,
    };
    let results: Vec<Result<(), String>> = (0..cases)
        .into_par_iter()
        .map(|i| check(&mut case_rng(seed, i)).map_err(|e| format!("case {i}: {e}")))
        .collect();
    let errors: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    SuiteReport {
        suite,
        cases,
        seed,
        failures: errors.len(),
        passed: errors.is_empty(),
        examples: errors.into_iter().take(5).collect(),
    }
}

/// Whether the clusters of `frame` correspond one-to-one, order preserving
/// and reflecting, to the clusters of `quotient = frame / p`.
pub fn skeleton_isomorphic(frame: &Frame, p: &Partition, quotient: &Frame) -> bool {
    let a = frame.cluster_decomposition();
    let b = quotient.cluster_decomposition();
    if a.cluster_count() != b.cluster_count() {
        return false;
    }
    let mut image = Vec::with_capacity(a.cluster_count());
    for c in 0..a.cluster_count() {
        let pts = a.cluster(c);
        let target = b.cluster_of(p.block_of(pts[0]));
        if pts.iter().any(|&x| b.cluster_of(p.block_of(x)) != target) {
            return false;
        }
        image.push(target);
    }
    let mut sorted = image.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != image.len() {
        return false;
    }
    (0..image.len()).all(|c| (0..image.len()).all(|d| a.le(c, d) == b.le(image[c], image[d])))
}

fn filtration_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let frame = if rng.gen_bool(0.5) {
        gen::random_tower(rng, &TowerShape::default())
    } else {
        let n = rng.gen_range(1..=30);
        let density = rng.gen_range(0.02..0.3);
        gen::random_frame(rng, n, density)
    };
    let vars = rng.gen_range(1..=3);
    let model = gen::random_model(rng, frame, vars);
    let f = gen::random_formula(rng, vars, 12);
    let agree = formula_partition(&model, &f);
    let p = gen::random_refinement(rng, &agree, 3);
    let (small, proj) = filtrate_model(&model, &p, &f).map_err(|e| e.to_string())?;
    let big_ts = truth_sets(&model, &f);
    let small_ts = truth_sets(&small, &f);
    for (i, (g, set)) in big_ts.iter().enumerate() {
        for x in 0..model.n() {
            if set.contains(x) != small_ts.sets[i].contains(proj[x]) {
                return Err(format!("`{g}` changes truth at point {x} under `{f}`"));
            }
        }
    }
    Ok(())
}

fn proper_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let small = rng.gen_bool(0.5);
    let shape = TowerShape {
        max_points: if small { 4 } else { 24 },
        ..TowerShape::default()
    };
    let frame = gen::random_tower(rng, &shape);
    let blocks = rng.gen_range(1..=4);
    let a = gen::random_partition(rng, frame.n(), blocks);
    let b = proper_refinement(&frame, &a).map_err(|e| e.to_string())?;
    if !is_proper(&frame, &b).unwrap() {
        return Err(format!("not proper: {:?}", b.blocks()));
    }
    if !is_refinement(&b, &a).unwrap() {
        return Err("result does not refine the input".into());
    }
    let d = frame.cluster_decomposition();
    if let Some(bound) = size_bound(a.len(), d.height, d.max_cluster_size()) {
        if b.len() as u64 > bound {
            return Err(format!("{} blocks exceed the bound {bound}", b.len()));
        }
    }
    if frame.n() <= 4 {
        let (quotient, _) = minimal_filtration(&frame, &b).unwrap();
        let caps = Caps::default();
        for _ in 0..20 {
            let f = gen::random_formula(rng, 2, 8);
            if frame_valid(&frame, &f, caps).unwrap() && !frame_valid(&quotient, &f, caps).unwrap() {
                return Err(format!("`{f}` valid on the frame but not on its proper quotient"));
            }
        }
    }
    Ok(())
}

fn finitize_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let shape = TowerShape {
        max_cluster_size: 12,
        max_points: 30,
        ..TowerShape::default()
    };
    let blocks = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        let &(m, n) = [(1usize, 2usize), (1, 3), (2, 3)].choose(rng).unwrap();
        let frame = gen::random_mn_frame(rng, m, n, &shape);
        let a = gen::random_partition(rng, frame.n(), blocks);
        let b = finitize_clusters_mn(&frame, &a, m, n).map_err(|e| e.to_string())?;
        check_finitized(&frame, &a, &b, (n - m) * a.len(), |g| g.is_mn_frame(m, n))
            .map_err(|e| format!("mn:{m},{n}: {e}"))
    } else {
        let m = rng.gen_range(1..=2);
        let frame = gen::random_pretrans_frame(rng, m, &shape);
        let a = gen::random_partition(rng, frame.n(), blocks);
        let b = finitize_clusters_pretrans(&frame, &a, m).map_err(|e| e.to_string())?;
        check_finitized(&frame, &a, &b, a.len(), |g| g.is_m_transitive(m)).map_err(|e| format!("g:{m}: {e}"))
    }
}

/// Postconditions shared by both finitizations.
pub fn check_finitized(
    frame: &Frame,
    a: &Partition,
    b: &Partition,
    cluster_bound: usize,
    in_class: impl Fn(&Frame) -> bool,
) -> Result<(), String> {
    if !is_refinement(b, a).unwrap() {
        return Err("not a refinement".into());
    }
    let (g, _) = minimal_filtration(frame, b).unwrap();
    if !skeleton_isomorphic(frame, b, &g) {
        return Err("skeleton changed".into());
    }
    let biggest = g.cluster_decomposition().max_cluster_size();
    if biggest > cluster_bound {
        return Err(format!("cluster of {biggest} points exceeds {cluster_bound}"));
    }
    if !in_class(&g) {
        return Err("filtration left the class".into());
    }
    Ok(())
}

fn definability_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(1..=4);
    let density = rng.gen_range(0.1..0.8);
    let frame = gen::random_frame(rng, n, density);
    let caps = Caps::default();
    for (m, k) in [(0, 1), (1, 2), (1, 3), (2, 3)] {
        if frame_valid(&frame, &mn_axiom(m, k), caps).unwrap() != frame.is_mn_frame(m, k) {
            return Err(format!("({m},{k}) axiom disagrees on {:?}", frame.edges()));
        }
    }
    for m in 0..=2 {
        let trans = frame.is_m_transitive(m);
        if frame_valid(&frame, &pretrans_axiom(m), caps).unwrap() != trans {
            return Err(format!("{m}-transitivity axiom disagrees on {:?}", frame.edges()));
        }
        if trans && m >= 1 {
            let height = frame.cluster_decomposition().height;
            for h in 1..=3 {
                let valid = frame_valid(&frame, &build_bh(h, m).unwrap(), caps).unwrap();
                if valid != (height <= h) {
                    return Err(format!("B_{h}({m}) disagrees with height {height} on {:?}", frame.edges()));
                }
            }
        }
    }
    Ok(())
}

fn glivenko_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let m = rng.gen_range(1..=2);
    let frame = gen::random_pretrans_frame(rng, m, &TowerShape::default());
    let vars = rng.gen_range(1..=3);
    let model = gen::random_model(rng, frame, vars);
    let f = gen::random_formula(rng, vars, 10);
    let g = glivenko_translate(f.clone(), m);
    let depth = model.frame().cluster_decomposition().depth;
    let holds_f = truth_sets(&model, &f).root().clone();
    let holds_g = truth_sets(&model, &g).root().clone();
    for x in 0..model.n() {
        if depth[x] == 1 && holds_g.contains(x) && !holds_f.contains(x) {
            return Err(format!("translation of `{f}` holds at final point {x} but `{f}` fails"));
        }
    }
    Ok(())
}
