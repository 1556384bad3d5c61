//! Valuations, Kripke satisfaction over whole truth sets, and the
//! agreement partition `∼_φ`.

use std::collections::BTreeMap;

use crate::bits::BitSet;
use crate::error::Error;
use crate::formula::{Formula, Node, SubformulaDag};
use crate::frame::Frame;
use crate::partition::Partition;

/// A frame with a valuation. Variables missing from the map are false
/// everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    frame: Frame,
    valuation: BTreeMap<u32, BitSet>,
}

impl Model {
    pub fn new(frame: Frame, valuation: BTreeMap<u32, BitSet>) -> Result<Self, Error> {
        for (&v, set) in &valuation {
            if v == 0 {
                return Err(Error::InvalidModel("variable index 0".into()));
            }
            if set.len() != frame.n() {
                return Err(Error::InvalidModel(format!(
                    "valuation of p{v} has width {} for {} points",
                    set.len(),
                    frame.n()
                )));
            }
        }
        Ok(Model { frame, valuation })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn n(&self) -> usize {
        self.frame.n()
    }

    pub fn valuation(&self) -> &BTreeMap<u32, BitSet> {
        &self.valuation
    }

    pub fn truth_of_var(&self, v: u32) -> BitSet {
        self.valuation
            .get(&v)
            .cloned()
            .unwrap_or_else(|| BitSet::new(self.n()))
    }

    /// The submodel on `set`, with the map from new to old indices.
    pub fn restriction(&self, set: &BitSet) -> Result<(Model, Vec<usize>), Error> {
        let (frame, map) = self.frame.restriction(set)?;
        let val = self
            .valuation
            .iter()
            .map(|(&v, s)| (v, BitSet::from_iter(map.len(), (0..map.len()).filter(|&i| s.contains(map[i])))))
            .collect();
        Ok((Model::new(frame, val)?, map))
    }
}

/// `{x : M, x ⊨ g}` for every subformula `g`, indexed like the formula's
/// [`SubformulaDag`].
#[derive(Clone, Debug)]
pub struct TruthSets<'a> {
    pub dag: SubformulaDag<'a>,
    pub sets: Vec<BitSet>,
}

impl<'a> TruthSets<'a> {
    pub fn get(&self, g: &Formula) -> Option<&BitSet> {
        self.dag.nodes.iter().position(|&h| h == g).map(|i| &self.sets[i])
    }

    pub fn root(&self) -> &BitSet {
        &self.sets[self.dag.root]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a Formula, &BitSet)> + '_ {
        self.dag.nodes.iter().copied().zip(self.sets.iter())
    }
}

/// Evaluates every subformula once, bottom-up, as point sets.
pub fn truth_sets<'a>(model: &Model, f: &'a Formula) -> TruthSets<'a> {
    let dag = SubformulaDag::build(f);
    let frame = model.frame();
    let n = frame.n();
    let mut sets: Vec<BitSet> = Vec::with_capacity(dag.len());
    for op in &dag.ops {
        let s = match *op {
            Node::Var(v) => model.truth_of_var(v),
            Node::Bot => BitSet::new(n),
            Node::Top => BitSet::full(n),
            Node::Not(a) => sets[a].complement(),
            Node::And(a, b) => {
                let mut s = sets[a].clone();
                s.intersect_with(&sets[b]);
                s
            }
            Node::Or(a, b) => {
                let mut s = sets[a].clone();
                s.union_with(&sets[b]);
                s
            }
            Node::Imp(a, b) => {
                let mut s = sets[a].complement();
                s.union_with(&sets[b]);
                s
            }
            Node::Iff(a, b) => {
                let (x, y) = (&sets[a], &sets[b]);
                BitSet::from_iter(n, (0..n).filter(|&i| x.contains(i) == y.contains(i)))
            }
            Node::Dia(a) => {
                let t = &sets[a];
                BitSet::from_iter(n, (0..n).filter(|&x| frame.successors(x).intersects(t)))
            }
            Node::Box(a) => {
                let t = &sets[a];
                BitSet::from_iter(n, (0..n).filter(|&x| frame.successors(x).is_subset(t)))
            }
        };
        sets.push(s);
    }
    TruthSets { dag, sets }
}

/// `M, x ⊨ f`.
pub fn model_check(model: &Model, x: usize, f: &Formula) -> Result<bool, Error> {
    if x >= model.n() {
        return Err(Error::PointOutOfRange { point: x, n: model.n() });
    }
    Ok(truth_sets(model, f).root().contains(x))
}

/// Points where `f` holds.
pub fn satisfying_points(model: &Model, f: &Formula) -> BitSet {
    truth_sets(model, f).root().clone()
}

/// `∼_f`: points are identified when every subformula of `f` has the same
/// truth value at both.
pub fn formula_partition(model: &Model, f: &Formula) -> Partition {
    let ts = truth_sets(model, f);
    let labels: Vec<Vec<bool>> = (0..model.n())
        .map(|x| ts.sets.iter().map(|s| s.contains(x)).collect())
        .collect();
    Partition::from_labels(&labels)
}
