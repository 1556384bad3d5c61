//! Brute-force ground truth: labelled frame enumeration, exhaustive-valuation
//! validity, and loop lengths by matrix powers.
//!
//! Validity is evaluated 64 valuations at a time: each subformula maps every
//! point to a word whose bit `t` is its truth under valuation `base + t`.
//! This evaluator shares nothing with [`crate::model`].

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::bits::BitSet;
use crate::error::Error;
use crate::formula::{Formula, Node, SubformulaDag};
use crate::frame::{Frame, Relation};
use crate::model::Model;
use crate::refine::FrameClass;

/// Enumeration limits. Exceeding one fails instead of running unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_points: usize,
    /// Upper limit on `|vars| · n`, the log₂ of the valuation count.
    pub max_valuation_bits: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_points: 5,
            max_valuation_bits: 20,
        }
    }
}

/// A frame class with an optional height limit. `kind: None` is every frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ClassSpec {
    pub kind: Option<FrameClass>,
    pub height_cap: Option<usize>,
}

impl ClassSpec {
    pub fn any() -> Self {
        ClassSpec::default()
    }

    pub fn of(kind: FrameClass) -> Self {
        ClassSpec {
            kind: Some(kind),
            height_cap: None,
        }
    }

    pub fn with_height(mut self, h: usize) -> Self {
        self.height_cap = Some(h);
        self
    }

    pub fn contains(&self, frame: &Frame) -> bool {
        self.kind.is_none_or(|k| k.contains(frame))
            && self
                .height_cap
                .is_none_or(|h| frame.cluster_decomposition().height <= h)
    }
}

/// The frame on `n` points whose edge `(u, v)` is bit `u·n + v` of `code`.
pub fn frame_from_code(n: usize, code: u64) -> Frame {
    let mut rel = Relation::empty(n);
    for u in 0..n {
        for v in 0..n {
            if code >> (u * n + v) & 1 == 1 {
                rel.insert(u, v);
            }
        }
    }
    Frame::from_relation(rel).expect("n >= 1")
}

/// All frames on `n` labelled points in `spec`, in code order.
pub fn enumerate_frames(n: usize, spec: ClassSpec, caps: Caps) -> Result<impl Iterator<Item = Frame>, Error> {
    if n == 0 {
        return Err(Error::Precondition("frames need at least one point".into()));
    }
    if n > caps.max_points || n * n >= 64 {
        return Err(Error::CapExceeded {
            what: "enumeration size",
            got: n,
            cap: caps.max_points.min(7),
        });
    }
    Ok((0..1u64 << (n * n))
        .map(move |code| frame_from_code(n, code))
        .filter(move |f| spec.contains(f)))
}

const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Result of an exhaustive validity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// Least falsifying valuation index and a point where `f` fails.
    Refuted { valuation: u64, point: usize },
}

/// Checks `f` under every valuation of its variables on `frame`.
pub fn check_validity(frame: &Frame, f: &Formula, caps: Caps) -> Result<Validity, Error> {
    let vars: Vec<u32> = f.vars().into_iter().collect();
    let n = frame.n();
    let bits = vars.len() * n;
    if bits > caps.max_valuation_bits {
        return Err(Error::CapExceeded {
            what: "valuation bits",
            got: bits,
            cap: caps.max_valuation_bits,
        });
    }
    let dag = SubformulaDag::build(f);
    let var_slot: BTreeMap<u32, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let succ: Vec<Vec<usize>> = (0..n).map(|x| frame.successors(x).to_vec()).collect();
    let total: u64 = 1 << bits;
    let chunks = total.div_ceil(64);
    let mask = if total >= 64 { !0 } else { (1u64 << total) - 1 };
    let mut vals: Vec<Vec<u64>> = vec![vec![0; n]; dag.len()];
    for chunk in 0..chunks {
        for (i, op) in dag.ops.iter().enumerate() {
            let out: Vec<u64> = match *op {
                Node::Var(v) => {
                    let slot = var_slot[&v];
                    (0..n)
                        .map(|x| {
                            let b = slot * n + x;
                            if b < 6 {
                                PATTERNS[b]
                            } else if chunk >> (b - 6) & 1 == 1 {
                                !0
                            } else {
                                0
                            }
                        })
                        .collect()
                }
                Node::Bot => vec![0; n],
                Node::Top => vec![!0; n],
                Node::Not(a) => vals[a].iter().map(|w| !w).collect(),
                Node::And(a, b) => zip_with(&vals[a], &vals[b], |x, y| x & y),
                Node::Or(a, b) => zip_with(&vals[a], &vals[b], |x, y| x | y),
                Node::Imp(a, b) => zip_with(&vals[a], &vals[b], |x, y| !x | y),
                Node::Iff(a, b) => zip_with(&vals[a], &vals[b], |x, y| !(x ^ y)),
                Node::Dia(a) => (0..n)
                    .map(|x| succ[x].iter().fold(0, |acc, &y| acc | vals[a][y]))
                    .collect(),
                Node::Box(a) => (0..n)
                    .map(|x| succ[x].iter().fold(!0, |acc, &y| acc & vals[a][y]))
                    .collect(),
            };
            vals[i] = out;
        }
        let root = &vals[dag.root];
        let mut worst: Option<(u32, usize)> = None;
        for (x, &w) in root.iter().enumerate() {
            let fail = !w & mask;
            if fail != 0 {
                let t = fail.trailing_zeros();
                if worst.is_none_or(|(bt, _)| t < bt) {
                    worst = Some((t, x));
                }
            }
        }
        if let Some((t, point)) = worst {
            return Ok(Validity::Refuted {
                valuation: chunk * 64 + t as u64,
                point,
            });
        }
    }
    Ok(Validity::Valid)
}

fn zip_with(a: &[u64], b: &[u64], op: impl Fn(u64, u64) -> u64) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect()
}

/// `F ⊨ f`: true under every valuation at every point.
pub fn frame_valid(frame: &Frame, f: &Formula, caps: Caps) -> Result<bool, Error> {
    Ok(check_validity(frame, f, caps)? == Validity::Valid)
}

/// The model for valuation index `valuation` of `f`'s variables: bit
/// `slot·n + x` says whether the `slot`-th variable holds at `x`.
pub fn valuation_model(frame: &Frame, f: &Formula, valuation: u64) -> Model {
    let n = frame.n();
    let val = f
        .vars()
        .into_iter()
        .enumerate()
        .map(|(slot, v)| {
            let set = BitSet::from_iter(n, (0..n).filter(|&x| valuation >> (slot * n + x) & 1 == 1));
            (v, set)
        })
        .collect();
    Model::new(frame.clone(), val).expect("valuation fits the frame")
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub model: Model,
    pub point: usize,
}

#[derive(Clone, Debug)]
pub struct ClassVerdict {
    pub valid: bool,
    pub frames_checked: usize,
    pub counterexample: Option<Counterexample>,
}

/// Validity of `f` on every frame of `spec` with at most `max_n` points. A
/// failure reports the least counterexample (fewest points, then frame code,
/// then valuation index).
pub fn class_valid(spec: ClassSpec, f: &Formula, max_n: usize, caps: Caps) -> Result<ClassVerdict, Error> {
    let mut checked = 0;
    for n in 1..=max_n {
        let frames: Vec<Frame> = enumerate_frames(n, spec, caps)?.collect();
        checked += frames.len();
        let found = frames
            .par_iter()
            .map(|frame| check_validity(frame, f, caps).map(|v| (frame, v)))
            .find_map_first(|r| match r {
                Ok((_, Validity::Valid)) => None,
                other => Some(other),
            });
        match found {
            None => {}
            Some(Err(e)) => return Err(e),
            Some(Ok((frame, Validity::Refuted { valuation, point }))) => {
                return Ok(ClassVerdict {
                    valid: false,
                    frames_checked: checked,
                    counterexample: Some(Counterexample {
                        model: valuation_model(frame, f, valuation),
                        point,
                    }),
                })
            }
            Some(Ok((_, Validity::Valid))) => unreachable!(),
        }
    }
    Ok(ClassVerdict {
        valid: true,
        frames_checked: checked,
        counterexample: None,
    })
}

/// Lengths `ℓ ≤ max_len` of `u`-loops, by checking `(u, u) ∈ R^ℓ` for each
/// successive power.
pub fn loop_lengths_brute(frame: &Frame, u: usize, max_len: usize) -> Result<BTreeSet<usize>, Error> {
    let n = frame.n();
    if u >= n {
        return Err(Error::PointOutOfRange { point: u, n });
    }
    let r = frame.relation();
    let mut power = Relation::identity(n);
    let mut out = BTreeSet::new();
    for len in 0..=max_len {
        if power.contains(u, u) {
            out.insert(len);
        }
        power = power.compose(r)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{build_bh, mn_axiom, parse, pretrans_axiom};
    use crate::model::model_check;

    fn chain3() -> Frame {
        Frame::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let caps = Caps::default();
        assert_eq!(enumerate_frames(1, ClassSpec::any(), caps).unwrap().count(), 2);
        assert_eq!(
            enumerate_frames(1, ClassSpec::of(FrameClass::Mn { m: 0, n: 1 }), caps).unwrap().count(),
            2
        );
        assert_eq!(enumerate_frames(2, ClassSpec::any(), caps).unwrap().count(), 16);
        assert!(enumerate_frames(6, ClassSpec::any(), caps).is_err());
        assert!(enumerate_frames(0, ClassSpec::any(), caps).is_err());
        let h1 = enumerate_frames(2, ClassSpec::any().with_height(1), caps).unwrap().count();
        // height 2 on two points: exactly one of the two cross edges
        assert_eq!(h1, 16 - 2 * 4);
    }

    #[test]
    fn validity_examples() {
        let caps = Caps::default();
        assert!(frame_valid(&chain3(), &Formula::Top, caps).unwrap());
        let trans = Frame::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(frame_valid(&trans, &mn_axiom(1, 2), caps).unwrap());
        match check_validity(&chain3(), &mn_axiom(1, 2), caps).unwrap() {
            Validity::Refuted { valuation, point } => {
                let m = valuation_model(&chain3(), &mn_axiom(1, 2), valuation);
                assert!(!model_check(&m, point, &mn_axiom(1, 2)).unwrap());
            }
            Validity::Valid => panic!("transitivity fails on a chain"),
        }
        let m = valuation_model(&chain3(), &mn_axiom(1, 2), 0b100);
        assert!(!model_check(&m, 0, &mn_axiom(1, 2)).unwrap());
        let big = parse("p1 & p2 & p3 & p4 & p5 & p6 & p7").unwrap();
        assert!(frame_valid(&chain3(), &big, caps).is_err());
    }

    #[test]
    fn class_validity_examples() {
        let caps = Caps::default();
        let v = class_valid(ClassSpec::of(FrameClass::Pretrans { m: 1 }), &pretrans_axiom(1), 3, caps).unwrap();
        assert!(v.valid);
        let v = class_valid(ClassSpec::of(FrameClass::Mn { m: 1, n: 2 }), &mn_axiom(1, 2), 3, caps).unwrap();
        assert!(v.valid);
        let f = build_bh(1, 1).unwrap();
        let v = class_valid(ClassSpec::of(FrameClass::Pretrans { m: 1 }), &f, 3, caps).unwrap();
        assert!(!v.valid);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.model.frame().cluster_decomposition().height, 2);
        assert!(!model_check(&cx.model, cx.point, &f).unwrap());
    }

    #[test]
    fn loop_length_examples() {
        let refl = Frame::from_edges(1, &[(0, 0)]).unwrap();
        assert_eq!(loop_lengths_brute(&refl, 0, 4).unwrap(), (0..=4).collect());
        let cyc = Frame::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(loop_lengths_brute(&cyc, 0, 7).unwrap(), [0, 3, 6].into());
        assert_eq!(loop_lengths_brute(&chain3(), 0, 9).unwrap(), [0].into());
    }
}
