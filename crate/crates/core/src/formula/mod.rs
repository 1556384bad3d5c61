//! Modal formulas: the AST, a round-tripping printer and parser, subformula
//! machinery, and the schema builders (iterated and bounded modalities,
//! pretransitivity and `(m,n)` axioms, finite-height schemata, the
//! `◇^{≤m}□^{≤m}` translation).

mod parser;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

pub use parser::{parse, ParseError, MAX_NESTING};

/// A modal formula. Variables are `p1, p2, ...`; index 0 is never used.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(u32),
    Bot,
    Top,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Dia(Box<Formula>),
    Box(Box<Formula>),
}

impl Formula {
    pub fn var(i: u32) -> Formula {
        assert!(i >= 1, "variable indices start at 1");
        Formula::Var(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn dia(f: Formula) -> Formula {
        Formula::Dia(Box::new(f))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Box::new(f))
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var(_) | Formula::Bot | Formula::Top => vec![],
            Formula::Not(a) | Formula::Dia(a) | Formula::Box(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                vec![a, b]
            }
        }
    }

    /// Variable indices occurring in the formula.
    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if let Formula::Var(i) = f {
                out.insert(*i);
            }
            stack.extend(f.children());
        }
        out
    }

    /// Number of tree nodes (not deduplicated).
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Distinct subformulas in post-order, first occurrence wins.
    pub fn subformulas(&self) -> Vec<&Formula> {
        SubformulaDag::build(self).nodes
    }

    /// ℓ(φ): the number of distinct subformulas.
    pub fn subformula_count(&self) -> usize {
        SubformulaDag::build(self).len()
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Imp(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(_) | Formula::Dia(_) | Formula::Box(_) => 5,
            Formula::Var(_) | Formula::Bot | Formula::Top => 6,
        }
    }
}

/// Node of a [`SubformulaDag`]: the connective with operands given as node
/// indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Var(u32),
    Bot,
    Top,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
    Iff(usize, usize),
    Dia(usize),
    Box(usize),
}

/// The distinct subformulas of a formula, shared, in post-order. Every
/// operand index is smaller than the index of the node using it, so a single
/// forward pass evaluates the whole formula.
#[derive(Clone, Debug)]
pub struct SubformulaDag<'a> {
    pub nodes: Vec<&'a Formula>,
    pub ops: Vec<Node>,
    pub root: usize,
}

impl<'a> SubformulaDag<'a> {
    pub fn build(f: &'a Formula) -> Self {
        let mut dag = SubformulaDag {
            nodes: Vec::new(),
            ops: Vec::new(),
            root: 0,
        };
        let mut index: HashMap<&'a Formula, usize> = HashMap::new();
        dag.root = dag.visit(f, &mut index);
        dag
    }

    fn visit(&mut self, f: &'a Formula, index: &mut HashMap<&'a Formula, usize>) -> usize {
        if let Some(&i) = index.get(f) {
            return i;
        }
        let op = match f {
            Formula::Var(i) => Node::Var(*i),
            Formula::Bot => Node::Bot,
            Formula::Top => Node::Top,
            Formula::Not(a) => Node::Not(self.visit(a, index)),
            Formula::Dia(a) => Node::Dia(self.visit(a, index)),
            Formula::Box(a) => Node::Box(self.visit(a, index)),
            Formula::And(a, b) => {
                let (x, y) = (self.visit(a, index), self.visit(b, index));
                Node::And(x, y)
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.visit(a, index), self.visit(b, index));
                Node::Or(x, y)
            }
            Formula::Imp(a, b) => {
                let (x, y) = (self.visit(a, index), self.visit(b, index));
                Node::Imp(x, y)
            }
            Formula::Iff(a, b) => {
                let (x, y) = (self.visit(a, index), self.visit(b, index));
                Node::Iff(x, y)
            }
        };
        let i = self.nodes.len();
        self.nodes.push(f);
        self.ops.push(op);
        index.insert(f, i);
        i
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Operands of a binary node are wrapped when they bind looser, or
        // equally loose on the side that associativity does not cover
        // (`->` groups to the right, the others to the left).
        fn operand(f: &mut fmt::Formatter<'_>, g: &Formula, min: u8) -> fmt::Result {
            if g.precedence() < min {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        }
        let p = self.precedence();
        match self {
            Formula::Var(i) => write!(f, "p{i}"),
            Formula::Bot => f.write_str("false"),
            Formula::Top => f.write_str("true"),
            Formula::Not(a) => {
                f.write_str("~")?;
                operand(f, a, 5)
            }
            Formula::Dia(a) => {
                f.write_str("<>")?;
                operand(f, a, 5)
            }
            Formula::Box(a) => {
                f.write_str("[]")?;
                operand(f, a, 5)
            }
            Formula::Imp(a, b) => {
                operand(f, a, p + 1)?;
                f.write_str(" -> ")?;
                operand(f, b, p)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                let sym = match self {
                    Formula::And(..) => " & ",
                    Formula::Or(..) => " | ",
                    _ => " <-> ",
                };
                operand(f, a, p)?;
                f.write_str(sym)?;
                operand(f, b, p + 1)
            }
        }
    }
}

/// `◇^i φ`.
pub fn dia_iter(f: Formula, i: usize) -> Formula {
    (0..i).fold(f, |g, _| Formula::dia(g))
}

/// `□^i φ`.
pub fn box_iter(f: Formula, i: usize) -> Formula {
    (0..i).fold(f, |g, _| Formula::boxed(g))
}

/// `φ ∨ ◇φ ∨ … ∨ ◇^m φ`, left-nested in ascending order.
pub fn dia_leq(f: Formula, m: usize) -> Formula {
    let mut acc = f.clone();
    let mut cur = f;
    for _ in 0..m {
        cur = Formula::dia(cur);
        acc = Formula::or(acc, cur.clone());
    }
    acc
}

/// `φ ∧ □φ ∧ … ∧ □^m φ`, left-nested in ascending order.
pub fn box_leq(f: Formula, m: usize) -> Formula {
    let mut acc = f.clone();
    let mut cur = f;
    for _ in 0..m {
        cur = Formula::boxed(cur);
        acc = Formula::and(acc, cur.clone());
    }
    acc
}

/// `◇^n p1 → ◇^m p1`, valid exactly on frames with `R^n ⊆ R^m`.
pub fn mn_axiom(m: usize, n: usize) -> Formula {
    let p = Formula::var(1);
    Formula::imp(dia_iter(p.clone(), n), dia_iter(p, m))
}

/// `◇^{m+1} p1 → ◇^{≤m} p1`, valid exactly on m-transitive frames.
pub fn pretrans_axiom(m: usize) -> Formula {
    let p = Formula::var(1);
    Formula::imp(dia_iter(p.clone(), m + 1), dia_leq(p, m))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("height schema needs h >= 1")]
pub struct ZeroHeight;

/// The height schema `B_h(m)` over `p1..ph`:
/// `B_1(m) = p1 → □^{≤m}◇^{≤m}p1` and
/// `B_{h+1}(m) = p_{h+1} → □^{≤m}(◇^{≤m}p_{h+1} ∨ B_h(m))`.
pub fn build_bh(h: usize, m: usize) -> Result<Formula, ZeroHeight> {
    if h == 0 {
        return Err(ZeroHeight);
    }
    let p1 = Formula::var(1);
    let mut acc = Formula::imp(p1.clone(), box_leq(dia_leq(p1, m), m));
    for k in 2..=h {
        let p = Formula::var(k as u32);
        acc = Formula::imp(
            p.clone(),
            box_leq(Formula::or(dia_leq(p, m), acc), m),
        );
    }
    Ok(acc)
}

/// `◇^{≤m}□^{≤m}φ`.
pub fn glivenko_translate(f: Formula, m: usize) -> Formula {
    dia_leq(box_leq(f, m), m)
}
