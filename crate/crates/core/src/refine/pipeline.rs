//! End-to-end shrinking of a satisfying model: agreement partition, cluster
//! finitization, proper refinement, each followed by a filtration.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::formula::{mn_axiom, pretrans_axiom, Formula};
use crate::frame::Frame;
use crate::model::{formula_partition, satisfying_points, Model};
use crate::partition::{compose_partitions, filtrate_model, Partition};

use super::finitize::{finitize_clusters_mn, finitize_clusters_pretrans};
use super::proper::{proper_refinement, size_bound_pow2};

/// Frame classes the pipeline stays inside.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FrameClass {
    /// `R^n ⊆ R^m`.
    Mn { m: usize, n: usize },
    /// `R^{m+1} ⊆ R^{≤m}`.
    Pretrans { m: usize },
}

impl FrameClass {
    pub fn contains(&self, frame: &Frame) -> bool {
        match *self {
            FrameClass::Mn { m, n } => frame.is_mn_frame(m, n),
            FrameClass::Pretrans { m } => frame.is_m_transitive(m),
        }
    }

    /// The modal axiom defining the class.
    pub fn axiom(&self) -> Formula {
        match *self {
            FrameClass::Mn { m, n } => mn_axiom(m, n),
            FrameClass::Pretrans { m } => pretrans_axiom(m),
        }
    }
}

impl std::fmt::Display for FrameClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FrameClass::Mn { m, n } => write!(f, "mn:{m},{n}"),
            FrameClass::Pretrans { m } => write!(f, "g:{m}"),
        }
    }
}

/// Theoretical size bound, or `"overflow"` when it does not fit in 64 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Value(u64),
    Overflow(OverflowTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverflowTag {
    Overflow,
}

impl From<Option<u64>> for Bound {
    fn from(v: Option<u64>) -> Self {
        v.map_or(Bound::Overflow(OverflowTag::Overflow), Bound::Value)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSizes {
    pub points: usize,
    pub max_cluster: usize,
    pub height: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub class: FrameClass,
    pub formula: String,
    pub formula_length: usize,
    pub input: StageSizes,
    /// Blocks of the agreement partition on the input model.
    pub agreement_blocks: usize,
    pub after_finitize: StageSizes,
    /// Blocks of the agreement partition on the finitized model.
    pub finitized_agreement_blocks: usize,
    pub output: StageSizes,
    /// The overall partition of input points realised by the two stages.
    pub composed_blocks: usize,
    pub witness_point: usize,
    pub witness_image: usize,
    pub output_in_class: bool,
    pub output_satisfies: bool,
    pub bound: Bound,
}

fn sizes(frame: &Frame) -> StageSizes {
    let d = frame.cluster_decomposition();
    StageSizes {
        points: frame.n(),
        max_cluster: d.max_cluster_size(),
        height: d.height,
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub model: Model,
    /// Input point ↦ output point.
    pub projection: Vec<usize>,
    pub composed: Partition,
    pub report: PipelineReport,
}

/// Shrinks `model` to a model over a frame of the same class that still
/// satisfies `f`.
pub fn filtration_pipeline(model: &Model, f: &Formula, class: FrameClass) -> Result<PipelineOutput, Error> {
    let frame = model.frame();
    if let FrameClass::Mn { m, n } = class {
        if n <= m {
            return Err(Error::Precondition(format!("class mn:{m},{n} needs n > m")));
        }
    }
    if !class.contains(frame) {
        return Err(Error::Precondition(format!("input frame is not in class {class}")));
    }
    let witness = satisfying_points(model, f).first().ok_or(Error::Unsatisfiable)?;
    let input = sizes(frame);

    let agreement = formula_partition(model, f);
    let finite = match class {
        FrameClass::Mn { m, n } => finitize_clusters_mn(frame, &agreement, m, n)?,
        FrameClass::Pretrans { m } => finitize_clusters_pretrans(frame, &agreement, m)?,
    };
    let (mid, proj1) = filtrate_model(model, &finite, f)?;
    let after_finitize = sizes(mid.frame());

    let mid_agreement = formula_partition(&mid, f);
    let proper = proper_refinement(mid.frame(), &mid_agreement)?;
    let (out, proj2) = filtrate_model(&mid, &proper, f)?;
    let composed = compose_partitions(&finite, &proper)?;

    let projection: Vec<usize> = proj1.iter().map(|&b| proj2[b]).collect();
    let witness_image = projection[witness];
    let output_in_class = class.contains(out.frame());
    let output_satisfies = satisfying_points(&out, f).contains(witness_image);
    if !output_in_class || !output_satisfies {
        return Err(Error::Internal(format!(
            "pipeline postcondition failed (in class: {output_in_class}, satisfies: {output_satisfies})"
        )));
    }
    let len = f.subformula_count();
    let report = PipelineReport {
        class,
        formula: f.to_string(),
        formula_length: len,
        input: input.clone(),
        agreement_blocks: agreement.len(),
        finitized_agreement_blocks: mid_agreement.len(),
        output: sizes(out.frame()),
        composed_blocks: composed.len(),
        witness_point: witness,
        witness_image,
        output_in_class,
        output_satisfies,
        bound: size_bound_pow2(len, after_finitize.height, after_finitize.max_cluster).into(),
        after_finitize,
    };
    Ok(PipelineOutput {
        model: out,
        projection,
        composed,
        report,
    })
}
