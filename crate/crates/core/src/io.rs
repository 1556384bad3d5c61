//! JSON interchange: frame, model, and partition files.
//!
//! ```text
//! frame:     {"n": 3, "edges": [[0,1],[1,2]]}
//! model:     {"n": 3, "edges": [[0,1],[1,2]], "val": {"p1": [2]}}
//! partition: {"blocks": [[0,2],[1]]}
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::frame::Frame;
use crate::model::Model;
use crate::partition::Partition;

/// Largest point count accepted from a file (relations are dense bit rows).
pub const MAX_FILE_POINTS: usize = 8192;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Invalid(msg.into()))
}

#[derive(Serialize, Deserialize)]
struct FrameFile {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    val: BTreeMap<String, Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionFile {
    blocks: Vec<Vec<usize>>,
}

fn build_frame(n: usize, edges: &[(usize, usize)]) -> Result<Frame, FormatError> {
    if n == 0 {
        return invalid("frame needs n >= 1");
    }
    if n > MAX_FILE_POINTS {
        return invalid(format!("n = {n} exceeds the file limit of {MAX_FILE_POINTS} points"));
    }
    let mut seen = BTreeSet::new();
    for &(u, v) in edges {
        if u >= n || v >= n {
            return invalid(format!("edge [{u},{v}] out of range 0..{n}"));
        }
        if !seen.insert((u, v)) {
            return invalid(format!("duplicate edge [{u},{v}]"));
        }
    }
    Frame::from_edges(n, edges).map_err(|e| FormatError::Invalid(e.to_string()))
}

fn variable_index(name: &str) -> Option<u32> {
    let digits = name.strip_prefix('p')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&i| i >= 1)
}

pub fn parse_frame_json(text: &str) -> Result<Frame, FormatError> {
    let raw: FrameFile = serde_json::from_str(text)?;
    build_frame(raw.n, &raw.edges)
}

pub fn parse_model_json(text: &str) -> Result<Model, FormatError> {
    let raw: ModelFile = serde_json::from_str(text)?;
    let frame = build_frame(raw.n, &raw.edges)?;
    let mut val = BTreeMap::new();
    for (name, points) in raw.val {
        let Some(v) = variable_index(&name) else {
            return invalid(format!("bad variable name {name:?}"));
        };
        if val.contains_key(&v) {
            return invalid(format!("variable p{v} given twice"));
        }
        let mut set = BitSet::new(raw.n);
        for x in points {
            if x >= raw.n {
                return invalid(format!("{name}: point {x} out of range"));
            }
            if !set.insert(x) {
                return invalid(format!("{name}: duplicate point {x}"));
            }
        }
        val.insert(v, set);
    }
    Model::new(frame, val).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn parse_partition_json(text: &str) -> Result<Partition, FormatError> {
    let raw: PartitionFile = serde_json::from_str(text)?;
    let n: usize = raw.blocks.iter().map(Vec::len).sum();
    if n > MAX_FILE_POINTS {
        return invalid(format!("{n} points exceed the file limit"));
    }
    Partition::from_blocks(n, raw.blocks).map_err(|e| FormatError::Invalid(e.to_string()))
}

fn frame_file(frame: &Frame) -> FrameFile {
    FrameFile {
        n: frame.n(),
        edges: frame.edges(),
    }
}

fn model_file(model: &Model) -> ModelFile {
    let val = model
        .valuation()
        .iter()
        .map(|(v, s)| (format!("p{v}"), s.to_vec()))
        .collect();
    ModelFile {
        n: model.n(),
        edges: model.frame().edges(),
        val,
    }
}

fn partition_file(p: &Partition) -> PartitionFile {
    PartitionFile {
        blocks: p.blocks().to_vec(),
    }
}

pub fn frame_to_value(frame: &Frame) -> serde_json::Value {
    serde_json::to_value(frame_file(frame)).expect("serializable")
}

/// Compact JSON with fields in file order (`n`, `edges`).
pub fn frame_to_json(frame: &Frame) -> String {
    serde_json::to_string(&frame_file(frame)).expect("serializable")
}

pub fn model_to_value(model: &Model) -> serde_json::Value {
    serde_json::to_value(model_file(model)).expect("serializable")
}

pub fn model_to_json(model: &Model) -> String {
    serde_json::to_string(&model_file(model)).expect("serializable")
}

pub fn partition_to_value(p: &Partition) -> serde_json::Value {
    serde_json::to_value(partition_file(p)).expect("serializable")
}

pub fn partition_to_json(p: &Partition) -> String {
    serde_json::to_string(&partition_file(p)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_files() {
        let f = parse_frame_json(r#"{"n": 3, "edges": [[0,1],[1,2]]}"#).unwrap();
        assert_eq!(f.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(frame_to_json(&f), r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        assert!(parse_frame_json(r#"{"n": 3, "edges": [[0,1],[0,1]]}"#).is_err());
        assert!(parse_frame_json(r#"{"n": 3, "edges": [[0,3]]}"#).is_err());
        assert!(parse_frame_json(r#"{"n": 0, "edges": []}"#).is_err());
        assert!(parse_frame_json(r#"{"n": 100000000, "edges": []}"#).is_err());
        assert!(parse_frame_json(r#"{"n": 2}"#).is_err());
        assert!(parse_frame_json("[").is_err());
    }

    #[test]
    fn model_files() {
        let text = r#"{"n": 3, "edges": [[0,1],[1,2]], "val": {"p1": [0,2], "p3": []}}"#;
        let m = parse_model_json(text).unwrap();
        assert_eq!(m.truth_of_var(1).to_vec(), vec![0, 2]);
        assert_eq!(m.truth_of_var(2).to_vec(), Vec::<usize>::new());
        let back = parse_model_json(&model_to_json(&m)).unwrap();
        assert_eq!(back, m);
        assert!(parse_model_json(r#"{"n": 1, "edges": [], "val": {"q1": [0]}}"#).is_err());
        assert!(parse_model_json(r#"{"n": 1, "edges": [], "val": {"p0": [0]}}"#).is_err());
        assert!(parse_model_json(r#"{"n": 1, "edges": [], "val": {"p1": [1]}}"#).is_err());
        assert!(parse_model_json(r#"{"n": 1, "edges": [], "val": {"p1": [0, 0]}}"#).is_err());
        assert!(parse_model_json(r#"{"n": 1, "edges": [], "val": {"p1": [], "p01": []}}"#).is_err());
        assert!(parse_model_json(r#"{"n": 1, "edges": []}"#).is_ok());
    }

    #[test]
    fn partition_files() {
        let p = parse_partition_json(r#"{"blocks": [[2,0],[1]]}"#).unwrap();
        assert_eq!(partition_to_json(&p), r#"{"blocks":[[0,2],[1]]}"#);
        assert!(parse_partition_json(r#"{"blocks": [[0,1],[1]]}"#).is_err());
        assert!(parse_partition_json(r#"{"blocks": [[0,2]]}"#).is_err());
        assert!(parse_partition_json(r#"{"blocks": [[]]}"#).is_err());
    }
}
