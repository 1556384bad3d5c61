//! Filtrations of pretransitive Kripke frames.
//!
//! The crate covers modal formulas ([`formula`]), finite frames and their
//! cluster structure ([`frame`]), models ([`model`]), partitions and minimal
//! filtrations ([`partition`]), the cluster finitization and proper
//! refinement constructions ([`refine`]), and a brute-force [`oracle`] used
//! to check semantic claims on small frames.

pub mod bits;
pub mod cli;
pub mod error;
pub mod formula;
pub mod frame;
pub mod gen;
pub mod io;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod refine;
pub mod verify;

pub use bits::BitSet;
pub use error::Error;
pub use formula::{parse, Formula};
pub use frame::{ClusterDecomposition, Frame, Relation};
pub use model::{formula_partition, model_check, truth_sets, Model};
pub use partition::Partition;
pub use refine::FrameClass;
