//! Cluster finitization, proper refinement, and the filtration pipeline.

pub mod canon;
pub mod finitize;
pub mod pipeline;
pub mod proper;
pub mod residues;

pub use canon::{omega_signature, omega_signature_capped, OmegaKey, OmegaStructure, DEFAULT_CARRIER_CAP};
pub use finitize::{finitize_clusters_mn, finitize_clusters_pretrans};
pub use pipeline::{filtration_pipeline, Bound, FrameClass, PipelineOutput, PipelineReport, StageSizes};
pub use proper::{omega_structure, proper_refinement, proper_refinement_capped, size_bound, size_bound_pow2};
pub use residues::{choose_d, loop_residues, mod_d_partition, ResidueSubgroup};
