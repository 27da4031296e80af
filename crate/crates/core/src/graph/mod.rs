//! Combinatorial graph models, countably-Markov maps on them, and the
//! built-in map families.

mod builtins;
pub mod example1;
mod mixing;
mod model;
mod refine;
mod validate;

pub use builtins::{full_shift, golden_mean, interval_map, lap_orientations};
pub use example1::{Blade, Example1, Lap};
pub use mixing::{certify, mixing_check, LeoStatus, MixingCertificate, LEO_SIZE_CAP};
pub use model::{
    transition_matrix, ArcEnds, ExplicitMap, GraphArc, GraphModel, MapRule, MarkovMapSpec, Orientation, PathStep,
    TransitionMatrix, Vertex,
};
pub use refine::{loop_words, refine_matrix, refinement, CylinderWord, Refinement};
pub use validate::{validate, ValidationReport, Violation};

/// Example-1 spec with enumeration prefix of the given depth.
pub fn example1(depth: u32) -> crate::error::Result<MarkovMapSpec> {
    Ok(MarkovMapSpec::from_rule(Example1::new(depth)?))
}
