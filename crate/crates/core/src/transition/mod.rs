//! Countable 0/1 transition matrices accessed through successor rules.
//!
//! Path counts come from backward dynamic programming; entropy and
//! recurrence are read off finite truncations.

mod counting;
mod entropy;
mod index;
mod matrix;
mod spectral;

pub use counting::{
    diagonal_counts, first_return_counts, generating_column, generating_fn, ln_biguint, power_entry,
    vere_jones_classify, BackwardCounts, Recurrence, SeriesOptions, SeriesSum, TailStatus, VereJonesReport,
};
pub use entropy::{gurevich_entropy, gurevich_entropy_with, DepthSchedule, EntropyBound, EntropyEstimate, EntropyStatus};
pub use index::{format_word, ArcIndex};
pub use matrix::{reachable_ball, truncation, CountableMatrix, FiniteMatrix};
pub use spectral::{collatz_wielandt, components, is_irreducible, spectral_radius, RadiusMethod, SpectralRadius};

pub(crate) use spectral::spectral_radius_with_pivot;
