//! Cylinder lengths and the length metric they induce.

mod delta;
mod orbit;
mod point;

pub use delta::{arc_measure_n, delta, delta_identities_check, Gamma, IdentityCheck};
pub use orbit::{itinerary, psi_cylinder, rho_distance, Ambiguity, Itinerary, RhoBracket};
pub use point::PointCoord;

pub(crate) use delta::delta_of;
