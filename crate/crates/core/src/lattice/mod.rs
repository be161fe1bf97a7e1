//! Elements, couples, quasi-norms and concave curves.

mod concave;
pub mod convexify;
mod couple;
mod element;
mod envelope;
mod norms;
pub mod probe;
mod seq;
mod step;

pub use concave::{ConcavePL, RatioSup, MERGE_TOL, VALIDATE_TOL};
pub use couple::{quasi_norm, quasi_triangle_constant, Couple, Leg, PowerLeg};
pub use element::{align, Element, Layout};
pub use envelope::{decreasing_rearrangement, least_concave_majorant};
pub use norms::delta_sigma_norms;
pub use seq::WeightedSeq;
pub use step::StepFunction;
