//! K-functionals, K-method norms and constructive K-divisibility for
//! quasi-Banach sequence and function lattice couples.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`] holds element types (sequences, step functions), couples,
//!   quasi-norms, concave piecewise-linear curves and convexification.
//! * [`kfunctional`] evaluates `K(t, x)` exactly where a closed form exists
//!   and numerically otherwise.
//! * [`kmethod`] turns K-curves into interpolation norms.
//! * [`divisibility`] splits an element along a majorization of its K-curve.
//! * [`cmlab`] checks K-domination, builds operator witnesses and runs probes.
//! * [`cli`] is the command-line front end used by the `kdiv` binary.

pub mod cli;
pub mod cmlab;
pub mod divisibility;
pub mod error;
pub mod grid;
pub mod io;
pub mod kfunctional;
pub mod kmethod;
pub mod lattice;
pub mod lp;
pub mod rng;

pub use error::{Error, Result};
pub use grid::DyadicGrid;
pub use lattice::{ConcavePL, Couple, Element, Leg, StepFunction, WeightedSeq};
