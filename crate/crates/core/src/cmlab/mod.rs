//! K-domination, operator witnesses for `(l^1, l^inf)`, K(p,q)-monotonicity
//! probes and the blow-up table for `(l^p, l^q)` with `p < 1`.

mod demo;
mod dominate;
mod probe;
mod witness;

pub use demo::{non_cm_demo, NonCmRow};
pub use dominate::{k_dominates, Domination, DOMINATION_TOL};
pub use probe::{kpq_probe, kpq_ratio, MonotonicityEstimate, ProbeInstance, ProbeSpec};
pub use witness::{cm_witness_l1_linf, OperatorWitness, WitnessConfig, WitnessStatus, DEFAULT_CAP, EXACT_DIM};
