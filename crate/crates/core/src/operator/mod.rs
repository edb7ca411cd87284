//! The operator `L_ν`, its action on test functions, and weak pairings.

mod apply;
mod norm;
mod pairing;
mod test_function;

pub use apply::{apply, apply_with, tail_mass, ApplyOptions};
pub use norm::{decay_bound_check, ray_points, sks_norm, DecayBoundReport, Grid};
pub use pairing::{pairing, pairing_with, PairingOptions};
pub use test_function::{CandidateSolution, TestFunction, TrigTerm, MAX_DERIVATIVE};
