//! Three-photon GHZ correlations from a single-photon-pumped parametric
//! oscillator, measured either with Pegg–Barnett phase projectors or with
//! balanced homodyne detection.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod ghz;
pub mod homodyne;
pub mod measurement;
pub mod phase;
pub mod quadrature;

pub use dynamics::{evolve, extract_triplet, generate_triplet, OscillatorParams, TripletProjection};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use fock::{StateVector, TripletState};
pub use ghz::{evaluate_f, lhv_max_f, lhv_optimum, Arrangement, ArrangementKind, GhzResult, Setting};
pub use homodyne::{
    efficiency_threshold, estimate_f, octant_probabilities, EfficiencyModel, LossModel, QuadratureMethod,
    Threshold,
};
pub use measurement::{AngleAssignment, Outcome, OutcomeTable};
pub use phase::{joint_phase_table, Binning, PhaseConfig};
