//! Flight dynamics and minimum-effort trajectory optimization for an
//! underwater-launched, thrust-vector-controlled vehicle.
//!
//! The crate models the two powered phases that precede cruise flight:
//!
//! * the **launch phase**, from submarine ejection to water exit, where the
//!   only control is the booster thrust magnitude and the vehicle pitches up
//!   on its own buoyancy moment, and
//! * the **boost phase**, from water exit to the cruise start point, where
//!   thrust magnitude and a pitch-plane thrust deflection are both commanded.
//!
//! On top of the models it provides single-shooting transcription of
//! minimum-effort (integral of squared thrust) control problems, an
//! augmented-Lagrangian box-constrained solver, batch scenario sweeps and a
//! small file-based scenario format consumed by the `hydroboost` binary.
//!
//! Sweep rows and finite-difference gradient columns are data parallel; the
//! `parallel` feature (on by default) backs them with rayon, and disabling it
//! falls back to sequential execution with identical results.

pub mod environment;
pub mod error;
pub mod exec;
pub mod opt;
pub mod phases;
pub mod scenario;
pub mod sim;
pub mod vehicle;

pub use error::{Error, Result};
