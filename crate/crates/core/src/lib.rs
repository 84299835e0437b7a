//! Rotation-angle sensing with one and two qubits.
//!
//! Protocols are exact outcome-distribution families over the rotation
//! parameters `(α, θ, φ)`; the information layer turns them into Fisher
//! information, and the experiment layer simulates shots, readout error,
//! unfolding, tomography, and estimation on top.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod information;
pub mod numeric;
pub mod protocols;
pub mod rotations;
pub mod states;

pub use error::{Error, Result};
