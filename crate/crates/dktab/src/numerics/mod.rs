//! Dense f64 linear algebra, a counter-based RNG, Adam, and a
//! finite-difference gradient checker. Everything here is deterministic and
//! value-semantic; no threads, no globals.

mod adam;
mod grad_check;
mod matrix;
mod rng;

pub use adam::{clip_global_norm, AdamConfig, AdamState};
pub use grad_check::grad_check;
pub use matrix::{affine, Matrix};
pub use rng::Rng;
