//! Deep knowledge tracing with diffusion-generated synthetic interactions.
//!
//! The crate has three layers:
//!
//! * model code — a simple-RNN knowledge-tracing model ([`dkt`]) and a
//!   mixed-type tabular denoising-diffusion generator ([`tabddpm`]), both
//!   trained with hand-derived gradients on top of the [`numerics`] kit;
//! * data handling — interaction-log ingestion, student-level splitting,
//!   sequence encoding and a seedable mastery simulator ([`data`]);
//! * experiment harness — metrics ([`eval`]) and the orchestration that
//!   trains a generator, augments the training split with sampled rows and
//!   compares baseline against augmented models ([`pipeline`]).
//!
//! Every stage is deterministic given its seed; see `examples/` for runnable
//! entry points and the `dktab` binary for the file-based workflow.

pub mod cli;
pub mod data;
pub mod dkt;
pub mod error;
pub mod eval;
pub mod numerics;
pub mod pipeline;
pub mod tabddpm;

pub use error::{Error, Result};
