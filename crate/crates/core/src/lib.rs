//! Decaying-momentum training toolkit.
//!
//! The crate bundles a schedule catalog (decaying momentum, cosine, linear,
//! step, exponential, OneCycle, plateau), SGDM/Adam-family update rules driven
//! by per-step learning rate and momentum, desk-scale differentiable problems
//! with analytic gradients, executable checks of the norm-growth identity and
//! the convex convergence bound behind the decaying-momentum rule, and a sweep
//! harness with deterministic CSV/JSONL/SVG outputs.

pub mod cli;
pub mod error;
pub mod harness;
pub mod optimizers;
pub mod plot;
pub mod problems;
pub mod schedules;
pub mod verify;

pub use error::{Error, Result};
