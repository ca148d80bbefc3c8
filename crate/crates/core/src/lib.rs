//! Consensus analysis of second-order multi-agent systems with velocity
//! saturation and asynchronous input/communication time-delays.
//!
//! The crate models a team of double integrators whose velocity channel
//! saturates and whose control laws read their own state with input delay τ₁
//! and neighbor states with communication delay τ₂. It provides:
//!
//! - [`topology`]: communication graphs, normalized adjacency spectra and
//!   structural classification,
//! - [`plant`]: the control laws and their stacked delay-system matrices,
//! - [`sim`]: fixed-step integration with history buffers and verdict
//!   classification,
//! - [`harmonic`]: the describing function of the saturation and limit-cycle
//!   prediction by harmonic balance,
//! - [`nyquist`]: frequency-domain delay margins and stability regions,
//! - [`lmi`]: delay-dependent Lyapunov-Krasovskii feasibility with a built-in
//!   small-scale solver.

pub mod harmonic;
pub mod linalg;
pub mod lmi;
pub mod nyquist;
pub mod plant;
pub mod sim;
pub mod topology;

pub use plant::{ControlLaw, DelayPair, Saturation};
pub use topology::Topology;
