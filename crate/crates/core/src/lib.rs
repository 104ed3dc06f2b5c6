//! Wright-Fisher chains and the active information of selection and mutation.
//!
//! The crate compares a neutral (drift-only) Wright-Fisher population against
//! one with selection and mutation, and measures how much the non-neutral
//! model changes the probability of an event, as a log-ratio of event
//! probabilities:
//!
//! * [`wf_chain`]: the forward chain (binomial kernel, `θ_i`, simulation).
//! * [`active_info`]: endogenous / exogenous / active information of one-step
//!   events, general and closed forms.
//! * [`fixation`]: eventual fixation at finite `N`, by exact linear solve and
//!   by seeded parallel Monte Carlo.
//! * [`diffusion`]: the diffusion limit, its fixation formula, the three
//!   asymptotic regimes and an Euler-Maruyama integrator.
//! * [`coalescent`]: backward-time pairwise coalescence (geometric and
//!   Kingman) under population-size misspecification.
//!
//! All information values are natural-log based internally and carry their
//! [`LogBase`] explicitly.

pub mod active_info;
mod binom;
pub mod coalescent;
pub mod diffusion;
mod error;
pub mod fixation;
mod par;
pub mod rng;
pub mod wf_chain;

pub use active_info::{InfoBreakdown, InfoValue, LogBase};
pub use error::{Error, Result};
pub use wf_chain::{AlleleCount, ProbVector, Trajectory, WfParams};
