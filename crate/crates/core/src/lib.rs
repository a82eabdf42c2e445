//! Exact and simulated statistics of generalized quantum measurements.
//!
//! The crate has two halves that are checked against each other:
//!
//! - an exact calculus of measurement probabilities — POV measures, Kraus
//!   instruments with posterior states, two-step sequential measurements,
//!   the quantum analog of Bayes' formula, and the interference coefficient
//!   λ that measures how far a direct probability deviates from the
//!   total-probability formula ([`measurement`], [`sequential`],
//!   [`interference`]);
//! - a frequency-based ensemble simulator in which the same coefficients
//!   arise as limits of relative-frequency perturbations under context
//!   transitions ([`frequency`]).
//!
//! Everything works over finite-dimensional complex Hilbert spaces with
//! dense matrices ([`operator`]) and finite outcome sets.

pub mod error;
pub mod frequency;
pub mod interference;
pub mod measurement;
pub mod operator;
pub mod random;
pub mod sequential;
pub mod state;

pub use error::{Error, Result};
pub use operator::{Operator, Vector, DEFAULT_TOL};

pub use num_complex::Complex64;
