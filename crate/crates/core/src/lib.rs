//! Evaluation-only greedy algorithms for convex minimization over the span of
//! a finite symmetric dictionary.
//!
//! The crate is organised bottom-up:
//!
//! * [`space`] and [`dictionary`]: dense vectors, `l_p` norms, symmetric
//!   dictionaries and sparse coefficient combinations.
//! * [`objective`]: the convex objective oracle (exact or with bounded,
//!   deterministic corruption), the shipped test objectives and an empirical
//!   modulus-of-smoothness estimator.
//! * [`linesearch`]: certified derivative-free minimization of convex
//!   functions on an interval, on a box and on the whole plane.
//! * [`greedy`]: the relaxed, free-relaxation, fixed-coefficient and weak
//!   (gradient-selected) greedy algorithms.
//! * [`analysis`]: brute-force reference minima, compressibility profiles,
//!   rate fitting and trace invariant checks.
//! * [`experiment`]: declarative experiment configs and report emission used by
//!   the `dictgreedy` binary.

pub mod analysis;
pub mod dictionary;
pub mod error;
pub mod experiment;
pub mod greedy;
pub mod linesearch;
pub mod objective;
pub mod space;

pub use dictionary::{Combination, Dictionary, Materialized};
pub use error::{Error, Result};
pub use objective::{Objective, Oracle};
pub use space::{norm, NormOrder, Vector};
