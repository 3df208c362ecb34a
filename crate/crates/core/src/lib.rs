//! Core library for certifying the impossibility of perfect coordination in
//! four-party cyclic causal circuits.
//!
//! The crate is organised around one fixed wiring diagram (the four-party
//! circuit built from four tripartite sources, six bipartite transformations
//! and four measurements) plus the machinery needed to reason about it:
//!
//! * [`circuit`] — directed causal-circuit graphs, validation, canonical
//!   form, and embedding of arbitrary four-party circuits into the fixed
//!   wiring.
//! * [`quantum`] — complex linear algebra helpers, quantum realizations of a
//!   circuit (states, isometries, projective measurements), the staged
//!   simulator that turns a realization into an outcome distribution, and
//!   Heisenberg-picture projectors.
//! * [`inflation`] — the commuting-operator relaxation: the inflated wiring
//!   diagram, trace-monoid word canonicalization, moment-matrix problems
//!   compiled to real semidefinite programs, and the sum-of-squares residual
//!   chain bounding end-to-end correlations.
//! * [`ineq`] — the two coordination inequalities, conditioned CHSH scores,
//!   visibility thresholds, seeded variational searches, and calibration
//!   helpers.
//! * [`bound`] — grid-certified upper bounds on the coordination functional
//!   via the moment-matrix hierarchy.
//! * [`exec`] — a sequential/parallel execution switch used by the heavy
//!   sweeps (grid solves, multi-start searches, batch simulations).

pub mod bound;
pub mod circuit;
pub mod exec;
pub mod inflation;
pub mod ineq;
pub mod io;
pub mod quantum;
