//! Directed causal-circuit graphs.
//!
//! A circuit has three node kinds — sources (in-degree 0), transformations
//! (at least one input and one output), and measurements (out-degree 0) —
//! connected by directed wires.  The module provides validation, downstream
//! reachability queries ([`CausalCircuit::measurement_future`],
//! [`CausalCircuit::shares_common_cause`]), a canonical form that merges
//! nodes with identical measurement futures, embedding of four-party
//! circuits into the fixed four-party wiring ([`fig1_circuit`]), and a JSON
//! file format.

mod canonical;
mod embed;
mod fig1;
mod graph;
mod io;

pub use embed::Embedding;
pub use fig1::{fig1_circuit, party_pairs, party_triples, PARTIES};
pub use graph::{CausalCircuit, CircuitError, Node, NodeKind, ValidationReport, Wire};
pub use io::{circuit_from_json, circuit_to_json};
