//! The fixed four-party wiring: four tripartite sources, six bipartite
//! transformations, four measurements, twenty-four wires.

use super::graph::{CausalCircuit, Node, NodeKind, Wire};

/// The four party labels, in order.
pub const PARTIES: [&str; 4] = ["A", "B", "C", "D"];

/// All two-element subsets of `parties`, each rendered as the concatenation
/// of its sorted members, the list sorted lexicographically.
pub fn party_pairs(parties: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..parties.len() {
        for j in (i + 1)..parties.len() {
            out.push(format!("{}{}", parties[i], parties[j]));
        }
    }
    out.sort();
    out
}

/// All three-element subsets of `parties`, rendered like [`party_pairs`].
pub fn party_triples(parties: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..parties.len() {
        for j in (i + 1)..parties.len() {
            for k in (j + 1)..parties.len() {
                out.push(format!("{}{}{}", parties[i], parties[j], parties[k]));
            }
        }
    }
    out.sort();
    out
}

/// Build the four-party circuit: every three-party subset `S` of
/// `{A,B,C,D}` is a source wired to the three transformations named by the
/// two-element subsets of `S`, and every transformation `XY` is wired to
/// measurements `X` and `Y`.  Wire ids follow the `from->to` convention, so
/// the circuit is its own canonical form.
pub fn fig1_circuit() -> CausalCircuit {
    let mut nodes = Vec::new();
    let mut wires = Vec::new();
    for p in PARTIES {
        nodes.push(Node::new(p, NodeKind::Measurement));
    }
    for pair in party_pairs(&PARTIES) {
        nodes.push(Node::new(pair.clone(), NodeKind::Transformation));
        for p in pair.chars() {
            wires.push(Wire::new(format!("{pair}->{p}"), pair.clone(), p.to_string()));
        }
    }
    for triple in party_triples(&PARTIES) {
        nodes.push(Node::new(triple.clone(), NodeKind::Source));
        let members: Vec<String> = triple.chars().map(|c| c.to_string()).collect();
        let member_refs: Vec<&str> = members.iter().map(|s| s.as_str()).collect();
        for pair in party_pairs(&member_refs) {
            wires.push(Wire::new(format!("{triple}->{pair}"), triple.clone(), pair));
        }
    }
    CausalCircuit::new(nodes, wires)
}
