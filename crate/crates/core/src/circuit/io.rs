//! JSON file format for circuits.
//!
//! ```json
//! {
//!   "nodes": [ {"id": "A", "kind": "measurement", "outcome_arity": 2}, ... ],
//!   "edges": [ {"from": "ABC", "to": "AB", "dim": 2}, ... ]
//! }
//! ```
//!
//! `outcome_arity` and `dim` are optional.  Emission sorts nodes by id and
//! edges by `(from, to)`; parallel wires appear as repeated edge entries
//! and are assigned distinct internal ids (`from->to`, `from->to#2`, ...)
//! on load.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::graph::{CausalCircuit, Node, NodeKind, Wire};
use crate::io::{json_array, json_escape};

#[derive(Deserialize)]
struct CircuitFile {
    nodes: Vec<NodeFile>,
    #[serde(default)]
    edges: Vec<EdgeFile>,
}

#[derive(Deserialize)]
struct NodeFile {
    id: String,
    kind: String,
    #[serde(default)]
    outcome_arity: Option<u32>,
}

#[derive(Deserialize)]
struct EdgeFile {
    from: String,
    to: String,
    #[serde(default)]
    dim: Option<u32>,
}

/// Parse a circuit from its JSON representation.
pub fn circuit_from_json(text: &str) -> Result<CausalCircuit, String> {
    let file: CircuitFile =
        serde_json::from_str(text).map_err(|e| format!("circuit file is not valid JSON: {e}"))?;
    let mut nodes = Vec::new();
    for n in file.nodes {
        let kind = NodeKind::parse(&n.kind)
            .ok_or_else(|| format!("node {}: unknown kind {:?}", n.id, n.kind))?;
        nodes.push(Node {
            id: n.id,
            kind,
            outcome_arity: n.outcome_arity,
        });
    }
    let mut counts: BTreeMap<(String, String), u32> = BTreeMap::new();
    let mut wires = Vec::new();
    for e in file.edges {
        let n = counts.entry((e.from.clone(), e.to.clone())).or_insert(0);
        *n += 1;
        let id = if *n == 1 {
            format!("{}->{}", e.from, e.to)
        } else {
            format!("{}->{}#{}", e.from, e.to, n)
        };
        wires.push(Wire {
            id,
            from: e.from,
            to: e.to,
            dim: e.dim,
        });
    }
    Ok(CausalCircuit::new(nodes, wires))
}

/// Render a circuit to its JSON representation (nodes sorted by id, edges
/// by `(from, to)`, two-space indentation, trailing newline).
pub fn circuit_to_json(c: &CausalCircuit) -> String {
    let nodes: Vec<String> = c
        .nodes()
        .iter()
        .map(|n| {
            let mut s = format!(
                "{{\"id\": \"{}\", \"kind\": \"{}\"",
                json_escape(&n.id),
                n.kind.as_str()
            );
            if let Some(a) = n.outcome_arity {
                s.push_str(&format!(", \"outcome_arity\": {a}"));
            }
            s.push('}');
            s
        })
        .collect();
    let edges: Vec<String> = c
        .wires()
        .iter()
        .map(|w| {
            let mut s = format!(
                "{{\"from\": \"{}\", \"to\": \"{}\"",
                json_escape(&w.from),
                json_escape(&w.to)
            );
            if let Some(d) = w.dim {
                s.push_str(&format!(", \"dim\": {d}"));
            }
            s.push('}');
            s
        })
        .collect();
    format!(
        "{{\n  \"nodes\": {},\n  \"edges\": {}\n}}\n",
        json_array(&nodes, 1),
        json_array(&edges, 1)
    )
}
