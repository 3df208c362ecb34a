//! Core graph types, validation, and reachability queries.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Role of a node in a causal circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeKind {
    /// Emits systems; no incoming wires.
    Source,
    /// Consumes and emits systems; at least one wire in and one out.
    Transformation,
    /// Consumes systems and produces a classical outcome; no outgoing wires.
    Measurement,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Source => "source",
            NodeKind::Transformation => "transformation",
            NodeKind::Measurement => "measurement",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "source" => Some(NodeKind::Source),
            "transformation" => Some(NodeKind::Transformation),
            "measurement" => Some(NodeKind::Measurement),
            _ => None,
        }
    }
}

/// A node of a causal circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Number of classical outcomes (measurements only).  `None` means the
    /// default of 2.
    pub outcome_arity: Option<u32>,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        Node {
            id: id.into(),
            kind,
            outcome_arity: None,
        }
    }

    pub fn with_arity(id: impl Into<String>, kind: NodeKind, arity: u32) -> Self {
        Node {
            id: id.into(),
            kind,
            outcome_arity: Some(arity),
        }
    }

    /// Outcome arity with the default of 2 applied.
    pub fn arity(&self) -> u32 {
        self.outcome_arity.unwrap_or(2)
    }
}

/// A directed wire between two nodes.  The optional dimension annotation is
/// advisory at the graph level and is consumed by quantum realizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wire {
    pub id: String,
    pub from: String,
    pub to: String,
    pub dim: Option<u32>,
}

impl Wire {
    pub fn new(id: impl Into<String>, from: impl Into<String>, to: impl Into<String>) -> Self {
        Wire {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            dim: None,
        }
    }
}

/// Errors raised by circuit operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("circuit is invalid: {}", violations.join("; "))]
    Invalid { violations: Vec<String> },
    #[error("a single node is an ancestor of all four measurements")]
    CommonCausePresent,
    #[error("expected exactly 4 measurement nodes, found {found}")]
    PartyCountMismatch { found: usize },
    #[error("node {id} cannot be mapped into the four-party wiring")]
    UnembeddableNode { id: String },
}

/// Result of validating a circuit: a list of every violation found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A directed causal circuit.
///
/// Nodes are stored sorted by id and wires sorted by `(from, to, id)`, so
/// two circuits with the same structure compare equal regardless of the
/// order in which pieces were supplied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalCircuit {
    nodes: Vec<Node>,
    wires: Vec<Wire>,
}

impl CausalCircuit {
    pub fn new(mut nodes: Vec<Node>, mut wires: Vec<Wire>) -> Self {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        wires.sort_by(|a, b| {
            (a.from.as_str(), a.to.as_str(), a.id.as_str())
                .cmp(&(b.from.as_str(), b.to.as_str(), b.id.as_str()))
        });
        CausalCircuit { nodes, wires }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Measurement nodes, sorted by id.
    pub fn measurements(&self) -> Vec<&Node> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Measurement)
            .collect()
    }

    /// Wires entering `id`, sorted by wire id.
    pub fn wires_into(&self, id: &str) -> Vec<&Wire> {
        let mut v: Vec<&Wire> = self.wires.iter().filter(|w| w.to == id).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    /// Wires leaving `id`, sorted by wire id.
    pub fn wires_out_of(&self, id: &str) -> Vec<&Wire> {
        let mut v: Vec<&Wire> = self.wires.iter().filter(|w| w.from == id).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    /// Check every structural invariant and report all violations found:
    /// unique node and wire ids, wires referencing existing nodes, sources
    /// with no inputs, measurements with no outputs, transformations with at
    /// least one input and one output, acyclicity, positive dimension
    /// annotations, and positive outcome arities.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(&n.id) {
                violations.push(format!("duplicate node id {}", n.id));
            }
            if n.outcome_arity == Some(0) {
                violations.push(format!("node {} has outcome arity 0", n.id));
            }
        }
        let mut seen_w = BTreeSet::new();
        for w in &self.wires {
            if !seen_w.insert(&w.id) {
                violations.push(format!("duplicate wire id {}", w.id));
            }
            if self.node(&w.from).is_none() {
                violations.push(format!("wire {} starts at unknown node {}", w.id, w.from));
            }
            if self.node(&w.to).is_none() {
                violations.push(format!("wire {} ends at unknown node {}", w.id, w.to));
            }
            if w.from == w.to {
                violations.push(format!("wire {} is a self-loop on {}", w.id, w.from));
            }
            if w.dim == Some(0) {
                violations.push(format!("wire {} has dimension 0", w.id));
            }
        }

        let mut in_deg: BTreeMap<&str, usize> = BTreeMap::new();
        let mut out_deg: BTreeMap<&str, usize> = BTreeMap::new();
        for w in &self.wires {
            *out_deg.entry(w.from.as_str()).or_default() += 1;
            *in_deg.entry(w.to.as_str()).or_default() += 1;
        }
        for n in &self.nodes {
            let din = in_deg.get(n.id.as_str()).copied().unwrap_or(0);
            let dout = out_deg.get(n.id.as_str()).copied().unwrap_or(0);
            match n.kind {
                NodeKind::Source => {
                    if din > 0 {
                        violations.push(format!("source {} has {} incoming wire(s)", n.id, din));
                    }
                }
                NodeKind::Transformation => {
                    if din == 0 {
                        violations.push(format!("transformation {} has no incoming wires", n.id));
                    }
                    if dout == 0 {
                        violations.push(format!("transformation {} has no outgoing wires", n.id));
                    }
                }
                NodeKind::Measurement => {
                    if dout > 0 {
                        violations
                            .push(format!("measurement {} has {} outgoing wire(s)", n.id, dout));
                    }
                }
            }
        }

        if let Some(on_cycle) = self.find_cycle_node() {
            violations.push(format!(
                "circuit contains a directed cycle through node {on_cycle}"
            ));
        }

        ValidationReport { violations }
    }

    /// Some node lying on a directed cycle, if any (iterative three-color
    /// DFS over node ids in sorted order).
    fn find_cycle_node(&self) -> Option<String> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Gray,
            Black,
        }
        let adj = self.adjacency();
        let mut color: BTreeMap<&str, Color> =
            self.nodes.iter().map(|n| (n.id.as_str(), Color::White)).collect();
        for start in self.nodes.iter().map(|n| n.id.as_str()) {
            if color[start] != Color::White {
                continue;
            }
            // Stack of (node, next-child-index).
            let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
            *color.get_mut(start).unwrap() = Color::Gray;
            while let Some(&mut (u, ref mut idx)) = stack.last_mut() {
                let children = adj.get(u).map(|v| v.as_slice()).unwrap_or(&[]);
                if *idx < children.len() {
                    let v = children[*idx];
                    *idx += 1;
                    match color.get(v).copied() {
                        Some(Color::White) => {
                            *color.get_mut(v).unwrap() = Color::Gray;
                            stack.push((v, 0));
                        }
                        Some(Color::Gray) => return Some(v.to_string()),
                        _ => {}
                    }
                } else {
                    *color.get_mut(u).unwrap() = Color::Black;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Forward adjacency (successor ids, sorted, with duplicates from
    /// parallel wires retained only once).
    fn adjacency(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for n in &self.nodes {
            adj.entry(n.id.as_str()).or_default();
        }
        for w in &self.wires {
            if self.node(&w.from).is_some() && self.node(&w.to).is_some() {
                adj.entry(w.from.as_str()).or_default().insert(w.to.as_str());
            }
        }
        adj.into_iter()
            .map(|(k, v)| (k, v.into_iter().collect()))
            .collect()
    }

    /// The set of measurement ids reachable from `id` by directed wires,
    /// including `id` itself when it is a measurement.  Unknown ids yield
    /// the empty set.
    pub fn measurement_future(&self, id: &str) -> BTreeSet<String> {
        self.all_measurement_futures()
            .remove(id)
            .unwrap_or_default()
    }

    /// Measurement future of every node, computed in one pass.  Cycles
    /// (invalid circuits) are tolerated: back edges simply contribute
    /// nothing, and validation reports the cycle separately.
    pub fn all_measurement_futures(&self) -> BTreeMap<String, BTreeSet<String>> {
        let adj = self.adjacency();
        let mut future: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        // Iterative post-order DFS.
        #[derive(Clone, Copy, PartialEq)]
        enum State {
            Unvisited,
            Open,
            Done,
        }
        let mut state: BTreeMap<&str, State> = self
            .nodes
            .iter()
            .map(|n| (n.id.as_str(), State::Unvisited))
            .collect();
        for start in self.nodes.iter().map(|n| n.id.as_str()) {
            if state[start] != State::Unvisited {
                continue;
            }
            let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
            *state.get_mut(start).unwrap() = State::Open;
            while let Some(&mut (u, ref mut idx)) = stack.last_mut() {
                let children = adj.get(u).map(|v| v.as_slice()).unwrap_or(&[]);
                if *idx < children.len() {
                    let v = children[*idx];
                    *idx += 1;
                    if state.get(v) == Some(&State::Unvisited) {
                        *state.get_mut(v).unwrap() = State::Open;
                        stack.push((v, 0));
                    }
                } else {
                    let mut fut: BTreeSet<&str> = BTreeSet::new();
                    if self.node(u).map(|n| n.kind) == Some(NodeKind::Measurement) {
                        fut.insert(u);
                    }
                    for v in children {
                        if state.get(v) == Some(&State::Done) {
                            if let Some(fv) = future.get(v) {
                                fut.extend(fv.iter().copied());
                            }
                        }
                    }
                    future.insert(u, fut);
                    *state.get_mut(u).unwrap() = State::Done;
                    stack.pop();
                }
            }
        }
        future
            .into_iter()
            .map(|(k, v)| {
                (
                    k.to_string(),
                    v.into_iter().map(|s| s.to_string()).collect(),
                )
            })
            .collect()
    }

    /// True when some single node has every listed party in its measurement
    /// future (i.e. the parties share a common causal ancestor).
    pub fn shares_common_cause(&self, parties: &[&str]) -> bool {
        let want: BTreeSet<&str> = parties.iter().copied().collect();
        self.all_measurement_futures().values().any(|fut| {
            want.iter()
                .all(|p| fut.contains(&p.to_string()))
        })
    }
}
