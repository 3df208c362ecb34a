//! Canonical form: merge nodes with identical measurement futures.

use std::collections::{BTreeMap, BTreeSet};

use super::graph::{CausalCircuit, CircuitError, Node, NodeKind, Wire};

impl CausalCircuit {
    /// Canonicalize a valid circuit.
    ///
    /// Every non-measurement node is labelled by its measurement future;
    /// nodes with identical labels are merged into a single node whose id is
    /// derived from the sorted label.  Wires are re-attached to the merged
    /// nodes, parallel wires are collapsed (wire dimension is free, so
    /// multiplicity adds nothing), and wires that close on a merged group
    /// are dropped.  A merged node becomes a source exactly when it has no
    /// remaining inputs, and a transformation otherwise — this keeps the
    /// output valid even when a group mixes kinds.  Measurement nodes are
    /// never merged and keep their ids and outcome arities.
    ///
    /// The operation is idempotent, preserves the number of measurements,
    /// and preserves [`CausalCircuit::shares_common_cause`] for every party
    /// set.
    pub fn canonicalize(&self) -> Result<CausalCircuit, CircuitError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(CircuitError::Invalid {
                violations: report.violations,
            });
        }

        let futures = self.all_measurement_futures();
        let measurement_ids: BTreeSet<&str> = self
            .measurements()
            .iter()
            .map(|n| n.id.as_str())
            .collect();

        // Group non-measurement nodes by label.
        let mut groups: BTreeMap<Vec<String>, Vec<&Node>> = BTreeMap::new();
        for n in self.nodes() {
            if n.kind == NodeKind::Measurement {
                continue;
            }
            let label: Vec<String> = futures
                .get(&n.id)
                .map(|s| s.iter().cloned().collect())
                .unwrap_or_default();
            groups.entry(label).or_default().push(n);
        }

        // Deterministic canonical ids: concatenate single-character party
        // ids directly (so the four-party wiring keeps its familiar names),
        // join longer ids with '+', name the empty label "none", and break
        // any residual collision with measurement ids or other groups by
        // appending apostrophes in sorted-label order.
        let mut used: BTreeSet<String> = measurement_ids.iter().map(|s| s.to_string()).collect();
        let mut id_of_label: BTreeMap<Vec<String>, String> = BTreeMap::new();
        for label in groups.keys() {
            let mut base = if label.is_empty() {
                "none".to_string()
            } else if label.iter().all(|p| p.chars().count() == 1) {
                label.concat()
            } else {
                label.join("+")
            };
            while used.contains(&base) {
                base.push('\'');
            }
            used.insert(base.clone());
            id_of_label.insert(label.clone(), base);
        }

        // Old id -> new id.
        let mut rename: BTreeMap<&str, String> = BTreeMap::new();
        for m in &measurement_ids {
            rename.insert(m, m.to_string());
        }
        for (label, members) in &groups {
            for n in members {
                rename.insert(n.id.as_str(), id_of_label[label].clone());
            }
        }

        // Re-attach wires; collapse parallels; drop in-group loops.  A
        // collapsed wire keeps a dimension annotation only when every
        // original wire on that edge agrees on one.
        let mut edge_dims: BTreeMap<(String, String), BTreeSet<Option<u32>>> = BTreeMap::new();
        for w in self.wires() {
            let from = rename[w.from.as_str()].clone();
            let to = rename[w.to.as_str()].clone();
            if from == to {
                continue;
            }
            edge_dims.entry((from, to)).or_default().insert(w.dim);
        }
        let mut wires = Vec::new();
        let mut in_deg: BTreeMap<String, usize> = BTreeMap::new();
        for ((from, to), dims) in &edge_dims {
            let dim = if dims.len() == 1 {
                dims.iter().next().copied().unwrap()
            } else {
                None
            };
            *in_deg.entry(to.clone()).or_default() += 1;
            wires.push(Wire {
                id: format!("{from}->{to}"),
                from: from.clone(),
                to: to.clone(),
                dim,
            });
        }

        let mut nodes: Vec<Node> = self
            .measurements()
            .into_iter()
            .cloned()
            .collect();
        for label in groups.keys() {
            let id = id_of_label[label].clone();
            let kind = if in_deg.get(&id).copied().unwrap_or(0) == 0 {
                NodeKind::Source
            } else {
                NodeKind::Transformation
            };
            nodes.push(Node::new(id, kind));
        }

        Ok(CausalCircuit::new(nodes, wires))
    }
}

#[cfg(test)]
mod tests {
    use super::super::fig1::fig1_circuit;
    use super::*;

    #[test]
    fn fig1_is_its_own_canonical_form() {
        let c = fig1_circuit();
        assert_eq!(c.canonicalize().unwrap(), c);
    }

    #[test]
    fn identical_futures_merge() {
        // Two sources both feeding only measurement M merge into one.
        let c = CausalCircuit::new(
            vec![
                Node::new("s1", NodeKind::Source),
                Node::new("s2", NodeKind::Source),
                Node::new("M", NodeKind::Measurement),
            ],
            vec![Wire::new("w1", "s1", "M"), Wire::new("w2", "s2", "M")],
        );
        let k = c.canonicalize().unwrap();
        assert_eq!(k.nodes().len(), 2);
        assert_eq!(k.wires().len(), 1);
        assert!(k.validate().is_valid());
    }

    #[test]
    fn chain_with_equal_futures_collapses_to_source() {
        // source -> transformation with the same future collapse; the
        // merged node keeps no inputs, hence stays a source.
        let c = CausalCircuit::new(
            vec![
                Node::new("s", NodeKind::Source),
                Node::new("t", NodeKind::Transformation),
                Node::new("M", NodeKind::Measurement),
                Node::new("N", NodeKind::Measurement),
            ],
            vec![
                Wire::new("w1", "s", "t"),
                Wire::new("w2", "t", "M"),
                Wire::new("w3", "t", "N"),
                Wire::new("w4", "s", "M"),
            ],
        );
        let k = c.canonicalize().unwrap();
        assert_eq!(k.nodes().len(), 3);
        let merged = k.node("MN").expect("merged node named from label");
        assert_eq!(merged.kind, NodeKind::Source);
        assert!(k.validate().is_valid());
    }

    #[test]
    fn merged_group_with_outside_input_becomes_transformation() {
        // u (future {M,N,P}) feeds s/t (future {M,N}); s is a source by
        // kind but the merged {M,N} node keeps u's input, so it must be a
        // transformation for the output to stay valid.
        let c = CausalCircuit::new(
            vec![
                Node::new("u", NodeKind::Source),
                Node::new("s", NodeKind::Source),
                Node::new("t", NodeKind::Transformation),
                Node::new("M", NodeKind::Measurement),
                Node::new("N", NodeKind::Measurement),
                Node::new("P", NodeKind::Measurement),
            ],
            vec![
                Wire::new("w0", "u", "t"),
                Wire::new("w1", "u", "P"),
                Wire::new("w2", "s", "M"),
                Wire::new("w3", "s", "N"),
                Wire::new("w4", "t", "M"),
                Wire::new("w5", "t", "N"),
            ],
        );
        let k = c.canonicalize().unwrap();
        assert!(k.validate().is_valid(), "{:?}", k.validate().violations);
        let merged = k.node("MN").unwrap();
        assert_eq!(merged.kind, NodeKind::Transformation);
        assert_eq!(k.canonicalize().unwrap(), k, "idempotence");
    }

    #[test]
    fn parallel_wires_collapse() {
        let c = CausalCircuit::new(
            vec![
                Node::new("s", NodeKind::Source),
                Node::new("M", NodeKind::Measurement),
            ],
            vec![Wire::new("w1", "s", "M"), Wire::new("w2", "s", "M")],
        );
        let k = c.canonicalize().unwrap();
        assert_eq!(k.wires().len(), 1);
    }

    #[test]
    fn invalid_input_is_rejected() {
        let c = CausalCircuit::new(
            vec![Node::new("t", NodeKind::Transformation)],
            vec![],
        );
        match c.canonicalize() {
            Err(CircuitError::Invalid { violations }) => assert!(!violations.is_empty()),
            other => panic!("expected Invalid, got {other:?}"),
        }
    }
}
