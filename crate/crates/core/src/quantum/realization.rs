//! Quantum realizations of causal circuits: states for sources, isometries
//! for transformations, projective measurements for measurement nodes.

use std::collections::BTreeMap;

use super::linalg::{
    eye, is_density, is_isometry, is_projector, is_unit_vector, max_abs_diff, CMat, CVec, C,
    MATRIX_TOL,
};
use crate::circuit::{CausalCircuit, NodeKind};
use crate::io::fmt12;

/// State emitted by a source: a unit vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceState {
    Pure(CVec),
    Density(CMat),
}

impl SourceState {
    pub fn dim(&self) -> usize {
        match self {
            SourceState::Pure(v) => v.len(),
            SourceState::Density(m) => m.nrows(),
        }
    }

    pub fn to_density(&self) -> CMat {
        match self {
            SourceState::Pure(v) => super::linalg::projector_onto(v),
            SourceState::Density(m) => m.clone(),
        }
    }
}

/// A complete quantum assignment for a circuit: every wire a dimension,
/// every source a state, every transformation an isometry, every
/// measurement a projective outcome family.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRealization {
    pub circuit: CausalCircuit,
    pub wire_dims: BTreeMap<String, usize>,
    pub sources: BTreeMap<String, SourceState>,
    pub transformations: BTreeMap<String, CMat>,
    pub measurements: BTreeMap<String, Vec<CMat>>,
}

impl QuantumRealization {
    /// Product of the dimensions of the wires leaving `id`.
    pub fn out_dim(&self, id: &str) -> usize {
        self.circuit
            .wires_out_of(id)
            .iter()
            .map(|w| self.wire_dims.get(&w.id).copied().unwrap_or(0))
            .product()
    }

    /// Product of the dimensions of the wires entering `id`.
    pub fn in_dim(&self, id: &str) -> usize {
        self.circuit
            .wires_into(id)
            .iter()
            .map(|w| self.wire_dims.get(&w.id).copied().unwrap_or(0))
            .product()
    }

    /// Check every structural invariant at tolerance 1e-10 and report the
    /// first violation, prefixed with the offending node (or wire) id.
    pub fn validate(&self) -> Result<(), String> {
        let report = self.circuit.validate();
        if !report.is_valid() {
            return Err(format!("circuit: {}", report.violations[0]));
        }
        for w in self.circuit.wires() {
            match self.wire_dims.get(&w.id) {
                None => return Err(format!("wire {}: no dimension given", w.id)),
                Some(0) => return Err(format!("wire {}: dimension 0", w.id)),
                Some(_) => {}
            }
        }
        for n in self.circuit.nodes() {
            match n.kind {
                NodeKind::Source => {
                    let st = self
                        .sources
                        .get(&n.id)
                        .ok_or_else(|| format!("{}: no source state given", n.id))?;
                    let want = self.out_dim(&n.id);
                    if st.dim() != want {
                        return Err(format!(
                            "{}: state dimension {} but wires need {}",
                            n.id,
                            st.dim(),
                            want
                        ));
                    }
                    match st {
                        SourceState::Pure(v) => {
                            if !is_unit_vector(v, MATRIX_TOL) {
                                return Err(format!("{}: state vector is not unit norm", n.id));
                            }
                        }
                        SourceState::Density(m) => {
                            if !is_density(m, MATRIX_TOL) {
                                return Err(format!("{}: not a density matrix", n.id));
                            }
                        }
                    }
                }
                NodeKind::Transformation => {
                    let m = self
                        .transformations
                        .get(&n.id)
                        .ok_or_else(|| format!("{}: no isometry given", n.id))?;
                    let din = self.in_dim(&n.id);
                    let dout = self.out_dim(&n.id);
                    if m.ncols() != din || m.nrows() != dout {
                        return Err(format!(
                            "{}: matrix is {}x{} but wires need {}x{}",
                            n.id,
                            m.nrows(),
                            m.ncols(),
                            dout,
                            din
                        ));
                    }
                    if !is_isometry(m, MATRIX_TOL) {
                        return Err(format!("{}: matrix is not an isometry", n.id));
                    }
                }
                NodeKind::Measurement => {
                    let ps = self
                        .measurements
                        .get(&n.id)
                        .ok_or_else(|| format!("{}: no measurement given", n.id))?;
                    if ps.len() != n.arity() as usize {
                        return Err(format!(
                            "{}: {} projectors for arity {}",
                            n.id,
                            ps.len(),
                            n.arity()
                        ));
                    }
                    let din = self.in_dim(&n.id);
                    let mut sum = CMat::zeros(din, din);
                    for (k, p) in ps.iter().enumerate() {
                        if p.nrows() != din || p.ncols() != din {
                            return Err(format!(
                                "{}: projector {} is {}x{}, expected {}x{}",
                                n.id,
                                k,
                                p.nrows(),
                                p.ncols(),
                                din,
                                din
                            ));
                        }
                        if !is_projector(p, MATRIX_TOL) {
                            return Err(format!("{}: outcome {} is not a projector", n.id, k));
                        }
                        sum += p;
                    }
                    if max_abs_diff(&sum, &eye(din)) > MATRIX_TOL {
                        return Err(format!("{}: projectors do not sum to identity", n.id));
                    }
                }
            }
        }
        for id in self.sources.keys() {
            if self.circuit.node(id).map(|n| n.kind) != Some(NodeKind::Source) {
                return Err(format!("{id}: state given for a non-source node"));
            }
        }
        for id in self.transformations.keys() {
            if self.circuit.node(id).map(|n| n.kind) != Some(NodeKind::Transformation) {
                return Err(format!("{id}: isometry given for a non-transformation node"));
            }
        }
        for id in self.measurements.keys() {
            if self.circuit.node(id).map(|n| n.kind) != Some(NodeKind::Measurement) {
                return Err(format!("{id}: measurement given for a non-measurement node"));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON format: matrices as nested arrays of [re, im] pairs, rows outermost.

pub fn emit_cvec(v: &CVec) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|z| format!("[{}, {}]", fmt12(z.re), fmt12(z.im)))
        .collect();
    format!("[{}]", parts.join(", "))
}

pub fn emit_cmat(m: &CMat) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let cells: Vec<String> = (0..m.ncols())
                .map(|j| format!("[{}, {}]", fmt12(m[(i, j)].re), fmt12(m[(i, j)].im)))
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn parse_complex(v: &serde_json::Value) -> Result<C, String> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or("complex entries must be [re, im] pairs")?;
    let re = pair[0].as_f64().ok_or("non-numeric real part")?;
    let im = pair[1].as_f64().ok_or("non-numeric imaginary part")?;
    Ok(C::new(re, im))
}

pub fn parse_cvec(v: &serde_json::Value) -> Result<CVec, String> {
    let arr = v.as_array().ok_or("expected an array of [re, im] pairs")?;
    let mut out = CVec::zeros(arr.len());
    for (k, cell) in arr.iter().enumerate() {
        out[k] = parse_complex(cell)?;
    }
    Ok(out)
}

pub fn parse_cmat(v: &serde_json::Value) -> Result<CMat, String> {
    let rows = v.as_array().ok_or("expected an array of matrix rows")?;
    if rows.is_empty() {
        return Err("empty matrix".into());
    }
    let ncols = rows[0]
        .as_array()
        .ok_or("matrix rows must be arrays")?
        .len();
    let mut out = CMat::zeros(rows.len(), ncols);
    for (i, row) in rows.iter().enumerate() {
        let cells = row.as_array().ok_or("matrix rows must be arrays")?;
        if cells.len() != ncols {
            return Err(format!("row {i} has {} cells, expected {ncols}", cells.len()));
        }
        for (j, cell) in cells.iter().enumerate() {
            out[(i, j)] = parse_complex(cell)?;
        }
    }
    Ok(out)
}

/// Serialise a realization (with its circuit embedded) to JSON.
pub fn realization_to_json(r: &QuantumRealization) -> String {
    let mut out = String::from("{\n");
    out.push_str("  \"circuit\": ");
    let circuit = crate::circuit::circuit_to_json(&r.circuit);
    out.push_str(&indent_tail(circuit.trim_end(), 1));
    out.push_str(",\n  \"wire_dims\": {\n");
    let dims: Vec<String> = r
        .wire_dims
        .iter()
        .map(|(k, v)| format!("    \"{}\": {}", crate::io::json_escape(k), v))
        .collect();
    out.push_str(&dims.join(",\n"));
    out.push_str("\n  },\n  \"sources\": {\n");
    let sources: Vec<String> = r
        .sources
        .iter()
        .map(|(k, v)| {
            let body = match v {
                SourceState::Pure(vec) => {
                    format!("{{\"kind\": \"pure\", \"amplitudes\": {}}}", emit_cvec(vec))
                }
                SourceState::Density(m) => {
                    format!("{{\"kind\": \"density\", \"matrix\": {}}}", emit_cmat(m))
                }
            };
            format!("    \"{}\": {}", crate::io::json_escape(k), body)
        })
        .collect();
    out.push_str(&sources.join(",\n"));
    out.push_str("\n  },\n  \"transformations\": {\n");
    let trans: Vec<String> = r
        .transformations
        .iter()
        .map(|(k, m)| format!("    \"{}\": {}", crate::io::json_escape(k), emit_cmat(m)))
        .collect();
    out.push_str(&trans.join(",\n"));
    out.push_str("\n  },\n  \"measurements\": {\n");
    let meas: Vec<String> = r
        .measurements
        .iter()
        .map(|(k, ps)| {
            let items: Vec<String> = ps.iter().map(emit_cmat).collect();
            format!(
                "    \"{}\": [{}]",
                crate::io::json_escape(k),
                items.join(", ")
            )
        })
        .collect();
    out.push_str(&meas.join(",\n"));
    out.push_str("\n  }\n}\n");
    out
}

fn indent_tail(text: &str, level: usize) -> String {
    let pad = "  ".repeat(level);
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default().to_string();
    let mut out = first;
    for line in lines {
        out.push('\n');
        out.push_str(&pad);
        out.push_str(line);
    }
    out
}

/// Parse a realization; the circuit is validated structurally and the
/// realization's invariants are checked, reporting the first violation.
pub fn realization_from_json(text: &str) -> Result<QuantumRealization, String> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("realization file: {e}"))?;
    let circuit_text = v
        .get("circuit")
        .ok_or("missing field \"circuit\"")?
        .to_string();
    let circuit = crate::circuit::circuit_from_json(&circuit_text)?;
    let mut wire_dims = BTreeMap::new();
    let dims = v
        .get("wire_dims")
        .and_then(|d| d.as_object())
        .ok_or("missing object field \"wire_dims\"")?;
    for (k, val) in dims {
        let d = val
            .as_u64()
            .ok_or_else(|| format!("wire {k}: non-integer dimension"))?;
        wire_dims.insert(k.clone(), d as usize);
    }
    let mut sources = BTreeMap::new();
    for (k, val) in v
        .get("sources")
        .and_then(|d| d.as_object())
        .ok_or("missing object field \"sources\"")?
    {
        let kind = val.get("kind").and_then(|x| x.as_str()).unwrap_or("pure");
        let st = match kind {
            "pure" => SourceState::Pure(
                parse_cvec(val.get("amplitudes").ok_or_else(|| {
                    format!("{k}: pure source needs an \"amplitudes\" field")
                })?)
                .map_err(|e| format!("{k}: {e}"))?,
            ),
            "density" => SourceState::Density(
                parse_cmat(
                    val.get("matrix")
                        .ok_or_else(|| format!("{k}: density source needs a \"matrix\" field"))?,
                )
                .map_err(|e| format!("{k}: {e}"))?,
            ),
            other => return Err(format!("{k}: unknown source kind {other:?}")),
        };
        sources.insert(k.clone(), st);
    }
    let mut transformations = BTreeMap::new();
    for (k, val) in v
        .get("transformations")
        .and_then(|d| d.as_object())
        .ok_or("missing object field \"transformations\"")?
    {
        transformations.insert(k.clone(), parse_cmat(val).map_err(|e| format!("{k}: {e}"))?);
    }
    let mut measurements = BTreeMap::new();
    for (k, val) in v
        .get("measurements")
        .and_then(|d| d.as_object())
        .ok_or("missing object field \"measurements\"")?
    {
        let arr = val
            .as_array()
            .ok_or_else(|| format!("{k}: measurements must be arrays of matrices"))?;
        let mut ps = Vec::new();
        for m in arr {
            ps.push(parse_cmat(m).map_err(|e| format!("{k}: {e}"))?);
        }
        measurements.insert(k.clone(), ps);
    }
    let r = QuantumRealization {
        circuit,
        wire_dims,
        sources,
        transformations,
        measurements,
    };
    r.validate()?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Node, Wire};
    use crate::quantum::linalg::cr;
    use crate::quantum::states::{basis_state, ghz4, projectors_xz};

    /// One source wired straight to four qubit measurements.
    pub fn ghz_box(state: SourceState, thetas: [f64; 4]) -> QuantumRealization {
        let mut nodes: Vec<Node> = "ABCD"
            .chars()
            .map(|p| Node::new(p.to_string(), NodeKind::Measurement))
            .collect();
        nodes.push(Node::new("G", NodeKind::Source));
        let wires: Vec<Wire> = "ABCD"
            .chars()
            .map(|p| Wire::new(format!("G->{p}"), "G", p.to_string()))
            .collect();
        let circuit = CausalCircuit::new(nodes, wires);
        let wire_dims = circuit
            .wires()
            .iter()
            .map(|w| (w.id.clone(), 2usize))
            .collect();
        let measurements = "ABCD"
            .chars()
            .zip(thetas)
            .map(|(p, th)| (p.to_string(), projectors_xz(th)))
            .collect();
        QuantumRealization {
            circuit,
            wire_dims,
            sources: [("G".to_string(), state)].into(),
            transformations: BTreeMap::new(),
            measurements,
        }
    }

    #[test]
    fn valid_realization_passes() {
        let r = ghz_box(SourceState::Pure(ghz4()), [0.0; 4]);
        assert_eq!(r.validate(), Ok(()));
    }

    #[test]
    fn first_violation_names_the_node() {
        let mut r = ghz_box(SourceState::Pure(ghz4()), [0.0; 4]);
        r.sources
            .insert("G".to_string(), SourceState::Pure(basis_state(16, 0) * cr(2.0)));
        let err = r.validate().unwrap_err();
        assert!(err.starts_with("G:"), "{err}");
        assert!(err.contains("unit norm"));
    }

    #[test]
    fn json_round_trip_preserves_everything() {
        let r = ghz_box(SourceState::Density(crate::quantum::states::noisy_ghz4(0.9)), [
            0.0,
            0.5,
            1.0,
            1.5,
        ]);
        let text = realization_to_json(&r);
        let back = realization_from_json(&text).unwrap();
        assert_eq!(back.to_owned().wire_dims, r.wire_dims);
        assert_eq!(realization_to_json(&back), text);
    }

    #[test]
    fn bad_projectors_are_reported() {
        let mut r = ghz_box(SourceState::Pure(ghz4()), [0.0; 4]);
        let ps = r.measurements.get_mut("B").unwrap();
        ps[0] = ps[0].clone() * cr(0.5);
        let err = r.validate().unwrap_err();
        assert!(err.starts_with("B:"), "{err}");
    }
}
