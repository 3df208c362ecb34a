//! The inflated wiring: a doubled copy of the four-party circuit in which
//! the measurements of A and D draw on disjoint sets of source copies.
//!
//! Six tripartite sources (two copies each of ACD and ABD, one each of
//! ABC and BCD) feed nine bipartite transformations, which feed the four
//! measurements.  Each source exposes three *slots*, one per party pair
//! inside it, identified as "SOURCE:PAIR" (e.g. "ABC:AC").  Two slots are
//! *shared*: ABC:AC feeds both AC1 and AC2, and BCD:BD feeds both BD1 and
//! BD2.  Shared slots are what make the measurements of A and C (and of B
//! and D) non-commuting in the Heisenberg picture, while A and D have
//! entirely disjoint ancestries and commute exactly.  Two slots dangle
//! (ACD1:CD and ABD2:AB): their source still emits them, but no
//! transformation consumes them.
//!
//! [`valid_subcircuits`] resolves each shared slot to one of its two
//! consumers (four selections total) and reports, per selection, which
//! adjacent party pairs see exactly the original single-copy wiring
//! around them — those are the pairs whose pair marginals in the inflated
//! circuit coincide with the original circuit's.

use std::collections::{BTreeMap, BTreeSet};

use crate::circuit::{CausalCircuit, Node, NodeKind, Wire};
use crate::quantum::{
    random_projective_measurement, random_pure_state, random_unitary, CMat, CVec, SourceState,
    SystemParty, SystemTransformation, WiredSystem,
};
use rand_chacha::ChaCha8Rng;

/// The four party names, in order.
pub const INFLATION_PARTIES: [&str; 4] = ["A", "B", "C", "D"];

/// Source copies of the inflated wiring, in sorted id order.
pub const INFLATION_SOURCES: [&str; 6] = ["ABC", "ABD1", "ABD2", "ACD1", "ACD2", "BCD"];

/// Transformation copies of the inflated wiring, in sorted id order.
pub const INFLATION_TRANSFORMATIONS: [&str; 9] =
    ["AB", "AC1", "AC2", "AD1", "AD2", "BC", "BD1", "BD2", "CD"];

/// Slot table: (slot id, consuming transformations).  A slot id is
/// "SOURCE:PAIR".  Shared slots list two consumers; dangling slots none.
pub fn inflation_slots() -> Vec<(String, Vec<&'static str>)> {
    let table: [(&str, &[&str]); 18] = [
        ("ABC:AB", &["AB"]),
        ("ABC:AC", &["AC1", "AC2"]), // shared slot
        ("ABC:BC", &["BC"]),
        ("ABD1:AB", &["AB"]),
        ("ABD1:AD", &["AD1"]),
        ("ABD1:BD", &["BD1"]),
        ("ABD2:AB", &[]), // dangling
        ("ABD2:AD", &["AD2"]),
        ("ABD2:BD", &["BD2"]),
        ("ACD1:AC", &["AC1"]),
        ("ACD1:AD", &["AD1"]),
        ("ACD1:CD", &[]), // dangling
        ("ACD2:AC", &["AC2"]),
        ("ACD2:AD", &["AD2"]),
        ("ACD2:CD", &["CD"]),
        ("BCD:BC", &["BC"]),
        ("BCD:BD", &["BD1", "BD2"]), // shared slot
        ("BCD:CD", &["CD"]),
    ];
    table
        .iter()
        .map(|(id, uses)| (id.to_string(), uses.to_vec()))
        .collect()
}

/// The party pair a transformation copy serves, e.g. "AC1" -> ("A", "C").
pub fn transformation_parties(t: &str) -> (String, String) {
    let letters: Vec<char> = t.chars().filter(|c| c.is_ascii_alphabetic()).collect();
    (letters[0].to_string(), letters[1].to_string())
}

/// Which transformation copies each measurement reads, in sorted order.
pub fn measurement_inputs(party: &str) -> Vec<&'static str> {
    match party {
        "A" => vec!["AB", "AC1", "AD1"],
        "B" => vec!["AB", "BC", "BD1"],
        "C" => vec!["AC2", "BC", "CD"],
        "D" => vec!["AD2", "BD2", "CD"],
        other => panic!("unknown party {other}"),
    }
}

/// The inflated wiring as a causal circuit.  Shared slots contribute one
/// edge per consumer; dangling slots contribute no edge, so their sources
/// keep out-degree 2.
pub fn fig2_inflation() -> CausalCircuit {
    let mut nodes = Vec::new();
    for s in INFLATION_SOURCES {
        nodes.push(Node::new(s, NodeKind::Source));
    }
    for t in INFLATION_TRANSFORMATIONS {
        nodes.push(Node::new(t, NodeKind::Transformation));
    }
    for p in INFLATION_PARTIES {
        nodes.push(Node::new(p, NodeKind::Measurement));
    }
    let mut wires = Vec::new();
    for (slot, uses) in inflation_slots() {
        let source = slot.split(':').next().unwrap().to_string();
        for t in uses {
            wires.push(Wire::new(format!("{slot}->{t}"), source.clone(), t));
        }
    }
    for p in INFLATION_PARTIES {
        for t in measurement_inputs(p) {
            wires.push(Wire::new(format!("{t}->{p}"), t, p));
        }
    }
    CausalCircuit::new(nodes, wires)
}

/// One resolution of the two shared slots.  `ac_choice`/`bd_choice` are 1
/// or 2, naming which copy receives the shared slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcircuitSelection {
    pub ac_choice: u8,
    pub bd_choice: u8,
    /// Transformations whose both inputs are funded under this selection.
    pub complete_transformations: Vec<String>,
    /// Adjacent party pairs whose local wiring matches the original
    /// single-copy circuit under this selection.
    pub matched_pairs: Vec<(String, String)>,
}

/// Slot -> consuming transformations under a shared-slot resolution.
fn resolved_uses(ac_choice: u8, bd_choice: u8) -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    for (slot, uses) in inflation_slots() {
        let resolved: Vec<String> = if slot == "ABC:AC" {
            vec![format!("AC{ac_choice}")]
        } else if slot == "BCD:BD" {
            vec![format!("BD{bd_choice}")]
        } else {
            uses.iter().map(|s| s.to_string()).collect()
        };
        out.insert(slot, resolved);
    }
    out
}

/// The source copy owning a slot, e.g. "ACD1:AD" -> "ACD1".
fn slot_source(slot: &str) -> String {
    slot.split(':').next().unwrap().to_string()
}

/// The original (single-copy) source a copy descends from: strip the copy
/// digit, e.g. "ACD1" -> "ACD".
fn source_type(source: &str) -> String {
    source.chars().filter(|c| c.is_ascii_alphabetic()).collect()
}

/// Enumerate the four shared-slot resolutions and the party pairs whose
/// surroundings match the original wiring in each.
///
/// A pair (X, Y) matches when (a) every transformation feeding X or Y has
/// both inputs funded under the selection and (b) the source copies those
/// transformations draw on contain at most one copy of each original
/// source.  Under those two conditions the joint ancestry of {X, Y} is
/// isomorphic to its single-copy counterpart.  The pair (A, D) never
/// matches: its ancestries use both copies of ACD and of ABD.
pub fn valid_subcircuits() -> Vec<SubcircuitSelection> {
    let adjacent_pairs = [("A", "B"), ("B", "C"), ("C", "D"), ("A", "D")];
    let mut out = Vec::new();
    for ac_choice in [1u8, 2] {
        for bd_choice in [1u8, 2] {
            let uses = resolved_uses(ac_choice, bd_choice);
            // Count funded inputs per transformation.
            let mut funded: BTreeMap<String, usize> = BTreeMap::new();
            for consumers in uses.values() {
                for t in consumers {
                    *funded.entry(t.clone()).or_insert(0) += 1;
                }
            }
            let complete: BTreeSet<String> = INFLATION_TRANSFORMATIONS
                .iter()
                .filter(|t| funded.get(**t).copied().unwrap_or(0) == 2)
                .map(|t| t.to_string())
                .collect();

            let mut matched = Vec::new();
            for (x, y) in adjacent_pairs {
                let mut feeders: BTreeSet<String> = BTreeSet::new();
                feeders.extend(measurement_inputs(x).iter().map(|t| t.to_string()));
                feeders.extend(measurement_inputs(y).iter().map(|t| t.to_string()));
                if !feeders.iter().all(|t| complete.contains(t)) {
                    continue;
                }
                // Source copies funding those feeders.
                let mut copies: BTreeSet<String> = BTreeSet::new();
                for (slot, consumers) in &uses {
                    if consumers.iter().any(|t| feeders.contains(t)) {
                        copies.insert(slot_source(slot));
                    }
                }
                let mut types_seen: BTreeSet<String> = BTreeSet::new();
                let unique = copies.iter().all(|c| types_seen.insert(source_type(c)));
                if unique {
                    matched.push((x.to_string(), y.to_string()));
                }
            }
            out.push(SubcircuitSelection {
                ac_choice,
                bd_choice,
                complete_transformations: complete.into_iter().collect(),
                matched_pairs: matched,
            });
        }
    }
    out
}

/// Quantum data for the inflated wiring: a state per source (on its three
/// slots, sorted by slot id), a unitary per transformation (inputs sorted
/// by slot id), and a projective binary measurement per party (on the
/// party's three shares).
#[derive(Debug, Clone)]
pub struct InflationRealization {
    /// Dimension of every slot, keyed by slot id.  All 18 slots required.
    pub slot_dims: BTreeMap<String, usize>,
    /// Source states keyed by source id.
    pub sources: BTreeMap<String, SourceState>,
    /// Transformation unitaries keyed by transformation id.
    pub transformations: BTreeMap<String, CMat>,
    /// Projector families keyed by party id.
    pub measurements: BTreeMap<String, Vec<CMat>>,
}

/// Slots consumed by a transformation copy, sorted by slot id.
pub fn transformation_in_slots(t: &str) -> Vec<String> {
    let mut slots: Vec<String> = inflation_slots()
        .into_iter()
        .filter(|(_, uses)| uses.iter().any(|u| *u == t))
        .map(|(slot, _)| slot)
        .collect();
    slots.sort();
    slots
}

/// The share of a transformation copy a party reads: 0 for the
/// alphabetically first party of the pair, 1 for the second.
pub fn party_share_of(t: &str, party: &str) -> usize {
    let (x, y) = transformation_parties(t);
    if x == party {
        0
    } else if y == party {
        1
    } else {
        panic!("{party} does not read {t}")
    }
}

impl InflationRealization {
    /// Slot ids in the order the global Hilbert space is assembled.
    pub fn slot_order() -> Vec<String> {
        inflation_slots().into_iter().map(|(s, _)| s).collect()
    }

    pub fn validate(&self) -> Result<(), String> {
        let slots = Self::slot_order();
        for s in &slots {
            let d = *self
                .slot_dims
                .get(s)
                .ok_or_else(|| format!("slot {s}: missing dimension"))?;
            if d == 0 {
                return Err(format!("slot {s}: dimension must be positive"));
            }
        }
        for src in INFLATION_SOURCES {
            let state = self
                .sources
                .get(src)
                .ok_or_else(|| format!("source {src}: missing state"))?;
            let dim: usize = slots
                .iter()
                .filter(|s| slot_source(s) == src)
                .map(|s| self.slot_dims[s])
                .product();
            if state.dim() != dim {
                return Err(format!(
                    "source {src}: state dimension {} does not match slot product {dim}",
                    state.dim()
                ));
            }
        }
        for t in INFLATION_TRANSFORMATIONS {
            let u = self
                .transformations
                .get(t)
                .ok_or_else(|| format!("transformation {t}: missing unitary"))?;
            let din: usize = transformation_in_slots(t)
                .iter()
                .map(|s| self.slot_dims[s])
                .product();
            if u.nrows() != din || u.ncols() != din {
                return Err(format!(
                    "transformation {t}: unitary is {}x{}, expected {din}x{din}",
                    u.nrows(),
                    u.ncols()
                ));
            }
            if !crate::quantum::is_unitary(u, crate::quantum::MATRIX_TOL) {
                return Err(format!("transformation {t}: matrix is not unitary"));
            }
        }
        for p in INFLATION_PARTIES {
            let projs = self
                .measurements
                .get(p)
                .ok_or_else(|| format!("measurement {p}: missing projectors"))?;
            if projs.len() < 2 {
                return Err(format!("measurement {p}: needs at least two outcomes"));
            }
            let dim: usize = measurement_inputs(p)
                .iter()
                .map(|t| {
                    let in_slots = transformation_in_slots(t);
                    let share = party_share_of(t, p);
                    self.slot_dims[&in_slots[share]]
                })
                .product();
            let mut sum = CMat::zeros(dim, dim);
            for (k, pr) in projs.iter().enumerate() {
                if pr.nrows() != dim || pr.ncols() != dim {
                    return Err(format!(
                        "measurement {p}: projector {k} is {}x{}, expected {dim}x{dim}",
                        pr.nrows(),
                        pr.ncols()
                    ));
                }
                if !crate::quantum::is_projector(pr, crate::quantum::MATRIX_TOL) {
                    return Err(format!("measurement {p}: outcome {k} is not a projector"));
                }
                sum += pr;
            }
            let eye = CMat::identity(dim, dim);
            if crate::quantum::max_abs_diff(&sum, &eye) > crate::quantum::MATRIX_TOL {
                return Err(format!("measurement {p}: projectors do not sum to identity"));
            }
        }
        Ok(())
    }

    /// Assemble the wired system: slots in [`Self::slot_order`] order,
    /// transformations acting on their sorted in-slots (output share k
    /// re-occupying in-slot k), parties reading their shares sorted by
    /// transformation id.
    pub fn wired_system(&self) -> Result<WiredSystem, String> {
        self.validate()?;
        let slot_ids = Self::slot_order();
        let slot_index: BTreeMap<&str, usize> = slot_ids
            .iter()
            .enumerate()
            .map(|(k, s)| (s.as_str(), k))
            .collect();
        let slot_dims: Vec<usize> = slot_ids.iter().map(|s| self.slot_dims[s]).collect();
        let transformations: Vec<SystemTransformation> = INFLATION_TRANSFORMATIONS
            .iter()
            .map(|t| SystemTransformation {
                id: t.to_string(),
                in_slots: transformation_in_slots(t)
                    .iter()
                    .map(|s| slot_index[s.as_str()])
                    .collect(),
                unitary: self.transformations[*t].clone(),
            })
            .collect();
        let parties: Vec<SystemParty> = INFLATION_PARTIES
            .iter()
            .map(|p| {
                let tindex: BTreeMap<&str, usize> = INFLATION_TRANSFORMATIONS
                    .iter()
                    .enumerate()
                    .map(|(k, t)| (*t, k))
                    .collect();
                SystemParty {
                    id: p.to_string(),
                    shares: measurement_inputs(p)
                        .iter()
                        .map(|t| (tindex[*t], party_share_of(t, p)))
                        .collect(),
                    projectors: self.measurements[*p].clone(),
                }
            })
            .collect();
        let system = WiredSystem {
            slot_ids,
            slot_dims,
            transformations,
            parties,
        };
        system.validate()?;
        Ok(system)
    }

    /// The global pure state: source states tensored in sorted source
    /// order — which equals the slot-order layout because each source's
    /// slots are contiguous and sorted within [`Self::slot_order`].
    pub fn global_state(&self) -> Result<CVec, String> {
        let mut factors = Vec::new();
        for src in INFLATION_SOURCES {
            match self.sources.get(src) {
                Some(SourceState::Pure(v)) => factors.push(v.clone()),
                Some(SourceState::Density(_)) => {
                    return Err(format!(
                        "source {src}: the inflated system needs pure source states"
                    ))
                }
                None => return Err(format!("source {src}: missing state")),
            }
        }
        Ok(crate::quantum::kron_all_vec(&factors))
    }
}

/// A random inflated realization with every slot of dimension `dim`:
/// Haar-random pure sources, Haar-random unitaries, random binary
/// projective measurements on each party's three shares.
pub fn random_fig2_realization(rng: &mut ChaCha8Rng, dim: usize) -> InflationRealization {
    let slot_dims: BTreeMap<String, usize> = InflationRealization::slot_order()
        .into_iter()
        .map(|s| (s, dim))
        .collect();
    let mut sources = BTreeMap::new();
    for src in INFLATION_SOURCES {
        sources.insert(
            src.to_string(),
            SourceState::Pure(random_pure_state(rng, dim * dim * dim)),
        );
    }
    let mut transformations = BTreeMap::new();
    for t in INFLATION_TRANSFORMATIONS {
        transformations.insert(t.to_string(), random_unitary(rng, dim * dim));
    }
    let mut measurements = BTreeMap::new();
    for p in INFLATION_PARTIES {
        measurements.insert(
            p.to_string(),
            random_projective_measurement(rng, dim * dim * dim, 2),
        );
    }
    InflationRealization {
        slot_dims,
        sources,
        transformations,
        measurements,
    }
}

/// A realization on which every party's outcome-0 Heisenberg projector
/// fixes the global all-zeros source state: identity unitaries,
/// computational-basis sources, and outcome-0 projectors of the given
/// rank pattern.  With `keep_zero` true the outcome-0 projector contains
/// |0..0> (residuals vanish and every party answers 0 with certainty);
/// with it false outcome 0 annihilates the state instead.
pub fn zero_residual_fig2_realization(dim: usize, keep_zero: bool) -> InflationRealization {
    let slot_dims: BTreeMap<String, usize> = InflationRealization::slot_order()
        .into_iter()
        .map(|s| (s, dim))
        .collect();
    let d3 = dim * dim * dim;
    let mut sources = BTreeMap::new();
    for src in INFLATION_SOURCES {
        sources.insert(
            src.to_string(),
            SourceState::Pure(crate::quantum::basis_state(d3, 0)),
        );
    }
    let mut transformations = BTreeMap::new();
    for t in INFLATION_TRANSFORMATIONS {
        let din = dim * dim;
        transformations.insert(t.to_string(), CMat::identity(din, din));
    }
    let mut measurements = BTreeMap::new();
    for p in INFLATION_PARTIES {
        let zero = crate::quantum::basis_state(d3, 0);
        let pz = crate::quantum::projector_onto(&zero);
        let eye = CMat::identity(d3, d3);
        let projs = if keep_zero {
            // Outcome 0 keeps |0..0>; here outcome 0 is everything.
            vec![eye.clone(), CMat::zeros(d3, d3)]
        } else {
            // Outcome 0 is the complement of |0..0>.
            vec![&eye - &pz, pz]
        };
        measurements.insert(p.to_string(), projs);
    }
    InflationRealization {
        slot_dims,
        sources,
        transformations,
        measurements,
    }
}

/// Serialise an inflated-wiring realization to JSON.
pub fn inflation_realization_to_json(r: &InflationRealization) -> String {
    use crate::io::json_escape;
    use crate::quantum::realization::{emit_cmat, emit_cvec};
    let mut out = String::from("{\n  \"slot_dims\": {\n");
    let dims: Vec<String> = r
        .slot_dims
        .iter()
        .map(|(k, v)| format!("    \"{}\": {}", json_escape(k), v))
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
            format!("    \"{}\": {}", json_escape(k), body)
        })
        .collect();
    out.push_str(&sources.join(",\n"));
    out.push_str("\n  },\n  \"transformations\": {\n");
    let trans: Vec<String> = r
        .transformations
        .iter()
        .map(|(k, m)| format!("    \"{}\": {}", json_escape(k), emit_cmat(m)))
        .collect();
    out.push_str(&trans.join(",\n"));
    out.push_str("\n  },\n  \"measurements\": {\n");
    let meas: Vec<String> = r
        .measurements
        .iter()
        .map(|(k, ps)| {
            let items: Vec<String> = ps.iter().map(emit_cmat).collect();
            format!("    \"{}\": [{}]", json_escape(k), items.join(", "))
        })
        .collect();
    out.push_str(&meas.join(",\n"));
    out.push_str("\n  }\n}\n");
    out
}

/// Parse an inflated-wiring realization and check its invariants.
pub fn inflation_realization_from_json(text: &str) -> Result<InflationRealization, String> {
    use crate::quantum::realization::{parse_cmat, parse_cvec};
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("realization file: {e}"))?;
    let mut slot_dims = BTreeMap::new();
    let dims = v
        .get("slot_dims")
        .and_then(|d| d.as_object())
        .ok_or("missing object field \"slot_dims\"")?;
    for (k, val) in dims {
        let d = val
            .as_u64()
            .ok_or_else(|| format!("slot {k}: non-integer dimension"))?;
        slot_dims.insert(k.clone(), d as usize);
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
                parse_cvec(
                    val.get("amplitudes")
                        .ok_or_else(|| format!("{k}: pure source needs an \"amplitudes\" field"))?,
                )
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
    let r = InflationRealization {
        slot_dims,
        sources,
        transformations,
        measurements,
    };
    r.validate()?;
    Ok(r)
}
