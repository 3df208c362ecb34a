//! Embedding arbitrary four-party circuits into the fixed wiring.

use std::collections::{BTreeMap, BTreeSet};

use super::fig1::PARTIES;
use super::graph::{CausalCircuit, CircuitError, NodeKind};

/// A structure-preserving map from a canonicalized circuit into the
/// four-party wiring of [`super::fig1_circuit`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    /// The canonicalized input circuit the maps below refer to.
    pub canonical: CausalCircuit,
    /// Measurement id of the input circuit -> party letter (A..D), assigned
    /// in sorted-id order.
    pub party_of: BTreeMap<String, String>,
    /// Canonical node id -> id of a four-party-wiring node whose label is a
    /// superset of the node's label.
    pub node_map: BTreeMap<String, String>,
    /// Canonical wire id -> directed path (node-id sequence) in the
    /// four-party wiring from `node_map[from]` to `node_map[to]`.  A
    /// one-element path is trivial (both endpoints map to the same node).
    pub wire_paths: BTreeMap<String, Vec<String>>,
}

fn set_to_id(s: &BTreeSet<char>) -> String {
    s.iter().collect()
}

/// All 2-subsets of the four parties containing `need`, sorted.
fn pair_candidates(need: &BTreeSet<char>) -> Vec<BTreeSet<char>> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let cand: BTreeSet<char> = [
                PARTIES[i].chars().next().unwrap(),
                PARTIES[j].chars().next().unwrap(),
            ]
            .into_iter()
            .collect();
            if need.is_subset(&cand) {
                out.push(cand);
            }
        }
    }
    out
}

/// Lexicographically smallest 3-subset of the parties containing `need`.
fn smallest_triple(need: &BTreeSet<char>) -> Option<BTreeSet<char>> {
    let mut best: Option<BTreeSet<char>> = None;
    for i in 0..4 {
        for j in (i + 1)..4 {
            for k in (j + 1)..4 {
                let cand: BTreeSet<char> = [PARTIES[i], PARTIES[j], PARTIES[k]]
                    .iter()
                    .map(|p| p.chars().next().unwrap())
                    .collect();
                if need.is_subset(&cand) {
                    let better = match &best {
                        None => true,
                        Some(b) => set_to_id(&cand) < set_to_id(b),
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    best
}

impl CausalCircuit {
    /// Embed a four-party circuit into the fixed wiring.
    ///
    /// The circuit is canonicalized first; its four measurements (sorted by
    /// id) become parties A–D.  Each canonical node is mapped to a wiring
    /// node whose party label contains the node's measurement future
    /// (sources to three-party sources, transformations to two-party
    /// transformations, preferring lexicographically small labels), and
    /// each wire to a directed path between the mapped endpoints.
    ///
    /// Errors: [`CircuitError::PartyCountMismatch`] unless there are exactly
    /// four measurements; [`CircuitError::CommonCausePresent`] when a single
    /// node is an ancestor of all four; [`CircuitError::UnembeddableNode`]
    /// when a group of wired-together transformations spans more than two
    /// parties (no two-party node can host the group) or no consistent
    /// label assignment exists.
    pub fn embed_into_canonical(&self) -> Result<Embedding, CircuitError> {
        let canonical = self.canonicalize()?;

        let measurements = canonical.measurements();
        if measurements.len() != 4 {
            return Err(CircuitError::PartyCountMismatch {
                found: measurements.len(),
            });
        }
        let party_of: BTreeMap<String, String> = measurements
            .iter()
            .zip(PARTIES.iter())
            .map(|(m, p)| (m.id.clone(), p.to_string()))
            .collect();

        // Labels translated to party letters.
        let futures = canonical.all_measurement_futures();
        let mut label: BTreeMap<String, BTreeSet<char>> = BTreeMap::new();
        for n in canonical.nodes() {
            let fut = futures.get(&n.id).cloned().unwrap_or_default();
            let set: BTreeSet<char> = fut
                .iter()
                .map(|m| party_of[m].chars().next().unwrap())
                .collect();
            if set.len() == 4 {
                return Err(CircuitError::CommonCausePresent);
            }
            label.insert(n.id.clone(), set);
        }

        // Transformations connected by wires must share one target node
        // (the wiring has no transformation-to-transformation edges, so a
        // wire between two of them can only map to a trivial path).  Group
        // them into components and label each by the union.
        let trans: Vec<&str> = canonical
            .nodes()
            .iter()
            .filter(|n| n.kind == NodeKind::Transformation)
            .map(|n| n.id.as_str())
            .collect();
        let index_of: BTreeMap<&str, usize> =
            trans.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let mut comp: Vec<usize> = (0..trans.len()).collect();
        fn find(comp: &mut Vec<usize>, i: usize) -> usize {
            if comp[i] != i {
                let r = find(comp, comp[i]);
                comp[i] = r;
            }
            comp[i]
        }
        for w in canonical.wires() {
            if let (Some(&i), Some(&j)) =
                (index_of.get(w.from.as_str()), index_of.get(w.to.as_str()))
            {
                let (ri, rj) = (find(&mut comp, i), find(&mut comp, j));
                if ri != rj {
                    let lo = ri.min(rj);
                    comp[ri.max(rj)] = lo;
                }
            }
        }
        let mut comp_members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..trans.len() {
            let r = find(&mut comp, i);
            comp_members.entry(r).or_default().push(i);
        }
        let comp_roots: Vec<usize> = comp_members.keys().copied().collect();
        let comp_of_trans: BTreeMap<&str, usize> = (0..trans.len())
            .map(|i| {
                let mut c = comp.clone();
                (trans[i], find(&mut c, i))
            })
            .collect();
        let mut comp_union: BTreeMap<usize, BTreeSet<char>> = BTreeMap::new();
        for (root, members) in &comp_members {
            let mut u = BTreeSet::new();
            for &m in members {
                u.extend(label[trans[m]].iter().copied());
            }
            if u.len() > 2 {
                let bad = members
                    .iter()
                    .map(|&m| trans[m].to_string())
                    .min()
                    .unwrap();
                return Err(CircuitError::UnembeddableNode { id: bad });
            }
            comp_union.insert(*root, u);
        }

        // Source constraints: each source must find a three-party label
        // containing its own label plus the labels of all transformation
        // children.  Backtracking over per-component pair choices, rooted
        // in lexicographic order, keeps the result deterministic.
        let sources: Vec<&str> = canonical
            .nodes()
            .iter()
            .filter(|n| n.kind == NodeKind::Source)
            .map(|n| n.id.as_str())
            .collect();
        let mut source_children: BTreeMap<&str, BTreeSet<usize>> =
            sources.iter().map(|s| (*s, BTreeSet::new())).collect();
        for w in canonical.wires() {
            if source_children.contains_key(w.from.as_str()) {
                if let Some(&c) = comp_of_trans.get(w.to.as_str()) {
                    source_children.get_mut(w.from.as_str()).unwrap().insert(c);
                }
            }
        }

        let mut assignment: BTreeMap<usize, BTreeSet<char>> = BTreeMap::new();
        let ok = assign_components(
            &comp_roots,
            0,
            &comp_union,
            &sources,
            &source_children,
            &label,
            &mut assignment,
        );
        if !ok {
            let bad = trans.iter().map(|t| t.to_string()).min().unwrap_or_default();
            return Err(CircuitError::UnembeddableNode { id: bad });
        }

        // Node map.
        let mut node_map: BTreeMap<String, String> = BTreeMap::new();
        for m in &measurements {
            node_map.insert(m.id.clone(), party_of[&m.id].clone());
        }
        for t in &trans {
            let set = &assignment[&comp_of_trans[t]];
            node_map.insert(t.to_string(), set_to_id(set));
        }
        let mut source_target: BTreeMap<&str, BTreeSet<char>> = BTreeMap::new();
        for s in &sources {
            let mut need = label[*s].clone();
            for c in &source_children[s] {
                need.extend(assignment[c].iter().copied());
            }
            let triple = smallest_triple(&need).expect("need fits a triple by construction");
            node_map.insert(s.to_string(), set_to_id(&triple));
            source_target.insert(s, triple);
        }

        // Wire paths.
        let mut wire_paths: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for w in canonical.wires() {
            let from_kind = canonical.node(&w.from).unwrap().kind;
            let to_kind = canonical.node(&w.to).unwrap().kind;
            let path = match (from_kind, to_kind) {
                (NodeKind::Source, NodeKind::Transformation) => {
                    vec![node_map[&w.from].clone(), node_map[&w.to].clone()]
                }
                (NodeKind::Source, NodeKind::Measurement) => {
                    let p = party_of[&w.to].chars().next().unwrap();
                    let s = &source_target[w.from.as_str()];
                    let mid = pair_candidates(&[p].into_iter().collect())
                        .into_iter()
                        .find(|cand| cand.is_subset(s))
                        .expect("the source triple contains the party");
                    vec![
                        node_map[&w.from].clone(),
                        set_to_id(&mid),
                        node_map[&w.to].clone(),
                    ]
                }
                (NodeKind::Transformation, NodeKind::Transformation) => {
                    // Same component, hence the same node: trivial path.
                    vec![node_map[&w.from].clone()]
                }
                (NodeKind::Transformation, NodeKind::Measurement) => {
                    vec![node_map[&w.from].clone(), node_map[&w.to].clone()]
                }
                other => unreachable!("valid circuits have no {other:?} wires"),
            };
            wire_paths.insert(w.id.clone(), path);
        }

        Ok(Embedding {
            canonical,
            party_of,
            node_map,
            wire_paths,
        })
    }
}

/// Depth-first assignment of a two-party label to each transformation
/// component; prunes as soon as any source's requirement exceeds three
/// parties.
fn assign_components(
    roots: &[usize],
    pos: usize,
    comp_union: &BTreeMap<usize, BTreeSet<char>>,
    sources: &[&str],
    source_children: &BTreeMap<&str, BTreeSet<usize>>,
    label: &BTreeMap<String, BTreeSet<char>>,
    assignment: &mut BTreeMap<usize, BTreeSet<char>>,
) -> bool {
    if pos == roots.len() {
        return true;
    }
    let root = roots[pos];
    for cand in pair_candidates(&comp_union[&root]) {
        assignment.insert(root, cand);
        let feasible = sources.iter().all(|s| {
            let mut need = label[*s].clone();
            for c in &source_children[s] {
                if let Some(t) = assignment.get(c) {
                    need.extend(t.iter().copied());
                }
            }
            need.len() <= 3
        });
        if feasible
            && assign_components(
                roots,
                pos + 1,
                comp_union,
                sources,
                source_children,
                label,
                assignment,
            )
        {
            return true;
        }
        assignment.remove(&root);
    }
    false
}
