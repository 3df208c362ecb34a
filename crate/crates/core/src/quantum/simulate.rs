//! Staged simulation of quantum realizations.
//!
//! Evolution keeps a "live" list of wires: it starts with every source
//! wire (sources sorted by id, each source's wires sorted by wire id),
//! applies transformations in topological order (ties broken by node id),
//! and finishes with exactly the wires entering measurements.  Operator
//! index conventions everywhere: a node's input (output) space is the
//! tensor product of its in-wires (out-wires) sorted by wire id, first
//! factor most significant.
//!
//! The measurement stage branches over outcomes party by party (parties
//! sorted by id), applying projectors to the evolved state; leaf
//! probabilities are squared norms (pure path) or traces (density path).
//!
//! [`brute_force_distribution`] is an intentionally independent oracle: it
//! builds every operator explicitly on the full tensor space (wires in
//! globally sorted order) and evolves a density matrix, for use on small
//! total dimensions.

use std::collections::BTreeMap;

use super::behavior::{enumerate_mixed_radix, Behavior, SettingsBehavior};
use super::linalg::{
    apply_on_positions, apply_on_positions_density, apply_to_front, apply_to_front_density, eye,
    front_permutation, kron, kron_vec, permutation_matrix, permute_density_factors,
    permute_state_factors, CMat, CVec,
};
use super::realization::{QuantumRealization, SourceState};
use crate::circuit::{CausalCircuit, NodeKind};

/// State after all transformations, with the bookkeeping needed to apply
/// measurement projectors.
#[derive(Debug, Clone)]
pub struct EvolvedState {
    /// Live wire ids, parallel to `dims`.
    pub wires: Vec<String>,
    pub dims: Vec<usize>,
    pub state: StateRep,
}

#[derive(Debug, Clone)]
pub enum StateRep {
    Pure(CVec),
    Density(CMat),
}

/// Transformations in topological order, smallest id first among ready
/// nodes.
pub fn transformation_topo_order(circuit: &CausalCircuit) -> Vec<String> {
    let mut produced: std::collections::BTreeSet<String> = circuit
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Source)
        .flat_map(|n| circuit.wires_out_of(&n.id))
        .map(|w| w.id.clone())
        .collect();
    let mut remaining: Vec<&str> = circuit
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Transformation)
        .map(|n| n.id.as_str())
        .collect();
    let mut order = Vec::new();
    while !remaining.is_empty() {
        let ready = remaining
            .iter()
            .copied()
            .filter(|t| circuit.wires_into(t).iter().all(|w| produced.contains(&w.id)))
            .min();
        let Some(next) = ready else {
            // Unreachable for valid circuits; bail out to avoid spinning.
            break;
        };
        for w in circuit.wires_out_of(next) {
            produced.insert(w.id.clone());
        }
        remaining.retain(|t| *t != next);
        order.push(next.to_string());
    }
    order
}

/// Run every source and transformation, producing the pre-measurement
/// state.  Uses the pure path when every source is pure, the density path
/// otherwise.
pub fn evolve(r: &QuantumRealization) -> Result<EvolvedState, String> {
    // Initial state: sources sorted by id.
    let sources: Vec<_> = r
        .circuit
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Source)
        .collect();
    let mut wires: Vec<String> = Vec::new();
    let mut dims: Vec<usize> = Vec::new();
    for s in &sources {
        for w in r.circuit.wires_out_of(&s.id) {
            let d = *r
                .wire_dims
                .get(&w.id)
                .ok_or_else(|| format!("wire {}: no dimension", w.id))?;
            wires.push(w.id.clone());
            dims.push(d);
        }
    }
    let all_pure = sources
        .iter()
        .all(|s| matches!(r.sources.get(&s.id), Some(SourceState::Pure(_))));
    let mut state = if all_pure {
        let mut acc: Option<CVec> = None;
        for s in &sources {
            let SourceState::Pure(v) = &r.sources[&s.id] else {
                unreachable!()
            };
            acc = Some(match acc {
                None => v.clone(),
                Some(a) => kron_vec(&a, v),
            });
        }
        StateRep::Pure(acc.unwrap_or_else(|| CVec::from_element(1, super::linalg::cr(1.0))))
    } else {
        let mut acc: Option<CMat> = None;
        for s in &sources {
            let rho = r
                .sources
                .get(&s.id)
                .ok_or_else(|| format!("{}: no source state", s.id))?
                .to_density();
            acc = Some(match acc {
                None => rho,
                Some(a) => kron(&a, &rho),
            });
        }
        StateRep::Density(acc.unwrap_or_else(|| eye(1)))
    };

    // Apply transformations.
    for t in transformation_topo_order(&r.circuit) {
        let op = r
            .transformations
            .get(&t)
            .ok_or_else(|| format!("{t}: no isometry"))?;
        let in_wires: Vec<String> = r
            .circuit
            .wires_into(&t)
            .iter()
            .map(|w| w.id.clone())
            .collect();
        let positions: Vec<usize> = in_wires
            .iter()
            .map(|wid| {
                wires
                    .iter()
                    .position(|x| x == wid)
                    .ok_or_else(|| format!("{t}: input wire {wid} not live"))
            })
            .collect::<Result<_, _>>()?;
        let din: usize = positions.iter().map(|&p| dims[p]).product();
        if op.ncols() != din {
            return Err(format!(
                "{t}: operator has {} columns, inputs give {din}",
                op.ncols()
            ));
        }
        let perm = front_permutation(dims.len(), &positions);
        state = match state {
            StateRep::Pure(v) => {
                let moved = permute_state_factors(&v, &dims, &perm);
                StateRep::Pure(apply_to_front(&moved, din, op))
            }
            StateRep::Density(m) => {
                let moved = permute_density_factors(&m, &dims, &perm);
                StateRep::Density(apply_to_front_density(&moved, din, op))
            }
        };
        // New live list: out-wires (sorted by id) then the untouched wires
        // in their permuted (original relative) order.
        let mut new_wires: Vec<String> = Vec::new();
        let mut new_dims: Vec<usize> = Vec::new();
        for w in r.circuit.wires_out_of(&t) {
            let d = *r
                .wire_dims
                .get(&w.id)
                .ok_or_else(|| format!("wire {}: no dimension", w.id))?;
            new_wires.push(w.id.clone());
            new_dims.push(d);
        }
        for &old in perm.iter().skip(positions.len()) {
            new_wires.push(wires[old].clone());
            new_dims.push(dims[old]);
        }
        wires = new_wires;
        dims = new_dims;
    }

    Ok(EvolvedState { wires, dims, state })
}

/// Apply one party's outcome projector to a state, leaving the factor
/// layout unchanged.
fn project(state: &StateRep, dims: &[usize], positions: &[usize], p: &CMat) -> StateRep {
    match state {
        StateRep::Pure(v) => StateRep::Pure(apply_on_positions(v, dims, positions, p)),
        StateRep::Density(m) => StateRep::Density(apply_on_positions_density(m, dims, positions, p)),
    }
}

fn weight(state: &StateRep) -> f64 {
    match state {
        StateRep::Pure(v) => v.norm_squared(),
        StateRep::Density(m) => m.trace().re,
    }
}

/// Measurement stage: distribution over outcome tuples of the given
/// parties, each with its projector family and wire positions.
fn measure(
    evolved: &EvolvedState,
    parties: &[(String, Vec<usize>, &[CMat])],
) -> Vec<f64> {
    let total: usize = parties.iter().map(|(_, _, ps)| ps.len()).product();
    let mut probs = vec![0.0; total];
    fn recurse(
        state: &StateRep,
        dims: &[usize],
        parties: &[(String, Vec<usize>, &[CMat])],
        level: usize,
        base: usize,
        probs: &mut [f64],
    ) {
        if level == parties.len() {
            probs[base] = weight(state);
            return;
        }
        let (_, positions, ps) = &parties[level];
        let tail: usize = parties[level + 1..].iter().map(|(_, _, q)| q.len()).product();
        for (k, p) in ps.iter().enumerate() {
            let branch = project(state, dims, positions, p);
            if weight(&branch) < 1e-300 {
                // Zero-weight branch: all leaves below stay zero.
                continue;
            }
            recurse(&branch, dims, parties, level + 1, base + k * tail, probs);
        }
    }
    recurse(&evolved.state, &evolved.dims, parties, 0, 0, &mut probs);
    probs
}

fn party_positions(
    r: &QuantumRealization,
    evolved: &EvolvedState,
    id: &str,
) -> Result<Vec<usize>, String> {
    r.circuit
        .wires_into(id)
        .iter()
        .map(|w| {
            evolved
                .wires
                .iter()
                .position(|x| *x == w.id)
                .ok_or_else(|| format!("{id}: input wire {} not live after evolution", w.id))
        })
        .collect()
}

/// Full outcome distribution of a realization.  Parties are the
/// measurement nodes sorted by id; outcome tuples are indexed row-major in
/// that order.
pub fn simulate(r: &QuantumRealization) -> Result<Behavior, String> {
    let evolved = evolve(r)?;
    let mut parties = Vec::new();
    let mut arities = Vec::new();
    for m in r.circuit.measurements() {
        let ps = r
            .measurements
            .get(&m.id)
            .ok_or_else(|| format!("{}: no measurement", m.id))?;
        arities.push(ps.len() as u32);
        parties.push((m.id.clone(), party_positions(r, &evolved, &m.id)?, ps.as_slice()));
    }
    let probs = measure(&evolved, &parties);
    Behavior::new(arities, probs)
}

/// Distribution for every combination of measurement settings.  The
/// realization's own measurement entries are ignored; `families` supplies,
/// per party, one projector family per setting.  Evolution runs once.
pub fn simulate_settings(
    r: &QuantumRealization,
    families: &BTreeMap<String, Vec<Vec<CMat>>>,
) -> Result<SettingsBehavior, String> {
    let evolved = evolve(r)?;
    let measurements = r.circuit.measurements();
    let mut setting_arities = Vec::new();
    let mut outcome_arities = Vec::new();
    let mut positions = Vec::new();
    for m in &measurements {
        let fam = families
            .get(&m.id)
            .ok_or_else(|| format!("{}: no setting family", m.id))?;
        if fam.is_empty() {
            return Err(format!("{}: empty setting family", m.id));
        }
        let arity = fam[0].len();
        if fam.iter().any(|ps| ps.len() != arity) {
            return Err(format!("{}: settings disagree on outcome count", m.id));
        }
        setting_arities.push(fam.len() as u32);
        outcome_arities.push(arity as u32);
        positions.push(party_positions(r, &evolved, &m.id)?);
    }
    let mut probs = Vec::new();
    for settings in enumerate_mixed_radix(&setting_arities) {
        let parties: Vec<(String, Vec<usize>, &[CMat])> = measurements
            .iter()
            .enumerate()
            .map(|(k, m)| {
                (
                    m.id.clone(),
                    positions[k].clone(),
                    families[&m.id][settings[k] as usize].as_slice(),
                )
            })
            .collect();
        probs.extend(measure(&evolved, &parties));
    }
    SettingsBehavior::new(setting_arities, outcome_arities, probs)
}

/// Independent oracle: explicit global operators on the full tensor space
/// (all live wires in sorted-id order), density evolution throughout.
/// Exponential in memory; intended for total dimension at most a few
/// hundred.
pub fn brute_force_distribution(r: &QuantumRealization) -> Result<Behavior, String> {
    // Global order: sorted wire ids of the current live set.
    let sources: Vec<_> = r
        .circuit
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Source)
        .collect();
    let mut grouped: Vec<String> = Vec::new();
    let mut rho: Option<CMat> = None;
    for s in &sources {
        for w in r.circuit.wires_out_of(&s.id) {
            grouped.push(w.id.clone());
        }
        let d = r.sources[&s.id].to_density();
        rho = Some(match rho {
            None => d,
            Some(a) => kron(&a, &d),
        });
    }
    let mut rho = rho.unwrap_or_else(|| eye(1));
    let mut live: Vec<String> = grouped.clone();
    live.sort();
    let dims_of = |ws: &[String]| -> Vec<usize> {
        ws.iter().map(|w| r.wire_dims[w]).collect()
    };
    // Permute from source-grouped order to sorted order.
    let perm: Vec<usize> = live
        .iter()
        .map(|w| grouped.iter().position(|g| g == w).unwrap())
        .collect();
    rho = permute_density_factors(&rho, &dims_of(&grouped), &perm);

    for t in transformation_topo_order(&r.circuit) {
        let op = &r.transformations[&t];
        let in_wires: Vec<String> = r
            .circuit
            .wires_into(&t)
            .iter()
            .map(|w| w.id.clone())
            .collect();
        let out_wires: Vec<String> = r
            .circuit
            .wires_out_of(&t)
            .iter()
            .map(|w| w.id.clone())
            .collect();
        let dims = dims_of(&live);
        let positions: Vec<usize> = in_wires
            .iter()
            .map(|w| live.iter().position(|x| x == w).unwrap())
            .collect();
        let to_front = permutation_matrix(&dims, &front_permutation(dims.len(), &positions));
        let rest_dim: usize = dims.iter().product::<usize>()
            / positions.iter().map(|&p| dims[p]).product::<usize>();
        let big = kron(op, &eye(rest_dim));
        // After the operator, factors are out-wires then the rest; permute
        // to the new sorted order.
        let mut rest: Vec<String> = front_permutation(dims.len(), &positions)
            .into_iter()
            .skip(positions.len())
            .map(|k| live[k].clone())
            .collect();
        let mut after: Vec<String> = out_wires.clone();
        after.append(&mut rest);
        let mut new_live = after.clone();
        new_live.sort();
        let perm_after: Vec<usize> = new_live
            .iter()
            .map(|w| after.iter().position(|a| a == w).unwrap())
            .collect();
        let to_sorted = permutation_matrix(&dims_of(&after), &perm_after);
        let u = &to_sorted * big * to_front;
        rho = &u * rho * u.adjoint();
        live = new_live;
    }

    // Joint projectors per outcome tuple.
    let measurements = r.circuit.measurements();
    let dims = dims_of(&live);
    let n: usize = dims.iter().product();
    let mut arities = Vec::new();
    let mut embedded: Vec<Vec<CMat>> = Vec::new();
    for m in &measurements {
        let ps = &r.measurements[&m.id];
        arities.push(ps.len() as u32);
        let positions: Vec<usize> = r
            .circuit
            .wires_into(&m.id)
            .iter()
            .map(|w| live.iter().position(|x| *x == w.id).unwrap())
            .collect();
        let perm = front_permutation(dims.len(), &positions);
        let pm = permutation_matrix(&dims, &perm);
        let mine: usize = positions.iter().map(|&p| dims[p]).product();
        let emb = ps
            .iter()
            .map(|p| pm.adjoint() * kron(p, &eye(n / mine)) * &pm)
            .collect();
        embedded.push(emb);
    }
    let mut probs = Vec::new();
    for outcome in enumerate_mixed_radix(&arities) {
        let mut joint = eye(n);
        for (k, &o) in outcome.iter().enumerate() {
            joint = joint * &embedded[k][o as usize];
        }
        probs.push((&joint * &rho).trace().re);
    }
    Behavior::new(arities, probs)
}
