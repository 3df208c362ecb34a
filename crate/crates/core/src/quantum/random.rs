//! Seeded random quantum objects: Haar unitaries, pure states, projective
//! measurements, and full random realizations of the four-party wiring.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{CMat, CVec, C};
use super::realization::{QuantumRealization, SourceState};
use crate::circuit::{fig1_circuit, party_pairs, NodeKind, PARTIES};

/// The project-wide seeded generator.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian(rng: &mut impl Rng) -> C {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(re, im)
}

/// Ginibre matrix: iid complex gaussian entries.
pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unitary via QR of a Ginibre matrix with the usual phase
/// correction (columns scaled so R's diagonal is positive).
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    let g = ginibre(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / C::new(d.norm(), 0.0)
        } else {
            C::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random pure state.
pub fn random_pure_state(rng: &mut impl Rng, n: usize) -> CVec {
    let mut v = CVec::from_fn(n, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v /= C::new(norm, 0.0);
    v
}

/// Random rank-split projective measurement: conjugates a fixed partition
/// of the computational basis by a Haar unitary.  Ranks split `n` as
/// evenly as possible across `arity` outcomes.
pub fn random_projective_measurement(rng: &mut impl Rng, n: usize, arity: usize) -> Vec<CMat> {
    assert!(arity >= 1 && n >= arity, "need at least one dimension per outcome");
    let u = random_unitary(rng, n);
    let base = n / arity;
    let extra = n % arity;
    let mut out = Vec::with_capacity(arity);
    let mut col = 0usize;
    for k in 0..arity {
        let rank = base + usize::from(k < extra);
        let block = u.columns(col, rank);
        out.push(&block * block.adjoint());
        col += rank;
    }
    out
}

/// A random realization of the four-party wiring.  Source wire dimensions
/// are drawn uniformly from `2..=max_dim`; transformations are Haar
/// unitaries carrying both input dimensions through to the two output
/// wires; measurements are random binary projective measurements.
pub fn random_fig1_realization(rng: &mut impl Rng, max_dim: usize) -> QuantumRealization {
    assert!(max_dim >= 2);
    let circuit = fig1_circuit();
    let mut wire_dims: BTreeMap<String, usize> = BTreeMap::new();
    // Source wires first: triple -> pair.
    for n in circuit.nodes() {
        if n.kind == NodeKind::Source {
            for w in circuit.wires_out_of(&n.id) {
                let d = rng.random_range(2..=max_dim);
                wire_dims.insert(w.id.clone(), d);
            }
        }
    }
    // Transformation outputs inherit the input dimensions: the wire to the
    // alphabetically first party gets the first input dimension.
    for pair in party_pairs(&PARTIES) {
        let ins = circuit.wires_into(&pair);
        let outs = circuit.wires_out_of(&pair);
        for (win, wout) in ins.iter().zip(outs.iter()) {
            let d = wire_dims[&win.id];
            wire_dims.insert(wout.id.clone(), d);
        }
    }
    let mut sources = BTreeMap::new();
    for n in circuit.nodes() {
        if n.kind == NodeKind::Source {
            let dim: usize = circuit
                .wires_out_of(&n.id)
                .iter()
                .map(|w| wire_dims[&w.id])
                .product();
            sources.insert(n.id.clone(), SourceState::Pure(random_pure_state(rng, dim)));
        }
    }
    let mut transformations = BTreeMap::new();
    for pair in party_pairs(&PARTIES) {
        let din: usize = circuit
            .wires_into(&pair)
            .iter()
            .map(|w| wire_dims[&w.id])
            .product();
        transformations.insert(pair.clone(), random_unitary(rng, din));
    }
    let mut measurements = BTreeMap::new();
    for p in PARTIES {
        let din: usize = circuit
            .wires_into(p)
            .iter()
            .map(|w| wire_dims[&w.id])
            .product();
        measurements.insert(p.to_string(), random_projective_measurement(rng, din, 2));
    }
    QuantumRealization {
        circuit,
        wire_dims,
        sources,
        transformations,
        measurements,
    }
}

/// A random layered circuit realization with global dimension at most
/// `max_total_dim` (≥ 4): one to three sources emitting wires of
/// dimension 2 or 3, an optional layer of unitary transformations on
/// disjoint wire groups, and two to four projective measurements
/// covering every remaining wire.  Sources are pure states or Ginibre
/// density matrices; measurement arities are 2 or 3.  Exercises the
/// staged simulator's permutation bookkeeping on irregular shapes.
pub fn random_small_realization(rng: &mut impl Rng, max_total_dim: usize) -> QuantumRealization {
    use crate::circuit::{CausalCircuit, Node, Wire};
    use rand::seq::SliceRandom;
    assert!(max_total_dim >= 4);

    // Wire dimensions, at least two wires, product capped by the budget.
    let mut dims = vec![2usize, 2];
    let mut total = 4usize;
    for _ in 0..rng.random_range(0..=4u32) {
        let d = if rng.random_bool(0.7) { 2 } else { 3 };
        if total * d > max_total_dim {
            break;
        }
        dims.push(d);
        total *= d;
    }
    let n = dims.len();

    // Assign wires to sources; the first wires pin every source nonempty.
    let n_src = rng.random_range(1..=3.min(n));
    let mut owner = vec![0usize; n];
    for (i, o) in owner.iter_mut().enumerate() {
        *o = if i < n_src {
            i
        } else {
            rng.random_range(0..n_src)
        };
    }

    // Group wires for an optional transformation layer.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    struct FinalSlot {
        producer: String,
        dim: usize,
    }
    let mut groups: Vec<(Vec<usize>, bool)> = Vec::new();
    let mut at = 0;
    while at < n {
        let size = if at + 1 < n && rng.random_bool(0.5) { 2 } else { 1 };
        let members: Vec<usize> = order[at..at + size].to_vec();
        at += size;
        groups.push((members, rng.random_bool(0.5)));
    }

    let mut wires: Vec<Wire> = Vec::new();
    let mut wire_dims: BTreeMap<String, usize> = BTreeMap::new();
    let mut pair_seq: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut add_wire = |wires: &mut Vec<Wire>,
                        wire_dims: &mut BTreeMap<String, usize>,
                        from: &str,
                        to: &str,
                        dim: usize| {
        let seq = pair_seq
            .entry((from.to_string(), to.to_string()))
            .or_insert(0);
        let id = format!("{from}->{to}.{seq}");
        *seq += 1;
        wires.push(Wire::new(id.clone(), from, to));
        wire_dims.insert(id, dim);
    };

    // Transformation nodes and the list of slots measurements will read.
    let mut final_slots: Vec<FinalSlot> = Vec::new();
    let mut trans_group: Vec<(String, Vec<usize>)> = Vec::new();
    let mut n_trans = 0usize;
    for (members, transformed) in &groups {
        if *transformed {
            n_trans += 1;
            let t = format!("T{n_trans}");
            for &w in members {
                final_slots.push(FinalSlot {
                    producer: t.clone(),
                    dim: dims[w],
                });
            }
            trans_group.push((t, members.clone()));
        } else {
            for &w in members {
                final_slots.push(FinalSlot {
                    producer: format!("S{}", owner[w] + 1),
                    dim: dims[w],
                });
            }
        }
    }

    // Every measurement gets one slot up front, the rest land uniformly.
    final_slots.shuffle(rng);
    let n_meas = rng.random_range(2..=4.min(final_slots.len()));
    let mut meas_of_slot = vec![0usize; final_slots.len()];
    for (j, m) in meas_of_slot.iter_mut().enumerate() {
        *m = if j < n_meas {
            j
        } else {
            rng.random_range(0..n_meas)
        };
    }

    // Materialise wires: source -> transformation, then producer -> measurement.
    for (t, members) in &trans_group {
        for &w in members {
            add_wire(
                &mut wires,
                &mut wire_dims,
                &format!("S{}", owner[w] + 1),
                t,
                dims[w],
            );
        }
    }
    for (slot, &m) in final_slots.iter().zip(&meas_of_slot) {
        add_wire(
            &mut wires,
            &mut wire_dims,
            &slot.producer,
            &format!("M{}", m + 1),
            slot.dim,
        );
    }

    let mut meas_din = vec![1usize; n_meas];
    for (slot, &m) in final_slots.iter().zip(&meas_of_slot) {
        meas_din[m] *= slot.dim;
    }
    let meas_arity: Vec<usize> = meas_din
        .iter()
        .map(|&din| rng.random_range(2..=3.min(din)))
        .collect();

    let mut nodes: Vec<Node> = (1..=n_src)
        .map(|k| Node::new(format!("S{k}"), NodeKind::Source))
        .collect();
    for k in 1..=n_trans {
        nodes.push(Node::new(format!("T{k}"), NodeKind::Transformation));
    }
    for k in 1..=n_meas {
        nodes.push(Node::with_arity(
            format!("M{k}"),
            NodeKind::Measurement,
            meas_arity[k - 1] as u32,
        ));
    }
    let circuit = CausalCircuit::new(nodes, wires);

    let mut sources = BTreeMap::new();
    for k in 1..=n_src {
        let id = format!("S{k}");
        let dim: usize = circuit
            .wires_out_of(&id)
            .iter()
            .map(|w| wire_dims[&w.id])
            .product();
        let state = if rng.random_bool(0.6) {
            SourceState::Pure(random_pure_state(rng, dim))
        } else {
            let g = ginibre(rng, dim, dim);
            let rho = &g * g.adjoint();
            let tr = rho.trace();
            SourceState::Density(rho / tr)
        };
        sources.insert(id, state);
    }
    let mut transformations = BTreeMap::new();
    for k in 1..=n_trans {
        let id = format!("T{k}");
        let din: usize = circuit
            .wires_into(&id)
            .iter()
            .map(|w| wire_dims[&w.id])
            .product();
        transformations.insert(id, random_unitary(rng, din));
    }
    let mut measurements = BTreeMap::new();
    for k in 1..=n_meas {
        let id = format!("M{k}");
        let din: usize = circuit
            .wires_into(&id)
            .iter()
            .map(|w| wire_dims[&w.id])
            .product();
        measurements.insert(
            id,
            random_projective_measurement(rng, din, meas_arity[k - 1]),
        );
    }
    QuantumRealization {
        circuit,
        wire_dims,
        sources,
        transformations,
        measurements,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{eye, is_projector, is_unitary, max_abs_diff, MATRIX_TOL};

    #[test]
    fn random_unitary_is_unitary_and_seeded() {
        let mut rng = rng_from_seed(7);
        let u = random_unitary(&mut rng, 6);
        assert!(is_unitary(&u, MATRIX_TOL));
        let mut rng2 = rng_from_seed(7);
        let u2 = random_unitary(&mut rng2, 6);
        assert!(max_abs_diff(&u, &u2) == 0.0, "same seed, same unitary");
        let mut rng3 = rng_from_seed(8);
        let u3 = random_unitary(&mut rng3, 6);
        assert!(max_abs_diff(&u, &u3) > 1e-3, "different seed differs");
    }

    #[test]
    fn random_measurement_resolves_identity() {
        let mut rng = rng_from_seed(1);
        for (n, arity) in [(4, 2), (5, 3), (2, 2)] {
            let ps = random_projective_measurement(&mut rng, n, arity);
            assert_eq!(ps.len(), arity);
            let mut sum = CMat::zeros(n, n);
            for p in &ps {
                assert!(is_projector(p, MATRIX_TOL));
                sum += p;
            }
            assert!(max_abs_diff(&sum, &eye(n)) < 1e-12);
        }
    }

    #[test]
    fn random_realization_is_valid() {
        let mut rng = rng_from_seed(42);
        let r = random_fig1_realization(&mut rng, 2);
        assert_eq!(r.validate(), Ok(()));
        let r3 = random_fig1_realization(&mut rng, 3);
        assert_eq!(r3.validate(), Ok(()));
    }

    #[test]
    fn random_small_realizations_are_valid_and_varied() {
        let mut rng = rng_from_seed(9);
        let mut seen_trans = false;
        let mut seen_density = false;
        let mut seen_dim3 = false;
        for _ in 0..20 {
            let r = random_small_realization(&mut rng, 64);
            assert_eq!(r.validate(), Ok(()));
            let total: usize = r
                .sources
                .values()
                .map(super::SourceState::dim)
                .product();
            assert!(total <= 64, "global dimension {total}");
            seen_trans |= !r.transformations.is_empty();
            seen_density |= r
                .sources
                .values()
                .any(|s| matches!(s, SourceState::Density(_)));
            seen_dim3 |= r.wire_dims.values().any(|&d| d == 3);
        }
        assert!(seen_trans && seen_density && seen_dim3);
    }
}
