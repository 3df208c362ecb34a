//! Heisenberg-picture measurement projectors on wired systems.
//!
//! A [`WiredSystem`] is a flat description of sources feeding bipartite
//! transformations feeding party measurements: the global Hilbert space is
//! the tensor product of source *slots* (one factor per emitted system),
//! each transformation is a square unitary on its two input slots (its
//! outputs re-occupy the same slots, first share on the first slot), and
//! each party measures the product of its shares.
//!
//! The Heisenberg projector of party X conjugates X's outcome projector by
//! the unitaries of the transformations feeding X, embedded in the global
//! space.  Parties whose feeding transformations touch disjoint slot sets
//! commute exactly; parties sharing a slot generally do not.

use super::linalg::{apply_on_positions, CMat, CVec};

/// One transformation of a wired system.
#[derive(Debug, Clone)]
pub struct SystemTransformation {
    pub id: String,
    /// Global slot indices consumed (operator input order).  Outputs
    /// re-occupy the same slots: share `k` lives on `in_slots[k]`.
    pub in_slots: Vec<usize>,
    /// Square unitary on the product of the slot dimensions.
    pub unitary: CMat,
}

/// One measuring party.
#[derive(Debug, Clone)]
pub struct SystemParty {
    pub id: String,
    /// `(transformation index, share position)` pairs, in the tensor order
    /// of the party's measurement space.
    pub shares: Vec<(usize, usize)>,
    /// Projective outcome family on the product of the share dimensions.
    pub projectors: Vec<CMat>,
}

/// Sources, transformations, and parties over a fixed slot list.
#[derive(Debug, Clone)]
pub struct WiredSystem {
    pub slot_ids: Vec<String>,
    pub slot_dims: Vec<usize>,
    pub transformations: Vec<SystemTransformation>,
    pub parties: Vec<SystemParty>,
}

impl WiredSystem {
    pub fn global_dim(&self) -> usize {
        self.slot_dims.iter().product()
    }

    /// Check dimensions and slot bookkeeping; returns the first problem.
    pub fn validate(&self) -> Result<(), String> {
        use super::linalg::{eye, is_projector, is_unitary, max_abs_diff, MATRIX_TOL};
        if self.slot_ids.len() != self.slot_dims.len() {
            return Err("slot id and dimension lists differ in length".into());
        }
        for t in &self.transformations {
            let mut seen = std::collections::BTreeSet::new();
            for &s in &t.in_slots {
                if s >= self.slot_dims.len() {
                    return Err(format!("{}: slot index {s} out of range", t.id));
                }
                if !seen.insert(s) {
                    return Err(format!("{}: repeated slot index {s}", t.id));
                }
            }
            let d: usize = t.in_slots.iter().map(|&s| self.slot_dims[s]).product();
            if t.unitary.nrows() != d || !is_unitary(&t.unitary, MATRIX_TOL) {
                return Err(format!("{}: not a unitary on dimension {d}", t.id));
            }
        }
        for p in &self.parties {
            let mut d = 1usize;
            for &(ti, pos) in &p.shares {
                let t = self
                    .transformations
                    .get(ti)
                    .ok_or_else(|| format!("{}: share references transformation {ti}", p.id))?;
                let slot = *t
                    .in_slots
                    .get(pos)
                    .ok_or_else(|| format!("{}: share position {pos} out of range", p.id))?;
                d *= self.slot_dims[slot];
            }
            let mut sum = CMat::zeros(d, d);
            for (k, pr) in p.projectors.iter().enumerate() {
                if pr.nrows() != d || !is_projector(pr, MATRIX_TOL) {
                    return Err(format!("{}: outcome {k} is not a projector on {d}", p.id));
                }
                sum += pr;
            }
            if max_abs_diff(&sum, &eye(d)) > MATRIX_TOL {
                return Err(format!("{}: projectors do not sum to identity", p.id));
            }
        }
        Ok(())
    }

    /// Global slot positions of a party's shares, in share order.
    pub fn party_slots(&self, party_index: usize) -> Vec<usize> {
        self.parties[party_index]
            .shares
            .iter()
            .map(|&(ti, pos)| self.transformations[ti].in_slots[pos])
            .collect()
    }

    /// Indices of the transformations feeding a party, sorted.
    fn feeding_transformations(&self, party_index: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.parties[party_index]
            .shares
            .iter()
            .map(|&(ti, _)| ti)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The Heisenberg projector of `party_index` for `outcome`.
    pub fn heisenberg_projector(&self, party_index: usize, outcome: usize) -> EmbeddedProjector {
        let wraps: Vec<(Vec<usize>, CMat)> = self
            .feeding_transformations(party_index)
            .into_iter()
            .map(|ti| {
                let t = &self.transformations[ti];
                (t.in_slots.clone(), t.unitary.clone())
            })
            .collect();
        EmbeddedProjector {
            global_dims: self.slot_dims.clone(),
            wraps,
            proj_positions: self.party_slots(party_index),
            projector: self.parties[party_index].projectors[outcome].clone(),
        }
    }
}

/// A projector conjugated by embedded unitaries, applied lazily: the full
/// matrix is only materialised on request.
#[derive(Debug, Clone)]
pub struct EmbeddedProjector {
    global_dims: Vec<usize>,
    wraps: Vec<(Vec<usize>, CMat)>,
    proj_positions: Vec<usize>,
    projector: CMat,
}

impl EmbeddedProjector {
    pub fn global_dim(&self) -> usize {
        self.global_dims.iter().product()
    }

    /// Apply to a global state vector.
    pub fn apply(&self, v: &CVec) -> CVec {
        let mut x = v.clone();
        for (slots, u) in &self.wraps {
            x = apply_on_positions(&x, &self.global_dims, slots, u);
        }
        x = apply_on_positions(&x, &self.global_dims, &self.proj_positions, &self.projector);
        for (slots, u) in self.wraps.iter().rev() {
            let udag = u.adjoint();
            x = apply_on_positions(&x, &self.global_dims, slots, &udag);
        }
        x
    }

    /// Materialise the full matrix (exponential in slots; small systems
    /// only).
    pub fn to_matrix(&self) -> CMat {
        let n = self.global_dim();
        let mut m = CMat::zeros(n, n);
        for j in 0..n {
            let mut e = CVec::zeros(n);
            e[j] = super::linalg::cr(1.0);
            let col = self.apply(&e);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }
}

/// Wired-system view of the four-party circuit: one slot per source wire
/// (ids `TRIPLE:PAIR`), all of dimension `slot_dim`; transformation `XY`
/// consumes the two slots offered by the triples containing `{X,Y}`
/// (sorted by source), hands its first output share to `X` and its second
/// to `Y`; party projector families are supplied per party in A,B,C,D
/// order on the product of their three shares (transformations sorted by
/// id).
pub fn fig1_wired_system(
    slot_dim: usize,
    unitaries: &std::collections::BTreeMap<String, CMat>,
    projectors: &std::collections::BTreeMap<String, Vec<CMat>>,
) -> WiredSystem {
    use crate::circuit::{party_pairs, party_triples, PARTIES};
    let mut slot_ids = Vec::new();
    for triple in party_triples(&PARTIES) {
        let members: Vec<&str> = triple.split("").filter(|s| !s.is_empty()).collect();
        for pair in party_pairs(&members) {
            slot_ids.push(format!("{triple}:{pair}"));
        }
    }
    let slot_dims = vec![slot_dim; slot_ids.len()];
    let slot_index = |id: &str| slot_ids.iter().position(|s| s == id).unwrap();
    let mut transformations = Vec::new();
    for pair in party_pairs(&PARTIES) {
        let feeders: Vec<String> = party_triples(&PARTIES)
            .into_iter()
            .filter(|t| pair.chars().all(|c| t.contains(c)))
            .collect();
        let in_slots: Vec<usize> = feeders
            .iter()
            .map(|t| slot_index(&format!("{t}:{pair}")))
            .collect();
        transformations.push(SystemTransformation {
            id: pair.clone(),
            in_slots,
            unitary: unitaries[&pair].clone(),
        });
    }
    let mut parties = Vec::new();
    for p in PARTIES {
        let mut shares = Vec::new();
        for (ti, t) in transformations.iter().enumerate() {
            if let Some(pos) = t.id.chars().position(|c| c.to_string() == p) {
                shares.push((ti, pos));
            }
        }
        parties.push(SystemParty {
            id: p.to_string(),
            shares,
            projectors: projectors[p].clone(),
        });
    }
    WiredSystem {
        slot_ids,
        slot_dims,
        transformations,
        parties,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::max_abs_diff;
    use crate::quantum::random::{
        random_projective_measurement, random_pure_state, random_unitary, rng_from_seed,
    };
    use std::collections::BTreeMap;

    fn random_fig1_system(seed: u64) -> WiredSystem {
        let mut rng = rng_from_seed(seed);
        let pairs = crate::circuit::party_pairs(&crate::circuit::PARTIES);
        let unitaries: BTreeMap<String, CMat> = pairs
            .iter()
            .map(|p| (p.clone(), random_unitary(&mut rng, 4)))
            .collect();
        let projectors: BTreeMap<String, Vec<CMat>> = crate::circuit::PARTIES
            .iter()
            .map(|p| {
                (
                    p.to_string(),
                    random_projective_measurement(&mut rng, 8, 2),
                )
            })
            .collect();
        fig1_wired_system(2, &unitaries, &projectors)
    }

    #[test]
    fn fig1_system_validates() {
        let sys = random_fig1_system(3);
        assert_eq!(sys.validate(), Ok(()));
        assert_eq!(sys.global_dim(), 4096);
    }

    #[test]
    fn heisenberg_projectors_are_idempotent_and_commute() {
        let sys = random_fig1_system(5);
        let mut rng = rng_from_seed(11);
        let v = random_pure_state(&mut rng, sys.global_dim());
        let projs: Vec<EmbeddedProjector> = (0..4)
            .map(|p| sys.heisenberg_projector(p, 0))
            .collect();
        for p in &projs {
            let pv = p.apply(&v);
            let ppv = p.apply(&pv);
            assert!((&pv - &ppv).norm() < 1e-10, "idempotence");
        }
        // Every pair of parties has disjoint upstream slots here, so all
        // Heisenberg projectors commute on random vectors.
        for i in 0..4 {
            for j in (i + 1)..4 {
                let ij = projs[i].apply(&projs[j].apply(&v));
                let ji = projs[j].apply(&projs[i].apply(&v));
                assert!(
                    (&ij - &ji).norm() < 1e-10,
                    "parties {i} and {j} should commute"
                );
            }
        }
    }

    #[test]
    fn to_matrix_matches_apply_on_a_small_system() {
        let mut rng = rng_from_seed(9);
        let u = random_unitary(&mut rng, 4);
        let ps = random_projective_measurement(&mut rng, 2, 2);
        let sys = WiredSystem {
            slot_ids: vec!["s0".into(), "s1".into()],
            slot_dims: vec![2, 2],
            transformations: vec![SystemTransformation {
                id: "t".into(),
                in_slots: vec![0, 1],
                unitary: u,
            }],
            parties: vec![SystemParty {
                id: "X".into(),
                shares: vec![(0, 0)],
                projectors: ps,
            }],
        };
        assert_eq!(sys.validate(), Ok(()));
        let p = sys.heisenberg_projector(0, 1);
        let m = p.to_matrix();
        assert!(crate::quantum::linalg::is_projector(&m, 1e-10));
        let v = random_pure_state(&mut rng, 4);
        let direct = p.apply(&v);
        let via_matrix = &m * &v;
        assert!(max_abs_diff(
            &CMat::from_column_slice(4, 1, direct.as_slice()),
            &CMat::from_column_slice(4, 1, via_matrix.as_slice())
        ) < 1e-12);
    }
}
