//! Standard states, Pauli observables, and qubit measurement projectors.

use super::linalg::{cr, eye, kron_vec, projector_onto, CMat, CVec, C};

/// Computational basis state |k> in dimension n.
pub fn basis_state(n: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[k] = cr(1.0);
    v
}

/// |0...0> + |1...1> over `parties` qubits, normalised.
pub fn ghz(parties: usize) -> CVec {
    let n = 1usize << parties;
    let mut v = CVec::zeros(n);
    let a = cr(1.0 / 2.0_f64.sqrt());
    v[0] = a;
    v[n - 1] = a;
    v
}

/// Four-qubit GHZ state.
pub fn ghz4() -> CVec {
    ghz(4)
}

/// Visibility-v mixture of the four-qubit GHZ state with white noise:
/// `v |GHZ><GHZ| + (1-v) I/16`.
pub fn noisy_ghz4(v: f64) -> CMat {
    let g = projector_onto(&ghz4());
    g * cr(v) + eye(16) * cr((1.0 - v) / 16.0)
}

/// Bell states on two qubits.
pub fn bell_phi_plus() -> CVec {
    let mut v = CVec::zeros(4);
    v[0] = cr(1.0 / 2.0_f64.sqrt());
    v[3] = cr(1.0 / 2.0_f64.sqrt());
    v
}

pub fn bell_phi_minus() -> CVec {
    let mut v = CVec::zeros(4);
    v[0] = cr(1.0 / 2.0_f64.sqrt());
    v[3] = cr(-1.0 / 2.0_f64.sqrt());
    v
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[cr(0.0), C::new(0.0, -1.0), C::new(0.0, 1.0), cr(0.0)],
    )
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
}

/// Observable `cos(theta) Z + sin(theta) X` (the x-z great circle of the
/// Bloch sphere).  `theta = 0` is Z and `theta = pi/2` is X.
pub fn obs_xz(theta: f64) -> CMat {
    pauli_z() * cr(theta.cos()) + pauli_x() * cr(theta.sin())
}

/// Projectors of [`obs_xz`]: outcome 0 is the +1 eigenspace, outcome 1 the
/// -1 eigenspace.
pub fn projectors_xz(theta: f64) -> Vec<CMat> {
    let o = obs_xz(theta);
    let plus = (eye(2) + o.clone()) * cr(0.5);
    let minus = (eye(2) - o) * cr(0.5);
    vec![plus, minus]
}

/// Tensor product of a list of state vectors.
pub fn kron_all_vec(parts: &[CVec]) -> CVec {
    let mut it = parts.iter();
    let first = it.next().expect("at least one factor").clone();
    it.fold(first, |acc, p| kron_vec(&acc, p))
}
