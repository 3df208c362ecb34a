//! Quantum realizations of causal circuits and their simulation.

pub mod behavior;
pub mod heisenberg;
pub mod linalg;
pub mod random;
pub mod realization;
pub mod simulate;
pub mod states;

pub use behavior::{enumerate_mixed_radix, Behavior, SettingsBehavior};
pub use heisenberg::{
    fig1_wired_system, EmbeddedProjector, SystemParty, SystemTransformation, WiredSystem,
};
pub use linalg::{
    ci, cr, is_density, is_hermitian, is_isometry, is_projector, is_unitary, max_abs_diff,
    min_eigenvalue_hermitian, projector_onto, CMat, CVec, C, MATRIX_TOL,
};
pub use random::{
    random_fig1_realization, random_projective_measurement, random_pure_state,
    random_small_realization, random_unitary, rng_from_seed,
};
pub use realization::{
    realization_from_json, realization_to_json, QuantumRealization, SourceState,
};
pub use simulate::{
    brute_force_distribution, evolve, simulate, simulate_settings, transformation_topo_order,
    EvolvedState, StateRep,
};
pub use states::{
    basis_state, bell_phi_minus, bell_phi_plus, ghz, ghz4, kron_all_vec, noisy_ghz4, obs_xz,
    pauli_x, pauli_y, pauli_z, projectors_xz,
};
