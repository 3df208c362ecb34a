//! Inequality evaluation and variational search.
//!
//! Two device-independent tests over four-party behaviors live here: the
//! chain expression ⟨AB⟩+⟨BC⟩+⟨CD⟩ ≤ ⟨A⟩⟨D⟩/2 + 3√3/2 ([`ineq1`]) and the
//! branch-conditioned quadratic CHSH²₋ + CHSH²₊ + 8(3Σ−8)² ≤ 16 ([`ineq2`]),
//! together with the machinery they need: CHSH facets and conditioning
//! ([`chsh`]), a deterministic multi-start coordinate-ascent optimizer
//! ([`optimize`]), the noise-threshold scan for the quadratic test
//! ([`threshold`]), and the variational search for maximally coordinated
//! circuit behaviors ([`search`]).

pub mod chsh;
pub mod ineq1;
pub mod ineq2;
pub mod optimize;
pub mod search;
pub mod threshold;

pub use chsh::{
    branch_probabilities, chsh_tsirelson_calibration, classical_chsh_maximum, conditioned_chsh,
    CHSHVariant, ZERO_BRANCH_TOL,
};
pub use ineq1::{eval_ineq1, shared_random_bit, Ineq1Report, CHAIN_QUANTUM_BOUND};
pub use ineq2::{
    assemble_ineq2_report, eval_ineq2, ghz_setting_families, ghz_settings_behavior,
    ghz_star_realization, Ineq2Report, INEQ2_BOUND, PRECONDITION_TOL,
};
pub use optimize::{
    central_difference, coordinate_ascent, multi_start_ascent, AscentOptions, AscentOutcome,
    MultiStartOptions,
};
pub use search::{
    cayley_unitary, hermitian_from_params, max_coordination_search, random_realization_suite,
    Fig1Evaluator, SearchOptions, SearchReport, SuiteOutcome,
};
pub use threshold::{
    bloch_observable, closed_form_lhs, equatorial_observable, ghz_ineq2_report, ghz_product_mean,
    ideal_visibility_threshold, observable_projectors, optimize_lhs_at, visibility_threshold,
    GhzSettings, ThresholdOptions, ThresholdReport, VPoint,
};
