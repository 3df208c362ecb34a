//! The inflated wiring and the machinery built on it: the trace-monoid
//! word algebra of its measurement projectors, the moment-matrix
//! relaxation bounding chain expressions, and the sum-of-squares chain
//! decomposition behind the coordination obstruction.

pub mod moment;
pub mod sos;
pub mod wiring;
pub mod word;

pub use moment::{
    build_moment_problem, build_real_moment_problem, chain_witness, index_words,
    moment_matrix_point, perfect_coordination_problem, word_moment, MomentOptions,
    MomentProblem,
};
pub use sos::{sos_chain_check, SosReport};
pub use wiring::{
    fig2_inflation, inflation_realization_from_json, inflation_realization_to_json,
    inflation_slots, measurement_inputs, party_share_of, random_fig2_realization,
    transformation_in_slots, transformation_parties, valid_subcircuits,
    zero_residual_fig2_realization, InflationRealization,
    SubcircuitSelection, INFLATION_PARTIES, INFLATION_SOURCES, INFLATION_TRANSFORMATIONS,
};
pub use word::{
    canonical_reversed, canonical_word, parties_commute, party_name, word_from_string,
    word_key, word_to_string, Canonical, Letter, Party,
};
