//! Cross-module pipelines: fixtures through simulators to reports,
//! oracle agreement, canonicalization, bounds, and the inflated-wiring
//! chain argument, each at moderate size (the full-size runs live in the
//! CLI crate's acceptance suite).

use coordcert_core::bound::{coordination_bound, BoundOptions};
use coordcert_core::circuit::fig1_circuit;
use coordcert_core::exec::ExecMode;
use coordcert_core::ineq::{
    eval_ineq1, eval_ineq2, ghz_settings_behavior, shared_random_bit, CHSHVariant,
};
use coordcert_core::inflation::{
    random_fig2_realization, sos_chain_check, zero_residual_fig2_realization,
};
use coordcert_core::quantum::{
    brute_force_distribution, random_small_realization, rng_from_seed, simulate, Behavior,
    SettingsBehavior,
};

#[test]
fn staged_matches_brute_force_on_random_small_circuits() {
    let mut rng = rng_from_seed(19);
    for k in 0..12 {
        let r = random_small_realization(&mut rng, 64);
        let staged = simulate(&r).unwrap();
        let brute = brute_force_distribution(&r).unwrap();
        assert_eq!(staged.arities(), brute.arities(), "instance {k}");
        for (a, b) in staged.probs().iter().zip(brute.probs()) {
            assert!((a - b).abs() < 1e-10, "instance {k}: {a} vs {b}");
        }
    }
}

#[test]
fn chain_fixture_report_and_byte_stable_round_trip() {
    let b = shared_random_bit();
    let report = eval_ineq1(&b).unwrap();
    assert_eq!(report.lhs, 3.0);
    assert_eq!(report.rhs, 1.5 * 3.0_f64.sqrt());
    assert!(report.violated);
    assert!((report.violation - (3.0 - 1.5 * 3.0_f64.sqrt())).abs() < 1e-15);

    let text = b.to_json();
    let back = Behavior::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text, "behavior file round-trips byte-identically");
}

#[test]
fn ghz_fixture_through_settings_simulator_reaches_24() {
    let sb = ghz_settings_behavior(1.0).unwrap();
    let report = eval_ineq2(
        &sb,
        &CHSHVariant::default_minus_branch(),
        &CHSHVariant::default_plus_branch(),
    )
    .unwrap();
    assert!((report.lhs - 24.0).abs() < 1e-6, "lhs {}", report.lhs);
    assert!(report.violated);

    let text = sb.to_json();
    let back = SettingsBehavior::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
}

#[test]
fn fig1_is_its_own_canonical_form_and_self_embeds() {
    let c = fig1_circuit();
    let canon = c.canonicalize().unwrap();
    assert_eq!(canon, c);
    let emb = c.embed_into_canonical().unwrap();
    for (wire, path) in &emb.wire_paths {
        assert!(!path.is_empty(), "wire {wire} has an empty path");
    }
}

#[test]
fn coarse_level_one_bound_matches_the_chain_constant() {
    let o = BoundOptions {
        level: 1,
        grid_step: 0.25,
        refine: false,
        mode: ExecMode::Sequential,
        ..BoundOptions::default()
    };
    let report = coordination_bound(&o).unwrap();
    assert!(
        (report.bound - 1.5 * 3.0_f64.sqrt()).abs() < 1e-3,
        "bound {}",
        report.bound
    );
    assert!(report.witness_certified);
}

#[test]
fn inflated_chain_bound_holds_on_random_and_crafted_instances() {
    let mut rng = rng_from_seed(23);
    for _ in 0..10 {
        let r = random_fig2_realization(&mut rng, 2);
        let sys = r.wired_system().unwrap();
        let phi = r.global_state().unwrap();
        let report = sos_chain_check(&sys, &phi, 1e-9).unwrap();
        assert!(report.triangle_holds, "{report:?}");
    }
    let r = zero_residual_fig2_realization(2, true);
    let sys = r.wired_system().unwrap();
    let phi = r.global_state().unwrap();
    let report = sos_chain_check(&sys, &phi, 1e-9).unwrap();
    assert!(report.max_link_residual() < 1e-10);
    assert!(report.zero_residual_identity_defect() < 1e-8);
}
