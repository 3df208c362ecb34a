//! The squared-CHSH inequality
//! CHSH₋² + CHSH₊² + 8(3Σ − 8)² ≤ 16 on four-party settings behaviors
//! with setting arities (2, 3, 2, 2), where the two CHSH values are
//! conditioned on C¹·D¹ = ∓1 and Σ = ⟨A⁰B²⟩ + ⟨B²C⁰⟩ + ⟨C⁰D⁰⟩.
//!
//! The inequality applies only when the two conditioning branches are
//! equiprobable; the report carries that precondition explicitly and
//! never claims a violation without it.
//!
//! The four-qubit GHZ state with all-σ_z chain settings and the facet
//! angles on A/B reaches lhs = 24; mixing in white noise at visibility v
//! scales both branch CHSH values by v and Σ to 3v.

use std::collections::BTreeMap;

use super::chsh::{branch_probabilities, conditioned_chsh, CHSHVariant};
use crate::circuit::{CausalCircuit, Node, NodeKind, Wire};
use crate::quantum::{
    ghz4, noisy_ghz4, projectors_xz, simulate_settings, CMat, QuantumRealization,
    SettingsBehavior, SourceState,
};

/// The inequality's fixed right-hand side.
pub const INEQ2_BOUND: f64 = 16.0;

/// Maximum allowed imbalance between the two branch probabilities.
pub const PRECONDITION_TOL: f64 = 1e-6;

/// Violations smaller than this count as numerical noise.
pub const REPORT_TOL: f64 = 1e-9;

/// Evaluation of the squared-CHSH inequality on one settings behavior.
#[derive(Debug, Clone, PartialEq)]
pub struct Ineq2Report {
    /// p(C¹·D¹ = +1) at A/B settings (0, 0).
    pub p_plus: f64,
    /// p(C¹·D¹ = −1) at A/B settings (0, 0).
    pub p_minus: f64,
    /// Facet value conditioned on C¹·D¹ = −1.
    pub chsh_minus: f64,
    /// Facet value conditioned on C¹·D¹ = +1.
    pub chsh_plus: f64,
    /// ⟨A⁰B²⟩ + ⟨B²C⁰⟩ + ⟨C⁰D⁰⟩.
    pub sigma: f64,
    /// chsh_minus² + chsh_plus² + 8(3σ − 8)².
    pub lhs: f64,
    /// Always 16.
    pub bound: f64,
    /// |p_plus − p_minus| ≤ 1e−6.
    pub precondition_satisfied: bool,
    /// lhs > bound + 1e−9, and only when the precondition holds.
    pub violated: bool,
}

/// Assemble the report from the five independent quantities.
pub fn assemble_ineq2_report(
    p_plus: f64,
    p_minus: f64,
    chsh_minus: f64,
    chsh_plus: f64,
    sigma: f64,
) -> Ineq2Report {
    let lhs = chsh_minus * chsh_minus
        + chsh_plus * chsh_plus
        + 8.0 * (3.0 * sigma - 8.0) * (3.0 * sigma - 8.0);
    let precondition_satisfied = (p_plus - p_minus).abs() <= PRECONDITION_TOL;
    Ineq2Report {
        p_plus,
        p_minus,
        chsh_minus,
        chsh_plus,
        sigma,
        lhs,
        bound: INEQ2_BOUND,
        precondition_satisfied,
        violated: precondition_satisfied && lhs > INEQ2_BOUND + REPORT_TOL,
    }
}

/// Evaluate the inequality.  `variant_minus` scores the C¹·D¹ = −1
/// branch, `variant_plus` the +1 branch.
pub fn eval_ineq2(
    sb: &SettingsBehavior,
    variant_minus: &CHSHVariant,
    variant_plus: &CHSHVariant,
) -> Result<Ineq2Report, String> {
    let s = sb.setting_arities();
    if s != [2, 3, 2, 2] {
        return Err(format!("setting arities must be (2,3,2,2), got {s:?}"));
    }
    if let Some(k) = sb.outcome_arities().iter().position(|&a| a != 2) {
        return Err(format!("party {k} outcomes must be binary"));
    }
    let (p_plus, p_minus) = branch_probabilities(sb)?;
    let chsh_minus = conditioned_chsh(sb, -1, variant_minus)?;
    let chsh_plus = conditioned_chsh(sb, 1, variant_plus)?;
    let sigma = sb.correlator(&[0, 2, 0, 0], &[0, 1])
        + sb.correlator(&[0, 2, 0, 0], &[1, 2])
        + sb.correlator(&[0, 0, 0, 0], &[2, 3]);
    Ok(assemble_ineq2_report(
        p_plus, p_minus, chsh_minus, chsh_plus, sigma,
    ))
}

/// One source feeding all four parties directly (a star circuit), with
/// qubit wires and placeholder measurements; intended for use with
/// [`simulate_settings`], which supplies the real setting families.
pub fn ghz_star_realization(state: SourceState) -> QuantumRealization {
    let mut nodes: Vec<Node> = "ABCD"
        .chars()
        .map(|p| Node::new(p.to_string(), NodeKind::Measurement))
        .collect();
    nodes.push(Node::new("G", NodeKind::Source));
    let wires: Vec<Wire> = "ABCD"
        .chars()
        .map(|p| Wire::new(format!("G->{p}"), "G", p.to_string()))
        .collect();
    let circuit = CausalCircuit::new(nodes, wires);
    let wire_dims = circuit
        .wires()
        .iter()
        .map(|w| (w.id.clone(), 2usize))
        .collect();
    let measurements = "ABCD"
        .chars()
        .map(|p| (p.to_string(), projectors_xz(0.0)))
        .collect();
    QuantumRealization {
        circuit,
        wire_dims,
        sources: [("G".to_string(), state)].into(),
        transformations: BTreeMap::new(),
        measurements,
    }
}

/// Setting families for the documented fixture: A = (σ_z, σ_x),
/// B = ((σ_z+σ_x)/√2, (σ_z−σ_x)/√2, σ_z), C = D = (σ_z, σ_x).
pub fn ghz_setting_families() -> BTreeMap<String, Vec<Vec<CMat>>> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    let mut fams = BTreeMap::new();
    fams.insert(
        "A".to_string(),
        vec![projectors_xz(0.0), projectors_xz(FRAC_PI_2)],
    );
    fams.insert(
        "B".to_string(),
        vec![
            projectors_xz(FRAC_PI_4),
            projectors_xz(-FRAC_PI_4),
            projectors_xz(0.0),
        ],
    );
    for p in ["C", "D"] {
        fams.insert(
            p.to_string(),
            vec![projectors_xz(0.0), projectors_xz(FRAC_PI_2)],
        );
    }
    fams
}

/// Settings behavior of the GHZ₄ state at visibility `v` under
/// [`ghz_setting_families`].  `v = 1` uses the pure state; lower
/// visibilities mix in white noise and take the density path.
pub fn ghz_settings_behavior(v: f64) -> Result<SettingsBehavior, String> {
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("visibility must lie in [0,1], got {v}"));
    }
    let state = if v >= 1.0 {
        SourceState::Pure(ghz4())
    } else {
        SourceState::Density(noisy_ghz4(v))
    };
    let r = ghz_star_realization(state);
    simulate_settings(&r, &ghz_setting_families())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::enumerate_mixed_radix;

    const SQRT8: f64 = 2.8284271247461903;

    fn defaults() -> (CHSHVariant, CHSHVariant) {
        (
            CHSHVariant::default_minus_branch(),
            CHSHVariant::default_plus_branch(),
        )
    }

    fn closed_form(v: f64) -> f64 {
        16.0 * v * v + 8.0 * (9.0 * v - 8.0) * (9.0 * v - 8.0)
    }

    #[test]
    fn ideal_ghz_reaches_24() {
        let sb = ghz_settings_behavior(1.0).unwrap();
        let (vm, vp) = defaults();
        let r = eval_ineq2(&sb, &vm, &vp).unwrap();
        assert!((r.p_plus - 0.5).abs() < 1e-12);
        assert!((r.p_minus - 0.5).abs() < 1e-12);
        assert!((r.chsh_plus - SQRT8).abs() < 1e-8);
        assert!((r.chsh_minus - SQRT8).abs() < 1e-8);
        assert!((r.sigma - 3.0).abs() < 1e-10);
        assert!((r.lhs - 24.0).abs() < 1e-6);
        assert!(r.precondition_satisfied);
        assert!(r.violated);
    }

    #[test]
    fn noisy_ghz_matches_the_closed_form_curve() {
        let (vm, vp) = defaults();
        for v in [0.9, 0.9417, 0.96] {
            let sb = ghz_settings_behavior(v).unwrap();
            let r = eval_ineq2(&sb, &vm, &vp).unwrap();
            assert!(
                (r.lhs - closed_form(v)).abs() < 1e-8,
                "v={v}: lhs {} vs {}",
                r.lhs,
                closed_form(v)
            );
            assert!((r.sigma - 3.0 * v).abs() < 1e-10);
        }
        let at_threshold = eval_ineq2(&ghz_settings_behavior(0.9417).unwrap(), &vm, &vp).unwrap();
        assert!((at_threshold.lhs - 16.0).abs() < 0.1);
        let below = eval_ineq2(&ghz_settings_behavior(0.90).unwrap(), &vm, &vp).unwrap();
        assert!((below.lhs - 13.04).abs() < 1e-6);
        assert!(!below.violated);
    }

    #[test]
    fn unmatched_facet_scores_zero_on_the_minus_branch() {
        // The odd-parity Bell state's correlators make the (+,−,+,+)
        // combination cancel exactly, which is why it is not the default
        // for that branch.
        let sb = ghz_settings_behavior(1.0).unwrap();
        let v = conditioned_chsh(&sb, -1, &CHSHVariant::new([1, -1, 1, 1]).unwrap()).unwrap();
        assert!(v.abs() < 1e-10, "got {v}");
    }

    #[test]
    fn branch_swap_with_variant_swap_is_a_symmetry() {
        // Flip D's outcome at its setting 1: this negates C¹·D¹, swapping
        // the two branches while leaving every A/B marginal intact.
        let sb = ghz_settings_behavior(0.93).unwrap();
        let sa = sb.setting_arities().to_vec();
        let combos = enumerate_mixed_radix(&sa);
        let mut probs = Vec::new();
        for settings in &combos {
            for o in enumerate_mixed_radix(sb.outcome_arities()) {
                let mut src = o.clone();
                if settings[3] == 1 {
                    src[3] = 1 - src[3];
                }
                probs.push(sb.prob(settings, &src));
            }
        }
        let swapped = SettingsBehavior::new(sa, sb.outcome_arities().to_vec(), probs).unwrap();
        let (vm, vp) = defaults();
        let a = eval_ineq2(&sb, &vm, &vp).unwrap();
        let b = eval_ineq2(&swapped, &vp, &vm).unwrap();
        assert!((a.lhs - b.lhs).abs() < 1e-10);
        assert!((a.chsh_minus - b.chsh_plus).abs() < 1e-10);
        assert!((a.chsh_plus - b.chsh_minus).abs() < 1e-10);
        assert!((a.sigma - b.sigma).abs() < 1e-12);
    }

    #[test]
    fn wrong_setting_arities_are_rejected() {
        let arities = vec![2u32, 2, 2, 2];
        let combos = enumerate_mixed_radix(&arities).len();
        let sb =
            SettingsBehavior::new(arities, vec![2; 4], vec![1.0 / 16.0; combos * 16]).unwrap();
        let (vm, vp) = defaults();
        let err = eval_ineq2(&sb, &vm, &vp).unwrap_err();
        assert!(err.contains("(2,3,2,2)"), "{err}");
    }

    #[test]
    fn visibility_is_validated() {
        assert!(ghz_settings_behavior(1.2).is_err());
        assert!(ghz_settings_behavior(-0.1).is_err());
    }
}
