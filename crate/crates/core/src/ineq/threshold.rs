//! Visibility threshold of the squared-CHSH inequality on noisy GHZ₄
//! states, with an analytic fast path for the optimizer.
//!
//! For `ρ_v = v·|G⟩⟨G| + (1−v)·I/16` every product-operator expectation
//! splits as `v·⟨G|⊗O_k|G⟩ + (1−v)·∏tr(O_k)/16`, and the GHZ part needs
//! only the four corner entries of each single-qubit factor.  All
//! inequality terms — branch probabilities, conditioned facet values,
//! and the chain term Σ — are such expectations, so one objective
//! evaluation costs a few dozen complex multiplications instead of a
//! full simulation.  The fast path is pinned to the simulator by tests
//! that compare it with `eval_ineq2 ∘ simulate_settings` on the same
//! settings.
//!
//! The optimization domain pins the chain settings A⁰ = B² = C⁰ = D⁰ =
//! σ_z and restricts the conditioning observables C¹, D¹ to the Bloch
//! equator (zero diagonal), which makes the two conditioning branches
//! exactly equiprobable — the inequality's precondition holds across the
//! whole search space.  Free parameters: full Bloch directions for A¹,
//! B⁰, B¹ and equatorial phases for C¹, D¹ — eight numbers.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::chsh::CHSHVariant;
use super::ineq2::{assemble_ineq2_report, Ineq2Report, INEQ2_BOUND, REPORT_TOL};
use super::optimize::{multi_start_ascent, MultiStartOptions};
use crate::exec::ExecMode;
use crate::quantum::linalg::eye;
use crate::quantum::{pauli_x, pauli_y, pauli_z, CMat};

/// Upper root of 16v² + 8(9v−8)² = 16: the visibility where the
/// optimized left-hand side crosses the bound, (144 + √152)/166.
pub fn ideal_visibility_threshold() -> f64 {
    (144.0 + 152.0_f64.sqrt()) / 166.0
}

/// Left-hand side at the optimal settings as a function of visibility:
/// both conditioned facet values scale as 2√2·v and Σ as 3v, giving
/// 16v² + 8(9v−8)².
pub fn closed_form_lhs(v: f64) -> f64 {
    16.0 * v * v + 8.0 * (9.0 * v - 8.0) * (9.0 * v - 8.0)
}

/// Observable `sinθcosφ·σ_x + sinθsinφ·σ_y + cosθ·σ_z`.
pub fn bloch_observable(theta: f64, phi: f64) -> CMat {
    pauli_x() * crate::quantum::cr(theta.sin() * phi.cos())
        + pauli_y() * crate::quantum::cr(theta.sin() * phi.sin())
        + pauli_z() * crate::quantum::cr(theta.cos())
}

/// Equatorial observable `cosφ·σ_x + sinφ·σ_y` (zero diagonal).
pub fn equatorial_observable(phi: f64) -> CMat {
    pauli_x() * crate::quantum::cr(phi.cos()) + pauli_y() * crate::quantum::cr(phi.sin())
}

/// Projectors of a ±1 observable: outcome 0 is the +1 eigenspace.
pub fn observable_projectors(o: &CMat) -> Vec<CMat> {
    let half = crate::quantum::cr(0.5);
    vec![
        (eye(2) + o.clone()) * half,
        (eye(2) - o.clone()) * half,
    ]
}

/// The free measurement directions: Bloch angles (θ, φ) for A¹, B⁰, B¹
/// and equatorial phases for C¹ and D¹.  The chain settings A⁰ = B² =
/// C⁰ = D⁰ = σ_z are pinned.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzSettings {
    pub a1: (f64, f64),
    pub b0: (f64, f64),
    pub b1: (f64, f64),
    pub c1_phi: f64,
    pub d1_phi: f64,
}

impl GhzSettings {
    /// The analytically optimal directions: A¹ = C¹ = D¹ = σ_x,
    /// B⁰ = (σ_z+σ_x)/√2, B¹ = (σ_z−σ_x)/√2.
    pub fn ideal() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        Self {
            a1: (FRAC_PI_2, 0.0),
            b0: (FRAC_PI_4, 0.0),
            b1: (-FRAC_PI_4, 0.0),
            c1_phi: 0.0,
            d1_phi: 0.0,
        }
    }

    pub fn from_params(p: &[f64]) -> Self {
        assert_eq!(p.len(), 8);
        Self {
            a1: (p[0], p[1]),
            b0: (p[2], p[3]),
            b1: (p[4], p[5]),
            c1_phi: p[6],
            d1_phi: p[7],
        }
    }

    pub fn params(&self) -> Vec<f64> {
        vec![
            self.a1.0, self.a1.1, self.b0.0, self.b0.1, self.b1.0, self.b1.1, self.c1_phi,
            self.d1_phi,
        ]
    }

    /// Per-party projector families (setting-major) realizing these
    /// directions, for feeding the settings simulator.
    pub fn setting_families(&self) -> BTreeMap<String, Vec<Vec<CMat>>> {
        let z = pauli_z();
        let mut fams = BTreeMap::new();
        fams.insert(
            "A".to_string(),
            vec![
                observable_projectors(&z),
                observable_projectors(&bloch_observable(self.a1.0, self.a1.1)),
            ],
        );
        fams.insert(
            "B".to_string(),
            vec![
                observable_projectors(&bloch_observable(self.b0.0, self.b0.1)),
                observable_projectors(&bloch_observable(self.b1.0, self.b1.1)),
                observable_projectors(&z),
            ],
        );
        fams.insert(
            "C".to_string(),
            vec![
                observable_projectors(&z),
                observable_projectors(&equatorial_observable(self.c1_phi)),
            ],
        );
        fams.insert(
            "D".to_string(),
            vec![
                observable_projectors(&z),
                observable_projectors(&equatorial_observable(self.d1_phi)),
            ],
        );
        fams
    }
}

/// ⟨O_A ⊗ O_B ⊗ O_C ⊗ O_D⟩ on v·|G⟩⟨G| + (1−v)·I/16, using only the
/// corner entries of each 2×2 factor.
pub fn ghz_product_mean(v: f64, ops: [&CMat; 4]) -> f64 {
    let entry = |r: usize, c: usize| {
        ops[0][(r, c)] * ops[1][(r, c)] * ops[2][(r, c)] * ops[3][(r, c)]
    };
    let ghz_part = 0.5 * (entry(0, 0) + entry(0, 1) + entry(1, 0) + entry(1, 1)).re;
    let traces = ops[0].trace() * ops[1].trace() * ops[2].trace() * ops[3].trace();
    v * ghz_part + (1.0 - v) * traces.re / 16.0
}

/// Evaluate the squared-CHSH inequality analytically on the noisy GHZ
/// state at visibility `v` with the given directions and facets.
pub fn ghz_ineq2_report(
    v: f64,
    s: &GhzSettings,
    variant_minus: &CHSHVariant,
    variant_plus: &CHSHVariant,
) -> Ineq2Report {
    let id = eye(2);
    let z = pauli_z();
    let a = [z.clone(), bloch_observable(s.a1.0, s.a1.1)];
    let b = [
        bloch_observable(s.b0.0, s.b0.1),
        bloch_observable(s.b1.0, s.b1.1),
    ];
    let pc = observable_projectors(&equatorial_observable(s.c1_phi));
    let qd = observable_projectors(&equatorial_observable(s.d1_phi));

    // Branch probabilities: sum of ⟨I ⊗ I ⊗ P_c ⊗ Q_d⟩ over each parity
    // class of (c, d).
    let mut p_branch = [0.0f64; 2]; // index 0: +1 branch, 1: −1 branch
    for c in 0..2 {
        for d in 0..2 {
            let pr = ghz_product_mean(v, [&id, &id, &pc[c], &qd[d]]);
            p_branch[(c + d) % 2] += pr;
        }
    }

    // Conditioned facet values.
    let mut chsh = [0.0f64; 2]; // index 0: +1 branch, 1: −1 branch
    let signs = [variant_plus.signs(), variant_minus.signs()];
    for (k, (x, y)) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        let mut num = [0.0f64; 2];
        for c in 0..2 {
            for d in 0..2 {
                let e = ghz_product_mean(v, [&a[x], &b[y], &pc[c], &qd[d]]);
                num[(c + d) % 2] += e;
            }
        }
        for branch in 0..2 {
            chsh[branch] += signs[branch][k] * num[branch] / p_branch[branch];
        }
    }

    // Chain term with the pinned σ_z settings.
    let sigma = ghz_product_mean(v, [&z, &z, &id, &id])
        + ghz_product_mean(v, [&id, &z, &z, &id])
        + ghz_product_mean(v, [&id, &id, &z, &z]);

    assemble_ineq2_report(p_branch[0], p_branch[1], chsh[1], chsh[0], sigma)
}

/// Options for the threshold search.
#[derive(Debug, Clone)]
pub struct ThresholdOptions {
    /// Lower edge of the supported visibility window.
    pub v_min: f64,
    /// Bisection stops when the bracket is this narrow.
    pub grid_step: f64,
    /// Spacing of the plot curve samples.
    pub curve_step: f64,
    pub variant_minus: CHSHVariant,
    pub variant_plus: CHSHVariant,
    /// Inner optimizer budget, applied at every visibility.
    pub opt: MultiStartOptions,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            v_min: 0.85,
            grid_step: 0.002,
            curve_step: 0.01,
            variant_minus: CHSHVariant::default_minus_branch(),
            variant_plus: CHSHVariant::default_plus_branch(),
            opt: MultiStartOptions::default(),
        }
    }
}

/// One optimized sample of the curve.
#[derive(Debug, Clone)]
pub struct VPoint {
    pub v: f64,
    pub report: Ineq2Report,
}

/// Result of the threshold search.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    /// Estimated crossing visibility (bracket midpoint).
    pub v_star: f64,
    /// Half the final bracket width.
    pub half_width: f64,
    pub v_min: f64,
    pub grid_step: f64,
    /// Optimized evaluation at v = 1.
    pub at_unit_visibility: Ineq2Report,
    /// Optimizer argmax at v = 1.
    pub best_settings: GhzSettings,
    /// Bisection midpoints in visit order.
    pub bisection: Vec<VPoint>,
    /// Regular grid over [v_min, 1] for plotting.
    pub curve: Vec<VPoint>,
}

fn sample_angles(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    (0..dim)
        .map(|k| {
            // Even slots of the three Bloch pairs are polar angles.
            if k < 6 && k % 2 == 0 {
                rng.random_range(0.0..PI)
            } else {
                rng.random_range(0.0..TAU)
            }
        })
        .collect()
}

/// Maximize the left-hand side over [`GhzSettings`] at fixed visibility.
pub fn optimize_lhs_at(v: f64, o: &ThresholdOptions) -> (GhzSettings, Ineq2Report) {
    let vm = o.variant_minus.clone();
    let vp = o.variant_plus.clone();
    let f = move |p: &[f64]| ghz_ineq2_report(v, &GhzSettings::from_params(p), &vm, &vp).lhs;
    let out = multi_start_ascent(f, 8, sample_angles, &o.opt);
    let settings = GhzSettings::from_params(&out.params);
    let report = ghz_ineq2_report(v, &settings, &o.variant_minus, &o.variant_plus);
    (settings, report)
}

/// Find the visibility above which the optimized left-hand side exceeds
/// the bound, by bisection on [v_min, 1] to `grid_step` resolution.
///
/// Errors when no violation is found at v = 1 (an implementation bug by
/// construction) or when the window floor already violates (the crossing
/// would lie outside the supported window).
pub fn visibility_threshold(o: &ThresholdOptions) -> Result<ThresholdReport, String> {
    if !(0.0..1.0).contains(&o.v_min) {
        return Err(format!("v_min must lie in [0,1), got {}", o.v_min));
    }
    if o.grid_step <= 0.0 || o.curve_step <= 0.0 {
        return Err("step sizes must be positive".to_string());
    }
    let violated = |r: &Ineq2Report| r.precondition_satisfied && r.lhs > INEQ2_BOUND + REPORT_TOL;

    let (best_settings, at_one) = optimize_lhs_at(1.0, o);
    if !violated(&at_one) {
        return Err(format!(
            "no violation at v=1 (optimized lhs {:.6} ≤ {}) — optimizer budget {} restarts",
            at_one.lhs, INEQ2_BOUND, o.opt.restarts
        ));
    }
    let (_, at_floor) = optimize_lhs_at(o.v_min, o);
    if violated(&at_floor) {
        return Err(format!(
            "already violated at the window floor v={} (lhs {:.6}); crossing lies below the supported window",
            o.v_min, at_floor.lhs
        ));
    }

    let mut lo = o.v_min;
    let mut hi = 1.0;
    let mut bisection = Vec::new();
    while hi - lo > o.grid_step {
        let mid = 0.5 * (lo + hi);
        let (_, r) = optimize_lhs_at(mid, o);
        let hit = violated(&r);
        bisection.push(VPoint { v: mid, report: r });
        if hit {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // Plot curve on a regular grid, endpoints included.
    let mut grid = Vec::new();
    let mut v = o.v_min;
    while v < 1.0 - 1e-12 {
        grid.push(v);
        v += o.curve_step;
    }
    grid.push(1.0);
    let curve = crate::exec::par_map(o.opt.mode, grid, |v| {
        let inner = ThresholdOptions {
            opt: MultiStartOptions {
                mode: ExecMode::Sequential,
                ..o.opt.clone()
            },
            ..o.clone()
        };
        let (_, r) = optimize_lhs_at(v, &inner);
        VPoint { v, report: r }
    });

    Ok(ThresholdReport {
        v_star: 0.5 * (lo + hi),
        half_width: 0.5 * (hi - lo),
        v_min: o.v_min,
        grid_step: o.grid_step,
        at_unit_visibility: at_one,
        best_settings,
        bisection,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ineq::ineq2::{eval_ineq2, ghz_settings_behavior, ghz_star_realization};
    use crate::ineq::optimize::AscentOptions;
    use crate::quantum::{ghz4, noisy_ghz4, simulate_settings, SourceState};

    fn defaults() -> (CHSHVariant, CHSHVariant) {
        (
            CHSHVariant::default_minus_branch(),
            CHSHVariant::default_plus_branch(),
        )
    }

    #[test]
    fn closed_form_anchors() {
        assert!((closed_form_lhs(1.0) - 24.0).abs() < 1e-12);
        let v = ideal_visibility_threshold();
        assert!((closed_form_lhs(v) - 16.0).abs() < 1e-9);
        assert!((v - 0.9417399277466141).abs() < 1e-15);
        assert!((closed_form_lhs(0.9) - 13.04).abs() < 1e-12);
    }

    #[test]
    fn analytic_report_matches_the_closed_form_at_ideal_settings() {
        let (vm, vp) = defaults();
        let s = GhzSettings::ideal();
        for v in [1.0, 0.96, 0.9417399277466141, 0.9, 0.85] {
            let r = ghz_ineq2_report(v, &s, &vm, &vp);
            assert!(
                (r.lhs - closed_form_lhs(v)).abs() < 1e-10,
                "v={v}: {} vs {}",
                r.lhs,
                closed_form_lhs(v)
            );
            assert!((r.p_plus - 0.5).abs() < 1e-12);
            assert!((r.p_minus - 0.5).abs() < 1e-12);
            assert!(r.precondition_satisfied);
        }
    }

    #[test]
    fn analytic_path_agrees_with_the_simulator_at_ideal_settings() {
        let (vm, vp) = defaults();
        for v in [1.0, 0.9] {
            let analytic = ghz_ineq2_report(v, &GhzSettings::ideal(), &vm, &vp);
            let sb = ghz_settings_behavior(v).unwrap();
            let simulated = eval_ineq2(&sb, &vm, &vp).unwrap();
            assert!(
                (analytic.lhs - simulated.lhs).abs() < 1e-9,
                "v={v}: {} vs {}",
                analytic.lhs,
                simulated.lhs
            );
            assert!((analytic.sigma - simulated.sigma).abs() < 1e-10);
            assert!((analytic.chsh_plus - simulated.chsh_plus).abs() < 1e-9);
            assert!((analytic.chsh_minus - simulated.chsh_minus).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_path_agrees_with_the_simulator_at_random_settings() {
        use rand::Rng;
        let (vm, vp) = defaults();
        let mut rng = crate::quantum::rng_from_seed(99);
        for v in [1.0, 0.93] {
            let s = GhzSettings {
                a1: (rng.random_range(0.0..3.0), rng.random_range(0.0..6.0)),
                b0: (rng.random_range(0.0..3.0), rng.random_range(0.0..6.0)),
                b1: (rng.random_range(0.0..3.0), rng.random_range(0.0..6.0)),
                c1_phi: rng.random_range(0.0..6.0),
                d1_phi: rng.random_range(0.0..6.0),
            };
            let analytic = ghz_ineq2_report(v, &s, &vm, &vp);
            let state = if v >= 1.0 {
                SourceState::Pure(ghz4())
            } else {
                SourceState::Density(noisy_ghz4(v))
            };
            let sb =
                simulate_settings(&ghz_star_realization(state), &s.setting_families()).unwrap();
            let simulated = eval_ineq2(&sb, &vm, &vp).unwrap();
            assert!(
                (analytic.lhs - simulated.lhs).abs() < 1e-9,
                "v={v}: {} vs {}",
                analytic.lhs,
                simulated.lhs
            );
        }
    }

    fn small_budget() -> ThresholdOptions {
        ThresholdOptions {
            opt: MultiStartOptions {
                restarts: 12,
                seed: 3,
                mode: ExecMode::Sequential,
                ascent: AscentOptions::default(),
            },
            ..ThresholdOptions::default()
        }
    }

    #[test]
    fn optimizer_recovers_the_maximum_at_unit_visibility() {
        let (_, r) = optimize_lhs_at(1.0, &small_budget());
        assert!(r.lhs >= 24.0 - 1e-6, "lhs {}", r.lhs);
        assert!(r.lhs <= 24.0 + 1e-9, "lhs {}", r.lhs);
    }

    #[test]
    fn optimizer_tracks_the_closed_form_below_threshold() {
        let (_, r) = optimize_lhs_at(0.9, &small_budget());
        assert!(
            (r.lhs - closed_form_lhs(0.9)).abs() < 1e-4,
            "lhs {} vs {}",
            r.lhs,
            closed_form_lhs(0.9)
        );
        assert!(!r.violated);
    }

    #[test]
    fn threshold_search_finds_the_crossing() {
        let o = ThresholdOptions {
            grid_step: 0.004,
            curve_step: 0.05,
            ..small_budget()
        };
        let rep = visibility_threshold(&o).unwrap();
        let ideal = ideal_visibility_threshold();
        assert!(
            (rep.v_star - ideal).abs() <= 0.005,
            "v* {} vs {}",
            rep.v_star,
            ideal
        );
        assert!(rep.half_width <= 0.002 + 1e-12);
        assert!(rep.at_unit_visibility.violated);
        // Curve is consistent with a single crossing at v*.
        for p in &rep.curve {
            if p.v > rep.v_star + 0.005 {
                assert!(p.report.lhs > 16.0, "v={} lhs={}", p.v, p.report.lhs);
            }
            if p.v < rep.v_star - 0.005 {
                assert!(p.report.lhs < 16.0, "v={} lhs={}", p.v, p.report.lhs);
            }
        }
    }

    #[test]
    fn invalid_windows_are_rejected() {
        let mut o = small_budget();
        o.v_min = 1.5;
        assert!(visibility_threshold(&o).is_err());
        let mut o = small_budget();
        o.grid_step = 0.0;
        assert!(visibility_threshold(&o).is_err());
    }
}
