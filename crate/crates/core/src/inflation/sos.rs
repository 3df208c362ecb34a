//! Sum-of-squares decomposition of the coordination obstruction on the
//! inflated system.
//!
//! For a realization of the inflated wiring with global product state
//! |φ⟩ and Heisenberg-picture outcome-0 projectors Π̃_X, define the link
//! residuals r_XY = ‖(Π̃_X − Π̃_Y)|φ⟩‖² along the chain A–B–C–D.  Each
//! residual is an observable quantity of the original circuit (the
//! corresponding pair survives in one of the valid sub-wirings), and by
//! the triangle inequality the chain ends satisfy
//!
//!   ‖(Π̃_A − Π̃_D)|φ⟩‖² ≤ (√r_AB + √r_BC + √r_CD)².
//!
//! Because A and D draw on disjoint source copies, Π̃_A and Π̃_D commute
//! and ⟨Π̃_A Π̃_D⟩ factorizes over the product state, so the covariance
//! gap |⟨Π̃_A Π̃_D⟩ − ⟨Π̃_A⟩⟨Π̃_D⟩| collapses to ⟨A⟩(1 − ⟨A⟩) whenever
//! all residuals vanish: perfect coordination of an unbiased bit (which
//! needs ⟨A⟩ = 1/2 and zero residuals) is impossible.

use crate::quantum::{CVec, WiredSystem};

/// Residuals, the triangle bound, and the covariance gap for one
/// realization of the inflated wiring.
#[derive(Debug, Clone)]
pub struct SosReport {
    /// Link residuals r_AB, r_BC, r_CD.
    pub r_ab: f64,
    pub r_bc: f64,
    pub r_cd: f64,
    /// Direct end-to-end residual ‖(Π̃_A − Π̃_D)|φ⟩‖².
    pub r_ad: f64,
    /// Chain bound (√r_AB + √r_BC + √r_CD)².
    pub end_to_end: f64,
    /// |⟨Π̃_A Π̃_D⟩ − ⟨Π̃_A⟩⟨Π̃_D⟩|.
    pub gap: f64,
    /// ⟨Π̃_A⟩ and ⟨Π̃_D⟩.
    pub mean_a: f64,
    pub mean_d: f64,
    /// r_AD ≤ end_to_end within `tol`.
    pub triangle_holds: bool,
}

impl SosReport {
    /// |gap − ⟨A⟩(1 − ⟨A⟩)|: zero (within tolerance) whenever the link
    /// residuals vanish.
    pub fn zero_residual_identity_defect(&self) -> f64 {
        (self.gap - self.mean_a * (1.0 - self.mean_a)).abs()
    }

    pub fn max_link_residual(&self) -> f64 {
        self.r_ab.max(self.r_bc).max(self.r_cd)
    }
}

/// Evaluate the chain decomposition on a wired system whose parties are
/// A, B, C, D in order, with global state `phi`.
pub fn sos_chain_check(system: &WiredSystem, phi: &CVec, tol: f64) -> Result<SosReport, String> {
    if system.parties.len() != 4 {
        return Err(format!(
            "expected 4 parties, found {}",
            system.parties.len()
        ));
    }
    if phi.len() != system.global_dim() {
        return Err(format!(
            "state has dimension {}, system has {}",
            phi.len(),
            system.global_dim()
        ));
    }
    // u_X = Π̃_X |φ⟩ for the outcome-0 projectors.
    let u: Vec<CVec> = (0..4)
        .map(|k| system.heisenberg_projector(k, 0).apply(phi))
        .collect();
    let res = |x: usize, y: usize| -> f64 { (&u[x] - &u[y]).norm_squared() };
    let r_ab = res(0, 1);
    let r_bc = res(1, 2);
    let r_cd = res(2, 3);
    let r_ad = res(0, 3);
    let end_to_end = {
        let s = r_ab.sqrt() + r_bc.sqrt() + r_cd.sqrt();
        s * s
    };
    // Projector means: ⟨Π̃_X⟩ = ‖u_X‖² (projectors are idempotent).
    let mean_a = u[0].norm_squared();
    let mean_d = u[3].norm_squared();
    // A and D commute, so ⟨Π̃_A Π̃_D⟩ = ⟨u_A, u_D⟩ is real up to noise.
    let joint = u[0].dotc(&u[3]).re;
    let gap = (joint - mean_a * mean_d).abs();
    Ok(SosReport {
        r_ab,
        r_bc,
        r_cd,
        r_ad,
        end_to_end,
        gap,
        mean_a,
        mean_d,
        triangle_holds: r_ad <= end_to_end + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inflation::wiring::{
        random_fig2_realization, zero_residual_fig2_realization,
    };

    #[test]
    fn random_realizations_satisfy_the_triangle_bound() {
        let mut rng = crate::quantum::rng_from_seed(31);
        for _ in 0..5 {
            let r = random_fig2_realization(&mut rng, 2);
            let sys = r.wired_system().unwrap();
            let phi = r.global_state().unwrap();
            let report = sos_chain_check(&sys, &phi, 1e-8).unwrap();
            assert!(report.triangle_holds, "{report:?}");
            assert!(report.gap <= 1.0);
            assert!(report.mean_a >= -1e-12 && report.mean_a <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn zero_residual_instances_satisfy_the_gap_identity() {
        for keep_zero in [true, false] {
            let r = zero_residual_fig2_realization(2, keep_zero);
            r.validate().unwrap();
            let sys = r.wired_system().unwrap();
            let phi = r.global_state().unwrap();
            let report = sos_chain_check(&sys, &phi, 1e-8).unwrap();
            assert!(report.max_link_residual() < 1e-12, "{report:?}");
            assert!(report.zero_residual_identity_defect() < 1e-12, "{report:?}");
            let expected_mean = if keep_zero { 1.0 } else { 0.0 };
            assert!((report.mean_a - expected_mean).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let r = zero_residual_fig2_realization(2, true);
        let sys = r.wired_system().unwrap();
        let phi = CVec::zeros(7);
        assert!(sos_chain_check(&sys, &phi, 1e-8).is_err());
    }
}
