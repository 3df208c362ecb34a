//! Infeasibility certificates and their independent re-verification.

use nalgebra::DMatrix;

use crate::problem::SdpProblem;

/// A Farkas-type proof that no PSD matrix satisfies the constraint system.
///
/// The multipliers `y` (one per original constraint, max-norm 1) satisfy
/// `S = sum_k y_k A_k ⪰ 0` and `b·y ≤ -margin < 0`. Any feasible `X ⪰ 0`
/// would give `0 ≤ <S, X> = b·y < 0`, a contradiction.
#[derive(Debug, Clone)]
pub struct InfeasibilityCertificate {
    /// Multipliers over the original constraint list, normalized to
    /// `max |y_k| = 1`.
    pub y: Vec<f64>,
    /// `-b·y`, the strictly positive separation margin.
    pub margin: f64,
    /// `max(0, -λ_min(S))` observed when the certificate was produced.
    pub psd_defect: f64,
}

/// Result of re-verifying a certificate by direct arithmetic.
#[derive(Debug, Clone)]
pub struct CertificateCheck {
    /// Recomputed `-b·y`.
    pub margin: f64,
    /// Recomputed `max(0, -λ_min(sum y_k A_k))`.
    pub psd_defect: f64,
    /// Frobenius norm of `S`, the scale the defect is judged against.
    pub s_norm: f64,
    /// True when the margin exceeds `margin_tol` and the defect is within
    /// `1e-10 * (1 + ||S||_F)`.
    pub valid: bool,
}

/// Recompute `S = sum y_k A_k` and `b·y` from scratch and judge the
/// certificate against `margin_tol` (the centralized default is `1e-9`).
pub fn verify_certificate(
    p: &SdpProblem,
    cert: &InfeasibilityCertificate,
    margin_tol: f64,
) -> CertificateCheck {
    let n = p.n();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for (k, &yk) in cert.y.iter().enumerate() {
        if yk != 0.0 {
            s += p.constraint_matrix(k) * yk;
        }
    }
    let margin: f64 = -cert
        .y
        .iter()
        .zip(p.rhs())
        .map(|(y, b)| y * b)
        .sum::<f64>();
    let s_norm = s.norm();
    let eig = s.symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let psd_defect = (-min_eig).max(0.0);
    let valid = margin > margin_tol && psd_defect <= 1e-10 * (1.0 + s_norm);
    CertificateCheck {
        margin,
        psd_defect,
        s_norm,
        valid,
    }
}
