//! The chain inequality ⟨AB⟩ + ⟨BC⟩ + ⟨CD⟩ ≤ ⟨A⟩⟨D⟩/2 + 3√3/2 on
//! four-party binary behaviors.
//!
//! A perfectly coordinated random bit has every pair correlator equal to
//! 1 and both single-party means equal to 0, so its left-hand side is 3
//! while the right-hand side is 3√3/2 ≈ 2.598: coordination without a
//! common cause would violate the bound.

use crate::quantum::Behavior;

/// 3√3/2, the circuit-independent quantum bound on the chain term.
pub const CHAIN_QUANTUM_BOUND: f64 = 2.598076211353316;

/// Violations smaller than this count as numerical noise.
pub const REPORT_TOL: f64 = 1e-9;

/// Evaluation of the chain inequality on one behavior.
#[derive(Debug, Clone, PartialEq)]
pub struct Ineq1Report {
    /// ⟨AB⟩ + ⟨BC⟩ + ⟨CD⟩.
    pub lhs: f64,
    /// ⟨A⟩⟨D⟩/2 + 3√3/2.
    pub rhs: f64,
    /// lhs − rhs.
    pub violation: f64,
    /// violation > 1e−9.
    pub violated: bool,
}

/// Evaluate the chain inequality.  The behavior must have exactly four
/// binary parties, ordered A, B, C, D.
pub fn eval_ineq1(b: &Behavior) -> Result<Ineq1Report, String> {
    if b.arities().len() != 4 {
        return Err(format!(
            "chain inequality needs 4 parties, behavior has {}",
            b.arities().len()
        ));
    }
    if let Some(k) = b.arities().iter().position(|&a| a != 2) {
        return Err(format!(
            "chain inequality needs binary outcomes, party {k} has arity {}",
            b.arities()[k]
        ));
    }
    let lhs = b.correlator(&[0, 1]) + b.correlator(&[1, 2]) + b.correlator(&[2, 3]);
    let mean_a = b.correlator(&[0]);
    let mean_d = b.correlator(&[3]);
    let rhs = mean_a * mean_d / 2.0 + 1.5 * 3.0_f64.sqrt();
    let violation = lhs - rhs;
    Ok(Ineq1Report {
        lhs,
        rhs,
        violation,
        violated: violation > REPORT_TOL,
    })
}

/// The perfectly coordinated uniform bit: p(0000) = p(1111) = 1/2.
pub fn shared_random_bit() -> Behavior {
    let mut probs = vec![0.0; 16];
    probs[0] = 0.5;
    probs[15] = 0.5;
    Behavior::new(vec![2, 2, 2, 2], probs).expect("valid by construction")
}
