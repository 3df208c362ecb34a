//! Dense semidefinite programming for small problems.
//!
//! Solves `maximize <C, X>  subject to  <A_k, X> = b_k, X ⪰ 0` where `X` is a
//! symmetric `n×n` matrix variable (`n ≤ ~200`), and produces independently
//! re-verifiable infeasibility certificates when no feasible `X` exists.
//!
//! The algorithm is a homogeneous self-dual primal-dual path-following
//! interior-point method with Nesterov–Todd scaling and a Mehrotra
//! predictor-corrector step. The self-dual embedding detects optimality and
//! primal infeasibility on a single code path. Constraints are preprocessed
//! into a maximal linearly independent subset; a dropped row that is
//! inconsistent with the kept rows immediately yields a certificate.
//!
//! Tolerances are centralized in [`SolveOptions`]: feasibility `1e-8`,
//! relative duality gap `1e-7`, certificate margin `1e-9`.

mod certificate;
mod dump;
mod problem;
mod solve;

pub use certificate::{verify_certificate, CertificateCheck, InfeasibilityCertificate};
pub use dump::{dump_problem, dump_solution};
pub use problem::{FeasibilityReport, SdpError, SdpProblem};
pub use solve::{infeasibility_certificate, solve, SdpSolution, SdpStatus, SolveOptions};
