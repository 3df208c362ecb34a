//! Deterministic text dumps of problems and solutions for cross-validation
//! with third-party solvers.
//!
//! Format: a `problem` block lists the dimension, then one `constraint` line
//! per equality as `(i,j)*coeff ... = rhs`, then an `objective` line in the
//! same entry syntax. A `solution` block lists status, value, and the primal
//! matrix as nested arrays of numbers. Floats are printed with 17 significant
//! digits (shortest round-trip).

use crate::problem::SdpProblem;
use crate::solve::{SdpSolution, SdpStatus};

fn fmt_f(x: f64) -> String {
    // Shortest representation that round-trips.
    let mut s = format!("{}", x);
    if s.parse::<f64>().map(|v| v == x).unwrap_or(false) {
        return s;
    }
    s = format!("{:e}", x);
    s
}

/// Dump a problem in the flat text format described in the module docs.
pub fn dump_problem(p: &SdpProblem) -> String {
    let mut out = String::new();
    out.push_str("sdp-problem\n");
    out.push_str(&format!("n {}\n", p.n()));
    out.push_str(&format!("constraints {}\n", p.num_constraints()));
    for k in 0..p.num_constraints() {
        let a = p.constraint_matrix(k);
        let mut terms: Vec<String> = Vec::new();
        for i in 0..p.n() {
            for j in i..p.n() {
                let c = if i == j { a[(i, i)] } else { 2.0 * a[(i, j)] };
                if c != 0.0 {
                    terms.push(format!("({},{})*{}", i, j, fmt_f(c)));
                }
            }
        }
        out.push_str(&format!(
            "constraint {} : {} = {}\n",
            k,
            terms.join(" + "),
            fmt_f(p.rhs()[k])
        ));
    }
    let obj = p.objective_matrix();
    let mut terms: Vec<String> = Vec::new();
    for i in 0..p.n() {
        for j in i..p.n() {
            let c = if i == j { obj[(i, i)] } else { 2.0 * obj[(i, j)] };
            if c != 0.0 {
                terms.push(format!("({},{})*{}", i, j, fmt_f(c)));
            }
        }
    }
    out.push_str(&format!("objective : {}\n", terms.join(" + ")));
    out
}

/// Dump a solution; the primal matrix uses nested-array number rows.
pub fn dump_solution(sol: &SdpSolution) -> String {
    let mut out = String::new();
    out.push_str("sdp-solution\n");
    let status = match sol.status {
        SdpStatus::Optimal => "optimal",
        SdpStatus::Infeasible => "infeasible",
        SdpStatus::MaxIterations => "max-iterations",
    };
    out.push_str(&format!("status {}\n", status));
    out.push_str(&format!("value {}\n", fmt_f(sol.value)));
    out.push_str(&format!("iterations {}\n", sol.iterations));
    out.push_str("primal [\n");
    for i in 0..sol.primal.nrows() {
        let row: Vec<String> = (0..sol.primal.ncols())
            .map(|j| fmt_f(sol.primal[(i, j)]))
            .collect();
        out.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    out.push_str("]\n");
    out.push_str(&format!(
        "dual [{}]\n",
        sol.dual.iter().map(|v| fmt_f(*v)).collect::<Vec<_>>().join(", ")
    ));
    if let Some(cert) = &sol.certificate {
        out.push_str(&format!(
            "certificate margin {} psd_defect {} y [{}]\n",
            fmt_f(cert.margin),
            fmt_f(cert.psd_defect),
            cert.y.iter().map(|v| fmt_f(*v)).collect::<Vec<_>>().join(", ")
        ));
    }
    out
}
