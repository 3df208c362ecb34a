//! Problem container, entry semantics, and constraint preprocessing.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::certificate::InfeasibilityCertificate;

/// Errors surfaced while building or validating a problem.
#[derive(Debug, Error)]
pub enum SdpError {
    #[error("matrix entry ({0}, {1}) is outside the {2}x{2} variable")]
    EntryOutOfRange(usize, usize, usize),
    #[error("constraint {0} has no entries")]
    EmptyConstraint(usize),
    #[error("point has dimension {0}x{1}, expected {2}x{2}")]
    DimensionMismatch(usize, usize, usize),
}

/// A linear equality constraint `sum c_e * X[e] = rhs` over upper-triangle
/// entries of the symmetric variable.
#[derive(Debug, Clone)]
struct Constraint {
    /// Entries `((i, j), c)` with `i <= j`; `c` multiplies the single matrix
    /// entry `X[i][j]` (equivalently `X[j][i]`), counted once.
    entries: Vec<((usize, usize), f64)>,
    rhs: f64,
}

/// `maximize <C, X>  s.t.  <A_k, X> = b_k, X ⪰ 0` over symmetric `n×n` `X`.
///
/// Entry semantics: a coefficient `c` on `(i, j)` means `c * X[i][j]` where
/// the unordered pair is counted once (so the internal symmetric coefficient
/// matrix carries `c/2` on each of the two mirrored off-diagonal slots).
#[derive(Debug, Clone)]
pub struct SdpProblem {
    n: usize,
    constraints: Vec<Constraint>,
    objective: Vec<((usize, usize), f64)>,
}

impl SdpProblem {
    /// New problem over a symmetric `n×n` PSD variable, zero objective.
    pub fn new(n: usize) -> Self {
        SdpProblem {
            n,
            constraints: Vec::new(),
            objective: Vec::new(),
        }
    }

    /// Variable dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of constraints (before preprocessing).
    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Right-hand sides of all constraints, in insertion order.
    pub fn rhs(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.rhs).collect()
    }

    /// Entries and right-hand side of constraint `k` (normalized form:
    /// `i <= j`, duplicates coalesced, sorted by coordinate).
    pub fn constraint(&self, k: usize) -> (&[((usize, usize), f64)], f64) {
        (&self.constraints[k].entries, self.constraints[k].rhs)
    }

    /// Objective entries in normalized form.
    pub fn objective(&self) -> &[((usize, usize), f64)] {
        &self.objective
    }

    /// Add `sum c * X[i][j] = rhs`. Indices are normalized to `i <= j` and
    /// duplicate coordinates are coalesced by summing coefficients.
    pub fn add_constraint(&mut self, entries: &[((usize, usize), f64)], rhs: f64) {
        self.constraints.push(Constraint {
            entries: normalize_entries(entries),
            rhs,
        });
    }

    /// Set the objective `maximize sum c * X[i][j]` (same entry semantics).
    pub fn set_objective(&mut self, entries: &[((usize, usize), f64)]) {
        self.objective = normalize_entries(entries);
    }

    /// Check entry ranges and non-emptiness of every constraint.
    pub fn validate(&self) -> Result<(), SdpError> {
        for (k, c) in self.constraints.iter().enumerate() {
            if c.entries.is_empty() {
                return Err(SdpError::EmptyConstraint(k));
            }
            for &((i, j), _) in &c.entries {
                if i >= self.n || j >= self.n {
                    return Err(SdpError::EntryOutOfRange(i, j, self.n));
                }
            }
        }
        for &((i, j), _) in &self.objective {
            if i >= self.n || j >= self.n {
                return Err(SdpError::EntryOutOfRange(i, j, self.n));
            }
        }
        Ok(())
    }

    /// Dense symmetric coefficient matrix of constraint `k`.
    pub(crate) fn constraint_matrix(&self, k: usize) -> DMatrix<f64> {
        entries_to_matrix(self.n, &self.constraints[k].entries)
    }

    /// Dense symmetric objective matrix (maximize orientation).
    pub(crate) fn objective_matrix(&self) -> DMatrix<f64> {
        entries_to_matrix(self.n, &self.objective)
    }

    /// Objective value `<C, M>` at a symmetric point.
    pub fn objective_value(&self, m: &DMatrix<f64>) -> f64 {
        self.objective
            .iter()
            .map(|&((i, j), c)| if i == j { c * m[(i, j)] } else { c * 0.5 * (m[(i, j)] + m[(j, i)]) })
            .sum()
    }

    /// Report how close `m` is to being feasible: the largest constraint
    /// violation and the smallest eigenvalue, plus the objective at `m`.
    pub fn check_feasible_point(&self, m: &DMatrix<f64>) -> Result<FeasibilityReport, SdpError> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(SdpError::DimensionMismatch(m.nrows(), m.ncols(), self.n));
        }
        let sym = (m + m.transpose()) * 0.5;
        let mut max_violation: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.entries.iter().map(|&((i, j), co)| co * sym[(i, j)]).sum();
            max_violation = max_violation.max((lhs - c.rhs).abs());
        }
        let eig = sym.clone().symmetric_eigen();
        let min_eigenvalue = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(FeasibilityReport {
            max_violation,
            min_eigenvalue,
            objective: self.objective_value(&sym),
        })
    }
}

/// Result of [`SdpProblem::check_feasible_point`].
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    /// Largest `|<A_k, M> - b_k|` over all constraints.
    pub max_violation: f64,
    /// Smallest eigenvalue of the symmetrized point.
    pub min_eigenvalue: f64,
    /// Objective value `<C, M>`.
    pub objective: f64,
}

fn normalize_entries(entries: &[((usize, usize), f64)]) -> Vec<((usize, usize), f64)> {
    let mut map: Vec<((usize, usize), f64)> = Vec::with_capacity(entries.len());
    for &((i, j), c) in entries {
        let key = if i <= j { (i, j) } else { (j, i) };
        match map.iter_mut().find(|(k, _)| *k == key) {
            Some((_, acc)) => *acc += c,
            None => map.push((key, c)),
        }
    }
    map.sort_by_key(|&(k, _)| k);
    map
}

fn entries_to_matrix(n: usize, entries: &[((usize, usize), f64)]) -> DMatrix<f64> {
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &((i, j), c) in entries {
        if i == j {
            a[(i, i)] += c;
        } else {
            a[(i, j)] += 0.5 * c;
            a[(j, i)] += 0.5 * c;
        }
    }
    a
}

/// Pack a symmetric matrix into a vector with off-diagonal entries scaled by
/// `sqrt(2)`, so Euclidean inner products of packed vectors equal Frobenius
/// inner products of the matrices.
pub(crate) fn svec(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let mut v = DVector::<f64>::zeros(n * (n + 1) / 2);
    let s2 = std::f64::consts::SQRT_2;
    let mut t = 0;
    for i in 0..n {
        for j in i..n {
            v[t] = if i == j { m[(i, i)] } else { s2 * m[(i, j)] };
            t += 1;
        }
    }
    v
}

/// Outcome of constraint preprocessing: a maximal independent subset of the
/// constraint rows, or an immediate infeasibility certificate when a dropped
/// (dependent) row contradicts the rows that span it.
pub(crate) struct Preprocessed {
    /// Indices (into the original constraint list) of the kept rows.
    pub kept: Vec<usize>,
    /// Dense symmetric coefficient matrices of the kept rows.
    pub a_mats: Vec<DMatrix<f64>>,
    /// Right-hand sides of the kept rows.
    pub b: DVector<f64>,
    /// Set when an inconsistent dependent row was found.
    pub early_certificate: Option<InfeasibilityCertificate>,
}

/// Modified Gram–Schmidt over svec'd constraint rows. Keeps rows whose
/// residual after projection exceeds a relative rank tolerance; for each
/// dropped row, reconstructs it as a combination of kept rows and checks the
/// right-hand sides for consistency.
pub(crate) fn preprocess(p: &SdpProblem) -> Preprocessed {
    let m = p.num_constraints();
    let rank_tol = 1e-10;
    let consistency_tol = 1e-8;

    let mut kept: Vec<usize> = Vec::new();
    let mut a_mats: Vec<DMatrix<f64>> = Vec::new();
    let mut b_kept: Vec<f64> = Vec::new();
    // Orthonormal basis vectors q_t and the coefficients expressing each q_t
    // as a combination of kept original rows.
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut basis_in_kept: Vec<Vec<f64>> = Vec::new();

    for k in 0..m {
        let a = p.constraint_matrix(k);
        let row = svec(&a);
        let scale = row.norm().max(1.0);

        // Project out the existing basis (twice, for numerical stability),
        // accumulating the total projection coefficients.
        let mut resid = row.clone();
        let mut proj = vec![0.0f64; basis.len()];
        for _pass in 0..2 {
            for (t, q) in basis.iter().enumerate() {
                let c = resid.dot(q);
                proj[t] += c;
                resid -= q * c;
            }
        }

        if resid.norm() > rank_tol * scale {
            // Independent: keep.
            let nrm = resid.norm();
            let q = &resid / nrm;
            // q = (row - sum proj[t] q_t) / nrm, expressed over kept rows.
            let mut coeffs = vec![0.0f64; kept.len() + 1];
            coeffs[kept.len()] = 1.0 / nrm;
            for (t, &c) in proj.iter().enumerate() {
                for (r, &w) in basis_in_kept[t].iter().enumerate() {
                    coeffs[r] -= c * w / nrm;
                }
            }
            kept.push(k);
            a_mats.push(a);
            b_kept.push(p.constraints[k].rhs);
            basis.push(q);
            basis_in_kept.push(coeffs);
        } else {
            // Dependent: row = sum_t proj[t] q_t = sum_r c_orig[r] a_kept[r].
            let mut c_orig = vec![0.0f64; kept.len()];
            for (t, &c) in proj.iter().enumerate() {
                for (r, &w) in basis_in_kept[t].iter().enumerate() {
                    c_orig[r] += c * w;
                }
            }
            let combo_rhs: f64 = c_orig.iter().zip(&b_kept).map(|(c, b)| c * b).sum();
            let rhs = p.constraints[k].rhs;
            let coeff_scale: f64 = c_orig.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
            let diff = rhs - combo_rhs;
            if diff.abs() > consistency_tol * coeff_scale * (1.0 + rhs.abs()) {
                // Row is a combination of kept rows but the right-hand sides
                // disagree: that combination is itself a certificate.
                let mut y = vec![0.0f64; m];
                y[k] = 1.0;
                for (r, &c) in c_orig.iter().enumerate() {
                    y[kept[r]] = -c;
                }
                // Orient so that b'y < 0, then normalize to max-norm 1.
                let sign = if diff > 0.0 { -1.0 } else { 1.0 };
                let max_abs = y.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
                for v in y.iter_mut() {
                    *v *= sign / max_abs;
                }
                let margin = diff.abs() / max_abs;
                let cert = InfeasibilityCertificate {
                    y,
                    margin,
                    psd_defect: 0.0,
                };
                return Preprocessed {
                    kept,
                    a_mats,
                    b: DVector::from_vec(b_kept),
                    early_certificate: Some(cert),
                };
            }
        }
    }

    Preprocessed {
        kept,
        a_mats,
        b: DVector::from_vec(b_kept),
        early_certificate: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svec_preserves_inner_products() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]);
        let b = DMatrix::from_row_slice(2, 2, &[4.0, -1.0, -1.0, 0.5]);
        let frob = (a.clone() * b.clone()).trace();
        let packed = svec(&a).dot(&svec(&b));
        assert!((frob - packed).abs() < 1e-12);
    }

    #[test]
    fn entry_semantics_count_pairs_once() {
        let mut p = SdpProblem::new(2);
        p.add_constraint(&[((0, 1), 1.0)], 0.7);
        let a = p.constraint_matrix(0);
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.7, 1.0]);
        let val = (a * x).trace();
        assert!((val - 0.7).abs() < 1e-12);
    }

    #[test]
    fn preprocess_drops_consistent_duplicates() {
        let mut p = SdpProblem::new(2);
        p.add_constraint(&[((0, 0), 1.0)], 1.0);
        p.add_constraint(&[((1, 1), 1.0)], 1.0);
        p.add_constraint(&[((0, 0), 2.0)], 2.0); // scaled duplicate of row 0
        let pre = preprocess(&p);
        assert!(pre.early_certificate.is_none());
        assert_eq!(pre.kept, vec![0, 1]);
    }

    #[test]
    fn preprocess_certifies_contradiction() {
        let mut p = SdpProblem::new(1);
        p.add_constraint(&[((0, 0), 1.0)], 1.0);
        p.add_constraint(&[((0, 0), 1.0)], 2.0);
        let pre = preprocess(&p);
        let cert = pre.early_certificate.expect("contradiction must be caught");
        assert!(cert.margin > 0.9 && cert.margin < 1.1);
        let bty: f64 = cert.y.iter().zip(p.rhs()).map(|(y, b)| y * b).sum();
        assert!(bty < 0.0);
    }
}
