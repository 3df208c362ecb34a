//! Complex linear algebra helpers: predicates, Kronecker products, and
//! tensor-factor permutation primitives used by the staged simulator.
//!
//! States are vectors over tensor factors in row-major convention: the
//! first factor is the most significant digit of the linear index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C = Complex64;
pub type CMat = DMatrix<C>;
pub type CVec = DVector<C>;

/// Default tolerance for structural matrix predicates.
pub const MATRIX_TOL: f64 = 1e-10;

pub fn cr(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn ci(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Identity matrix of size n.
pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Kronecker product (first factor most significant).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// Largest absolute entry difference between two equally-shaped matrices.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// `m` is an isometry: columns orthonormal (`m† m = I`); square isometries
/// are unitaries.
pub fn is_isometry(m: &CMat, tol: f64) -> bool {
    if m.nrows() < m.ncols() {
        return false;
    }
    let g = m.adjoint() * m;
    max_abs_diff(&g, &eye(m.ncols())) <= tol
}

pub fn is_unitary(m: &CMat, tol: f64) -> bool {
    m.is_square() && is_isometry(m, tol)
}

/// Hermitian idempotent.
pub fn is_projector(m: &CMat, tol: f64) -> bool {
    is_hermitian(m, tol) && max_abs_diff(&(m * m), m) <= tol
}

/// Hermitian, unit trace, positive semidefinite (smallest eigenvalue no
/// lower than `-tol`).
pub fn is_density(m: &CMat, tol: f64) -> bool {
    if !is_hermitian(m, tol) {
        return false;
    }
    if (m.trace().re - 1.0).abs() > tol || m.trace().im.abs() > tol {
        return false;
    }
    min_eigenvalue_hermitian(m) >= -tol
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_hermitian(m: &CMat) -> f64 {
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    sym.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn is_unit_vector(v: &CVec, tol: f64) -> bool {
    (v.norm() - 1.0).abs() <= tol
}

/// Outer product |v><v|.
pub fn projector_onto(v: &CVec) -> CMat {
    let m = CMat::from_column_slice(v.len(), 1, v.as_slice());
    &m * m.adjoint()
}

/// Reorder the tensor factors of a state vector.  `dims` are the current
/// factor dimensions; `perm[k]` names the old position of the factor that
/// moves to new position `k`.
pub fn permute_state_factors(state: &CVec, dims: &[usize], perm: &[usize]) -> CVec {
    debug_assert_eq!(dims.len(), perm.len());
    let map = permutation_index_map(dims, perm);
    let mut out = CVec::zeros(state.len());
    for (new_idx, &old_idx) in map.iter().enumerate() {
        out[new_idx] = state[old_idx];
    }
    out
}

/// Reorder the tensor factors of a density matrix on both sides.
pub fn permute_density_factors(rho: &CMat, dims: &[usize], perm: &[usize]) -> CMat {
    let map = permutation_index_map(dims, perm);
    let n = rho.nrows();
    let mut out = CMat::zeros(n, n);
    for (ni, &oi) in map.iter().enumerate() {
        for (nj, &oj) in map.iter().enumerate() {
            out[(ni, nj)] = rho[(oi, oj)];
        }
    }
    out
}

/// Explicit matrix of a tensor-factor permutation: `P v` equals
/// [`permute_state_factors`]`(v, dims, perm)`.
pub fn permutation_matrix(dims: &[usize], perm: &[usize]) -> CMat {
    let map = permutation_index_map(dims, perm);
    let n = map.len();
    let mut p = CMat::zeros(n, n);
    for (new_idx, &old_idx) in map.iter().enumerate() {
        p[(new_idx, old_idx)] = cr(1.0);
    }
    p
}

/// For each new linear index, the old linear index it reads from.
fn permutation_index_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let n: usize = dims.iter().product();
    // Row-major strides in the old layout.
    let mut old_strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        old_strides[k] = old_strides[k + 1] * dims[k + 1];
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    // Stride in the old layout of the factor sitting at each new position.
    let strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let f = new_dims.len();
    let mut map = vec![0usize; n];
    let mut digits = vec![0usize; f];
    let mut old_idx = 0usize;
    for slot in map.iter_mut() {
        *slot = old_idx;
        // Odometer increment of the new-layout digits, last factor fastest,
        // keeping old_idx = sum(digit[k] * strides[k]) up to date.
        for k in (0..f).rev() {
            digits[k] += 1;
            old_idx += strides[k];
            if digits[k] < new_dims[k] {
                break;
            }
            old_idx -= digits[k] * strides[k];
            digits[k] = 0;
        }
    }
    map
}

/// Apply `op` (shape `dout x din`) to the leading factors of `state`,
/// viewed as a `(din, rest)` array.  Returns a vector of length
/// `dout * rest`.
pub fn apply_to_front(state: &CVec, din: usize, op: &CMat) -> CVec {
    let rest = state.len() / din;
    debug_assert_eq!(din * rest, state.len());
    debug_assert_eq!(op.ncols(), din);
    let dout = op.nrows();
    let mut out = CVec::zeros(dout * rest);
    let sv = state.as_slice();
    let ov = out.as_mut_slice();
    for o in 0..dout {
        let dst = &mut ov[o * rest..(o + 1) * rest];
        for i in 0..din {
            let c = op[(o, i)];
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let src = &sv[i * rest..(i + 1) * rest];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += c * *s;
            }
        }
    }
    out
}

/// Apply `op` on the leading factors of a density matrix:
/// `rho -> (op ⊗ I) rho (op ⊗ I)†` without forming the Kronecker product.
pub fn apply_to_front_density(rho: &CMat, din: usize, op: &CMat) -> CMat {
    let n = rho.nrows();
    let rest = n / din;
    let dout = op.nrows();
    // Left multiply: out1[o*rest + r, j] = sum_i op[o,i] rho[i*rest + r, j].
    let mut out1 = CMat::zeros(dout * rest, n);
    for j in 0..n {
        for o in 0..dout {
            for r in 0..rest {
                let mut acc = C::new(0.0, 0.0);
                for i in 0..din {
                    acc += op[(o, i)] * rho[(i * rest + r, j)];
                }
                out1[(o * rest + r, j)] = acc;
            }
        }
    }
    // Right multiply by (op ⊗ I)†.
    let mut out = CMat::zeros(dout * rest, dout * rest);
    for a in 0..dout * rest {
        for o in 0..dout {
            for r in 0..rest {
                let mut acc = C::new(0.0, 0.0);
                for i in 0..din {
                    acc += out1[(a, i * rest + r)] * op[(o, i)].conj();
                }
                out[(a, o * rest + r)] = acc;
            }
        }
    }
    out
}

/// Apply a square `op` to the factors at `positions` (in the operator's
/// input order), leaving the factor layout unchanged.
pub fn apply_on_positions(state: &CVec, dims: &[usize], positions: &[usize], op: &CMat) -> CVec {
    let perm = front_permutation(dims.len(), positions);
    let din: usize = positions.iter().map(|&p| dims[p]).product();
    debug_assert_eq!(op.nrows(), din, "operator must be square on its factors");
    let moved = permute_state_factors(state, dims, &perm);
    let applied = apply_to_front(&moved, din, op);
    let moved_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let inv = invert_permutation(&perm);
    permute_state_factors(&applied, &moved_dims, &inv)
}

/// Same as [`apply_on_positions`] for density matrices.
pub fn apply_on_positions_density(
    rho: &CMat,
    dims: &[usize],
    positions: &[usize],
    op: &CMat,
) -> CMat {
    let perm = front_permutation(dims.len(), positions);
    let din: usize = positions.iter().map(|&p| dims[p]).product();
    let moved = permute_density_factors(rho, dims, &perm);
    let applied = apply_to_front_density(&moved, din, op);
    let moved_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let inv = invert_permutation(&perm);
    permute_density_factors(&applied, &moved_dims, &inv)
}

/// Permutation bringing `positions` (in order) to the front, everything
/// else after in original order.
pub fn front_permutation(n: usize, positions: &[usize]) -> Vec<usize> {
    let mut perm: Vec<usize> = positions.to_vec();
    let chosen: std::collections::BTreeSet<usize> = positions.iter().copied().collect();
    perm.extend((0..n).filter(|k| !chosen.contains(k)));
    perm
}

pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (new_pos, &old_pos) in perm.iter().enumerate() {
        inv[old_pos] = new_pos;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize, k: usize) -> CVec {
        let mut v = CVec::zeros(n);
        v[k] = cr(1.0);
        v
    }

    #[test]
    fn predicates_hold_on_standard_objects() {
        let h = CMat::from_row_slice(2, 2, &[cr(1.0), cr(1.0), cr(1.0), cr(-1.0)])
            / C::new(2.0_f64.sqrt(), 0.0);
        assert!(is_unitary(&h, MATRIX_TOL));
        assert!(is_hermitian(&h, MATRIX_TOL));
        let p = projector_onto(&(basis(2, 0)));
        assert!(is_projector(&p, MATRIX_TOL));
        assert!(is_density(&(eye(4) / cr(4.0)), MATRIX_TOL));
        assert!(!is_density(&eye(4), MATRIX_TOL));
        let tall = CMat::from_row_slice(3, 1, &[cr(1.0), cr(0.0), cr(0.0)]);
        assert!(is_isometry(&tall, MATRIX_TOL));
        assert!(!is_unitary(&tall, MATRIX_TOL));
    }

    #[test]
    fn permutation_round_trips() {
        // Factors of dims [2,3,2]; permute and invert.
        let dims = [2usize, 3, 2];
        let n: usize = dims.iter().product();
        let v = CVec::from_fn(n, |k, _| ci(k as f64, -(k as f64) / 3.0));
        let perm = [2usize, 0, 1];
        let w = permute_state_factors(&v, &dims, &perm);
        let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
        let back = permute_state_factors(&w, &new_dims, &invert_permutation(&perm));
        assert!((&v - &back).norm() < 1e-15);
        // Spot-check a single amplitude: old index (i,j,k) = i*6 + j*2 + k
        // moves to new order (k,i,j) = k*6 + i*3 + j.
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..2 {
                    assert_eq!(w[k * 6 + i * 3 + j], v[i * 6 + j * 2 + k]);
                }
            }
        }
    }

    #[test]
    fn apply_on_positions_matches_explicit_kron() {
        let dims = [2usize, 2, 2];
        let n = 8;
        let v = CVec::from_fn(n, |k, _| ci((k + 1) as f64, (k % 3) as f64));
        let x = CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
        let z = CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]);
        let op = kron(&x, &z);
        // Acting on factors (2, 0) in that order: op = X on factor 2, Z on factor 0.
        let got = apply_on_positions(&v, &dims, &[2, 0], &op);
        let want = kron(&kron(&z, &eye(2)), &x) * &v;
        assert!((&got - &want).norm() < 1e-13);
    }

    #[test]
    fn density_application_matches_pure_application() {
        let dims = [2usize, 3];
        let n = 6;
        let v = CVec::from_fn(n, |k, _| ci((2 * k + 1) as f64 / 10.0, (k * k) as f64 / 7.0));
        let u = CMat::from_fn(3, 3, |i, j| ci((i + j) as f64 / 3.0, (i as f64) - (j as f64)));
        let rho = projector_onto(&v);
        let got = apply_on_positions_density(&rho, &dims, &[1], &u);
        let pv = apply_on_positions(&v, &dims, &[1], &u);
        let want = projector_onto(&pv);
        assert!(max_abs_diff(&got, &want) < 1e-12);
    }
}
