//! Homogeneous self-dual interior-point iteration.
//!
//! The public problem is `maximize <C, X>`; internally the solver minimizes
//! `<-C, X>`. The homogeneous embedding tracks `(X, y, Z, tau, kappa)` with
//! `X, Z ⪰ 0`, `tau, kappa > 0`, driving the residuals
//!
//! ```text
//!   rp = A(X) - tau*b
//!   rd = A*(y) + Z - tau*C_int
//!   rg = -<C_int, X> + b·y - kappa
//! ```
//!
//! to zero along the central path. `tau -> positive` yields an optimal pair
//! `(X/tau, y/tau)`; `tau -> 0` with `kappa > 0` and `b·y > 0` yields a
//! primal infeasibility ray which is re-verified by direct arithmetic before
//! being reported.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::certificate::{verify_certificate, InfeasibilityCertificate};
use crate::problem::{preprocess, Preprocessed, SdpProblem};

/// Centralized tolerances and iteration budget.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Maximum interior-point iterations.
    pub max_iters: usize,
    /// Primal/dual feasibility tolerance (relative).
    pub tol_feas: f64,
    /// Relative duality-gap tolerance.
    pub tol_gap: f64,
    /// Minimum accepted certificate margin.
    pub cert_margin: f64,
    /// Reserved for optional random restarts; the default initialization is
    /// deterministic (identity-based central point) and ignores the seed.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 100,
            tol_feas: 1e-8,
            tol_gap: 1e-7,
            cert_margin: 1e-9,
            seed: 0,
        }
    }
}

/// Exit condition of [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    /// Converged to the stated tolerances.
    Optimal,
    /// A verified infeasibility certificate was produced.
    Infeasible,
    /// Iteration budget exhausted; fields hold the best candidate found.
    MaxIterations,
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Objective value `<C, X>` of the primal candidate (maximize
    /// orientation). `NaN` when status is `Infeasible`.
    pub value: f64,
    /// Primal candidate `X` (zero matrix when infeasible).
    pub primal: DMatrix<f64>,
    /// Dual multipliers over the original constraint list (entries for
    /// preprocessing-dropped rows are zero). At optimality they satisfy
    /// `sum_k y_k A_k ⪰ C` and `b·y = value` up to tolerances.
    pub dual: Vec<f64>,
    /// Present exactly when status is `Infeasible`.
    pub certificate: Option<InfeasibilityCertificate>,
    pub iterations: usize,
    /// Number of times the Schur complement needed diagonal regularization.
    pub regularization_retries: usize,
    /// `||A(X) - b|| / (1 + ||b||)` at the reported candidate.
    pub primal_residual: f64,
    /// Dual feasibility residual at the reported candidate.
    pub dual_residual: f64,
    /// `|<C, X> - b·y|` at the reported candidate.
    pub duality_gap: f64,
}

struct Direction {
    dx: DMatrix<f64>,
    dy: DVector<f64>,
    dz: DMatrix<f64>,
    dtau: f64,
    dkap: f64,
}

/// Solve the problem. Deterministic for fixed inputs.
pub fn solve(p: &SdpProblem, opts: &SolveOptions) -> SdpSolution {
    p.validate().expect("SdpProblem failed validation");
    let n = p.n();
    let pre = preprocess(p);
    if let Some(cert) = &pre.early_certificate {
        let check = verify_certificate(p, cert, opts.cert_margin);
        let cert = InfeasibilityCertificate {
            y: cert.y.clone(),
            margin: check.margin,
            psd_defect: check.psd_defect,
        };
        return SdpSolution {
            status: SdpStatus::Infeasible,
            value: f64::NAN,
            primal: DMatrix::zeros(n, n),
            dual: vec![0.0; p.num_constraints()],
            certificate: Some(cert),
            iterations: 0,
            regularization_retries: 0,
            primal_residual: f64::NAN,
            dual_residual: f64::NAN,
            duality_gap: f64::NAN,
        };
    }

    let a_mats = &pre.a_mats;
    let m = a_mats.len();
    let b = pre.b.clone();
    let c_pub = p.objective_matrix();
    let c = -&c_pub; // internal minimize orientation
    let b_norm = b.norm();
    let c_norm = c.norm();

    let mut x = DMatrix::<f64>::identity(n, n);
    let mut z = DMatrix::<f64>::identity(n, n);
    let mut y = DVector::<f64>::zeros(m);
    let mut tau = 1.0f64;
    let mut kappa = 1.0f64;
    let mut retries = 0usize;

    let nf = n as f64;
    let mut best = None;

    for iter in 0..=opts.max_iters {
        // --- residuals -----------------------------------------------------
        let ax = a_apply(a_mats, &x);
        let rp = &ax - &b * tau;
        let rd = a_adjoint(a_mats, n, &y) + &z - &c * tau;
        let rg = -c.dot(&x) + b.dot(&y) - kappa;
        let mu = (x.dot(&z) + tau * kappa) / (nf + 1.0);

        // --- candidate solution & optimality test --------------------------
        let xhat = &x / tau;
        let yhat = &y / tau;
        let zhat = &z / tau;
        let pres = (a_apply(a_mats, &xhat) - &b).norm() / (1.0 + b_norm);
        let dres = (a_adjoint(a_mats, n, &yhat) + &zhat - &c).norm() / (1.0 + c_norm);
        let pobj = c.dot(&xhat);
        let dobj = b.dot(&yhat);
        let gap_rel = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        best = Some((xhat.clone(), yhat.clone(), pres, dres, (pobj - dobj).abs()));

        if pres <= opts.tol_feas && dres <= opts.tol_feas && gap_rel <= opts.tol_gap {
            let value = c_pub.dot(&xhat);
            let mut dual = vec![0.0f64; p.num_constraints()];
            for (r, &orig) in pre.kept.iter().enumerate() {
                dual[orig] = -yhat[r];
            }
            return SdpSolution {
                status: SdpStatus::Optimal,
                value,
                primal: xhat,
                dual,
                certificate: None,
                iterations: iter,
                regularization_retries: retries,
                primal_residual: pres,
                dual_residual: dres,
                duality_gap: (pobj - dobj).abs(),
            };
        }

        // --- infeasibility detection ---------------------------------------
        if tau < 1e-2 * kappa.min(1.0) {
            if let Some(cert) = try_primal_certificate(p, &pre, &y, opts) {
                return SdpSolution {
                    status: SdpStatus::Infeasible,
                    value: f64::NAN,
                    primal: DMatrix::zeros(n, n),
                    dual: vec![0.0; p.num_constraints()],
                    certificate: Some(cert),
                    iterations: iter,
                    regularization_retries: retries,
                    primal_residual: f64::NAN,
                    dual_residual: f64::NAN,
                    duality_gap: f64::NAN,
                };
            }
        }

        if iter == opts.max_iters || mu < 1e-16 || !mu.is_finite() {
            break;
        }

        // --- Nesterov-Todd scaling -----------------------------------------
        let lx = match chol_jitter(&x, &mut retries) {
            Some(l) => l,
            None => break,
        };
        let lz = match chol_jitter(&z, &mut retries) {
            Some(l) => l,
            None => break,
        };
        let lxm = lx.l();
        let lzm = lz.l();
        let svd = (lzm.transpose() * &lxm).svd(false, true);
        let vt = svd.v_t.as_ref().expect("svd v_t");
        let lam = svd.singular_values.clone();
        if lam.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
            break;
        }
        let mut vs = vt.transpose();
        for jcol in 0..n {
            let s = 1.0 / lam[jcol].sqrt();
            for irow in 0..n {
                vs[(irow, jcol)] *= s;
            }
        }
        let r = &lxm * &vs; // scaling factor: R' Z R = R^-1 X R^-T = diag(lam)
        let rt = r.transpose();

        let wmw = |mat: &DMatrix<f64>| -> DMatrix<f64> { &r * (&rt * mat * &r) * &rt };

        // --- Schur complement ----------------------------------------------
        let mut wa: Vec<DMatrix<f64>> = Vec::with_capacity(m);
        for ak in a_mats.iter() {
            wa.push(wmw(ak));
        }
        let mut g = DMatrix::<f64>::zeros(m, m);
        for l in 0..m {
            for k in 0..=l {
                let v = a_mats[k].dot(&wa[l]);
                g[(k, l)] = v;
                g[(l, k)] = v;
            }
        }
        let g_chol = if m > 0 {
            match chol_jitter(&g, &mut retries) {
                Some(ch) => Some(ch),
                None => break,
            }
        } else {
            None
        };

        let wcw = wmw(&c);
        let a_wcw = a_apply(a_mats, &wcw);
        let u = solve_schur(&g_chol, &(&b + &a_wcw));
        let wrdw = wmw(&rd);
        let a_wrdw = a_apply(a_mats, &wrdw);

        let ctx = NewtonCtx {
            a_mats,
            n,
            c: &c,
            b: &b,
            r: &r,
            rt: &rt,
            lam: &lam,
            g_chol: &g_chol,
            wcw: &wcw,
            u: &u,
            wrdw: &wrdw,
            a_wrdw: &a_wrdw,
            rp: &rp,
            rd: &rd,
            rg,
            tau,
            kappa,
        };

        // --- predictor ------------------------------------------------------
        let mut rhs_aff = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            rhs_aff[(i, i)] = -lam[i] * lam[i];
        }
        let aff = ctx.newton(1.0, &rhs_aff, -tau * kappa);
        let alpha_aff = step_length(&lx, &lz, &aff, tau, kappa).min(1.0);

        let mu_aff = ((&x + &aff.dx * alpha_aff).dot(&(&z + &aff.dz * alpha_aff))
            + (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkap))
            / (nf + 1.0);
        let sigma = (mu_aff / mu).max(0.0).min(1.0).powi(3);

        // --- corrector -------------------------------------------------------
        // Scaled affine products: dxs_aff = D_aff - dzs_aff exactly.
        let dzs_aff = &rt * &aff.dz * &r;
        let mut d_aff = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                d_aff[(i, j)] = 2.0 * rhs_aff[(i, j)] / (lam[i] + lam[j]);
            }
        }
        let dxs_aff = &d_aff - &dzs_aff;
        let cross = (&dxs_aff * &dzs_aff + &dzs_aff * &dxs_aff) * 0.5;
        let mut rhs_comb = -cross;
        for i in 0..n {
            rhs_comb[(i, i)] += sigma * mu - lam[i] * lam[i];
        }
        let gamma = 1.0 - sigma;
        let dir = ctx.newton(
            gamma,
            &rhs_comb,
            sigma * mu - tau * kappa - aff.dtau * aff.dkap,
        );

        let alpha = (0.98 * step_length(&lx, &lz, &dir, tau, kappa)).min(1.0);
        x += &dir.dx * alpha;
        y += &dir.dy * alpha;
        z += &dir.dz * alpha;
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkap;
        x = (&x + x.transpose()) * 0.5;
        z = (&z + z.transpose()) * 0.5;
    }

    // Iteration budget exhausted (or numerical breakdown): report the best
    // candidate with honest residuals.
    let (xhat, yhat, pres, dres, gap) = best.expect("at least one iterate");
    let value = c_pub.dot(&xhat);
    let mut dual = vec![0.0f64; p.num_constraints()];
    for (r, &orig) in pre.kept.iter().enumerate() {
        dual[orig] = -yhat[r];
    }
    SdpSolution {
        status: SdpStatus::MaxIterations,
        value,
        primal: xhat,
        dual,
        certificate: None,
        iterations: opts.max_iters,
        regularization_retries: retries,
        primal_residual: pres,
        dual_residual: dres,
        duality_gap: gap,
    }
}

/// Convenience wrapper: run the solver and return a verified infeasibility
/// certificate when one exists. `None` means "not proven infeasible at the
/// working tolerances", not "feasible".
pub fn infeasibility_certificate(
    p: &SdpProblem,
    opts: &SolveOptions,
) -> Option<InfeasibilityCertificate> {
    let sol = solve(p, opts);
    match sol.status {
        SdpStatus::Infeasible => sol.certificate,
        _ => None,
    }
}

struct NewtonCtx<'a> {
    a_mats: &'a [DMatrix<f64>],
    n: usize,
    c: &'a DMatrix<f64>,
    b: &'a DVector<f64>,
    r: &'a DMatrix<f64>,
    rt: &'a DMatrix<f64>,
    lam: &'a DVector<f64>,
    g_chol: &'a Option<Cholesky<f64, Dyn>>,
    wcw: &'a DMatrix<f64>,
    u: &'a DVector<f64>,
    wrdw: &'a DMatrix<f64>,
    a_wrdw: &'a DVector<f64>,
    rp: &'a DVector<f64>,
    rd: &'a DMatrix<f64>,
    rg: f64,
    tau: f64,
    kappa: f64,
}

impl<'a> NewtonCtx<'a> {
    /// Solve the Newton system for residual-reduction factor `gamma`, scaled
    /// complementarity right-hand side `rhs_s`, and tau-kappa target `rtk`.
    fn newton(&self, gamma: f64, rhs_s: &DMatrix<f64>, rtk: f64) -> Direction {
        let n = self.n;
        let mut d = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                d[(i, j)] = 2.0 * rhs_s[(i, j)] / (self.lam[i] + self.lam[j]);
            }
        }
        let rdr = self.r * &d * self.rt;
        let a_rdr = a_apply(self.a_mats, &rdr);

        let rhs_v = -(self.rp * gamma + &a_rdr + self.a_wrdw * gamma);
        let v = solve_schur(self.g_chol, &rhs_v);

        let wav = {
            let asv = a_adjoint(self.a_mats, n, &v);
            self.r * (self.rt * asv * self.r) * self.rt
        };
        let e = &rdr + self.wrdw * gamma + wav;
        let f = {
            let asu = a_adjoint(self.a_mats, n, self.u);
            self.r * (self.rt * asu * self.r) * self.rt - self.wcw
        };

        let num = -gamma * self.rg - self.b.dot(&v) + self.c.dot(&e) + rtk / self.tau;
        let den = self.b.dot(self.u) - self.c.dot(&f) + self.kappa / self.tau;
        let dtau = if den.abs() > 1e-14 { num / den } else { 0.0 };

        let dy = self.u * dtau + v;
        let dx = &e + &f * dtau;
        let dz = -(self.rd * gamma) - a_adjoint(self.a_mats, n, &dy) + self.c * dtau;
        let dkap = (rtk - self.kappa * dtau) / self.tau;
        let dx = (&dx + dx.transpose()) * 0.5;
        let dz = (&dz + dz.transpose()) * 0.5;
        Direction {
            dx,
            dy,
            dz,
            dtau,
            dkap,
        }
    }
}

fn a_apply(a_mats: &[DMatrix<f64>], mat: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(a_mats.len(), a_mats.iter().map(|a| a.dot(mat)))
}

fn a_adjoint(a_mats: &[DMatrix<f64>], n: usize, y: &DVector<f64>) -> DMatrix<f64> {
    let mut s = DMatrix::<f64>::zeros(n, n);
    for (k, a) in a_mats.iter().enumerate() {
        if y[k] != 0.0 {
            s += a * y[k];
        }
    }
    s
}

fn solve_schur(g_chol: &Option<Cholesky<f64, Dyn>>, rhs: &DVector<f64>) -> DVector<f64> {
    match g_chol {
        Some(ch) => ch.solve(rhs),
        None => DVector::zeros(0),
    }
}

/// Cholesky with escalating diagonal jitter; counts retries.
fn chol_jitter(mat: &DMatrix<f64>, retries: &mut usize) -> Option<Cholesky<f64, Dyn>> {
    let n = mat.nrows();
    if let Some(ch) = Cholesky::new(mat.clone()) {
        return Some(ch);
    }
    let base = mat.trace().abs().max(1.0) / n.max(1) as f64;
    let mut shift = 1e-12 * base;
    for _ in 0..3 {
        *retries += 1;
        let trial = mat + DMatrix::<f64>::identity(n, n) * shift;
        if let Some(ch) = Cholesky::new(trial) {
            return Some(ch);
        }
        shift *= 1e3;
    }
    None
}

/// Largest step keeping `X + a dX ⪰ 0`, `Z + a dZ ⪰ 0`, `tau, kappa > 0`.
fn step_length(
    lx: &Cholesky<f64, Dyn>,
    lz: &Cholesky<f64, Dyn>,
    dir: &Direction,
    tau: f64,
    kappa: f64,
) -> f64 {
    let mut alpha = f64::INFINITY;
    alpha = alpha.min(psd_step(lx, &dir.dx));
    alpha = alpha.min(psd_step(lz, &dir.dz));
    if dir.dtau < 0.0 {
        alpha = alpha.min(-tau / dir.dtau);
    }
    if dir.dkap < 0.0 {
        alpha = alpha.min(-kappa / dir.dkap);
    }
    alpha
}

/// Max step `a` with `X + a dX ⪰ 0`, computed from `λ_min(L^-1 dX L^-T)`.
fn psd_step(lfac: &Cholesky<f64, Dyn>, dx: &DMatrix<f64>) -> f64 {
    let l = lfac.l();
    let t1 = match l.solve_lower_triangular(dx) {
        Some(t) => t,
        None => return 0.0,
    };
    let msym = match l.solve_lower_triangular(&t1.transpose()) {
        Some(t) => t,
        None => return 0.0,
    };
    let msym = (&msym + msym.transpose()) * 0.5;
    let eig = msym.symmetric_eigen();
    let lmin = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lmin >= -1e-14 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

/// Attempt to turn the current dual iterate into a verified primal
/// infeasibility certificate.
fn try_primal_certificate(
    p: &SdpProblem,
    pre: &Preprocessed,
    y_kept: &DVector<f64>,
    opts: &SolveOptions,
) -> Option<InfeasibilityCertificate> {
    if pre.b.dot(y_kept) <= 0.0 {
        return None;
    }
    let max_abs = y_kept.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if max_abs <= 0.0 {
        return None;
    }
    let mut y = vec![0.0f64; p.num_constraints()];
    for (r, &orig) in pre.kept.iter().enumerate() {
        y[orig] = -y_kept[r] / max_abs;
    }
    let cand = InfeasibilityCertificate {
        y,
        margin: 0.0,
        psd_defect: 0.0,
    };
    let check = verify_certificate(p, &cand, opts.cert_margin);
    if check.valid {
        Some(InfeasibilityCertificate {
            y: cand.y,
            margin: check.margin,
            psd_defect: check.psd_defect,
        })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The Newton direction must satisfy the three linearized equations.
    #[test]
    fn newton_direction_satisfies_linear_equations() {
        let n = 3;
        let mut p = SdpProblem::new(n);
        p.add_constraint(&[((0, 0), 1.0)], 1.0);
        p.add_constraint(&[((1, 1), 1.0), ((0, 1), 0.5)], 0.7);
        p.add_constraint(&[((2, 2), 1.0)], 1.3);
        p.set_objective(&[((0, 1), 1.0), ((2, 2), -0.5)]);

        let pre = preprocess(&p);
        let a_mats = &pre.a_mats;
        let m = a_mats.len();
        let b = pre.b.clone();
        let c = -p.objective_matrix();

        // An arbitrary strictly interior iterate.
        let x = DMatrix::<f64>::identity(n, n) * 1.3;
        let z = DMatrix::<f64>::identity(n, n) * 0.8;
        let y = DVector::from_vec(vec![0.1, -0.2, 0.05]);
        let (tau, kappa) = (0.9, 1.1);

        let rp = a_apply(a_mats, &x) - &b * tau;
        let rd = a_adjoint(a_mats, n, &y) + &z - &c * tau;
        let rg = -c.dot(&x) + b.dot(&y) - kappa;

        let mut retries = 0;
        let lx = chol_jitter(&x, &mut retries).unwrap();
        let lz = chol_jitter(&z, &mut retries).unwrap();
        let svd = (lz.l().transpose() * lx.l()).svd(false, true);
        let vt = svd.v_t.as_ref().unwrap();
        let lam = svd.singular_values.clone();
        let mut vs = vt.transpose();
        for j in 0..n {
            let s = 1.0 / lam[j].sqrt();
            for i in 0..n {
                vs[(i, j)] *= s;
            }
        }
        let r = lx.l() * &vs;
        let rt = r.transpose();
        let wmw = |mat: &DMatrix<f64>| -> DMatrix<f64> { &r * (&rt * mat * &r) * &rt };

        let mut wa: Vec<DMatrix<f64>> = Vec::new();
        for ak in a_mats.iter() {
            wa.push(wmw(ak));
        }
        let mut g = DMatrix::<f64>::zeros(m, m);
        for l in 0..m {
            for k in 0..=l {
                let v = a_mats[k].dot(&wa[l]);
                g[(k, l)] = v;
                g[(l, k)] = v;
            }
        }
        let g_chol = Some(chol_jitter(&g, &mut retries).unwrap());
        let wcw = wmw(&c);
        let a_wcw = a_apply(a_mats, &wcw);
        let u = solve_schur(&g_chol, &(&b + &a_wcw));
        let wrdw = wmw(&rd);
        let a_wrdw = a_apply(a_mats, &wrdw);

        let ctx = NewtonCtx {
            a_mats,
            n,
            c: &c,
            b: &b,
            r: &r,
            rt: &rt,
            lam: &lam,
            g_chol: &g_chol,
            wcw: &wcw,
            u: &u,
            wrdw: &wrdw,
            a_wrdw: &a_wrdw,
            rp: &rp,
            rd: &rd,
            rg,
            tau,
            kappa,
        };

        let gamma = 0.7;
        let mut rhs = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            rhs[(i, i)] = 0.3 - lam[i] * lam[i];
        }
        let rtk = 0.3 - tau * kappa;
        let dir = ctx.newton(gamma, &rhs, rtk);

        // (1) A(dX) - dtau b = -gamma rp
        let lhs1 = a_apply(a_mats, &dir.dx) - &b * dir.dtau;
        assert!((lhs1 + &rp * gamma).norm() < 1e-9, "primal eq violated");
        // (2) A*(dy) + dZ - dtau C = -gamma rd
        let lhs2 = a_adjoint(a_mats, n, &dir.dy) + &dir.dz - &c * dir.dtau;
        assert!((lhs2 + &rd * gamma).norm() < 1e-9, "dual eq violated");
        // (3) -<C,dX> + b·dy - dkap = -gamma rg
        let lhs3 = -c.dot(&dir.dx) + b.dot(&dir.dy) - dir.dkap;
        assert!((lhs3 + gamma * rg).abs() < 1e-9, "gap eq violated");
        // (4) tau-kappa linearization
        assert!((kappa * dir.dtau + tau * dir.dkap - rtk).abs() < 1e-9);
    }
}
