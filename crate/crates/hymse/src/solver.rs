//! Solution paths for the assembled saddle systems.
//!
//! * Monolithic: sparse LU of the full `[[A, E_N^T], [E_N, 0]]` system.
//! * Hybrid (Schur): eliminate every element through its factored local
//!   saddle, assemble the multiplier Schur complement
//!   `S = E_N A^{-1} E_N^T` (symmetric positive definite for pure Dirichlet
//!   boundaries), solve for the multipliers and recover element unknowns
//!   independently.
//!
//! Both paths return the same physical fields: per-element primal flux DOFs,
//! per-element dual pressure DOFs (sign-corrected from the saddle unknown,
//! see [`crate::assembly`]), and the interface multipliers.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::assembly::{GlobalSystem, LocalSystem};
use crate::error::{Error, Result};
use crate::sparse::SparseLu;
use crate::topology::IntMatrix;

/// Relative residual accepted from the monolithic direct solve.
const MONOLITHIC_RESIDUAL_BOUND: f64 = 1e-10;

/// Which path(s) to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPath {
    Monolithic,
    Schur,
    Both,
}

/// Method for the multiplier system inside the hybrid path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurMethod {
    /// Dense Cholesky factorization.
    Direct,
    /// Plain conjugate gradients (relative tolerance 1e-12).
    ConjugateGradient,
}

/// Solution of one Darcy problem.
#[derive(Debug, Clone)]
pub struct SolutionFields {
    /// Primal flux DOFs per element, length n_u each.
    pub u: Vec<DVector<f64>>,
    /// Dual pressure DOFs per element (physical sign), length n_p each.
    pub p: Vec<DVector<f64>>,
    /// Interface multiplier DOFs (dual trace values).
    pub lambda: DVector<f64>,
}

impl SolutionFields {
    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = if self.lambda.is_empty() {
            0.0
        } else {
            self.lambda.amax()
        };
        for v in self.u.iter().chain(self.p.iter()) {
            if !v.is_empty() {
                m = m.max(v.amax());
            }
        }
        m
    }

    /// Largest absolute DOF-wise difference between two solutions.
    pub fn max_difference(&self, other: &SolutionFields) -> f64 {
        let mut m: f64 = 0.0;
        for (a, b) in self.u.iter().zip(&other.u) {
            m = m.max((a - b).amax());
        }
        for (a, b) in self.p.iter().zip(&other.p) {
            m = m.max((a - b).amax());
        }
        if !self.lambda.is_empty() {
            m = m.max((&self.lambda - &other.lambda).amax());
        }
        m
    }
}

/// Result of the monolithic path.
pub struct MonolithicSolution {
    pub fields: SolutionFields,
    /// Relative residual of the direct solve.
    pub residual: f64,
    /// Fill of the LU factors.
    pub factor_nnz: usize,
}

/// Split a stacked solution vector into per-element fields, flipping the
/// pressure sign back to the physical convention.
fn split_fields(x: &[f64], n_loc: usize, n_u: usize, k: usize, n_lambda: usize) -> SolutionFields {
    let mut u = Vec::with_capacity(k);
    let mut p = Vec::with_capacity(k);
    for e in 0..k {
        let off = e * n_loc;
        u.push(DVector::from_column_slice(&x[off..off + n_u]));
        p.push(-DVector::from_column_slice(&x[off + n_u..off + n_loc]));
    }
    let lambda = DVector::from_column_slice(&x[k * n_loc..k * n_loc + n_lambda]);
    SolutionFields { u, p, lambda }
}

/// Solve the assembled global saddle with sparse LU.
pub fn solve_monolithic(global: &GlobalSystem) -> Result<MonolithicSolution> {
    let csc = global.matrix.to_csc();
    let lu = SparseLu::factor(&csc)?;
    let x = lu.solve(&global.rhs);

    let csr = global.matrix.to_csr();
    let mut ax = vec![0.0; global.dim()];
    csr.matvec(&x, &mut ax);
    let rnorm = global
        .rhs
        .iter()
        .zip(&ax)
        .map(|(b, a)| (b - a).abs())
        .fold(0.0_f64, f64::max);
    let bnorm = global.rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let residual = if bnorm > 0.0 { rnorm / bnorm } else { rnorm };
    if residual > MONOLITHIC_RESIDUAL_BOUND {
        return Err(Error::ResidualTooLarge {
            residual,
            bound: MONOLITHIC_RESIDUAL_BOUND,
        });
    }
    Ok(MonolithicSolution {
        fields: split_fields(
            &x,
            global.n_loc,
            global.n_u,
            global.num_elements,
            global.n_lambda,
        ),
        residual,
        factor_nnz: lu.factor_nnz(),
    })
}

/// The assembled multiplier Schur complement.
pub struct SchurSystem {
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl SchurSystem {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }
}

/// Result of the hybrid path.
pub struct SchurSolution {
    pub fields: SolutionFields,
    pub schur: SchurSystem,
    /// Conjugate gradient iterations, when that method was used.
    pub cg_iterations: Option<usize>,
}

/// Per-element multiplier couplings: (multiplier row, local column, sign).
fn element_couplings(en: &IntMatrix, k: usize, n_loc: usize) -> Vec<Vec<(usize, usize, f64)>> {
    let mut couplings = vec![Vec::new(); k];
    for &(r, c, v) in en.entries() {
        couplings[c / n_loc].push((r, c % n_loc, v as f64));
    }
    couplings
}

/// Hybrid solve with the direct Schur method.
pub fn solve_schur(locals: &[LocalSystem], en: &IntMatrix) -> Result<SchurSolution> {
    solve_schur_with(locals, en, SchurMethod::Direct)
}

/// Hybrid solve: static condensation onto the interface multipliers.
pub fn solve_schur_with(
    locals: &[LocalSystem],
    en: &IntMatrix,
    method: SchurMethod,
) -> Result<SchurSolution> {
    let k = locals.len();
    let n_loc = locals[0].n_loc();
    let n_u = locals[0].n_u();
    if en.ncols() != k * n_loc {
        return Err(Error::DimensionMismatch {
            context: "solve_schur: connectivity columns",
            expected: k * n_loc,
            got: en.ncols(),
        });
    }
    let n_lambda = en.nrows();
    let couplings = element_couplings(en, k, n_loc);

    // Local contributions: g_e = A_e^{-1} F_e and W_e = A_e^{-1} C_e^T.
    struct Contribution {
        g: DVector<f64>,
        w: Vec<DVector<f64>>,
    }
    let contributions: Vec<Contribution> = locals
        .par_iter()
        .zip(&couplings)
        .map(|(local, coupling)| -> Result<Contribution> {
            let g = local.solve(local.rhs())?;
            let mut w = Vec::with_capacity(coupling.len());
            for &(_, col, sign) in coupling {
                let mut rhs = DVector::zeros(n_loc);
                rhs[col] = sign;
                w.push(local.solve(&rhs)?);
            }
            Ok(Contribution { g, w })
        })
        .collect::<Result<_>>()?;

    // Serial accumulation in element order keeps the result independent of
    // the thread count.
    let mut s = DMatrix::zeros(n_lambda, n_lambda);
    let mut rhs = DVector::zeros(n_lambda);
    for (coupling, contrib) in couplings.iter().zip(&contributions) {
        for &(row1, col1, sign1) in coupling {
            rhs[row1] += sign1 * contrib.g[col1];
            for (r2_idx, &(row2, _, _)) in coupling.iter().enumerate() {
                s[(row1, row2)] += sign1 * contrib.w[r2_idx][col1];
            }
        }
    }

    let (lambda, cg_iterations) = if n_lambda == 0 {
        (DVector::zeros(0), None)
    } else {
        match method {
            SchurMethod::Direct => {
                let chol = s
                    .clone()
                    .cholesky()
                    .ok_or(Error::SingularSystem("Schur complement"))?;
                (chol.solve(&rhs), None)
            }
            SchurMethod::ConjugateGradient => {
                let s_ref = &s;
                let apply = |x: &[f64], y: &mut [f64]| {
                    let xv = DVector::from_column_slice(x);
                    let yv: DVector<f64> = s_ref * xv;
                    y.copy_from_slice(yv.as_slice());
                };
                let (sol, iters) = conjugate_gradient(
                    apply,
                    rhs.as_slice(),
                    1e-12,
                    20 * n_lambda + 100,
                )?;
                (DVector::from_vec(sol), Some(iters))
            }
        }
    };

    // Back substitution, element by element: x_e = A_e^{-1} (F_e - C_e^T lambda).
    let x_elements: Vec<DVector<f64>> = locals
        .par_iter()
        .zip(&couplings)
        .map(|(local, coupling)| -> Result<DVector<f64>> {
            let mut rhs_e = local.rhs().clone();
            for &(row, col, sign) in coupling {
                rhs_e[col] -= sign * lambda[row];
            }
            local.solve(&rhs_e)
        })
        .collect::<Result<_>>()?;

    let mut u = Vec::with_capacity(k);
    let mut p = Vec::with_capacity(k);
    for x in &x_elements {
        u.push(x.rows(0, n_u).into_owned());
        p.push(-x.rows(n_u, n_loc - n_u).into_owned());
    }
    Ok(SchurSolution {
        fields: SolutionFields {
            u,
            p,
            lambda,
        },
        schur: SchurSystem { matrix: s, rhs },
        cg_iterations,
    })
}

/// Largest interface flux jump `max |(E_N x)_i|` of a solution; zero up to
/// solver tolerance by construction.
pub fn max_flux_jump(fields: &SolutionFields, en: &IntMatrix, n_loc: usize) -> f64 {
    if en.nrows() == 0 {
        return 0.0;
    }
    let k = fields.u.len();
    let mut x = vec![0.0; k * n_loc];
    for (e, u) in fields.u.iter().enumerate() {
        x[e * n_loc..e * n_loc + u.len()].copy_from_slice(u.as_slice());
    }
    let mut y = vec![0.0; en.nrows()];
    en.apply(&x, &mut y);
    y.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Plain conjugate gradients for a symmetric positive definite operator.
/// Returns the solution and the iteration count.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    for iter in 0..max_iter {
        if rr.sqrt() <= rel_tol * bnorm {
            return Ok((x, iter));
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::SingularSystem("conjugate gradient: operator not SPD"));
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if rr.sqrt() <= rel_tol * bnorm {
        Ok((x, max_iter))
    } else {
        Err(Error::NoConvergence("conjugate gradient", max_iter))
    }
}

/// Condition number estimation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondMethod {
    /// Full symmetric eigendecomposition.
    DenseEigen,
    /// Lanczos iteration with full reorthogonalization.
    Iterative,
}

/// Spectral condition number of a symmetric matrix.
pub fn condition_number(m: &DMatrix<f64>, method: CondMethod) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            context: "condition_number: matrix must be square",
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let scale = m.abs().max().max(1e-300);
    let mut asym: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > 1e-10 * scale {
        return Err(Error::NotSymmetric(asym / scale));
    }
    match method {
        CondMethod::DenseEigen => {
            let eig = m.clone().symmetric_eigen();
            let max = eig.eigenvalues.amax();
            let min = eig
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
            if min == 0.0 {
                return Ok(f64::INFINITY);
            }
            Ok(max / min)
        }
        CondMethod::Iterative => lanczos_condition(m),
    }
}

/// Extreme eigenvalues by Lanczos with full reorthogonalization and a
/// deterministic start vector; adequate for the moderate multiplier systems
/// assembled here.
fn lanczos_condition(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    if n == 0 {
        return Ok(1.0);
    }
    if n == 1 {
        return Ok(1.0);
    }
    // xorshift-based start vector: deterministic, no external RNG.
    let mut state = 0x9e3779b97f4a7c15_u64;
    let mut v = DVector::from_fn(n, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    });
    v /= v.norm();

    let max_steps = n.min(500);
    let mut basis: Vec<DVector<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut prev_extremes: Option<(f64, f64)> = None;
    let mut result = None;

    for step in 0..max_steps {
        let mut w = m * &basis[step];
        let alpha = basis[step].dot(&w);
        alphas.push(alpha);
        // Full reorthogonalization, twice for safety.
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&w);
                w -= q * proj;
            }
        }
        let beta = w.norm();
        let tri_done = beta < 1e-13 * alphas[0].abs().max(1.0) || step + 1 == max_steps;
        let check_now = tri_done || (step + 1) % 10 == 0;
        if check_now {
            let k = alphas.len();
            let mut t = DMatrix::zeros(k, k);
            for i in 0..k {
                t[(i, i)] = alphas[i];
                if i + 1 < k {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = t.symmetric_eigen();
            let max = eig.eigenvalues.max();
            let min = eig.eigenvalues.min();
            if let Some((pmin, pmax)) = prev_extremes {
                let dmin = (min - pmin).abs() / min.abs().max(1e-300);
                let dmax = (max - pmax).abs() / max.abs().max(1e-300);
                if dmin < 1e-9 && dmax < 1e-9 {
                    result = Some((min, max));
                }
            }
            prev_extremes = Some((min, max));
            if tri_done {
                result = Some((min, max));
            }
        }
        if let Some((min, max)) = result {
            if min.abs() == 0.0 {
                return Ok(f64::INFINITY);
            }
            return Ok(max.abs() / min.abs());
        }
        if tri_done {
            break;
        }
        betas.push(beta);
        basis.push(&w / beta);
    }
    let (min, max) = prev_extremes.ok_or(Error::NoConvergence("lanczos", max_steps))?;
    if min.abs() == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(max.abs() / min.abs())
}
