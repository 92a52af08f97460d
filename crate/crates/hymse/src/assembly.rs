//! Element matrices and the global saddle system.
//!
//! Velocities transform contravariantly (Piola): a reference field psi maps
//! to `v = J psi / det J`, so the A-weighted velocity inner product pulls
//! back to the reference square with the symmetric 2x2 weight
//! `G = J^T A^{-1} J / det J`. Pressures and the source are 2-forms: their
//! degrees of freedom are plain cell integrals and carry `det J` inside the
//! integral, never a metric factor on the coefficients.
//!
//! Sign convention: the saddle blocks are assembled as
//! `[[M, E21^T], [E21, 0]]` with the Dirichlet pairing entering the velocity
//! right-hand side negated. The pressure unknown of that system is the
//! negative of the physical pressure; the solver flips it back on recovery.
//! With homogeneous boundary data both conventions coincide.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, Matrix2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{ElementMap, Mesh};
use crate::polybasis::BasisSet1D;
use crate::topology::{connectivity_en, incidence_e21, IntMatrix, LocalDofLayout, Side};
use crate::sparse::Coo;

/// Spatially varying symmetric positive definite permeability tensor.
#[derive(Clone)]
pub struct Permeability {
    eval: Arc<dyn Fn(f64, f64) -> Matrix2<f64> + Send + Sync>,
}

impl Permeability {
    pub fn identity() -> Self {
        Self::constant(Matrix2::identity())
    }

    pub fn constant(a: Matrix2<f64>) -> Self {
        Self {
            eval: Arc::new(move |_, _| a),
        }
    }

    pub fn from_fn(f: impl Fn(f64, f64) -> Matrix2<f64> + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    pub fn tensor(&self, x: f64, y: f64) -> Matrix2<f64> {
        (self.eval)(x, y)
    }

    /// A^{-1} at (x, y), after checking symmetry and positive definiteness.
    pub fn inverse_at(&self, x: f64, y: f64) -> Result<Matrix2<f64>> {
        let a = self.tensor(x, y);
        let scale = a.abs().max().max(1e-300);
        if (a[(0, 1)] - a[(1, 0)]).abs() > 1e-12 * scale {
            return Err(Error::PermeabilityNotSpd { x, y });
        }
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        if det <= 0.0 || a.trace() <= 0.0 {
            return Err(Error::PermeabilityNotSpd { x, y });
        }
        Ok(Matrix2::new(a[(1, 1)], -a[(0, 1)], -a[(1, 0)], a[(0, 0)]) / det)
    }
}

impl std::fmt::Debug for Permeability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Permeability(..)")
    }
}

/// Scalar field closure (source term, boundary data, exact solutions).
pub type ScalarField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Data of one Darcy boundary value problem: permeability, source and
/// Dirichlet pressure on the whole boundary.
#[derive(Clone)]
pub struct ProblemData {
    pub permeability: Permeability,
    pub source: ScalarField,
    pub dirichlet: ScalarField,
}

impl ProblemData {
    pub fn new(
        permeability: Permeability,
        source: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dirichlet: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            permeability,
            source: Arc::new(source),
            dirichlet: Arc::new(dirichlet),
        }
    }
}

/// A-weighted velocity mass matrix of one element, n_u x n_u, symmetric
/// positive definite.
pub fn weighted_mass_matrix(
    elem: &ElementMap,
    basis: &BasisSet1D,
    perm: &Permeability,
) -> Result<DMatrix<f64>> {
    let n = basis.degree();
    let layout = LocalDofLayout::new(n)?;
    let n_u = layout.n_u();
    let n_ux = layout.n_ux();
    let q = basis.quad_nodes().len();
    let h = basis.h_table();
    let e = basis.e_table();
    let (qn, qw) = (basis.quad_nodes(), basis.quad_weights());

    let mut m = DMatrix::zeros(n_u, n_u);
    let mut phi = vec![0.0; n_u];
    for qa in 0..q {
        for qb in 0..q {
            let (xi, eta) = (qn[qa], qn[qb]);
            let (jac, det) = elem.jacobian(xi, eta);
            if det <= 0.0 {
                let (x, y) = elem.map(xi, eta);
                let (ex, ey) = elem.index();
                return Err(Error::MeshDegenerate { ex, ey, x, y, det });
            }
            let (x, y) = elem.map(xi, eta);
            let ainv = perm.inverse_at(x, y)?;
            let g = jac.transpose() * ainv * jac / det;
            for i in 0..=n {
                for j in 1..=n {
                    phi[layout.ux_index(i, j)] = h[(i, qa)] * e[(j - 1, qb)];
                }
            }
            for i in 1..=n {
                for j in 0..=n {
                    phi[layout.uy_index(i, j)] = e[(i - 1, qa)] * h[(j, qb)];
                }
            }
            let w = qw[qa] * qw[qb];
            for a in 0..n_u {
                let pa = w * phi[a];
                let ga = (a >= n_ux) as usize;
                for b in a..n_u {
                    let gb = (b >= n_ux) as usize;
                    m[(a, b)] += pa * phi[b] * g[(ga, gb)];
                }
            }
        }
    }
    for a in 0..n_u {
        for b in 0..a {
            m[(a, b)] = m[(b, a)];
        }
    }
    Ok(m)
}

/// Cell integrals of the source: `f_ij = int_{cell ij} f(Phi) det J`, using
/// the basis quadrature rule mapped to each GLL subcell. Ordered like the
/// pressure block.
pub fn project_source(elem: &ElementMap, basis: &BasisSet1D, f: &ScalarField) -> DVector<f64> {
    let n = basis.degree();
    let layout = LocalDofLayout::new(n).expect("degree validated by basis");
    let nodes = basis.nodes();
    let (qn, qw) = (basis.quad_nodes(), basis.quad_weights());
    let q = qn.len();
    // 1D quadrature mapped to [nodes[c-1], nodes[c]] per subcell c.
    let sub_node = |c: usize, k: usize| -> f64 {
        nodes[c - 1] + (nodes[c] - nodes[c - 1]) * (qn[k] + 1.0) / 2.0
    };
    let sub_weight = |c: usize, k: usize| -> f64 { qw[k] * (nodes[c] - nodes[c - 1]) / 2.0 };

    let mut out = DVector::zeros(layout.n_p());
    for cj in 1..=n {
        for ci in 1..=n {
            let mut acc = 0.0;
            for ka in 0..q {
                let xi = sub_node(ci, ka);
                for kb in 0..q {
                    let eta = sub_node(cj, kb);
                    let (_, det) = elem.jacobian(xi, eta);
                    let (x, y) = elem.map(xi, eta);
                    acc += sub_weight(ci, ka) * sub_weight(cj, kb) * f(x, y) * det;
                }
            }
            out[layout.cell_index(ci, cj)] = acc;
        }
    }
    out
}

/// Boundary pairing of one side: entry k holds
/// `sign(outward) * int e_{k+1}(t) p_hat(Phi(edge(t))) dt`.
/// The normal-flux 1-form pulls back without a metric factor, so no Jacobian
/// appears.
pub fn project_dirichlet(
    elem: &ElementMap,
    basis: &BasisSet1D,
    side: Side,
    p_hat: &ScalarField,
) -> Vec<f64> {
    let n = basis.degree();
    let e = basis.e_table();
    let (qn, qw) = (basis.quad_nodes(), basis.quad_weights());
    let sign = side.outward_sign();
    let mut out = vec![0.0; n];
    for (k, &t) in qn.iter().enumerate() {
        let (xi, eta) = match side {
            Side::Left => (-1.0, t),
            Side::Right => (1.0, t),
            Side::Bottom => (t, -1.0),
            Side::Top => (t, 1.0),
        };
        let (x, y) = elem.map(xi, eta);
        let pv = p_hat(x, y) * qw[k] * sign;
        for j in 0..n {
            out[j] += pv * e[(j, k)];
        }
    }
    out
}

/// One element's saddle system `[[M, E21^T], [E21, 0]]`, factored once and
/// reused for all local solves.
pub struct LocalSystem {
    element: (usize, usize),
    n_u: usize,
    n_p: usize,
    mass: DMatrix<f64>,
    rhs: DVector<f64>,
    lu: nalgebra::LU<f64, Dyn, Dyn>,
}

impl LocalSystem {
    pub fn element(&self) -> (usize, usize) {
        self.element
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn n_loc(&self) -> usize {
        self.n_u + self.n_p
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    /// Right-hand side [boundary pairing (negated); source integrals].
    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    /// Solve the factored saddle for an arbitrary right-hand side.
    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        self.lu
            .solve(rhs)
            .ok_or(Error::SingularSystem("local saddle"))
    }
}

/// Assemble and factor the local saddle of element (ex, ey).
pub fn assemble_local(
    mesh: &Mesh,
    ex: usize,
    ey: usize,
    basis: &BasisSet1D,
    problem: &ProblemData,
    e21: &IntMatrix,
) -> Result<LocalSystem> {
    let layout = LocalDofLayout::new(basis.degree())?;
    let elem = mesh.element(ex, ey);
    let mass = weighted_mass_matrix(&elem, basis, &problem.permeability)?;
    let n_u = layout.n_u();
    let n_p = layout.n_p();
    let n_loc = n_u + n_p;

    let mut saddle = DMatrix::zeros(n_loc, n_loc);
    saddle.view_mut((0, 0), (n_u, n_u)).copy_from(&mass);
    for &(r, c, v) in e21.entries() {
        saddle[(c, n_u + r)] = v as f64;
        saddle[(n_u + r, c)] = v as f64;
    }

    let mut rhs = DVector::zeros(n_loc);
    let boundary_sides = [
        (Side::Left, ex == 0),
        (Side::Right, ex == mesh.kx() - 1),
        (Side::Bottom, ey == 0),
        (Side::Top, ey == mesh.ky() - 1),
    ];
    for (side, on_boundary) in boundary_sides {
        if !on_boundary {
            continue;
        }
        let pairing = project_dirichlet(&elem, basis, side, &problem.dirichlet);
        for (k, dof) in layout.side_dofs(side).into_iter().enumerate() {
            rhs[dof] -= pairing[k];
        }
    }
    rhs.rows_mut(n_u, n_p)
        .copy_from(&project_source(&elem, basis, &problem.source));

    let lu = saddle.lu();
    Ok(LocalSystem {
        element: (ex, ey),
        n_u,
        n_p,
        mass,
        rhs,
        lu,
    })
}

/// Assemble every element's local system in parallel, in element-id order.
pub fn assemble_all_locals(
    mesh: &Mesh,
    basis: &BasisSet1D,
    problem: &ProblemData,
) -> Result<Vec<LocalSystem>> {
    mesh.validate_at(basis.quad_nodes())?;
    let e21 = incidence_e21(basis.degree())?;
    (0..mesh.num_elements())
        .into_par_iter()
        .map(|id| {
            let (ex, ey) = (id % mesh.kx(), id / mesh.kx());
            assemble_local(mesh, ex, ey, basis, problem, &e21)
        })
        .collect()
}

/// The monolithic saddle: per-element [u; p] blocks stacked in element-id
/// order, multipliers last.
pub struct GlobalSystem {
    pub matrix: Coo,
    pub rhs: Vec<f64>,
    pub n_loc: usize,
    pub n_u: usize,
    pub n_p: usize,
    pub num_elements: usize,
    pub n_lambda: usize,
}

impl GlobalSystem {
    pub fn dim(&self) -> usize {
        self.num_elements * self.n_loc + self.n_lambda
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }
}

/// Structural nonzero count of the global saddle:
/// `K ((2N(N+1))^2 + 8N^2) + 4N * interfaces`. The velocity mass blocks are
/// stored dense, so this is exact and mesh independent.
pub fn global_nnz(kx: usize, ky: usize, n: usize) -> u64 {
    let ifaces = ((kx - 1) * ky + kx * (ky - 1)) as u64;
    let (k, n) = ((kx * ky) as u64, n as u64);
    let n_u = 2 * n * (n + 1);
    k * (n_u * n_u + 8 * n * n) + 4 * n * ifaces
}

/// Stack the local saddles and the connectivity rows into the global
/// coordinate matrix. Entry order is deterministic: per element mass block
/// (row-major), then the divergence couplings, then all multiplier rows.
pub fn assemble_global(
    mesh: &Mesh,
    basis: &BasisSet1D,
    locals: &[LocalSystem],
    e21: &IntMatrix,
    en: &IntMatrix,
) -> Result<GlobalSystem> {
    let layout = LocalDofLayout::new(basis.degree())?;
    let n_loc = layout.n_loc();
    let n_u = layout.n_u();
    let k = mesh.num_elements();
    if locals.len() != k {
        return Err(Error::DimensionMismatch {
            context: "assemble_global: locals per element",
            expected: k,
            got: locals.len(),
        });
    }
    let n_lambda = en.nrows();
    let dim = k * n_loc + n_lambda;
    let mut coo = Coo::new(dim, dim);
    let mut rhs = vec![0.0; dim];
    for (id, local) in locals.iter().enumerate() {
        let off = id * n_loc;
        let m = local.mass();
        for a in 0..n_u {
            for b in 0..n_u {
                coo.push(off + a, off + b, m[(a, b)]);
            }
        }
        for &(r, c, v) in e21.entries() {
            coo.push(off + c, off + n_u + r, v as f64);
            coo.push(off + n_u + r, off + c, v as f64);
        }
        rhs[off..off + n_loc].copy_from_slice(local.rhs().as_slice());
    }
    let lambda_off = k * n_loc;
    for &(r, c, v) in en.entries() {
        coo.push(lambda_off + r, c, v as f64);
        coo.push(c, lambda_off + r, v as f64);
    }
    Ok(GlobalSystem {
        matrix: coo,
        rhs,
        n_loc,
        n_u,
        n_p: layout.n_p(),
        num_elements: k,
        n_lambda,
    })
}

/// Convenience: locals, connectivity and the assembled global system.
pub fn assemble(
    mesh: &Mesh,
    basis: &BasisSet1D,
    problem: &ProblemData,
) -> Result<(Vec<LocalSystem>, IntMatrix, GlobalSystem)> {
    let locals = assemble_all_locals(mesh, basis, problem)?;
    let e21 = incidence_e21(basis.degree())?;
    let en = connectivity_en(mesh, basis.degree())?;
    let global = assemble_global(mesh, basis, &locals, &e21, &en)?;
    Ok((locals, en, global))
}
