//! Manufactured-solution verification: exact fields, error norms,
//! convergence sweeps and their CSV serialization.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rayon::prelude::*;

use crate::assembly::{
    assemble_all_locals, assemble_global, global_nnz, Permeability, ProblemData, ScalarField,
};
use crate::error::Result;
use crate::mesh::{Deformation, ElementMap, Mesh, MeshConfig};
use crate::polybasis::BasisSet1D;
use crate::solver::{
    condition_number, max_flux_jump, solve_monolithic, solve_schur_with, CondMethod, SchurMethod,
    SolutionFields, SolverPath,
};
use crate::topology::{connectivity_en, count_dofs_2d, incidence_e21, LocalDofLayout};

/// Vector field closure.
pub type VectorField = Arc<dyn Fn(f64, f64) -> Vector2<f64> + Send + Sync>;

/// A boundary value problem together with its exact solution.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: &'static str,
    pub problem: ProblemData,
    pub p_exact: ScalarField,
    pub grad_p_exact: VectorField,
    pub u_exact: VectorField,
    pub f_exact: ScalarField,
}

const EPSILON_ANISOTROPY: f64 = 1e-3;

/// Rotating-anisotropy test case: permeability
///
/// ```text
/// A = 1 / (x^2 + y^2 + alpha) * [ eps x^2 + y^2 + alpha    (eps - 1) x y          ]
///                               [ (eps - 1) x y            x^2 + eps y^2 + alpha  ]
/// ```
///
/// with eps = 1e-3, and exact pressure `p = sin(2 pi x) sin(2 pi y)` on the
/// unit square (homogeneous Dirichlet data). The source term is the closed
/// form of `div(-A grad p)`.
pub fn herbin_case(alpha: f64) -> ManufacturedCase {
    assert!(alpha > 0.0, "regularization alpha must be positive");
    let eps = EPSILON_ANISOTROPY;
    let tensor = move |x: f64, y: f64| -> Matrix2<f64> {
        let d = x * x + y * y + alpha;
        Matrix2::new(
            (eps * x * x + y * y + alpha) / d,
            (eps - 1.0) * x * y / d,
            (eps - 1.0) * x * y / d,
            (x * x + eps * y * y + alpha) / d,
        )
    };
    let two_pi = 2.0 * std::f64::consts::PI;
    let p = move |x: f64, y: f64| (two_pi * x).sin() * (two_pi * y).sin();
    let grad_p = move |x: f64, y: f64| {
        Vector2::new(
            two_pi * (two_pi * x).cos() * (two_pi * y).sin(),
            two_pi * (two_pi * x).sin() * (two_pi * y).cos(),
        )
    };
    let u = move |x: f64, y: f64| -tensor(x, y) * grad_p(x, y);
    let f = move |x: f64, y: f64| {
        let d = x * x + y * y + alpha;
        let d2 = d * d;
        let a = tensor(x, y);
        // Spatial derivatives of the tensor entries.
        let da11_dx = 2.0 * x * (eps - 1.0) * (y * y + alpha) / d2;
        let da22_dy = 2.0 * y * (eps - 1.0) * (x * x + alpha) / d2;
        let da12_dx = (eps - 1.0) * y * (y * y + alpha - x * x) / d2;
        let da12_dy = (eps - 1.0) * x * (x * x + alpha - y * y) / d2;
        let g = grad_p(x, y);
        let p_val = p(x, y);
        let p_xx = -two_pi * two_pi * p_val;
        let p_yy = p_xx;
        let p_xy = two_pi * two_pi * (two_pi * x).cos() * (two_pi * y).cos();
        -(a[(0, 0)] * p_xx
            + 2.0 * a[(0, 1)] * p_xy
            + a[(1, 1)] * p_yy
            + (da11_dx + da12_dy) * g[0]
            + (da12_dx + da22_dy) * g[1])
    };
    ManufacturedCase {
        name: "herbin",
        problem: ProblemData::new(Permeability::from_fn(tensor), f, p),
        p_exact: Arc::new(p),
        grad_p_exact: Arc::new(move |x, y| grad_p(x, y)),
        u_exact: Arc::new(u),
        f_exact: Arc::new(f),
    }
}

/// Trivial case: same permeability as [`herbin_case`] but zero source and
/// boundary data, so the exact solution (and every reported error of a
/// correct solver) is identically zero.
pub fn zero_case(alpha: f64) -> ManufacturedCase {
    let perm = herbin_case(alpha).problem.permeability;
    ManufacturedCase {
        name: "zero",
        problem: ProblemData::new(perm, |_, _| 0.0, |_, _| 0.0),
        p_exact: Arc::new(|_, _| 0.0),
        grad_p_exact: Arc::new(|_, _| Vector2::zeros()),
        u_exact: Arc::new(|_, _| Vector2::zeros()),
        f_exact: Arc::new(|_, _| 0.0),
    }
}

/// Weighted cell mass `int (e e)(e e) / det J` used to convert dual pressure
/// DOFs into primal expansion coefficients.
fn cell_mass(elem: &ElementMap, basis: &BasisSet1D) -> DMatrix<f64> {
    let n = basis.degree();
    let layout = LocalDofLayout::new(n).expect("validated degree");
    let n_p = layout.n_p();
    let e = basis.e_table();
    let (qn, qw) = (basis.quad_nodes(), basis.quad_weights());
    let q = qn.len();
    let mut m = DMatrix::zeros(n_p, n_p);
    let mut phi = vec![0.0; n_p];
    for qa in 0..q {
        for qb in 0..q {
            let (_, det) = elem.jacobian(qn[qa], qn[qb]);
            for j in 1..=n {
                for i in 1..=n {
                    phi[layout.cell_index(i, j)] = e[(i - 1, qa)] * e[(j - 1, qb)];
                }
            }
            let w = qw[qa] * qw[qb] / det;
            for a in 0..n_p {
                let pa = w * phi[a];
                for b in a..n_p {
                    m[(a, b)] += pa * phi[b];
                }
            }
        }
    }
    for a in 0..n_p {
        for b in 0..a {
            m[(a, b)] = m[(b, a)];
        }
    }
    m
}

/// Primal pressure coefficients of one element from its dual DOFs.
fn pressure_primal_coeffs(
    elem: &ElementMap,
    basis: &BasisSet1D,
    dual: &DVector<f64>,
) -> DVector<f64> {
    cell_mass(elem, basis)
        .cholesky()
        .expect("cell mass is SPD")
        .solve(dual)
}

fn per_element_sq<F>(mesh: &Mesh, contrib: F) -> f64
where
    F: Fn(ElementMap, usize) -> f64 + Send + Sync,
{
    // Parallel evaluation, serial summation in element order: results do not
    // depend on the thread count.
    let squares: Vec<f64> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|id| contrib(mesh.element_by_id(id), id))
        .collect();
    squares.iter().sum()
}

/// L2 pressure error `|| p_h - p_exact ||` over the whole mesh.
pub fn error_l2_pressure(
    fields: &SolutionFields,
    mesh: &Mesh,
    basis: &BasisSet1D,
    case: &ManufacturedCase,
) -> f64 {
    let n = basis.degree();
    let layout = LocalDofLayout::new(n).expect("validated degree");
    let e = basis.e_table();
    let (qn, qw) = (basis.quad_nodes(), basis.quad_weights());
    let q = qn.len();
    per_element_sq(mesh, |elem, id| {
        let coeffs = pressure_primal_coeffs(&elem, basis, &fields.p[id]);
        let mut acc = 0.0;
        for qa in 0..q {
            for qb in 0..q {
                let (_, det) = elem.jacobian(qn[qa], qn[qb]);
                let mut ph = 0.0;
                for j in 1..=n {
                    for i in 1..=n {
                        ph += coeffs[layout.cell_index(i, j)] * e[(i - 1, qa)] * e[(j - 1, qb)];
                    }
                }
                ph /= det;
                let (x, y) = elem.map(qn[qa], qn[qb]);
                let diff = ph - (case.p_exact)(x, y);
                acc += qw[qa] * qw[qb] * diff * diff * det;
            }
        }
        acc
    })
    .sqrt()
}

/// L2 flux error `|| u_h - u_exact ||` alone (no divergence part).
pub fn error_l2_velocity(
    fields: &SolutionFields,
    mesh: &Mesh,
    basis: &BasisSet1D,
    case: &ManufacturedCase,
) -> f64 {
    let n = basis.degree();
    let layout = LocalDofLayout::new(n).expect("validated degree");
    let h = basis.h_table();
    let e = basis.e_table();
    let (qn, qw) = (basis.quad_nodes(), basis.quad_weights());
    let q = qn.len();
    per_element_sq(mesh, |elem, id| {
        let u = &fields.u[id];
        let mut acc = 0.0;
        for qa in 0..q {
            for qb in 0..q {
                let (jac, det) = elem.jacobian(qn[qa], qn[qb]);
                let mut u_ref = Vector2::zeros();
                for i in 0..=n {
                    for j in 1..=n {
                        u_ref[0] += u[layout.ux_index(i, j)] * h[(i, qa)] * e[(j - 1, qb)];
                    }
                }
                for i in 1..=n {
                    for j in 0..=n {
                        u_ref[1] += u[layout.uy_index(i, j)] * e[(i - 1, qa)] * h[(j, qb)];
                    }
                }
                let u_phys = jac * u_ref / det;
                let (x, y) = elem.map(qn[qa], qn[qb]);
                let du = u_phys - (case.u_exact)(x, y);
                acc += qw[qa] * qw[qb] * du.dot(&du) * det;
            }
        }
        acc
    })
    .sqrt()
}

/// H(div) velocity error:
/// `sqrt(||u_h - u_exact||^2 + ||div u_h - f_h||^2)`.
///
/// The divergence discrepancy is measured in the discrete 2-form space,
/// against the projected source f_h (the same quantity as
/// [`error_div_residual`]): div u_h and f_h live in that space, and with
/// exact discrete conservation the term sits at machine precision, so this
/// norm is flux-dominated. How well f_h resolves f itself is a property of
/// the data projection, not of the solution, and is excluded on purpose:
/// including it would let a pre-asymptotic source projection mask the
/// velocity convergence rate.
pub fn error_hdiv_velocity(
    fields: &SolutionFields,
    mesh: &Mesh,
    basis: &BasisSet1D,
    case: &ManufacturedCase,
) -> f64 {
    let flux = error_l2_velocity(fields, mesh, basis, case);
    let div = error_div_residual(fields, mesh, basis, case);
    (flux * flux + div * div).sqrt()
}

/// L2 norm of the discrete conservation defect `E21 u - f` expanded in the
/// 2-form basis. Zero to machine precision on any mesh for both solver
/// paths.
pub fn error_div_residual(
    fields: &SolutionFields,
    mesh: &Mesh,
    basis: &BasisSet1D,
    case: &ManufacturedCase,
) -> f64 {
    let n = basis.degree();
    let layout = LocalDofLayout::new(n).expect("validated degree");
    let e21 = incidence_e21(n).expect("validated degree");
    let e = basis.e_table();
    let (qn, qw) = (basis.quad_nodes(), basis.quad_weights());
    let q = qn.len();
    per_element_sq(mesh, |elem, id| {
        let mut defect = vec![0.0; layout.n_p()];
        e21.apply(fields.u[id].as_slice(), &mut defect);
        let f_dofs = crate::assembly::project_source(&elem, basis, &case.problem.source);
        for c in 0..layout.n_p() {
            defect[c] -= f_dofs[c];
        }
        let mut acc = 0.0;
        for qa in 0..q {
            for qb in 0..q {
                let (_, det) = elem.jacobian(qn[qa], qn[qb]);
                let mut val = 0.0;
                for j in 1..=n {
                    for i in 1..=n {
                        val += defect[layout.cell_index(i, j)] * e[(i - 1, qa)] * e[(j - 1, qb)];
                    }
                }
                acc += qw[qa] * qw[qb] * val * val / det;
            }
        }
        acc
    })
    .sqrt()
}

/// One sampled solution point for field output.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub p_h: f64,
    pub ux_h: f64,
    pub uy_h: f64,
    pub p_exact: f64,
    pub ux_exact: f64,
    pub uy_exact: f64,
}

/// Sample the discrete and exact fields on an m x m reference grid per
/// element (element order, row-major grid order within each element).
pub fn sample_solution(
    fields: &SolutionFields,
    mesh: &Mesh,
    basis: &BasisSet1D,
    case: &ManufacturedCase,
    m: usize,
) -> Vec<FieldSample> {
    let n = basis.degree();
    let layout = LocalDofLayout::new(n).expect("validated degree");
    let m = m.max(2);
    let mut samples = Vec::with_capacity(mesh.num_elements() * m * m);
    let eval_1d = |t: f64| -> (Vec<f64>, Vec<f64>) {
        let h: Vec<f64> = (0..=n)
            .map(|i| basis.eval_lagrange(i, t).expect("index in range"))
            .collect();
        let e: Vec<f64> = (1..=n)
            .map(|j| basis.eval_edge(j, t).expect("index in range"))
            .collect();
        (h, e)
    };
    for (id, elem) in mesh.elements().enumerate() {
        let coeffs = pressure_primal_coeffs(&elem, basis, &fields.p[id]);
        let u = &fields.u[id];
        for a in 0..m {
            let xi = -1.0 + 2.0 * a as f64 / (m - 1) as f64;
            let (h_xi, e_xi) = eval_1d(xi);
            for b in 0..m {
                let eta = -1.0 + 2.0 * b as f64 / (m - 1) as f64;
                let (h_eta, e_eta) = eval_1d(eta);
                let (jac, det) = elem.jacobian(xi, eta);
                let mut ph = 0.0;
                let mut u_ref = Vector2::zeros();
                for i in 0..=n {
                    for j in 1..=n {
                        u_ref[0] += u[layout.ux_index(i, j)] * h_xi[i] * e_eta[j - 1];
                    }
                }
                for i in 1..=n {
                    for j in 0..=n {
                        u_ref[1] += u[layout.uy_index(i, j)] * e_xi[i - 1] * h_eta[j];
                    }
                }
                for j in 1..=n {
                    for i in 1..=n {
                        ph += coeffs[layout.cell_index(i, j)] * e_xi[i - 1] * e_eta[j - 1];
                    }
                }
                let u_phys = jac * u_ref / det;
                let (x, y) = elem.map(xi, eta);
                let ue = (case.u_exact)(x, y);
                samples.push(FieldSample {
                    x,
                    y,
                    p_h: ph / det,
                    ux_h: u_phys[0],
                    uy_h: u_phys[1],
                    p_exact: (case.p_exact)(x, y),
                    ux_exact: ue[0],
                    uy_exact: ue[1],
                });
            }
        }
    }
    samples
}

/// Which manufactured case a run solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Herbin,
    Zero,
}

impl CaseKind {
    pub fn build(self, alpha: f64) -> ManufacturedCase {
        match self {
            CaseKind::Herbin => herbin_case(alpha),
            CaseKind::Zero => zero_case(alpha),
        }
    }
}

/// Parameters of a single solve.
#[derive(Debug, Clone)]
pub struct RunSetup {
    pub kx: usize,
    pub ky: usize,
    pub degree: usize,
    /// Quadrature override; `None` means Q = N + 4.
    pub quad: Option<usize>,
    pub deformation: Deformation,
    pub alpha: f64,
    pub case: CaseKind,
    pub path: SolverPath,
    pub schur_method: SchurMethod,
    pub compute_cond: bool,
    /// When false, wall-clock columns are reported as zero so that output
    /// files are byte-identical across machines and thread counts.
    pub timings: bool,
}

impl RunSetup {
    pub fn new(kx: usize, ky: usize, degree: usize, deformation: Deformation) -> Self {
        Self {
            kx,
            ky,
            degree,
            quad: None,
            deformation,
            alpha: 0.1,
            case: CaseKind::Herbin,
            path: SolverPath::Schur,
            schur_method: SchurMethod::Direct,
            compute_cond: false,
            timings: true,
        }
    }
}

/// Row status of a sweep record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordStatus {
    Ok,
    Failed(String),
}

/// One configuration's results, one CSV row.
#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    pub k_total: usize,
    pub degree: usize,
    pub mesh_label: &'static str,
    pub amplitude: f64,
    pub err_p_l2: f64,
    pub err_u_hdiv: f64,
    pub err_div: f64,
    pub n_full: u64,
    pub n_lambda: u64,
    pub nnz: u64,
    pub cond_s: Option<f64>,
    pub t_assemble: f64,
    pub t_solve: f64,
    pub status: RecordStatus,
}

/// Everything produced by one solve.
pub struct RunOutcome {
    pub record: ConvergenceRecord,
    pub fields: SolutionFields,
    /// Max DOF difference between the two paths when both were run.
    pub path_discrepancy: Option<f64>,
    pub monolithic_residual: Option<f64>,
    pub schur_dim: Option<usize>,
    pub cg_iterations: Option<usize>,
    pub flux_jump: f64,
}

/// Solve one configuration end to end and compute its error record.
pub fn run_case(setup: &RunSetup) -> Result<RunOutcome> {
    let basis = match setup.quad {
        Some(q) => BasisSet1D::with_quadrature(setup.degree, q)?,
        None => BasisSet1D::new(setup.degree)?,
    };
    let mesh = Mesh::build(MeshConfig::unit_square(
        setup.kx,
        setup.ky,
        setup.deformation,
    ))?;
    let case = setup.case.build(setup.alpha);

    let t0 = Instant::now();
    let locals = assemble_all_locals(&mesh, &basis, &case.problem)?;
    let e21 = incidence_e21(setup.degree)?;
    let en = connectivity_en(&mesh, setup.degree)?;
    let t_assemble = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let mut schur_result = None;
    let mut mono_result = None;
    if matches!(setup.path, SolverPath::Schur | SolverPath::Both) {
        schur_result = Some(solve_schur_with(&locals, &en, setup.schur_method)?);
    }
    if matches!(setup.path, SolverPath::Monolithic | SolverPath::Both) {
        let global = assemble_global(&mesh, &basis, &locals, &e21, &en)?;
        mono_result = Some(solve_monolithic(&global)?);
    }
    let t_solve = t1.elapsed().as_secs_f64();

    let path_discrepancy = match (&schur_result, &mono_result) {
        (Some(s), Some(m)) => {
            let scale = s.fields.max_abs().max(1.0);
            Some(s.fields.max_difference(&m.fields) / scale)
        }
        _ => None,
    };
    let monolithic_residual = mono_result.as_ref().map(|m| m.residual);
    let cg_iterations = schur_result.as_ref().and_then(|s| s.cg_iterations);
    let schur_dim = schur_result.as_ref().map(|s| s.schur.dim());
    let cond_s = match (&schur_result, setup.compute_cond) {
        (Some(s), true) if s.schur.dim() > 0 => {
            Some(condition_number(s.schur.matrix(), CondMethod::DenseEigen)?)
        }
        _ => None,
    };

    let fields = match (schur_result, mono_result) {
        (Some(s), _) => s.fields,
        (None, Some(m)) => m.fields,
        (None, None) => unreachable!("some path always runs"),
    };
    let flux_jump = max_flux_jump(&fields, &en, locals[0].n_loc());

    let (n_full, n_lambda) = count_dofs_2d(setup.kx, setup.ky, setup.degree);
    let record = ConvergenceRecord {
        k_total: setup.kx * setup.ky,
        degree: setup.degree,
        mesh_label: setup.deformation.label(),
        amplitude: setup.deformation.amplitude(),
        err_p_l2: error_l2_pressure(&fields, &mesh, &basis, &case),
        err_u_hdiv: error_hdiv_velocity(&fields, &mesh, &basis, &case),
        err_div: error_div_residual(&fields, &mesh, &basis, &case),
        n_full,
        n_lambda,
        nnz: global_nnz(setup.kx, setup.ky, setup.degree),
        cond_s,
        t_assemble: if setup.timings { t_assemble } else { 0.0 },
        t_solve: if setup.timings { t_solve } else { 0.0 },
        status: RecordStatus::Ok,
    };
    Ok(RunOutcome {
        record,
        fields,
        path_discrepancy,
        monolithic_residual,
        schur_dim,
        cg_iterations,
        flux_jump,
    })
}

/// Sweep plan: the cross product of mesh kinds, element counts and
/// degrees, executed in that nesting order.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    /// Elements per direction (square grids).
    pub ks: Vec<usize>,
    pub degrees: Vec<usize>,
    pub deformations: Vec<Deformation>,
    pub alpha: f64,
    pub quad: Option<usize>,
    pub path: SolverPath,
    pub compute_cond: bool,
    pub timings: bool,
}

impl SweepPlan {
    pub fn new(ks: Vec<usize>, degrees: Vec<usize>, deformations: Vec<Deformation>) -> Self {
        Self {
            ks,
            degrees,
            deformations,
            alpha: 0.1,
            quad: None,
            path: SolverPath::Schur,
            compute_cond: false,
            timings: true,
        }
    }
}

/// Run every configuration of a sweep. Failing configurations produce a
/// flagged record (NaN errors) and the sweep continues.
pub fn run_convergence(plan: &SweepPlan) -> Vec<ConvergenceRecord> {
    let mut records = Vec::new();
    for &deformation in &plan.deformations {
        for &k in &plan.ks {
            for &degree in &plan.degrees {
                let setup = RunSetup {
                    kx: k,
                    ky: k,
                    degree,
                    quad: plan.quad,
                    deformation,
                    alpha: plan.alpha,
                    case: CaseKind::Herbin,
                    path: plan.path,
                    schur_method: SchurMethod::Direct,
                    compute_cond: plan.compute_cond,
                    timings: plan.timings,
                };
                match run_case(&setup) {
                    Ok(outcome) => records.push(outcome.record),
                    Err(err) => {
                        let (n_full, n_lambda) = count_dofs_2d(k, k, degree);
                        records.push(ConvergenceRecord {
                            k_total: k * k,
                            degree,
                            mesh_label: deformation.label(),
                            amplitude: deformation.amplitude(),
                            err_p_l2: f64::NAN,
                            err_u_hdiv: f64::NAN,
                            err_div: f64::NAN,
                            n_full,
                            n_lambda,
                            nnz: global_nnz(k, k, degree),
                            cond_s: None,
                            t_assemble: 0.0,
                            t_solve: 0.0,
                            status: RecordStatus::Failed(err.category().to_string()),
                        });
                    }
                }
            }
        }
    }
    records
}

/// CSV header of [`records_to_csv`].
pub const CSV_HEADER: &str =
    "K,N,mesh,c,err_p_l2,err_u_hdiv,err_div,n_full,n_lambda,nnz,cond_S,t_assemble_s,t_solve_s,status";

/// Serialize sweep records with a fixed column order (see [`CSV_HEADER`]).
/// `cond_S` is NaN when not computed; failed rows carry NaN errors and a
/// `failed:<category>` status.
pub fn records_to_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let status = match &r.status {
            RecordStatus::Ok => "ok".to_string(),
            RecordStatus::Failed(category) => format!("failed:{category}"),
        };
        out.push_str(&format!(
            "{},{},{},{:.6},{:.12e},{:.12e},{:.12e},{},{},{},{:.12e},{:.6},{:.6},{}\n",
            r.k_total,
            r.degree,
            r.mesh_label,
            r.amplitude,
            r.err_p_l2,
            r.err_u_hdiv,
            r.err_div,
            r.n_full,
            r.n_lambda,
            r.nnz,
            r.cond_s.unwrap_or(f64::NAN),
            r.t_assemble,
            r.t_solve,
            status,
        ));
    }
    out
}

/// Least-squares slope of log(y) against log(x).
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a slope");
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
