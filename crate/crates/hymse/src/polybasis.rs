//! One-dimensional Gauss-Lobatto-Legendre (GLL) nodal and edge polynomial bases.
//!
//! The nodal basis `h_i` consists of the Lagrange polynomials through the
//! N+1 GLL nodes. The edge basis
//!
//! ```text
//! e_j(xi) = -sum_{k=0}^{j-1} h_k'(xi),    j = 1..N,
//! ```
//!
//! spans polynomials of degree N-1 and satisfies the histopolation property
//! `int_{xi_{j-1}}^{xi_j} e_i = delta_ij`: its coefficients represent line
//! integrals over node intervals. Differentiation maps nodal coefficients
//! `a_i` to edge coefficients `a_i - a_{i-1}` exactly (see [`diff_1d`]).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Newton tolerance for node computations.
const NODE_TOL: f64 = 1e-15;
/// Newton iteration cap for node computations.
const NODE_MAX_ITER: usize = 100;
/// Below this distance to a node, Lagrange evaluation returns the Kronecker value.
const NODE_SNAP: f64 = 1e-14;

/// Legendre polynomial L_n and its derivative at `x`, by the joint recurrence
/// L_{k+1} = ((2k+1) x L_k - k L_{k-1}) / (k+1),
/// L'_{k+1} = L'_{k-1} + (2k+1) L_k.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut lm1, mut l) = (1.0, x);
    let (mut dm1, mut d) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let lp1 = ((2.0 * kf + 1.0) * x * l - kf * lm1) / (kf + 1.0);
        let dp1 = dm1 + (2.0 * kf + 1.0) * l;
        lm1 = l;
        l = lp1;
        dm1 = d;
        d = dp1;
    }
    (l, d)
}

/// Gauss-Lobatto-Legendre nodes on [-1, 1]: the endpoints plus the roots of
/// L'_N, found by Newton iteration from Chebyshev-Lobatto initial guesses.
/// The returned nodes are strictly increasing and exactly antisymmetric.
pub fn gll_nodes(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidDegree(n));
    }
    let mut nodes = vec![0.0; n + 1];
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    let nf = n as f64;
    for j in 1..n {
        let mut x = -(std::f64::consts::PI * j as f64 / nf).cos();
        for _ in 0..NODE_MAX_ITER {
            let (l, d) = legendre_with_deriv(n, x);
            // L''_N from the Legendre ODE; x is strictly interior so 1 - x^2 > 0.
            let d2 = (2.0 * x * d - nf * (nf + 1.0) * l) / (1.0 - x * x);
            let dx = d / d2;
            x -= dx;
            if dx.abs() < NODE_TOL {
                break;
            }
        }
        nodes[j] = x;
    }
    // Enforce the exact antisymmetry of the node set.
    for j in 1..=(n - 1) / 2 {
        let avg = 0.5 * (nodes[j] - nodes[n - j]);
        nodes[j] = avg;
        nodes[n - j] = -avg;
    }
    if n % 2 == 0 {
        nodes[n / 2] = 0.0;
    }
    Ok(nodes)
}

/// Gauss-Legendre quadrature rule with `q` points, exact for degree 2q - 1.
pub fn gauss_legendre(q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if q == 0 {
        return Err(Error::InvalidQuadrature { degree: 0, quad: 0 });
    }
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q {
        let mut x = -((std::f64::consts::PI * (i as f64 + 0.75)) / (qf + 0.5)).cos();
        let mut d = 0.0;
        for _ in 0..NODE_MAX_ITER {
            let (l, dl) = legendre_with_deriv(q, x);
            d = dl;
            let dx = l / d;
            x -= dx;
            if dx.abs() < NODE_TOL {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * d * d);
    }
    for i in 0..q / 2 {
        let j = q - 1 - i;
        let avg = 0.5 * (nodes[i] - nodes[j]);
        nodes[i] = avg;
        nodes[j] = -avg;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Kind of 1D degree-of-freedom vector.
///
/// Primal coefficients multiply basis functions; dual coefficients are the
/// mass-matrix image of primal ones and represent the action of the
/// corresponding functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    PrimalNodal,
    PrimalEdge,
    DualNodal,
    DualEdge,
}

impl DofKind {
    fn dual(self) -> DofKind {
        match self {
            DofKind::PrimalNodal => DofKind::DualNodal,
            DofKind::PrimalEdge => DofKind::DualEdge,
            other => other,
        }
    }

    fn primal(self) -> DofKind {
        match self {
            DofKind::DualNodal => DofKind::PrimalNodal,
            DofKind::DualEdge => DofKind::PrimalEdge,
            other => other,
        }
    }

    fn is_primal(self) -> bool {
        matches!(self, DofKind::PrimalNodal | DofKind::PrimalEdge)
    }
}

/// A coefficient vector tagged with its [`DofKind`].
#[derive(Debug, Clone)]
pub struct DofVector1D {
    pub kind: DofKind,
    pub values: DVector<f64>,
}

impl DofVector1D {
    pub fn new(kind: DofKind, values: DVector<f64>) -> Self {
        Self { kind, values }
    }
}

/// Dual representation `a~ = M a` of a primal coefficient vector.
pub fn to_dual(primal: &DofVector1D, mass: &DMatrix<f64>) -> Result<DofVector1D> {
    if !primal.kind.is_primal() {
        return Err(Error::DimensionMismatch {
            context: "to_dual: input must be primal",
            expected: 0,
            got: 1,
        });
    }
    if mass.nrows() != primal.values.len() || !mass.is_square() {
        return Err(Error::DimensionMismatch {
            context: "to_dual: mass matrix size",
            expected: primal.values.len(),
            got: mass.nrows(),
        });
    }
    Ok(DofVector1D::new(primal.kind.dual(), mass * &primal.values))
}

/// Primal representation `a = M^{-1} a~` of a dual coefficient vector.
pub fn to_primal(dual: &DofVector1D, mass: &DMatrix<f64>) -> Result<DofVector1D> {
    if dual.kind.is_primal() {
        return Err(Error::DimensionMismatch {
            context: "to_primal: input must be dual",
            expected: 0,
            got: 1,
        });
    }
    if mass.nrows() != dual.values.len() || !mass.is_square() {
        return Err(Error::DimensionMismatch {
            context: "to_primal: mass matrix size",
            expected: dual.values.len(),
            got: mass.nrows(),
        });
    }
    let chol = mass
        .clone()
        .cholesky()
        .ok_or(Error::SingularSystem("to_primal mass solve"))?;
    Ok(DofVector1D::new(
        dual.kind.primal(),
        chol.solve(&dual.values),
    ))
}

/// Exact discrete derivative: nodal coefficients to edge coefficients.
///
/// If `p(xi) = sum_i a_i h_i(xi)` then `p'(xi) = sum_j (a_j - a_{j-1}) e_j(xi)`.
pub fn diff_1d(nodal: &[f64]) -> Vec<f64> {
    nodal.windows(2).map(|w| w[1] - w[0]).collect()
}

/// GLL nodal/edge basis of degree N with a Gauss-Legendre quadrature rule,
/// with basis values tabulated at the quadrature points and the 1D mass
/// matrices precomputed.
#[derive(Debug, Clone)]
pub struct BasisSet1D {
    degree: usize,
    nodes: Vec<f64>,
    /// L_N evaluated at each node (denominators of the nodal basis formula).
    legendre_at_nodes: Vec<f64>,
    quad_nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    /// (N+1) x Q table of h_i at quadrature points.
    h_table: DMatrix<f64>,
    /// N x Q table of e_j at quadrature points (row j-1 holds e_j).
    e_table: DMatrix<f64>,
    mass0: DMatrix<f64>,
    mass1: DMatrix<f64>,
}

impl BasisSet1D {
    /// Basis of degree `n` with the default quadrature order Q = N + 4.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_quadrature(n, n + 4)
    }

    /// Basis of degree `n` with `q` Gauss-Legendre points. Requires
    /// `q >= n + 1` so that the mass integrands (degree 2N) are exact.
    pub fn with_quadrature(n: usize, q: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDegree(n));
        }
        if q < n + 1 {
            return Err(Error::InvalidQuadrature { degree: n, quad: q });
        }
        let nodes = gll_nodes(n)?;
        let legendre_at_nodes = nodes
            .iter()
            .map(|&x| legendre_with_deriv(n, x).0)
            .collect::<Vec<_>>();
        let (quad_nodes, quad_weights) = gauss_legendre(q)?;

        let mut basis = Self {
            degree: n,
            nodes,
            legendre_at_nodes,
            quad_nodes,
            quad_weights,
            h_table: DMatrix::zeros(n + 1, q),
            e_table: DMatrix::zeros(n, q),
            mass0: DMatrix::zeros(n + 1, n + 1),
            mass1: DMatrix::zeros(n, n),
        };

        for k in 0..q {
            let xi = basis.quad_nodes[k];
            for i in 0..=n {
                basis.h_table[(i, k)] = basis.eval_lagrange(i, xi)?;
            }
            for j in 1..=n {
                basis.e_table[(j - 1, k)] = basis.eval_edge(j, xi)?;
            }
        }

        for i in 0..=n {
            for j in i..=n {
                let mut s = 0.0;
                for k in 0..q {
                    s += basis.quad_weights[k] * basis.h_table[(i, k)] * basis.h_table[(j, k)];
                }
                basis.mass0[(i, j)] = s;
                basis.mass0[(j, i)] = s;
            }
        }
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..q {
                    s += basis.quad_weights[k] * basis.e_table[(i, k)] * basis.e_table[(j, k)];
                }
                basis.mass1[(i, j)] = s;
                basis.mass1[(j, i)] = s;
            }
        }
        Ok(basis)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn quad_nodes(&self) -> &[f64] {
        &self.quad_nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// Values of h_i at the quadrature points, one row per basis function.
    pub fn h_table(&self) -> &DMatrix<f64> {
        &self.h_table
    }

    /// Values of e_j at the quadrature points; row j-1 holds e_j.
    pub fn e_table(&self) -> &DMatrix<f64> {
        &self.e_table
    }

    /// Nodal mass matrix, (N+1) x (N+1).
    pub fn mass0(&self) -> &DMatrix<f64> {
        &self.mass0
    }

    /// Edge mass matrix, N x N.
    pub fn mass1(&self) -> &DMatrix<f64> {
        &self.mass1
    }

    /// Nodal basis function h_i at `xi`, via
    /// h_i(xi) = ((xi^2 - 1) L'_N(xi)) / (N (N+1) L_N(xi_i) (xi - xi_i)),
    /// with the removable singularity at xi = xi_i handled explicitly.
    pub fn eval_lagrange(&self, i: usize, xi: f64) -> Result<f64> {
        let n = self.degree;
        if i > n {
            return Err(Error::IndexOutOfRange {
                what: "nodal basis index",
                index: i,
                len: n + 1,
            });
        }
        if (xi - self.nodes[i]).abs() < NODE_SNAP {
            return Ok(1.0);
        }
        // Snap to zero at the other nodes so samples at node coordinates
        // return exact Kronecker values.
        for (j, &xj) in self.nodes.iter().enumerate() {
            if j != i && (xi - xj).abs() < NODE_SNAP {
                return Ok(0.0);
            }
        }
        let nf = n as f64;
        let (_, d) = legendre_with_deriv(n, xi);
        Ok((xi * xi - 1.0) * d
            / (nf * (nf + 1.0) * self.legendre_at_nodes[i] * (xi - self.nodes[i])))
    }

    /// Derivative h_i'(xi), by the exact product-rule expansion of the
    /// Lagrange polynomial (O(N^2) per evaluation, no cancellation issues).
    pub fn eval_lagrange_deriv(&self, i: usize, xi: f64) -> Result<f64> {
        let n = self.degree;
        if i > n {
            return Err(Error::IndexOutOfRange {
                what: "nodal basis index",
                index: i,
                len: n + 1,
            });
        }
        let nodes = &self.nodes;
        let mut sum = 0.0;
        for m in 0..=n {
            if m == i {
                continue;
            }
            let mut prod = 1.0 / (nodes[i] - nodes[m]);
            for j in 0..=n {
                if j == i || j == m {
                    continue;
                }
                prod *= (xi - nodes[j]) / (nodes[i] - nodes[j]);
            }
            sum += prod;
        }
        Ok(sum)
    }

    /// Edge basis function e_j at `xi`, for 1 <= j <= N.
    pub fn eval_edge(&self, j: usize, xi: f64) -> Result<f64> {
        let n = self.degree;
        if j == 0 || j > n {
            return Err(Error::IndexOutOfRange {
                what: "edge basis index",
                index: j,
                len: n,
            });
        }
        let mut sum = 0.0;
        for k in 0..j {
            sum += self.eval_lagrange_deriv(k, xi)?;
        }
        Ok(-sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Root of `f` on [a, b] by bisection; independent oracle for node tests.
    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let (fa, fb) = (f(a), f(b));
        assert!(fa * fb < 0.0, "bracket does not straddle a root");
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
            if b - a < 1e-16 {
                break;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn gll_nodes_small_degrees_closed_form() {
        assert_eq!(gll_nodes(1).unwrap(), vec![-1.0, 1.0]);
        let n2 = gll_nodes(2).unwrap();
        assert_eq!(n2, vec![-1.0, 0.0, 1.0]);
        let n3 = gll_nodes(3).unwrap();
        let r = 1.0 / 5.0_f64.sqrt();
        assert_abs_diff_eq!(n3[1], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(n3[2], r, epsilon = 1e-15);
    }

    #[test]
    fn gll_nodes_match_bisection_oracle() {
        // Interior GLL nodes are the roots of L'_N; bracket them between
        // Chebyshev-Lobatto points and bisect.
        for n in [3usize, 5, 8, 12] {
            let nodes = gll_nodes(n).unwrap();
            let dl = |x: f64| legendre_with_deriv(n, x).1;
            for j in 1..n {
                let a = -((std::f64::consts::PI * (j as f64 - 0.45) / n as f64).cos());
                let b = -((std::f64::consts::PI * (j as f64 + 0.45) / n as f64).cos());
                let root = bisect(dl, a, b);
                assert_abs_diff_eq!(nodes[j], root, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn gll_nodes_sorted_symmetric_with_endpoints() {
        for n in 1..=30 {
            let nodes = gll_nodes(n).unwrap();
            assert_eq!(nodes.len(), n + 1);
            assert_eq!(nodes[0], -1.0);
            assert_eq!(nodes[n], 1.0);
            for j in 0..n {
                assert!(nodes[j] < nodes[j + 1]);
            }
            for j in 0..=n {
                assert_eq!(nodes[j], -nodes[n - j], "antisymmetry at n={n}, j={j}");
            }
            // Interior nodes really are roots of L'_N.
            for &x in &nodes[1..n] {
                assert!(legendre_with_deriv(n, x).1.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gll_nodes_rejects_degree_zero() {
        assert!(matches!(gll_nodes(0), Err(Error::InvalidDegree(0))));
    }

    #[test]
    fn gauss_legendre_low_orders_closed_form() {
        let (x, w) = gauss_legendre(1).unwrap();
        assert_eq!(x, vec![0.0]);
        assert_abs_diff_eq!(w[0], 2.0, epsilon = 1e-15);

        let (x, w) = gauss_legendre(2).unwrap();
        let r = 1.0 / 3.0_f64.sqrt();
        assert_abs_diff_eq!(x[0], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], r, epsilon = 1e-15);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_monomials_exactly() {
        for q in 1..=16 {
            let (x, w) = gauss_legendre(q).unwrap();
            for p in 0..=(2 * q - 1) {
                let num: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(&xi, &wi)| wi * xi.powi(p as i32))
                    .sum();
                let exact = if p % 2 == 0 {
                    2.0 / (p as f64 + 1.0)
                } else {
                    0.0
                };
                assert_abs_diff_eq!(num, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn lagrange_kronecker_property() {
        for n in [1usize, 2, 3, 6, 9] {
            let basis = BasisSet1D::new(n).unwrap();
            let nodes = basis.nodes().to_vec();
            for i in 0..=n {
                for (j, &xj) in nodes.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_eq!(basis.eval_lagrange(i, xj).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn lagrange_partition_of_unity() {
        let basis = BasisSet1D::new(7).unwrap();
        for k in 0..=50 {
            let xi = -1.0 + 2.0 * k as f64 / 50.0;
            let sum: f64 = (0..=7).map(|i| basis.eval_lagrange(i, xi).unwrap()).sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lagrange_degree_two_closed_form() {
        // Nodes {-1, 0, 1}: h_0(xi) = xi (xi - 1) / 2.
        let basis = BasisSet1D::new(2).unwrap();
        assert_abs_diff_eq!(
            basis.eval_lagrange(0, 0.5).unwrap(),
            -0.125,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            basis.eval_lagrange(1, 0.5).unwrap(),
            0.75,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            basis.eval_lagrange(2, 0.5).unwrap(),
            0.375,
            epsilon = 1e-15
        );
    }

    #[test]
    fn lagrange_deriv_matches_finite_differences() {
        let basis = BasisSet1D::new(5).unwrap();
        let h = 1e-6;
        for i in 0..=5 {
            for &xi in &[-0.83, -0.2, 0.11, 0.67] {
                let fd = (basis.eval_lagrange(i, xi + h).unwrap()
                    - basis.eval_lagrange(i, xi - h).unwrap())
                    / (2.0 * h);
                let exact = basis.eval_lagrange_deriv(i, xi).unwrap();
                assert_abs_diff_eq!(exact, fd, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn edge_basis_degree_one_is_constant_half() {
        let basis = BasisSet1D::new(1).unwrap();
        for &xi in &[-1.0, -0.3, 0.0, 0.9, 1.0] {
            assert_abs_diff_eq!(basis.eval_edge(1, xi).unwrap(), 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn edge_basis_integral_kronecker() {
        // int_{xi_{j-1}}^{xi_j} e_i = delta_ij, checked with a mapped
        // Gauss-Legendre rule per node interval.
        for n in [2usize, 4, 6] {
            let basis = BasisSet1D::new(n).unwrap();
            let nodes = basis.nodes().to_vec();
            let (qx, qw) = gauss_legendre(n + 6).unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    let (a, b) = (nodes[j - 1], nodes[j]);
                    let mut integral = 0.0;
                    for (&x, &w) in qx.iter().zip(&qw) {
                        let t = a + (b - a) * (x + 1.0) / 2.0;
                        integral += w * (b - a) / 2.0 * basis.eval_edge(i, t).unwrap();
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(integral, expect, epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn edge_basis_telescopes_to_nodal_derivatives() {
        // e_1 = -h_0' by definition; e_N = h_N' because the h_k' sum to
        // zero (the h_k form a partition of unity).
        let basis = BasisSet1D::new(4).unwrap();
        for &xi in &[-0.7, 0.05, 0.66] {
            let first = basis.eval_edge(1, xi).unwrap();
            let last = basis.eval_edge(4, xi).unwrap();
            assert_abs_diff_eq!(
                first,
                -basis.eval_lagrange_deriv(0, xi).unwrap(),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                last,
                basis.eval_lagrange_deriv(4, xi).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn mass0_degree_one_closed_form() {
        let basis = BasisSet1D::new(1).unwrap();
        let m = basis.mass0();
        assert_abs_diff_eq!(m[(0, 0)], 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(0, 1)], 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(1, 0)], 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(1, 1)], 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn mass1_degree_one_closed_form() {
        // e_1 = 1/2, so the single entry is int (1/2)^2 = 1/2.
        let basis = BasisSet1D::new(1).unwrap();
        assert_abs_diff_eq!(basis.mass1()[(0, 0)], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn mass_matrices_symmetric_positive_definite() {
        for n in 1..=8 {
            let basis = BasisSet1D::new(n).unwrap();
            for m in [basis.mass0().clone(), basis.mass1().clone()] {
                assert_eq!(m.transpose(), m);
                assert!(m.cholesky().is_some(), "mass not SPD at n={n}");
            }
        }
    }

    #[test]
    fn mass1_matches_refined_quadrature() {
        let n = 5;
        let basis = BasisSet1D::new(n).unwrap();
        let (qx, qw) = gauss_legendre(n + 13).unwrap();
        for i in 1..=n {
            for j in 1..=n {
                let mut s = 0.0;
                for (&x, &w) in qx.iter().zip(&qw) {
                    s += w * basis.eval_edge(i, x).unwrap() * basis.eval_edge(j, x).unwrap();
                }
                assert_abs_diff_eq!(basis.mass1()[(i - 1, j - 1)], s, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_override_validated() {
        assert!(BasisSet1D::with_quadrature(4, 4).is_err());
        assert!(BasisSet1D::with_quadrature(4, 5).is_ok());
    }

    #[test]
    fn to_dual_degree_one() {
        let basis = BasisSet1D::new(1).unwrap();
        let a = DofVector1D::new(DofKind::PrimalNodal, DVector::from_vec(vec![1.0, 0.0]));
        let dual = to_dual(&a, basis.mass0()).unwrap();
        assert_eq!(dual.kind, DofKind::DualNodal);
        assert_abs_diff_eq!(dual.values[0], 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dual.values[1], 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn to_dual_round_trip() {
        let basis = BasisSet1D::new(6).unwrap();
        let a = DofVector1D::new(
            DofKind::PrimalEdge,
            DVector::from_fn(6, |i, _| (i as f64 * 0.77 + 0.1).sin()),
        );
        let dual = to_dual(&a, basis.mass1()).unwrap();
        let back = to_primal(&dual, basis.mass1()).unwrap();
        assert_eq!(back.kind, DofKind::PrimalEdge);
        for i in 0..6 {
            assert_abs_diff_eq!(back.values[i], a.values[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn to_dual_zero_vector() {
        let basis = BasisSet1D::new(3).unwrap();
        let a = DofVector1D::new(DofKind::PrimalNodal, DVector::zeros(4));
        let dual = to_dual(&a, basis.mass0()).unwrap();
        assert_eq!(dual.values.amax(), 0.0);
    }

    #[test]
    fn to_dual_rejects_mismatched_mass() {
        let basis = BasisSet1D::new(3).unwrap();
        let a = DofVector1D::new(DofKind::PrimalNodal, DVector::zeros(4));
        assert!(to_dual(&a, basis.mass1()).is_err());
    }

    #[test]
    fn duality_pairing_equals_quadrature() {
        // <a, b>: the L2 inner product of the expanded functions equals the
        // plain dot product of one primal and one dual coefficient vector.
        let n = 4;
        let basis = BasisSet1D::new(n).unwrap();
        let a = DofVector1D::new(
            DofKind::PrimalNodal,
            DVector::from_fn(n + 1, |i, _| (1.3 * i as f64).cos()),
        );
        let b = DofVector1D::new(
            DofKind::PrimalNodal,
            DVector::from_fn(n + 1, |i, _| 0.2 + i as f64),
        );
        let mut by_quadrature = 0.0;
        for (k, &w) in basis.quad_weights().iter().enumerate() {
            let fa: f64 = (0..=n).map(|i| a.values[i] * basis.h_table()[(i, k)]).sum();
            let fb: f64 = (0..=n).map(|i| b.values[i] * basis.h_table()[(i, k)]).sum();
            by_quadrature += w * fa * fb;
        }
        let dual_b = to_dual(&b, basis.mass0()).unwrap();
        assert_abs_diff_eq!(a.values.dot(&dual_b.values), by_quadrature, epsilon = 1e-12);
    }

    #[test]
    fn diff_1d_constant_is_zero() {
        assert_eq!(diff_1d(&[3.5, 3.5, 3.5, 3.5]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn diff_1d_identity_samples() {
        // p(xi) = xi at the N=3 nodes; edge coefficients are node spacings and
        // the expansion reconstructs p' = 1.
        let basis = BasisSet1D::new(3).unwrap();
        let nodal: Vec<f64> = basis.nodes().to_vec();
        let edge = diff_1d(&nodal);
        assert_eq!(edge.len(), 3);
        assert_abs_diff_eq!(edge.iter().sum::<f64>(), 2.0, epsilon = 1e-15);
        for &xi in &[-0.9, -0.33, 0.5] {
            let val: f64 = (1..=3)
                .map(|j| edge[j - 1] * basis.eval_edge(j, xi).unwrap())
                .sum();
            assert_abs_diff_eq!(val, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn diff_1d_unit_impulse() {
        assert_eq!(diff_1d(&[0.0, 1.0, 0.0, 0.0]), vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn derivative_identity_random_polynomials() {
        // For p of degree <= N sampled at the nodes, the edge expansion of
        // diff_1d reproduces p' pointwise.
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for n in 2..=7 {
            let basis = BasisSet1D::new(n).unwrap();
            let coeffs: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = |x: f64| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * x.powi(k as i32))
                    .sum::<f64>()
            };
            let dp = |x: f64| {
                coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| c * k as f64 * x.powi(k as i32 - 1))
                    .sum::<f64>()
            };
            let nodal: Vec<f64> = basis.nodes().iter().map(|&x| p(x)).collect();
            let edge = diff_1d(&nodal);
            for k in 0..=20 {
                let xi = -1.0 + 2.0 * k as f64 / 20.0;
                let val: f64 = (1..=n)
                    .map(|j| edge[j - 1] * basis.eval_edge(j, xi).unwrap())
                    .sum();
                assert_abs_diff_eq!(val, dp(xi), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn out_of_range_indices_rejected() {
        let basis = BasisSet1D::new(3).unwrap();
        assert!(basis.eval_lagrange(4, 0.0).is_err());
        assert!(basis.eval_edge(0, 0.0).is_err());
        assert!(basis.eval_edge(4, 0.0).is_err());
    }
}
