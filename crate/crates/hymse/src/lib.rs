//! Hybrid mimetic spectral element solver for Darcy flow.
//!
//! The library discretizes the mixed Darcy problem
//!
//! ```text
//! u + A grad p = 0,    div u = f    in Omega,    p = p_hat on the boundary,
//! ```
//!
//! on a Cartesian grid of (possibly curved) quadrilateral spectral elements.
//! Fluxes live in an H(div)-conforming edge space, pressures are elementwise
//! dual cell variables, and inter-element normal-flux continuity is enforced
//! by Lagrange multipliers on the mesh skeleton. The divergence constraint is
//! satisfied exactly: the incidence matrices are metric-free and integer
//! valued, so local mass balance holds to machine precision on any mesh.
//!
//! Module map:
//!
//! * [`polybasis`]: 1D Gauss-Lobatto nodal/edge bases, quadrature, 1D mass
//!   matrices, primal/dual conversions.
//! * [`mesh`]: tensor-product element grid with an optional smooth global
//!   deformation; element mappings and Jacobians.
//! * [`topology`]: integer incidence (`E21`), trace and connectivity (`E_N`)
//!   operators, DOF layouts and counts.
//! * [`assembly`]: weighted velocity mass matrices (Piola transformed),
//!   source/boundary projections, local saddles and the global system.
//! * [`sparse`]: triplet/CSR/CSC storage and a sparse LU factorization.
//! * [`solver`]: monolithic and hybrid (Schur) solution paths, conjugate
//!   gradients, condition number estimation.
//! * [`verification`]: manufactured solution, error norms, convergence
//!   sweeps and CSV reporting.

pub mod assembly;
pub mod error;
pub mod mesh;
pub mod polybasis;
pub mod solver;
pub mod sparse;
pub mod topology;
pub mod verification;

pub use error::{Error, Result};

pub use nalgebra;
