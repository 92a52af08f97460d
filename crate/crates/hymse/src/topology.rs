//! Metric-free topology: DOF layouts, incidence, trace and connectivity
//! operators. All operators here are integer matrices; geometry never enters.
//!
//! Local flux/pressure numbering for one element of degree N (indices are
//! grid positions on the GLL tensor grid):
//!
//! * `u_x(i, j)`, i = 0..N, j = 1..N: x-directed flux through the j-th
//!   vertical edge segment on grid line i, stored at `i * N + (j - 1)`.
//! * `u_y(i, j)`, i = 1..N, j = 0..N: y-directed flux on grid line j, stored
//!   at `N (N + 1) + j * N + (i - 1)`.
//! * pressure / cell (i, j), i, j = 1..N, stored at `(j - 1) N + (i - 1)`.
//!
//! The discrete divergence `E21` maps fluxes to net cell outflow with
//! coefficients in {-1, 0, 1}; conservation statements written with it are
//! exact in floating point because only additions of stored values occur.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Element side, in the order used by the trace operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Sign of the outward normal relative to the flux orientation
    /// (fluxes point in +x / +y).
    pub fn outward_sign(self) -> f64 {
        match self {
            Side::Left | Side::Bottom => -1.0,
            Side::Right | Side::Top => 1.0,
        }
    }
}

/// Local degree-of-freedom layout of one element of degree N.
#[derive(Debug, Clone, Copy)]
pub struct LocalDofLayout {
    n: usize,
}

impl LocalDofLayout {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDegree(n));
        }
        Ok(Self { n })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Number of x-directed flux DOFs, N (N + 1).
    pub fn n_ux(&self) -> usize {
        self.n * (self.n + 1)
    }

    /// Total flux DOFs, 2 N (N + 1).
    pub fn n_u(&self) -> usize {
        2 * self.n * (self.n + 1)
    }

    /// Pressure (cell) DOFs, N^2.
    pub fn n_p(&self) -> usize {
        self.n * self.n
    }

    /// Local saddle size, n_u + n_p.
    pub fn n_loc(&self) -> usize {
        self.n_u() + self.n_p()
    }

    /// Flux DOFs on one side, N.
    pub fn n_side(&self) -> usize {
        self.n
    }

    /// x-flux DOF (i, j), i = 0..N, j = 1..N.
    pub fn ux_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.n && (1..=self.n).contains(&j));
        i * self.n + (j - 1)
    }

    /// y-flux DOF (i, j), i = 1..N, j = 0..N.
    pub fn uy_index(&self, i: usize, j: usize) -> usize {
        debug_assert!((1..=self.n).contains(&i) && j <= self.n);
        self.n_ux() + j * self.n + (i - 1)
    }

    /// Pressure / cell DOF (i, j), i, j = 1..N, relative to the pressure block.
    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        debug_assert!((1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        (j - 1) * self.n + (i - 1)
    }

    /// Cell grid coordinates (i, j) of a pressure-block index.
    pub fn cell_coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.n + 1, idx / self.n + 1)
    }

    /// Local flux DOF indices on a side, ascending along the side.
    pub fn side_dofs(&self, side: Side) -> Vec<usize> {
        let n = self.n;
        match side {
            Side::Left => (1..=n).map(|j| self.ux_index(0, j)).collect(),
            Side::Right => (1..=n).map(|j| self.ux_index(n, j)).collect(),
            Side::Bottom => (1..=n).map(|i| self.uy_index(i, 0)).collect(),
            Side::Top => (1..=n).map(|i| self.uy_index(i, n)).collect(),
        }
    }
}

/// Sparse integer matrix in triplet form. Entries are unique by construction
/// in all operators built here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, i32)>,
}

impl IntMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, val: i32) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, val));
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, i32)] {
        &self.entries
    }

    pub fn to_dense(&self) -> DMatrix<i32> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// y += M x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for &(r, c, v) in &self.entries {
            y[r] += v as f64 * x[c];
        }
    }

    /// y += M^T x.
    pub fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        for &(r, c, v) in &self.entries {
            y[c] += v as f64 * x[r];
        }
    }
}

/// Discrete divergence E^{2,1} of one element: N^2 x 2N(N+1), each row the
/// signed sum of the four fluxes bounding a cell.
pub fn incidence_e21(n: usize) -> Result<IntMatrix> {
    let layout = LocalDofLayout::new(n)?;
    let mut m = IntMatrix::new(layout.n_p(), layout.n_u());
    for j in 1..=n {
        for i in 1..=n {
            let row = layout.cell_index(i, j);
            m.push(row, layout.ux_index(i - 1, j), -1);
            m.push(row, layout.ux_index(i, j), 1);
            m.push(row, layout.uy_index(i, j - 1), -1);
            m.push(row, layout.uy_index(i, j), 1);
        }
    }
    Ok(m)
}

/// Per-element boundary trace: 4N x n_loc, selecting the boundary flux DOFs
/// with the sign of the outward normal. Row blocks follow [`Side::ALL`].
pub fn trace_matrix(n: usize) -> Result<IntMatrix> {
    let layout = LocalDofLayout::new(n)?;
    let mut m = IntMatrix::new(4 * n, layout.n_loc());
    for (s, side) in Side::ALL.iter().enumerate() {
        let sign = side.outward_sign() as i32;
        for (k, dof) in layout.side_dofs(*side).into_iter().enumerate() {
            m.push(s * n + k, dof, sign);
        }
    }
    Ok(m)
}

/// Orientation of an inter-element interface (normal direction).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// One conforming interface between grid neighbors `lo` and `hi`
/// (`lo` is the element on the lower grid coordinate).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interface {
    pub lo: (usize, usize),
    pub hi: (usize, usize),
    pub axis: Axis,
}

/// All interior interfaces: vertical ones first (row-major over the grid,
/// ex fastest), then horizontal ones. This fixes the global multiplier
/// ordering.
pub fn interfaces(kx: usize, ky: usize) -> Vec<Interface> {
    let mut list = Vec::with_capacity((kx.max(1) - 1) * ky + kx * (ky.max(1) - 1));
    for ey in 0..ky {
        for ex in 0..kx.saturating_sub(1) {
            list.push(Interface {
                lo: (ex, ey),
                hi: (ex + 1, ey),
                axis: Axis::X,
            });
        }
    }
    for ey in 0..ky.saturating_sub(1) {
        for ex in 0..kx {
            list.push(Interface {
                lo: (ex, ey),
                hi: (ex, ey + 1),
                axis: Axis::Y,
            });
        }
    }
    list
}

/// Global connectivity E_N: one row per interface trace DOF, +1 on the
/// lower element's outgoing flux and -1 on the matching flux of its
/// neighbor, over the stacked per-element [u; p] unknowns.
pub fn connectivity_en(mesh: &Mesh, n: usize) -> Result<IntMatrix> {
    let layout = LocalDofLayout::new(n)?;
    let (kx, ky) = (mesh.kx(), mesh.ky());
    let ifaces = interfaces(kx, ky);
    let n_loc = layout.n_loc();
    let mut m = IntMatrix::new(n * ifaces.len(), kx * ky * n_loc);
    let elem_id = |(ex, ey): (usize, usize)| ey * kx + ex;
    for (f, iface) in ifaces.iter().enumerate() {
        let lo_off = elem_id(iface.lo) * n_loc;
        let hi_off = elem_id(iface.hi) * n_loc;
        for k in 0..n {
            let row = f * n + k;
            match iface.axis {
                Axis::X => {
                    m.push(row, lo_off + layout.ux_index(n, k + 1), 1);
                    m.push(row, hi_off + layout.ux_index(0, k + 1), -1);
                }
                Axis::Y => {
                    m.push(row, lo_off + layout.uy_index(k + 1, n), 1);
                    m.push(row, hi_off + layout.uy_index(k + 1, 0), -1);
                }
            }
        }
    }
    Ok(m)
}

/// Total unknowns (fluxes + pressures + multipliers) and multiplier count
/// for a 2D grid of kx * ky elements of degree N.
pub fn count_dofs_2d(kx: usize, ky: usize, n: usize) -> (u64, u64) {
    let (kx, ky, n) = (kx as u64, ky as u64, n as u64);
    let n_loc = 2 * n * (n + 1) + n * n;
    let ifaces = (kx - 1) * ky + kx * (ky - 1);
    let n_lambda = n * ifaces;
    (kx * ky * n_loc + n_lambda, n_lambda)
}

/// 3D analogue of [`count_dofs_2d`]: hexahedral elements with face fluxes
/// (3 N^2 (N + 1) per element), N^3 volume pressures, and N^2 multipliers
/// per interior face.
pub fn count_dofs_3d(kx: usize, ky: usize, kz: usize, n: usize) -> (u64, u64) {
    let (kx, ky, kz, n) = (kx as u64, ky as u64, kz as u64, n as u64);
    let n_loc = 3 * n * n * (n + 1) + n * n * n;
    let ifaces = (kx - 1) * ky * kz + kx * (ky - 1) * kz + kx * ky * (kz - 1);
    let n_lambda = n * n * ifaces;
    (kx * ky * kz * n_loc + n_lambda, n_lambda)
}
