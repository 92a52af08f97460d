//! Tensor-product quadrilateral meshes with an optional smooth deformation.
//!
//! The domain is a rectangle split into `kx * ky` congruent cells. Each
//! element maps the reference square [-1, 1]^2 first affinely into the
//! undeformed grid, then through a global deformation of the whole domain:
//!
//! ```text
//! x = x^ + c Lx sin(2 pi s) sin(2 pi t),    s = (x^ - x0) / Lx,
//! y = y^ + c Ly sin(2 pi s) sin(2 pi t),    t = (y^ - y0) / Ly,
//! ```
//!
//! where (x^, y^) is the undeformed point and Lx, Ly the domain extents.
//! The deformation vanishes on the boundary, keeps elements conforming, and
//! is invertible for c < 1/(2 pi): its Jacobian determinant is
//! 1 + 2 pi c sin(2 pi (s + t)).

use crate::error::{Error, Result};
use nalgebra::Matrix2;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Mesh deformation kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Deformation {
    /// Undeformed Cartesian grid.
    Orthogonal,
    /// Global sinusoidal deformation with the given amplitude `c`.
    Curved { amplitude: f64 },
}

impl Deformation {
    pub fn amplitude(&self) -> f64 {
        match *self {
            Deformation::Orthogonal => 0.0,
            Deformation::Curved { amplitude } => amplitude,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Deformation::Orthogonal => "orthogonal",
            Deformation::Curved { .. } => "curved",
        }
    }
}

/// Axis-aligned rectangular domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Mesh parameters: grid size, domain and deformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshConfig {
    pub kx: usize,
    pub ky: usize,
    pub domain: Rect,
    pub deformation: Deformation,
}

impl MeshConfig {
    /// Grid of `kx * ky` elements on the unit square.
    pub fn unit_square(kx: usize, ky: usize, deformation: Deformation) -> Self {
        Self {
            kx,
            ky,
            domain: Rect::UNIT,
            deformation,
        }
    }
}

/// A validated element grid. Construction fails if the deformation makes any
/// element degenerate (nonpositive Jacobian determinant at a sample point).
#[derive(Debug, Clone)]
pub struct Mesh {
    config: MeshConfig,
    hx: f64,
    hy: f64,
}

impl Mesh {
    pub fn build(config: MeshConfig) -> Result<Self> {
        if config.kx == 0 || config.ky == 0 {
            return Err(Error::InvalidMesh(format!(
                "element counts must be positive, got {} x {}",
                config.kx, config.ky
            )));
        }
        if !(config.domain.width() > 0.0) || !(config.domain.height() > 0.0) {
            return Err(Error::InvalidMesh("domain has nonpositive extent".into()));
        }
        if config.deformation.amplitude() < 0.0 {
            return Err(Error::InvalidMesh(format!(
                "deformation amplitude must be nonnegative, got {}",
                config.deformation.amplitude()
            )));
        }
        let mesh = Self {
            config,
            hx: config.domain.width() / config.kx as f64,
            hy: config.domain.height() / config.ky as f64,
        };
        mesh.validate_jacobians()?;
        Ok(mesh)
    }

    /// Check det J > 0 at a fixed sample grid (Gauss points plus the element
    /// corners) in every element.
    fn validate_jacobians(&self) -> Result<()> {
        let (gauss, _) = crate::polybasis::gauss_legendre(15)?;
        let mut samples = vec![-1.0, 1.0];
        samples.extend_from_slice(&gauss);
        for elem in self.elements() {
            elem.check_points(samples.iter().flat_map(|&xi| {
                samples.iter().map(move |&eta| (xi, eta))
            }))?;
        }
        Ok(())
    }

    /// Re-validate det J > 0 at the tensor grid of the given 1D points
    /// (used by assembly with its actual quadrature rule).
    pub fn validate_at(&self, points: &[f64]) -> Result<()> {
        for elem in self.elements() {
            elem.check_points(
                points
                    .iter()
                    .flat_map(|&xi| points.iter().map(move |&eta| (xi, eta))),
            )?;
        }
        Ok(())
    }

    pub fn config(&self) -> &MeshConfig {
        &self.config
    }

    pub fn kx(&self) -> usize {
        self.config.kx
    }

    pub fn ky(&self) -> usize {
        self.config.ky
    }

    pub fn num_elements(&self) -> usize {
        self.config.kx * self.config.ky
    }

    /// Mapping of element (ex, ey), 0-based grid coordinates.
    pub fn element(&self, ex: usize, ey: usize) -> ElementMap {
        debug_assert!(ex < self.config.kx && ey < self.config.ky);
        ElementMap {
            ex,
            ey,
            x0: self.config.domain.x0 + ex as f64 * self.hx,
            y0: self.config.domain.y0 + ey as f64 * self.hy,
            hx: self.hx,
            hy: self.hy,
            domain: self.config.domain,
            amplitude: self.config.deformation.amplitude(),
        }
    }

    /// Element by flat id `ey * kx + ex` (row-major over the grid).
    pub fn element_by_id(&self, id: usize) -> ElementMap {
        self.element(id % self.config.kx, id / self.config.kx)
    }

    /// Elements in flat-id order.
    pub fn elements(&self) -> impl Iterator<Item = ElementMap> + '_ {
        (0..self.num_elements()).map(|id| self.element_by_id(id))
    }
}

/// Mapping from the reference square [-1, 1]^2 to one physical element.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    ex: usize,
    ey: usize,
    x0: f64,
    y0: f64,
    hx: f64,
    hy: f64,
    domain: Rect,
    amplitude: f64,
}

impl ElementMap {
    /// Grid coordinates (ex, ey) of this element.
    pub fn index(&self) -> (usize, usize) {
        (self.ex, self.ey)
    }

    /// Physical coordinates of the reference point (xi, eta).
    pub fn map(&self, xi: f64, eta: f64) -> (f64, f64) {
        let xh = self.x0 + self.hx * (xi + 1.0) / 2.0;
        let yh = self.y0 + self.hy * (eta + 1.0) / 2.0;
        if self.amplitude == 0.0 {
            return (xh, yh);
        }
        let lx = self.domain.width();
        let ly = self.domain.height();
        let s = (xh - self.domain.x0) / lx;
        let t = (yh - self.domain.y0) / ly;
        let g = (TWO_PI * s).sin() * (TWO_PI * t).sin();
        (xh + self.amplitude * lx * g, yh + self.amplitude * ly * g)
    }

    /// Jacobian matrix d(x, y)/d(xi, eta) and its determinant at (xi, eta).
    pub fn jacobian(&self, xi: f64, eta: f64) -> (Matrix2<f64>, f64) {
        let ax = self.hx / 2.0;
        let ay = self.hy / 2.0;
        if self.amplitude == 0.0 {
            return (Matrix2::new(ax, 0.0, 0.0, ay), ax * ay);
        }
        let xh = self.x0 + self.hx * (xi + 1.0) / 2.0;
        let yh = self.y0 + self.hy * (eta + 1.0) / 2.0;
        let lx = self.domain.width();
        let ly = self.domain.height();
        let s = (xh - self.domain.x0) / lx;
        let t = (yh - self.domain.y0) / ly;
        let c = self.amplitude;
        let (ss, cs) = (TWO_PI * s).sin_cos();
        let (st, ct) = (TWO_PI * t).sin_cos();
        // d(x, y)/d(x^, y^) of the global deformation.
        let dxdxh = 1.0 + TWO_PI * c * cs * st;
        let dxdyh = TWO_PI * c * (lx / ly) * ss * ct;
        let dydxh = TWO_PI * c * (ly / lx) * cs * st;
        let dydyh = 1.0 + TWO_PI * c * ss * ct;
        let j = Matrix2::new(dxdxh * ax, dxdyh * ay, dydxh * ax, dydyh * ay);
        (j, j.determinant())
    }

    fn check_points(&self, points: impl Iterator<Item = (f64, f64)>) -> Result<()> {
        for (xi, eta) in points {
            let (_, det) = self.jacobian(xi, eta);
            if det <= 0.0 {
                let (x, y) = self.map(xi, eta);
                return Err(Error::MeshDegenerate {
                    ex: self.ex,
                    ey: self.ey,
                    x,
                    y,
                    det,
                });
            }
        }
        Ok(())
    }
}
