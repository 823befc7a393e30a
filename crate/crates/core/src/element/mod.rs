//! Element-local weak Galerkin kernels on a single triangle: the RT0 basis,
//! the discrete weak gradient, L2 projections and the RT0 interpolant.

pub mod quadrature;

use nalgebra::{Matrix3, Matrix3x4, Matrix4, Vector3};

pub use quadrature::{integrate_edge, QuadratureRule, GAUSS3};

use crate::error::{Error, Result};
use crate::geometry::{signed_area, Point2, Vector2};

/// Lowest-order Raviart-Thomas basis on a counterclockwise triangle.
///
/// Local edge `i` is opposite vertex `i` and runs from vertex `i+1` to
/// vertex `i+2`. `phi_i(x) = (x - p_i) / (2|K|)` carries unit outward flux
/// through edge `i` and none through the others.
#[derive(Clone, Debug, PartialEq)]
pub struct RT0Basis {
    pub vertices: [Point2; 3],
    pub area: f64,
    pub edge_lengths: [f64; 3],
    pub normals: [Vector2; 3],
}

impl RT0Basis {
    pub fn new(vertices: [Point2; 3]) -> Result<Self> {
        let area = signed_area(&vertices[0], &vertices[1], &vertices[2]);
        let scale = (0..3)
            .map(|i| (vertices[(i + 1) % 3] - vertices[i]).norm_squared())
            .fold(0.0, f64::max);
        if !(area > 1e-14 * scale) {
            return Err(Error::Validation(format!(
                "triangle {vertices:?} is degenerate or clockwise"
            )));
        }
        let mut edge_lengths = [0.0; 3];
        let mut normals = [Vector2::zeros(); 3];
        for i in 0..3 {
            let t = vertices[(i + 2) % 3] - vertices[(i + 1) % 3];
            edge_lengths[i] = t.norm();
            normals[i] = Vector2::new(t.y, -t.x) / edge_lengths[i];
        }
        Ok(RT0Basis {
            vertices,
            area,
            edge_lengths,
            normals,
        })
    }

    /// Endpoints of local edge `i`.
    pub fn edge(&self, i: usize) -> [Point2; 2] {
        [self.vertices[(i + 1) % 3], self.vertices[(i + 2) % 3]]
    }

    pub fn phi(&self, i: usize, x: &Point2) -> Vector2 {
        (x - self.vertices[i]) / (2.0 * self.area)
    }

    pub fn centroid(&self) -> Point2 {
        let [a, b, c] = self.vertices;
        Point2::from((a.coords + b.coords + c.coords) / 3.0)
    }
}

/// Coefficients of an RT0 field in the unit-flux basis.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RT0Field {
    pub coefficients: [f64; 3],
}

impl RT0Field {
    /// Constant divergence over the triangle.
    pub fn divergence(&self, basis: &RT0Basis) -> f64 {
        self.coefficients.iter().sum::<f64>() / basis.area
    }
}

/// Local weak function: one cell value and one value per local edge.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LocalWG {
    pub w0: f64,
    pub wb: [f64; 3],
}

/// `M_ij = ∫_K a φ_i·φ_j` with the degree-4 rule.
pub fn rt0_mass_matrix(
    basis: &RT0Basis,
    coefficient: impl Fn(&Point2) -> f64,
) -> Result<Matrix3<f64>> {
    let mut m = Matrix3::zeros();
    for (p, w) in QuadratureRule::degree4().map(&basis.vertices, basis.area) {
        let a = coefficient(&p);
        let phi = [0, 1, 2].map(|i| basis.phi(i, &p));
        for i in 0..3 {
            for j in i..3 {
                m[(i, j)] += w * a * phi[i].dot(&phi[j]);
            }
        }
    }
    for i in 0..3 {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    if !m.iter().all(|v: &f64| v.is_finite()) || m.cholesky().is_none() {
        return Err(Error::Validation(
            "RT0 mass matrix is not positive definite".into(),
        ));
    }
    Ok(m)
}

/// Maps local values `(w0, wb_0, wb_1, wb_2)` to RT0 coefficients of the
/// weak gradient: `L = M(1)^{-1} [-1 | I]`.
pub fn gradient_operator(basis: &RT0Basis) -> Result<Matrix3x4<f64>> {
    let m = rt0_mass_matrix(basis, |_| 1.0)?;
    let inv = m
        .cholesky()
        .ok_or_else(|| Error::Validation("singular RT0 mass matrix".into()))?
        .inverse();
    let b = Matrix3x4::new(
        -1.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 1.0, 0.0, //
        -1.0, 0.0, 0.0, 1.0,
    );
    Ok(inv * b)
}

/// Discrete weak gradient: the RT0 field `g` with
/// `∫_K g·q = -∫_K w0 div q + ∫_∂K wb q·n` for every RT0 `q`.
pub fn weak_gradient(basis: &RT0Basis, w: &LocalWG) -> Result<RT0Field> {
    let m = rt0_mass_matrix(basis, |_| 1.0)?;
    let b = Vector3::new(w.wb[0] - w.w0, w.wb[1] - w.w0, w.wb[2] - w.w0);
    let c = m
        .cholesky()
        .ok_or_else(|| Error::Validation("singular RT0 mass matrix".into()))?
        .solve(&b);
    Ok(RT0Field {
        coefficients: [c[0], c[1], c[2]],
    })
}

/// Local weak Galerkin stiffness `Lᵀ M_A L` on `(w0, wb_0, wb_1, wb_2)`.
pub fn local_stiffness(
    basis: &RT0Basis,
    coefficient: impl Fn(&Point2) -> f64,
) -> Result<Matrix4<f64>> {
    let l = gradient_operator(basis)?;
    let ma = rt0_mass_matrix(basis, coefficient)?;
    let s = l.transpose() * ma * l;
    Ok((s + s.transpose()) * 0.5)
}

/// Cell average by the degree-4 rule.
pub fn project_cell(f: impl Fn(&Point2) -> f64, triangle: &[Point2; 3]) -> f64 {
    QuadratureRule::degree4()
        .points
        .iter()
        .zip(&QuadratureRule::degree4().weights)
        .map(|(l, w)| {
            let p =
                triangle[0].coords * l[0] + triangle[1].coords * l[1] + triangle[2].coords * l[2];
            w * f(&Point2::from(p))
        })
        .sum()
}

/// Edge average by three-point Gauss.
pub fn project_edge(g: impl Fn(&Point2) -> f64, a: &Point2, b: &Point2) -> f64 {
    GAUSS3.iter().map(|&(t, w)| w * g(&(a + (b - a) * t))).sum()
}

/// RT0 interpolant: `c_i = ∫_{e_i} q·n_i`.
pub fn rt0_interpolate(q: impl Fn(&Point2) -> Vector2, basis: &RT0Basis) -> RT0Field {
    let mut c = [0.0; 3];
    for (i, ci) in c.iter_mut().enumerate() {
        let [a, b] = basis.edge(i);
        let n = basis.normals[i];
        *ci = integrate_edge(&a, &b, |p| q(p).dot(&n));
    }
    RT0Field { coefficients: c }
}

pub fn eval_rt0(field: &RT0Field, basis: &RT0Basis, x: &Point2) -> Vector2 {
    (0..3)
        .map(|i| basis.phi(i, x) * field.coefficients[i])
        .fold(Vector2::zeros(), |acc, v| acc + v)
}
