//! Problem data: geometry, per-region coefficients and exact solutions, and
//! everything derived from them (forcing, boundary and jump data).

mod builtin;

use std::fmt;
use std::sync::Arc;

pub use builtin::{builtin_problem, ProblemParams, BUILTIN_IDS};

use crate::error::{Error, Result};
use crate::geometry::{Curve, Point2, Rect, RegionId, Vector2};
use crate::mesh::MeshFamily;

pub type ScalarField = Arc<dyn Fn(&Point2) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(&Point2) -> Vector2 + Send + Sync>;

/// Default step of the finite-difference forcing oracle.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Radius around a singular point inside which nothing may be evaluated.
pub const SINGULAR_RADIUS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ForcingMode {
    /// `-(∇A·∇u + A Δu) - k²u` from the hand-derived derivatives.
    Analytic,
    /// Fourth-order central differences of the flux `A ∇u` with step `h`.
    FiniteDifference { h: f64 },
}

impl Default for ForcingMode {
    fn default() -> Self {
        ForcingMode::FiniteDifference { h: DEFAULT_FD_STEP }
    }
}

/// Scalar coefficient and exact solution on one region. The closures are
/// analytic extensions, so they may be evaluated slightly outside the
/// region (chord approximations of a curved interface need this).
#[derive(Clone)]
pub struct RegionData {
    pub coefficient: ScalarField,
    pub coefficient_gradient: VectorField,
    pub solution: ScalarField,
    pub gradient: VectorField,
    pub laplacian: ScalarField,
    /// Squared Helmholtz wavenumber; zero for the pure elliptic case.
    pub helmholtz_k2: f64,
}

impl RegionData {
    pub fn constant_coefficient(a: f64) -> (ScalarField, VectorField) {
        (Arc::new(move |_| a), Arc::new(|_| Vector2::zeros()))
    }
}

/// A two-region interface problem. Region1 is where the interface level set
/// is positive.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Rect,
    pub interface: Curve,
    pub regions: [RegionData; 2],
    pub forcing_mode: ForcingMode,
    /// Point where the exact solution is singular, if any.
    pub singular_point: Option<Point2>,
    /// Mesh family matching the reference level sizes.
    pub family: MeshFamily,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("interface", &self.interface)
            .field("forcing_mode", &self.forcing_mode)
            .field("singular_point", &self.singular_point)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn region_of(&self, p: &Point2) -> RegionId {
        self.interface.region_of(p)
    }

    pub fn data(&self, region: RegionId) -> &RegionData {
        &self.regions[region.index()]
    }

    pub fn coefficient(&self, region: RegionId, p: &Point2) -> f64 {
        (self.data(region).coefficient)(p)
    }

    pub fn exact(&self, region: RegionId, p: &Point2) -> f64 {
        (self.data(region).solution)(p)
    }

    pub fn exact_gradient(&self, region: RegionId, p: &Point2) -> Result<Vector2> {
        self.guard(p)?;
        Ok((self.data(region).gradient)(p))
    }

    /// Exact flux `A ∇u` of one region.
    pub fn exact_flux(&self, region: RegionId, p: &Point2) -> Result<Vector2> {
        Ok(self.exact_gradient(region, p)? * self.coefficient(region, p))
    }

    fn guard(&self, p: &Point2) -> Result<()> {
        match self.singular_point {
            Some(s) if (p - s).norm() <= SINGULAR_RADIUS => Err(Error::Evaluation(format!(
                "evaluation at {p:?} is within {SINGULAR_RADIUS:e} of the singular point"
            ))),
            _ => Ok(()),
        }
    }

    /// `f = -∇·(A∇u) - k²u` for the given region's exact solution.
    pub fn forcing(&self, region: RegionId, p: &Point2) -> Result<f64> {
        self.guard(p)?;
        let d = self.data(region);
        let value = match self.forcing_mode {
            ForcingMode::Analytic => {
                -((d.coefficient_gradient)(p).dot(&(d.gradient)(p))
                    + (d.coefficient)(p) * (d.laplacian)(p))
            }
            ForcingMode::FiniteDifference { h } => {
                if let Some(s) = self.singular_point {
                    if (p - s).norm() <= 2.0 * h + SINGULAR_RADIUS {
                        return Err(Error::Evaluation(format!(
                            "finite-difference stencil at {p:?} reaches the singular point"
                        )));
                    }
                }
                let flux = |q: Point2| (d.coefficient)(&q) * (d.gradient)(&q);
                let ex = Vector2::new(h, 0.0);
                let ey = Vector2::new(0.0, h);
                let dx = (-flux(p + 2.0 * ex).x + 8.0 * flux(p + ex).x - 8.0 * flux(p - ex).x
                    + flux(p - 2.0 * ex).x)
                    / (12.0 * h);
                let dy = (-flux(p + 2.0 * ey).y + 8.0 * flux(p + ey).y - 8.0 * flux(p - ey).y
                    + flux(p - 2.0 * ey).y)
                    / (12.0 * h);
                -(dx + dy)
            }
        } - d.helmholtz_k2 * (d.solution)(p);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Evaluation(format!("forcing is not finite at {p:?}")))
        }
    }

    /// Dirichlet data of the region touching the boundary at `p`.
    pub fn boundary_value(&self, region: RegionId, p: &Point2) -> f64 {
        self.exact(region, p)
    }

    /// Solution jump `u - v` and flux jump `A1∇u·n1 + A2∇v·n2` at `p`,
    /// with `n1` the unit normal pointing out of Region1.
    pub fn jump_data(&self, p: &Point2, n1: &Vector2) -> Result<(f64, f64)> {
        let phi = self.exact(RegionId::Region1, p) - self.exact(RegionId::Region2, p);
        let psi = self.exact_flux(RegionId::Region1, p)?.dot(n1)
            - self.exact_flux(RegionId::Region2, p)?.dot(n1);
        Ok((phi, psi))
    }

    pub fn with_forcing(mut self, mode: ForcingMode) -> Self {
        self.forcing_mode = mode;
        self
    }

    /// Same geometry and coefficients with zero exact solution, so every
    /// data term (f, g, φ, ψ) vanishes.
    pub fn homogeneous(&self) -> ProblemSpec {
        let mut spec = self.clone();
        spec.name = format!("{} (homogeneous)", self.name);
        for d in &mut spec.regions {
            d.solution = Arc::new(|_| 0.0);
            d.gradient = Arc::new(|_| Vector2::zeros());
            d.laplacian = Arc::new(|_| 0.0);
        }
        spec.singular_point = None;
        spec
    }

    /// Multiplies the coefficients (and Helmholtz terms) of both regions by
    /// `s`. The exact solution is unchanged; f, ψ and fluxes scale by `s`.
    pub fn with_scaled_coefficients(&self, s: f64) -> ProblemSpec {
        let mut spec = self.clone();
        for d in &mut spec.regions {
            let a = d.coefficient.clone();
            let ga = d.coefficient_gradient.clone();
            d.coefficient = Arc::new(move |p| s * a(p));
            d.coefficient_gradient = Arc::new(move |p| ga(p) * s);
            d.helmholtz_k2 *= s;
        }
        spec
    }
}

#[cfg(test)]
mod tests;
