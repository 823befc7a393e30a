use std::sync::Arc;

use super::{ForcingMode, ProblemSpec, RegionData};
use crate::error::{Error, Result};
use crate::geometry::{Curve, GraphCurve, Point2, Rect, Vector2};
use crate::mesh::{BaseMesh, CurvedMeshOptions, MeshFamily};

pub const BUILTIN_IDS: std::ops::RangeInclusive<u32> = 1..=10;

/// Tunable parameters of the built-in problems. `b` is the coefficient
/// contrast of problems 1 and 3, `kappa` the wavenumber of problem 2.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProblemParams {
    pub b: Option<f64>,
    pub kappa: Option<f64>,
}

fn r2(p: &Point2) -> f64 {
    p.x * p.x + p.y * p.y
}

fn square() -> Rect {
    Rect::new(-1.0, 1.0, -1.0, 1.0)
}

fn wide() -> Rect {
    Rect::new(-1.0, 3.0, -1.0, 1.0)
}

fn circle() -> Curve {
    Curve::Circle {
        center: Point2::origin(),
        radius: 0.5,
    }
}

fn smooth_graph() -> Curve {
    Curve::Graph(GraphCurve {
        split_x: 0.0,
        left: [0.0, 2.0, 1.0],
        right: [0.0, 2.0, 0.0],
    })
}

fn kinked_graph() -> Curve {
    Curve::Graph(GraphCurve {
        split_x: 0.0,
        left: [0.0, -0.5, 0.0],
        right: [0.0, 2.0, 0.0],
    })
}

fn curved_family(domain: Rect, curve: Curve, target_h: f64) -> MeshFamily {
    MeshFamily::new(
        domain,
        Some(curve),
        BaseMesh::Curved {
            target_h,
            options: CurvedMeshOptions::default(),
        },
    )
}

fn structured_family(domain: Rect, curve: Curve, n: usize) -> MeshFamily {
    MeshFamily::new(
        domain,
        Some(curve),
        BaseMesh::Structured { n, samples: None },
    )
}

fn region(
    coefficient: (super::ScalarField, super::VectorField),
    solution: impl Fn(&Point2) -> f64 + Send + Sync + 'static,
    gradient: impl Fn(&Point2) -> Vector2 + Send + Sync + 'static,
    laplacian: impl Fn(&Point2) -> f64 + Send + Sync + 'static,
) -> RegionData {
    RegionData {
        coefficient: coefficient.0,
        coefficient_gradient: coefficient.1,
        solution: Arc::new(solution),
        gradient: Arc::new(gradient),
        laplacian: Arc::new(laplacian),
        helmholtz_k2: 0.0,
    }
}

fn constant(value: f64) -> RegionData {
    region(
        RegionData::constant_coefficient(1.0),
        move |_| value,
        |_| Vector2::zeros(),
        |_| 0.0,
    )
}

// A = (xy + 2) / 5
fn a_bilinear() -> (super::ScalarField, super::VectorField) {
    (
        Arc::new(|p| (p.x * p.y + 2.0) / 5.0),
        Arc::new(|p| Vector2::new(p.y, p.x) / 5.0),
    )
}

// A = (x² - y² + 3) / 7
fn a_saddle() -> (super::ScalarField, super::VectorField) {
    (
        Arc::new(|p| (p.x * p.x - p.y * p.y + 3.0) / 7.0),
        Arc::new(|p| Vector2::new(2.0 * p.x, -2.0 * p.y) / 7.0),
    )
}

// A = 2 + sin(x + y)
fn a_wave() -> (super::ScalarField, super::VectorField) {
    (
        Arc::new(|p| 2.0 + (p.x + p.y).sin()),
        Arc::new(|p| Vector2::repeat((p.x + p.y).cos())),
    )
}

/// sin(s) for s = x + y <= 0, s otherwise; C² across s = 0.
fn v_sine_c2(a: (super::ScalarField, super::VectorField)) -> RegionData {
    region(
        a,
        |p| {
            let s = p.x + p.y;
            if s <= 0.0 {
                s.sin()
            } else {
                s
            }
        },
        |p| {
            let s = p.x + p.y;
            Vector2::repeat(if s <= 0.0 { s.cos() } else { 1.0 })
        },
        |p| {
            let s = p.x + p.y;
            if s <= 0.0 {
                -2.0 * s.sin()
            } else {
                0.0
            }
        },
    )
}

/// sin(s) + cos(s) for s <= 0, s + 1 otherwise; C¹ across s = 0.
fn v_sine_c1(a: (super::ScalarField, super::VectorField)) -> RegionData {
    region(
        a,
        |p| {
            let s = p.x + p.y;
            if s <= 0.0 {
                s.sin() + s.cos()
            } else {
                s + 1.0
            }
        },
        |p| {
            let s = p.x + p.y;
            Vector2::repeat(if s <= 0.0 { s.cos() - s.sin() } else { 1.0 })
        },
        |p| {
            let s = p.x + p.y;
            if s <= 0.0 {
                -2.0 * (s.sin() + s.cos())
            } else {
                0.0
            }
        },
    )
}

/// r^{5/3} + sin(x + y); singular derivatives at the origin.
fn v_singular() -> RegionData {
    region(
        a_wave(),
        |p| r2(p).powf(5.0 / 6.0) + (p.x + p.y).sin(),
        |p| p.coords * (5.0 / 3.0 * r2(p).powf(-1.0 / 6.0)) + Vector2::repeat((p.x + p.y).cos()),
        |p| 25.0 / 9.0 * r2(p).powf(-1.0 / 6.0) - 2.0 * (p.x + p.y).sin(),
    )
}

/// One of the ten benchmark problems, with default forcing mode.
pub fn builtin_problem(id: u32, params: &ProblemParams) -> Result<ProblemSpec> {
    let mut singular_point = None;
    let (name, domain, interface, regions, family) = match id {
        1 => {
            let b = params.b.unwrap_or(10.0);
            if !(b > 0.0) {
                return Err(Error::Validation(format!("b must be positive, got {b}")));
            }
            let c = 0.25 * (1.0 - 1.0 / (8.0 * b) - 1.0 / b);
            let outer = region(
                RegionData::constant_coefficient(b),
                move |p| {
                    let r2 = r2(p);
                    -(c + r2 * r2 / 2.0 + r2) / b
                },
                move |p| -p.coords * ((2.0 * r2(p) + 2.0) / b),
                move |p| -(8.0 * r2(p) + 4.0) / b,
            );
            let inner = region(
                RegionData::constant_coefficient(2.0),
                |p| 1.0 - r2(p),
                |p| -2.0 * p.coords,
                |_| -4.0,
            );
            (
                format!("circular interface, b = {b}"),
                square(),
                circle(),
                [outer, inner],
                curved_family(square(), circle(), 0.30),
            )
        }
        2 => {
            let k = params.kappa.unwrap_or(2.0);
            let mut outer = region(
                RegionData::constant_coefficient(1.0),
                move |p| -(k * p.x).sin() * (k * p.y).cos(),
                move |p| {
                    Vector2::new(
                        -k * (k * p.x).cos() * (k * p.y).cos(),
                        k * (k * p.x).sin() * (k * p.y).sin(),
                    )
                },
                move |p| 2.0 * k * k * (k * p.x).sin() * (k * p.y).cos(),
            );
            outer.helmholtz_k2 = 10.0 * k * k;
            let mut inner = region(
                RegionData::constant_coefficient(10.0),
                |p| -r2(p),
                |p| -2.0 * p.coords,
                |_| -4.0,
            );
            inner.helmholtz_k2 = k * k;
            // the higher wavenumber is run on meshes half the size
            let target = if k > 4.0 { 0.16 } else { 0.32 };
            (
                format!("Helmholtz circular interface, kappa = {k}"),
                square(),
                circle(),
                [outer, inner],
                curved_family(square(), circle(), target),
            )
        }
        3 => {
            let b = params.b.unwrap_or(10.0);
            if !(b > 0.0) {
                return Err(Error::Validation(format!("b must be positive, got {b}")));
            }
            let ellipse = Curve::Ellipse {
                center: Point2::origin(),
                semi_x: 10.0 / 27.0,
                semi_y: 18.0 / 27.0,
            };
            let outer = region(
                RegionData::constant_coefficient(1.0),
                |p| 5.0 * (-r2(p)).exp(),
                |p| -10.0 * (-r2(p)).exp() * p.coords,
                |p| 20.0 * (-r2(p)).exp() * (r2(p) - 1.0),
            );
            let inner = region(
                RegionData::constant_coefficient(b),
                |p| p.x.exp() * p.y.cos(),
                |p| Vector2::new(p.x.exp() * p.y.cos(), -p.x.exp() * p.y.sin()),
                |_| 0.0,
            );
            (
                format!("elliptic interface, b = {b}"),
                square(),
                ellipse,
                [outer, inner],
                curved_family(square(), ellipse, 0.28),
            )
        }
        4 => {
            let flower = Curve::PolarFlower {
                center: Point2::origin(),
                base: 0.5,
                amplitude: 1.0 / 7.0,
                petals: 5.0,
            };
            let outer = region(
                RegionData::constant_coefficient(10.0),
                |p| 0.1 * r2(p) * r2(p) - 0.01 * (2.0 * r2(p).sqrt()).ln(),
                |p| p.coords * (0.4 * r2(p) - 0.01 / r2(p)),
                |p| 1.6 * r2(p),
            );
            let inner = region(
                RegionData::constant_coefficient(1.0),
                |p| r2(p).exp(),
                |p| 2.0 * r2(p).exp() * p.coords,
                |p| 4.0 * (1.0 + r2(p)) * r2(p).exp(),
            );
            (
                "flower interface".to_string(),
                square(),
                flower,
                [outer, inner],
                curved_family(square(), flower, 0.25),
            )
        }
        5..=7 => {
            let (u, v, domain) = match id {
                5 => (2.0, v_sine_c2(a_saddle()), square()),
                6 => (2.0, v_sine_c1(a_saddle()), square()),
                _ => (8.0, v_singular(), wide()),
            };
            let mut outer = constant(u);
            if id == 7 {
                singular_point = Some(Point2::origin());
            } else {
                let a = a_bilinear();
                outer.coefficient = a.0;
                outer.coefficient_gradient = a.1;
            }
            (
                format!("smooth graph interface, case {id}"),
                domain,
                smooth_graph(),
                [outer, v],
                structured_family(domain, smooth_graph(), 2),
            )
        }
        8..=10 => {
            let v = match id {
                8 => v_sine_c2(a_saddle()),
                9 => v_sine_c1(a_saddle()),
                _ => v_singular(),
            };
            let mut outer = constant(8.0);
            if id == 10 {
                singular_point = Some(Point2::origin());
            } else {
                let a = a_bilinear();
                outer.coefficient = a.0;
                outer.coefficient_gradient = a.1;
            }
            (
                format!("kinked graph interface, case {id}"),
                wide(),
                kinked_graph(),
                [outer, v],
                structured_family(wide(), kinked_graph(), 2),
            )
        }
        _ => return Err(Error::UnknownProblem(id)),
    };
    Ok(ProblemSpec {
        name,
        domain,
        interface,
        regions,
        forcing_mode: ForcingMode::default(),
        singular_point,
        family,
    })
}
