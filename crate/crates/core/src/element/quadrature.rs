//! Triangle and edge quadrature rules.

#![allow(clippy::excessive_precision)]

use crate::geometry::Point2;

/// Quadrature on a triangle in barycentric coordinates. Weights are
/// relative to the triangle area and sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    /// Six-point symmetric rule, exact for degree 4.
    pub fn degree4() -> Self {
        const A1: f64 = 0.445_948_490_915_964_886_318;
        const B1: f64 = 0.108_103_018_168_070_227_364;
        const W1: f64 = 0.223_381_589_678_011_465_944;
        const A2: f64 = 0.091_576_213_509_770_743_460;
        const B2: f64 = 0.816_847_572_980_458_513_080;
        const W2: f64 = 0.109_951_743_655_321_867_389;
        QuadratureRule {
            points: vec![
                [A1, A1, B1],
                [A1, B1, A1],
                [B1, A1, A1],
                [A2, A2, B2],
                [A2, B2, A2],
                [B2, A2, A2],
            ],
            weights: vec![W1, W1, W1, W2, W2, W2],
            degree: 4,
        }
    }

    /// Three interior points, exact for degree 2.
    pub fn degree2() -> Self {
        const A: f64 = 1.0 / 6.0;
        const B: f64 = 2.0 / 3.0;
        QuadratureRule {
            points: vec![[B, A, A], [A, B, A], [A, A, B]],
            weights: vec![1.0 / 3.0; 3],
            degree: 2,
        }
    }

    /// Physical quadrature points and area-scaled weights on a triangle.
    pub fn map(&self, tri: &[Point2; 3], area: f64) -> impl Iterator<Item = (Point2, f64)> + '_ {
        let tri = *tri;
        self.points.iter().zip(&self.weights).map(move |(l, &w)| {
            let p = tri[0].coords * l[0] + tri[1].coords * l[1] + tri[2].coords * l[2];
            (Point2::from(p), w * area)
        })
    }

    pub fn integrate(&self, tri: &[Point2; 3], f: impl Fn(&Point2) -> f64) -> f64 {
        let area = crate::geometry::signed_area(&tri[0], &tri[1], &tri[2]).abs();
        self.map(tri, area).map(|(p, w)| w * f(&p)).sum()
    }
}

/// Three-point Gauss-Legendre rule on [0, 1]: (parameter, weight).
pub const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_311_48, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_688_52, 5.0 / 18.0),
];

/// Gauss points on segment `a`-`b` with length-scaled weights.
pub fn edge_points(a: &Point2, b: &Point2) -> [(Point2, f64); 3] {
    let len = (b - a).norm();
    GAUSS3.map(|(t, w)| (a + (b - a) * t, w * len))
}

pub fn integrate_edge(a: &Point2, b: &Point2, f: impl Fn(&Point2) -> f64) -> f64 {
    edge_points(a, b).iter().map(|(p, w)| w * f(p)).sum()
}
