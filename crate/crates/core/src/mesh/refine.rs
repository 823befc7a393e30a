use super::{EdgeKind, TriMesh, Triangle};
use crate::error::{Error, Result};
use crate::geometry::{signed_area, Curve, Point2};

impl TriMesh {
    /// Uniform (red) refinement: every triangle splits into four through its
    /// edge midpoints. Midpoints of interface edges are moved onto `curve`
    /// when one is given, so the family converges to the curved interface.
    /// Children inherit their parent's region.
    pub fn refine_uniform(&self, curve: Option<&Curve>) -> Result<TriMesh> {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.reserve(self.edges.len());
        for edge in &self.edges {
            let [a, b] = edge.vertices;
            let mid = Point2::from((self.vertices[a].coords + self.vertices[b].coords) / 2.0);
            let mid = match (edge.kind, curve) {
                (EdgeKind::Interface, Some(c)) => c.project(&mid),
                _ => mid,
            };
            vertices.push(mid);
        }
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = tri.vertices;
            let [ea, eb, ec] = self.triangle_edges[t].map(|e| nv + e);
            for child in [[a, ec, eb], [ec, b, ea], [eb, ea, c], [ea, eb, ec]] {
                let area = signed_area(
                    &vertices[child[0]],
                    &vertices[child[1]],
                    &vertices[child[2]],
                );
                if area <= 0.0 {
                    return Err(Error::Generation(format!(
                        "refining triangle {t} inverted a child; the interface is under-resolved"
                    )));
                }
                triangles.push(Triangle {
                    vertices: child,
                    region: tri.region,
                });
            }
        }
        TriMesh::from_triangles(vertices, triangles)
    }
}

#[cfg(test)]
mod tests {
    use crate::geometry::{Curve, Point2, Polyline, Rect};
    use crate::mesh::generate_structured_fitted;

    #[test]
    fn refinement_quadruples_and_halves() {
        let domain = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let curve = Curve::VerticalLine { x0: 0.0 };
        let m = generate_structured_fitted(&domain, 2, &curve.sample(&domain, 4), |p| {
            curve.region_of(p)
        })
        .unwrap();
        let r = m.refine_uniform(Some(&curve)).unwrap();
        assert_eq!(r.triangles().len(), 4 * m.triangles().len());
        assert_eq!(r.interface_edges().count(), 2 * m.interface_edges().count());
        assert!((r.h_max() - m.h_max() / 2.0).abs() < 1e-14);
        let area: f64 = (0..r.triangles().len()).map(|t| r.area(t)).sum();
        assert!((area - 4.0).abs() < 1e-12);
    }

    #[test]
    fn curved_midpoints_are_projected() {
        let domain = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let curve = Curve::Circle {
            center: Point2::origin(),
            radius: 0.5,
        };
        let poly: Polyline = curve.sample(&domain, 24);
        let m = generate_structured_fitted(&domain, 4, &poly, |p| curve.region_of(p)).unwrap();
        let r = m.refine_uniform(Some(&curve)).unwrap();
        for e in r.interface_edges() {
            for p in r.edge_points(e) {
                assert!(curve.level_set(&p).abs() < 1e-13);
            }
        }
    }
}
