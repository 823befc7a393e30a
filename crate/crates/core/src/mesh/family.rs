use super::{generate_curved_fitted, generate_structured_fitted, CurvedMeshOptions, TriMesh};
use crate::error::{Error, Result};
use crate::geometry::{Curve, GraphCurve, Point2, Polyline, Rect, RegionId};

/// How the coarsest mesh of a family is built.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseMesh {
    /// Right-triangle grid with `n` cells per unit length. The interface is
    /// sampled with chords no longer than the grid spacing unless `samples`
    /// is given.
    Structured { n: usize, samples: Option<usize> },
    /// Constrained Delaunay mesh refined to `h_max <= target_h`.
    Curved {
        target_h: f64,
        options: CurvedMeshOptions,
    },
}

/// A sequence of nested meshes: a base mesh followed by uniform
/// refinements, with new interface vertices projected onto the curve.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshFamily {
    pub domain: Rect,
    pub interface: Option<Curve>,
    pub base: BaseMesh,
}

impl MeshFamily {
    pub fn new(domain: Rect, interface: Option<Curve>, base: BaseMesh) -> Self {
        MeshFamily {
            domain,
            interface,
            base,
        }
    }

    fn region_of(&self, p: &Point2) -> RegionId {
        self.interface
            .as_ref()
            .map_or(RegionId::Region1, |c| c.region_of(p))
    }

    pub fn base_mesh(&self) -> Result<TriMesh> {
        match (&self.base, &self.interface) {
            (BaseMesh::Structured { n, .. }, None) => {
                generate_structured_fitted(&self.domain, *n, &Polyline::open(vec![]), |_| {
                    RegionId::Region1
                })
            }
            (BaseMesh::Structured { n, samples }, Some(curve)) => {
                let spacing = 1.0 / *n.max(&1) as f64;
                let poly = match (samples, curve) {
                    (Some(s), _) => curve.sample(&self.domain, *s),
                    (None, Curve::Graph(g)) => graph_grid_samples(g, curve, &self.domain, *n),
                    (None, _) => curve.sample_max_chord(&self.domain, 4, spacing),
                };
                let mesh =
                    generate_structured_fitted(&self.domain, *n, &poly, |p| self.region_of(p))?;
                super::curved::check_region_labels(&mesh, curve, 1e-9 * self.domain.diameter())?;
                Ok(mesh)
            }
            (BaseMesh::Curved { .. }, None) => Err(Error::Generation(
                "a curved base mesh needs an interface curve".into(),
            )),
            (BaseMesh::Curved { target_h, options }, Some(curve)) => generate_curved_fitted(
                &self.domain,
                *target_h,
                curve,
                |p| self.region_of(p),
                options,
            ),
        }
    }

    /// Levels `1..=count`, level 1 being the base mesh.
    pub fn levels(&self, count: usize) -> Result<Vec<TriMesh>> {
        if count == 0 {
            return Err(Error::Generation(
                "a mesh family needs at least one level".into(),
            ));
        }
        let mut meshes = vec![self.base_mesh()?];
        while meshes.len() < count {
            let level = meshes.len() + 1;
            let next = meshes
                .last()
                .expect("non-empty")
                .refine_uniform(self.interface.as_ref())
                .map_err(|e| Error::Generation(format!("level {level}: {e}")))?;
            if let Some(curve) = &self.interface {
                super::curved::check_region_labels(&next, curve, 1e-9 * self.domain.diameter())
                    .map_err(|e| Error::Generation(format!("level {level}: {e}")))?;
            }
            meshes.push(next);
        }
        Ok(meshes)
    }

    /// The single mesh at `level` (1-based).
    pub fn level(&self, level: usize) -> Result<TriMesh> {
        Ok(self.levels(level)?.pop().expect("non-empty"))
    }
}

/// Samples a graph where it crosses the grid lines of the structured mesh
/// (plus its kink and its exits from the domain), then halves chords longer
/// than the grid spacing. Boundary vertices of the grid then line up with
/// interface vertices where the graph runs close to the boundary.
fn graph_grid_samples(g: &GraphCurve, curve: &Curve, domain: &Rect, n: usize) -> Polyline {
    let clipped = curve.sample(domain, 64);
    let (first, last) = (
        clipped.points[0],
        *clipped.points.last().expect("non-empty"),
    );
    let (x0, x1) = (first.x.min(last.x), first.x.max(last.x));
    let nx = (domain.width() * n as f64).round().max(1.0) as usize;
    let ny = (domain.height() * n as f64).round().max(1.0) as usize;
    let hx = domain.width() / nx as f64;
    let hy = domain.height() / ny as f64;
    let spacing = hx.min(hy);
    let inside = |x: f64| x > x0 && x < x1;

    let mut xs = vec![x0, x1];
    if inside(g.split_x) {
        xs.push(g.split_x);
    }
    xs.extend(
        (0..=nx)
            .map(|i| domain.x_min + hx * i as f64)
            .filter(|&x| inside(x)),
    );
    for j in 0..=ny {
        let y = domain.y_min + hy * j as f64;
        // one crossing per grid column is enough; chords are refined below
        for i in 0..nx {
            let (mut a, mut b) = (
                domain.x_min + hx * i as f64,
                domain.x_min + hx * (i + 1) as f64,
            );
            let (fa, fb) = (g.value(a) - y, g.value(b) - y);
            if fa * fb >= 0.0 {
                continue;
            }
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if (g.value(m) - y) * fa > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            let x = 0.5 * (a + b);
            if inside(x) {
                xs.push(x);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|b, a| (*b - *a).abs() <= 1e-3 * spacing);
    // a crossing may have absorbed an exit; exits must stay exact
    xs[0] = x0;
    *xs.last_mut().expect("non-empty") = x1;

    let point = |x: f64| {
        if x == first.x {
            first
        } else if x == last.x {
            last
        } else {
            Point2::new(x, g.value(x))
        }
    };
    let mut points = vec![point(xs[0])];
    for w in xs.windows(2) {
        let (a, b) = (point(w[0]), point(w[1]));
        let k = (1.1 * (b - a).norm() / spacing).ceil().max(1.0) as usize;
        for s in 1..k {
            points.push(point(w[0] + (w[1] - w[0]) * s as f64 / k as f64));
        }
        points.push(b);
    }
    Polyline::open(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GraphCurve, Point2};

    #[test]
    fn structured_family_halves_h() {
        let family = MeshFamily::new(
            Rect::new(-1.0, 3.0, -1.0, 1.0),
            Some(Curve::Graph(GraphCurve {
                split_x: 0.0,
                left: [0.0, -0.5, 0.0],
                right: [0.0, 2.0, 0.0],
            })),
            BaseMesh::Structured {
                n: 2,
                samples: None,
            },
        );
        let levels = family.levels(4).unwrap();
        for pair in levels.windows(2) {
            let ratio = pair[0].h_max() / pair[1].h_max();
            assert!((1.9..=2.1).contains(&ratio), "ratio {ratio}");
        }
    }

    fn max_angle_deg(mesh: &TriMesh) -> f64 {
        let mut worst = 0.0f64;
        for t in 0..mesh.triangles().len() {
            let p = mesh.triangle_points(t);
            for i in 0..3 {
                let a = p[(i + 1) % 3] - p[i];
                let b = p[(i + 2) % 3] - p[i];
                worst = worst.max((a.dot(&b) / (a.norm() * b.norm())).acos().to_degrees());
            }
        }
        worst
    }

    #[test]
    fn cusp_at_corner_keeps_angles_bounded() {
        // y = 2x + x² meets the corner (-1, -1) tangent to the bottom side
        let curve = Curve::Graph(GraphCurve {
            split_x: 0.0,
            left: [0.0, 2.0, 1.0],
            right: [0.0, 2.0, 0.0],
        });
        let family = MeshFamily::new(
            Rect::new(-1.0, 1.0, -1.0, 1.0),
            Some(curve),
            BaseMesh::Structured {
                n: 2,
                samples: None,
            },
        );
        for (l, mesh) in family.levels(5).unwrap().iter().enumerate() {
            let worst = max_angle_deg(mesh);
            assert!(worst < 130.0, "level {}: {worst}", l + 1);
            for e in mesh.interface_edges() {
                for p in mesh.edge_points(e) {
                    assert!(curve.level_set(&p).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn graph_leaving_through_the_top_side() {
        // the grid crossing of y = 1 rounds to just above the side
        let curve = Curve::Graph(GraphCurve {
            split_x: 0.1,
            left: [0.1, -0.5, 0.0],
            right: [-0.1, 1.5, 0.0],
        });
        for n in 2..=5 {
            let family = MeshFamily::new(
                Rect::new(-1.0, 1.0, -1.0, 1.0),
                Some(curve),
                BaseMesh::Structured { n, samples: None },
            );
            let mesh = family.level(2).unwrap();
            assert!(mesh.interface_edges().count() > 0);
        }
    }

    #[test]
    fn curved_family_tracks_circle() {
        let curve = Curve::Circle {
            center: Point2::origin(),
            radius: 0.5,
        };
        let family = MeshFamily::new(
            Rect::new(-1.0, 1.0, -1.0, 1.0),
            Some(curve),
            BaseMesh::Curved {
                target_h: 0.3,
                options: CurvedMeshOptions::default(),
            },
        );
        let levels = family.levels(3).unwrap();
        let last = levels.last().unwrap();
        for e in last.interface_edges() {
            for p in last.edge_points(e) {
                assert!(curve.level_set(&p).abs() < 1e-12);
            }
        }
        assert_eq!(last.triangles().len(), 16 * levels[0].triangles().len());
    }

    #[test]
    fn curved_base_requires_curve() {
        let family = MeshFamily::new(
            Rect::new(0.0, 1.0, 0.0, 1.0),
            None,
            BaseMesh::Curved {
                target_h: 0.3,
                options: CurvedMeshOptions::default(),
            },
        );
        assert!(family.base_mesh().is_err());
    }
}
