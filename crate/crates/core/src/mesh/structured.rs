use spade::{ConstrainedDelaunayTriangulation, Triangulation};

use super::{label_components, TriMesh, Triangle};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Polyline, Rect, RegionId};

/// Uniform right-triangle grid on `domain` with `n` cells per unit length,
/// with the interface polyline (if any) inserted as constrained edges.
///
/// Interior grid points closer than 0.3 grid spacings to the polyline (and
/// boundary points that close to where it leaves the domain) are dropped and
/// the neighbourhood is re-triangulated (constrained Delaunay), so every
/// polyline segment ends up as a mesh edge. Polyline segments longer than
/// the grid spacing are subdivided first. Triangles are labelled per
/// connected component by `region_of` at their centroids.
pub fn generate_structured_fitted(
    domain: &Rect,
    n: usize,
    polyline: &Polyline,
    region_of: impl Fn(&Point2) -> RegionId,
) -> Result<TriMesh> {
    if n == 0 {
        return Err(Error::Generation("need at least one subdivision".into()));
    }
    let nx = (domain.width() * n as f64).round().max(1.0) as usize;
    let ny = (domain.height() * n as f64).round().max(1.0) as usize;
    let hx = domain.width() / nx as f64;
    let hy = domain.height() / ny as f64;
    let grid_point = |i: usize, j: usize| {
        Point2::new(domain.x_min + hx * i as f64, domain.y_min + hy * j as f64)
    };

    if polyline.points.len() < 2 {
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push(grid_point(i, j));
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                for tri in [[a, b, c], [a, c, d]] {
                    let centroid = Point2::from(
                        (vertices[tri[0]].coords
                            + vertices[tri[1]].coords
                            + vertices[tri[2]].coords)
                            / 3.0,
                    );
                    triangles.push(Triangle {
                        vertices: tri,
                        region: region_of(&centroid),
                    });
                }
            }
        }
        return TriMesh::from_triangles(vertices, triangles);
    }

    let spacing = hx.min(hy);
    let tol = 1e-9 * domain.diameter();
    if !polyline.is_simple() {
        return Err(Error::Generation(
            "interface polyline self-intersects".into(),
        ));
    }
    if let Some(p) = polyline.points.iter().find(|p| !domain.contains(p, tol)) {
        return Err(Error::Generation(format!(
            "polyline vertex {p:?} is outside the domain"
        )));
    }

    // Subdivide long polyline segments.
    let mut fine = Polyline {
        points: Vec::new(),
        closed: polyline.closed,
    };
    let segs: Vec<_> = polyline.segments().collect();
    for &(a, b) in &segs {
        let pa = polyline.points[a];
        let pb = polyline.points[b];
        let k = ((pb - pa).norm() / spacing - 1e-9).ceil().max(1.0) as usize;
        for s in 0..k {
            fine.points.push(pa + (pb - pa) * (s as f64 / k as f64));
        }
    }
    if !polyline.closed {
        fine.points
            .push(*polyline.points.last().expect("non-empty"));
    }
    for p in &mut fine.points {
        *p = domain.snap(p, tol);
    }

    let exits: Vec<Point2> = fine
        .points
        .iter()
        .filter(|q| domain.on_boundary(q, tol))
        .copied()
        .collect();
    let near_exit = |p: &Point2| exits.iter().any(|q| (q - p).norm() < 0.3 * spacing);
    let mut points: Vec<Point2> = fine.points.clone();
    for j in 0..=ny {
        for i in 0..=nx {
            let p = grid_point(i, j);
            let d = fine.distance(&p);
            let coincident = fine.points.iter().any(|q| (q - p).norm() <= tol);
            if coincident || d >= 0.3 * spacing {
                if !coincident {
                    points.push(p);
                }
            } else if domain.on_boundary(&p, tol) && (is_corner(domain, &p, tol) || !near_exit(&p))
            {
                // corners keep the hull rectangular; other boundary points
                // stay unless the interface leaves the domain next to them
                points.push(p);
            }
        }
    }
    // Where the interface runs close to a side, mirror its vertices onto the
    // side so the thin strip between them splits into near-right triangles.
    let sides = [
        (Point2::new(domain.x_min, 0.0), true),
        (Point2::new(domain.x_max, 0.0), true),
        (Point2::new(0.0, domain.y_min), false),
        (Point2::new(0.0, domain.y_max), false),
    ];
    for i in 0..fine.points.len() {
        let p = fine.points[i];
        if domain.on_boundary(&p, tol) {
            continue;
        }
        for &(s, vertical) in &sides {
            let q = if vertical {
                Point2::new(s.x, p.y)
            } else {
                Point2::new(p.x, s.y)
            };
            if (q - p).norm() < 0.5 * spacing
                && !near_exit(&q)
                && points
                    .iter()
                    .filter(|r| domain.on_boundary(r, tol))
                    .all(|r| (r - q).norm() >= 0.25 * spacing)
            {
                points.push(q);
            }
        }
    }
    let constraints: Vec<[usize; 2]> = fine.segments().map(|(a, b)| [a, b]).collect();
    triangulate_constrained(points, &constraints, region_of)
}

fn is_corner(domain: &Rect, p: &Point2, tol: f64) -> bool {
    let on_x = (p.x - domain.x_min).abs() <= tol || (p.x - domain.x_max).abs() <= tol;
    let on_y = (p.y - domain.y_min).abs() <= tol || (p.y - domain.y_max).abs() <= tol;
    on_x && on_y
}

/// Constrained Delaunay triangulation of `points` with the given constraint
/// segments, labelled by connected component.
pub(crate) fn triangulate_constrained(
    points: Vec<Point2>,
    constraints: &[[usize; 2]],
    region_of: impl Fn(&Point2) -> RegionId,
) -> Result<TriMesh> {
    let spade_points: Vec<spade::Point2<f64>> = points
        .iter()
        .map(|p| spade::Point2::new(p.x, p.y))
        .collect();
    let cdt = ConstrainedDelaunayTriangulation::<spade::Point2<f64>>::bulk_load_cdt(
        spade_points,
        constraints.to_vec(),
    )
    .map_err(|e| Error::Generation(format!("constrained triangulation failed: {e:?}")))?;
    mesh_from_cdt(&cdt, region_of)
}

pub(crate) fn mesh_from_cdt(
    cdt: &ConstrainedDelaunayTriangulation<spade::Point2<f64>>,
    region_of: impl Fn(&Point2) -> RegionId,
) -> Result<TriMesh> {
    if cdt.num_vertices() != cdt.vertices().count() {
        return Err(Error::Generation(
            "duplicate points in triangulation".into(),
        ));
    }
    let vertices: Vec<Point2> = cdt
        .vertices()
        .map(|v| {
            let p = v.position();
            Point2::new(p.x, p.y)
        })
        .collect();
    let mut tris: Vec<[usize; 3]> = cdt
        .inner_faces()
        .map(|f| {
            let [a, b, c] = f.vertices();
            [a.fix().index(), b.fix().index(), c.fix().index()]
        })
        .collect();
    super::remove_slivers(&vertices, &mut tris)?;
    let mut constrained = std::collections::HashSet::new();
    for e in cdt.undirected_edges() {
        if e.is_constraint_edge() {
            let [a, b] = e.vertices();
            let (a, b) = (a.fix().index(), b.fix().index());
            constrained.insert((a.min(b), a.max(b)));
        }
    }
    let labels = label_components(
        &vertices,
        &tris,
        |a, b| constrained.contains(&(a.min(b), a.max(b))),
        region_of,
    );
    let triangles = tris
        .into_iter()
        .zip(labels)
        .map(|(vertices, region)| Triangle { vertices, region })
        .collect();
    TriMesh::from_triangles(vertices, triangles)
}
