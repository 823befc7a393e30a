use spade::{AngleLimit, ConstrainedDelaunayTriangulation, RefinementParameters, Triangulation};

use super::structured::mesh_from_cdt;
use super::TriMesh;
use crate::error::{Error, Result};
use crate::geometry::{signed_area, Curve, Point2, Rect, RegionId};

#[derive(Clone, Debug, PartialEq)]
pub struct CurvedMeshOptions {
    /// Interface sample count; defaults to `max(8, ceil(L / target_h))`
    /// for a curve of length `L`. Raised automatically until no chord is
    /// longer than `target_h`.
    pub samples: Option<usize>,
    /// Minimum angle requested from the refinement, in degrees.
    pub min_angle_deg: f64,
    /// Centroidal smoothing sweeps over free vertices (0 disables).
    pub smoothing_sweeps: usize,
}

impl Default for CurvedMeshOptions {
    fn default() -> Self {
        CurvedMeshOptions {
            samples: None,
            min_angle_deg: 25.0,
            smoothing_sweeps: 2,
        }
    }
}

/// Constrained Delaunay mesh of `domain` whose edges include the sampled
/// interface polyline, refined until `h_max <= target_h`.
pub fn generate_curved_fitted(
    domain: &Rect,
    target_h: f64,
    curve: &Curve,
    region_of: impl Fn(&Point2) -> RegionId,
    options: &CurvedMeshOptions,
) -> Result<TriMesh> {
    if !(target_h > 0.0) {
        return Err(Error::Generation("target_h must be positive".into()));
    }
    let mut samples = options
        .samples
        .unwrap_or_else(|| 8.max((curve.length(domain) / target_h).ceil() as usize));
    // chords that cut too deep into a curved region leave triangles on the
    // wrong side of the curve; sample more densely until none do
    let mut last = None;
    for _ in 0..6 {
        match generate_with_samples(domain, target_h, curve, &region_of, options, samples)? {
            Ok(mesh) => return Ok(mesh),
            Err(e) => last = Some(e),
        }
        samples *= 2;
    }
    Err(last.expect("at least one attempt"))
}

/// Outer error: generation failed. Inner error: the mesh disagrees with the
/// curve's region predicate.
fn generate_with_samples(
    domain: &Rect,
    target_h: f64,
    curve: &Curve,
    region_of: &impl Fn(&Point2) -> RegionId,
    options: &CurvedMeshOptions,
    samples: usize,
) -> Result<Result<TriMesh>> {
    let tol = 1e-9 * domain.diameter();
    let poly = curve.sample_max_chord(domain, samples, target_h);
    if poly.points.len() < 2 {
        return Err(Error::Generation(
            "interface does not intersect the domain".into(),
        ));
    }
    if !poly.is_simple() {
        return Err(Error::Generation(
            "sampled interface polyline self-intersects".into(),
        ));
    }

    let n_interface = poly.points.len();
    let mut points = poly.points.clone();
    for p in domain.boundary_points(target_h) {
        let coincident = poly.points.iter().any(|q| (q - p).norm() <= tol);
        let corner = ((p.x - domain.x_min).abs() <= tol || (p.x - domain.x_max).abs() <= tol)
            && ((p.y - domain.y_min).abs() <= tol || (p.y - domain.y_max).abs() <= tol);
        if !coincident && (corner || poly.distance(&p) >= 0.3 * target_h) {
            points.push(p);
        }
    }
    let constraints: Vec<[usize; 2]> = poly.segments().map(|(a, b)| [a, b]).collect();

    let mut max_area = 0.5 * target_h * target_h;
    for _ in 0..40 {
        let mut cdt = build(&points, &constraints)?;
        cdt.refine(
            RefinementParameters::<f64>::new()
                .keep_constraint_edges()
                .with_angle_limit(AngleLimit::from_deg(options.min_angle_deg))
                .with_max_allowed_area(max_area)
                .with_max_additional_vertices(4_000_000),
        );
        if options.smoothing_sweeps > 0 {
            cdt = smooth(
                &cdt,
                n_interface,
                domain,
                curve,
                &constraints,
                options.smoothing_sweeps,
            )?;
        }
        let h = cdt
            .undirected_edges()
            .map(|e| e.length_2().sqrt())
            .fold(0.0, f64::max);
        if h <= target_h {
            let mesh = mesh_from_cdt(&cdt, region_of)?;
            return Ok(check_region_labels(&mesh, curve, tol).map(|_| mesh));
        }
        max_area *= 0.8;
    }
    Err(Error::Generation(format!(
        "could not reach h_max <= {target_h} by refinement"
    )))
}

fn build(
    points: &[Point2],
    constraints: &[[usize; 2]],
) -> Result<ConstrainedDelaunayTriangulation<spade::Point2<f64>>> {
    let pts = points
        .iter()
        .map(|p| spade::Point2::new(p.x, p.y))
        .collect();
    ConstrainedDelaunayTriangulation::bulk_load_cdt(pts, constraints.to_vec())
        .map_err(|e| Error::Generation(format!("constrained triangulation failed: {e:?}")))
}

/// Moves every vertex that is neither on the interface nor on the outer
/// boundary to the area-weighted centroid of its incident triangles, then
/// re-triangulates. Moves that would cross the interface are skipped.
fn smooth(
    cdt: &ConstrainedDelaunayTriangulation<spade::Point2<f64>>,
    n_interface: usize,
    domain: &Rect,
    curve: &Curve,
    constraints: &[[usize; 2]],
    sweeps: usize,
) -> Result<ConstrainedDelaunayTriangulation<spade::Point2<f64>>> {
    let tol = 1e-9 * domain.diameter();
    let mut points: Vec<Point2> = cdt
        .vertices()
        .map(|v| Point2::new(v.position().x, v.position().y))
        .collect();
    let mut current = build(&points, constraints)?;
    for _ in 0..sweeps {
        let mut sum = vec![nalgebra::Vector2::<f64>::zeros(); points.len()];
        let mut weight = vec![0.0; points.len()];
        for f in current.inner_faces() {
            let idx = f.vertices().map(|v| v.fix().index());
            let [a, b, c] = idx.map(|i| points[i]);
            let area = signed_area(&a, &b, &c).abs();
            let centroid = (a.coords + b.coords + c.coords) / 3.0;
            for i in idx {
                sum[i] += centroid * area;
                weight[i] += area;
            }
        }
        for i in n_interface..points.len() {
            let p = points[i];
            if domain.on_boundary(&p, tol) || weight[i] == 0.0 {
                continue;
            }
            let q = Point2::from(sum[i] / weight[i]);
            let same_side = curve.level_set(&p).signum() == curve.level_set(&q).signum();
            if same_side && domain.contains(&q, -tol) && curve.distance_estimate(&q) > tol {
                points[i] = q;
            }
        }
        current = build(&points, constraints)?;
    }
    Ok(current)
}

/// Every triangle's centroid must classify to its stored region, and no
/// centroid may sit on the interface within `tol`.
pub(crate) fn check_region_labels(mesh: &TriMesh, curve: &Curve, tol: f64) -> Result<()> {
    for t in 0..mesh.triangles().len() {
        let c = mesh.centroid(t);
        if curve.distance_estimate(&c) <= tol {
            return Err(Error::Generation(format!(
                "centroid of triangle {t} lies on the interface; refine the interface sampling"
            )));
        }
        if curve.region_of(&c) != mesh.triangles()[t].region {
            return Err(Error::Generation(format!(
                "centroid of triangle {t} falls on the other side of the interface; \
                 refine the interface sampling"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polyline;

    fn square() -> Rect {
        Rect::new(-1.0, 1.0, -1.0, 1.0)
    }

    fn interface_polyline(mesh: &TriMesh) -> Vec<[Point2; 2]> {
        mesh.interface_edges()
            .map(|e| mesh.edge_points(e))
            .collect()
    }

    #[test]
    fn circle_mesh_meets_target() {
        let curve = Curve::Circle {
            center: Point2::origin(),
            radius: 0.5,
        };
        let m = generate_curved_fitted(
            &square(),
            0.28,
            &curve,
            |p| curve.region_of(p),
            &CurvedMeshOptions::default(),
        )
        .unwrap();
        let h = m.h_max();
        assert!(h <= 0.28);
        // comparable to the coarse circle level (h_max 2.8553e-01) within 10%
        assert!((h - 0.28553).abs() / 0.28553 < 0.10, "h_max = {h}");
        let area: f64 = (0..m.triangles().len()).map(|t| m.area(t)).sum();
        assert!((area - 4.0).abs() < 1e-6 * 4.0);
        for [a, b] in interface_polyline(&m) {
            assert!(curve.level_set(&a).abs() < 1e-12);
            assert!(curve.level_set(&b).abs() < 1e-12);
        }
    }

    #[test]
    fn flower_interface_winds_once_around_origin() {
        let curve = Curve::PolarFlower {
            center: Point2::origin(),
            base: 0.5,
            amplitude: 1.0 / 7.0,
            petals: 5.0,
        };
        let m = generate_curved_fitted(
            &square(),
            0.3,
            &curve,
            |p| curve.region_of(p),
            &CurvedMeshOptions::default(),
        )
        .unwrap();
        // chain the interface edges into a closed loop
        let edges: Vec<[usize; 2]> = m.interface_edges().map(|e| m.edges()[e].vertices).collect();
        let mut order = vec![edges[0][0], edges[0][1]];
        let mut used = vec![false; edges.len()];
        used[0] = true;
        loop {
            let last = *order.last().unwrap();
            let Some(k) = (0..edges.len()).find(|&k| !used[k] && edges[k].contains(&last)) else {
                break;
            };
            used[k] = true;
            let next = if edges[k][0] == last {
                edges[k][1]
            } else {
                edges[k][0]
            };
            if next == order[0] {
                break;
            }
            order.push(next);
        }
        assert!(used.iter().all(|&u| u), "interface edges form one loop");
        let poly = Polyline {
            points: order.iter().map(|&v| m.vertices()[v]).collect(),
            closed: true,
        };
        assert_eq!(poly.winding_number(&Point2::origin()).abs(), 1);
    }

    #[test]
    fn ellipse_vertices_lie_on_curve() {
        let curve = Curve::Ellipse {
            center: Point2::origin(),
            semi_x: 10.0 / 27.0,
            semi_y: 18.0 / 27.0,
        };
        let m = generate_curved_fitted(
            &square(),
            0.3,
            &curve,
            |p| curve.region_of(p),
            &CurvedMeshOptions::default(),
        )
        .unwrap();
        let tol = 1e-9 * square().diameter();
        for [a, b] in interface_polyline(&m) {
            assert!(curve.distance_estimate(&a) <= tol);
            assert!(curve.distance_estimate(&b) <= tol);
            assert!((b - a).norm() <= 0.3);
        }
        assert!(m.interface_edges().count() as f64 >= curve.length(&square()) / 0.3);
    }
}
