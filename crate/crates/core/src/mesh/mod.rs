//! Interface-fitted conforming triangulations of a two-region domain.

mod curved;
mod family;
mod io;
mod refine;
mod structured;

use std::collections::HashMap;

pub use curved::{generate_curved_fitted, CurvedMeshOptions};
pub use family::{BaseMesh, MeshFamily};
pub use io::{ingest_mesh, parse_ele, parse_node, write_ele, write_node};
pub use structured::generate_structured_fitted;

use crate::error::{Error, Result};
use crate::geometry::{signed_area, Point2, Rect, RegionId};

/// Classification of a mesh edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Interior(RegionId),
    DirichletBoundary(RegionId),
    Interface,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    /// Counterclockwise vertex indices.
    pub vertices: [usize; 3],
    pub region: RegionId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    pub kind: EdgeKind,
    /// Adjacent triangles; for interface edges the first one is in Region1.
    pub triangles: [Option<usize>; 2],
}

impl Edge {
    pub fn triangle_on(&self, region: RegionId, mesh: &TriMesh) -> Option<usize> {
        self.triangles
            .iter()
            .flatten()
            .copied()
            .find(|&t| mesh.triangles[t].region == region)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshStats {
    pub h_max: f64,
    pub n_tri: usize,
    pub n_edge: usize,
    pub n_interface_edge: usize,
    pub nonacute_fraction: f64,
}

/// Immutable conforming triangulation with region labels and classified
/// edges. Local edge `i` of a triangle is the edge opposite its vertex `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point2>,
    triangles: Vec<Triangle>,
    edges: Vec<Edge>,
    triangle_edges: Vec<[usize; 3]>,
    /// +1 when the local edge runs (v[i+1] -> v[i+2]) in the same direction
    /// as the stored edge endpoints, -1 otherwise.
    edge_signs: Vec<[i8; 3]>,
    h_max: f64,
}

impl TriMesh {
    /// Builds the edge structure from vertices and region-labelled
    /// triangles. Clockwise triangles are reoriented; degenerate triangles,
    /// edges shared by more than two triangles, unused vertices and
    /// boundary edges off the bounding rectangle are rejected.
    pub fn from_triangles(vertices: Vec<Point2>, triangles: Vec<Triangle>) -> Result<TriMesh> {
        if triangles.is_empty() {
            return Err(Error::Validation("mesh has no triangles".into()));
        }
        if let Some(i) = vertices
            .iter()
            .position(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::Validation(format!("vertex {i} is not finite")));
        }
        let bbox = bounding_rect(&vertices)?;
        let scale = bbox.diameter();

        let mut triangles = triangles;
        for (t, tri) in triangles.iter_mut().enumerate() {
            let [a, b, c] = tri.vertices;
            if a == b || b == c || a == c || a.max(b).max(c) >= vertices.len() {
                return Err(Error::Validation(format!(
                    "triangle {t} has invalid vertex indices {:?}",
                    tri.vertices
                )));
            }
            let area = signed_area(&vertices[a], &vertices[b], &vertices[c]);
            if area.abs() <= 1e-14 * scale * scale {
                return Err(Error::Validation(format!("triangle {t} is degenerate")));
            }
            if area < 0.0 {
                tri.vertices.swap(1, 2);
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut edge_signs = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0usize; 3];
            let mut signs = [0i8; 3];
            for i in 0..3 {
                let a = tri.vertices[(i + 1) % 3];
                let b = tri.vertices[(i + 2) % 3];
                let key = (a.min(b), a.max(b));
                let e = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                        kind: EdgeKind::Interior(tri.region),
                        triangles: [None, None],
                    });
                    edges.len() - 1
                });
                let edge = &mut edges[e];
                match edge.triangles {
                    [None, _] => edge.triangles[0] = Some(t),
                    [Some(_), None] => edge.triangles[1] = Some(t),
                    [Some(_), Some(_)] => {
                        return Err(Error::Validation(format!(
                            "edge {key:?} is shared by more than two triangles"
                        )))
                    }
                }
                local[i] = e;
                signs[i] = if a < b { 1 } else { -1 };
            }
            triangle_edges.push(local);
            edge_signs.push(signs);
        }

        let mut used = vec![false; vertices.len()];
        for tri in &triangles {
            for &v in &tri.vertices {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Validation(format!(
                "vertex {v} is not used by any triangle"
            )));
        }

        let tol = 1e-9 * scale;
        for edge in &mut edges {
            match edge.triangles {
                [Some(t), None] => {
                    let [a, b] = edge.vertices;
                    if !bbox.on_boundary(&vertices[a], tol) || !bbox.on_boundary(&vertices[b], tol)
                    {
                        return Err(Error::Validation(format!(
                            "boundary edge {:?} lies inside the domain (hanging vertex or hole)",
                            edge.vertices
                        )));
                    }
                    edge.kind = EdgeKind::DirichletBoundary(triangles[t].region);
                }
                [Some(t0), Some(t1)] => {
                    let r0 = triangles[t0].region;
                    let r1 = triangles[t1].region;
                    if r0 == r1 {
                        edge.kind = EdgeKind::Interior(r0);
                    } else {
                        edge.kind = EdgeKind::Interface;
                        if r0 == RegionId::Region2 {
                            edge.triangles = [Some(t1), Some(t0)];
                        }
                    }
                }
                _ => unreachable!("every edge has at least one triangle"),
            }
        }

        let h_max = edges
            .iter()
            .map(|e| (vertices[e.vertices[1]] - vertices[e.vertices[0]]).norm())
            .fold(0.0, f64::max);

        Ok(TriMesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            edge_signs,
            h_max,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge indices of triangle `t`, local edge `i` opposite vertex `i`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn edge_signs(&self, t: usize) -> [i8; 3] {
        self.edge_signs[t]
    }

    pub fn triangle_points(&self, t: usize) -> [Point2; 3] {
        let [a, b, c] = self.triangles[t].vertices;
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn edge_points(&self, e: usize) -> [Point2; 2] {
        let [a, b] = self.edges[e].vertices;
        [self.vertices[a], self.vertices[b]]
    }

    pub fn centroid(&self, t: usize) -> Point2 {
        let [a, b, c] = self.triangle_points(t);
        Point2::from((a.coords + b.coords + c.coords) / 3.0)
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(&a, &b, &c)
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edge_points(e);
        (b - a).norm()
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Smallest rectangle containing all vertices.
    pub fn bounding_rect(&self) -> Rect {
        bounding_rect(&self.vertices).expect("mesh has vertices")
    }

    pub fn interface_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == EdgeKind::Interface)
            .map(|(i, _)| i)
    }

    pub fn stats(&self) -> MeshStats {
        mesh_stats(self)
    }

    /// Triangle whose local edge slot points at `e`, from the given side.
    pub fn local_slot(&self, t: usize, e: usize) -> Option<usize> {
        self.triangle_edges[t].iter().position(|&x| x == e)
    }
}

fn bounding_rect(vertices: &[Point2]) -> Result<Rect> {
    if vertices.is_empty() {
        return Err(Error::Validation("mesh has no vertices".into()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in vertices {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if !(x1 > x0 && y1 > y0) {
        return Err(Error::Validation("vertices are collinear".into()));
    }
    Ok(Rect::new(x0, x1, y0, y1))
}

/// Largest interior angle is at least 90 degrees.
fn is_nonacute(p: &[Point2; 3]) -> bool {
    (0..3).any(|i| {
        let a = p[i];
        let b = p[(i + 1) % 3];
        let c = p[(i + 2) % 3];
        (b - a).dot(&(c - a)) <= 0.0
    })
}

pub fn mesh_stats(mesh: &TriMesh) -> MeshStats {
    let nonacute = (0..mesh.triangles.len())
        .filter(|&t| is_nonacute(&mesh.triangle_points(t)))
        .count();
    MeshStats {
        h_max: mesh.h_max,
        n_tri: mesh.triangles.len(),
        n_edge: mesh.edges.len(),
        n_interface_edge: mesh.interface_edges().count(),
        nonacute_fraction: nonacute as f64 / mesh.triangles.len() as f64,
    }
}

/// Flips away slivers: triangles whose apex lies on their longest edge up to
/// rounding. These appear when nearly collinear constrained points are
/// triangulated exactly. Each sliver is merged with the neighbour across
/// its longest edge and the quadrilateral is split through the apex.
pub(crate) fn remove_slivers(vertices: &[Point2], tris: &mut [[usize; 3]]) -> Result<()> {
    let thin = |t: &[usize; 3]| -> Option<usize> {
        let p = t.map(|v| vertices[v]);
        let (long, len2) = (0..3)
            .map(|i| (i, (p[(i + 2) % 3] - p[(i + 1) % 3]).norm_squared()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        (signed_area(&p[0], &p[1], &p[2]).abs() <= 1e-10 * len2).then_some(long)
    };
    for _ in 0..tris.len() {
        let Some((t, apex)) = tris
            .iter()
            .enumerate()
            .find_map(|(t, tri)| thin(tri).map(|i| (t, i)))
        else {
            return Ok(());
        };
        let tri = tris[t];
        let a = tri[apex];
        let (b, c) = (tri[(apex + 1) % 3], tri[(apex + 2) % 3]);
        let Some(n) =
            (0..tris.len()).find(|&n| n != t && tris[n].contains(&b) && tris[n].contains(&c))
        else {
            return Err(Error::Generation(format!(
                "degenerate triangle {:?} on the domain boundary",
                tri.map(|v| vertices[v])
            )));
        };
        let q = *tris[n]
            .iter()
            .find(|&&v| v != b && v != c)
            .expect("neighbour has a third vertex");
        // apex a sits on segment bc; the quad a-b-q-c... split through a-q
        tris[t] = [a, b, q];
        tris[n] = [a, q, c];
        for k in [t, n] {
            let [x, y, z] = tris[k];
            if signed_area(&vertices[x], &vertices[y], &vertices[z]) < 0.0 {
                tris[k] = [x, z, y];
            }
        }
    }
    Err(Error::Generation("sliver removal did not terminate".into()))
}

/// Assigns regions to triangles of an unlabelled triangulation: triangles
/// connected without crossing a constrained edge form a component, and each
/// component takes the majority centroid region.
pub(crate) fn label_components(
    vertices: &[Point2],
    tris: &[[usize; 3]],
    is_constrained: impl Fn(usize, usize) -> bool,
    region_of: impl Fn(&Point2) -> RegionId,
) -> Vec<RegionId> {
    let mut adjacency: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for i in 0..3 {
            let a = tri[i];
            let b = tri[(i + 1) % 3];
            adjacency.entry((a.min(b), a.max(b))).or_default().push(t);
        }
    }
    let mut component = vec![usize::MAX; tris.len()];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..tris.len() {
        if component[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        component[start] = id;
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            let tri = tris[t];
            for i in 0..3 {
                let a = tri[i];
                let b = tri[(i + 1) % 3];
                if is_constrained(a, b) {
                    continue;
                }
                for &n in &adjacency[&(a.min(b), a.max(b))] {
                    if component[n] == usize::MAX {
                        component[n] = id;
                        members.push(n);
                        stack.push(n);
                    }
                }
            }
        }
        components.push(members);
    }
    let labels: Vec<RegionId> = components
        .iter()
        .map(|members| {
            let mut votes = [0.0f64; 2];
            for &t in members {
                let [a, b, c] = tris[t];
                let centroid = Point2::from(
                    (vertices[a].coords + vertices[b].coords + vertices[c].coords) / 3.0,
                );
                let area = signed_area(&vertices[a], &vertices[b], &vertices[c]).abs();
                votes[region_of(&centroid).index()] += area;
            }
            if votes[0] >= votes[1] {
                RegionId::Region1
            } else {
                RegionId::Region2
            }
        })
        .collect();
    component.iter().map(|&c| labels[c]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit_square() -> TriMesh {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let t = vec![
            Triangle {
                vertices: [0, 1, 2],
                region: RegionId::Region1,
            },
            Triangle {
                vertices: [0, 2, 3],
                region: RegionId::Region1,
            },
        ];
        TriMesh::from_triangles(v, t).unwrap()
    }

    #[test]
    fn two_triangle_square_stats() {
        let m = unit_square();
        let s = m.stats();
        assert_eq!(s.n_tri, 2);
        assert_eq!(s.n_edge, 5);
        assert_eq!(s.n_interface_edge, 0);
        assert!((s.h_max - 2f64.sqrt()).abs() < 1e-15);
        let boundary = m
            .edges()
            .iter()
            .filter(|e| matches!(e.kind, EdgeKind::DirichletBoundary(_)))
            .count();
        assert_eq!(boundary, 4);
        // right triangles count as non-acute
        assert_eq!(s.nonacute_fraction, 1.0);
    }

    #[test]
    fn incidence_is_involutive() {
        let m = unit_square();
        for t in 0..m.triangles().len() {
            for (i, &e) in m.triangle_edges(t).iter().enumerate() {
                assert!(m.edges()[e].triangles.contains(&Some(t)));
                let [a, b] = m.edges()[e].vertices;
                let tv = m.triangles()[t].vertices;
                let local = [tv[(i + 1) % 3], tv[(i + 2) % 3]];
                assert!(local.contains(&a) && local.contains(&b));
            }
        }
    }

    #[test]
    fn clockwise_triangles_are_reoriented() {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        let t = vec![Triangle {
            vertices: [0, 2, 1],
            region: RegionId::Region1,
        }];
        let m = TriMesh::from_triangles(v, t).unwrap();
        assert!(m.area(0) > 0.0);
    }

    #[test]
    fn rejects_non_conforming_and_degenerate_input() {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(0.0, 1.0),
        ];
        let degenerate = vec![Triangle {
            vertices: [0, 1, 2],
            region: RegionId::Region1,
        }];
        assert!(matches!(
            TriMesh::from_triangles(v.clone(), degenerate),
            Err(Error::Validation(_))
        ));

        // hanging vertex: (0.5, 0) splits the bottom of one triangle only
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.5, 0.5),
        ];
        let hanging = vec![
            Triangle {
                vertices: [0, 1, 2],
                region: RegionId::Region1,
            },
            Triangle {
                vertices: [0, 4, 3],
                region: RegionId::Region1,
            },
            Triangle {
                vertices: [4, 2, 3],
                region: RegionId::Region1,
            },
        ];
        assert!(matches!(
            TriMesh::from_triangles(v, hanging),
            Err(Error::Validation(_))
        ));
    }
}
