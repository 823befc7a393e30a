//! Triangle-style `.node` / `.ele` reading and writing.
//!
//! `.node`: header `N 2 0 B`, then `idx x y [attributes...] [marker]`.
//! `.ele`: header `M 3 0`, then `idx v1 v2 v3 [attributes...]`.
//! Indices are 1-based on output; input may be 0- or 1-based (decided by the
//! first record). `#` starts a comment.

use std::fmt::Write as _;
use std::io::Read;

use super::{EdgeKind, TriMesh, Triangle};
use crate::error::{Error, Result};
use crate::geometry::{Point2, RegionId};

struct Record<'a> {
    line: usize,
    fields: Vec<&'a str>,
}

fn records(text: &str) -> impl Iterator<Item = Record<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        (!fields.is_empty()).then_some(Record {
            line: i + 1,
            fields,
        })
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(rec: &Record<'_>, k: usize, what: &str) -> Result<T> {
    let s = rec
        .fields
        .get(k)
        .ok_or_else(|| parse_err(rec.line, format!("missing {what}")))?;
    s.parse()
        .map_err(|_| parse_err(rec.line, format!("invalid {what} '{s}'")))
}

/// Parses a `.node` file into vertex coordinates (in file order).
pub fn parse_node(text: &str) -> Result<Vec<Point2>> {
    let mut recs = records(text);
    let header = recs
        .next()
        .ok_or_else(|| parse_err(1, "empty .node file"))?;
    let count: usize = field(&header, 0, "vertex count")?;
    let dim: usize = field(&header, 1, "dimension")?;
    if dim != 2 {
        return Err(parse_err(
            header.line,
            format!("expected dimension 2, found {dim}"),
        ));
    }
    let mut points = Vec::with_capacity(count);
    let mut base = None;
    for rec in recs.by_ref().take(count) {
        let idx: usize = field(&rec, 0, "vertex index")?;
        let base = *base.get_or_insert(idx);
        if base > 1 || idx != base + points.len() {
            return Err(parse_err(
                rec.line,
                format!("unexpected vertex index {idx}"),
            ));
        }
        let x: f64 = field(&rec, 1, "x coordinate")?;
        let y: f64 = field(&rec, 2, "y coordinate")?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(rec.line, "non-finite coordinate"));
        }
        points.push(Point2::new(x, y));
    }
    if points.len() != count {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {count} vertices, found {}", points.len()),
        ));
    }
    if let Some(extra) = recs.next() {
        return Err(parse_err(extra.line, "trailing data after vertex records"));
    }
    Ok(points)
}

/// Parses a `.ele` file into 0-based vertex triples. The index base is
/// taken from the `.node` file (`node_base`).
pub fn parse_ele(text: &str, n_vertices: usize, node_base: usize) -> Result<Vec<[usize; 3]>> {
    let mut recs = records(text);
    let header = recs.next().ok_or_else(|| parse_err(1, "empty .ele file"))?;
    let count: usize = field(&header, 0, "triangle count")?;
    let per: usize = field(&header, 1, "nodes per triangle")?;
    if per != 3 {
        return Err(parse_err(
            header.line,
            format!("expected 3 nodes per triangle, found {per}"),
        ));
    }
    let mut tris = Vec::with_capacity(count);
    for rec in recs.by_ref().take(count) {
        let _: usize = field(&rec, 0, "triangle index")?;
        let mut tri = [0usize; 3];
        for (k, slot) in tri.iter_mut().enumerate() {
            let v: usize = field(&rec, k + 1, "vertex reference")?;
            if v < node_base || v - node_base >= n_vertices {
                return Err(parse_err(
                    rec.line,
                    format!("vertex reference {v} out of range"),
                ));
            }
            *slot = v - node_base;
        }
        tris.push(tri);
    }
    if tris.len() != count {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {count} triangles, found {}", tris.len()),
        ));
    }
    if let Some(extra) = recs.next() {
        return Err(parse_err(
            extra.line,
            "trailing data after triangle records",
        ));
    }
    Ok(tris)
}

fn node_base(text: &str) -> usize {
    records(text)
        .nth(1)
        .and_then(|r| r.fields.first().and_then(|s| s.parse().ok()))
        .unwrap_or(1)
}

/// Reads a mesh and classifies it against the problem geometry: regions
/// come from `region_of` at each centroid, and an edge is an interface edge
/// iff its two triangles have different regions and both endpoints satisfy
/// `on_interface`.
pub fn ingest_mesh(
    mut node: impl Read,
    mut ele: impl Read,
    region_of: impl Fn(&Point2) -> RegionId,
    on_interface: impl Fn(&Point2) -> bool,
) -> Result<TriMesh> {
    let mut node_text = String::new();
    node.read_to_string(&mut node_text)?;
    let mut ele_text = String::new();
    ele.read_to_string(&mut ele_text)?;
    let vertices = parse_node(&node_text)?;
    let tris = parse_ele(&ele_text, vertices.len(), node_base(&node_text))?;
    let triangles = tris
        .into_iter()
        .map(|v| {
            let c = Point2::from(
                (vertices[v[0]].coords + vertices[v[1]].coords + vertices[v[2]].coords) / 3.0,
            );
            Triangle {
                vertices: v,
                region: region_of(&c),
            }
        })
        .collect();
    let mesh = TriMesh::from_triangles(vertices, triangles)?;
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.kind == EdgeKind::Interface {
            let [a, b] = mesh.edge_points(e);
            if !on_interface(&a) || !on_interface(&b) {
                let t = edge.triangles[0].expect("interface edge has two triangles");
                return Err(Error::Topology(format!(
                    "triangle {t} and its neighbour across edge {e} have different regions, \
                     but the edge does not lie on the interface"
                )));
            }
        }
    }
    Ok(mesh)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the `.node` file; coordinates use 17 significant digits so the
/// mesh round-trips exactly.
pub fn write_node(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} 2 0 0", mesh.vertices().len());
    for (i, p) in mesh.vertices().iter().enumerate() {
        let _ = writeln!(out, "{} {} {}", i + 1, fmt_f64(p.x), fmt_f64(p.y));
    }
    out
}

pub fn write_ele(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} 3 0", mesh.triangles().len());
    for (i, t) in mesh.triangles().iter().enumerate() {
        let [a, b, c] = t.vertices;
        let _ = writeln!(out, "{} {} {} {}", i + 1, a + 1, b + 1, c + 1);
    }
    out
}
