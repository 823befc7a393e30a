//! Degree-of-freedom numbering and assembly of the global saddle-point
//! system: subdomain weak Galerkin blocks coupled through one multiplier
//! per interface edge.

mod export;

use std::io::Write;

pub use export::{write_matrix_market, write_rhs};

use crate::element::{
    local_stiffness, project_edge, weak_gradient, LocalWG, QuadratureRule, RT0Basis, RT0Field,
    GAUSS3,
};
use crate::error::{Error, Result};
use crate::geometry::{Point2, RegionId, Vector2};
use crate::mesh::{EdgeKind, TriMesh};
use crate::problems::ProblemSpec;

/// Where the value of an edge unknown on one side lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeDof {
    Unknown(usize),
    /// Eliminated; index into [`DofMap::dirichlet_edges`].
    Dirichlet(usize),
}

/// Global numbering: cells first, then edge unknowns in edge order (an
/// interface edge numbers its Region1 side before its Region2 side), then
/// one multiplier per interface edge.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub cell_dof: Vec<usize>,
    /// Per edge, the dof of its Region1 and Region2 side (if it has one).
    pub edge_dof: Vec<[Option<EdgeDof>; 2]>,
    pub lambda_dof: Vec<Option<usize>>,
    pub dirichlet_edges: Vec<usize>,
    pub total_unknowns: usize,
}

impl DofMap {
    pub fn edge_side(&self, edge: usize, region: RegionId) -> EdgeDof {
        self.edge_dof[edge][region.index()].expect("edge has no dof on this side")
    }

    pub fn n_lambda(&self) -> usize {
        self.lambda_dof.iter().flatten().count()
    }
}

pub fn build_dof_map(mesh: &TriMesh) -> Result<DofMap> {
    let n_tri = mesh.triangles().len();
    let cell_dof: Vec<usize> = (0..n_tri).collect();
    let mut next = n_tri;
    let mut edge_dof = vec![[None, None]; mesh.edges().len()];
    let mut dirichlet_edges = Vec::new();
    let mut region1_dirichlet = false;
    for (e, edge) in mesh.edges().iter().enumerate() {
        match edge.kind {
            EdgeKind::Interior(r) => {
                edge_dof[e][r.index()] = Some(EdgeDof::Unknown(next));
                next += 1;
            }
            EdgeKind::Interface => {
                edge_dof[e] = [
                    Some(EdgeDof::Unknown(next)),
                    Some(EdgeDof::Unknown(next + 1)),
                ];
                next += 2;
            }
            EdgeKind::DirichletBoundary(r) => {
                region1_dirichlet |= r == RegionId::Region1;
                edge_dof[e][r.index()] = Some(EdgeDof::Dirichlet(dirichlet_edges.len()));
                dirichlet_edges.push(e);
            }
        }
    }
    if !region1_dirichlet {
        return Err(Error::WellPosedness(
            "Region1 has no Dirichlet boundary edge".into(),
        ));
    }
    let mut lambda_dof = vec![None; mesh.edges().len()];
    for e in mesh.interface_edges() {
        lambda_dof[e] = Some(next);
        next += 1;
    }
    Ok(DofMap {
        cell_dof,
        edge_dof,
        lambda_dof,
        dirichlet_edges,
        total_unknowns: next,
    })
}

/// Assembled linear system. Triplets are summed and sorted by (row, col).
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSystem {
    pub n: usize,
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
    /// Edge averages of the boundary data, indexed like
    /// [`DofMap::dirichlet_edges`].
    pub dirichlet_values: Vec<f64>,
}

impl SparseSystem {
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(i, j, v) in &self.triplets {
            y[i] += v * x[j];
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets.iter().map(|t| t.2.abs()).fold(0.0, f64::max)
    }
}

/// Outward unit normal of triangle `t` on its local edge `slot`.
fn outward_normal(mesh: &TriMesh, t: usize, slot: usize) -> Vector2 {
    let p = mesh.triangle_points(t);
    let d = p[(slot + 2) % 3] - p[(slot + 1) % 3];
    Vector2::new(d.y, -d.x) / d.norm()
}

/// Unit normal of an interface edge pointing out of its Region1 triangle.
pub fn interface_normal(mesh: &TriMesh, e: usize) -> Vector2 {
    let t = mesh.edges()[e].triangles[0].expect("interface edge has a Region1 triangle");
    let slot = mesh.local_slot(t, e).expect("incidence is consistent");
    outward_normal(mesh, t, slot)
}

fn sum_triplets(mut raw: Vec<(usize, usize, f64)>) -> Vec<(usize, usize, f64)> {
    raw.sort_by_key(|&(i, j, _)| (i, j));
    let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(raw.len());
    for (i, j, v) in raw {
        match out.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += v,
            _ => out.push((i, j, v)),
        }
    }
    out
}

/// Edge averages of the boundary data on every Dirichlet edge, and the
/// right-hand side with the eliminated columns folded in.
pub fn apply_dirichlet(
    spec: &ProblemSpec,
    mesh: &TriMesh,
    dofs: &DofMap,
    fixed_couplings: &[(usize, usize, f64)],
    rhs: &mut [f64],
) -> Vec<f64> {
    let values: Vec<f64> = dofs
        .dirichlet_edges
        .iter()
        .map(|&e| {
            let EdgeKind::DirichletBoundary(r) = mesh.edges()[e].kind else {
                unreachable!("only boundary edges are eliminated")
            };
            let [a, b] = mesh.edge_points(e);
            project_edge(|p| spec.boundary_value(r, p), &a, &b)
        })
        .collect();
    for &(row, k, coef) in fixed_couplings {
        rhs[row] -= coef * values[k];
    }
    values
}

/// Global dofs of triangle `t` in local order (cell, edge 0, edge 1, edge 2).
fn local_dofs(mesh: &TriMesh, dofs: &DofMap, t: usize) -> [EdgeDof; 4] {
    let r = mesh.triangles()[t].region;
    let [e0, e1, e2] = mesh.triangle_edges(t);
    [
        EdgeDof::Unknown(dofs.cell_dof[t]),
        dofs.edge_side(e0, r),
        dofs.edge_side(e1, r),
        dofs.edge_side(e2, r),
    ]
}

pub fn assemble(mesh: &TriMesh, spec: &ProblemSpec, dofs: &DofMap) -> Result<SparseSystem> {
    let n = dofs.total_unknowns;
    let mut raw = Vec::with_capacity(16 * mesh.triangles().len() + 4 * dofs.n_lambda());
    let mut fixed = Vec::new();
    let mut rhs = vec![0.0; n];
    let rule = QuadratureRule::degree4();

    for (t, tri) in mesh.triangles().iter().enumerate() {
        let r = tri.region;
        let basis =
            RT0Basis::new(mesh.triangle_points(t)).map_err(|e| Error::element(t, e.to_string()))?;
        let mut s = local_stiffness(&basis, |p| spec.coefficient(r, p))
            .map_err(|e| Error::element(t, e.to_string()))?;
        s[(0, 0)] -= spec.data(r).helmholtz_k2 * basis.area;
        let local = local_dofs(mesh, dofs, t);
        for (i, di) in local.iter().enumerate() {
            let EdgeDof::Unknown(row) = *di else { continue };
            for (j, dj) in local.iter().enumerate() {
                match *dj {
                    EdgeDof::Unknown(col) => raw.push((row, col, s[(i, j)])),
                    EdgeDof::Dirichlet(k) => fixed.push((row, k, s[(i, j)])),
                }
            }
        }
        let mut load = 0.0;
        for (p, w) in rule.map(&basis.vertices, basis.area) {
            load += w * spec
                .forcing(r, &p)
                .map_err(|e| Error::element(t, e.to_string()))?;
        }
        rhs[dofs.cell_dof[t]] += load;
    }

    for e in mesh.interface_edges() {
        let len = mesh.edge_length(e);
        let n1 = interface_normal(mesh, e);
        let lambda = dofs.lambda_dof[e].expect("interface edge has a multiplier");
        let EdgeDof::Unknown(ub) = dofs.edge_side(e, RegionId::Region1) else {
            unreachable!("interface edges are never eliminated")
        };
        let EdgeDof::Unknown(vb) = dofs.edge_side(e, RegionId::Region2) else {
            unreachable!("interface edges are never eliminated")
        };
        raw.extend([
            (ub, lambda, -len),
            (lambda, ub, -len),
            (vb, lambda, len),
            (lambda, vb, len),
        ]);
        let [a, b] = mesh.edge_points(e);
        let (mut phi, mut psi) = (0.0, 0.0);
        for &(s, w) in &GAUSS3 {
            let p = a + (b - a) * s;
            let (jp, jf) = spec.jump_data(&p, &n1)?;
            phi += w * len * jp;
            psi += w * len * jf;
        }
        rhs[lambda] -= phi;
        rhs[vb] += psi;
    }

    let dirichlet_values = apply_dirichlet(spec, mesh, dofs, &fixed, &mut rhs);
    let triplets = sum_triplets(raw);
    if let Some(&(i, j, _)) = triplets.iter().find(|t| !t.2.is_finite()) {
        return Err(Error::Evaluation(format!(
            "non-finite matrix entry at ({i}, {j})"
        )));
    }
    if let Some(i) = rhs.iter().position(|v| !v.is_finite()) {
        return Err(Error::Evaluation(format!(
            "non-finite right-hand side at row {i}"
        )));
    }
    Ok(SparseSystem {
        n,
        triplets,
        rhs,
        dirichlet_values,
    })
}

/// Discrete solution unpacked per mesh entity.
#[derive(Clone, Debug, PartialEq)]
pub struct WgSolution {
    pub cell: Vec<f64>,
    /// Per edge, the Region1 and Region2 side values (boundary values on
    /// Dirichlet edges).
    pub edge: Vec<[Option<f64>; 2]>,
    pub lambda: Vec<Option<f64>>,
}

impl WgSolution {
    pub fn from_vector(mesh: &TriMesh, dofs: &DofMap, x: &[f64], dirichlet_values: &[f64]) -> Self {
        let value = |d: EdgeDof| match d {
            EdgeDof::Unknown(i) => x[i],
            EdgeDof::Dirichlet(k) => dirichlet_values[k],
        };
        WgSolution {
            cell: (0..mesh.triangles().len())
                .map(|t| x[dofs.cell_dof[t]])
                .collect(),
            edge: dofs
                .edge_dof
                .iter()
                .map(|s| s.map(|d| d.map(value)))
                .collect(),
            lambda: dofs.lambda_dof.iter().map(|l| l.map(|i| x[i])).collect(),
        }
    }

    pub fn local(&self, mesh: &TriMesh, t: usize) -> LocalWG {
        let r = mesh.triangles()[t].region.index();
        LocalWG {
            w0: self.cell[t],
            wb: mesh
                .triangle_edges(t)
                .map(|e| self.edge[e][r].expect("triangle edge has a value on its side")),
        }
    }

    /// Weak gradient on triangle `t`.
    pub fn gradient(&self, mesh: &TriMesh, t: usize) -> Result<(RT0Basis, RT0Field)> {
        let basis =
            RT0Basis::new(mesh.triangle_points(t)).map_err(|e| Error::element(t, e.to_string()))?;
        let g = weak_gradient(&basis, &self.local(mesh, t))
            .map_err(|e| Error::element(t, e.to_string()))?;
        Ok((basis, g))
    }

    /// Writes `kind,index,side,value` rows: cells, edge sides and multipliers.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "kind,index,side,value")?;
        for (t, v) in self.cell.iter().enumerate() {
            writeln!(out, "cell,{t},,{v:.16e}")?;
        }
        for (e, sides) in self.edge.iter().enumerate() {
            for (k, v) in sides.iter().enumerate() {
                if let Some(v) = v {
                    writeln!(out, "edge,{e},{},{v:.16e}", k + 1)?;
                }
            }
        }
        for (e, v) in self.lambda.iter().enumerate() {
            if let Some(v) = v {
                writeln!(out, "lambda,{e},,{v:.16e}")?;
            }
        }
        Ok(())
    }
}

/// Projection of the exact solution into the discrete space: cell and edge
/// averages, and edge averages of `A1 ∇u · n1` for the multipliers.
pub fn project_exact(mesh: &TriMesh, spec: &ProblemSpec, dofs: &DofMap) -> Result<Vec<f64>> {
    let mut x = vec![0.0; dofs.total_unknowns];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        x[dofs.cell_dof[t]] =
            crate::element::project_cell(|p| spec.exact(tri.region, p), &mesh.triangle_points(t));
    }
    for (e, sides) in dofs.edge_dof.iter().enumerate() {
        let [a, b] = mesh.edge_points(e);
        for (k, d) in sides.iter().enumerate() {
            if let Some(EdgeDof::Unknown(i)) = d {
                let r = if k == 0 {
                    RegionId::Region1
                } else {
                    RegionId::Region2
                };
                x[*i] = project_edge(|p| spec.exact(r, p), &a, &b);
            }
        }
    }
    for e in mesh.interface_edges() {
        let n1 = interface_normal(mesh, e);
        let [a, b] = mesh.edge_points(e);
        let mut avg = 0.0;
        for &(s, w) in &GAUSS3 {
            let p: Point2 = a + (b - a) * s;
            avg += w * spec.exact_flux(RegionId::Region1, &p)?.dot(&n1);
        }
        x[dofs.lambda_dof[e].expect("interface edge")] = avg;
    }
    Ok(x)
}

#[cfg(test)]
pub(crate) mod tests;
