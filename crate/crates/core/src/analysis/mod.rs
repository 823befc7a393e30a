//! Error norms against the exact solution, convergence orders over a mesh
//! family, and study tables.

mod table;

pub use table::{format_order, format_sci, parse_csv, render_table, TableFormat, CSV_HEADER};

use crate::assembly::{assemble, build_dof_map, interface_normal, WgSolution};
use crate::element::{eval_rt0, QuadratureRule, GAUSS3};
use crate::error::{Error, Result};
use crate::geometry::RegionId;
use crate::mesh::TriMesh;
use crate::problems::{ProblemSpec, SINGULAR_RADIUS};
use crate::solver::solve;

/// Discrete errors of one solve. L∞ norms are sampled at centroids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorRecord {
    pub h_max: f64,
    pub linf_solution: f64,
    pub linf_gradient: f64,
    pub l2_solution: f64,
    pub l2_lambda_flux: f64,
}

/// Facts about one level that are not part of the error table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelDiagnostics {
    pub unknowns: usize,
    pub relative_residual: f64,
    /// Triangles left out because their centroid sits on the singular point.
    pub excluded_cells: Vec<usize>,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    LinfSolution,
    LinfGradient,
    L2Solution,
    L2LambdaFlux,
}

impl ErrorRecord {
    pub fn get(&self, norm: Norm) -> f64 {
        match norm {
            Norm::LinfSolution => self.linf_solution,
            Norm::LinfGradient => self.linf_gradient,
            Norm::L2Solution => self.l2_solution,
            Norm::L2LambdaFlux => self.l2_lambda_flux,
        }
    }
}

/// Errors of `solution` against the exact data of `spec`, evaluated with the
/// exact branch of each triangle's region. Returns the indices of cells
/// skipped at a singular point along with the record.
pub fn error_norms(
    mesh: &TriMesh,
    spec: &ProblemSpec,
    solution: &WgSolution,
) -> Result<(ErrorRecord, Vec<usize>)> {
    let rule = QuadratureRule::degree2();
    let mut excluded = Vec::new();
    let (mut linf_u, mut linf_g, mut l2_u) = (0.0f64, 0.0f64, 0.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let r = tri.region;
        let c = mesh.centroid(t);
        if let Some(s) = spec.singular_point {
            if (c - s).norm() <= SINGULAR_RADIUS {
                excluded.push(t);
                continue;
            }
        }
        let w0 = solution.cell[t];
        linf_u = linf_u.max((w0 - spec.exact(r, &c)).abs());
        let (basis, g) = solution.gradient(mesh, t)?;
        let exact = spec.exact_gradient(r, &c)?;
        linf_g = linf_g.max((eval_rt0(&g, &basis, &c) - exact).norm());
        for (p, w) in rule.map(&basis.vertices, basis.area) {
            let d = w0 - spec.exact(r, &p);
            l2_u += w * d * d;
        }
    }
    let mut l2_l = 0.0;
    for e in mesh.interface_edges() {
        let n1 = interface_normal(mesh, e);
        let lambda = solution.lambda[e].expect("interface edge has a multiplier");
        let [a, b] = mesh.edge_points(e);
        let len = mesh.edge_length(e);
        for &(s, w) in &GAUSS3 {
            let p = a + (b - a) * s;
            let d = lambda - spec.exact_flux(RegionId::Region1, &p)?.dot(&n1);
            l2_l += w * len * d * d;
        }
    }
    let record = ErrorRecord {
        h_max: mesh.h_max(),
        linf_solution: linf_u,
        linf_gradient: linf_g,
        l2_solution: l2_u.sqrt(),
        l2_lambda_flux: l2_l.sqrt(),
    };
    Ok((record, excluded))
}

/// Errors and orders over a sequence of refined meshes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StudyReport {
    pub title: String,
    pub records: Vec<ErrorRecord>,
    pub diagnostics: Vec<LevelDiagnostics>,
}

/// `ln(e_prev / e) / ln(h_prev / h)`.
pub fn order(prev: &ErrorRecord, next: &ErrorRecord, norm: Norm) -> f64 {
    (prev.get(norm) / next.get(norm)).ln() / (prev.h_max / next.h_max).ln()
}

impl StudyReport {
    pub fn from_records(title: impl Into<String>, records: Vec<ErrorRecord>) -> Result<Self> {
        check_h_decreasing(records.iter().map(|r| r.h_max))?;
        Ok(StudyReport {
            title: title.into(),
            records,
            diagnostics: Vec::new(),
        })
    }

    /// Per-level orders; the first level has none.
    pub fn orders(&self, norm: Norm) -> Vec<Option<f64>> {
        std::iter::once(None)
            .chain(
                self.records
                    .windows(2)
                    .map(|w| Some(order(&w[0], &w[1], norm))),
            )
            .take(self.records.len())
            .collect()
    }

    pub fn final_order(&self, norm: Norm) -> Option<f64> {
        self.orders(norm).last().copied().flatten()
    }

    /// Order between the first and the last level.
    pub fn overall_order(&self, norm: Norm) -> Option<f64> {
        match (self.records.first(), self.records.last()) {
            (Some(a), Some(b)) if self.records.len() >= 2 => Some(order(a, b, norm)),
            _ => None,
        }
    }

    /// Order between the first and last of the final `count` levels.
    pub fn tail_order(&self, norm: Norm, count: usize) -> Option<f64> {
        let n = self.records.len();
        if count < 2 || n < count {
            return None;
        }
        Some(order(&self.records[n - count], &self.records[n - 1], norm))
    }
}

fn check_h_decreasing(h: impl Iterator<Item = f64>) -> Result<()> {
    let h: Vec<f64> = h.collect();
    if h.len() < 2 {
        return Err(Error::Study(format!(
            "a convergence study needs at least 2 levels, got {}",
            h.len()
        )));
    }
    for (l, w) in h.windows(2).enumerate() {
        if !(w[1] < w[0]) {
            return Err(Error::Study(format!(
                "h_max does not decrease from level {} ({:e}) to level {} ({:e})",
                l + 1,
                w[0],
                l + 2,
                w[1]
            )));
        }
    }
    Ok(())
}

/// Solution of one mesh together with its errors.
#[derive(Clone, Debug)]
pub struct LevelResult {
    pub solution: WgSolution,
    pub record: ErrorRecord,
    pub diagnostics: LevelDiagnostics,
}

pub fn solve_level(mesh: &TriMesh, spec: &ProblemSpec) -> Result<LevelResult> {
    let start = std::time::Instant::now();
    let dofs = build_dof_map(mesh)?;
    let system = assemble(mesh, spec, &dofs)?;
    let report = solve(&system)?;
    let solution = WgSolution::from_vector(mesh, &dofs, &report.solution, &system.dirichlet_values);
    let (record, excluded_cells) = error_norms(mesh, spec, &solution)?;
    Ok(LevelResult {
        solution,
        record,
        diagnostics: LevelDiagnostics {
            unknowns: dofs.total_unknowns,
            relative_residual: report.relative_residual,
            excluded_cells,
            seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Solves `spec` on every mesh and collects the errors. `meshes` must have
/// strictly decreasing `h_max`.
pub fn convergence_study(spec: &ProblemSpec, meshes: &[TriMesh]) -> Result<StudyReport> {
    check_h_decreasing(meshes.iter().map(TriMesh::h_max))?;
    let mut report = StudyReport {
        title: spec.name.clone(),
        ..Default::default()
    };
    for (l, mesh) in meshes.iter().enumerate() {
        let level =
            solve_level(mesh, spec).map_err(|e| Error::Study(format!("level {}: {e}", l + 1)))?;
        report.records.push(level.record);
        report.diagnostics.push(level.diagnostics);
    }
    Ok(report)
}

/// Study on the first `levels` meshes of the problem's own family.
pub fn study_builtin_family(spec: &ProblemSpec, levels: usize) -> Result<StudyReport> {
    let meshes = spec.family.levels(levels)?;
    convergence_study(spec, &meshes)
}
