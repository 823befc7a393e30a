use std::sync::Arc;

use super::*;
use crate::geometry::{Curve, Rect};
use crate::mesh::{BaseMesh, MeshFamily, Triangle};
use crate::problems::{builtin_problem, ForcingMode, ProblemParams, RegionData};

fn linear_region(c: [f64; 3], a: f64, k2: f64) -> RegionData {
    let (coefficient, coefficient_gradient) = RegionData::constant_coefficient(a);
    RegionData {
        coefficient,
        coefficient_gradient,
        solution: Arc::new(move |p| c[0] + c[1] * p.x + c[2] * p.y),
        gradient: Arc::new(move |_| Vector2::new(c[1], c[2])),
        laplacian: Arc::new(|_| 0.0),
        helmholtz_k2: k2,
    }
}

/// Piecewise-linear solution across a straight interface.
pub(crate) fn patch_problem(n: usize, k2: f64) -> ProblemSpec {
    let domain = Rect::new(-1.0, 1.0, -1.0, 1.0);
    let interface = Curve::VerticalLine { x0: 0.25 };
    ProblemSpec {
        name: "patch".into(),
        domain,
        interface,
        regions: [
            linear_region([1.0, 2.0, 3.0], 3.0, k2),
            linear_region([-0.5, 1.0, -1.0], 0.5, 0.0),
        ],
        forcing_mode: ForcingMode::Analytic,
        singular_point: None,
        family: MeshFamily::new(
            domain,
            Some(interface),
            BaseMesh::Structured { n, samples: None },
        ),
    }
}

fn residual(system: &SparseSystem, x: &[f64]) -> f64 {
    let ax = system.matvec(x);
    ax.iter()
        .zip(&system.rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn two_triangle_square_has_three_unknowns() {
    let vertices = vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ];
    let tri = |v| Triangle {
        vertices: v,
        region: RegionId::Region1,
    };
    let mesh = TriMesh::from_triangles(vertices, vec![tri([0, 1, 2]), tri([0, 2, 3])]).unwrap();
    let dofs = build_dof_map(&mesh).unwrap();
    assert_eq!(dofs.total_unknowns, 3);
    assert_eq!(dofs.dirichlet_edges.len(), 4);
    assert_eq!(dofs.n_lambda(), 0);
}

#[test]
fn unknown_count_matches_edge_classes() {
    for n in [2, 3] {
        let mesh = patch_problem(n, 0.0).family.level(1).unwrap();
        let dofs = build_dof_map(&mesh).unwrap();
        let count = |f: fn(&EdgeKind) -> bool| mesh.edges().iter().filter(|e| f(&e.kind)).count();
        let interior = count(|k| matches!(k, EdgeKind::Interior(_)));
        let interface = count(|k| *k == EdgeKind::Interface);
        assert!(interface > 0);
        assert_eq!(
            dofs.total_unknowns,
            mesh.triangles().len() + interior + 3 * interface
        );
    }
}

#[test]
fn region1_without_boundary_is_rejected() {
    // the inner disc is Region1 when the level set is flipped
    let vertices = vec![
        Point2::new(-1.0, -1.0),
        Point2::new(1.0, -1.0),
        Point2::new(1.0, 1.0),
        Point2::new(-1.0, 1.0),
        Point2::new(0.0, 0.0),
    ];
    let tri = |v, r| Triangle {
        vertices: v,
        region: r,
    };
    let mesh = TriMesh::from_triangles(
        vertices,
        vec![
            tri([0, 1, 4], RegionId::Region2),
            tri([1, 2, 4], RegionId::Region2),
            tri([2, 3, 4], RegionId::Region2),
            tri([3, 0, 4], RegionId::Region2),
        ],
    )
    .unwrap();
    assert!(matches!(build_dof_map(&mesh), Err(Error::WellPosedness(_))));
}

#[test]
fn linear_patch_is_reproduced_by_the_projection() {
    for k2 in [0.0, 4.0] {
        let spec = patch_problem(2, k2);
        for level in 1..=2 {
            let mesh = spec.family.level(level).unwrap();
            let dofs = build_dof_map(&mesh).unwrap();
            let system = assemble(&mesh, &spec, &dofs).unwrap();
            let x = project_exact(&mesh, &spec, &dofs).unwrap();
            let r = residual(&system, &x);
            assert!(r <= 1e-12, "k2 = {k2}, level {level}: residual {r:e}");
        }
    }
}

#[test]
fn matrix_is_symmetric_and_deterministic() {
    let spec = builtin_problem(1, &ProblemParams::default()).unwrap();
    let mesh = spec.family.level(1).unwrap();
    let dofs = build_dof_map(&mesh).unwrap();
    let a = assemble(&mesh, &spec, &dofs).unwrap();
    let b = assemble(&mesh, &spec, &dofs).unwrap();
    assert_eq!(a, b);
    let lookup: std::collections::HashMap<(usize, usize), f64> =
        a.triplets.iter().map(|&(i, j, v)| ((i, j), v)).collect();
    for (&(i, j), &v) in &lookup {
        let w = lookup.get(&(j, i)).copied().unwrap_or(0.0);
        assert!((v - w).abs() <= 1e-14 * a.max_abs(), "({i}, {j})");
    }
    assert!(a
        .triplets
        .windows(2)
        .all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
}

#[test]
fn multiplier_rows_have_no_diagonal() {
    let spec = builtin_problem(1, &ProblemParams::default()).unwrap();
    let mesh = spec.family.level(1).unwrap();
    let dofs = build_dof_map(&mesh).unwrap();
    let system = assemble(&mesh, &spec, &dofs).unwrap();
    for l in dofs.lambda_dof.iter().flatten() {
        let row: Vec<_> = system.triplets.iter().filter(|t| t.0 == *l).collect();
        assert_eq!(row.len(), 2);
        assert!((row[0].2 + row[1].2).abs() < 1e-15);
    }
}

#[test]
fn boundary_values_use_edge_averages() {
    let spec = builtin_problem(3, &ProblemParams::default()).unwrap();
    let mesh = spec.family.level(1).unwrap();
    let dofs = build_dof_map(&mesh).unwrap();
    let system = assemble(&mesh, &spec, &dofs).unwrap();
    let g = |p: &Point2| 5.0 * (-(p.x * p.x + p.y * p.y)).exp();
    let mut max_midpoint_gap = 0.0f64;
    for (k, &e) in dofs.dirichlet_edges.iter().enumerate() {
        let [a, b] = mesh.edge_points(e);
        // composite Simpson oracle
        let m = 200;
        let mut s = 0.0;
        for i in 0..=m {
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * g(&(a + (b - a) * (i as f64 / m as f64)));
        }
        let avg = s / (3.0 * m as f64);
        // three-point Gauss error is O(|e|^6)
        assert!((system.dirichlet_values[k] - avg).abs() < 1e-6);
        max_midpoint_gap = max_midpoint_gap.max((avg - g(&nalgebra::center(&a, &b))).abs());
    }
    assert!(max_midpoint_gap > 1e-4);
}

#[test]
fn matrix_market_lists_the_lower_triangle() {
    let spec = patch_problem(2, 0.0);
    let mesh = spec.family.level(1).unwrap();
    let dofs = build_dof_map(&mesh).unwrap();
    let system = assemble(&mesh, &spec, &dofs).unwrap();
    let mut buf = Vec::new();
    write_matrix_market(&system, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "%%MatrixMarket matrix coordinate real symmetric"
    );
    let header: Vec<usize> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(header[..2], [system.n, system.n]);
    let mut full = std::collections::BTreeMap::new();
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let (i, j): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let v: f64 = f[2].parse().unwrap();
        assert!(i >= j && j >= 1);
        full.insert((i - 1, j - 1), v);
        full.insert((j - 1, i - 1), v);
    }
    assert_eq!(full.len(), system.triplets.len());
    assert!(header[2] < system.triplets.len());
    for &(i, j, v) in &system.triplets {
        assert!((full[&(i, j)] - v).abs() <= 1e-15 * v.abs().max(1.0));
    }
    let mut rhs = Vec::new();
    write_rhs(&system, &mut rhs).unwrap();
    let parsed: Vec<f64> = String::from_utf8(rhs)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(parsed, system.rhs);
}

#[test]
fn unpacked_solution_recovers_exact_gradient_on_patch() {
    let spec = patch_problem(2, 0.0);
    let mesh = spec.family.level(1).unwrap();
    let dofs = build_dof_map(&mesh).unwrap();
    let system = assemble(&mesh, &spec, &dofs).unwrap();
    let x = project_exact(&mesh, &spec, &dofs).unwrap();
    let sol = WgSolution::from_vector(&mesh, &dofs, &x, &system.dirichlet_values);
    for t in 0..mesh.triangles().len() {
        let r = mesh.triangles()[t].region;
        let (basis, g) = sol.gradient(&mesh, t).unwrap();
        let c = basis.centroid();
        let exact = spec.exact_gradient(r, &c).unwrap();
        assert!((crate::element::eval_rt0(&g, &basis, &c) - exact).norm() < 1e-12);
    }
    let mut csv = Vec::new();
    sol.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("lambda,")).count(),
        dofs.n_lambda()
    );
}
