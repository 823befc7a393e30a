use std::fs::File;
use std::path::Path;
use std::time::Instant;

use wgfem::analysis::{
    error_norms, format_sci, render_table, solve_level, LevelResult, Norm, StudyReport, TableFormat,
};
use wgfem::assembly::{assemble, build_dof_map, WgSolution};
use wgfem::mesh::{ingest_mesh, write_ele, write_node, BaseMesh, MeshFamily};
use wgfem::problems::{builtin_problem, ProblemSpec};
use wgfem::solver::solve;
use wgfem::TriMesh;

use crate::config::{Format, MeshSource, RunConfig};
use crate::output::{centroid_csv, heatmap_svg, write_atomic};
use crate::CliError;

/// Vertices this close to the interface level set count as on it when
/// reading mesh files.
const INTERFACE_TOL: f64 = 1e-9;

pub fn problem(cfg: &RunConfig) -> Result<ProblemSpec, CliError> {
    let spec = builtin_problem(cfg.problem, &cfg.params)?.with_forcing(cfg.forcing);
    Ok(if cfg.homogeneous {
        spec.homogeneous()
    } else {
        spec
    })
}

fn node_ele_paths(dir: &Path, level: usize) -> [std::path::PathBuf; 2] {
    ["node", "ele"].map(|ext| dir.join(format!("level{level}.{ext}")))
}

fn read_level(dir: &Path, level: usize, spec: &ProblemSpec) -> Result<TriMesh, CliError> {
    let [node, ele] = node_ele_paths(dir, level);
    let open = |p: &Path| {
        File::open(p).map_err(|e| CliError::Data(format!("level {level}: {}: {e}", p.display())))
    };
    let (node, ele) = (open(&node)?, open(&ele)?);
    ingest_mesh(
        node,
        ele,
        |p| spec.region_of(p),
        |p| spec.interface.level_set(p).abs() <= INTERFACE_TOL,
    )
    .map_err(|e| CliError::from(e).at_level(level))
}

fn family(cfg: &RunConfig, spec: &ProblemSpec) -> MeshFamily {
    match cfg.mesh {
        MeshSource::Plain { grid } => MeshFamily::new(
            spec.domain,
            None,
            BaseMesh::Structured {
                n: grid,
                samples: None,
            },
        ),
        _ => spec.family.clone(),
    }
}

/// Levels `1..=count` from the configured source.
pub fn meshes(cfg: &RunConfig, spec: &ProblemSpec, count: usize) -> Result<Vec<TriMesh>, CliError> {
    match &cfg.mesh {
        MeshSource::Files(dir) => (1..=count).map(|l| read_level(dir, l, spec)).collect(),
        _ => Ok(family(cfg, spec).levels(count)?),
    }
}

fn mesh_at(cfg: &RunConfig, spec: &ProblemSpec, level: usize) -> Result<TriMesh, CliError> {
    match &cfg.mesh {
        MeshSource::Files(dir) => read_level(dir, level, spec),
        _ => Ok(family(cfg, spec).level(level)?),
    }
}

fn require_interface(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    if let MeshSource::Plain { .. } = cfg.mesh {
        return Err(CliError::Usage(format!(
            "{what} needs interface-fitted meshes; drop --plain"
        )));
    }
    Ok(())
}

fn stats_line(level: usize, mesh: &TriMesh) -> String {
    let s = mesh.stats();
    format!(
        "level {level}: h_max {}, triangles {}, edges {}, interface edges {}, non-acute {:.1}%",
        format_sci(s.h_max),
        s.n_tri,
        s.n_edge,
        s.n_interface_edge,
        100.0 * s.nonacute_fraction
    )
}

pub fn cmd_mesh(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = problem(cfg)?;
    let meshes = meshes(cfg, &spec, cfg.levels)?;
    for (i, mesh) in meshes.iter().enumerate() {
        let [node, ele] = node_ele_paths(&cfg.out, i + 1);
        write_atomic(&node, write_node(mesh).as_bytes())?;
        write_atomic(&ele, write_ele(mesh).as_bytes())?;
        println!("{}", stats_line(i + 1, mesh));
    }
    Ok(())
}

pub fn cmd_stats(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = problem(cfg)?;
    for (i, mesh) in meshes(cfg, &spec, cfg.levels)?.iter().enumerate() {
        println!("{}", stats_line(i + 1, mesh));
        if let MeshSource::Plain { .. } = cfg.mesh {
            continue;
        }
        let dofs = build_dof_map(mesh)?;
        let system = assemble(mesh, &spec, &dofs)?;
        println!(
            "  unknowns {}, multipliers {}, matrix entries {}",
            dofs.total_unknowns,
            dofs.n_lambda(),
            system.triplets.len()
        );
    }
    Ok(())
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<(), CliError> {
    require_interface(cfg, "solve")?;
    let spec = problem(cfg)?;
    let level = cfg.level;
    let at = |e: wgfem::Error| CliError::from(e).at_level(level);
    let mesh = mesh_at(cfg, &spec, level)?;
    let start = Instant::now();
    let dofs = build_dof_map(&mesh).map_err(at)?;
    let system = assemble(&mesh, &spec, &dofs).map_err(at)?;
    let report = solve(&system).map_err(at)?;
    let solution =
        WgSolution::from_vector(&mesh, &dofs, &report.solution, &system.dirichlet_values);
    let (record, excluded) = error_norms(&mesh, &spec, &solution).map_err(at)?;
    let seconds = start.elapsed().as_secs_f64();

    let mut csv = Vec::new();
    solution.write_csv(&mut csv).map_err(wgfem::Error::from)?;
    write_atomic(&cfg.out.join(format!("solution_level{level}.csv")), &csv)?;
    write_atomic(
        &cfg.out.join(format!("centroids_level{level}.csv")),
        centroid_csv(&mesh, &solution.cell).as_bytes(),
    )?;
    if cfg.wants(Format::Svg) {
        write_atomic(
            &cfg.out.join(format!("solution_level{level}.svg")),
            heatmap_svg(&mesh, &solution.cell).as_bytes(),
        )?;
    }

    println!("problem {}: {}", cfg.problem, spec.name);
    println!("{}", stats_line(level, &mesh));
    println!(
        "unknowns {}, relative residual {}, factor entries {}, refined {}",
        dofs.total_unknowns,
        format_sci(report.relative_residual),
        report.factorization_stats.nnz_factor,
        report.refined
    );
    println!(
        "errors: linf_u {}, linf_grad {}, l2_u {}, l2_lambda {}",
        format_sci(record.linf_solution),
        format_sci(record.linf_gradient),
        format_sci(record.l2_solution),
        format_sci(record.l2_lambda_flux)
    );
    if !excluded.is_empty() {
        println!("cells excluded at the singular point: {excluded:?}");
    }
    println!("time {seconds:.3} s");
    Ok(())
}

fn check_h_decreasing(meshes: &[TriMesh]) -> Result<(), CliError> {
    for (l, w) in meshes.windows(2).enumerate() {
        if !(w[1].h_max() < w[0].h_max()) {
            return Err(CliError::Data(format!(
                "h_max does not decrease from level {} to level {}",
                l + 1,
                l + 2
            )));
        }
    }
    Ok(())
}

pub fn run_study(cfg: &RunConfig) -> Result<StudyReport, CliError> {
    require_interface(cfg, "study")?;
    if cfg.levels < 2 {
        return Err(CliError::Usage("a study needs at least 2 levels".into()));
    }
    let spec = problem(cfg)?;
    let meshes = meshes(cfg, &spec, cfg.levels)?;
    check_h_decreasing(&meshes)?;
    let results: Vec<Result<LevelResult, wgfem::Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = meshes
            .iter()
            .map(|mesh| s.spawn(|| solve_level(mesh, &spec)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("level worker panicked"))
            .collect()
    });
    let mut report = StudyReport {
        title: format!("Example {} ({})", cfg.problem, spec.name),
        ..Default::default()
    };
    for (l, r) in results.into_iter().enumerate() {
        let r = r.map_err(|e| CliError::from(e).at_level(l + 1))?;
        report.records.push(r.record);
        report.diagnostics.push(r.diagnostics);
    }
    Ok(report)
}

pub fn cmd_study(cfg: &RunConfig) -> Result<(), CliError> {
    let report = run_study(cfg)?;
    if cfg.wants(Format::Csv) {
        write_atomic(
            &cfg.out.join("study.csv"),
            render_table(&report, TableFormat::Csv).as_bytes(),
        )?;
    }
    if cfg.wants(Format::Markdown) {
        write_atomic(
            &cfg.out.join("study.md"),
            render_table(&report, TableFormat::Markdown).as_bytes(),
        )?;
    }
    print!("{}", render_table(&report, TableFormat::Markdown));
    for (l, d) in report.diagnostics.iter().enumerate() {
        println!(
            "level {}: unknowns {}, relative residual {}, {:.2} s",
            l + 1,
            d.unknowns,
            format_sci(d.relative_residual),
            d.seconds
        );
    }
    println!(
        "final orders: solution {:.4}, gradient {:.4}, lambda {:.4}",
        report.final_order(Norm::LinfSolution).unwrap_or(f64::NAN),
        report.final_order(Norm::LinfGradient).unwrap_or(f64::NAN),
        report.final_order(Norm::L2LambdaFlux).unwrap_or(f64::NAN)
    );
    Ok(())
}
