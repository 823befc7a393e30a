//! Shared fixtures for the pipeline benchmarks.

use wgfem::assembly::{build_dof_map, DofMap};
use wgfem::problems::{builtin_problem, ProblemParams, ProblemSpec};
use wgfem::TriMesh;

pub struct Fixture {
    pub spec: ProblemSpec,
    pub mesh: TriMesh,
    pub dofs: DofMap,
}

/// Built-in problem `id` on its own mesh family at `level`.
pub fn fixture(id: u32, level: usize) -> Fixture {
    let spec = builtin_problem(id, &ProblemParams::default()).expect("built-in problem");
    let mesh = spec.family.level(level).expect("mesh level");
    let dofs = build_dof_map(&mesh).expect("dof map");
    Fixture { spec, mesh, dofs }
}
