use std::io::{self, Write};

use super::SparseSystem;

/// Lower triangle of the (symmetric) matrix in MatrixMarket coordinate
/// format, 1-based.
pub fn write_matrix_market(system: &SparseSystem, mut out: impl Write) -> io::Result<()> {
    let lower: Vec<_> = system.triplets.iter().filter(|t| t.0 >= t.1).collect();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{} {} {}", system.n, system.n, lower.len())?;
    for &&(i, j, v) in &lower {
        writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// One right-hand-side value per line.
pub fn write_rhs(system: &SparseSystem, mut out: impl Write) -> io::Result<()> {
    for v in &system.rhs {
        writeln!(out, "{v:.17e}")?;
    }
    Ok(())
}
