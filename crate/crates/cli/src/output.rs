use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use wgfem::TriMesh;

use crate::CliError;

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Data(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

/// `x,y,w0` per triangle, at the centroid.
pub fn centroid_csv(mesh: &TriMesh, cell: &[f64]) -> String {
    let mut out = String::from("x,y,w0\n");
    for (t, v) in cell.iter().enumerate() {
        let c = mesh.centroid(t);
        let _ = writeln!(out, "{:.16e},{:.16e},{v:.16e}", c.x, c.y);
    }
    out
}

fn color(s: f64) -> String {
    // blue -> white -> red
    let s = s.clamp(0.0, 1.0);
    let (r, g, b) = if s < 0.5 {
        let t = 2.0 * s;
        (t, t, 1.0)
    } else {
        let t = 2.0 * (1.0 - s);
        (1.0, t, t)
    };
    let c = |x: f64| (x * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(r), c(g), c(b))
}

/// Flat-shaded heatmap of the cell values.
pub fn heatmap_svg(mesh: &TriMesh, cell: &[f64]) -> String {
    let rect = mesh.bounding_rect();
    let width = 600.0;
    let scale = width / rect.width();
    let height = rect.height() * scale;
    let (lo, hi) = cell
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(out, "<!-- w0 from {lo:.6e} (blue) to {hi:.6e} (red) -->");
    for (t, v) in cell.iter().enumerate() {
        let pts: Vec<String> = mesh
            .triangle_points(t)
            .iter()
            .map(|p| {
                format!(
                    "{:.3},{:.3}",
                    (p.x - rect.x_min) * scale,
                    (rect.y_max - p.y) * scale
                )
            })
            .collect();
        let c = color((v - lo) / span);
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{c}" stroke="{c}" stroke-width="0.2"/>"#,
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}
