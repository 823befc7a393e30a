//! Run configuration: flags override `WGFEM_OUT`, which overrides the
//! config file, which overrides the defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use wgfem::problems::{ForcingMode, ProblemParams, BUILTIN_IDS, DEFAULT_FD_STEP};

use crate::CliError;

pub const OUT_ENV: &str = "WGFEM_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Svg,
}

impl Format {
    fn parse(s: &str) -> Result<Format, String> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            "svg" => Ok(Format::Svg),
            other => Err(format!(
                "unknown format {other:?} (expected csv, markdown or svg)"
            )),
        }
    }
}

/// Values read from flags or from a config file; `None` means unset.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub problem: Option<u32>,
    pub b: Option<f64>,
    pub kappa: Option<f64>,
    pub level: Option<usize>,
    pub levels: Option<usize>,
    pub mesh_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub forcing: Option<String>,
    pub hfd: Option<f64>,
    pub plain: Option<bool>,
    pub grid: Option<usize>,
    pub homogeneous: Option<bool>,
}

impl Overrides {
    fn or(self, lower: Overrides) -> Overrides {
        Overrides {
            problem: self.problem.or(lower.problem),
            b: self.b.or(lower.b),
            kappa: self.kappa.or(lower.kappa),
            level: self.level.or(lower.level),
            levels: self.levels.or(lower.levels),
            mesh_dir: self.mesh_dir.or(lower.mesh_dir),
            out: self.out.or(lower.out),
            formats: self.formats.or(lower.formats),
            forcing: self.forcing.or(lower.forcing),
            hfd: self.hfd.or(lower.hfd),
            plain: self.plain.or(lower.plain),
            grid: self.grid.or(lower.grid),
            homogeneous: self.homogeneous.or(lower.homogeneous),
        }
    }
}

pub fn parse_formats(s: &str) -> Result<Vec<Format>, String> {
    s.split(',')
        .filter(|f| !f.trim().is_empty())
        .map(Format::parse)
        .collect()
}

/// Parses the flat `key = value` config format. `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Overrides, CliError> {
    let mut seen = BTreeMap::new();
    let mut o = Overrides::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |m: String| CliError::Usage(format!("config line {}: {m}", i + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected `key = value`, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if let Some(prev) = seen.insert(key.to_string(), i + 1) {
            return Err(bad(format!("key {key:?} already set on line {prev}")));
        }
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("{key}: cannot parse {v:?}"))
        }
        let r: Result<(), String> = (|| {
            match key {
                "problem" => o.problem = Some(num(key, value)?),
                "b" => o.b = Some(num(key, value)?),
                "kappa" => o.kappa = Some(num(key, value)?),
                "level" => o.level = Some(num(key, value)?),
                "levels" => o.levels = Some(num(key, value)?),
                "mesh_dir" => o.mesh_dir = Some(PathBuf::from(value)),
                "out" => o.out = Some(PathBuf::from(value)),
                "format" => o.formats = Some(parse_formats(value)?),
                "forcing" => o.forcing = Some(value.to_string()),
                "hfd" => o.hfd = Some(num(key, value)?),
                "plain" => o.plain = Some(num(key, value)?),
                "grid" => o.grid = Some(num(key, value)?),
                "homogeneous" => o.homogeneous = Some(num(key, value)?),
                _ => return Err(format!("unknown key {key:?}")),
            }
            Ok(())
        })();
        r.map_err(bad)?;
    }
    Ok(o)
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    Builtin,
    /// Plain structured meshes without the interface, `grid` cells per unit.
    Plain {
        grid: usize,
    },
    /// `level<k>.node` / `level<k>.ele` files in a directory.
    Files(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: u32,
    pub params: ProblemParams,
    pub mesh: MeshSource,
    pub level: usize,
    pub levels: usize,
    pub forcing: ForcingMode,
    /// Zero forcing, boundary and jump data.
    pub homogeneous: bool,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

impl RunConfig {
    /// Merges flags (`flags` already include `WGFEM_OUT` for `out`), the
    /// optional config file and the defaults.
    pub fn resolve(flags: Overrides, file: Option<&Path>) -> Result<RunConfig, CliError> {
        let from_file = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Data(format!("cannot read config {}: {e}", path.display()))
                })?;
                parse_config(&text)?
            }
            None => Overrides::default(),
        };
        let o = flags.or(from_file);
        let problem = o.problem.unwrap_or(1);
        if !BUILTIN_IDS.contains(&problem) {
            return Err(CliError::Usage(format!(
                "problem must be in 1..=10, got {problem}"
            )));
        }
        let forcing = match o.forcing.as_deref().unwrap_or("fd") {
            "fd" => ForcingMode::FiniteDifference {
                h: o.hfd.unwrap_or(DEFAULT_FD_STEP),
            },
            "analytic" => ForcingMode::Analytic,
            other => {
                return Err(CliError::Usage(format!(
                    "forcing must be fd or analytic, got {other:?}"
                )))
            }
        };
        if let ForcingMode::FiniteDifference { h } = forcing {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Usage(format!("hfd must be positive, got {h}")));
            }
        }
        let level = o.level.unwrap_or(1);
        let levels = o.levels.unwrap_or(5);
        if level == 0 || levels == 0 {
            return Err(CliError::Usage(
                "level and levels must be at least 1".into(),
            ));
        }
        let mesh = match (o.mesh_dir, o.plain.unwrap_or(false)) {
            (Some(_), true) => {
                return Err(CliError::Usage("mesh_dir and plain are exclusive".into()))
            }
            (Some(dir), false) => MeshSource::Files(dir),
            (None, true) => MeshSource::Plain {
                grid: o.grid.unwrap_or(4).max(1),
            },
            (None, false) => MeshSource::Builtin,
        };
        Ok(RunConfig {
            problem,
            params: ProblemParams {
                b: o.b,
                kappa: o.kappa,
            },
            mesh,
            level,
            levels,
            forcing,
            homogeneous: o.homogeneous.unwrap_or(false),
            out: o.out.unwrap_or_else(|| PathBuf::from("wgfem-out")),
            formats: o
                .formats
                .unwrap_or_else(|| vec![Format::Csv, Format::Markdown]),
        })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_keys() {
        let o = parse_config(
            "# study setup\nproblem = 2\nkappa = 8\nlevels=4\nformat = csv, md\nforcing = analytic # exact\n",
        )
        .unwrap();
        assert_eq!(o.problem, Some(2));
        assert_eq!(o.kappa, Some(8.0));
        assert_eq!(o.levels, Some(4));
        assert_eq!(o.formats, Some(vec![Format::Csv, Format::Markdown]));
        assert_eq!(o.forcing.as_deref(), Some("analytic"));
    }

    #[test]
    fn bad_config_lines_are_usage_errors() {
        for text in ["problem 2", "colour = red", "levels = many", "b = 1\nb = 2"] {
            assert!(
                matches!(parse_config(text), Err(CliError::Usage(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = parse_config("problem = 3\nb = 1000\nout = from-file\n").unwrap();
        let flags = Overrides {
            problem: Some(4),
            ..Default::default()
        };
        let merged = flags.or(file);
        assert_eq!(merged.problem, Some(4));
        assert_eq!(merged.b, Some(1000.0));
        assert_eq!(merged.out, Some(PathBuf::from("from-file")));
        assert_eq!(merged.levels, None);
    }

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(Overrides::default(), None).unwrap();
        assert_eq!(c.problem, 1);
        assert_eq!(c.levels, 5);
        assert_eq!(c.mesh, MeshSource::Builtin);
        assert_eq!(
            c.forcing,
            ForcingMode::FiniteDifference { h: DEFAULT_FD_STEP }
        );
        assert!(c.wants(Format::Csv) && c.wants(Format::Markdown) && !c.wants(Format::Svg));
    }

    #[test]
    fn invalid_values_are_rejected() {
        let cases = [
            Overrides {
                problem: Some(11),
                ..Default::default()
            },
            Overrides {
                forcing: Some("spectral".into()),
                ..Default::default()
            },
            Overrides {
                hfd: Some(-1.0),
                ..Default::default()
            },
            Overrides {
                levels: Some(0),
                ..Default::default()
            },
        ];
        for o in cases {
            assert!(matches!(
                RunConfig::resolve(o, None),
                Err(CliError::Usage(_))
            ));
        }
    }
}
