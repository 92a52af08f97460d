//! Run configuration: defaults, flat key=value config files, flag overrides.

use std::fmt::Write as _;
use std::path::Path;

use hymse::mesh::Deformation;
use hymse::solver::{SchurMethod, SolverPath};
use hymse::verification::CaseKind;

/// Mesh selection: a single kind for solves, optionally both for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshChoice {
    Orthogonal,
    Curved,
    Both,
}

impl MeshChoice {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "orthogonal" => Ok(Self::Orthogonal),
            "curved" => Ok(Self::Curved),
            "both" => Ok(Self::Both),
            other => Err(format!(
                "invalid mesh '{other}' (expected orthogonal, curved or both)"
            )),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Orthogonal => "orthogonal",
            Self::Curved => "curved",
            Self::Both => "both",
        }
    }

    /// The deformations a sweep iterates over.
    pub fn deformations(self, amplitude: f64) -> Vec<Deformation> {
        match self {
            Self::Orthogonal => vec![Deformation::Orthogonal],
            Self::Curved => vec![Deformation::Curved { amplitude }],
            Self::Both => vec![
                Deformation::Orthogonal,
                Deformation::Curved { amplitude },
            ],
        }
    }

    /// A single deformation, for commands that solve one mesh.
    pub fn single(self, amplitude: f64) -> Result<Deformation, String> {
        match self {
            Self::Orthogonal => Ok(Deformation::Orthogonal),
            Self::Curved => Ok(Deformation::Curved { amplitude }),
            Self::Both => Err("mesh 'both' is only valid for sweeps".to_string()),
        }
    }
}

/// Full run configuration. Built from defaults, then an optional config
/// file, then command-line flags, in that order.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kx: usize,
    pub ky: usize,
    pub degree: usize,
    /// None means automatic: Q = N + 4.
    pub quad: Option<usize>,
    pub mesh: MeshChoice,
    pub curve_amp: f64,
    pub alpha: f64,
    pub source: CaseKind,
    pub path: SolverPath,
    pub schur_method: SchurMethod,
    pub threads: usize,
    pub out: String,
    pub sample_grid: usize,
    pub cond: bool,
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kx: 3,
            ky: 3,
            degree: 6,
            quad: None,
            mesh: MeshChoice::Orthogonal,
            curve_amp: 0.15,
            alpha: 0.1,
            source: CaseKind::Herbin,
            path: SolverPath::Both,
            schur_method: SchurMethod::Direct,
            threads: 0,
            out: "out".to_string(),
            sample_grid: 0,
            cond: false,
            timings: true,
        }
    }
}

fn parse_usize(key: &str, value: &str) -> Result<usize, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value '{value}' for {key} (expected a non-negative integer)"))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value '{value}' for {key} (expected a number)"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("invalid value '{value}' for {key} (expected true or false)")),
    }
}

pub fn parse_source(value: &str) -> Result<CaseKind, String> {
    match value {
        "herbin" => Ok(CaseKind::Herbin),
        "zero" => Ok(CaseKind::Zero),
        other => Err(format!("invalid source '{other}' (expected herbin or zero)")),
    }
}

pub fn parse_path(value: &str) -> Result<SolverPath, String> {
    match value {
        "monolithic" => Ok(SolverPath::Monolithic),
        "schur" => Ok(SolverPath::Schur),
        "both" => Ok(SolverPath::Both),
        other => Err(format!(
            "invalid path '{other}' (expected monolithic, schur or both)"
        )),
    }
}

pub fn parse_schur_method(value: &str) -> Result<SchurMethod, String> {
    match value {
        "direct" => Ok(SchurMethod::Direct),
        "cg" => Ok(SchurMethod::ConjugateGradient),
        other => Err(format!("invalid schur_method '{other}' (expected direct or cg)")),
    }
}

pub fn parse_quad(value: &str) -> Result<Option<usize>, String> {
    if value == "auto" {
        Ok(None)
    } else {
        parse_usize("quad", value).map(Some)
    }
}

fn path_name(path: SolverPath) -> &'static str {
    match path {
        SolverPath::Monolithic => "monolithic",
        SolverPath::Schur => "schur",
        SolverPath::Both => "both",
    }
}

fn source_name(source: CaseKind) -> &'static str {
    match source {
        CaseKind::Herbin => "herbin",
        CaseKind::Zero => "zero",
    }
}

fn schur_method_name(method: SchurMethod) -> &'static str {
    match method {
        SchurMethod::Direct => "direct",
        SchurMethod::ConjugateGradient => "cg",
    }
}

impl RunConfig {
    /// Apply one key=value pair. Unknown keys are configuration errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "kx" => self.kx = parse_usize(key, value)?,
            "ky" => self.ky = parse_usize(key, value)?,
            "degree" => self.degree = parse_usize(key, value)?,
            "quad" => self.quad = parse_quad(value)?,
            "mesh" => self.mesh = MeshChoice::parse(value)?,
            "curve_amp" => self.curve_amp = parse_f64(key, value)?,
            "alpha" => self.alpha = parse_f64(key, value)?,
            "source" => self.source = parse_source(value)?,
            "path" => self.path = parse_path(value)?,
            "schur_method" => self.schur_method = parse_schur_method(value)?,
            "threads" => self.threads = parse_usize(key, value)?,
            "out" => self.out = value.to_string(),
            "sample_grid" => self.sample_grid = parse_usize(key, value)?,
            "cond" => self.cond = parse_bool(key, value)?,
            "timings" => self.timings = parse_bool(key, value)?,
            other => return Err(format!("unknown configuration key '{other}'")),
        }
        Ok(())
    }

    /// Read a flat key=value config file. Blank lines and lines starting
    /// with '#' are ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                lineno + 1
            ))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| format!("{}:{}: {e}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    /// Serialize as a config file (the `defaults` subcommand output).
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kx={}", self.kx);
        let _ = writeln!(s, "ky={}", self.ky);
        let _ = writeln!(s, "degree={}", self.degree);
        match self.quad {
            None => {
                let _ = writeln!(s, "quad=auto");
            }
            Some(q) => {
                let _ = writeln!(s, "quad={q}");
            }
        }
        let _ = writeln!(s, "mesh={}", self.mesh.name());
        let _ = writeln!(s, "curve_amp={}", self.curve_amp);
        let _ = writeln!(s, "alpha={}", self.alpha);
        let _ = writeln!(s, "source={}", source_name(self.source));
        let _ = writeln!(s, "path={}", path_name(self.path));
        let _ = writeln!(s, "schur_method={}", schur_method_name(self.schur_method));
        let _ = writeln!(s, "threads={}", self.threads);
        let _ = writeln!(s, "out={}", self.out);
        let _ = writeln!(s, "sample_grid={}", self.sample_grid);
        let _ = writeln!(s, "cond={}", self.cond);
        let _ = writeln!(s, "timings={}", self.timings);
        s
    }

    pub fn path_name(&self) -> &'static str {
        path_name(self.path)
    }

    pub fn source_name(&self) -> &'static str {
        source_name(self.source)
    }

    pub fn schur_method_name(&self) -> &'static str {
        schur_method_name(self.schur_method)
    }

    /// Effective quadrature order (the automatic rule is Q = N + 4).
    pub fn effective_quad(&self) -> usize {
        self.quad.unwrap_or(self.degree + 4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_round_trip_through_config_text() {
        let cfg = RunConfig::default();
        let mut reparsed = RunConfig::default();
        reparsed.kx = 99;
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(cfg.to_config_text().as_bytes()).unwrap();
        reparsed.apply_file(file.path()).unwrap();
        assert_eq!(reparsed.kx, cfg.kx);
        assert_eq!(reparsed.degree, cfg.degree);
        assert_eq!(reparsed.mesh, cfg.mesh);
        assert_eq!(reparsed.timings, cfg.timings);
    }

    #[test]
    fn unknown_key_rejected() {
        let mut cfg = RunConfig::default();
        let err = cfg.set("degreee", "3").unwrap_err();
        assert!(err.contains("unknown configuration key"));
    }

    #[test]
    fn quad_auto_and_numeric() {
        let mut cfg = RunConfig::default();
        cfg.set("quad", "12").unwrap();
        assert_eq!(cfg.quad, Some(12));
        cfg.set("quad", "auto").unwrap();
        assert_eq!(cfg.quad, None);
        assert_eq!(cfg.effective_quad(), cfg.degree + 4);
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# a comment").unwrap();
        writeln!(file).unwrap();
        writeln!(file, "degree = 4").unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(file.path()).unwrap();
        assert_eq!(cfg.degree, 4);
    }

    #[test]
    fn mesh_both_invalid_for_single_solve() {
        assert!(MeshChoice::Both.single(0.15).is_err());
        assert!(matches!(
            MeshChoice::Curved.single(0.2),
            Ok(Deformation::Curved { amplitude }) if amplitude == 0.2
        ));
    }
}
