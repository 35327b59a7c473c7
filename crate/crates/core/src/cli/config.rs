use std::path::{Path, PathBuf};

use crate::assembly::{Boundary, BoundaryAnchor, BoundaryOptions, Preset};
use crate::dispersion::{geometric_ladder, DEFAULT_LADDER_POINTS, LADDER_MAX, LADDER_MIN};
use crate::error::{Error, Result};
use crate::spline::MeshFamily;

/// Eigenvalue study settings (`[study]` section).
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub dim: usize,
    pub bc: Boundary,
    pub family: MeshFamily,
    pub elements: Vec<usize>,
    pub stretch: f64,
    pub presets: Vec<Preset>,
    pub modes: usize,
    pub boundary: BoundaryOptions,
    /// Output directory, resolved against the config file's directory.
    pub output: Option<PathBuf>,
}

/// Dispersion table settings (`[dispersion]` section).
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionConfig {
    pub presets: Vec<Preset>,
    pub ladder: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub study: Option<StudyConfig>,
    pub dispersion: Option<DispersionConfig>,
}

/// A `key = value` entry with its source line.
struct Entry {
    line: usize,
    key: String,
    value: String,
}

struct Section {
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Entry> {
        let i = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(i))
    }
}

struct Parser<'a> {
    path: &'a str,
}

impl Parser<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::ConfigParse {
            path: self.path.to_string(),
            line,
            message: message.into(),
        }
    }

    fn value<T: std::str::FromStr>(&self, e: &Entry, what: &str) -> Result<T> {
        e.value.parse().map_err(|_| {
            self.err(
                e.line,
                format!("{}: expected {what}, got '{}'", e.key, e.value),
            )
        })
    }

    fn list<T, F>(&self, e: &Entry, mut f: F) -> Result<Vec<T>>
    where
        F: FnMut(&str) -> Result<T>,
    {
        let items: Vec<&str> = e
            .value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if items.is_empty() {
            return Err(self.err(e.line, format!("{}: empty list", e.key)));
        }
        items
            .into_iter()
            .map(|s| f(s).map_err(|err| self.err(e.line, format!("{}: {}", e.key, plain(&err)))))
            .collect()
    }

    fn presets(&self, e: &Entry) -> Result<Vec<Preset>> {
        self.list(e, |s| s.parse())
    }

    fn finish(&self, s: &Section, name: &str) -> Result<()> {
        match s.entries.first() {
            Some(e) => Err(self.err(e.line, format!("unknown key '{}' in [{name}]", e.key))),
            None => Ok(()),
        }
    }
}

/// Message of an error without its category prefix.
fn plain(e: &Error) -> String {
    match e {
        Error::Configuration(m) | Error::InvalidParameter(m) | Error::InvalidMesh(m) => m.clone(),
        other => other.to_string(),
    }
}

fn split_sections(p: &Parser, text: &str) -> Result<Vec<(String, Section)>> {
    let mut out: Vec<(String, Section)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| p.err(line, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            if name != "study" && name != "dispersion" {
                return Err(p.err(line, format!("unknown section [{name}]")));
            }
            if out.iter().any(|(n, _)| *n == name) {
                return Err(p.err(line, format!("duplicate section [{name}]")));
            }
            out.push((
                name,
                Section {
                    line,
                    entries: Vec::new(),
                },
            ));
            continue;
        }
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| p.err(line, format!("expected 'key = value', got '{s}'")))?;
        let key = key.trim().to_ascii_lowercase();
        let (_, section) = out
            .last_mut()
            .ok_or_else(|| p.err(line, "key outside of a section"))?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(p.err(line, format!("duplicate key '{key}'")));
        }
        section.entries.push(Entry {
            line,
            key,
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

fn parse_study(p: &Parser, mut s: Section, base: &Path) -> Result<StudyConfig> {
    let dim = match s.take("dim") {
        Some(e) => {
            let d: usize = p.value(&e, "1 or 2")?;
            if d != 1 && d != 2 {
                return Err(p.err(e.line, format!("dim: expected 1 or 2, got {d}")));
            }
            d
        }
        None => 1,
    };
    let bc_entry = s.take("bc");
    let bc = match &bc_entry {
        Some(e) => e.value.parse().map_err(|err| p.err(e.line, plain(&err)))?,
        None => Boundary::Dirichlet,
    };
    let family = match s.take("family") {
        Some(e) => {
            let f: MeshFamily = e.value.parse().map_err(|err| p.err(e.line, plain(&err)))?;
            if f.is_periodic() != (bc == Boundary::Periodic) {
                return Err(p.err(
                    e.line,
                    format!("family {} does not match bc {}", f.name(), bc.name()),
                ));
            }
            f
        }
        None if bc == Boundary::Periodic => MeshFamily::PeriodicUniform,
        None => MeshFamily::OpenUniform,
    };
    if dim == 2 && bc == Boundary::Periodic {
        let line = bc_entry.map_or(s.line, |e| e.line);
        return Err(p.err(line, "2D studies support Dirichlet conditions only"));
    }
    let elements = match s.take("elements") {
        Some(e) => p.list(&e, |v| {
            let n: usize = v.parse().map_err(|_| {
                Error::Configuration(format!("expected an element count, got '{v}'"))
            })?;
            if n < 3 {
                return Err(Error::Configuration(format!(
                    "element count must be at least 3, got {n}"
                )));
            }
            Ok(n)
        })?,
        None => return Err(p.err(s.line, "[study] needs an 'elements' list")),
    };
    let stretch = match s.take("stretch") {
        Some(e) => {
            let r: f64 = p.value(&e, "a real number")?;
            if r.is_nan() || r < 1.0 {
                return Err(p.err(e.line, format!("stretch: must be at least 1, got {r}")));
            }
            r
        }
        None => 1.0,
    };
    let presets = match s.take("presets") {
        Some(e) => p.presets(&e)?,
        None => return Err(p.err(s.line, "[study] needs a 'presets' list")),
    };
    let modes = match s.take("modes") {
        Some(e) => {
            let m: usize = p.value(&e, "a positive mode count")?;
            if m == 0 {
                return Err(p.err(e.line, "modes: must be at least 1"));
            }
            m
        }
        None => 8,
    };
    let mut boundary = BoundaryOptions::default();
    if let Some(e) = s.take("boundary_anchor") {
        boundary.anchor = e
            .value
            .parse::<BoundaryAnchor>()
            .map_err(|err| p.err(e.line, plain(&err)))?;
    }
    if let Some(e) = s.take("interface_correction") {
        boundary.interface_correction = p.value(&e, "true or false")?;
    }
    let output = s.take("output").map(|e| base.join(e.value));
    p.finish(&s, "study")?;
    Ok(StudyConfig {
        dim,
        bc,
        family,
        elements,
        stretch,
        presets,
        modes,
        boundary,
        output,
    })
}

fn parse_dispersion(p: &Parser, mut s: Section) -> Result<DispersionConfig> {
    let presets = match s.take("presets") {
        Some(e) => p.presets(&e)?,
        None => return Err(p.err(s.line, "[dispersion] needs a 'presets' list")),
    };
    let mut bounds = (LADDER_MIN, LADDER_MAX, DEFAULT_LADDER_POINTS);
    let mut line = s.line;
    if let Some(e) = s.take("ladder_min") {
        bounds.0 = p.value(&e, "a real number")?;
        line = e.line;
    }
    if let Some(e) = s.take("ladder_max") {
        bounds.1 = p.value(&e, "a real number")?;
        line = e.line;
    }
    if let Some(e) = s.take("ladder_points") {
        bounds.2 = p.value(&e, "a point count")?;
        line = e.line;
    }
    let ladder =
        geometric_ladder(bounds.0, bounds.1, bounds.2).map_err(|err| p.err(line, plain(&err)))?;
    p.finish(&s, "dispersion")?;
    Ok(DispersionConfig { presets, ladder })
}

/// Parses config text; `path` is used in diagnostics and to resolve the
/// output directory.
pub fn parse_config(text: &str, path: &Path) -> Result<Config> {
    let shown = path.display().to_string();
    let p = Parser { path: &shown };
    let base = path.parent().unwrap_or(Path::new("."));
    let mut config = Config {
        study: None,
        dispersion: None,
    };
    for (name, section) in split_sections(&p, text)? {
        match name.as_str() {
            "study" => config.study = Some(parse_study(&p, section, base)?),
            _ => config.dispersion = Some(parse_dispersion(&p, section)?),
        }
    }
    if config.study.is_none() && config.dispersion.is_none() {
        return Err(p.err(0, "config has neither a [study] nor a [dispersion] section"));
    }
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigParse {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    parse_config(&text, path)
}
