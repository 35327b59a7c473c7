//! Command-line front end.

mod config;
mod output;

pub use config::{load_config, parse_config, Config, DispersionConfig, StudyConfig};
pub use output::{num, DISPERSION_HEADER, REPORT_HEADER, SUMMARY_HEADER};

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::assembly::{assemble_preset, Preset};
use crate::dispersion::{
    default_ladder, fit_error_order, geometric_ladder, solve_dispersion, DispersionSample,
};
use crate::eigen::{error_report, solve, tensor_error_report, EigenReport};
use crate::error::{Error, Result};
use crate::fit::loglog_fit;
use crate::quadrature::{
    derive_rule, g25, gauss_legendre, gauss_lobatto, nq2, Anchor, DerivationTarget, QuadratureRule,
    DEFAULT_G25_SEED, DEFAULT_NQ2_SEED,
};

#[derive(Debug, Parser)]
#[command(
    name = "dispquad",
    version,
    about = "Dispersion-minimizing quadrature for C1 quadratic splines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the nodes and weights of a rule (g1..g5, l2..l5, nq2, nq2-1..nq2-4, g25, g25-left, or a preset).
    Rules { name: String },
    /// Solve a rule's defining system by Newton iteration and print the residual history.
    Derive {
        /// nq2, g25 or g25-left
        target: String,
        /// Initial guess, comma separated (4 values for nq2, 5 for g25).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        seed: Option<Vec<f64>>,
    },
    /// Print the six uniform-mesh stencil coefficients of a preset.
    Stencil { preset: String },
    /// Tabulate the discrete wavenumber over a frequency ladder.
    Dispersion {
        preset: String,
        /// Append the fitted error order and coefficient.
        #[arg(long)]
        fit: bool,
        #[arg(long, default_value_t = crate::dispersion::LADDER_MIN)]
        ladder_min: f64,
        #[arg(long, default_value_t = crate::dispersion::LADDER_MAX)]
        ladder_max: f64,
        #[arg(long, default_value_t = crate::dispersion::DEFAULT_LADDER_POINTS)]
        ladder_points: usize,
    },
    /// Print eigenvalue and eigenfunction errors for every case of a study config.
    Eigen { config: PathBuf },
    /// Run a study config and write per-case files plus a summary of fitted slopes.
    Study { config: PathBuf },
}

/// Resolves a rule name from the catalog, falling back to preset names.
pub fn rule_by_name(name: &str) -> Result<QuadratureRule> {
    let key = name.trim().to_ascii_lowercase();
    let digit = |prefix: &str| {
        key.strip_prefix(prefix)
            .and_then(|d| d.parse::<usize>().ok())
    };
    if let Some(v) = key.strip_prefix("nq2-").and_then(|d| d.parse::<u8>().ok()) {
        return nq2(v);
    }
    match key.as_str() {
        "nq2" => return nq2(1),
        "g25" | "g25-right" => return Ok(g25(Anchor::Right)),
        "g25-left" => return Ok(g25(Anchor::Left)),
        _ => {}
    }
    if let Some(m) = digit("g") {
        return gauss_legendre(m);
    }
    if let Some(m) = digit("l") {
        return gauss_lobatto(m);
    }
    key.parse::<Preset>()
        .map_err(|_| Error::Configuration(format!("unknown rule '{name}'")))?
        .interior_rule()
}

fn write_rule(out: &mut dyn Write, rule: &QuadratureRule) -> Result<()> {
    writeln!(out, "node,weight")?;
    for (n, w) in rule.pairs() {
        writeln!(out, "{},{}", num(n), num(w))?;
    }
    Ok(())
}

/// One eigen case: a preset on a mesh with `n` elements per direction.
pub fn run_case(study: &StudyConfig, preset: Preset, n: usize) -> Result<EigenReport> {
    let disc = assemble_preset(
        preset,
        study.family,
        n,
        study.stretch,
        study.bc,
        study.boundary,
    )?;
    let pairs = solve(&disc)?;
    match study.dim {
        1 => error_report(&pairs, disc.space(), study.bc, 1, study.modes),
        _ => tensor_error_report(&pairs, disc.space(), study.modes),
    }
}

fn dispersion_table(
    preset: Preset,
    ladder: &[f64],
    fit: bool,
) -> Result<(
    Vec<DispersionSample>,
    Option<crate::dispersion::ErrorOrderFit>,
)> {
    let st = preset.stencil()?;
    let samples = ladder
        .iter()
        .map(|&l| solve_dispersion(&st, l))
        .collect::<Result<Vec<_>>>()?;
    let f = if fit {
        Some(fit_error_order(&st, ladder)?)
    } else {
        None
    };
    Ok((samples, f))
}

/// Slopes of the error columns against `h = 1/n`, one row per preset and mode.
fn summary_rows(
    study: &StudyConfig,
    preset: Preset,
    reports: &[(usize, EigenReport)],
) -> Vec<String> {
    let Some((_, first)) = reports.first() else {
        return Vec::new();
    };
    (0..first.modes.len())
        .map(|i| {
            let slope = |pick: fn(&crate::eigen::ModeError) -> f64| {
                let (h, v): (Vec<f64>, Vec<f64>) = reports
                    .iter()
                    .map(|(n, r)| (1.0 / *n as f64, pick(&r.modes[i]).abs()))
                    .filter(|(_, v)| *v > 0.0)
                    .unzip();
                loglog_fit(&h, &v).map_or(f64::NAN, |f| f.slope)
            };
            let m = &first.modes[i];
            format!(
                "{preset},{},{},{},{},{},{},{},{},{}",
                study.dim,
                study.bc.name(),
                study.family.name(),
                m.mode_j,
                m.mode_k,
                reports.len(),
                num(slope(|m| m.ev_rel_err)),
                num(slope(|m| m.ef_l2_err)),
                num(slope(|m| m.ef_energy_scaled))
            )
        })
        .collect()
}

fn write_file(path: &Path, body: &[u8]) -> Result<()> {
    fs::write(path, body)?;
    Ok(())
}

/// Runs every case of the config and writes its output files. The summary
/// is written last, atomically, and only if every case succeeded.
pub fn run_study(config: &Config, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let summary = out_dir.join("summary.csv");
    if summary.exists() {
        fs::remove_file(&summary)?;
    }
    let mut written = Vec::new();
    let mut summary_body = Vec::new();
    if let Some(study) = &config.study {
        writeln!(summary_body, "{SUMMARY_HEADER}")?;
        for &preset in &study.presets {
            let mut reports = Vec::new();
            for &n in &study.elements {
                let report = run_case(study, preset, n)?;
                let mut body = Vec::new();
                writeln!(body, "{REPORT_HEADER}")?;
                output::write_report(&mut body, preset, study.dim, study.bc, n, &report)?;
                let path = out_dir.join(format!(
                    "{preset}_{}d_{}_n{n}.csv",
                    study.dim,
                    study.family.name()
                ));
                write_file(&path, &body)?;
                written.push(path);
                reports.push((n, report));
            }
            for row in summary_rows(study, preset, &reports) {
                writeln!(summary_body, "{row}")?;
            }
        }
    }
    if let Some(disp) = &config.dispersion {
        for &preset in &disp.presets {
            let (samples, fit) = dispersion_table(preset, &disp.ladder, true)?;
            let mut body = Vec::new();
            output::write_dispersion(&mut body, preset, &samples, fit.as_ref())?;
            let path = out_dir.join(format!("dispersion_{preset}.csv"));
            write_file(&path, &body)?;
            written.push(path);
        }
    }
    if config.study.is_some() {
        let tmp = out_dir.join("summary.csv.tmp");
        write_file(&tmp, &summary_body)?;
        fs::rename(&tmp, &summary)?;
        written.push(summary);
    }
    Ok(written)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Rules { name } => write_rule(out, &rule_by_name(&name)?),
        Command::Derive { target, seed } => {
            let target: DerivationTarget = target.parse()?;
            let seed = seed.unwrap_or_else(|| match target {
                DerivationTarget::Nq2 => DEFAULT_NQ2_SEED.to_vec(),
                DerivationTarget::G25(Anchor::Right) => DEFAULT_G25_SEED.to_vec(),
                DerivationTarget::G25(Anchor::Left) => {
                    let [a, b, w1, w2, w3] = DEFAULT_G25_SEED;
                    vec![1.0 - b, 1.0 - a, w2, w1, w3]
                }
            });
            let d = derive_rule(target, &seed)?;
            writeln!(out, "iteration,residual")?;
            for (i, r) in d.history.iter().enumerate() {
                writeln!(out, "{i},{}", num(*r))?;
            }
            writeln!(out, "# converged after {} iterations", d.iterations)?;
            write_rule(out, &d.rule)
        }
        Command::Stencil { preset } => {
            let st = preset.parse::<Preset>()?.stencil()?;
            writeln!(out, "coefficient,value")?;
            for (name, v) in ["K0", "K1", "K2", "M0", "M1", "M2"]
                .iter()
                .zip(st.as_array())
            {
                writeln!(out, "{name},{}", num(v))?;
            }
            Ok(())
        }
        Command::Dispersion {
            preset,
            fit,
            ladder_min,
            ladder_max,
            ladder_points,
        } => {
            let preset: Preset = preset.parse()?;
            let ladder = if (ladder_min, ladder_max, ladder_points)
                == (
                    crate::dispersion::LADDER_MIN,
                    crate::dispersion::LADDER_MAX,
                    crate::dispersion::DEFAULT_LADDER_POINTS,
                ) {
                default_ladder()
            } else {
                geometric_ladder(ladder_min, ladder_max, ladder_points)?
            };
            let (samples, f) = dispersion_table(preset, &ladder, fit)?;
            output::write_dispersion(out, preset, &samples, f.as_ref())
        }
        Command::Eigen { config } => {
            let cfg = load_config(&config)?;
            let study = cfg.study.ok_or_else(|| Error::ConfigParse {
                path: config.display().to_string(),
                line: 0,
                message: "eigen needs a [study] section".into(),
            })?;
            writeln!(out, "{REPORT_HEADER}")?;
            for &preset in &study.presets {
                for &n in &study.elements {
                    let report = run_case(&study, preset, n)?;
                    output::write_report(out, preset, study.dim, study.bc, n, &report)?;
                }
            }
            Ok(())
        }
        Command::Study { config } => {
            let cfg = load_config(&config)?;
            let dir = cfg
                .study
                .as_ref()
                .and_then(|s| s.output.clone())
                .unwrap_or_else(|| config.parent().unwrap_or(Path::new(".")).join("output"));
            for path in run_study(&cfg, &dir)? {
                log::debug!("wrote {}", path.display());
                writeln!(out, "{}", path.display())?;
            }
            Ok(())
        }
    }
}
