//! Command implementations behind the `supercavity` binary.
//!
//! Every command takes a [`RunConfig`] and returns the rendered document, so
//! the binary only handles argument parsing and file output.

pub mod config;
pub mod output;

use std::fmt;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::continuum_long::{default_grid, long_mode_shift, long_perturbative_k, long_profile, long_resonant_state};
use crate::continuum_short::{short_mode_shift, short_perturbative_k, short_profiles, short_resonant_state};
use crate::model::{IdenticalAtoms, Parity, WaveguideParams};
use crate::resonance::{
    mode_shift, perturbative_k_complex, reconstruct_wavefunction, resonant_state, sweep_omega_range,
};
use crate::scattering::spectrum_sweep;
use crate::verify::{run_verify, Level};

pub use config::{ConfigError, Model, RunConfig, Sweep, SweepVar, Units};
pub use output::{num, Cell, Format, Header, Table};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Library(crate::Error),
    Io(std::io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Library(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Named configurations shipped with the crate.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig3a", include_str!("../../presets/fig3a.conf")),
    ("fig3b", include_str!("../../presets/fig3b.conf")),
    ("fig3c", include_str!("../../presets/fig3c.conf")),
    ("fig3d", include_str!("../../presets/fig3d.conf")),
    ("fig4a", include_str!("../../presets/fig4a.conf")),
    ("fig4b", include_str!("../../presets/fig4b.conf")),
    ("fig4c", include_str!("../../presets/fig4c.conf")),
    ("fig6a", include_str!("../../presets/fig6a.conf")),
    ("fig6b", include_str!("../../presets/fig6b.conf")),
    ("fig7a", include_str!("../../presets/fig7a.conf")),
    ("fig7b", include_str!("../../presets/fig7b.conf")),
    ("fig7c", include_str!("../../presets/fig7c.conf")),
    ("fig9", include_str!("../../presets/fig9.conf")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Reads the configuration from a file or a preset; exactly one is required.
pub fn load_config(path: Option<&Path>, preset_name: Option<&str>) -> CliResult<RunConfig> {
    match (path, preset_name) {
        (Some(p), None) => Ok(RunConfig::parse(&std::fs::read_to_string(p)?)?),
        (None, Some(name)) => {
            let text = preset(name).ok_or_else(|| {
                let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
                CliError::Usage(format!("unknown preset `{name}` (known: {})", known.join(", ")))
            })?;
            Ok(RunConfig::parse(text)?)
        }
        (Some(_), Some(_)) => Err(CliError::Usage("give either --config or --preset, not both".into())),
        (None, None) => Err(CliError::Usage("one of --config or --preset is required".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutputOptions {
    pub format: Format,
    pub timestamp: bool,
}

impl OutputOptions {
    fn header(&self, command: &str, cfg: &RunConfig, notes: Vec<String>) -> Header {
        Header {
            command: command.to_string(),
            timestamp: self.timestamp.then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
            config: cfg.to_lines(),
            notes,
        }
    }
}

/// Default k-grid of the spectrum command: the whole zone, 801 points.
pub const DEFAULT_SPECTRUM: Sweep = Sweep {
    var: SweepVar::K,
    min: -std::f64::consts::PI,
    max: std::f64::consts::PI,
    n: 801,
};

/// CSV columns `k, T, R, flag` with `R = |r|^2`.
pub fn cmd_spectrum(cfg: &RunConfig, opts: &OutputOptions) -> CliResult<String> {
    if cfg.model != Model::Discrete {
        return Err(CliError::Usage(format!(
            "spectrum needs model=discrete, got {}",
            cfg.model.as_str()
        )));
    }
    let sweep = cfg.sweep.unwrap_or(DEFAULT_SPECTRUM);
    if sweep.var != SweepVar::K {
        return Err(CliError::Usage("spectrum sweeps k; set sweep.var=k".into()));
    }
    let wg = cfg.waveguide()?;
    let atoms = cfg.atom_pair()?;
    let points = spectrum_sweep(&sweep.points(), &wg, &atoms)?;
    let mut table = Table::new(vec!["k", "T", "R", "flag"]);
    for p in points {
        table.push(vec![
            p.k.into(),
            p.transmission.into(),
            p.reflection.into(),
            p.flags.label().into(),
        ]);
    }
    Ok(table.render(&opts.header("spectrum", cfg, vec![]), opts.format))
}

/// Mode indices to analyse: the configured `(n, parity)` or every admissible
/// pair.
fn modes(cfg: &RunConfig) -> Vec<(i64, Parity)> {
    let parities: Vec<Parity> = match cfg.parity {
        Some(p) => vec![p],
        None => vec![Parity::Odd, Parity::Even],
    };
    let mut out = Vec::new();
    for p in parities {
        let (lo, hi) = p.mode_range(cfg.d);
        match cfg.n {
            Some(n) => out.push((n, p)),
            None => out.extend((lo..=hi).map(|n| (n, p))),
        }
    }
    out
}

struct ModeRow {
    q: f64,
    shift: crate::Result<f64>,
    pert: crate::Result<Complex64>,
    root: crate::Result<(Complex64, f64)>,
}

fn analyse_mode(cfg: &RunConfig, wg: &WaveguideParams, atoms: &IdenticalAtoms, n: i64, p: Parity) -> ModeRow {
    let e = cfg.expansion;
    let q = p.mode_q(n, atoms.d);
    match cfg.model {
        Model::Discrete => ModeRow {
            q,
            shift: mode_shift(n, wg, atoms, p),
            pert: perturbative_k_complex(n, wg, atoms, p, e),
            root: resonant_state(n, p, wg, atoms, e).map(|s| (s.k, s.residual)),
        },
        Model::Long => ModeRow {
            q,
            shift: long_mode_shift(n, wg, atoms, p),
            pert: long_perturbative_k(n, wg, atoms, p, e),
            root: long_resonant_state(n, p, wg, atoms, e).map(|s| (s.k, s.residual)),
        },
        Model::Short => ModeRow {
            q,
            shift: short_mode_shift(n, wg, atoms, p),
            pert: short_perturbative_k(n, wg, atoms, p, e),
            root: short_resonant_state(n, p, wg, atoms, e).map(|s| (s.k, s.residual)),
        },
    }
}

/// One row per `(n, parity)`: `q_n`, `Q_n`, the expansion, the Newton root,
/// its residual, `Im k` and the expansion error. Failed modes keep their row
/// with `NaN` values and the error in `status`.
pub fn cmd_resonances(cfg: &RunConfig, opts: &OutputOptions) -> CliResult<String> {
    let wg = cfg.waveguide()?;
    let atoms = cfg.identical()?;
    let list = modes(cfg);
    let rows: Vec<ModeRow> = list
        .par_iter()
        .map(|&(n, p)| analyse_mode(cfg, &wg, &atoms, n, p))
        .collect();
    let mut table = Table::new(vec![
        "n",
        "parity",
        "q_n",
        "Q_n",
        "k_pert_re",
        "k_pert_im",
        "k_re",
        "k_im",
        "residual",
        "lifetime_im_k",
        "pert_gap",
        "status",
    ]);
    let nan = f64::NAN;
    for (&(n, p), row) in list.iter().zip(rows) {
        let shift = row.shift.as_ref().copied().unwrap_or(nan);
        let pert = row.pert.as_ref().copied().unwrap_or(Complex64::new(nan, nan));
        let (root, residual) = row.root.as_ref().copied().unwrap_or((Complex64::new(nan, nan), nan));
        let status = match (&row.shift, &row.root) {
            (Err(e), _) | (_, Err(e)) => e.to_string(),
            _ => "ok".to_string(),
        };
        table.push(vec![
            n.into(),
            p.as_str().into(),
            row.q.into(),
            shift.into(),
            pert.re.into(),
            pert.im.into(),
            root.re.into(),
            root.im.into(),
            residual.into(),
            root.im.into(),
            (pert - root).norm().into(),
            status.into(),
        ]);
    }
    Ok(table.render(&opts.header("resonances", cfg, vec![]), opts.format))
}

/// The wave number to profile: `k.re`/`k.im` when given, otherwise the
/// Newton root of the configured mode (odd parity by default).
fn profile_k(cfg: &RunConfig, wg: &WaveguideParams, atoms: &IdenticalAtoms) -> CliResult<Complex64> {
    if let Some((re, im)) = cfg.k {
        return Ok(Complex64::new(re, im));
    }
    let n = cfg
        .n
        .ok_or_else(|| CliError::Usage("profile needs either n (with parity) or k.re/k.im".into()))?;
    let p = cfg.parity.unwrap_or(Parity::Odd);
    let row = analyse_mode(cfg, wg, atoms, n, p);
    Ok(row.root?.0)
}

fn complex_note(label: &str, z: Complex64) -> String {
    format!("{label}={} {}", num(z.re), num(z.im))
}

/// Profile of one state, or for `model=discrete` with `sweep.var=omega` the
/// contour `(j, Omega, |u|^2)` of the least leaky state at each `Omega`.
pub fn cmd_profile(cfg: &RunConfig, opts: &OutputOptions) -> CliResult<String> {
    let wg = cfg.waveguide()?;
    let atoms = cfg.identical()?;
    if let Some(sweep) = cfg.sweep {
        if cfg.model == Model::Discrete && sweep.var == SweepVar::Omega {
            return contour(cfg, opts, &wg, &atoms, sweep);
        }
        return Err(CliError::Usage(
            "profile sweeps only omega, and only for model=discrete".into(),
        ));
    }
    let k = profile_k(cfg, &wg, &atoms)?;
    let mut notes = vec![complex_note("k", k)];
    let table = match cfg.model {
        Model::Discrete => {
            let prof = reconstruct_wavefunction(k, &wg, &atoms, cfg.half_length.unwrap_or(3 * cfg.d))?;
            notes.push(format!("lattice_residual={}", num(prof.lattice_residual)));
            notes.push(format!("outside_probability={}", num(prof.outside_probability())));
            notes.push(format!("tail={}", prof.tail.as_str()));
            let mut t = Table::new(vec!["j", "re", "im", "abs2", "region"]);
            for ((j, u), r) in prof.sites.iter().zip(&prof.values).zip(&prof.regions) {
                t.push(vec![
                    (*j).into(),
                    u.re.into(),
                    u.im.into(),
                    u.norm_sqr().into(),
                    r.as_str().into(),
                ]);
            }
            t
        }
        Model::Long => {
            let prof = long_profile(k, &wg, &atoms, &default_grid(cfg.d, cfg.points))?;
            notes.push(format!(
                "continuity_residual={} {}",
                num(prof.continuity_residual[0]),
                num(prof.continuity_residual[1])
            ));
            notes.push(format!(
                "jump_residual={} {}",
                num(prof.jump_residual[0]),
                num(prof.jump_residual[1])
            ));
            notes.push(format!("outside_probability={}", num(prof.outside_probability())));
            let mut t = Table::new(vec!["x", "re", "im", "abs2", "region"]);
            for ((x, u), r) in prof.x.iter().zip(&prof.values).zip(&prof.regions) {
                t.push(vec![
                    (*x).into(),
                    u.re.into(),
                    u.im.into(),
                    u.norm_sqr().into(),
                    r.as_str().into(),
                ]);
            }
            t
        }
        Model::Short => {
            let prof = short_profiles(k, &wg, &atoms, &default_grid(cfg.d, cfg.points))?;
            notes.push(format!("transport_residual={}", num(prof.transport_residual)));
            notes.push(format!(
                "jump_residual_right={} {}",
                num(prof.right.continuity_residual[0]),
                num(prof.right.continuity_residual[1])
            ));
            notes.push(format!(
                "jump_residual_left={} {}",
                num(prof.left.continuity_residual[0]),
                num(prof.left.continuity_residual[1])
            ));
            let mut t = Table::new(vec![
                "x",
                "left_re",
                "left_im",
                "right_re",
                "right_im",
                "re",
                "im",
                "left_abs2",
                "right_abs2",
                "abs2",
                "region",
            ]);
            for i in 0..prof.total.len() {
                let (l, r, u) = (prof.left.values[i], prof.right.values[i], prof.total[i]);
                t.push(vec![
                    prof.left.x[i].into(),
                    l.re.into(),
                    l.im.into(),
                    r.re.into(),
                    r.im.into(),
                    u.re.into(),
                    u.im.into(),
                    l.norm_sqr().into(),
                    r.norm_sqr().into(),
                    u.norm_sqr().into(),
                    prof.left.regions[i].as_str().into(),
                ]);
            }
            t
        }
    };
    Ok(table.render(&opts.header("profile", cfg, notes), opts.format))
}

fn contour(
    cfg: &RunConfig,
    opts: &OutputOptions,
    wg: &WaveguideParams,
    atoms: &IdenticalAtoms,
    sweep: Sweep,
) -> CliResult<String> {
    let parity = cfg.parity.unwrap_or(Parity::Odd);
    let result = sweep_omega_range(wg, atoms.j, atoms.d, parity, (sweep.min, sweep.max), sweep.n)?;
    let half = cfg.half_length.unwrap_or(3 * cfg.d);
    let profiles: Vec<Option<Vec<f64>>> = result
        .omegas
        .par_iter()
        .zip(&result.least_leaky)
        .map(|(&om, k)| {
            let at = IdenticalAtoms { omega: om, ..*atoms };
            let prof = reconstruct_wavefunction((*k)?, wg, &at, half).ok()?;
            let p = prof.probability();
            let peak = p.iter().copied().fold(0.0, f64::max);
            Some(p.into_iter().map(|v| if peak > 0.0 { v / peak } else { v }).collect())
        })
        .collect();
    let mut notes: Vec<String> = result
        .ridges
        .iter()
        .map(|r| format!("ridge omega={} {}", num(r.omega), complex_note("k", r.k)))
        .collect();
    notes.push("abs2 is normalised to its maximum at each omega".into());
    let mut table = Table::new(vec!["j", "omega", "abs2"]);
    for (om, prof) in result.omegas.iter().zip(&profiles) {
        for (i, j) in (-(half as i64)..=half as i64).enumerate() {
            let v = prof.as_ref().map(|p| p[i]).unwrap_or(f64::NAN);
            table.push(vec![j.into(), (*om).into(), v.into()]);
        }
    }
    Ok(table.render(&opts.header("profile", cfg, notes), opts.format))
}

/// Runs the invariant suites and returns the report and overall outcome.
pub fn cmd_verify(level: Level) -> (String, bool) {
    let report = run_verify(level);
    (report.render(), report.passed())
}
