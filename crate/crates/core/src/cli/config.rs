//! Flat `key=value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::model::{AtomPair, IdenticalAtoms, Parity, WaveguideParams};
use crate::resonance::Expansion;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Discrete,
    Long,
    Short,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Discrete => "discrete",
            Model::Long => "long",
            Model::Short => "short",
        }
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "discrete" => Ok(Model::Discrete),
            "long" => Ok(Model::Long),
            "short" => Ok(Model::Short),
            other => Err(format!("unknown model `{other}` (expected discrete, long or short)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Xi,
    J,
}

impl Units {
    pub fn as_str(self) -> &'static str {
        match self {
            Units::Xi => "xi-units",
            Units::J => "J-units",
        }
    }
}

impl FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "xi-units" => Ok(Units::Xi),
            "J-units" => Ok(Units::J),
            other => Err(format!("unknown unit tag `{other}` (expected xi-units or J-units)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    K,
    Omega,
}

impl SweepVar {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVar::K => "k",
            SweepVar::Omega => "omega",
        }
    }
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "k" => Ok(SweepVar::K),
            "omega" => Ok(SweepVar::Omega),
            other => Err(format!("unknown sweep variable `{other}` (expected k or omega)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Sweep {
    /// `n` equally spaced points from `min` to `max` inclusive.
    pub fn points(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

/// A parse or validation failure, with the offending line and key when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn key(key: &str, message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: Some(key.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, field `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "field `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

const KEYS: &[&str] = &[
    "name",
    "model",
    "units",
    "omega",
    "xi",
    "omega1",
    "omega2",
    "j1",
    "j2",
    "d",
    "sweep.var",
    "sweep.min",
    "sweep.max",
    "sweep.n",
    "n",
    "parity",
    "expansion",
    "k.re",
    "k.im",
    "half_length",
    "points",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: Option<String>,
    pub model: Model,
    pub units: Units,
    pub omega: f64,
    pub xi: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub j1: f64,
    pub j2: f64,
    pub d: usize,
    pub sweep: Option<Sweep>,
    /// Mode index for resonance and profile commands.
    pub n: Option<i64>,
    pub parity: Option<Parity>,
    pub expansion: Expansion,
    /// Explicit complex wave number for a profile.
    pub k: Option<(f64, f64)>,
    /// Lattice half-width of discrete profiles; `3d` when absent.
    pub half_length: Option<usize>,
    /// Grid size of continuum profiles.
    pub points: usize,
}

struct Entry {
    line: usize,
    value: String,
}

fn field<T: FromStr>(map: &BTreeMap<String, Entry>, key: &str) -> Result<Option<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(e) => e
            .value
            .parse::<T>()
            .map(Some)
            .map_err(|err| ConfigError::at(e.line, key, format!("cannot parse `{}`: {err}", e.value))),
    }
}

fn required<T: FromStr>(map: &BTreeMap<String, Entry>, key: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    field(map, key)?.ok_or_else(|| ConfigError::key(key, "missing required field"))
}

fn finite(map: &BTreeMap<String, Entry>, key: &str, value: f64) -> Result<f64, ConfigError> {
    if value.is_finite() {
        Ok(value)
    } else {
        let line = map.get(key).map(|e| e.line);
        Err(ConfigError {
            line,
            key: Some(key.to_string()),
            message: format!("must be finite, got {value}"),
        })
    }
}

impl RunConfig {
    /// Parses `key=value` lines. Blank lines and lines starting with `#` are
    /// skipped; unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<String, Entry> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line),
                    key: None,
                    message: format!("expected key=value, got `{trimmed}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::at(line, key, "unknown field"));
            }
            if let Some(prev) = map.get(key) {
                return Err(ConfigError::at(
                    line,
                    key,
                    format!("repeated (first set on line {})", prev.line),
                ));
            }
            map.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.to_string(),
                },
            );
        }
        Self::from_map(&map)
    }

    fn from_map(map: &BTreeMap<String, Entry>) -> Result<Self, ConfigError> {
        let omega = finite(map, "omega", required(map, "omega")?)?;
        let xi: f64 = required(map, "xi")?;
        if !(xi.is_finite() && xi > 0.0) {
            return Err(ConfigError::at(
                map["xi"].line,
                "xi",
                format!("hopping must be positive, got {xi}"),
            ));
        }
        let omega1 = finite(map, "omega1", required(map, "omega1")?)?;
        let omega2 = finite(map, "omega2", field(map, "omega2")?.unwrap_or(omega1))?;
        let j1: f64 = required(map, "j1")?;
        let j2: f64 = field(map, "j2")?.unwrap_or(j1);
        for (key, j) in [("j1", j1), ("j2", j2)] {
            if !(j.is_finite() && j >= 0.0) {
                let line = map.get(key).map(|e| e.line);
                return Err(ConfigError {
                    line,
                    key: Some(key.to_string()),
                    message: format!("coupling must be non-negative, got {j}"),
                });
            }
        }
        let d: usize = required(map, "d")?;
        if d == 0 {
            return Err(ConfigError::at(
                map["d"].line,
                "d",
                "atom separation must be at least 1",
            ));
        }
        let sweep = match field::<SweepVar>(map, "sweep.var")? {
            None => {
                for key in ["sweep.min", "sweep.max", "sweep.n"] {
                    if let Some(e) = map.get(key) {
                        return Err(ConfigError::at(e.line, key, "given without sweep.var"));
                    }
                }
                None
            }
            Some(var) => {
                let min = finite(map, "sweep.min", required(map, "sweep.min")?)?;
                let max = finite(map, "sweep.max", required(map, "sweep.max")?)?;
                let n: usize = required(map, "sweep.n")?;
                if n < 2 {
                    return Err(ConfigError::at(
                        map["sweep.n"].line,
                        "sweep.n",
                        format!("grid count must be at least 2, got {n}"),
                    ));
                }
                if min.is_nan() || max.is_nan() || min >= max {
                    return Err(ConfigError::at(
                        map["sweep.max"].line,
                        "sweep.max",
                        format!("must exceed sweep.min ({min})"),
                    ));
                }
                Some(Sweep { var, min, max, n })
            }
        };
        let k = match (field::<f64>(map, "k.re")?, field::<f64>(map, "k.im")?) {
            (None, None) => None,
            (Some(re), im) => Some((finite(map, "k.re", re)?, finite(map, "k.im", im.unwrap_or(0.0))?)),
            (None, Some(_)) => return Err(ConfigError::at(map["k.im"].line, "k.im", "given without k.re")),
        };
        let points: usize = field(map, "points")?.unwrap_or(crate::continuum_long::DEFAULT_GRID_POINTS);
        if points < 2 {
            return Err(ConfigError::at(
                map["points"].line,
                "points",
                "grid count must be at least 2",
            ));
        }
        Ok(Self {
            name: field(map, "name")?,
            model: field(map, "model")?.unwrap_or(Model::Discrete),
            units: field(map, "units")?.unwrap_or(Units::Xi),
            omega,
            xi,
            omega1,
            omega2,
            j1,
            j2,
            d,
            sweep,
            n: field(map, "n")?,
            parity: field(map, "parity")?,
            expansion: field(map, "expansion")?.unwrap_or_default(),
            k,
            half_length: field(map, "half_length")?,
            points,
        })
    }

    pub fn waveguide(&self) -> Result<WaveguideParams, ConfigError> {
        WaveguideParams::new(self.omega, self.xi).map_err(|e| ConfigError::key("xi", e.to_string()))
    }

    pub fn atom_pair(&self) -> Result<AtomPair, ConfigError> {
        AtomPair::new(self.omega1, self.omega2, self.j1, self.j2, self.d)
            .map_err(|e| ConfigError::key("omega1", e.to_string()))
    }

    /// The atoms as an identical pair, required by the resonance analysis.
    pub fn identical(&self) -> Result<IdenticalAtoms, ConfigError> {
        if self.omega1 != self.omega2 {
            return Err(ConfigError::key("omega2", "resonance analysis needs omega2 = omega1"));
        }
        if self.j1 != self.j2 {
            return Err(ConfigError::key("j2", "resonance analysis needs j2 = j1"));
        }
        IdenticalAtoms::new(self.omega1, self.j1, self.d).map_err(|e| ConfigError::key("omega1", e.to_string()))
    }

    /// Canonical `key=value` lines, sufficient to re-run the command.
    pub fn to_lines(&self) -> Vec<String> {
        let num = super::output::num;
        let mut out = Vec::new();
        if let Some(name) = &self.name {
            out.push(format!("name={name}"));
        }
        out.push(format!("model={}", self.model.as_str()));
        out.push(format!("units={}", self.units.as_str()));
        for (k, v) in [
            ("omega", self.omega),
            ("xi", self.xi),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("j1", self.j1),
            ("j2", self.j2),
        ] {
            out.push(format!("{k}={}", num(v)));
        }
        out.push(format!("d={}", self.d));
        if let Some(s) = &self.sweep {
            out.push(format!("sweep.var={}", s.var.as_str()));
            out.push(format!("sweep.min={}", num(s.min)));
            out.push(format!("sweep.max={}", num(s.max)));
            out.push(format!("sweep.n={}", s.n));
        }
        if let Some(n) = self.n {
            out.push(format!("n={n}"));
        }
        if let Some(p) = self.parity {
            out.push(format!("parity={}", p.as_str()));
        }
        out.push(format!("expansion={}", self.expansion.as_str()));
        if let Some((re, im)) = self.k {
            out.push(format!("k.re={}", num(re)));
            out.push(format!("k.im={}", num(im)));
        }
        if let Some(l) = self.half_length {
            out.push(format!("half_length={l}"));
        }
        out.push(format!("points={}", self.points));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "omega=5\nxi=1\nomega1=8\nj1=0.5\nd=10\n";

    #[test]
    fn defaults_and_identical_fill() {
        let c = RunConfig::parse(BASE).unwrap();
        assert_eq!(c.model, Model::Discrete);
        assert_eq!(c.units, Units::Xi);
        assert_eq!(c.omega2, 8.0);
        assert_eq!(c.j2, 0.5);
        assert!(c.sweep.is_none());
        assert!(c.identical().is_ok());
    }

    #[test]
    fn round_trips_through_canonical_lines() {
        let text = format!("{BASE}model=long\nsweep.var=k\nsweep.min=0.1\nsweep.max=3\nsweep.n=5\nn=2\nparity=even\n");
        let c = RunConfig::parse(&text).unwrap();
        let again = RunConfig::parse(&c.to_lines().join("\n")).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let err = RunConfig::parse("omega=5\nxi=abc\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert_eq!(err.key.as_deref(), Some("xi"));
        let err = RunConfig::parse(&format!("{BASE}bogus=1\n")).unwrap_err();
        assert_eq!(err.line, Some(6));
        let err = RunConfig::parse(&format!("{BASE}sweep.var=k\nsweep.min=0\nsweep.max=1\nsweep.n=1\n")).unwrap_err();
        assert!(err.to_string().contains("line 9, field `sweep.n`"), "{err}");
        let err = RunConfig::parse("omega=5\nxi=1\n").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("omega1"));
        let err = RunConfig::parse(&format!("{BASE}d=3\n")).unwrap_err();
        assert!(err.message.contains("repeated"));
        let err = RunConfig::parse("just words\n").unwrap_err();
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::parse("omega=5\nxi=-1\nomega1=8\nj1=0.5\nd=10\n").is_err());
        assert!(RunConfig::parse("omega=5\nxi=1\nomega1=8\nj1=0.5\nd=0\n").is_err());
        assert!(RunConfig::parse(&format!("{BASE}model=quantum\n")).is_err());
        let c = RunConfig::parse(&format!("{BASE}omega2=7\n")).unwrap();
        assert!(c.identical().is_err());
    }
}
