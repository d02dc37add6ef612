//! Run configuration: a flat `key = value` file merged with command-line
//! flags (flags win), validated into a [`RunConfig`].
//!
//! File grammar: one `key = value` per line, `#` starts a comment, blank
//! lines are ignored. Keys are the long flag names without dashes
//! (`t2 = 0.5`, `grid = 30 30`, `sweep = delta=0:4:21`, `obc = true`).

use std::collections::BTreeMap;
use std::path::PathBuf;

use chern_core::spin::SpinMethod;
use chern_core::TwistGauge;
use serde::{Deserialize, Serialize};

use crate::numexpr::parse_number;

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Every key accepted in a config file or as a `--flag`.
pub const KEYS: &[&str] = &[
    "model",
    "lx",
    "ly",
    "l",
    "t1",
    "t2",
    "phi",
    "delta",
    "t",
    "lso",
    "lr",
    "method",
    "variant",
    "grid",
    "q",
    "gauge",
    "fermi",
    "obc",
    "margin",
    "w",
    "seed",
    "disorder-w",
    "realizations",
    "sweep",
    "sweep2",
    "out",
    "format",
    "timing",
    "threads",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Haldane,
    KaneMele,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Haldane => "haldane",
            Model::KaneMele => "kane-mele",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    TbcLink,
    TbcFd,
    Noncomm,
    NoncommHi,
    Bott,
    SpinSplit,
    SpinGeneralized,
    ChernMatrix,
    Oracle,
    Flatness,
    Wilson,
    SpinTbc,
}

impl MethodKind {
    const ALL: [MethodKind; 12] = [
        MethodKind::TbcLink,
        MethodKind::TbcFd,
        MethodKind::Noncomm,
        MethodKind::NoncommHi,
        MethodKind::Bott,
        MethodKind::SpinSplit,
        MethodKind::SpinGeneralized,
        MethodKind::ChernMatrix,
        MethodKind::Oracle,
        MethodKind::Flatness,
        MethodKind::Wilson,
        MethodKind::SpinTbc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::TbcLink => "tbc-link",
            MethodKind::TbcFd => "tbc-fd",
            MethodKind::Noncomm => "noncomm",
            MethodKind::NoncommHi => "noncomm-hi",
            MethodKind::Bott => "bott",
            MethodKind::SpinSplit => "spin-split",
            MethodKind::SpinGeneralized => "spin-generalized",
            MethodKind::ChernMatrix => "chern-matrix",
            MethodKind::Oracle => "oracle",
            MethodKind::Flatness => "flatness",
            MethodKind::Wilson => "wilson",
            MethodKind::SpinTbc => "spin-tbc",
        }
    }

    fn parse(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .map_or_else(|| err(format!("unknown method `{s}`")), Ok)
    }

    /// Methods that integrate over twist angles (torus only).
    pub fn uses_twists(self) -> bool {
        matches!(
            self,
            MethodKind::TbcLink
                | MethodKind::TbcFd
                | MethodKind::Flatness
                | MethodKind::Wilson
                | MethodKind::SpinTbc
        )
    }

    fn is_spin(self) -> bool {
        matches!(
            self,
            MethodKind::SpinSplit | MethodKind::SpinGeneralized | MethodKind::ChernMatrix | MethodKind::SpinTbc
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Model parameters; the ones unused by the chosen model are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub lx: usize,
    pub ly: usize,
    pub t1: f64,
    pub t2: f64,
    pub phi: f64,
    pub delta: f64,
    pub t: f64,
    pub lso: f64,
    pub lr: f64,
    /// Single disorder strength (outside of ensembles).
    pub w: f64,
    pub margin: usize,
    pub q: usize,
    pub fermi: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            lx: 11,
            ly: 11,
            t1: 1.0,
            t2: 0.5,
            phi: std::f64::consts::FRAC_PI_2,
            delta: 0.0,
            t: 1.0,
            lso: 0.06,
            lr: 0.015,
            w: 0.0,
            margin: 3,
            q: 3,
            fermi: None,
        }
    }
}

/// One sweep axis: `count` evenly spaced values from `start` to `stop`
/// inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }

    fn parse(text: &str) -> Result<Self, ConfigError> {
        let (name, range) = text
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("sweep `{text}` must look like name=start:stop:count")))?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return err(format!("sweep `{text}` must look like name=start:stop:count"));
        }
        let start = parse_number(parts[0]).map_err(ConfigError)?;
        let stop = parse_number(parts[1]).map_err(ConfigError)?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| ConfigError(format!("sweep count `{}` is not a positive integer", parts[2])))?;
        if count == 0 {
            return err("sweep count must be at least 1");
        }
        Ok(Self {
            name: name.trim().to_string(),
            start,
            stop,
            count,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderEnsemble {
    pub strengths: Vec<f64>,
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: Model,
    pub params: Params,
    pub method: MethodKind,
    /// Route used by the spin methods.
    pub variant: Variant,
    pub grid: (usize, usize),
    pub gauge: Gauge,
    pub obc: bool,
    pub seed: u64,
    pub disorder: Option<DisorderEnsemble>,
    pub sweeps: Vec<SweepAxis>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Noncomm,
    Bott,
}

impl Variant {
    pub fn spin_method(self) -> SpinMethod {
        match self {
            Variant::Noncomm => SpinMethod::Noncommutative,
            Variant::Bott => SpinMethod::Bott,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    Boundary,
    Uniform,
}

impl Gauge {
    pub fn twist_gauge(self) -> TwistGauge {
        match self {
            Gauge::Boundary => TwistGauge::Boundary,
            Gauge::Uniform => TwistGauge::Uniform,
        }
    }
}

/// Parameter names a sweep axis may refer to, per model.
pub fn sweepable(model: Model) -> &'static [&'static str] {
    match model {
        Model::Haldane => &["l", "lx", "ly", "t1", "t2", "phi", "delta", "w", "margin", "q", "fermi"],
        Model::KaneMele => &["l", "lx", "ly", "t", "lso", "lr", "delta", "w", "margin", "q", "fermi"],
    }
}

/// Parses a config file into raw key/value pairs.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", i + 1)))?;
        let key = key.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return err(format!("line {}: unknown key `{key}`", i + 1));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return err(format!("line {}: duplicate key `{key}`", i + 1));
        }
    }
    Ok(map)
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, ConfigError> {
    map.get(key)
        .map(|v| parse_number(v).map_err(|e| ConfigError(format!("{key}: {e}"))))
        .transpose()
}

fn integer(map: &BTreeMap<String, String>, key: &str) -> Result<Option<usize>, ConfigError> {
    map.get(key)
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("{key}: `{v}` is not a non-negative integer")))
        })
        .transpose()
}

fn boolean(map: &BTreeMap<String, String>, key: &str) -> Result<bool, ConfigError> {
    match map.get(key).map(|s| s.trim()) {
        None | Some("false") => Ok(false),
        Some("true") | Some("") => Ok(true),
        Some(other) => err(format!("{key}: expected true or false, got `{other}`")),
    }
}

/// Converts a floating value assigned to an integer parameter.
pub fn as_count(name: &str, v: f64) -> Result<usize, ConfigError> {
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        return err(format!("{name} must be a non-negative integer, got {v}"));
    }
    Ok(v as usize)
}

impl RunConfig {
    /// Builds and validates a configuration from merged key/value pairs.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        for key in map.keys() {
            if !KEYS.contains(&key.as_str()) {
                return err(format!("unknown key `{key}`"));
            }
        }
        let model = match map.get("model").map(String::as_str) {
            Some("haldane") => Model::Haldane,
            Some("kane-mele") | Some("kanemele") | Some("km") => Model::KaneMele,
            Some(other) => return err(format!("unknown model `{other}`")),
            None => return err("no model given (haldane or kane-mele)"),
        };
        let mut p = Params::default();
        if let Some(l) = integer(map, "l")? {
            p.lx = l;
            p.ly = l;
        }
        if let Some(v) = integer(map, "lx")? {
            p.lx = v;
        }
        if let Some(v) = integer(map, "ly")? {
            p.ly = v;
        }
        for (key, slot) in [
            ("t1", &mut p.t1),
            ("t2", &mut p.t2),
            ("phi", &mut p.phi),
            ("delta", &mut p.delta),
            ("t", &mut p.t),
            ("lso", &mut p.lso),
            ("lr", &mut p.lr),
            ("w", &mut p.w),
        ] {
            if let Some(v) = number(map, key)? {
                *slot = v;
            }
        }
        if let Some(v) = integer(map, "margin")? {
            p.margin = v;
        }
        if let Some(v) = integer(map, "q")? {
            p.q = v;
        }
        p.fermi = number(map, "fermi")?;

        let method = match map.get("method") {
            Some(m) => MethodKind::parse(m.trim())?,
            None => return err("no --method given"),
        };
        let variant = match map.get("variant").map(|s| s.trim()) {
            None | Some("bott") => Variant::Bott,
            Some("noncomm") => Variant::Noncomm,
            Some(other) => return err(format!("unknown variant `{other}` (noncomm or bott)")),
        };
        let grid = match map.get("grid") {
            None => (30, 30),
            Some(g) => {
                let parts: Vec<&str> = g.split(|c: char| c.is_whitespace() || c == 'x' || c == ',').filter(|s| !s.is_empty()).collect();
                let nums: Result<Vec<usize>, _> = parts.iter().map(|s| s.parse::<usize>()).collect();
                match nums.as_deref() {
                    Ok([n]) => (*n, *n),
                    Ok([nx, ny]) => (*nx, *ny),
                    _ => return err(format!("grid: expected `NX NY`, got `{g}`")),
                }
            }
        };
        let gauge = match map.get("gauge").map(|s| s.trim()) {
            None | Some("boundary") => Gauge::Boundary,
            Some("uniform") => Gauge::Uniform,
            Some(other) => return err(format!("unknown gauge `{other}` (boundary or uniform)")),
        };
        let obc = boolean(map, "obc")?;
        let seed = match map.get("seed") {
            None => 0,
            Some(s) => s
                .trim()
                .parse::<u64>()
                .map_err(|_| ConfigError(format!("seed: `{s}` is not a 64-bit unsigned integer")))?,
        };
        let disorder = match map.get("disorder-w") {
            None => None,
            Some(list) => {
                let strengths = list
                    .split(',')
                    .map(|s| parse_number(s).map_err(|e| ConfigError(format!("disorder-w: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let realizations = integer(map, "realizations")?.unwrap_or(1);
                Some(DisorderEnsemble {
                    strengths,
                    realizations,
                })
            }
        };
        if disorder.is_none() && map.contains_key("realizations") {
            return err("realizations given without disorder-w");
        }
        let mut sweeps = Vec::new();
        for key in ["sweep", "sweep2"] {
            if let Some(s) = map.get(key) {
                sweeps.push(SweepAxis::parse(s)?);
            }
        }
        if map.contains_key("sweep2") && !map.contains_key("sweep") {
            return err("sweep2 given without sweep");
        }
        let format = match map.get("format").map(|s| s.trim()) {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return err(format!("unknown format `{other}` (csv or json)")),
        };
        let threads = integer(map, "threads")?;
        let cfg = RunConfig {
            model,
            params: p,
            method,
            variant,
            grid,
            gauge,
            obc,
            seed,
            disorder,
            sweeps,
            out: map.get("out").map(PathBuf::from),
            format,
            timing: boolean(map, "timing")?,
            threads,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let m = self.method;
        if m.is_spin() && self.model != Model::KaneMele {
            return err(format!("method {} needs the kane-mele model", m.name()));
        }
        if matches!(m, MethodKind::Oracle | MethodKind::Wilson | MethodKind::Flatness) && self.model != Model::Haldane {
            return err(format!("method {} is only available for the haldane model", m.name()));
        }
        if self.obc && (m.uses_twists() || m == MethodKind::Oracle) {
            return err(format!("method {} needs a torus; drop --obc", m.name()));
        }
        if m == MethodKind::Oracle && (self.params.w != 0.0 || self.disorder.is_some()) {
            return err("the momentum-space oracle is defined for clean systems only");
        }
        if self.grid.0 < 2 || self.grid.1 < 2 {
            return err("grid sizes must be at least 2");
        }
        if self.threads == Some(0) {
            return err("threads must be at least 1");
        }
        if self.sweeps.len() == 2 && self.sweeps[0].name == self.sweeps[1].name {
            return err("the two sweep axes must differ");
        }
        let allowed = sweepable(self.model);
        for s in &self.sweeps {
            if !allowed.contains(&s.name.as_str()) {
                return err(format!(
                    "sweep axis `{}` is not a parameter of the {} model (allowed: {})",
                    s.name,
                    self.model.name(),
                    allowed.join(", ")
                ));
            }
        }
        if let Some(d) = &self.disorder {
            if d.strengths.is_empty() || d.realizations == 0 {
                return err("disorder ensembles need at least one strength and one realization");
            }
            if !self.sweeps.is_empty() {
                return err("disorder ensembles cannot be combined with sweeps");
            }
        }
        // the base point must be valid on its own unless a sweep overrides it
        let swept = |n: &str| self.sweeps.iter().any(|s| s.name == n || (s.name == "l" && (n == "lx" || n == "ly")));
        if !swept("lx") && self.params.lx < 2 || !swept("ly") && self.params.ly < 2 {
            return err("lattice sizes must be at least 2");
        }
        Ok(())
    }
}
