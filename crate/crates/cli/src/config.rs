//! Line-oriented `section.key = value` configuration files.
//!
//! ```text
//! # comment
//! scenario.name = example1
//! params.eps1 = 1.0
//! initial.x = 0.1, -0.2
//! ```

use std::collections::HashSet;
use std::fmt;

use ostro::dynamics::{IntegratorConfig, Method};
use ostro::scenarios::{JetIcs, Potential, ScenarioParams, SCENARIO_NAMES};

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Entry {
    pub fn name(&self) -> String {
        format!("{}.{}", self.section, self.key)
    }

    pub fn f64(&self) -> Result<f64, ConfigError> {
        parse_f64(&self.value)
            .ok_or_else(|| ConfigError::at(self.line, format!("{}: '{}' is not a number", self.name(), self.value)))
    }

    pub fn usize(&self) -> Result<usize, ConfigError> {
        self.value.parse().map_err(|_| {
            ConfigError::at(
                self.line,
                format!("{}: '{}' is not a non-negative integer", self.name(), self.value),
            )
        })
    }

    pub fn list(&self) -> Result<Vec<f64>, ConfigError> {
        self.value
            .split(',')
            .map(|s| {
                parse_f64(s.trim()).ok_or_else(|| {
                    ConfigError::at(self.line, format!("{}: '{}' is not a number", self.name(), s.trim()))
                })
            })
            .collect()
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parsed entries in file order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub entries: Vec<Entry>,
}

fn valid_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<Entry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (name, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, format!("expected 'section.key = value', got '{content}'")))?;
            let (name, value) = (name.trim(), value.trim());
            let (section, key) = name
                .split_once('.')
                .ok_or_else(|| ConfigError::at(line, format!("key '{name}' has no section")))?;
            if !valid_ident(section) || !valid_ident(key) {
                return Err(ConfigError::at(line, format!("malformed key '{name}'")));
            }
            if value.is_empty() {
                return Err(ConfigError::at(line, format!("{name} has an empty value")));
            }
            if let Some(prev) = entries.iter().find(|e| e.section == section && e.key == key) {
                return Err(ConfigError::at(
                    line,
                    format!("{name} already set on line {}", prev.line),
                ));
            }
            entries.push(Entry {
                section: section.into(),
                key: key.into(),
                value: value.into(),
                line,
            });
        }
        Ok(ConfigFile { entries })
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name() == name)
    }

    pub fn require(&self, name: &str) -> Result<&Entry, ConfigError> {
        self.get(name)
            .ok_or_else(|| ConfigError::global(format!("missing required key {name}")))
    }

    pub fn section(&self, section: &str) -> impl Iterator<Item = &Entry> {
        let section = section.to_string();
        self.entries.iter().filter(move |e| e.section == section)
    }

    fn f64_or(&self, name: &str, default: f64) -> Result<f64, ConfigError> {
        self.get(name).map_or(Ok(default), Entry::f64)
    }

    /// Rejects keys outside `known` (exact names) and `open_sections`
    /// (sections taking any key).
    pub fn reject_unknown(&self, known: &[&str], open_sections: &[&str]) -> Result<(), ConfigError> {
        let known: HashSet<&str> = known.iter().copied().collect();
        for e in &self.entries {
            if !known.contains(e.name().as_str()) && !open_sections.contains(&e.section.as_str()) {
                return Err(ConfigError::at(e.line, format!("unknown key {}", e.name())));
            }
        }
        Ok(())
    }
}

const SCENARIO_KEYS: &[&str] = &[
    "scenario.name",
    "params.eps0",
    "params.eps1",
    "params.a",
    "params.alpha",
    "params.potential",
    "integrator.method",
    "integrator.t0",
    "integrator.t1",
    "integrator.dt",
    "integrator.stride",
    "integrator.tolerance",
    "initial.x",
    "initial.v",
    "initial.a",
    "initial.j",
    "output.path",
    "transform.shear",
];

/// Everything a scenario run or check needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub params: ScenarioParams,
    pub integrator: IntegratorConfig,
    pub initial: JetIcs,
    pub output: Option<String>,
    /// `check.<name> = tol` overrides, in file order.
    pub tolerances: Vec<(String, f64)>,
    /// Shear coefficient of the chart used by the transform suite.
    pub shear: f64,
}

impl ScenarioConfig {
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        Self::from_file(&ConfigFile::parse(text)?)
    }

    pub fn from_file(cfg: &ConfigFile) -> Result<Self, ConfigError> {
        cfg.reject_unknown(SCENARIO_KEYS, &["check"])?;
        let name_entry = cfg.require("scenario.name")?;
        let scenario = name_entry.value.clone();
        if !SCENARIO_NAMES.contains(&scenario.as_str()) {
            return Err(ConfigError::at(
                name_entry.line,
                format!(
                    "unknown scenario '{scenario}', expected one of {}",
                    SCENARIO_NAMES.join(", ")
                ),
            ));
        }

        let x = cfg.require("initial.x")?.list()?;
        let m = x.len();
        let vector = |name: &str, required: bool| -> Result<Vec<f64>, ConfigError> {
            match cfg.get(name) {
                Some(e) => {
                    let v = e.list()?;
                    if v.len() != m {
                        return Err(ConfigError::at(
                            e.line,
                            format!("{name} has {} entries, initial.x has {m}", v.len()),
                        ));
                    }
                    Ok(v)
                }
                None if required => Err(ConfigError::global(format!("missing required key {name}"))),
                None => Ok(vec![0.0; m]),
            }
        };
        let initial = JetIcs::new(
            x.clone(),
            vector("initial.v", true)?,
            vector("initial.a", false)?,
            vector("initial.j", false)?,
        )
        .map_err(|e| ConfigError::global(e.to_string()))?;

        let eps0 = cfg.require("params.eps0")?.f64()?;
        let eps1_entry = cfg.require("params.eps1")?;
        let eps1 = eps1_entry.f64()?;
        if eps1 == 0.0 {
            return Err(ConfigError::at(eps1_entry.line, "params.eps1 must be nonzero"));
        }
        let mut params = ScenarioParams::new(eps0, eps1, m);
        params.a = vector("params.a", scenario == "example2")?;
        params.potential = match scenario.as_str() {
            "example3-linear" => Potential::Linear(vector("params.alpha", true)?),
            "lifted-custom" => potential(cfg, &vector("params.alpha", false)?)?,
            _ => Potential::Zero,
        };
        if let Some(e) = cfg.get("params.potential") {
            if scenario != "lifted-custom" {
                return Err(ConfigError::at(
                    e.line,
                    format!("params.potential only applies to lifted-custom, not {scenario}"),
                ));
            }
        }

        let integrator = integrator(cfg)?;
        let tolerances = cfg
            .section("check")
            .map(|e| {
                let v = e.f64()?;
                if !(v > 0.0) {
                    return Err(ConfigError::at(e.line, format!("{} must be positive", e.name())));
                }
                Ok((e.key.clone(), v))
            })
            .collect::<Result<_, _>>()?;
        Ok(ScenarioConfig {
            scenario,
            params,
            integrator,
            initial,
            output: cfg.get("output.path").map(|e| e.value.clone()),
            tolerances,
            shear: cfg.f64_or("transform.shear", 0.3)?,
        })
    }

    /// Configured tolerance for a check, or `default`.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances
            .iter()
            .find(|(k, _)| k == name)
            .map_or(default, |(_, v)| *v)
    }
}

fn potential(cfg: &ConfigFile, alpha: &[f64]) -> Result<Potential, ConfigError> {
    let Some(e) = cfg.get("params.potential") else {
        return Ok(Potential::Zero);
    };
    Ok(match e.value.as_str() {
        "zero" => Potential::Zero,
        "linear" => {
            if cfg.get("params.alpha").is_none() {
                return Err(ConfigError::at(e.line, "a linear potential needs params.alpha"));
            }
            Potential::Linear(alpha.to_vec())
        }
        "spherical" => Potential::Spherical,
        "quartic" => Potential::Quartic,
        other => {
            return Err(ConfigError::at(
                e.line,
                format!("unknown potential '{other}', expected zero, linear, spherical or quartic"),
            ))
        }
    })
}

fn integrator(cfg: &ConfigFile) -> Result<IntegratorConfig, ConfigError> {
    let t0 = cfg.f64_or("integrator.t0", 0.0)?;
    let t1 = cfg.require("integrator.t1")?.f64()?;
    let dt_entry = cfg.require("integrator.dt")?;
    let dt = dt_entry.f64()?;
    if !(dt > 0.0) {
        return Err(ConfigError::at(dt_entry.line, "integrator.dt must be positive"));
    }
    if !(t1 > t0) {
        return Err(ConfigError::at(
            cfg.require("integrator.t1")?.line,
            "integrator.t1 must exceed integrator.t0",
        ));
    }
    let stride = match cfg.get("integrator.stride") {
        Some(e) => {
            let s = e.usize()?;
            if s == 0 {
                return Err(ConfigError::at(e.line, "integrator.stride must be at least 1"));
            }
            s
        }
        None => 1,
    };
    let method = match cfg.get("integrator.method") {
        None => Method::Rk4,
        Some(e) => match e.value.as_str() {
            "rk4" => Method::Rk4,
            "rk4-adaptive" => {
                let tolerance = cfg.f64_or("integrator.tolerance", 1e-10)?;
                if !(tolerance > 0.0) {
                    return Err(ConfigError::at(e.line, "integrator.tolerance must be positive"));
                }
                Method::Rk4Adaptive { tolerance }
            }
            other => {
                return Err(ConfigError::at(
                    e.line,
                    format!("unknown method '{other}', expected rk4 or rk4-adaptive"),
                ))
            }
        },
    };
    Ok(IntegratorConfig {
        method,
        dt,
        t0,
        t1,
        stride,
    })
}

/// Lagrangian families available to `dualize`.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `½|y^(k)|²`.
    Quadratic,
    /// `½|y^(k)|² + ¼|y^(k)|⁴`.
    Quartic,
    /// `sum cosh(y^(k)_i)`.
    Cosh,
    /// `½((y^(k)_1)² − sum_{i>1} (y^(k)_i)²)`.
    Indefinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualizeConfig {
    pub family: Family,
    pub order: usize,
    pub dim: usize,
    /// `(label, flat dual point)` in file order.
    pub points: Vec<(String, Vec<f64>)>,
}

impl DualizeConfig {
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let cfg = ConfigFile::parse(text)?;
        cfg.reject_unknown(
            &["lagrangian.family", "lagrangian.order", "lagrangian.dim"],
            &["points"],
        )?;
        let fam = cfg.require("lagrangian.family")?;
        let family = match fam.value.as_str() {
            "quadratic" => Family::Quadratic,
            "quartic" => Family::Quartic,
            "cosh" => Family::Cosh,
            "indefinite" => Family::Indefinite,
            other => {
                return Err(ConfigError::at(
                    fam.line,
                    format!("unknown family '{other}', expected quadratic, quartic, cosh or indefinite"),
                ))
            }
        };
        let order_entry = cfg.require("lagrangian.order")?;
        let order = order_entry.usize()?;
        let dim_entry = cfg.require("lagrangian.dim")?;
        let dim = dim_entry.usize()?;
        if order == 0 {
            return Err(ConfigError::at(order_entry.line, "lagrangian.order must be at least 1"));
        }
        if dim == 0 {
            return Err(ConfigError::at(dim_entry.line, "lagrangian.dim must be at least 1"));
        }
        let width = (order + 1) * dim;
        let points: Vec<(String, Vec<f64>)> = cfg
            .section("points")
            .map(|e| {
                let v = e.list()?;
                if v.len() != width {
                    return Err(ConfigError::at(
                        e.line,
                        format!(
                            "{} has {} coordinates, expected {width} (x, y1..y{}, p)",
                            e.name(),
                            v.len(),
                            order - 1
                        ),
                    ));
                }
                Ok((e.key.clone(), v))
            })
            .collect::<Result<_, _>>()?;
        if points.is_empty() {
            return Err(ConfigError::global(
                "no sample points: add lines like 'points.p1 = ...'",
            ));
        }
        Ok(DualizeConfig {
            family,
            order,
            dim,
            points,
        })
    }
}
