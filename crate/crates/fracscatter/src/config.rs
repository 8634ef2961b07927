//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # long-range run
//! kind = cauchy
//! gamma = 1
//! rho = 0.6, 0.75, 1
//! ```
//!
//! Blank lines and `#` comments are ignored. `rho`, `gamma` and `lambda`
//! accept comma-separated lists; more than one value is only meaningful for
//! `kind = sweep`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fracscatter_core::{required_half_length, PacketSpec, PhysicsParams, SpatialGrid, TimeSchedule};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Cauchy,
    DollardCauchy,
    Weaklimit,
    Cook,
    ModifierRl,
    Sweep,
    Selftest,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Cauchy,
        Kind::DollardCauchy,
        Kind::Weaklimit,
        Kind::Cook,
        Kind::ModifierRl,
        Kind::Sweep,
        Kind::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Cauchy => "cauchy",
            Kind::DollardCauchy => "dollard_cauchy",
            Kind::Weaklimit => "weaklimit",
            Kind::Cook => "cook",
            Kind::ModifierRl => "modifier_rl",
            Kind::Sweep => "sweep",
            Kind::Selftest => "selftest",
        }
    }

    /// Kinds that run the interacting or free flow on the configured box and
    /// so must respect the no-wrap bound.
    pub fn propagates(self) -> bool {
        !matches!(self, Kind::ModifierRl | Kind::Selftest)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError::Value {
                key: "kind".into(),
                value: s.into(),
                reason: "expected one of cauchy, dollard_cauchy, weaklimit, cook, modifier_rl, sweep, selftest".into(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given more than once")]
    DuplicateKey(String),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("`{key}` = {value}: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error(
        "half_length = {half_length} lets the packet wrap by t_max = {t_max}; \
         use half_length >= {required:.1}"
    )]
    Wrap { half_length: f64, t_max: f64, required: f64 },
    #[error("kind `{cli}` on the command line but `{file}` in the config")]
    KindConflict { cli: Kind, file: Kind },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub rho: Vec<f64>,
    pub gamma: Vec<f64>,
    pub lambda: Vec<f64>,
    pub epsilon: f64,
    pub dim: usize,
    pub n_points: usize,
    pub half_length: f64,
    pub xi_center: f64,
    pub xi_width: f64,
    pub dt: f64,
    pub t0: f64,
    pub ratio: f64,
    pub t_max: f64,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for every key except `kind`.
    pub fn with_kind(kind: Kind) -> Self {
        Self {
            kind,
            rho: vec![0.75],
            gamma: vec![1.0],
            lambda: vec![1.0],
            epsilon: 0.5,
            dim: 1,
            n_points: 1 << 17,
            half_length: 1500.0,
            xi_center: 1.0,
            xi_width: 0.1,
            dt: 0.05,
            t0: 50.0,
            ratio: 2f64.powf(0.25),
            t_max: 800.0,
            seed: 0,
            out_dir: None,
        }
    }

    /// Parses and validates. `kind` may come from the text or from
    /// `cli_kind`; if both are present they must agree.
    pub fn parse(text: &str, cli_kind: Option<Kind>) -> Result<Self, ConfigError> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            let key = key.trim().to_string();
            if pairs.iter().any(|(k, _)| *k == key) {
                return Err(ConfigError::DuplicateKey(key));
            }
            pairs.push((key, value.trim().to_string()));
        }

        let file_kind = match pairs.iter().find(|(k, _)| k == "kind") {
            Some((_, v)) => Some(v.parse::<Kind>()?),
            None => None,
        };
        let kind = match (cli_kind, file_kind) {
            (Some(cli), Some(file)) if cli != file => return Err(ConfigError::KindConflict { cli, file }),
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(ConfigError::Missing("kind")),
        };

        let mut cfg = Self::with_kind(kind);
        for (key, value) in &pairs {
            match key.as_str() {
                "kind" => {}
                "rho" => cfg.rho = list(key, value)?,
                "gamma" => cfg.gamma = list(key, value)?,
                "lambda" => cfg.lambda = list(key, value)?,
                "epsilon" => cfg.epsilon = scalar(key, value)?,
                "dim" => cfg.dim = scalar(key, value)?,
                "n_points" => cfg.n_points = scalar(key, value)?,
                "half_length" => cfg.half_length = scalar(key, value)?,
                "xi_center" => cfg.xi_center = scalar(key, value)?,
                "xi_width" => cfg.xi_width = scalar(key, value)?,
                "dt" => cfg.dt = scalar(key, value)?,
                "t0" => cfg.t0 = scalar(key, value)?,
                "ratio" => cfg.ratio = scalar(key, value)?,
                "t_max" => cfg.t_max = scalar(key, value)?,
                "seed" => cfg.seed = scalar(key, value)?,
                "out_dir" => cfg.out_dir = Some(PathBuf::from(value)),
                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, values) in [("rho", &self.rho), ("gamma", &self.gamma), ("lambda", &self.lambda)] {
            if values.is_empty() {
                return Err(bad(key, "", "needs at least one value"));
            }
            if values.len() > 1 && self.kind != Kind::Sweep {
                return Err(bad(key, &join(values), "lists are only accepted with kind = sweep"));
            }
        }
        for &rho in &self.rho {
            if !(0.5..=1.0).contains(&rho) {
                return Err(bad("rho", &rho.to_string(), "must lie in [0.5, 1]"));
            }
        }
        for &gamma in &self.gamma {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(bad("gamma", &gamma.to_string(), "must be positive"));
            }
        }
        for &lambda in &self.lambda {
            if !lambda.is_finite() {
                return Err(bad("lambda", &lambda.to_string(), "must be finite"));
            }
        }
        positive("epsilon", self.epsilon)?;
        positive("half_length", self.half_length)?;
        positive("xi_width", self.xi_width)?;
        positive("dt", self.dt)?;
        positive("t0", self.t0)?;
        if !self.xi_center.is_finite() {
            return Err(bad("xi_center", &self.xi_center.to_string(), "must be finite"));
        }
        if !(self.ratio > 1.0 && self.ratio.is_finite()) {
            return Err(bad("ratio", &self.ratio.to_string(), "must exceed 1"));
        }
        if !(self.t_max >= self.t0 && self.t_max.is_finite()) {
            return Err(bad("t_max", &self.t_max.to_string(), "must be finite and at least t0"));
        }
        if !(self.dim == 1 || self.dim == 2) {
            return Err(bad("dim", &self.dim.to_string(), "must be 1 or 2"));
        }
        if !self.n_points.is_power_of_two() || self.n_points < 8 {
            return Err(bad("n_points", &self.n_points.to_string(), "must be a power of two, at least 8"));
        }
        if self.n_points.checked_pow(self.dim as u32).is_none_or(|total| total > 1 << 26) {
            return Err(bad("n_points", &self.n_points.to_string(), "too many lattice sites for this dim"));
        }
        if self.kind.propagates() {
            let required = self.required_half_length();
            if self.half_length < required {
                return Err(ConfigError::Wrap {
                    half_length: self.half_length,
                    t_max: self.t_max,
                    required,
                });
            }
        }
        Ok(())
    }

    /// Smallest `half_length` passing the no-wrap bound for every `rho` in
    /// the config.
    pub fn required_half_length(&self) -> f64 {
        self.rho
            .iter()
            .map(|&rho| required_half_length(self.t_max, &self.packet(), rho))
            .fold(0.0, f64::max)
    }

    pub fn packet(&self) -> PacketSpec {
        PacketSpec::new_1d(self.xi_center, self.xi_width)
    }

    pub fn grid(&self) -> fracscatter_core::Result<SpatialGrid> {
        SpatialGrid::new(self.dim, self.n_points, self.half_length)
    }

    pub fn schedule(&self) -> fracscatter_core::Result<TimeSchedule> {
        TimeSchedule::geometric(self.dt, self.t0, self.ratio, self.t_max)
    }

    /// Every `(rho, gamma, lambda)` combination, rho slowest.
    pub fn parameter_points(&self) -> Result<Vec<PhysicsParams>, ConfigError> {
        let mut out = Vec::new();
        for &rho in &self.rho {
            for &gamma in &self.gamma {
                for &lambda in &self.lambda {
                    let p = PhysicsParams::new(rho, gamma, lambda, self.epsilon)
                        .map_err(|e| bad("epsilon", &self.epsilon.to_string(), &e.to_string()))?;
                    out.push(p);
                }
            }
        }
        Ok(out)
    }

    /// The single parameter point of a non-sweep config.
    pub fn params(&self) -> Result<PhysicsParams, ConfigError> {
        Ok(self.parameter_points()?[0])
    }

    /// Canonical text; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        put("kind", self.kind.to_string());
        put("rho", join(&self.rho));
        put("gamma", join(&self.gamma));
        put("lambda", join(&self.lambda));
        put("epsilon", self.epsilon.to_string());
        put("dim", self.dim.to_string());
        put("n_points", self.n_points.to_string());
        put("half_length", self.half_length.to_string());
        put("xi_center", self.xi_center.to_string());
        put("xi_width", self.xi_width.to_string());
        put("dt", self.dt.to_string());
        put("t0", self.t0.to_string());
        put("ratio", self.ratio.to_string());
        put("t_max", self.t_max.to_string());
        put("seed", self.seed.to_string());
        if let Some(dir) = &self.out_dir {
            put("out_dir", dir.display().to_string());
        }
        s
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

fn bad(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::Value {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

fn positive(key: &str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(bad(key, &value.to_string(), "must be positive and finite"))
    }
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| bad(key, value, &e.to_string()))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value.split(',').map(|v| scalar(key, v.trim())).collect()
}
