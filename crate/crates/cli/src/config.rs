//! Flat `key = value` scenario files. Powers are given in dB here and
//! converted to linear units once, on the way into `SystemParams`.

use sopcalc_core::montecarlo::{Conditioning, Scheme};
use sopcalc_core::optimizer::{db_to_lin, Axis, OptSpec, Setting};
use sopcalc_core::scenario::Scenario;
use sopcalc_core::sop_noncolluding::OmegaForm;
use sopcalc_core::{Error, SystemParams};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub msg: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.msg)
    }
}

impl std::error::Error for ConfigError {}

fn err(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError { key: key.to_string(), msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Analytic,
    Mc,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub setting: Setting,
    pub scenario: Scenario,
    pub method: MethodChoice,
    pub axis: Option<Axis>,
    pub grid: Vec<f64>,
    pub opt: OptSpec,
    pub out: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            setting: Setting { params: SystemParams::default(), n: 1 },
            scenario: Scenario::new(Scheme::Tab),
            method: MethodChoice::Analytic,
            axis: None,
            grid: Vec::new(),
            opt: OptSpec::default(),
            out: None,
        }
    }
}

/// Splits a config text into (key, value) pairs. `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(line, format!("line {} is not of the form key = value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn num(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| err(key, format!("`{v}` is not a number")))
}

fn count<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse::<T>()
        .map_err(|_| err(key, format!("`{v}` is not a nonnegative integer")))
}

fn boolean(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(err(key, format!("`{v}` is not a boolean"))),
    }
}

/// dB to linear; `off` means zero power.
fn power(key: &str, v: &str) -> Result<f64, ConfigError> {
    if v == "off" {
        return Ok(0.0);
    }
    Ok(db_to_lin(num(key, v)?))
}

fn number_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| num(key, s.trim())).collect()
}

/// `a,b,c`, `lin(lo,hi,n)` or `log(lo,hi,n)`.
pub fn parse_grid(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let spaced = |body: &str, log: bool| -> Result<Vec<f64>, ConfigError> {
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(err(key, "expected (lo, hi, count)"));
        }
        let (lo, hi) = (num(key, parts[0])?, num(key, parts[1])?);
        let n: usize = count(key, parts[2])?;
        if n < 2 || !(lo < hi) || (log && !(lo > 0.0)) {
            return Err(err(key, "need count >= 2 and lo < hi (lo > 0 for log)"));
        }
        Ok((0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if log {
                    (lo.ln() + t * (hi.ln() - lo.ln())).exp()
                } else {
                    lo + t * (hi - lo)
                }
            })
            .collect())
    };
    let v = v.trim();
    if let Some(body) = v.strip_prefix("lin(").and_then(|s| s.strip_suffix(')')) {
        spaced(body, false)
    } else if let Some(body) = v.strip_prefix("log(").and_then(|s| s.strip_suffix(')')) {
        spaced(body, true)
    } else {
        let g = number_list(key, v)?;
        if g.is_empty() {
            return Err(err(key, "grid is empty"));
        }
        Ok(g)
    }
}

pub fn parse_scheme(v: &str) -> Option<Scheme> {
    Some(match v {
        "tas" => Scheme::Tas,
        "tab" => Scheme::Tab,
        "tab-us" => Scheme::TabUs,
        "tas-us" => Scheme::TasUs,
        _ => return None,
    })
}

impl ScenarioConfig {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let p = &mut self.setting.params;
        let sc = &mut self.scenario;
        match key {
            "M" => p.antennas = count(key, v)?,
            "P_T" => p.p_t = power(key, v)?,
            "P_J" => p.p_j = power(key, v)?,
            "rho" => p.rho = num(key, v)?,
            "eps" => p.eps = num(key, v)?,
            "alpha" => p.alpha = num(key, v)?,
            "R" => p.r_outer = num(key, v)?,
            "R_g" => p.r_guard = num(key, v)?,
            "d" => p.d = num(key, v)?,
            "rho_E" => p.rho_e = num(key, v)?,
            "rho_U" => p.rho_u = num(key, v)?,
            "R_s" => p.r_s = num(key, v)?,
            "R_D" => p.r_d = num(key, v)?,
            "n" => self.setting.n = count(key, v)?,
            "scheme" => {
                sc.scheme = parse_scheme(v).ok_or_else(|| err(key, format!("unknown scheme `{v}`")))?
            }
            "colluding" => sc.colluding = boolean(key, v)?,
            "method" => {
                self.method = match v {
                    "analytic" => MethodChoice::Analytic,
                    "mc" => MethodChoice::Mc,
                    "both" => MethodChoice::Both,
                    _ => return Err(err(key, format!("unknown method `{v}`"))),
                }
            }
            "conditioning" => {
                sc.conditioning = match v {
                    "seeded" => Conditioning::Seeded,
                    "nominal" => Conditioning::Nominal,
                    "redraw" => Conditioning::Redraw,
                    _ => return Err(err(key, format!("unknown conditioning `{v}`"))),
                }
            }
            "axis" => {
                self.axis = Some(Axis::parse(v).ok_or_else(|| err(key, format!("unknown axis `{v}`")))?)
            }
            "grid" => self.grid = parse_grid(key, v)?,
            "trials" => sc.trials = count(key, v)?,
            "seed" => sc.seed = count(key, v)?,
            "threads" => sc.threads = Some(count(key, v)?),
            "eve_noise" => sc.eve_noise = boolean(key, v)?,
            "omega" => {
                sc.analytic.omega = match v {
                    "exact" => OmegaForm::Exact,
                    "published" => OmegaForm::Published,
                    _ => return Err(err(key, format!("unknown omega form `{v}`"))),
                }
            }
            "gamma_order" => sc.coll.series.order = count(key, v)?,
            "an_eve_noise" => sc.coll.an_eve_noise = boolean(key, v)?,
            "pj_lo_db" => self.opt.pj_range_db.0 = num(key, v)?,
            "pj_hi_db" => self.opt.pj_range_db.1 = num(key, v)?,
            "tol_db" => self.opt.tol_db = num(key, v)?,
            "eps_grid" => self.opt.eps_grid = Some(number_list(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            _ => return Err(err(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies `text`, then each `KEY=VALUE` override, and validates.
    pub fn load(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        for (k, v) in parse_pairs(text)? {
            cfg.set(&k, &v)?;
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| err(o, "override must look like KEY=VALUE"))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.setting.params.validate().map_err(|e| match e {
            Error::InvalidParam { name, msg } => err(name, msg),
            other => err("params", other.to_string()),
        })?;
        if self.scenario.trials == 0 {
            return Err(err("trials", "must be >= 1"));
        }
        if self.setting.n == 0 {
            return Err(err("n", "must be >= 1"));
        }
        if self.scenario.coll.series.order == 0 {
            return Err(err("gamma_order", "must be >= 1"));
        }
        if self.axis.is_some() && self.grid.is_empty() {
            return Err(err("grid", "an axis needs a grid"));
        }
        if self.axis.is_none() && !self.grid.is_empty() {
            return Err(err("axis", "a grid needs an axis"));
        }
        let (lo, hi) = self.opt.pj_range_db;
        if !(lo < hi) {
            return Err(err("pj_lo_db", format!("range [{lo}, {hi}] is empty")));
        }
        if !(self.opt.tol_db > 0.0) {
            return Err(err("tol_db", "must be positive"));
        }
        if self.scenario.scheme.is_user_selection() && self.setting.params.p_j != 0.0 {
            return Err(err("P_J", "user-selection schemes need P_J = off"));
        }
        Ok(())
    }
}
