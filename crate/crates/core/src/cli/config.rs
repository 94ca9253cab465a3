use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermi::DEFAULT_EPS;
use crate::fredholm::MIN_NODES;
use crate::painleve::{PII_DEFAULT_N, PII_DEFAULT_WINDOW, PV_DEFAULT_N, PV_DEFAULT_TAU_MAX};
use crate::quadrature::MAX_ORDER;

/// Names a key=value configuration file.
pub const CONFIG_ENV: &str = "FTGAP_CONFIG";
/// Overrides the cache directory of the configuration file.
pub const CACHE_DIR_ENV: &str = "FTGAP_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub nodes: usize,
    pub eps: f64,
    /// (t_min, t_max, n) of the Painlevé II grid.
    pub pii_window: (f64, f64, usize),
    /// (tau_max, n) of the sigma-PV table.
    pub pv_window: (f64, usize),
    pub cache_dir: PathBuf,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            nodes: 240,
            eps: DEFAULT_EPS,
            pii_window: (PII_DEFAULT_WINDOW.0, PII_DEFAULT_WINDOW.1, PII_DEFAULT_N),
            pv_window: (PV_DEFAULT_TAU_MAX, PV_DEFAULT_N),
            cache_dir: std::env::temp_dir().join("ftgap-cache"),
            output_format: OutputFormat::Csv,
        }
    }
}

/// Values given on the command line; `None` leaves the lower layers in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub nodes: Option<usize>,
    pub eps: Option<f64>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub pii_t_min: Option<f64>,
    pub pii_t_max: Option<f64>,
    pub pii_n: Option<usize>,
    pub pv_tau_max: Option<f64>,
    pub pv_n: Option<usize>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::invalid(format!("config key '{key}': cannot parse '{value}'")))
}

impl RunConfig {
    /// Defaults, then the file named by `FTGAP_CONFIG`, then `FTGAP_CACHE_DIR`,
    /// then the command-line overrides. The result is validated.
    pub fn resolve(overrides: &Overrides, env: &dyn Fn(&str) -> Option<String>) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = env(CONFIG_ENV).filter(|p| !p.is_empty()) {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::invalid(format!("{CONFIG_ENV}={path}: {e}")))?;
            cfg.apply_file(&text)?;
        }
        if let Some(dir) = env(CACHE_DIR_ENV).filter(|p| !p.is_empty()) {
            cfg.cache_dir = PathBuf::from(dir);
        }
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("config line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "nodes" => self.nodes = parse(key, value)?,
                "eps" => self.eps = parse(key, value)?,
                "pii_t_min" => self.pii_window.0 = parse(key, value)?,
                "pii_t_max" => self.pii_window.1 = parse(key, value)?,
                "pii_n" => self.pii_window.2 = parse(key, value)?,
                "pv_tau_max" => self.pv_window.0 = parse(key, value)?,
                "pv_n" => self.pv_window.1 = parse(key, value)?,
                "cache_dir" => self.cache_dir = PathBuf::from(value),
                "format" => {
                    self.output_format = OutputFormat::from_str(value, true)
                        .map_err(|_| Error::invalid(format!("config key 'format': unknown format '{value}'")))?
                }
                _ => return Err(Error::invalid(format!("config line {}: unknown key '{key}'", lineno + 1))),
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.nodes {
            self.nodes = v;
        }
        if let Some(v) = o.eps {
            self.eps = v;
        }
        if let Some(v) = &o.cache_dir {
            self.cache_dir = v.clone();
        }
        if let Some(v) = o.format {
            self.output_format = v;
        }
        if let Some(v) = o.pii_t_min {
            self.pii_window.0 = v;
        }
        if let Some(v) = o.pii_t_max {
            self.pii_window.1 = v;
        }
        if let Some(v) = o.pii_n {
            self.pii_window.2 = v;
        }
        if let Some(v) = o.pv_tau_max {
            self.pv_window.0 = v;
        }
        if let Some(v) = o.pv_n {
            self.pv_window.1 = v;
        }
    }

    /// Checks every field against the preconditions of the module it feeds.
    pub fn validate(&self) -> Result<()> {
        let range = |what: &'static str, v: f64, lo: f64, hi: f64| {
            if v >= lo && v <= hi {
                Ok(())
            } else {
                Err(Error::OutOfRange { what, value: v, lo, hi })
            }
        };
        range("nodes", self.nodes as f64, MIN_NODES as f64, MAX_ORDER as f64)?;
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::OutOfRange { what: "eps", value: self.eps, lo: 0.0, hi: 1.0 });
        }
        range("pii t_min", self.pii_window.0, -200.0, -8.0)?;
        range("pii t_max", self.pii_window.1, 6.0, 25.0)?;
        range("pii n", self.pii_window.2 as f64, 400.0, 1e6)?;
        range("pv tau_max", self.pv_window.0, 5.0, 40.0)?;
        range("pv n", self.pv_window.1 as f64, 200.0, 1e6)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn file_then_env_then_flags() {
        let dir = std::env::temp_dir().join(format!("ftgap-config-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("cfg");
        std::fs::write(&file, "# comment\nnodes = 120\neps=1e-10\ncache_dir=/from/file\nformat = json\n").unwrap();
        let path = file.to_string_lossy().into_owned();
        let env = |k: &str| match k {
            CONFIG_ENV => Some(path.clone()),
            CACHE_DIR_ENV => Some("/from/env".to_string()),
            _ => None,
        };
        let cfg = RunConfig::resolve(&Overrides::default(), &env).unwrap();
        assert_eq!(cfg.nodes, 120);
        assert_eq!(cfg.eps, 1e-10);
        assert_eq!(cfg.cache_dir, PathBuf::from("/from/env"));
        assert_eq!(cfg.output_format, OutputFormat::Json);
        let flags = Overrides { nodes: Some(200), cache_dir: Some("/from/flag".into()), ..Default::default() };
        let cfg = RunConfig::resolve(&flags, &env).unwrap();
        assert_eq!(cfg.nodes, 200);
        assert_eq!(cfg.cache_dir, PathBuf::from("/from/flag"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_file("bogus = 1").is_err());
        assert!(cfg.apply_file("nodes = many").is_err());
        assert!(cfg.apply_file("just text").is_err());
        let none = |_: &str| None;
        let o = Overrides { nodes: Some(4), ..Default::default() };
        assert!(RunConfig::resolve(&o, &none).unwrap_err().is_precondition());
        let o = Overrides { pii_t_min: Some(-4.0), ..Default::default() };
        assert!(RunConfig::resolve(&o, &none).is_err());
        let o = Overrides { eps: Some(0.0), ..Default::default() };
        assert!(RunConfig::resolve(&o, &none).is_err());
    }
}
