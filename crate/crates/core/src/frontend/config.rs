use std::path::{Path, PathBuf};

use crate::engine::Budget;
use crate::error::{Error, Result};

/// Environment variable naming the config file; a `--config` flag wins over it.
pub const CONFIG_ENV: &str = "PADIC_EXP_CONFIG";
/// Config file read from the working directory when neither is given.
pub const DEFAULT_CONFIG_FILE: &str = "padic-exp.conf";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub prime: u64,
    pub budget: Budget,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            prime: 5,
            budget: Budget::default(),
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{value}` is not a valid value for `{key}`")))
}

impl Config {
    /// Sets one key; keys mirror the command-line flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let b = &mut self.budget;
        match key.replace('_', "-").as_str() {
            "prime" => self.prime = number(key, value)?,
            "precision" => b.precision = number(key, value)?,
            "precision-cap" => b.hensel_precision_cap = number(key, value)?,
            "budget-degree" => b.max_degree = number(key, value)?,
            "budget-height" => b.max_coeff_height = number(key, value)?,
            "budget-center-height" => b.max_center_height = number(key, value)?,
            "budget-radius" => b.max_radius = number(key, value)?,
            "budget-level" => b.max_level = number(key, value)?,
            "budget-steps" => b.max_steps = number(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// Checks the prime and the budget.
    pub fn validate(&self) -> Result<()> {
        let p = self.prime;
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        self.budget.validate()
    }
}

/// The config file to read: the explicit path, else the environment
/// variable, else the default file if it exists.
pub fn config_path(explicit: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    if let Some(p) = std::env::var_os(CONFIG_ENV).filter(|p| !p.is_empty()) {
        return Some(PathBuf::from(p));
    }
    let default = PathBuf::from(DEFAULT_CONFIG_FILE);
    default.exists().then_some(default)
}

/// Defaults overridden by the config file found through [`config_path`].
pub fn load_config(explicit: Option<&Path>) -> Result<Config> {
    let mut config = Config::default();
    if let Some(path) = config_path(explicit) {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.apply_text(&text)?;
    }
    Ok(config)
}
