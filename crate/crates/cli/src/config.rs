use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// Settings after merging flags, the optional config file and defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub k: u32,
    pub max_index: usize,
    pub digits: u32,
    pub trunc_b: u64,
    pub r_max: Option<usize>,
    pub prime_cutoff: u64,
    pub n: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub quick: bool,
}

/// The same fields, all optional; used for both the TOML file and the flags.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct PartialConfig {
    pub k: Option<u32>,
    pub max_index: Option<usize>,
    pub digits: Option<u32>,
    pub trunc_b: Option<u64>,
    pub r_max: Option<usize>,
    pub prime_cutoff: Option<u64>,
    #[serde(alias = "N")]
    pub n: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub quick: Option<bool>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: PartialConfig) -> PartialConfig {
        PartialConfig {
            k: self.k.or(lower.k),
            max_index: self.max_index.or(lower.max_index),
            digits: self.digits.or(lower.digits),
            trunc_b: self.trunc_b.or(lower.trunc_b),
            r_max: self.r_max.or(lower.r_max),
            prime_cutoff: self.prime_cutoff.or(lower.prime_cutoff),
            n: self.n.or(lower.n),
            format: self.format.or(lower.format),
            out: self.out.or(lower.out),
            threads: self.threads.or(lower.threads),
            quick: self.quick.or(lower.quick),
        }
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let quick = self.quick.unwrap_or(false);
        let k = self.k.unwrap_or(2);
        let cfg = RunConfig {
            k,
            max_index: self.max_index.unwrap_or(5),
            digits: self.digits.unwrap_or(28),
            trunc_b: self.trunc_b.unwrap_or(if quick { 1_000 } else { 10_000 }),
            r_max: self.r_max,
            prime_cutoff: self.prime_cutoff.unwrap_or(kfull::power_sums::DEFAULT_PRIME_CUTOFF),
            n: self.n.unwrap_or_else(|| default_n(k, quick)),
            format: self.format.unwrap_or(Format::Text),
            out: self.out,
            threads: self.threads,
            quick,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// What the double-double scalar can certify.
pub const MAX_DIGITS: u32 = 28;

/// Empirical range used when none is given.
pub fn default_n(k: u32, quick: bool) -> u64 {
    match (k, quick) {
        (_, true) => 10_000,
        (2, false) => 1_000_000,
        _ => 100_000,
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=64).contains(&self.k) {
            bail!("k must be between 2 and 64, got {}", self.k);
        }
        if self.digits < 6 || self.digits > MAX_DIGITS {
            bail!("digits must be between 6 and {MAX_DIGITS}, got {}", self.digits);
        }
        if self.trunc_b < 2 {
            bail!("trunc-B must be at least 2");
        }
        if self.r_max == Some(0) || self.prime_cutoff == 0 || self.n == 0 || self.threads == Some(0) {
            bail!("r-max, prime-cutoff, N and threads must be positive");
        }
        Ok(())
    }

    pub fn engine_config(&self) -> kfull::EngineConfig {
        kfull::EngineConfig {
            max_index: self.max_index,
            r_max: self.r_max,
            prime_cutoff: self.prime_cutoff,
            digits: self.digits,
            ..kfull::EngineConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_flags_file_defaults() {
        let file: PartialConfig = toml::from_str("k = 3\ndigits = 20\nN = 500").unwrap();
        let flags = PartialConfig {
            digits: Some(12),
            ..Default::default()
        };
        let cfg = flags.over(file).resolve().unwrap();
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.digits, 12);
        assert_eq!(cfg.n, 500);
        assert_eq!(cfg.max_index, 5);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = PartialConfig {
            k: Some(1),
            ..Default::default()
        };
        assert!(bad.resolve().is_err());
        let bad = PartialConfig {
            digits: Some(5),
            ..Default::default()
        };
        assert!(bad.resolve().is_err());
        assert!(toml::from_str::<PartialConfig>("bogus = 1").is_err());
    }
}
