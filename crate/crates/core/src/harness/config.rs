//! Experiment configuration as `key = value` text.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are an
//! error. [`ExperimentConfig::to_text`] writes every key in sorted order, and
//! parsing that text gives back the same config.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::MAX_K;

/// Largest `N` the coverage experiment accepts.
pub const MAX_EXPERIMENT_N: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetMode {
    #[default]
    Bernoulli,
    ExactCount,
    Full,
}

impl fmt::Display for SubsetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsetMode::Bernoulli => "bernoulli",
            SubsetMode::ExactCount => "exact_count",
            SubsetMode::Full => "full",
        })
    }
}

impl FromStr for SubsetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(SubsetMode::Bernoulli),
            "exact_count" => Ok(SubsetMode::ExactCount),
            "full" => Ok(SubsetMode::Full),
            _ => Err(Error::Parse(format!("unknown subset mode '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::Parse(format!("unknown output format '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: u32,
    pub w: u64,
    /// Upper end of the coverage window.
    pub n: u64,
    /// Lower end of the coverage window.
    pub n_min: u64,
    pub s: u64,
    pub density: f64,
    pub seed: u64,
    pub rho: f64,
    /// Fourier grid size; 0 picks the smallest power of two `>= 4N`.
    pub grid: u64,
    pub subset_mode: SubsetMode,
    pub output_format: OutputFormat,
    /// Restrict coverage to `n = s (mod R_k)`.
    pub congruence_filter: bool,
    /// Coverage fraction below which the experiment counts as failed.
    pub coverage_threshold: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: 2,
            w: 2,
            n: 100_000,
            n_min: 1,
            s: 5,
            density: 1.0,
            seed: 0,
            rho: 0.2,
            grid: 0,
            subset_mode: SubsetMode::Bernoulli,
            output_format: OutputFormat::Json,
            congruence_filter: true,
            coverage_threshold: 0.99,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("bad value '{value}' for {key}")))
}

impl ExperimentConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "k" => self.k = parse(key, v)?,
            "w" => self.w = parse(key, v)?,
            "n" | "N" => self.n = parse(key, v)?,
            "n_min" => self.n_min = parse(key, v)?,
            "s" => self.s = parse(key, v)?,
            "density" => self.density = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "rho" => self.rho = parse(key, v)?,
            "grid" => self.grid = parse(key, v)?,
            "subset_mode" => self.subset_mode = v.parse()?,
            "output_format" => self.output_format = v.parse()?,
            "congruence_filter" => self.congruence_filter = parse(key, v)?,
            "coverage_threshold" => self.coverage_threshold = parse(key, v)?,
            other => return Err(Error::Parse(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(key, value)
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn entries(&self) -> BTreeMap<String, String> {
        [
            ("congruence_filter", self.congruence_filter.to_string()),
            ("coverage_threshold", self.coverage_threshold.to_string()),
            ("density", self.density.to_string()),
            ("grid", self.grid.to_string()),
            ("k", self.k.to_string()),
            ("n", self.n.to_string()),
            ("n_min", self.n_min.to_string()),
            ("output_format", self.output_format.to_string()),
            ("rho", self.rho.to_string()),
            ("s", self.s.to_string()),
            ("seed", self.seed.to_string()),
            ("subset_mode", self.subset_mode.to_string()),
            ("w", self.w.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn grid_size(&self) -> u64 {
        if self.grid == 0 {
            (4 * self.n).next_power_of_two()
        } else {
            self.grid
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(2..=MAX_K).contains(&self.k) {
            return bad(format!("k = {} outside [2, {MAX_K}]", self.k));
        }
        if self.w < 2 {
            return bad(format!("w = {} must be >= 2", self.w));
        }
        if self.n == 0 || self.n > MAX_EXPERIMENT_N {
            return bad(format!("N = {} outside [1, {MAX_EXPERIMENT_N}]", self.n));
        }
        if self.n_min == 0 || self.n_min > self.n {
            return bad(format!("n_min = {} outside [1, N]", self.n_min));
        }
        if self.s == 0 {
            return bad("s must be >= 1".into());
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density = {} outside (0, 1]", self.density));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0 / 3.0) {
            return bad(format!("rho = {} outside (0, 1/3]", self.rho));
        }
        if self.grid != 0 && (!self.grid.is_power_of_two() || self.grid < 4 * self.n) {
            return bad(format!("grid = {} must be a power of two >= 4N", self.grid));
        }
        if !(0.0..=1.0).contains(&self.coverage_threshold) {
            return bad(format!(
                "coverage_threshold = {} outside [0, 1]",
                self.coverage_threshold
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_defaults() {
        let cfg = ExperimentConfig::parse_text(
            "# comment\nk = 3\n\ns=7\nsubset_mode = exact_count\ndensity = 0.5\n",
        )
        .unwrap();
        assert_eq!(
            (cfg.k, cfg.s, cfg.subset_mode, cfg.density),
            (3, 7, SubsetMode::ExactCount, 0.5)
        );
        assert_eq!(cfg.w, 2);
        assert!(ExperimentConfig::parse_text("bogus = 1").is_err());
        assert!(ExperimentConfig::parse_text("k 2").is_err());
        assert!(ExperimentConfig::parse_text("density = 0").is_err());
        assert!(ExperimentConfig::parse_text("grid = 1000").is_err());
        assert_eq!(ExperimentConfig::default().grid_size(), 1 << 19);
    }

    proptest! {
        #[test]
        fn round_trip(k in 2u32..=12, n in 1u64..1_000_000, s in 1u64..100, density in 0.001f64..=1.0, seed: u64, rho in 0.01f64..0.33, filter: bool) {
            let cfg = ExperimentConfig { k, n, s, density, seed, rho, congruence_filter: filter, ..Default::default() };
            let back = ExperimentConfig::parse_text(&cfg.to_text()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
