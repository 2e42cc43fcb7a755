//! Run configuration: defaults, then a `key = value` file, then flags.

use std::fmt;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use cpn_core::algebra::NValue;
use cpn_core::moments::MIN_MC_SAMPLES;
use cpn_core::variation::single_coefficient_mutations;

/// Bad flags, a bad config file, or out-of-range values. Exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Args, Clone, Debug, Default, PartialEq)]
pub struct Flags {
    /// Complex dimension of CP^N.
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    /// Seeded chart points per pointwise check.
    #[arg(long)]
    pub points: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long = "mc-samples")]
    pub mc_samples: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
    /// `key = value` config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Real dimension for the symbolic reduction: `symbolic` or an integer.
    #[arg(long = "n")]
    pub n: Option<String>,
    /// Random rule orders for the confluence check.
    #[arg(long)]
    pub orders: Option<usize>,
    /// Index of a single-coefficient mutation to inject into the variation suite.
    #[arg(long)]
    pub mutate: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub big_n: usize,
    pub points: usize,
    pub seed: u64,
    pub mc_samples: usize,
    pub quadrature_tol: f64,
    pub output_path: Option<String>,
    pub n: String,
    pub orders: usize,
    pub mutate: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            big_n: 2,
            points: 100,
            seed: 7,
            mc_samples: 1_000_000,
            quadrature_tol: 1e-6,
            output_path: None,
            n: "symbolic".into(),
            orders: 100,
            mutate: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, UsageError> {
    v.parse().map_err(|_| usage(format!("invalid value for {key}: {v:?}")))
}

impl RunConfig {
    /// Applies `key = value` lines. `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), UsageError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "N" => self.big_n = parse(k, v)?,
                "points" => self.points = parse(k, v)?,
                "seed" => self.seed = parse(k, v)?,
                "mc_samples" | "mc-samples" => self.mc_samples = parse(k, v)?,
                "tol" | "quadrature_tol" => self.quadrature_tol = parse(k, v)?,
                "out" | "output_path" => self.output_path = Some(v.to_string()),
                "n" => self.n = v.to_string(),
                "orders" => self.orders = parse(k, v)?,
                "mutate" => self.mutate = Some(parse(k, v)?),
                _ => return Err(usage(format!("config line {}: unknown key {k:?}", lineno + 1))),
            }
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, f: &Flags) {
        if let Some(v) = f.big_n {
            self.big_n = v;
        }
        if let Some(v) = f.points {
            self.points = v;
        }
        if let Some(v) = f.seed {
            self.seed = v;
        }
        if let Some(v) = f.mc_samples {
            self.mc_samples = v;
        }
        if let Some(v) = f.tol {
            self.quadrature_tol = v;
        }
        if let Some(v) = &f.out {
            self.output_path = Some(v.clone());
        }
        if let Some(v) = &f.n {
            self.n = v.clone();
        }
        if let Some(v) = f.orders {
            self.orders = v;
        }
        if let Some(v) = f.mutate {
            self.mutate = Some(v);
        }
    }

    /// Defaults, then the file named by `--config`, then the other flags.
    pub fn resolve(flags: &Flags) -> Result<Self, UsageError> {
        let mut cfg = Self::default();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        cfg.apply_flags(flags);
        Ok(cfg)
    }

    /// Range checks shared by every verb. `mc` enables the sample floor.
    pub fn validate(&self, mc: bool) -> Result<(), UsageError> {
        if self.big_n < 1 {
            return Err(usage(format!("N must be at least 1, got {}", self.big_n)));
        }
        if self.points < 1 {
            return Err(usage("points must be at least 1"));
        }
        if mc && self.mc_samples < MIN_MC_SAMPLES {
            return Err(usage(format!(
                "mc-samples must be at least {MIN_MC_SAMPLES}, got {}",
                self.mc_samples
            )));
        }
        if !(self.quadrature_tol.is_finite() && self.quadrature_tol > 0.0) {
            return Err(usage(format!("tol must be positive, got {}", self.quadrature_tol)));
        }
        if self.orders < 1 {
            return Err(usage("orders must be at least 1"));
        }
        self.n_value()?;
        if let Some(k) = self.mutate {
            let count = single_coefficient_mutations().len();
            if k >= count {
                return Err(usage(format!("mutate must be below {count}, got {k}")));
            }
        }
        Ok(())
    }

    pub fn n_value(&self) -> Result<NValue, UsageError> {
        if self.n == "symbolic" {
            return Ok(NValue::Symbolic);
        }
        match self.n.parse::<i64>() {
            Ok(k) if k >= 1 => Ok(NValue::Fixed(k)),
            _ => Err(usage(format!(
                "n must be `symbolic` or a positive integer, got {:?}",
                self.n
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut c = RunConfig::default();
        c.apply_file("# comment\nN = 3\nseed=11  # trailing\n\nmc_samples = 20000\n")
            .unwrap();
        assert_eq!((c.big_n, c.seed, c.mc_samples), (3, 11, 20000));
        c.apply_flags(&Flags {
            seed: Some(5),
            ..Flags::default()
        });
        assert_eq!((c.big_n, c.seed), (3, 5));
    }

    #[test]
    fn bad_files() {
        let mut c = RunConfig::default();
        assert!(c.apply_file("colour = red").is_err());
        assert!(c.apply_file("N 3").is_err());
        assert!(c.apply_file("N = three").is_err());
    }

    #[test]
    fn ranges() {
        let ok = RunConfig::default();
        assert!(ok.validate(true).is_ok());
        assert!(RunConfig { big_n: 0, ..ok.clone() }.validate(false).is_err());
        assert!(RunConfig {
            mc_samples: 100,
            ..ok.clone()
        }
        .validate(true)
        .is_err());
        assert!(RunConfig {
            mc_samples: 100,
            ..ok.clone()
        }
        .validate(false)
        .is_ok());
        assert!(RunConfig {
            n: "x".into(),
            ..ok.clone()
        }
        .validate(false)
        .is_err());
        assert!(RunConfig {
            quadrature_tol: 0.0,
            ..ok.clone()
        }
        .validate(false)
        .is_err());
        assert!(RunConfig {
            mutate: Some(10_000),
            ..ok
        }
        .validate(false)
        .is_err());
    }
}
