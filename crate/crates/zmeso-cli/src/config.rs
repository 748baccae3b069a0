//! Flat key-value experiment configuration with flag overrides.
//!
//! Precedence: command-line flag > config file > built-in default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use zmeso::testfn::TestFunction;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub zeros_path: PathBuf,
    pub sieve_limit: u64,
    pub t_height: f64,
    pub n_values: Vec<f64>,
    pub eta_spec: String,
    pub k_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub rmt_matrix_size: usize,
    pub rmt_batches: usize,
    pub alphas: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            zeros_path: PathBuf::from("data/zeros_100k.txt"),
            sieve_limit: 1_000_000,
            t_height: 2.0e4,
            n_values: vec![8.0, 16.0, 32.0],
            eta_spec: "indicator:0.5".into(),
            k_max: 4,
            samples: 10_000,
            seed: 1,
            output_dir: PathBuf::from("out"),
            rmt_matrix_size: 128,
            rmt_batches: 2_000,
            alphas: vec![0.5, -0.5],
        }
    }
}

impl ExperimentConfig {
    /// Parse `key = value` lines; `#` comments and blank lines are ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("config line {} is not `key = value`", idx + 1))?;
            self.set(key.trim(), value.trim())
                .with_context(|| format!("config line {}", idx + 1))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "zeros" => self.zeros_path = PathBuf::from(value),
            "sieve_limit" => self.sieve_limit = value.parse().context("field sieve_limit")?,
            "t" => self.t_height = value.parse().context("field t")?,
            "n" => {
                self.n_values = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .context("field n")?
            }
            "eta" => self.eta_spec = value.to_string(),
            "kmax" => self.k_max = value.parse().context("field kmax")?,
            "samples" => self.samples = value.parse().context("field samples")?,
            "seed" => self.seed = value.parse().context("field seed")?,
            "out" => self.output_dir = PathBuf::from(value),
            "rmt_n" => self.rmt_matrix_size = value.parse().context("field rmt_n")?,
            "rmt_batches" => self.rmt_batches = value.parse().context("field rmt_batches")?,
            "alphas" => {
                self.alphas = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .context("field alphas")?
            }
            other => bail!("unknown config field `{other}`"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.zeros_path.exists() {
            bail!("field zeros: path {} does not exist", self.zeros_path.display());
        }
        if self.k_max > 8 {
            bail!("field kmax: {} exceeds the cap of 8", self.k_max);
        }
        if self.samples < 100 {
            bail!("field samples: need at least 100, got {}", self.samples);
        }
        if self.n_values.is_empty() {
            bail!("field n: at least one window parameter required");
        }
        Ok(())
    }

    /// Echo as sorted key-value pairs for the manifest.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("zeros".into(), self.zeros_path.display().to_string());
        m.insert("sieve_limit".into(), self.sieve_limit.to_string());
        m.insert("t".into(), format!("{}", self.t_height));
        m.insert(
            "n".into(),
            self.n_values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
        );
        m.insert("eta".into(), self.eta_spec.clone());
        m.insert("kmax".into(), self.k_max.to_string());
        m.insert("samples".into(), self.samples.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("out".into(), self.output_dir.display().to_string());
        m.insert("rmt_n".into(), self.rmt_matrix_size.to_string());
        m.insert("rmt_batches".into(), self.rmt_batches.to_string());
        m.insert(
            "alphas".into(),
            self.alphas.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
        );
        m
    }

    /// Cache directory: ZMESO_CACHE_DIR or `<out>/cache`.
    pub fn cache_dir(&self) -> PathBuf {
        std::env::var_os("ZMESO_CACHE_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| self.output_dir.join("cache"))
    }
}

/// Parse an eta specification: `indicator:W`, `hat:W`, `bump:W`,
/// `bandlimited:D`, or `pwl:path.csv` (CSV `x,y` knot rows).
pub fn parse_eta(spec: &str) -> Result<TestFunction> {
    let (kind, arg) = spec
        .split_once(':')
        .with_context(|| format!("eta spec `{spec}` is not `kind:arg`"))?;
    match kind {
        "indicator" => Ok(TestFunction::indicator(arg.parse().context("eta width")?)),
        "hat" => Ok(TestFunction::hat(arg.parse().context("eta width")?)),
        "bump" => Ok(TestFunction::smooth_bump(arg.parse().context("eta width")?)),
        "bandlimited" => Ok(TestFunction::bandlimited_bump(arg.parse().context("eta bandwidth")?)),
        "pwl" => {
            let text = std::fs::read_to_string(arg)
                .with_context(|| format!("reading knot file {arg}"))?;
            let mut knots = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (x, y) = line
                    .split_once(',')
                    .with_context(|| format!("knot line {} is not `x,y`", i + 1))?;
                knots.push((
                    x.trim().parse::<f64>().context("knot x")?,
                    y.trim().parse::<f64>().context("knot y")?,
                ));
            }
            TestFunction::piecewise_linear(knots).map_err(|e| anyhow::anyhow!("{e}"))
        }
        other => bail!("unknown eta kind `{other}`"),
    }
}
