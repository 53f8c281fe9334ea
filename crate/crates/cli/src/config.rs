use std::path::{Path, PathBuf};

use cliffordian::verify::{SuiteConfig, Thresholds};
use cliffordian::zeta::EvalConfig;
use cliffordian::PeriodLattice;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the default report directory.
pub const OUTPUT_DIR_ENV: &str = "CLIFF_ELLIPTIC_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Settings read from `--config`; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Bundled lattice name or path to a lattice JSON file.
    pub lattice: Option<String>,
    pub seed: Option<u64>,
    pub max_radius: Option<u32>,
    pub target_tol: Option<f64>,
    pub samples: Option<usize>,
    pub trend_samples: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub output: Option<OutputFormat>,
    pub thresholds: Thresholds,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn lattice(&self) -> Result<PeriodLattice, CliError> {
        let spec = self.lattice.as_deref().unwrap_or("m0-square");
        if let Some(l) = PeriodLattice::named(spec) {
            return Ok(l);
        }
        let text = std::fs::read_to_string(spec).map_err(|e| {
            CliError::Usage(format!("{spec:?} is neither a bundled lattice (m0-square, m1-unit) nor a readable file: {e}"))
        })?;
        PeriodLattice::from_json(&text).map_err(|e| CliError::Usage(format!("lattice {spec}: {e}")))
    }

    pub fn eval_config(&self) -> Result<EvalConfig, CliError> {
        let mut cfg = EvalConfig::default();
        if let Some(r) = self.max_radius {
            cfg.max_radius = r;
        }
        if let Some(t) = self.target_tol {
            cfg.target_tol = t;
        }
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn suite_config(&self, lattice: &PeriodLattice) -> SuiteConfig {
        let mut cfg = SuiteConfig::for_lattice(lattice);
        if let Some(r) = self.max_radius {
            cfg.radius = r;
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
        if let Some(s) = self.trend_samples {
            cfg.trend_samples = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.thresholds = self.thresholds.clone();
        cfg
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    /// Applies `key=value` threshold overrides.
    pub fn override_thresholds(&mut self, pairs: &[String]) -> Result<(), CliError> {
        if pairs.is_empty() {
            return Ok(());
        }
        let mut doc = serde_json::to_value(&self.thresholds).expect("thresholds serialize");
        for pair in pairs {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("threshold override {pair:?} is not key=value")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("threshold {key}: {value:?} is not a number")))?;
            doc[key.trim()] = serde_json::json!(value);
        }
        self.thresholds =
            serde_json::from_value(doc).map_err(|e| CliError::Usage(format!("threshold override: {e}")))?;
        Ok(())
    }
}
