use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use covmap::linalg::Tolerance;
use covmap::operators::RngSeed;

pub const CONFIG_ENV: &str = "COVMAP_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Run settings: built-in defaults, then the `COVMAP_CONFIG` file, then flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub d: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for CliConfig {
    fn default() -> Self {
        let tol = Tolerance::default();
        CliConfig {
            tol_abs: tol.abs,
            tol_rel: tol.rel,
            d: None,
            samples: 1000,
            seed: 0,
            out: None,
            format: Format::Json,
        }
    }
}

/// Flag values; `None` keeps the configured value.
#[derive(Debug, Default)]
pub struct Overrides {
    pub tol_abs: Option<f64>,
    pub tol_rel: Option<f64>,
    pub d: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl CliConfig {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    /// Defaults, overlaid with `COVMAP_CONFIG` when set.
    pub fn load() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::from_file(Path::new(&path)),
            _ => Ok(Self::default()),
        }
    }

    pub fn apply(mut self, o: Overrides) -> Self {
        if let Some(v) = o.tol_abs {
            self.tol_abs = v;
        }
        if let Some(v) = o.tol_rel {
            self.tol_rel = v;
        }
        if o.d.is_some() {
            self.d = o.d;
        }
        if let Some(v) = o.samples {
            self.samples = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if o.out.is_some() {
            self.out = o.out;
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.samples == 0 {
            return Err("samples must be at least 1".into());
        }
        if !(self.tol_abs >= 0.0 && self.tol_rel >= 0.0) {
            return Err(format!(
                "tolerances must be nonnegative, got abs = {}, rel = {}",
                self.tol_abs, self.tol_rel
            ));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs: self.tol_abs,
            rel: self.tol_rel,
        }
    }

    pub fn seed(&self) -> RngSeed {
        RngSeed(self.seed)
    }
}
