use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::css::Algorithm;
use crate::error::{CssError, Result};
use crate::harness::io::MatrixFormat;
use crate::numerics::PNorm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Streaming,
    Distributed,
    Offline,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Streaming => "streaming",
            Mode::Distributed => "distributed",
            Mode::Offline => "offline",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = CssError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "streaming" => Ok(Mode::Streaming),
            "distributed" => Ok(Mode::Distributed),
            "offline" => Ok(Mode::Offline),
            other => Err(CssError::Config(format!("unknown mode '{other}'"))),
        }
    }
}

/// One experiment, read from a flat TOML file. Unknown keys are rejected.
/// Unset hyperparameters fall back to `r = 5k`, `t_c = 2k`, `⌈d/2⌉` sketch
/// rows, 5 servers, `t′ = k` and `δ = 0.1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub algorithms: Vec<Algorithm>,
    pub k: usize,
    #[serde(default = "default_p")]
    pub p: PNorm,
    pub seeds: Vec<u64>,
    /// `"synthetic"` or a path to a matrix file.
    pub dataset: String,
    #[serde(default)]
    pub synthetic_n: Option<usize>,
    #[serde(default = "default_format")]
    pub format: MatrixFormat,
    #[serde(default)]
    pub header: bool,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub coreset_size: Option<usize>,
    #[serde(default)]
    pub sketch_rows: Option<usize>,
    #[serde(default = "default_servers")]
    pub servers: usize,
    /// Optional shard assignment file, one server id per column.
    #[serde(default)]
    pub assignment: Option<PathBuf>,
    #[serde(default)]
    pub t_prime: Option<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Shuffle column order per seed before streaming or sharding.
    #[serde(default = "default_true")]
    pub permute: bool,
    #[serde(default = "default_true")]
    pub parallel: bool,
    /// Write one transcript file per distributed run.
    #[serde(default)]
    pub transcripts: bool,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_p() -> PNorm {
    PNorm::ONE
}
fn default_format() -> MatrixFormat {
    MatrixFormat::Csv
}
fn default_servers() -> usize {
    5
}
fn default_delta() -> f64 {
    0.1
}
fn default_true() -> bool {
    true
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CssError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CssError::Config(e.to_string()))
    }

    /// A synthetic-dataset experiment with every default filled in.
    pub fn synthetic(mode: Mode, algorithms: Vec<Algorithm>, n: usize, k: usize, seeds: Vec<u64>) -> Self {
        Self {
            mode,
            algorithms,
            k,
            p: PNorm::ONE,
            seeds,
            dataset: "synthetic".into(),
            synthetic_n: Some(n),
            format: MatrixFormat::Csv,
            header: false,
            batch_size: None,
            coreset_size: None,
            sketch_rows: None,
            servers: 5,
            assignment: None,
            t_prime: None,
            delta: 0.1,
            permute: true,
            parallel: true,
            transcripts: false,
            output: default_output(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CssError::Config(m.to_string()));
        if self.k == 0 {
            return bad("k must be positive");
        }
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required");
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        if self.servers == 0 {
            return bad("servers must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if self.dataset == "synthetic" && self.synthetic_n.is_none() {
            return bad("synthetic dataset needs synthetic_n");
        }
        for (name, v) in [
            ("batch_size", self.batch_size),
            ("coreset_size", self.coreset_size),
            ("sketch_rows", self.sketch_rows),
            ("t_prime", self.t_prime),
            ("synthetic_n", self.synthetic_n),
        ] {
            if v == Some(0) {
                return Err(CssError::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_parses() {
        let cfg = ExperimentConfig::from_toml(
            "mode = \"streaming\"\nalgorithms = [\"regular\", \"svd\"]\nk = 3\nseeds = [1, 2]\ndataset = \"synthetic\"\nsynthetic_n = 20\n",
        )
        .unwrap();
        assert_eq!(cfg.servers, 5);
        assert_eq!(cfg.p, PNorm::ONE);
        assert_eq!(cfg.algorithms, vec![Algorithm::Regular, Algorithm::Svd]);
    }

    #[test]
    fn unknown_key_rejected() {
        let r = ExperimentConfig::from_toml(
            "mode = \"offline\"\nalgorithms = [\"svd\"]\nk = 3\nseeds = [1]\ndataset = \"synthetic\"\nsynthetic_n = 2\nbogus = 1\n",
        );
        assert!(matches!(r, Err(CssError::Config(_))));
    }

    #[test]
    fn p_out_of_range_rejected() {
        let r = ExperimentConfig::from_toml(
            "mode = \"offline\"\nalgorithms = [\"svd\"]\nk = 3\np = 2.0\nseeds = [1]\ndataset = \"synthetic\"\nsynthetic_n = 2\n",
        );
        assert!(r.is_err());
    }

    #[test]
    fn round_trips() {
        let cfg = ExperimentConfig::synthetic(Mode::Distributed, vec![Algorithm::Greedy], 10, 2, vec![3]);
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
    }
}
