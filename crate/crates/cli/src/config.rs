//! Run configuration shared by every subcommand.
//!
//! Values are layered: built-in defaults, then the `--config` file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use boson_reupload::{Circle, CircuitSpec, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub n_train: usize,
    pub n_test: usize,
    /// The training set uses `seed`, the test set `seed + 1`.
    pub seed: u64,
    pub center: [f64; 2],
    pub radius: f64,
    /// Defaults to `<output_dir>/train.csv`.
    pub train_path: Option<PathBuf>,
    /// Defaults to `<output_dir>/test.csv`.
    pub test_path: Option<PathBuf>,
}

impl Default for DataConfig {
    fn default() -> Self {
        let circle = Circle::default();
        Self {
            n_train: 200,
            n_test: 1500,
            seed: 7,
            center: circle.center,
            radius: circle.radius,
            train_path: None,
            test_path: None,
        }
    }
}

impl DataConfig {
    pub fn circle(&self) -> Circle {
        Circle { center: self.center, radius: self.radius }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitSpec,
    pub train: TrainConfig,
    pub data: DataConfig,
    /// Seeds the random initial parameters.
    pub init_seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            circuit: CircuitSpec::three_layer(),
            train: TrainConfig::default(),
            data: DataConfig::default(),
            init_seed: 0,
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    /// Defaults, or the contents of `path` when given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn train_path(&self) -> PathBuf {
        self.data.train_path.clone().unwrap_or_else(|| self.output_dir.join("train.csv"))
    }

    pub fn test_path(&self) -> PathBuf {
        self.data.test_path.clone().unwrap_or_else(|| self.output_dir.join("test.csv"))
    }

    pub fn output(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.train_path(), PathBuf::from("./train.csv"));
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"data": {"n_train": 50}, "train": {"max_sweeps": 3}}"#).unwrap();
        assert_eq!(cfg.data.n_train, 50);
        assert_eq!(cfg.data.n_test, 1500);
        assert_eq!(cfg.train.max_sweeps, 3);
        assert_eq!(cfg.train.grid_size, TrainConfig::default().grid_size);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"dta": {}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"data": {"ntrain": 5}}"#).is_err());
    }

    #[test]
    fn explicit_paths_win() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"output_dir": "out", "data": {"test_path": "elsewhere/t.csv"}}"#).unwrap();
        assert_eq!(cfg.train_path(), PathBuf::from("out/train.csv"));
        assert_eq!(cfg.test_path(), PathBuf::from("elsewhere/t.csv"));
    }
}
